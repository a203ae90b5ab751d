"""Equilibrium measures of the log-gas with quadratic potential Q(x) = T x^2 / 4.

Subcritical T (<= pi^2): the semicircle of variance t = 1/T.
Supercritical T: density 1 on the plateau [-alpha, alpha] and an elliptic
density on the two arcs J(alpha, beta) = [-beta, -alpha] U [alpha, beta].

Potentials use the convention U(x) = -int log|x - y| dmu(y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import elliptic
from .transition import TransitionParams, solve_params


class EquilibriumDomainError(ValueError):
    pass


# ---------------------------------------------------------------- semicircle


def semicircle_density(t, x):
    x = np.asarray(x, dtype=float)
    r2 = 4.0 * t - x * x
    out = np.where(r2 > 0, np.sqrt(np.clip(r2, 0.0, None)) / (2 * math.pi * t), 0.0)
    return out.item() if out.ndim == 0 else out


def semicircle_potential(t, x):
    """Closed-form logarithmic potential of the semicircle, both branches."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    inside = -x * x / (4 * t) + (1 - math.log(t)) / 2
    r = np.sqrt(np.clip(x * x - 4 * t, 0.0, None))
    s = ax + r
    outside = (-x * x + ax * r) / (4 * t) - np.log(np.where(s > 0, s, 1.0)) + 0.5 + math.log(2.0)
    out = np.where(ax <= 2 * math.sqrt(t), inside, outside)
    return out.item() if out.ndim == 0 else out


def semicircle_energy(t: float) -> float:
    return 0.75 - 0.5 * math.log(t)


# -------------------------------------------------------- constrained branch


def _require_super(p: TransitionParams):
    if not p.supercritical:
        raise EquilibriumDomainError("the constrained density needs supercritical parameters")


def arc_density(p: TransitionParams, x):
    """Free-arc part of the constrained density, valid for alpha < |x| <= beta.

    Written as (2/(pi beta)) sqrt(beta^2 - x^2) sqrt(g) [K + (nu/3) R_J(0, m, 1, g)]
    with nu = alpha^2/x^2 and g = 1 - nu, so the divergence of Pi at x -> alpha
    never appears on its own.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    a, b = p.alpha, p.beta
    gap = (ax - a) * (ax + a) / (ax * ax)
    nu = (a / ax) ** 2
    m = p.m
    rj = elliptic.elliprj(0.0, m, 1.0, gap)
    sg = np.sqrt(gap)
    val = 2.0 / (math.pi * b) * np.sqrt(np.clip((b - ax) * (b + ax), 0.0, None)) * (sg * p.K + nu / 3.0 * sg * rj)
    return val


def density_phi(p: TransitionParams, x):
    _require_super(p)
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.zeros_like(ax)
    out[ax <= p.alpha] = 1.0
    on_arc = (ax > p.alpha) & (ax < p.beta)
    out[on_arc] = arc_density(p, ax[on_arc])
    return out.item() if out.ndim == 0 else out


def _s_minus_one(a2, b2, z):
    # sqrt((1 - a2/z^2)(1 - b2/z^2)) - 1 without cancellation at large z
    z2 = z * z
    return np.expm1(0.5 * (np.log1p(-a2 / z2) + np.log1p(-b2 / z2)))


def stieltjes_H(p: TransitionParams, z):
    """Stieltjes transform int dmu(y) / (z - y) for real |z| > beta."""
    _require_super(p)
    z = np.asarray(z, dtype=float)
    az = np.abs(z)
    if np.any(az <= p.beta):
        raise EquilibriumDomainError("stieltjes_H is evaluated off the support, |z| > beta")
    a, b, K, E = p.alpha, p.beta, p.K, p.E
    Fz, Ez = elliptic.incomplete_pair(b / az, p.k)
    val = 2 * E * Fz - 2 * K * Ez - (2 * K / b) * az * _s_minus_one(a * a, b * b, az)
    out = np.sign(z) * val
    return out.item() if out.ndim == 0 else out


def log_potential_g(p: TransitionParams, z):
    """g(z) = int log(z - y) dmu(y) for real z > beta; U(z) = -g(z)."""
    _require_super(p)
    z = np.asarray(z, dtype=float)
    if np.any(z <= p.beta):
        raise EquilibriumDomainError("log_potential_g needs z > beta")
    a, b, K, E = p.alpha, p.beta, p.K, p.E
    s1 = np.sqrt((z - a) * (z + a))
    s2 = np.sqrt((z - b) * (z + b))
    Fz, Ez = elliptic.incomplete_pair(b / z, p.k)
    # (2z)^2 - (s1 + s2)^2 = a^2 + b^2 + 2(z^2 - s1 s2)
    quad_term = a * a + b * b - 2 * z * z * _s_minus_one(a * a, b * b, z)
    u = (
        -np.log((s1 + s2) / 2)
        - 2 * E * z * Fz
        + 2 * K * z * Ez
        - K / (2 * b) * quad_term
        + 1.0
    )
    out = -u
    return out.item() if out.ndim == 0 else out


def potential_at_edge(p: TransitionParams) -> float:
    """(U + Q)(beta) in closed form."""
    _require_super(p)
    a, b, K, k = p.alpha, p.beta, p.K, p.k
    return -0.5 * math.log((b - a) * (b + a) / 4) - K * b / 2 * (1 + k * k) + 1.0


def plateau_potential(alpha: float, x):
    """Potential of Lebesgue measure on [-alpha, alpha]."""
    x = np.asarray(x, dtype=float)

    def xlogx(u):
        au = np.abs(u)
        return u * np.log(np.where(au > 0, au, 1.0))

    out = 2 * alpha + xlogx(x - alpha) - xlogx(x + alpha)
    return out.item() if out.ndim == 0 else out


# ------------------------------------------------------ equilibrium measure


@dataclass(frozen=True)
class EquilibriumMeasure:
    """Piecewise description of the minimiser at a given T."""

    params: TransitionParams
    plateau: float
    arcs: tuple
    _density: Callable = field(repr=False, compare=False)

    @property
    def T(self) -> float:
        return self.params.T

    @property
    def branch(self) -> str:
        return self.params.branch

    @property
    def support_edge(self) -> float:
        return self.params.beta

    def density(self, x):
        return self._density(x)

    def external(self, x):
        return self.T * np.asarray(x, dtype=float) ** 2 / 4.0

    def _arc_integral(self, fn, **quad_kw):
        total = 0.0
        for a, b in self.arcs:
            total += _theta_quad(lambda y: fn(y) * self._density(y), a, b, **quad_kw)
        return total

    def mass(self) -> float:
        return 2 * self.plateau + self._arc_integral(lambda y: 1.0)

    def second_moment(self) -> float:
        return 2 * self.plateau**3 / 3 + self._arc_integral(lambda y: y * y)

    def potential(self, x) -> float:
        return potential_U_on_line_measure(self, x)

    def potential_grid(self, xs, **kw):
        return potential_grid(self, xs, **kw)


def equilibrium_measure(T_or_params) -> EquilibriumMeasure:
    p = T_or_params if isinstance(T_or_params, TransitionParams) else solve_params(T_or_params)
    if p.supercritical:
        return EquilibriumMeasure(
            p,
            p.alpha,
            ((-p.beta, -p.alpha), (p.alpha, p.beta)),
            lambda x, _p=p: density_phi(_p, x),
        )
    t = 1.0 / p.T
    return EquilibriumMeasure(p, 0.0, ((-p.beta, p.beta),), lambda x, _t=t: semicircle_density(_t, x))


# ------------------------------------------------------------ quadratures


def _theta_map(a, b, theta):
    return a + (b - a) * (1 - np.cos(theta)) / 2


def _theta_of(a, b, y):
    c = 1 - 2 * (y - a) / (b - a)
    return np.arccos(np.clip(c, -1.0, 1.0))


def _theta_quad(fn, a, b, epsabs=1e-13, epsrel=1e-13, limit=200, points=None):
    """int_a^b fn(y) dy with y = a + (b - a)(1 - cos theta)/2.

    The substitution absorbs square-root behaviour at both ends.
    """
    half = (b - a) / 2

    def g(th):
        return float(fn(_theta_map(a, b, th))) * half * math.sin(th)

    val, _ = integrate.quad(g, 0.0, math.pi, epsabs=epsabs, epsrel=epsrel, limit=limit, points=points)
    return val


def _arc_log_quad(x, a, b, dens, epsabs=1e-12):
    """int_a^b log|x - y| dens(y) dy by adaptive quadrature."""
    half = (b - a) / 2

    def g(th):
        y = _theta_map(a, b, th)
        d = abs(x - y)
        if d == 0.0:
            return 0.0
        return math.log(d) * float(dens(y)) * half * math.sin(th)

    if a < x < b:
        tx = float(_theta_of(a, b, x))
        v1, _ = integrate.quad(g, 0.0, tx, epsabs=epsabs, epsrel=1e-12, limit=400)
        v2, _ = integrate.quad(g, tx, math.pi, epsabs=epsabs, epsrel=1e-12, limit=400)
        return v1 + v2
    val, _ = integrate.quad(g, 0.0, math.pi, epsabs=epsabs, epsrel=1e-12, limit=400)
    return val


def potential_U_on_line_measure(measure: EquilibriumMeasure, x: float) -> float:
    x = float(x)
    total = 0.0
    for a, b in measure.arcs:
        total -= _arc_log_quad(x, a, b, measure.density)
    if measure.plateau > 0:
        total += plateau_potential(measure.plateau, x)
    return total


def potential_U_on_line(p: TransitionParams, x: float) -> float:
    """U(x) on the whole line by adaptive quadrature (absolute error ~1e-9)."""
    _require_super(p)
    return potential_U_on_line_measure(equilibrium_measure(p), x)


@lru_cache(maxsize=8)
def _gauss(q):
    return np.polynomial.legendre.leggauss(q)


def _graded_nodes(lo, hi, toward_hi, sigma=0.15, levels=22, q=12):
    """Composite Gauss-Legendre nodes on [lo, hi], graded geometrically toward
    one end. lo/hi are arrays (one interval per evaluation point)."""
    xg, wg = _gauss(q)
    L = hi - lo
    # breakpoints measured from the singular end
    r = np.concatenate(([1.0], sigma ** np.arange(1, levels + 1), [0.0]))
    nodes, weights = [], []
    for r0, r1 in zip(r[:-1], r[1:]):
        # panel [r1, r0] in distance-from-singular-end units
        mid = (r0 + r1) / 2
        hw = (r0 - r1) / 2
        d = mid + hw * xg  # shape (q,)
        if toward_hi:
            t = hi[:, None] - L[:, None] * d[None, :]
        else:
            t = lo[:, None] + L[:, None] * d[None, :]
        nodes.append(t)
        weights.append(L[:, None] * hw * wg[None, :])
    return np.concatenate(nodes, axis=1), np.concatenate(weights, axis=1)


def _arc_log_grid(xs, a, b, dens):
    """Vectorised int_a^b log|x - y| dens(y) dy for many x.

    Works in the arc angle theta; each half of [0, pi] split at the angle of
    the point of [a, b] nearest to x is covered by panels graded toward it.
    """
    xs = np.asarray(xs, dtype=float)
    half = (b - a) / 2
    tx = _theta_of(a, b, np.clip(xs, a, b))
    total = np.zeros_like(xs)
    for lo, hi, toward_hi in ((np.zeros_like(tx), tx, True), (tx, np.full_like(tx, math.pi), False)):
        nonempty = hi - lo > 0
        if not np.any(nonempty):
            continue
        th, w = _graded_nodes(lo[nonempty], hi[nonempty], toward_hi)
        y = _theta_map(a, b, th)
        d = np.abs(xs[nonempty, None] - y)
        dens_vals = np.asarray(dens(y.ravel())).reshape(y.shape)
        with np.errstate(divide="ignore"):
            lg = np.where(d > 0, np.log(np.where(d > 0, d, 1.0)), 0.0)
        total[nonempty] += np.sum(lg * dens_vals * half * np.sin(th) * w, axis=1)
    return total


def potential_grid(measure: EquilibriumMeasure, xs, chunk: int = 256):
    """U at many points at once; agrees with the adaptive path to ~1e-11."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty_like(xs)
    for s in range(0, xs.size, chunk):
        sl = slice(s, s + chunk)
        xc = xs.ravel()[sl]
        u = np.zeros_like(xc)
        for a, b in measure.arcs:
            u -= _arc_log_grid(xc, a, b, measure.density)
        if measure.plateau > 0:
            u += plateau_potential(measure.plateau, xc)
        out.ravel()[sl] = u
    return out


# ------------------------------------------------------ two-interval measure


@dataclass(frozen=True)
class TwoIntervalMeasure:
    """Unweighted equilibrium measure of J(a, b) = [-b, -a] U [a, b]."""

    a: float
    b: float

    def density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        inside = (ax > self.a) & (ax < self.b)
        out = np.zeros_like(ax)
        xi = ax[inside]
        out[inside] = xi / (math.pi * np.sqrt((self.b - xi) * (self.b + xi) * (xi - self.a) * (xi + self.a)))
        return out.item() if out.ndim == 0 else out

    @property
    def second_moment(self) -> float:
        return (self.a**2 + self.b**2) / 2

    @property
    def potential_on_J(self) -> float:
        return -0.5 * math.log((self.b - self.a) * (self.b + self.a) / 4)

    def potential_inner(self, x):
        """Potential on the gap [-a, a]."""
        x = np.asarray(x, dtype=float)
        a2, b2 = self.a**2, self.b**2
        return -0.5 * np.log((a2 + b2) / 2 - x * x + np.sqrt((b2 - x * x) * (a2 - x * x))) + 0.5 * math.log(2.0)


def two_interval_measure(a: float, b: float) -> TwoIntervalMeasure:
    if not (0 < a < b):
        raise EquilibriumDomainError(f"need 0 < a < b, got a={a}, b={b}")
    return TwoIntervalMeasure(float(a), float(b))


def ms_functional(T: float, a: float, b: float) -> float:
    """Mhaskar-Saff functional of J(a, b), scaled by (1 - 2c) (independent of c)."""
    if not (0 < a < b):
        raise EquilibriumDomainError(f"need 0 < a < b, got a={a}, b={b}")
    k = a / b
    K, E, D = elliptic.complete_triple(k)
    # K - E = k^2 D
    return -0.5 * math.log((b - a) * (b + a) / 4) + T / 8 * (a * a + b * b) - 2 * b * k * k * D


# ------------------------------------------------------ Euler-Lagrange check


@dataclass(frozen=True)
class ELReport:
    T: float
    branch: str
    F_Q: float
    max_dev_on_support: float
    min_slack_saturated: float
    min_slack_exterior: float
    n_support: int
    n_saturated: int
    n_exterior: int
    F_Q_closed_form: Optional[float] = None

    def passes(self, tol: float) -> bool:
        return (
            self.max_dev_on_support <= tol
            and self.min_slack_saturated >= -tol
            and self.min_slack_exterior >= -tol
        )


def _cheb_points(a, b, n):
    j = np.arange(n)
    return (a + b) / 2 - (b - a) / 2 * np.cos((2 * j + 1) * math.pi / (2 * n))


def certification_grid(measure: EquilibriumMeasure, n_points: int = 2000, reach: float = 3.0):
    """Chebyshev points on each arc and on the plateau, uniform exterior points."""
    beta = measure.support_edge
    n_ext = n_points // 4
    n_sat = n_points // 4 if measure.plateau > 0 else 0
    n_arc = n_points - n_ext - n_sat
    per_arc = n_arc // len(measure.arcs)
    support = np.concatenate([_cheb_points(a, b, per_arc) for a, b in measure.arcs])
    sat = _cheb_points(-measure.plateau, measure.plateau, n_sat) if n_sat else np.empty(0)
    half = n_ext // 2
    right = np.linspace(beta, reach * beta, half + 1)[1:]
    exterior = np.concatenate([-right[::-1], right])
    return support, sat, exterior


def el_certify(measure: EquilibriumMeasure, grid=None, n_points: int = 2000) -> ELReport:
    """Evaluate U + Q on free arcs, plateau and exterior; report deviations."""
    if grid is None:
        grid = certification_grid(measure, n_points)
    support, sat, exterior = grid
    w = lambda xs: potential_grid(measure, xs) + measure.external(xs)  # noqa: E731
    on_support = w(support)
    F_Q = float(np.mean(on_support))
    dev = float(np.max(np.abs(on_support - F_Q)))
    slack_sat = float(np.min(F_Q - w(sat))) if sat.size else math.inf
    slack_ext = float(np.min(w(exterior) - F_Q)) if exterior.size else math.inf
    p = measure.params
    closed = potential_at_edge(p) if p.supercritical else (1 + math.log(p.T)) / 2
    return ELReport(
        T=p.T,
        branch=p.branch,
        F_Q=F_Q,
        max_dev_on_support=dev,
        min_slack_saturated=slack_sat,
        min_slack_exterior=slack_ext,
        n_support=int(support.size),
        n_saturated=int(sat.size),
        n_exterior=int(exterior.size),
        F_Q_closed_form=closed,
    )


def second_moment_closed_form(p: TransitionParams) -> float:
    """int x^2 dmu from the large-z expansion of the Stieltjes transform."""
    if not p.supercritical:
        return 1.0 / p.T
    k, K, beta = p.k, p.K, p.beta
    return 4.0 / p.T * (K * beta * (1 + k * k) / 6 + (K * beta) ** 2 * (1 - k * k) ** 2 / 12)
