"""Grid minimiser of the capped log-gas energy, used as an independent check.

The box [-L, L] is cut into n cells of width h. A density vector d with
0 <= d_i <= 1 and h * sum(d) = 1 has energy

    E(d) = h^2 d^T K d + h p^T d

where K_ij is the exact mean of -log|x - y| over cell i times cell j and
p = 2 Q_T at the midpoints. On the diagonal that mean is -log h + 3/2; off
it, -log|x_i - x_j| plus a correction of order (h / |x_i - x_j|)^2. K is
Toeplitz, so products go through the FFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import matmul_toeplitz

from .equilibrium import EquilibriumMeasure, equilibrium_measure


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    tau_sat: float = 5e-2
    tau_supp: float = 1e-3
    max_iters: int = 20000
    tol: float = 1e-6
    power_iters: int = 60


DEFAULT_CONFIG = OracleConfig()


@dataclass(frozen=True)
class GridProblem:
    T: float
    L: float
    n: int
    h: float
    x: np.ndarray = field(repr=False)
    column: np.ndarray = field(repr=False)
    potential: np.ndarray = field(repr=False)

    @property
    def kernel(self) -> np.ndarray:
        """Dense n x n kernel; only built on request."""
        i = np.arange(self.n)
        return self.column[np.abs(i[:, None] - i[None, :])]

    def matvec(self, d):
        return matmul_toeplitz(self.column, d)

    def gradient(self, d):
        # functional gradient 2 h K d + p; the h-weighted derivative of E
        return 2.0 * self.h * self.matvec(d) + self.potential

    def energy(self, d) -> float:
        h = self.h
        return float(h * h * d @ self.matvec(d) + h * self.potential @ d)

    def uniform(self) -> np.ndarray:
        return np.full(self.n, 1.0 / (2.0 * self.L))


# offsets below this use the closed form, the rest the series
NEAR = 8


def kernel_column(n: int, h: float) -> np.ndarray:
    """First column of K: mean of -log|x - y| over two cells j apart.

    With G(s) = s^2 log|s| / 2 - 3 s^2 / 4 the mean is
    -(G((j+1)h) - 2 G(jh) + G((j-1)h)) / h^2. Near the diagonal this is
    evaluated through log1p, further out through its series in 1/j.
    """
    j = np.arange(n, dtype=float)
    col = np.empty(n)
    col[0] = -math.log(h) + 1.5
    near = j[1:NEAR]
    lo = np.where(near > 1, (near - 1) ** 2 * np.log1p(-1.0 / np.maximum(near, 2)), 0.0)
    col[1:NEAR] = -np.log(h * near) + 1.5 - 0.5 * ((near + 1) ** 2 * np.log1p(1.0 / near) + lo)
    far = j[NEAR:]
    u2 = 1.0 / (far * far)
    # sum over p >= 2 of u^(2p-2) / (p (2p-1) (2p-2))
    series = np.zeros_like(far)
    for q in range(8, 1, -1):
        series = u2 * (1.0 / (q * (2 * q - 1) * (2 * q - 2)) + series)
    col[NEAR:] = -np.log(h * far) + series
    return col


def discretize(T: float, n: int, L: float) -> GridProblem:
    if not (T > 0 and math.isfinite(T)):
        raise OracleError(f"T must be positive, got {T}")
    if int(n) != n or n < 64:
        raise OracleError(f"grid size must be an integer >= 64, got {n}")
    if not (L > 0 and math.isfinite(L)):
        raise OracleError(f"box half-width must be positive, got {L}")
    n = int(n)
    h = 2.0 * L / n
    x = -L + h * (np.arange(n) + 0.5)
    col = kernel_column(n, h)
    pot = 2.0 * (T / 4.0) * x * x
    return GridProblem(float(T), float(L), n, h, x, col, pot)


def project_capped(y, h: float, cap: float = 1.0):
    """Euclidean projection of y onto {0 <= d <= cap, h sum(d) = 1}.

    The result is clip(y - t, 0, cap) for the threshold t at which the mass
    is exactly 1; the mass is piecewise linear in t with breakpoints y and
    y - cap, so t is found by bisection over the sorted breakpoints.
    """
    y = np.asarray(y, dtype=float)
    target = 1.0 / h
    if cap * y.size < target:
        raise OracleError("cap cannot hold unit mass on this grid")
    bp = np.sort(np.concatenate([y - cap, y]))

    def mass(t):
        return np.clip(y - t, 0.0, cap).sum()

    lo, hi = 0, bp.size - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mass(bp[mid]) >= target:
            lo = mid
        else:
            hi = mid
    a, b = bp[lo], bp[hi]
    sa, sb = mass(a), mass(b)
    t = a if sa == sb else a + (sa - target) * (b - a) / (sa - sb)
    return np.clip(y - t, 0.0, cap)


@dataclass(frozen=True)
class GridMeasure:
    problem: GridProblem = field(repr=False)
    d: np.ndarray = field(repr=False)
    energy: float
    iterations: int
    residual: float
    converged: bool
    history: tuple = field(default=(), repr=False)

    @property
    def mass(self) -> float:
        return float(self.problem.h * self.d.sum())

    @property
    def x(self):
        return self.problem.x


def _lipschitz(p: GridProblem, iters: int) -> float:
    # largest eigenvalue of 2 h K; K is positive on zero-mass vectors and
    # its top eigenvector is close to constant, so plain power iteration
    v = np.ones(p.n) / math.sqrt(p.n)
    lam = 0.0
    for _ in range(iters):
        w = 2.0 * p.h * p.matvec(v)
        lam = float(np.linalg.norm(w))
        v = w / lam
    return lam


def solve_grid(
    p: GridProblem,
    max_iters: Optional[int] = None,
    tol: Optional[float] = None,
    config: OracleConfig = DEFAULT_CONFIG,
    d0=None,
) -> GridMeasure:
    """Projected gradient with Nesterov momentum and monotone restarts.

    Stops once the projected-gradient residual max|d - P(d - s g)| / s is
    at most tol. A candidate that raises the energy is discarded and the
    momentum reset, so the accepted energies never increase.
    """
    max_iters = config.max_iters if max_iters is None else int(max_iters)
    tol = config.tol if tol is None else float(tol)
    if 2.0 * p.L < 1.0:
        raise OracleError(f"box [-{p.L}, {p.L}] is too short to carry unit mass under the cap")
    if tol <= 0:
        raise OracleError("tol must be positive")

    step = 1.0 / (1.05 * _lipschitz(p, config.power_iters))
    d = project_capped(p.uniform() if d0 is None else d0, p.h)
    e = p.energy(d)
    history = [e]
    z, tk = d, 1.0
    residual = math.inf
    it = 0
    for it in range(1, max_iters + 1):
        g = p.gradient(z)
        while True:
            dn = project_capped(z - step * g, p.h)
            diff = dn - z
            en = p.energy(dn)
            ez = p.energy(z)
            bound = ez + p.h * (g @ diff) + p.h * (diff @ diff) / (2.0 * step)
            if en <= bound + 1e-13 * max(1.0, abs(ez)):
                break
            step *= 0.5
        if z is d:
            residual = float(np.abs(diff).max() / step)
        if en > e:
            # momentum overshot; restart from the last accepted point
            z, tk = d, 1.0
            continue
        tn = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * tk * tk))
        z = dn + ((tk - 1.0) / tn) * (dn - d)
        tk = tn
        d, e = dn, en
        history.append(e)
        if residual <= tol:
            break
        # residual at the accepted point, measured every few steps
        if it % 25 == 0:
            dd = project_capped(d - step * p.gradient(d), p.h)
            residual = float(np.abs(dd - d).max() / step)
            if residual <= tol:
                break
    return GridMeasure(p, d, e, it, residual, residual <= tol, tuple(history))


@dataclass(frozen=True)
class ComparisonReport:
    T: float
    n: int
    L: float
    sup: float
    l1: float
    alpha_hat: float
    beta_hat: float
    alpha: float
    beta: float
    energy: float
    M: Optional[float] = None
    converged: bool = True

    @property
    def alpha_error(self) -> float:
        return abs(self.alpha_hat - self.alpha)

    @property
    def beta_error(self) -> float:
        return abs(self.beta_hat - self.beta)

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "n": self.n,
            "L": self.L,
            "sup": self.sup,
            "l1": self.l1,
            "alpha_hat": self.alpha_hat,
            "beta_hat": self.beta_hat,
            "alpha": self.alpha,
            "beta": self.beta,
            "energy": self.energy,
            "M": self.M,
            "converged": self.converged,
        }


def edges(x, d, h: float, config: OracleConfig = DEFAULT_CONFIG):
    """(alpha_hat, beta_hat) from thresholded densities.

    alpha_hat is the outer cell edge of the run of saturated cells
    (d >= 1 - tau_sat) containing the centre, 0 if the centre is not
    saturated; beta_hat is the outer edge of the outermost cell with
    d >= tau_supp, symmetrised over both sides.
    """
    x = np.asarray(x)
    d = np.asarray(d)
    n = d.size
    sat = d >= 1.0 - config.tau_sat
    c = n // 2
    alpha_hat = 0.0
    if sat[c - 1] and sat[c]:
        r = c
        while r + 1 < n and sat[r + 1]:
            r += 1
        l = c - 1
        while l - 1 >= 0 and sat[l - 1]:
            l -= 1
        alpha_hat = 0.5 * ((x[r] + h / 2) - (x[l] - h / 2))
    supp = np.flatnonzero(d >= config.tau_supp)
    beta_hat = 0.0
    if supp.size:
        beta_hat = 0.5 * ((x[supp[-1]] + h / 2) - (x[supp[0]] - h / 2))
    return float(alpha_hat), float(beta_hat)


def compare(
    g: GridMeasure,
    analytic: Optional[EquilibriumMeasure] = None,
    config: OracleConfig = DEFAULT_CONFIG,
    M: Optional[float] = None,
) -> ComparisonReport:
    p = g.problem
    if analytic is None:
        analytic = equilibrium_measure(p.T)
    ref = analytic.density(p.x)
    err = np.abs(g.d - ref)
    a_hat, b_hat = edges(p.x, g.d, p.h, config)
    params = analytic.params
    return ComparisonReport(
        T=p.T,
        n=p.n,
        L=p.L,
        sup=float(err.max()),
        l1=float(p.h * err.sum()),
        alpha_hat=a_hat,
        beta_hat=b_hat,
        alpha=float(params.alpha),
        beta=float(params.beta),
        energy=g.energy,
        M=M,
        converged=g.converged,
    )


def run(T: float, n: int = 2048, L: float = 1.2, tol: Optional[float] = None,
        max_iters: Optional[int] = None, config: OracleConfig = DEFAULT_CONFIG) -> ComparisonReport:
    from .transition import energy

    g = solve_grid(discretize(T, n, L), max_iters=max_iters, tol=tol, config=config)
    return compare(g, equilibrium_measure(T), config, M=energy(T).M)
