"""Critical parameters (k, alpha, beta) as functions of T and the free energy.

Below T = pi^2 the minimiser is the semicircle of variance 1/T. Above it,
the modulus k solves T = 8EK - 4(1 - k^2)K^2 and fixes the saturated
plateau [-alpha, alpha] and the support edge beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import elliptic

PI2 = math.pi**2

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "supercritical"

# bracket for the modulus root; T(K_HI) is roughly 119
K_LO = 1e-10
K_HI = elliptic.K_MAX
# above this modulus the root is sought in m = 1 - k^2 instead of k
K_SWITCH = 0.9
_RTOL = 4 * float(np.finfo(float).eps)


class TransitionDomainError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionParams:
    T: float
    branch: str
    alpha: float
    beta: float
    k: Optional[float] = None
    m: Optional[float] = None
    K: Optional[float] = None
    E: Optional[float] = None
    # (K - E) / k^2, kept for cancellation-free differences near k = 0
    D: Optional[float] = field(default=None, repr=False)

    @property
    def supercritical(self) -> bool:
        return self.branch == SUPERCRITICAL

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "branch": self.branch,
            "k": self.k,
            "m": self.m,
            "alpha": self.alpha,
            "beta": self.beta,
            "K": self.K,
            "E": self.E,
        }


@dataclass(frozen=True)
class FreeEnergyReport:
    T: float
    branch: str
    M: float
    F: float
    M1: float
    M2: float
    M3: Optional[float]
    F3: Optional[float]

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "branch": self.branch,
            "M": self.M,
            "F": self.F,
            "M1": self.M1,
            "M2": self.M2,
            "M3": self.M3,
            "F3": self.F3,
        }


def _check_T(T):
    if not (isinstance(T, (int, float)) and math.isfinite(T) and T > 0):
        raise TransitionDomainError(f"T must be a positive finite real, got {T!r}")
    return float(T)


def _T_from(K, D, k2, m):
    # 8EK - 4mK^2 = 4K(2E - mK) with 2E - mK = 2k^2(K - D) + mK
    return 4.0 * K * (2.0 * k2 * (K - D) + m * K)


def T_of_k(k: float) -> float:
    """Forward map k -> T = 8EK - 4(1 - k^2)K^2."""
    K, E, D = elliptic.complete_triple(k)
    return _T_from(K, D, k * k, (1.0 - k) * (1.0 + k))


def T_of_m(m: float) -> float:
    """Same map in terms of m = 1 - k^2, better conditioned for k near 1."""
    K, E, D = elliptic.complete_triple_m(m)
    return _T_from(K, D, 1.0 - m, m)


T_SWITCH = T_of_k(K_SWITCH)


def _params(k, m, K, E, D, T=None) -> TransitionParams:
    beta = 1.0 / (2.0 * k * k * (K - D) + m * K)
    if T is None:
        T = 4.0 * K / beta
    return TransitionParams(
        T=float(T),
        branch=SUPERCRITICAL,
        alpha=k * beta,
        beta=beta,
        k=k,
        m=m,
        K=K,
        E=E,
        D=D,
    )


def params_from_k(k: float, T: Optional[float] = None) -> TransitionParams:
    K, E, D = (float(v) for v in elliptic.complete_triple(k))
    k = float(k)
    return _params(k, (1.0 - k) * (1.0 + k), K, E, D, T)


def params_from_m(m: float, T: Optional[float] = None) -> TransitionParams:
    K, E, D = (float(v) for v in elliptic.complete_triple_m(m))
    m = float(m)
    return _params(math.sqrt(1.0 - m), m, K, E, D, T)


def _solve(T: float):
    """Root of the forward map; k below K_SWITCH, m above it."""
    if T_of_k(K_LO) - T >= 0.0:
        # T within rounding of pi^2
        return "k", K_LO
    if T <= T_SWITCH:
        return "k", brentq(lambda k: T_of_k(k) - T, K_LO, K_SWITCH, xtol=1e-300, rtol=_RTOL, maxiter=400)
    m_lo = (1.0 - K_HI) * (1.0 + K_HI)
    m_hi = (1.0 - K_SWITCH) * (1.0 + K_SWITCH)
    if T_of_m(m_lo) - T < 0.0:
        raise TransitionDomainError(f"T = {T} exceeds the solvable range (k > {K_HI})")
    return "m", brentq(lambda m: T_of_m(m) - T, m_lo, m_hi, xtol=1e-300, rtol=_RTOL, maxiter=400)


def solve_k(T: float) -> float:
    T = _check_T(T)
    if T <= PI2:
        raise TransitionDomainError(f"no modulus for subcritical T = {T}")
    var, root = _solve(T)
    return root if var == "k" else math.sqrt(1.0 - root)


def solve_params(T: float) -> TransitionParams:
    T = _check_T(T)
    if T <= PI2:
        return TransitionParams(T=T, branch=SUBCRITICAL, alpha=0.0, beta=2.0 / math.sqrt(T))
    var, root = _solve(T)
    return params_from_k(root, T=T) if var == "k" else params_from_m(root, T=T)


def _M_super(p: TransitionParams) -> float:
    k, m, K, beta = p.k, p.m, p.K, p.beta
    Kb = K * beta
    return (
        1.5
        - 0.5 * math.log(beta * beta * m / 4.0)
        - (2.0 / 3.0) * Kb * (1.0 + k * k)
        - Kb * Kb * m * m / 12.0
    )


def _derivs_super(p: TransitionParams):
    m, K, D, beta = p.m, p.K, p.D, p.beta
    Kb = K * beta
    M1 = beta**2 / 24.0 * (m * m * Kb - 2.0 * m + 4.0)
    M2 = -(m * m) * beta**4 / 32.0
    # -2(m-1)/((1-mKb)(1+mKb)) rewritten with 1 - mKb = 2 k^2 (K - D) beta
    M3 = m * m * beta**6 / 32.0 * (m / (1.0 + m * Kb) + 1.0 / ((K - D) * beta * (1.0 + m * Kb)))
    return M1, M2, M3


def M_value(p: TransitionParams) -> float:
    if p.supercritical:
        return _M_super(p)
    return 0.5 * math.log(p.T) + 0.75


def derivatives(T: float):
    """(M', M'', M''') at T; undefined exactly at T = pi^2."""
    T = _check_T(T)
    if T == PI2:
        raise TransitionDomainError("M''' has different lateral limits at T = pi^2; use jump_report")
    if T < PI2:
        return 1.0 / (2 * T), -1.0 / (2 * T * T), 1.0 / T**3
    return _derivs_super(solve_params(T))


def energy(T: float) -> FreeEnergyReport:
    T = _check_T(T)
    p = solve_params(T)
    M = M_value(p)
    if T == PI2:
        M1, M2 = 1.0 / (2 * T), -1.0 / (2 * T * T)
        M3 = None
    else:
        M1, M2, M3 = derivatives(T)
    return FreeEnergyReport(
        T=T,
        branch=p.branch,
        M=M,
        F=T / 24.0 + 1.5 - M,
        M1=M1,
        M2=M2,
        M3=M3,
        F3=None if M3 is None else -M3,
    )


def free_energy(T: float) -> float:
    return energy(T).F


@dataclass(frozen=True)
class LateralLimit:
    """Limit of a function of T at pi^2 from one side."""

    side: str
    value: float
    offsets: tuple
    samples: tuple
    extrapolants: tuple
    converged: bool


def lateral_limit(fn, side: str, j_range=range(2, 7), ratio: float = 10.0, tol: float = 1e-8) -> LateralLimit:
    """Richardson-extrapolated limit of fn(T) as T -> pi^2 from `side`.

    Offsets are 10^-j; fn is assumed smooth in the offset so one level of
    first-order extrapolation removes the leading term.
    """
    sign = 1.0 if side == "right" else -1.0
    offsets = tuple(ratio ** (-j) for j in j_range)
    samples = tuple(fn(PI2 + sign * d) for d in offsets)
    extr = tuple((ratio * b - a) / (ratio - 1.0) for a, b in zip(samples, samples[1:]))
    converged = len(extr) >= 2 and abs(extr[-1] - extr[-2]) < tol
    return LateralLimit(side, extr[-1], offsets, samples, extr, converged)


@dataclass(frozen=True)
class JumpReport:
    F3_left: float
    F3_right: float
    left: LateralLimit
    right: LateralLimit

    @property
    def jump(self) -> float:
        return self.F3_right - self.F3_left

    @property
    def converged(self) -> bool:
        return self.left.converged and self.right.converged

    def __iter__(self):
        return iter((self.F3_left, self.F3_right))


def jump_report(tol: float = 1e-8) -> JumpReport:
    """Lateral limits of F''' at pi^2."""
    f3 = lambda T: -derivatives(T)[2]  # noqa: E731
    left = lateral_limit(f3, "left", tol=tol)
    right = lateral_limit(f3, "right", tol=tol)
    return JumpReport(left.value, right.value, left, right)


def matching_report(tol: float = 1e-8) -> dict:
    """Lateral limits of M, M', M'' at pi^2 from both closed forms."""
    out = {}
    getters = {
        "M": lambda T: energy(T).M,
        "M1": lambda T: derivatives(T)[0],
        "M2": lambda T: derivatives(T)[1],
    }
    for name, fn in getters.items():
        out[name] = (lateral_limit(fn, "left", tol=tol), lateral_limit(fn, "right", tol=tol))
    return out
