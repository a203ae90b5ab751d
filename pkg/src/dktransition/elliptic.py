"""Real elliptic integrals needed by the equilibrium formulas.

Production values come from Carlson's symmetric forms evaluated by the
duplication theorem; every public function accepts scalars or numpy arrays.
Conventions follow the sine-amplitude form

    F(z; k) = int_0^z ds / sqrt((1 - s^2)(1 - k^2 s^2))
    E(z; k) = int_0^z sqrt((1 - k^2 s^2) / (1 - s^2)) ds
    Pi(nu; k) = int_0^1 ds / ((1 - nu s^2) sqrt((1 - s^2)(1 - k^2 s^2)))

with K(k) = F(1; k) and E(k) = E(1; k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

K_MIN = 1e-12
K_MAX = 1.0 - 1e-12

_EPS = np.finfo(float).eps
_RF_SCALE = (3.0 * _EPS) ** (-1.0 / 8.0)
_RDJ_SCALE = (0.25 * _EPS) ** (-1.0 / 8.0)


class EllipticDomainError(ValueError):
    pass


def _asfloat(a):
    return np.asarray(a, dtype=float)


def _out(a):
    return a.item() if a.ndim == 0 else a


def elliprf(x, y, z):
    """Carlson R_F(x, y, z) for nonnegative arguments, at most one zero."""
    x, y, z = np.broadcast_arrays(_asfloat(x), _asfloat(y), _asfloat(z))
    x0, y0 = x, y
    x, y, z = x.copy(), y.copy(), z.copy()
    a0 = (x + y + z) / 3.0
    q = _RF_SCALE * np.maximum.reduce([np.abs(a0 - x), np.abs(a0 - y), np.abs(a0 - z)])
    a = a0.copy()
    f = np.ones_like(a)
    while np.any(q >= np.abs(a) * f):
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z, a = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4, (a + lam) / 4
        f = f * 4.0
    X = (a0 - x0) / (a * f)
    Y = (a0 - y0) / (a * f)
    Z = -(X + Y)
    e2 = X * Y - Z * Z
    e3 = X * Y * Z
    s = (
        1.0
        - e2 / 10
        + e3 / 14
        + e2 * e2 / 24
        - 3 * e2 * e3 / 44
        - 5 * e2**3 / 208
        + 3 * e3 * e3 / 104
        + e2 * e2 * e3 / 16
    )
    return _out(s / np.sqrt(a))


def elliprd(x, y, z):
    """Carlson R_D(x, y, z); x, y >= 0 (at most one zero), z > 0."""
    x, y, z = np.broadcast_arrays(_asfloat(x), _asfloat(y), _asfloat(z))
    x0, y0 = x, y
    x, y, z = x.copy(), y.copy(), z.copy()
    a0 = (x + y + 3 * z) / 5.0
    q = _RDJ_SCALE * np.maximum.reduce([np.abs(a0 - x), np.abs(a0 - y), np.abs(a0 - z)])
    a = a0.copy()
    f = np.ones_like(a)
    acc = np.zeros_like(a)
    while np.any(q >= np.abs(a) * f):
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        acc += 1.0 / (f * sz * (z + lam))
        x, y, z, a = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4, (a + lam) / 4
        f = f * 4.0
    X = (a0 - x0) / (a * f)
    Y = (a0 - y0) / (a * f)
    Z = -(X + Y) / 3
    xy = X * Y
    e2 = xy - 6 * Z * Z
    e3 = (3 * xy - 8 * Z * Z) * Z
    e4 = 3 * (xy - Z * Z) * Z * Z
    e5 = xy * Z**3
    s = (
        1.0
        - 3 * e2 / 14
        + e3 / 6
        + 9 * e2 * e2 / 88
        - 3 * e4 / 22
        - 9 * e2 * e3 / 52
        + 3 * e5 / 26
    )
    return _out(s / (f * a * np.sqrt(a)) + 3 * acc)


def _rc_one(e):
    # R_C(1, 1 + e) for e > -1
    out = np.ones_like(e)
    small = np.abs(e) < 1e-3
    es = e[small]
    out[small] = 1 - es / 3 + es**2 / 5 - es**3 / 7 + es**4 / 9 - es**5 / 11
    pos = (~small) & (e > 0)
    r = np.sqrt(e[pos])
    out[pos] = np.arctan(r) / r
    neg = (~small) & (e < 0)
    r = np.sqrt(-e[neg])
    out[neg] = np.arctanh(r) / r
    return out


def elliprj(x, y, z, p):
    """Carlson R_J(x, y, z, p); x, y, z >= 0 (at most one zero), p > 0."""
    x, y, z, p = np.broadcast_arrays(_asfloat(x), _asfloat(y), _asfloat(z), _asfloat(p))
    x0, y0, z0 = x, y, z
    x, y, z, p = x.copy(), y.copy(), z.copy(), p.copy()
    a0 = (x + y + z + 2 * p) / 5.0
    delta = (p - x) * (p - y) * (p - z)
    q = _RDJ_SCALE * np.maximum.reduce(
        [np.abs(a0 - x), np.abs(a0 - y), np.abs(a0 - z), np.abs(a0 - p)]
    )
    a = a0.copy()
    f = np.ones_like(a)
    acc = np.zeros_like(a)
    while np.any(q >= np.abs(a) * f):
        sx, sy, sz, sp = np.sqrt(x), np.sqrt(y), np.sqrt(z), np.sqrt(p)
        lam = sx * sy + sx * sz + sy * sz
        d = (sp + sx) * (sp + sy) * (sp + sz)
        e = delta / (f**3 * d * d)
        acc += _rc_one(e) / (f * d)
        x, y, z, p, a = (
            (x + lam) / 4,
            (y + lam) / 4,
            (z + lam) / 4,
            (p + lam) / 4,
            (a + lam) / 4,
        )
        f = f * 4.0
    X = (a0 - x0) / (a * f)
    Y = (a0 - y0) / (a * f)
    Z = (a0 - z0) / (a * f)
    P = -(X + Y + Z) / 2
    e2 = X * Y + X * Z + Y * Z - 3 * P * P
    e3 = X * Y * Z + 2 * e2 * P + 4 * P**3
    e4 = (2 * X * Y * Z + e2 * P + 3 * P**3) * P
    e5 = X * Y * Z * P * P
    s = (
        1.0
        - 3 * e2 / 14
        + e3 / 6
        + 9 * e2 * e2 / 88
        - 3 * e4 / 22
        - 9 * e2 * e3 / 52
        + 3 * e5 / 26
    )
    return _out(s / (f * a * np.sqrt(a)) + 6 * acc)


@dataclass(frozen=True)
class Modulus:
    k: float

    def __post_init__(self):
        check_modulus(self.k)

    @property
    def m(self) -> float:
        return 1.0 - self.k * self.k


@dataclass(frozen=True)
class EllipticPair:
    K: float
    E: float


def check_modulus(k):
    k = _asfloat(k)
    if np.any(~np.isfinite(k)) or np.any(k < K_MIN) or np.any(k > K_MAX):
        raise EllipticDomainError(f"modulus k must lie in [{K_MIN}, {K_MAX}], got {k}")
    return k


def _kval(k):
    return k.k if isinstance(k, Modulus) else k


def complete_triple(k):
    """Return (K, E, D) with D = (K - E) / k^2 = R_D(0, 1 - k^2, 1) / 3.

    D lets callers form K - E and E - (1 - k^2) K without cancellation
    when k is small.
    """
    k = check_modulus(_kval(k))
    m = (1.0 - k) * (1.0 + k)
    K = elliprf(0.0, m, 1.0)
    D = elliprd(0.0, m, 1.0) / 3.0
    E = K - k * k * D
    return K, E, D


def complete_triple_m(m):
    """(K, E, D) from the complementary parameter m = 1 - k^2.

    For k close to 1 the modulus itself cannot carry m to full relative
    precision, so callers that know m should pass it here.
    """
    m = _asfloat(m)
    m_min = (1.0 - K_MAX) * (1.0 + K_MAX)
    m_max = (1.0 - K_MIN) * (1.0 + K_MIN)
    if np.any(~np.isfinite(m)) or np.any(m < m_min) or np.any(m > m_max):
        raise EllipticDomainError(f"parameter m must lie in [{m_min}, {m_max}], got {m}")
    K = elliprf(0.0, m, 1.0)
    D = elliprd(0.0, m, 1.0) / 3.0
    E = K - (1.0 - m) * D
    return K, E, D


def complete_pair(k) -> EllipticPair:
    K, E, _ = complete_triple(k)
    return EllipticPair(float(K), float(E))


def ellipk(k):
    return complete_triple(k)[0]


def ellipe(k):
    return complete_triple(k)[1]


def incomplete_pair(z, k):
    """Incomplete integrals (F(z; k), E(z; k)) for 0 <= z <= 1."""
    k = check_modulus(_kval(k))
    z = _asfloat(z)
    if np.any(~np.isfinite(z)) or np.any(z < 0) or np.any(z > 1):
        raise EllipticDomainError(f"amplitude z must lie in [0, 1], got {z}")
    z, k = np.broadcast_arrays(z, k)
    c = (1.0 - z) * (1.0 + z)
    d = (1.0 - k * z) * (1.0 + k * z)
    F = np.zeros_like(z)
    Ez = np.zeros_like(z)
    nz = z > 0
    rf = elliprf(c[nz], d[nz], 1.0)
    rd = elliprd(c[nz], d[nz], 1.0)
    zn, kn = z[nz], k[nz]
    F[nz] = zn * rf
    Ez[nz] = zn * rf - (kn * kn * zn**3 / 3.0) * rd
    return _out(F), _out(Ez)


def pi3(nu, k):
    """Complete third-kind integral Pi(nu; k), circular case 0 < nu < 1."""
    k = check_modulus(_kval(k))
    nu = _asfloat(nu)
    if np.any(~np.isfinite(nu)) or np.any(nu <= 0) or np.any(nu >= 1):
        raise EllipticDomainError(f"characteristic nu must lie in (0, 1), got {nu}")
    return pi3_from_gap(nu, 1.0 - nu, k)


def pi3_from_gap(nu, gap, k):
    """Pi(nu; k) given gap = 1 - nu computed separately by the caller.

    Near nu = 1 the caller usually knows 1 - nu far more accurately than
    the subtraction would give it.
    """
    k = _asfloat(k)
    m = (1.0 - k) * (1.0 + k)
    K = elliprf(0.0, m, 1.0)
    return _out(_asfloat(K + _asfloat(nu) / 3.0 * elliprj(0.0, m, 1.0, gap)))


def m_derivatives(k):
    """(dE/dm, dK/dm) with m = 1 - k^2 as the independent variable."""
    K, E, D = complete_triple(k)
    k = _asfloat(_kval(k))
    m = (1.0 - k) * (1.0 + k)
    # m - 1 = -k^2, E - K = -k^2 D, E - mK = k^2 (K - D)
    dE = D / 2.0
    dK = -(K - D) / (2.0 * m)
    return _out(_asfloat(dE)), _out(_asfloat(dK))
