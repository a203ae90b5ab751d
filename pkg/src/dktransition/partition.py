"""Finite-N partition function as a sum over highest weights.

    Z_{N,T} = sum_{l_1 > ... > l_N} exp(-(T/2) c_2(l)) V(l)^2 / V(1..N)^2

with c_2(l) = (1/N) sum (l_i - (N-1)/2)^2 - (N^2 - 1)/12. Each l_i is
truncated to the box [(N-1)/2 - window, (N-1)/2 + window].

Two routes evaluate the truncated sum. ``enumerate`` walks every strictly
decreasing vector in the box and accumulates a streaming log-sum-exp.
``determinant`` uses the Heine identity

    sum_{l decreasing} V(l)^2 prod w(x_i) = det[sum_x x^(i+j) w(x)]_{i,j<N}

for the discrete Gaussian weight w(x) = exp(-T x^2 / (2N)) at the centred
points x = l - (N-1)/2. The Hankel determinant is the product of squared
norms of the monic orthogonal polynomials, taken from a Lanczos run on
the weight, so it costs O(N * box) instead of C(box, N).
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

# largest boundary-touching contribution allowed, relative to the total
TAIL_BOUND = 1e-15
CHUNK = 1 << 15


class PartitionError(ValueError):
    pass


class WindowError(PartitionError):
    """Truncation box too small for the declared tail bound."""


@dataclass(frozen=True)
class HighestWeight:
    ell: tuple

    def __post_init__(self):
        ell = tuple(int(v) for v in self.ell)
        if len(ell) == 0:
            raise PartitionError("highest weight needs at least one entry")
        if any(a <= b for a, b in zip(ell, ell[1:])):
            raise PartitionError(f"highest weight must be strictly decreasing, got {ell}")
        object.__setattr__(self, "ell", ell)

    @property
    def N(self) -> int:
        return len(self.ell)

    def reflect(self) -> "HighestWeight":
        n = self.N
        return HighestWeight(tuple((n - 1) - v for v in reversed(self.ell)))


def _as_weight(ell) -> HighestWeight:
    return ell if isinstance(ell, HighestWeight) else HighestWeight(tuple(ell))


def casimir_c2(ell, N: Optional[int] = None) -> float:
    hw = _as_weight(ell)
    if N is not None and N != hw.N:
        raise PartitionError(f"weight has length {hw.N}, expected {N}")
    n = hw.N
    c = (n - 1) / 2.0
    x = np.asarray(hw.ell, dtype=float) - c
    return float(x @ x / n - (n * n - 1) / 12.0)


def log_vandermonde(ell) -> float:
    v = np.asarray(ell, dtype=float)
    i, j = np.triu_indices(v.size, 1)
    return float(np.log(v[i] - v[j]).sum())


def _log_v_staircase(N: int) -> float:
    # log V(1..N) = sum_{k<N} log k!
    return float(sum(math.lgamma(k + 1) for k in range(1, N)))


def log_vandermonde_ratio(ell) -> float:
    """log(V(l)^2 / V(1..N)^2)."""
    hw = _as_weight(ell)
    return 2.0 * (log_vandermonde(hw.ell) - _log_v_staircase(hw.N))


def log_term(ell, T: float) -> float:
    hw = _as_weight(ell)
    return -(T / 2.0) * casimir_c2(hw) + log_vandermonde_ratio(hw)


@dataclass(frozen=True)
class PartitionResult:
    N: int
    T: float
    window: int
    logZ: float
    normalized: float
    terms_enumerated: int
    method: str = "enumerate"
    log_tail: float = -math.inf

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "T": self.T,
            "window": self.window,
            "logZ": self.logZ,
            "normalized": self.normalized,
            "terms_enumerated": self.terms_enumerated,
            "method": self.method,
            "log_tail": self.log_tail,
        }


def box(N: int, window: int) -> np.ndarray:
    """Admissible integer values for each l_i, in decreasing order."""
    c = (N - 1) / 2.0
    lo, hi = math.ceil(c - window), math.floor(c + window)
    return np.arange(hi, lo - 1, -1)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DK_THREADS", "1")))
    except ValueError:
        return 1


def _check(N, T, window):
    if int(N) != N or N < 1:
        raise PartitionError(f"N must be a positive integer, got {N}")
    if not (T > 0 and math.isfinite(T)):
        raise PartitionError(f"T must be positive, got {T}")
    if int(window) != window or window < 1:
        raise PartitionError(f"window must be a positive integer, got {window}")
    if box(int(N), int(window)).size < N:
        raise WindowError(f"window {window} holds fewer than N = {N} values")
    return int(N), float(T), int(window)


# --- enumeration ---------------------------------------------------------


class _LSE:
    """Streaming log-sum-exp with a running maximum."""

    def __init__(self):
        self.m = -math.inf
        self.s = 0.0

    def add(self, v, weights=None):
        if v.size == 0:
            return
        mx = float(v.max())
        if mx > self.m:
            self.s *= math.exp(self.m - mx) if self.s else 0.0
            self.m = mx
        e = np.exp(v - self.m)
        self.s += float(e.sum() if weights is None else e @ weights)

    def merge(self, other: "_LSE"):
        if other.m == -math.inf:
            return
        if other.m > self.m:
            self.s = self.s * math.exp(self.m - other.m) + other.s
            self.m = other.m
        else:
            self.s += other.s * math.exp(other.m - self.m)

    @property
    def value(self) -> float:
        return self.m + math.log(self.s) if self.s > 0 else -math.inf


def _terms(rows: np.ndarray, N: int, T: float, const: float) -> np.ndarray:
    x = rows - (N - 1) / 2.0
    out = -(T / (2.0 * N)) * np.einsum("ij,ij->i", x, x) + const
    for i in range(N):
        for j in range(i + 1, N):
            out += 2.0 * np.log(rows[:, i] - rows[:, j])
    return out


def _reflect_sign(rows: np.ndarray, N: int) -> np.ndarray:
    # sign of the first nonzero entry of rows - reflected(rows)
    refl = (N - 1) - rows[:, ::-1]
    diff = rows - refl
    nz = diff != 0
    first = np.argmax(nz, axis=1)
    s = np.sign(diff[np.arange(rows.shape[0]), first])
    s[~nz.any(axis=1)] = 0
    return s


def _enumerate_top(top, values, N, T, const, lo, hi, symmetric):
    """Sum over vectors with l_1 = top; returns (lse, boundary max, count)."""
    acc = _LSE()
    bmax = -math.inf
    count = 0
    rest = values[values < top]
    if N == 1:
        chunks = iter([np.full((1, 1), top)])
    else:
        chunks = _chunks(top, rest, N)
    for rows in chunks:
        v = _terms(rows, N, T, const)
        w = None
        if symmetric:
            s = _reflect_sign(rows, N)
            keep = s >= 0
            rows, v, w = rows[keep], v[keep], np.where(s[keep] > 0, 2.0, 1.0)
        acc.add(v, w)
        edge = (rows[:, 0] == hi) | (rows[:, -1] == lo)
        if edge.any():
            bmax = max(bmax, float(v[edge].max()))
        count += rows.shape[0]
    return acc, bmax, count


def _chunks(top, rest, N):
    it = itertools.combinations(rest.tolist(), N - 1)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(it, CHUNK)),
            dtype=float,
        )
        if flat.size == 0:
            return
        rows = np.empty((flat.size // (N - 1), N))
        rows[:, 0] = top
        rows[:, 1:] = flat.reshape(-1, N - 1)
        yield rows


def _logZ_enumerate(N, T, window, symmetric=False):
    values = box(N, window)
    lo, hi = float(values[-1]), float(values[0])
    const = (T / 2.0) * (N * N - 1) / 12.0 - 2.0 * _log_v_staircase(N)
    tops = [float(t) for t in values[: values.size - N + 1]]
    if symmetric:
        # reflection maps l_1 = t to l_N = (N-1) - t; every orbit has a
        # representative with l_1 + l_N >= N - 1, i.e. l_1 >= (N-1)/2
        tops = [t for t in tops if t >= (N - 1) / 2.0]
    work = lambda t: _enumerate_top(t, values.astype(float), N, T, const, lo, hi, symmetric)  # noqa: E731
    threads = _threads()
    if threads > 1 and len(tops) > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(work, tops))
    else:
        parts = [work(t) for t in tops]
    total = _LSE()
    bmax, count = -math.inf, 0
    for acc, b, c in parts:
        total.merge(acc)
        bmax = max(bmax, b)
        count += c
    return total.value, bmax, total.m, count


# --- Hankel determinant ----------------------------------------------------


def log_hankel_det(x: np.ndarray, logw: np.ndarray, n: int) -> float:
    """log det[sum_k x_k^(i+j) w_k]_{i,j<n} for a discrete positive weight.

    Lanczos on diag(x) with starting vector sqrt(w) gives the recurrence
    coefficients b_i of the orthonormal polynomials; the monic norms are
    h_i = h_0 b_1^2 ... b_i^2, and the determinant is their product.
    Full reorthogonalisation keeps the basis orthogonal in double precision.
    """
    if n == 0:
        return 0.0
    if x.size < n:
        raise WindowError("fewer support points than the determinant order")
    shift = float(logw.max())
    w = np.exp(logw - shift)
    h0 = float(w.sum())
    Q = np.empty((n, x.size))
    Q[0] = np.sqrt(w / h0)
    out = n * (math.log(h0) + shift)
    b_prev = 0.0
    for i in range(1, n):
        v = x * Q[i - 1]
        a = Q[i - 1] @ v
        v -= a * Q[i - 1]
        if i > 1:
            v -= b_prev * Q[i - 2]
        for _ in range(2):
            v -= Q[:i].T @ (Q[:i] @ v)
        b = float(np.linalg.norm(v))
        if b == 0.0:
            return -math.inf
        Q[i] = v / b
        out += 2.0 * (n - i) * math.log(b)
        b_prev = b
    return out


def _logZ_determinant(N, T, window):
    values = box(N, window).astype(float)
    c = (N - 1) / 2.0
    x = values - c
    logw = -(T / (2.0 * N)) * x * x
    const = (T / 2.0) * (N * N - 1) / 12.0 - 2.0 * _log_v_staircase(N)
    logZ = const + log_hankel_det(x, logw, N)
    # every vector touching the top of the box: fix l_1 = top and sum the
    # rest with the extra factor (top - x)^2; the bottom shell is its mirror
    t = x[0]
    rest = x[1:]
    if rest.size >= N - 1:
        shell = logw[0] + log_hankel_det(rest, logw[1:] + 2.0 * np.log(t - rest), N - 1)
        log_tail = float(const + shell + math.log(2.0))
    else:
        log_tail = logZ
    return logZ, log_tail


def partition_logZ(
    N: int,
    T: float,
    window: int,
    method: str = "auto",
    symmetric: bool = False,
    tail_bound: float = TAIL_BOUND,
) -> PartitionResult:
    """log Z_{N,T} truncated to the window box.

    Raises WindowError when the boundary shell is not negligible: for
    enumeration the largest boundary-touching term, for the determinant the
    total boundary-shell mass, must be below tail_bound relative to the
    largest term (respectively the total).
    """
    N, T, window = _check(N, T, window)
    n_terms = math.comb(box(N, window).size, N)
    if method == "auto":
        method = "enumerate" if n_terms <= 2_000_000 else "determinant"
    if method == "enumerate":
        logZ, bmax, tmax, count = _logZ_enumerate(N, T, window, symmetric)
        log_tail = bmax
        if bmax - tmax >= math.log(tail_bound):
            raise WindowError(
                f"boundary term {math.exp(bmax - tmax):.3e} of the largest term exceeds {tail_bound}"
            )
    elif method == "determinant":
        logZ, log_tail = _logZ_determinant(N, T, window)
        count = n_terms
        if log_tail - logZ >= math.log(tail_bound):
            raise WindowError(
                f"boundary shell {math.exp(log_tail - logZ):.3e} of the total exceeds {tail_bound}"
            )
    else:
        raise PartitionError(f"unknown method {method!r}")
    return PartitionResult(N, T, window, logZ, logZ / (N * N), count, method, log_tail)


def initial_window(N: int, T: float) -> int:
    """Box half-width where the Gaussian factor has decayed by ~e^-40."""
    return max(4, math.ceil(math.sqrt(80.0 * N / T)) + N)


def auto_partition(N: int, T: float, method: str = "auto", stable: float = 1e-12,
                   max_window: int = 4096) -> PartitionResult:
    """Double the window until logZ moves by less than `stable`."""
    w = initial_window(N, T)
    prev = None
    while w <= max_window:
        try:
            res = partition_logZ(N, T, w, method=method)
        except WindowError:
            w *= 2
            continue
        if prev is not None and abs(res.logZ - prev.logZ) < stable:
            return prev
        prev = res
        w *= 2
    raise WindowError(f"window did not stabilise below {max_window}")


def finite_free_energy(N: int, T: float, method: str = "auto") -> float:
    return auto_partition(N, T, method=method).normalized
