import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import oracles
from dktransition import elliptic as el

moduli = st.floats(min_value=1e-6, max_value=1 - 1e-6)


def k_grid(n=50):
    half = n // 2
    return np.concatenate([
        np.logspace(-6, math.log10(0.5), half),
        1 - np.logspace(math.log10(0.5), -6, n - half),
    ])


def test_complete_pair_reference_value():
    pair = el.complete_pair(0.5)
    assert abs(pair.K - 1.685750355) < 1e-9
    assert abs(pair.E - 1.467462209) < 1e-9


def test_complete_pair_matches_quadrature_on_grid():
    for k in k_grid()[::5]:
        K, E, _ = el.complete_triple(k)
        assert abs(K - float(oracles.K(k))) <= 1e-12
        assert abs(E - float(oracles.E(k))) <= 1e-12


def test_limits_at_ends():
    K, E, _ = el.complete_triple(el.K_MIN)
    assert_allclose([K, E], [math.pi / 2] * 2, atol=1e-13)
    K, E, _ = el.complete_triple(el.K_MAX)
    assert K > 14
    assert abs(E - 1) < 1e-10


@pytest.mark.parametrize("k", [0.0, -0.1, 1.0, 1.5, float("nan"), 1e-13])
def test_modulus_domain(k):
    with pytest.raises(el.EllipticDomainError):
        el.complete_pair(k)
    with pytest.raises(el.EllipticDomainError):
        el.Modulus(k)


def test_modulus_type():
    mod = el.Modulus(0.6)
    assert mod.m == 1 - 0.36
    assert el.complete_pair(mod) == el.complete_pair(0.6)


@given(moduli)
def test_ordering(k):
    K, E, _ = el.complete_triple(k)
    assert E <= math.pi / 2 <= K
    assert E < K


@given(st.floats(min_value=1e-4, max_value=1 - 1e-4))
def test_legendre_relation(k):
    kp = math.sqrt((1 - k) * (1 + k))
    K, E, _ = el.complete_triple(k)
    Kp, Ep, _ = el.complete_triple(kp)
    assert abs(E * Kp + Ep * K - K * Kp - math.pi / 2) < 1e-12 * max(1.0, K * Kp)


def test_monotone_in_k():
    ks = np.linspace(1e-4, 1 - 1e-4, 200)
    K, E, _ = el.complete_triple(ks)
    assert np.all(np.diff(K) > 0)
    assert np.all(np.diff(E) < 0)


def test_incomplete_endpoints():
    assert el.incomplete_pair(0.0, 0.3) == (0.0, 0.0)
    for k in (1e-5, 0.3, 0.9, 0.999999):
        F, E = el.incomplete_pair(1.0, k)
        K, E1, _ = el.complete_triple(k)
        assert abs(F - K) <= 1e-13 * max(1.0, K)
        assert abs(E - E1) <= 1e-13


@pytest.mark.parametrize("z,k", [(0.3, 0.5), (0.9, 0.2), (0.99, 0.95), (0.5, 1e-4)])
def test_incomplete_matches_quadrature(z, k):
    F, E = el.incomplete_pair(z, k)
    assert abs(F - float(oracles.F_inc(z, k))) <= 1e-13
    assert abs(E - float(oracles.E_inc(z, k))) <= 1e-13


@pytest.mark.parametrize("z", [-0.1, 1.0000001, float("inf")])
def test_incomplete_domain(z):
    with pytest.raises(el.EllipticDomainError):
        el.incomplete_pair(z, 0.5)


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9])
def test_small_argument_expansions(k):
    for u in (1e-3, 1e-5, 1e-8, 1e-14):
        F, E = el.incomplete_pair(u, k)
        assert abs(F - (u + (1 + k * k) * u**3 / 6)) <= 1e-13 * u + u**5
        assert abs(E - (u + (1 - k * k) * u**3 / 6)) <= 1e-13 * u + u**5


def test_second_kind_coefficient_is_one_minus_k2():
    # a coefficient of -k^2/6 belongs to the amplitude variable, not the
    # sine variable used here; it is off by u^3/6 at u = 1e-3
    k, u = 0.5, 1e-3
    _, E = el.incomplete_pair(u, k)
    ref = float(oracles.E_inc(u, k))
    assert abs(E - ref) < 1e-16
    assert abs(ref - (u + (1 - k * k) * u**3 / 6)) < 1e-15
    assert abs(ref - (u - k * k * u**3 / 6)) > 1e-10


def test_pi3_reference_values():
    k = 0.5
    assert abs(el.pi3(0.5, k) - float(oracles.Pi(0.5, k))) <= 1e-12
    K, E, _ = el.complete_triple(k)
    assert abs(el.pi3(k * k, k) - E / (1 - k * k)) <= 1e-13
    assert abs(el.pi3(1e-12, k) - K) <= 1e-11


@given(moduli)
def test_pi3_at_k_squared(k):
    K, E, _ = el.complete_triple(k)
    m = (1 - k) * (1 + k)
    assert abs(el.pi3_from_gap(k * k, m, k) - E / m) <= 1e-12 * E / m


def test_pi3_monotone_and_above_K():
    nus = np.linspace(1e-3, 0.999, 300)
    vals = el.pi3(nus, 0.7)
    assert np.all(np.diff(vals) > 0)
    assert np.all(vals > el.ellipk(0.7))


@pytest.mark.parametrize("nu", [0.0, -0.5, 1.0, 2.0])
def test_pi3_domain(nu):
    with pytest.raises(el.EllipticDomainError):
        el.pi3(nu, 0.5)


def test_pi3_from_gap_near_one():
    # gap supplied directly keeps accuracy where 1 - nu would lose digits
    k, gap = 0.4, 1e-9
    val = el.pi3_from_gap(1 - gap, gap, k)
    assert abs(val - float(oracles.Pi(1 - oracles.mp.mpf(gap), k))) < 1e-12 * val


def test_m_derivatives_reference():
    dE, dK = el.m_derivatives(0.5)
    K, E, _ = el.complete_triple(0.5)
    assert abs(dE - 2 * (K - E)) < 1e-14
    assert abs(dE - 0.436576) < 1e-6
    m = 0.75
    assert abs(dK - (E / (2 * m * (m - 1)) - K / (2 * (m - 1)))) < 1e-13


@given(moduli)
def test_m_derivatives_signs(k):
    dE, dK = el.m_derivatives(k)
    assert dE > 0
    assert dK < 0


@settings(max_examples=40)
@given(st.floats(min_value=0.05, max_value=0.95))
def test_m_derivatives_finite_differences(k):
    m = 1 - k * k
    step = 1e-6

    def pair(mm):
        K, E, _ = el.complete_triple(math.sqrt(1 - mm))
        return np.array([E, K])

    fd = (pair(m + step) - pair(m - step)) / (2 * step)
    assert_allclose(el.m_derivatives(k), fd, rtol=1e-6)


def test_vectorised_matches_scalar():
    ks = np.array([0.1, 0.5, 0.9])
    K, E, D = el.complete_triple(ks)
    for i, k in enumerate(ks):
        assert_allclose(el.complete_triple(float(k)), (K[i], E[i], D[i]), rtol=4e-16)
