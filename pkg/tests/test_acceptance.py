"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line, printed in the terminal summary, and
then asserts the same condition. Runtime budgets are part of the criterion.
"""

import math
import time

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE
from dktransition import elliptic as el
from dktransition import equilibrium as eq
from dktransition import oracle
from dktransition import partition as pt
from dktransition import transition as tr

PI2 = math.pi**2


def report(key, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    line = f"{detail}; {elapsed:.2f}s of {budget:g}s"
    ACCEPTANCE[key] = (ok, line)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {line}")
    return ok


def test_criterion_1_third_derivative_jump():
    t0 = time.perf_counter()
    rep = tr.jump_report()
    elapsed = time.perf_counter() - t0
    left, right = rep.F3_left, rep.F3_right
    rel_l = abs(left + 1 / math.pi**6) / (1 / math.pi**6)
    rel_r = abs(right + 3 / math.pi**6) / (3 / math.pi**6)
    ok = rel_l <= 1e-6 and rel_r <= 1e-6 and rep.converged
    detail = f"F3(pi^2-) = {left:.10e} (rel {rel_l:.1e}), F3(pi^2+) = {right:.10e} (rel {rel_r:.1e})"
    assert report("1", ok, detail, elapsed, 1.0)


def test_criterion_2_c2_matching():
    t0 = time.perf_counter()
    rep = tr.matching_report()
    elapsed = time.perf_counter() - t0
    targets = {"M": math.log(math.pi) + 0.75, "M1": 1 / (2 * PI2), "M2": -1 / (2 * PI2**2)}
    gaps = {name: abs(l.value - r.value) for name, (l, r) in rep.items()}
    errs = {name: abs(rep[name][1].value - targets[name]) for name in targets}
    ok = max(gaps.values()) <= 1e-8 and max(errs.values()) <= 1e-8
    detail = ", ".join(f"{n} gap {gaps[n]:.1e} err {errs[n]:.1e}" for n in targets)
    assert report("2", ok, detail, elapsed, 1.0)


def test_criterion_3_lemma_closure():
    Ts = np.linspace(PI2, 40.0, 51)[1:]
    t0 = time.perf_counter()
    worst = 0.0
    for T in Ts:
        p = tr.solve_params(T)
        m = (1 - p.k) * (1 + p.k)
        worst = max(
            worst,
            abs(8 * p.E * p.K - 4 * m * p.K**2 - T) / T,
            abs(p.beta * (2 * p.E - m * p.K) - 1),
            abs(T * p.beta - 4 * p.K) / (4 * p.K),
        )
    elapsed = time.perf_counter() - t0
    assert report("3", worst <= 1e-10, f"50 values of T, worst relative residual {worst:.1e}", elapsed, 1.0)


def test_criterion_4_density_certification():
    t0 = time.perf_counter()
    rows = []
    ok = True
    for T in (PI2 + 0.5, 14.0, 25.0):
        mu = eq.equilibrium_measure(T)
        p = mu.params
        mass = mu.mass()
        xs = np.linspace(-1.1 * p.beta, 1.1 * p.beta, 20001)
        cap = float(np.max(mu.density(xs)))
        m2 = abs(mu.second_moment() - eq.second_moment_closed_form(p))
        el_rep = eq.el_certify(mu, n_points=2000)
        ok &= abs(mass - 1) <= 1e-8 and cap <= 1 + 1e-9 and m2 <= 1e-7 and el_rep.passes(1e-5)
        rows.append(f"T={T:.4g}: mass-1 {mass - 1:.1e}, max {cap:.12f}, m2 err {m2:.1e}, "
                    f"EL dev {el_rep.max_dev_on_support:.1e}")
    elapsed = time.perf_counter() - t0
    assert report("4", ok, "; ".join(rows), elapsed, 30.0)


def test_criterion_5_mhaskar_saff_criticality():
    h = 1e-6
    t0 = time.perf_counter()
    worst = 0.0
    for T in (12.0, 14.0, 20.0):
        p = tr.solve_params(T)
        a, b = p.alpha, p.beta
        ga = (eq.ms_functional(T, a + h, b) - eq.ms_functional(T, a - h, b)) / (2 * h)
        gb = (eq.ms_functional(T, a, b + h) - eq.ms_functional(T, a, b - h)) / (2 * h)
        worst = max(worst, abs(ga), abs(gb))
    elapsed = time.perf_counter() - t0
    assert report("5", worst <= 1e-6, f"largest gradient component {worst:.1e}", elapsed, 5.0)


@pytest.mark.slow
def test_criterion_6_oracle_equivalence():
    t0 = time.perf_counter()
    sup = oracle.run(14.0, n=2048, L=1.2)
    sub = oracle.run(4.0, n=2048, L=1.5)
    elapsed = time.perf_counter() - t0
    gap = abs(sup.energy - sup.M)
    ok = (
        sup.converged and sub.converged
        and sup.sup <= 2e-2 and sup.alpha_error <= 1e-2 and sup.beta_error <= 1e-2
        and gap <= 5e-3 and sub.sup <= 2e-2
    )
    detail = (f"T=14: sup {sup.sup:.2e}, |da| {sup.alpha_error:.1e}, |db| {sup.beta_error:.1e}, "
              f"|E-M| {gap:.1e}; T=4: sup {sub.sup:.2e}")
    assert report("6", ok, detail, elapsed, 300.0)


@pytest.mark.slow
@pytest.mark.parametrize("T", [5.0, PI2, 14.0], ids=["T=5", "T=pi^2", "T=14"])
def test_criterion_7_finite_N_convergence(T):
    F = tr.free_energy(T)
    t0 = time.perf_counter()
    errs, doubling = [], 0.0
    for N in range(2, 9):
        r = pt.auto_partition(N, T)
        wide = pt.partition_logZ(N, T, 2 * r.window)
        doubling = max(doubling, abs(wide.logZ - r.logZ))
        errs.append(abs(r.normalized - F))
    elapsed = time.perf_counter() - t0
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    detail = (f"T={T:.6g}: errors N=2..8 " + " ".join(f"{e:.3e}" for e in errs)
              + f", max doubling change {doubling:.1e}")
    assert report(f"7 [T={T:.6g}]", decreasing and doubling < 1e-12, detail, elapsed, 600.0)


def test_criterion_8_semicircle_branch():
    t0 = time.perf_counter()
    energy_err = 0.0
    for t in (0.25, 1.0):
        energy_err = max(energy_err, abs(oracles.semicircle_energy_quad(t) - (0.75 - 0.5 * math.log(t))))
    flat, slack = 0.0, math.inf
    for t in (0.25, 1.0):
        mu = eq.equilibrium_measure(1 / t)
        r = 2 * math.sqrt(t)
        inside = np.linspace(-r, r, 41)
        outside = np.concatenate([np.linspace(-3 * r, -r, 21)[:-1], np.linspace(r, 3 * r, 21)[1:]])
        w_in = mu.potential_grid(inside) + inside**2 / (4 * t)
        w_out = mu.potential_grid(outside) + outside**2 / (4 * t)
        const = (1 - math.log(t)) / 2
        flat = max(flat, float(np.max(np.abs(w_in - const))))
        slack = min(slack, float(np.min(w_out - const)))
    elapsed = time.perf_counter() - t0
    ok = energy_err <= 1e-6 and flat <= 1e-8 and slack > 0
    detail = f"energy err {energy_err:.1e}, potential spread on support {flat:.1e}, min exterior slack {slack:.2e}"
    assert report("8", ok, detail, elapsed, 10.0)


def test_criterion_9_elliptic_kernel():
    n, half = 50, 25
    ks = np.concatenate([np.logspace(-6, math.log10(0.5), half), 1 - np.logspace(math.log10(0.5), -6, n - half)])
    zs = np.linspace(0.02, 0.999, n)
    t0 = time.perf_counter()
    got = []
    for k, z in zip(ks, zs):
        K, E, _ = el.complete_triple(k)
        F, Ez = el.incomplete_pair(z, k)
        gap = (1 - k) * (1 + k) / 2
        got.append((K, E, F, Ez, el.pi3_from_gap(1 - gap, gap, k)))
    elapsed = time.perf_counter() - t0
    worst = 0.0
    for (k, z), vals in zip(zip(ks, zs), got):
        gap = (1 - k) * (1 + k) / 2
        refs = (oracles.K(k), oracles.E(k), oracles.F_inc(z, k), oracles.E_inc(z, k),
                oracles.Pi(1 - oracles.mp.mpf(gap), k))
        worst = max(worst, max(abs(v - float(r)) / max(1.0, abs(v)) for v, r in zip(vals, refs)))
    detail = f"50-point grid, K E F E(z) Pi, worst error {worst:.1e} (library time only)"
    assert report("9", worst <= 1e-12, detail, elapsed, 5.0)
