"""Acceptance gate: every criterion at its stated tolerance and runtime.

Each test prints one PASS/FAIL line (run pytest with -s to stream them).
"""

import itertools
import math
import time

import numpy as np
import pytest

from matgibbs import (
    CylinderFunction,
    MatrixSystem,
    NotIrreducibleError,
    assemble_transfer,
    bradley_scan,
    build_cone_gibbs,
    build_grid,
    collection_irreducibility_scan,
    collection_primitivity_scan,
    consistency_check,
    correlation_decay,
    cylinder_measure_t,
    eps_independence,
    fit_geometric_rate,
    gibbs_ratio_scan,
    holder_bound_check,
    k_gibbs_measure,
    kusuoka_lift,
    lift_positivity_test,
    power_mean_chain_check,
    pressure_estimate,
    projective_contraction_check,
    tensor_power_lift,
)
from matgibbs.words import iter_words_up_to

RHO_LIFT = (5 + math.sqrt(17)) / 2


def record(criterion, passed, detail, elapsed, limit):
    status = "PASS" if passed and elapsed < limit else "FAIL"
    print(f"{status} criterion {criterion}: {detail} [{elapsed:.2f}s < {limit}s]")
    assert passed, detail
    assert elapsed < limit, f"runtime {elapsed:.2f}s exceeded {limit}s"


def test_c1_exact_cone_construction(shear):
    start = time.perf_counter()
    model = build_cone_gibbs(shear)
    ok = (abs(model.measure((0,)) - 0.5) <= 1e-12
          and abs(model.measure((0, 1)) - 5 / 18) <= 1e-12
          and abs(model.pressure - math.log(3)) <= 1e-12)
    record(1, ok,
           f"mu[0]={model.measure((0,))!r} mu[01]={model.measure((0, 1))!r} "
           f"P={model.pressure!r}",
           time.perf_counter() - start, 1.0)


def test_c2_kolmogorov_consistency(shear):
    start = time.perf_counter()
    cone_defect = consistency_check(build_cone_gibbs(shear), 8)
    lift_defect = consistency_check(k_gibbs_measure(kusuoka_lift(shear)), 8)
    ok = cone_defect <= 1e-10 and lift_defect <= 1e-10
    record(2, ok, f"cone defect {cone_defect:.2e}, lift defect {lift_defect:.2e}",
           time.perf_counter() - start, 5.0)


def test_c3_even_k_lift_spectrum(shear):
    start = time.perf_counter()
    lift = kusuoka_lift(shear)
    rho = float(max(np.linalg.eigvals(lift.operators.matrix_sum()).real))
    hand = np.array([[2.0, 2.0, 1.0], [1.0, 2.0, 1.0], [1.0, 2.0, 2.0]])
    oracle = float(max(np.linalg.eigvals(hand).real))
    model = k_gibbs_measure(lift)
    scan = gibbs_ratio_scan(model, 8)
    ok = (abs(rho - RHO_LIFT) <= 1e-10 and abs(rho - oracle) <= 1e-10
          and 0 < scan.c_min <= scan.C_max < math.inf)
    record(3, ok,
           f"rho={rho!r} target={RHO_LIFT!r}, scan [{scan.c_min:.4f}, {scan.C_max:.4f}]",
           time.perf_counter() - start, 5.0)


def test_c4_cross_construction_agreement(shear):
    start = time.perf_counter()
    disc = assemble_transfer(shear, 2.0, build_grid(2, 2048))
    rho_err = abs(disc.rho - RHO_LIFT)
    model = k_gibbs_measure(tensor_power_lift(shear, 2, orientation="forward"))
    worst = max(abs(cylinder_measure_t(disc, w) - model.measure(w))
                for w in iter_words_up_to(2, 6))
    ok = rho_err <= 1e-3 and worst <= 1e-3
    record(4, ok, f"|rho err|={rho_err:.2e}, cylinder discrepancy {worst:.2e}",
           time.perf_counter() - start, 60.0)


def test_c5_pressure_bracketing(shear):
    start = time.perf_counter()
    targets = {1.0: math.log(3), 2.0: math.log(RHO_LIFT)}
    ok = True
    details = []
    for t in (0.5, 1.0, 2.0):
        series = pressure_estimate(shear, t, 12)
        per = series.per_n_estimates
        mono = per[1] >= per[3] >= per[7] >= per[11]
        logs = series.log_values
        subadd = all(logs[m + n - 1] <= logs[m - 1] + logs[n - 1] + 1e-9
                     for m in range(1, 12) for n in range(1, 13 - m))
        ok &= mono and subadd
        if t in targets:
            err = abs(per[11] - targets[t])
            ok &= err <= 0.1
            details.append(f"t={t}: |per_12 - log rho| = {err:.4f}")
    record(5, ok, "; ".join(details), time.perf_counter() - start, 30.0)


def test_c6_mixing_rate_matches_gap(shear):
    start = time.perf_counter()
    model = build_cone_gibbs(shear)
    gaps = list(range(3, 11))
    eps = [eps_independence(model, 2, 2, g) for g in gaps]
    beta = fit_geometric_rate(gaps, eps)
    ind0 = CylinderFunction.indicator((0,), 2)
    decay = correlation_decay(model, ind0, ind0, range(1, 13))
    ok = beta <= 1 / 3 + 0.15 and decay.fitted_rate <= 1 / 3 + 0.05
    record(6, ok, f"eps rate {beta:.4f} (<= {1/3 + 0.15:.4f}), "
           f"correlation rate {decay.fitted_rate:.4f} (<= {1/3 + 0.05:.4f})",
           time.perf_counter() - start, 30.0)


def test_c7_bradley_interval_persistence(shear, scalars21):
    start = time.perf_counter()
    model = build_cone_gibbs(shear)
    r4 = bradley_scan(model, 4, 3)
    r8 = bradley_scan(model, 8, 3)
    contained = (r4.C_lower - 1e-6 <= r8.C_lower
                 and r8.C_upper <= r4.C_upper + 1e-6)
    bern = build_cone_gibbs(scalars21)
    rb = bradley_scan(bern, 4, 3)
    product_exact = (abs(rb.C_lower - 1.0) <= 1e-12
                     and abs(rb.C_upper - 1.0) <= 1e-12)
    ok = contained and product_exact
    record(7, ok,
           f"N=4 [{r4.C_lower:.8f}, {r4.C_upper:.8f}] contains "
           f"N=8 [{r8.C_lower:.8f}, {r8.C_upper:.8f}]; product consts "
           f"({rb.C_lower!r}, {rb.C_upper!r})",
           time.perf_counter() - start, 30.0)


def test_c8_main_theorem_chain(shear):
    start = time.perf_counter()
    worst = power_mean_chain_check(shear, 2.0, 2, 2)
    ok = worst >= 1.0 - 1e-9
    rng = np.random.default_rng(2024)
    for t in (1.5, 3.0):
        for _ in range(100):
            system = MatrixSystem(rng.standard_normal((2, 2, 2)))
            ratio = power_mean_chain_check(system, t, 2, 1)
            worst = min(worst, ratio)
            ok &= ratio >= 1.0 - 1e-9
    record(8, ok, f"minimal chain ratio {worst:.6f} >= 1 - 1e-9",
           time.perf_counter() - start, 30.0)


def test_c9_regularity_lemma_checks(shear):
    start = time.perf_counter()
    grid = build_grid(2, 128)
    report = projective_contraction_check(shear, grid, samples=10_000, seed=6)
    ok = (report.worst_map_ratio <= 2.0 + 1e-9
          and report.worst_weight_ratio <= 1.0 + 1e-9)
    details = [f"contraction worst {report.worst_map_ratio:.4f}"]
    for t in (0.5, 1.0, 2.0):
        disc = assemble_transfer(shear, t, build_grid(2, 256))
        short = max(holder_bound_check(disc, w)
                    for w in iter_words_up_to(2, 3))
        longer = max(holder_bound_check(disc, w)
                     for n in range(4, 7)
                     for w in itertools.product(range(2), repeat=n))
        ok &= longer <= 10 * short
        details.append(f"t={t}: holder |J|<=6 max {longer:.3f} vs 10x{short:.3f}")
    record(9, ok, "; ".join(details), time.perf_counter() - start, 60.0)


def test_c10_negative_controls(reducible_pair):
    start = time.perf_counter()
    rejected = False
    try:
        build_cone_gibbs(reducible_pair)
    except NotIrreducibleError:
        rejected = True
    prim = collection_primitivity_scan(reducible_pair, N=1, L=1)
    irr = collection_irreducibility_scan(reducible_pair, L=1)
    positivity = lift_positivity_test(kusuoka_lift(reducible_pair), N=2)
    ok = (rejected and prim.delta <= 1e-12 and irr.delta <= 1e-12
          and not positivity.passed and positivity.witness is not None)
    record(10, ok,
           f"rejected={rejected}, prim delta={prim.delta:.1e}, "
           f"irr delta={irr.delta:.1e}, positivity witness={positivity.witness}",
           time.perf_counter() - start, 5.0)
