"""Acceptance suite: one test per shipped guarantee.

Each test states its tolerance and budget inline and is independent of the
others, so a verbose pytest run reads as a per-criterion pass/fail report.
Monte Carlo sizes and seeds were calibrated once and then frozen; the
reasoning lives in the project notes, not here.
"""

import dataclasses
import math
import time

import numpy as np

from voronoiperc import (
    ArmQuery,
    CrossingQuery,
    ExperimentConfig,
    HORIZONTAL,
    RED,
    Rect,
    build_tessellation,
    check_duality,
    check_influence_revealment_bound,
    check_pi_bounds,
    draw_coloring,
    influence_l2,
    influences_exact,
    influences_mc,
    one_arm_quenched_mc,
    quarter_inner,
    quenched_probability_exact,
    quenched_probability_mc,
    revealment_exact,
    rows_to_csv,
    run_experiment,
    sample_binomial,
)
from voronoiperc import rng as vrng

UNIT = Rect(rho=1.0, area=1.0)
WINDOW_QUERY = CrossingQuery(UNIT, HORIZONTAL, RED)


def strictly_decreasing(xs) -> bool:
    return all(a > b for a, b in zip(xs, xs[1:]))


def test_criterion_01_duality_on_10000_random_instances():
    # red left-right XOR blue top-bottom, n in [1, 300], budget 2 minutes
    t0 = time.perf_counter()
    ok = 0
    for i in range(10_000):
        n = int(vrng.substream(12345, 99, i).integers(1, 301))
        tess = build_tessellation(sample_binomial(UNIT, n, vrng.derive_seed(12345, 1, i)))
        coloring = draw_coloring(tess, vrng.derive_seed(12345, 2, i))
        ok += check_duality(tess, coloring, UNIT)
    elapsed = time.perf_counter() - t0
    assert ok == 10_000, f"duality failed on {10_000 - ok} of 10000 instances"
    assert elapsed <= 120.0, f"duality sweep took {elapsed:.1f}s, budget is 120s"


def test_criterion_02_monte_carlo_agrees_with_exact_oracles():
    # 50 configs, n <= 16, m = 10^5: quenched estimate within 4 sigma in >= 48,
    # influence entries within 4 sigma in >= 95% of entries
    m = 100_000
    quench_ok = 0
    entries_ok = 0
    entries_all = 0
    for i in range(50):
        n = 1 + int(vrng.substream(777, 99, i).integers(0, 16))
        tess = build_tessellation(sample_binomial(UNIT, n, vrng.derive_seed(777, 1, i)))
        exact = quenched_probability_exact(tess, WINDOW_QUERY)
        mc = quenched_probability_mc(tess, WINDOW_QUERY, m, vrng.derive_seed(777, 2, i))
        sigma = math.sqrt(exact.value * (1.0 - exact.value) / m)
        quench_ok += abs(mc.value - exact.value) <= 4.0 * sigma
        ie = influences_exact(tess, WINDOW_QUERY)
        im = influences_mc(tess, WINDOW_QUERY, m, vrng.derive_seed(777, 3, i))
        sig = np.sqrt(ie.values * (1.0 - ie.values) / m)
        entries_ok += int(np.count_nonzero(np.abs(im.values - ie.values) <= 4.0 * sig))
        entries_all += n
    assert quench_ok >= 48, f"only {quench_ok}/50 quenched estimates within 4 sigma"
    frac = entries_ok / entries_all
    assert frac >= 0.95, f"only {entries_ok}/{entries_all} influence entries within 4 sigma"


def test_criterion_03_influence_revealment_bound_exact_integer():
    # 200 configs, n <= 14, fixed-segment algorithm: exact sum of squared
    # influences <= exact max revealment, compared in integers
    for i in range(200):
        n = 1 + i % 14
        tess = build_tessellation(sample_binomial(UNIT, n, vrng.derive_seed(1300, 1, i)))
        inner = quarter_inner(UNIT)
        infl = influences_exact(tess, CrossingQuery(inner, HORIZONTAL, RED))
        rev = revealment_exact(tess, inner)
        check = check_influence_revealment_bound(infl, rev)
        assert check.holds, f"bound violated at config {i}: {check.lhs} > {check.rhs}"


def test_criterion_04_squared_influence_sums_never_exceed_one():
    # exact sums are dyadic rationals, so the comparison against 1 is exact
    for i in range(50):
        n = 1 + int(vrng.substream(777, 99, i).integers(0, 16))
        tess = build_tessellation(sample_binomial(UNIT, n, vrng.derive_seed(777, 1, i)))
        total = influence_l2(influences_exact(tess, WINDOW_QUERY))
        assert total <= 1.0, f"window query config {i}: sum of squares {total} > 1"
    inner = quarter_inner(UNIT)
    inner_query = CrossingQuery(inner, HORIZONTAL, RED)
    for i in range(200):
        n = 1 + i % 14
        tess = build_tessellation(sample_binomial(UNIT, n, vrng.derive_seed(1300, 1, i)))
        total = influence_l2(influences_exact(tess, inner_query))
        assert total <= 1.0, f"inner query config {i}: sum of squares {total} > 1"


def test_criterion_05_success_ratio_bounds_all_n_up_to_2000():
    # ratio <= 2 everywhere, lower bound on the admissible center band,
    # recursion identity to 1e-12, budget 10 seconds
    t0 = time.perf_counter()
    report = check_pi_bounds(2000)
    elapsed = time.perf_counter() - t0
    assert report.ok, f"violations: {report.violations[:5]}"
    assert report.max_recursion_error <= 1e-12, (
        f"recursion error {report.max_recursion_error:.3e} above 1e-12"
    )
    assert elapsed <= 10.0, f"bounds sweep took {elapsed:.1f}s, budget is 10s"


def test_criterion_06_square_crossing_probability_is_half():
    # pooled annealed estimate at n = 1000 from 64 * 1024 = 2^16 indicator
    # draws must land within 0.02 of 1/2
    K, m, n, seed = 64, 1024, 1000, 20260814
    assert K * m == 1 << 16
    vals = []
    for r in range(K):
        rseed = vrng.derive_seed(seed, vrng.REPLICA, n, r)
        tess = build_tessellation(sample_binomial(UNIT, n, rseed))
        vals.append(quenched_probability_mc(tess, WINDOW_QUERY, m, rseed).value)
    pooled = float(np.mean(vals))
    assert abs(pooled - 0.5) <= 0.02, f"pooled estimate {pooled:.4f} off 1/2 by more than 0.02"


def test_criterion_07_box_crossing_nondegenerate_at_aspect_three():
    # crossing a concentric quarter-area rectangle inside an aspect-3 window
    # at n = 2000: estimate inside (0.05, 0.95), CI half-width <= 0.02
    K, m, n, seed = 32, 256, 2000, 77
    window = Rect(rho=3.0, area=1.0)
    query = CrossingQuery(window.scaled_concentric(0.25), HORIZONTAL, RED)
    vals = []
    for r in range(K):
        rseed = vrng.derive_seed(seed, vrng.REPLICA, n, 0, r)
        tess = build_tessellation(sample_binomial(window, n, rseed))
        vals.append(quenched_probability_mc(tess, query, m, rseed).value)
    est = float(np.mean(vals))
    ci = 1.96 * float(np.std(vals, ddof=1)) / math.sqrt(K)
    assert 0.05 < est < 0.95, f"estimate {est:.4f} outside (0.05, 0.95)"
    assert ci <= 0.02, f"CI half-width {ci:.4f} above 0.02"


def test_criterion_08_deviation_quantile_decreases_with_size():
    # 90th percentile of |Z - 1/2| strictly decreasing over the size grid,
    # K = 100 tessellations, m = 1024 colorings each, budget 30 minutes
    t0 = time.perf_counter()
    cfg = ExperimentConfig(name="acc8", n_grid=(64, 256, 1024, 4096), K=100, m=1024, seed=97)
    rows = run_experiment("concentration", cfg)
    elapsed = time.perf_counter() - t0
    q90 = [r.quantiles[0.9] for r in rows]
    assert strictly_decreasing(q90), f"q90 series not strictly decreasing: {q90}"
    assert elapsed <= 1800.0, f"concentration run took {elapsed:.1f}s, budget is 1800s"


def test_criterion_09_variance_bounded_by_influence_sum():
    # sampled Var(Z) <= sampled E[sum Inf^2] + 2 * combined SE at n = 12, K = 500
    cfg = ExperimentConfig(name="acc9", n_grid=(12,), K=500, m=1, seed=909)
    row = run_experiment("efron-stein", cfg)[0]
    assert row.holds, f"Var(Z)={row.var_z:.5f} exceeds bound {row.mean_sum_sq:.5f} plus slack"


def test_criterion_10_exponential_moment_inequality():
    # LHS <= RHS + 2 * combined SE at n = 12, K = 500 for each lambda
    cfg = ExperimentConfig(
        name="acc10", n_grid=(12,), K=500, m=1, seed=1010, lambdas=(0.5, 1.0, 2.0)
    )
    rows = run_experiment("exp-ineq", cfg)
    assert len(rows) == 3
    for row in rows:
        assert row.holds, f"lambda={row.lam}: lhs {row.lhs:.5f} > rhs {row.rhs:.5f} plus slack"


def test_criterion_11_one_arm_probability_decays_with_size():
    # median quenched one-arm estimate strictly decreasing over the scaled
    # radius grid (a, b) = (n^(-1/4), n^(-1/6)); m grows as the arm event
    # concentrates so the median resolves below 1
    K, seed = 25, 4242
    grid = ((256, 262144), (1024, 131072), (4096, 65536), (16384, 32768))
    medians = []
    for n, m in grid:
        vals = []
        for r in range(K):
            rseed = vrng.derive_seed(seed, vrng.REPLICA, n, r)
            tess = build_tessellation(sample_binomial(UNIT, n, rseed))
            query = ArmQuery(u=(0.0, 0.0), a=n ** -0.25, b=n ** (-1.0 / 6.0))
            vals.append(one_arm_quenched_mc(tess, query, m, rseed).value)
        medians.append(float(np.median(vals)))
    assert strictly_decreasing(medians), f"medians not strictly decreasing: {medians}"


def test_criterion_12_csv_output_independent_of_worker_count():
    configs = {
        "concentration": ExperimentConfig(name="acc12c", n_grid=(24,), K=8, m=64, seed=5),
        "box": ExperimentConfig(name="acc12b", n_grid=(24,), K=8, m=64, seed=6),
        "efron-stein": ExperimentConfig(name="acc12e", n_grid=(8, 12), K=8, m=1, seed=7),
        "exp-ineq": ExperimentConfig(name="acc12i", n_grid=(8,), K=8, m=1, seed=8),
    }
    for kind, cfg in configs.items():
        serial = rows_to_csv(run_experiment(kind, cfg)).encode()
        threaded = rows_to_csv(run_experiment(kind, dataclasses.replace(cfg, workers=3))).encode()
        assert serial == threaded, f"{kind}: CSV differs between worker counts"
