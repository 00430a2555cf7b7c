"""Left-right crossings: exact enumeration, Monte Carlo, and duality.

On a small instance the crossing probability is a dyadic rational computed by
enumerating every coloring of the cells that meet the target; the Monte Carlo
estimator must agree within its confidence band.  On instances of any size,
exactly one of {red left-right crossing, blue top-bottom crossing} occurs.
"""

from voronoiperc import (
    BLUE,
    CrossingQuery,
    HORIZONTAL,
    RED,
    Rect,
    VERTICAL,
    build_tessellation,
    check_duality,
    detect_crossing,
    draw_coloring,
    quenched_probability_exact,
    quenched_probability_mc,
    sample_binomial,
)
from voronoiperc import rng as vrng

window = Rect(rho=1.0, area=1.0)
tess = build_tessellation(sample_binomial(window, 14, seed=21))
query = CrossingQuery(window, HORIZONTAL, RED)

exact = quenched_probability_exact(tess, query)
print(f"n=14: exact P(red left-right | tessellation) = {exact.value:.6f}")
print(f"      as a fraction: {exact.exact_count}/2^{exact.exact_bits}")

mc = quenched_probability_mc(tess, query, m=20_000, seed=22)
print(f"      Monte Carlo (m=20000): {mc.value:.6f} +/- {mc.ci_halfwidth:.6f}")

# one sampled coloring, inspected both ways
coloring = draw_coloring(tess, seed=23)
red_lr = detect_crossing(tess, coloring, query)
blue_tb = detect_crossing(tess, coloring, CrossingQuery(window, VERTICAL, BLUE))
print(f"sampled coloring: red left-right={red_lr}, blue top-bottom={blue_tb}")

failures = 0
for i in range(500):
    n = 1 + int(vrng.substream(99, 0, i).integers(0, 200))
    t = build_tessellation(sample_binomial(window, n, vrng.derive_seed(99, 1, i)))
    c = draw_coloring(t, vrng.derive_seed(99, 2, i))
    failures += not check_duality(t, c, window)
print(f"duality check on 500 random instances: {failures} failures")
