"""Exploration algorithm and its revealment.

The query algorithm decides a crossing of the concentric quarter-area
rectangle while examining few cells: it seeds on a random vertical segment in
the middle third, then grows red clusters.  Revealment is the worst-case
probability that any one cell gets examined; it dominates the sum of squared
influences, and under the random segment it decreases, slowly, as cells
multiply.
"""

from voronoiperc import (
    CrossingQuery,
    HORIZONTAL,
    RED,
    Rect,
    build_tessellation,
    check_influence_revealment_bound,
    draw_coloring,
    influences_exact,
    quarter_inner,
    revealment_exact,
    revealment_mc,
    run_exploration,
    sample_binomial,
)

window = Rect(rho=1.0, area=1.0)
inner = quarter_inner(window)
print(f"inner rectangle bounds: {inner.bounds}")

tess = build_tessellation(sample_binomial(window, 18, seed=51))
coloring = draw_coloring(tess, seed=52)

trace = run_exploration(tess, inner, coloring, segment_seed=53)
print(f"segment at x={trace.segment_x:+.4f}")
print(f"queried {len(trace.queried)} of {tess.n_cells} cells, in order: {list(trace.queried)}")
print(f"crossing found: {trace.outcome}")

rep = revealment_exact(tess, inner)
print(f"\nfixed-segment revealment: delta = {rep.delta:.5f} ({rep.method})")

mc = revealment_mc(tess, inner, m=20_000, seed=54)
print(f"random-segment revealment: delta = {mc.delta:.5f} (m={mc.m})")

print("\nunder the random segment the worst cell improves slowly with n:")
for n in (200, 1000, 4000):
    big = build_tessellation(sample_binomial(window, n, seed=55))
    mcb = revealment_mc(big, inner, m=4000, seed=56)
    print(f"  n={n:<5d} delta = {mcb.delta:.4f}")

infl = influences_exact(tess, CrossingQuery(inner, HORIZONTAL, RED))
check = check_influence_revealment_bound(infl, rep)
print(f"\nsum Inf^2 = {check.lhs:.5f} <= max revealment = {check.rhs:.5f}: {check.holds}")
