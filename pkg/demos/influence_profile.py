#!/usr/bin/env python3
# Which cells decide the crossing?  Influence of a cell is the probability
# that flipping its color flips the left-right crossing indicator.

import numpy as np

from voronoiperc import (
    CrossingQuery,
    HORIZONTAL,
    RED,
    Rect,
    build_tessellation,
    influence_l2,
    influences_exact,
    influences_mc,
    sample_binomial,
)

window = Rect(rho=1.0, area=1.0)
query = CrossingQuery(window, HORIZONTAL, RED)

tess = build_tessellation(sample_binomial(window, 16, seed=31))
exact = influences_exact(tess, query)
mc = influences_mc(tess, query, m=50_000, seed=32)

order = np.argsort(exact.values)[::-1]
print("cell   nucleus              exact     monte carlo")
for j in order[:6]:
    x, y = tess.points[j]
    print(f"{j:4d}   ({x:+.3f}, {y:+.3f})   {exact.values[j]:.5f}   {mc.values[j]:.5f}")
print(f"sum of squared influences: {influence_l2(exact):.5f} (always <= 1)")

# the sum of squares shrinks as cells multiply: no single cell stays decisive
print("\nn      sum Inf^2   max Inf")
for n, seed in ((4, 41), (8, 42), (12, 43), (16, 44), (20, 45), (24, 46)):
    t = build_tessellation(sample_binomial(window, n, seed))
    vec = influences_exact(t, query)
    print(f"{n:<6d} {influence_l2(vec):<11.5f} {vec.values.max():.5f}")
