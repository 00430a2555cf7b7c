"""One-arm events and blue circuits.

The one-arm event asks for a red chain from a small square around a point out
to sup-norm distance b.  Its probability falls as the tessellation refines.
The complementary event on an annulus is a blue circuit separating the inner
square from the outside.
"""

import numpy as np

from voronoiperc import (
    AnnulusQuery,
    ArmQuery,
    Rect,
    blue_circuit_quenched_mc,
    build_tessellation,
    one_arm_quenched_exact,
    one_arm_quenched_mc,
    sample_binomial,
)
from voronoiperc import rng as vrng

unit = Rect(rho=1.0, area=1.0)

# small instance: the exact enumeration validates the Monte Carlo path
tess = build_tessellation(sample_binomial(unit, 12, seed=61))
q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.4)
exact = one_arm_quenched_exact(tess, q)
mc = one_arm_quenched_mc(tess, q, m=20_000, seed=62)
print(f"n=12 arm probability: exact {exact.value:.5f}, mc {mc.value:.5f} +/- {mc.ci_halfwidth:.5f}")

print("\nmean arm estimate over 8 tessellations, radii (n^-1/4, n^-1/6):")
for n in (256, 1024, 4096):
    vals = []
    for r in range(8):
        rseed = vrng.derive_seed(60, vrng.REPLICA, n, r)
        t = build_tessellation(sample_binomial(unit, n, rseed))
        qq = ArmQuery(u=(0.0, 0.0), a=n**-0.25, b=n ** (-1.0 / 6.0))
        vals.append(one_arm_quenched_mc(t, qq, 4096, rseed).value)
    print(f"  n={n:<5d} mean={np.mean(vals):.6f}  (miss rate {1 - np.mean(vals):.2e})")

# annulus with inner half-width 3.5 and outer 10.5 needs a wide window
big = Rect(rho=1.0, area=576.0)
t = build_tessellation(sample_binomial(big, 64, seed=47))
circ = blue_circuit_quenched_mc(t, AnnulusQuery(center=(0.0, 0.0), j=1), m=4096, seed=63)
print(f"\nblue circuit probability on the j=1 annulus: {circ.value:.4f}")
