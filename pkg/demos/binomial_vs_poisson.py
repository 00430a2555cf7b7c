"""Binomial point counts against Poisson: exact ratios and sampled events.

pi(n, m) is the probability that a Poisson(n/2) count equals m, divided by
the probability that a Binomial(n, 1/2) count equals m.  The table stays
below 2 and above e^(-3a^2)/2 near the center, which is what lets Poisson
statements transfer to the fixed-count model.  The empirical comparison
samples an event under both models and reports the matching inequalities.
"""

from voronoiperc import (
    check_pi_bounds,
    default_event_spec,
    empirical_comparison,
    pi_ratio,
    pi_table,
)

table = pi_table(12)
print("pi(12, m) for m = 0..12:")
print("  " + " ".join(f"{v:.4f}" for v in table.values))
print(f"max {table.max_value:.4f} at m={table.argmax} (always ceil(n/2), always < 2)")
print(f"scalar check: pi_ratio(12, 6) = {pi_ratio(12, 6):.8f}")

report = check_pi_bounds(500)
print(f"\nbounds for every n <= 500: ok={report.ok}, "
      f"recursion error {report.max_recursion_error:.2e}, "
      f"upper margin {report.min_upper_margin:.4f}, "
      f"lower margin {report.min_lower_margin:.4f}")

# empty left half: closed forms exist under both models, so the sampled
# frequencies and the inequalities are easy to eyeball
spec = default_event_spec("empty", n=8)
rep = empirical_comparison(spec, n=8, K=4000, m=1, seed=71)
print(f"\nempty-half event, n=8: binomial {rep.p_binomial:.4f} "
      f"(closed form {0.5**8:.4f}), poisson {rep.p_poisson:.4f}")
print(f"upper transfer holds: {rep.upper_ok}, tail bound holds: {rep.tail_ok}")

spec = default_event_spec("crossing", n=100)
rep = empirical_comparison(spec, n=100, K=150, m=128, seed=72)
print(f"\ncrossing event, n=100: binomial {rep.p_binomial:.4f}, poisson {rep.p_poisson:.4f}")
print(f"lower transfer holds: {rep.lower_ok}")
