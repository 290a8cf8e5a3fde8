"""Score sample sets with linear XEB and verify XHOG at a threshold.

Ideal samples concentrate on heavy outputs and land near b = 2; uniform
samples sit at b = 1; a depolarizing mixture interpolates, and the score
reads the fidelity back out.
"""

from xeblab import (
    CircuitDistribution,
    Grid2D,
    check_xhog,
    required_k,
    chebyshev_success_bound,
    sample_circuit,
    sample_depolarizing,
    sample_ideal,
    sample_uniform,
)

n = 10
c = sample_circuit(CircuitDistribution(n, 20, Grid2D(2, 5)), seed=11)
k = 400

print(f"XHOG at threshold b=1.2 with k={k} distinct samples (n={n}):\n")
for label, sampler in (
    ("ideal ", lambda: sample_ideal(c, k, seed=1)),
    ("phi=.5", lambda: sample_depolarizing(c, 0.5, k, seed=1)),
    ("phi=.1", lambda: sample_depolarizing(c, 0.1, k, seed=1)),
    ("unifrm", lambda: sample_uniform(n, k, seed=1)),
):
    rep = check_xhog(c, sampler(), b=1.2)
    print(f"  {label}: score*2^n = {rep.b_implied:.4f}  "
          f"fidelity estimate = {rep.fidelity_estimate:+.4f}  "
          f"xhog_pass = {rep.xhog_pass}")

print("\nsample-size arithmetic for spoof-hardness at threshold b:")
for b in (1.5, 1.1, 1.01, 1.001):
    s = 0.75 + 1 / (4 * b)
    print(f"  b={b:<6} required k (s just above 1/2 + 1/2b): "
          f"{required_k(b, s):>10,}   coarse sizing 4/(b-1)^2: "
          f"{required_k(b, s, appendix=True):>12,}")

b, k4 = 1.001, required_k(1.001, 0.75 + 1 / (4 * 1.001), appendix=True)
bound = chebyshev_success_bound(b, k4, fidelity_mean=1.002)
print(f"\nwith fidelity 0.002 and k = {k4:,} samples, the Chebyshev argument "
      f"guarantees XHOG success probability >= {bound:.9f}")
