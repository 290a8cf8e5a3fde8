"""Convert an XHOG solver into a probability estimator and measure its edge.

The benchmark objective: estimate p0 = Pr[circuit outputs 0^n] with lower
mean squared error than the constant guess 1/2^n.  The gain is reported in
units of 2^-3n.  A solver that actually finds heavy strings buys a gain at
least k ((2s-1) b - 1)(b - 1); a circuit-blind solver buys nothing.
"""

import time

from xeblab import (
    CircuitDistribution,
    FeynmanEstimator,
    Grid2D,
    ReductionEstimator,
    TopKSolver,
    UniformSolver,
    required_k,
    run_mse_benchmark,
    trivial_estimator,
)

n, b = 8, 1.5
k = required_k(b, 1.0)
dist = CircuitDistribution(n, 16, Grid2D(2, 4))
trials = 6000
print(f"n={n}, b={b}, solver sample count k={k}, {trials} trials per estimator\n")

rows = [
    ("trivial 1/2^n", trivial_estimator),
    ("feynman paths=16", FeynmanEstimator(16)),
    ("reduction + top-k", ReductionEstimator(TopKSolver(k), b)),
    ("reduction + uniform", ReductionEstimator(UniformSolver(k), b)),
]
for label, est in rows:
    start = time.perf_counter()
    bench = run_mse_benchmark(dist, est, trials, seed=17)
    dt = time.perf_counter() - start
    s = bench.solver_success_rate
    extra = ""
    if s is not None:
        bound = k * ((2 * s - 1) * b - 1) * (b - 1)
        extra = f"  solver s={s:.3f} -> guaranteed floor {bound:.2f}"
    print(f"  {label:<20} scaled gain {bench.scaled_gain:>8.3f} "
          f"+- {bench.scaled_se:.3f}{extra}   [{dt:.0f} s]")

print("""
reading: the top-k reduction clears its guaranteed floor with a wide margin
(the conditional mean of p0 on a hit is the top-k average, well above
b/2^n).  the circuit-blind uniform solver buys no edge; in fact it drifts
slightly negative, at exactly -k (b-1)^2 in scaled units, because claiming
b/2^n on an accidental hit misprices an average string.  a 16-path
amplitude estimate at 16 cycles is shrunk essentially to the constant
guess, so its gain sits at zero.""")
