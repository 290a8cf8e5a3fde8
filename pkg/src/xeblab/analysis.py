"""Statistical verification harnesses for the output-probability model.

Deep random circuits empirically push their output probabilities toward the
exponential law with density 2^n exp(-2^n p); rescaled as x = 2^n P(z) that
is Exp(1).  Everything here leans on that model: the goodness-of-fit check,
the first two moments of the observed-probability variable Y under the
depolarizing mixture, the KL divergence between the uniform-sampling and
threshold-level sample laws, and a likelihood-ratio distinguisher whose
advantage Pinsker's inequality caps at sqrt(k (b-1)^2 / 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .circuit import CircuitDistribution, sample_circuit
from .errors import DomainError
from .rng import derive_u64, philox_rng
from .samplers import _mixture_sample
from .simulator import full_distribution

DEFAULT_KS_THRESHOLD = 0.01


@dataclass
class FitReport:
    """Kolmogorov-Smirnov distance of rescaled probabilities against Exp(1)."""

    statistic: float
    sample_count: int
    passed: bool
    threshold: float

    def to_text(self) -> str:
        return (
            f"statistic={self.statistic!r}\n"
            f"sample_count={self.sample_count}\n"
            f"threshold={self.threshold!r}\n"
            f"pass={1 if self.passed else 0}\n"
        )

    CSV_HEADER = "statistic,sample_count,threshold,pass"

    def to_csv(self) -> str:
        row = (
            f"{self.statistic!r},{self.sample_count},{self.threshold!r},"
            f"{1 if self.passed else 0}"
        )
        return self.CSV_HEADER + "\n" + row + "\n"


@dataclass
class DivergenceReport:
    """KL divergence (nats) at threshold b, its quadratic approximation, and
    the Pinsker total-variation bound for k samples."""

    b: float
    kl: float
    taylor_approx: float
    k: int | None = None
    tv_bound: float | None = None

    def to_text(self) -> str:
        return (
            f"b={self.b!r}\n"
            f"kl={self.kl!r}\n"
            f"taylor_approx={self.taylor_approx!r}\n"
            f"k={'' if self.k is None else self.k}\n"
            f"tv_bound={'' if self.tv_bound is None else repr(self.tv_bound)}\n"
        )

    CSV_HEADER = "b,kl,taylor_approx,k,tv_bound"

    def to_csv(self) -> str:
        row = ",".join(
            [
                repr(self.b),
                repr(self.kl),
                repr(self.taylor_approx),
                "" if self.k is None else str(self.k),
                "" if self.tv_bound is None else repr(self.tv_bound),
            ]
        )
        return self.CSV_HEADER + "\n" + row + "\n"


@dataclass
class MomentReport:
    """Rescaled mean and variance of Y = P(z) under the depolarizing mixture.

    Expected values: E[Y] 2^n = 1 + phi and Var(Y) 4^n = 1 + 2 phi - phi^2.
    Standard errors are clustered per circuit, since samples within one
    circuit share its distribution.
    """

    n: int
    phi: float
    circuits: int
    samples_per_circuit: int
    mean_scaled: float
    mean_expected: float
    mean_se: float
    var_scaled: float
    var_expected: float
    var_se: float

    def to_text(self) -> str:
        return (
            f"n={self.n}\n"
            f"phi={self.phi!r}\n"
            f"circuits={self.circuits}\n"
            f"samples_per_circuit={self.samples_per_circuit}\n"
            f"mean_scaled={self.mean_scaled!r}\n"
            f"mean_expected={self.mean_expected!r}\n"
            f"mean_se={self.mean_se!r}\n"
            f"var_scaled={self.var_scaled!r}\n"
            f"var_expected={self.var_expected!r}\n"
            f"var_se={self.var_se!r}\n"
        )

    CSV_HEADER = (
        "n,phi,circuits,samples_per_circuit,mean_scaled,mean_expected,mean_se,"
        "var_scaled,var_expected,var_se"
    )

    def to_csv(self) -> str:
        row = ",".join(
            [
                str(self.n),
                repr(self.phi),
                str(self.circuits),
                str(self.samples_per_circuit),
                repr(self.mean_scaled),
                repr(self.mean_expected),
                repr(self.mean_se),
                repr(self.var_scaled),
                repr(self.var_expected),
                repr(self.var_se),
            ]
        )
        return self.CSV_HEADER + "\n" + row + "\n"


def ks_distance_exp1(values: np.ndarray) -> float:
    """Sup distance between the empirical CDF of values and 1 - exp(-x)."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    m = x.size
    if m == 0:
        raise ValueError("no values")
    cdf = 1.0 - np.exp(-x)
    grid = np.arange(m, dtype=np.float64)
    d_minus = np.max(cdf - grid / m)
    d_plus = np.max((grid + 1.0) / m - cdf)
    return float(max(d_plus, d_minus))


def pooled_rescaled_probabilities(
    dist: CircuitDistribution, circuits: int, seed: int
) -> np.ndarray:
    """All 2^n probabilities of ``circuits`` sampled circuits, rescaled by 2^n."""
    if circuits < 1:
        raise ValueError("need at least one circuit")
    dim = 1 << dist.n
    out = np.empty(circuits * dim)
    for i in range(circuits):
        c = sample_circuit(dist, derive_u64(seed, i))
        out[i * dim : (i + 1) * dim] = full_distribution(c).probs * dim
    return out


def porter_thomas_fit(
    dist: CircuitDistribution,
    circuits: int,
    seed: int,
    threshold: float = DEFAULT_KS_THRESHOLD,
) -> FitReport:
    """KS test of pooled rescaled output probabilities against Exp(1).

    The 0.01 default threshold is a convention calibrated for 1e5+ pooled
    points, where the sampling noise floor sits near 0.004.
    """
    pooled = pooled_rescaled_probabilities(dist, circuits, seed)
    stat = ks_distance_exp1(pooled)
    return FitReport(stat, pooled.size, stat < threshold, threshold)


def xeb_moment_check(
    dist: CircuitDistribution,
    phi: float,
    circuits: int,
    samples_per_circuit: int,
    seed: int,
) -> MomentReport:
    """Estimate E[Y] 2^n and Var(Y) 4^n from depolarizing samples."""
    if not 0.0 <= phi <= 1.0:
        raise DomainError(f"fidelity must lie in [0, 1], got {phi}")
    if circuits < 2 or samples_per_circuit < 1:
        raise ValueError("need at least 2 circuits and 1 sample each")
    dim = 1 << dist.n
    ys = np.empty((circuits, samples_per_circuit))
    for i in range(circuits):
        c = sample_circuit(dist, derive_u64(seed, i, 0))
        probs = full_distribution(c).probs
        ss = _mixture_sample(
            probs, dist.n, phi, samples_per_circuit, philox_rng(seed, i, 1), False
        )
        ys[i] = probs[ss.samples] * dim

    grand = ys.mean()
    circuit_means = ys.mean(axis=1)
    mean_se = float(circuit_means.std(ddof=1)) / math.sqrt(circuits)
    per_circuit_var = ((ys - grand) ** 2).mean(axis=1)
    var_scaled = float(per_circuit_var.mean())
    var_se = float(per_circuit_var.std(ddof=1)) / math.sqrt(circuits)
    return MomentReport(
        n=dist.n,
        phi=phi,
        circuits=circuits,
        samples_per_circuit=samples_per_circuit,
        mean_scaled=float(grand),
        mean_expected=1.0 + phi,
        mean_se=mean_se,
        var_scaled=var_scaled,
        var_expected=1.0 + 2.0 * phi - phi * phi,
        var_se=var_se,
    )


def _kl_integrand(p: float, b: float) -> float:
    g = b * (p - 1.0) - p + 2.0
    if g <= 0.0:
        return 0.0
    return math.exp(-p) * g * math.log(g)


def kl_uniform_vs_xhog(b: float, k: int | None = None) -> DivergenceReport:
    """KL divergence, per sample, between threshold-b and uniform sample laws.

    Integrates exp(-p) (b(p-1) - p + 2) log(b(p-1) - p + 2) over [0, 50] by
    adaptive quadrature (abs tol 1e-9; the integrand decays like poly * e^-p,
    so the truncated tail is below 1e-18).  Valid for 1 <= b <= 2, where the
    log argument stays positive.  The quadratic approximation (b-1)^2 / 2 and,
    when k is given, the Pinsker bound sqrt(k (b-1)^2 / 4) are filled in.
    """
    if not 1.0 <= b <= 2.0:
        raise DomainError(f"b must lie in [1, 2], got {b}")
    kl, _ = quad(_kl_integrand, 0.0, 50.0, args=(b,), epsabs=1e-9, limit=200)
    taylor = (b - 1.0) ** 2 / 2.0
    tv = math.sqrt(k * (b - 1.0) ** 2 / 4.0) if k is not None else None
    return DivergenceReport(b=b, kl=float(kl), taylor_approx=taylor, k=k, tv_bound=tv)


def empirical_distinguishability(
    b: float, k: int, trials: int, n: int, seed: int, depth: int = 20
) -> float:
    """Monte Carlo advantage of the likelihood-ratio test on k probability values.

    Per trial, one circuit is drawn; a uniform sample set and a fidelity
    b - 1 depolarizing sample set (whose per-sample mean sits at the XHOG
    level b/2^n) are scored, and the test declares "threshold-level" when the
    product of (b-1) x + (2-b) over the k rescaled values exceeds 1.  The
    densities assume the exponential output-probability model rather than the
    exact finite-n law.  Returns hit rate on threshold-level sets minus false
    alarm rate on uniform sets.
    """
    if not 1.0 <= b <= 2.0:
        raise DomainError(f"b must lie in [1, 2], got {b}")
    if trials < 1 or k < 1:
        raise ValueError("need trials >= 1 and k >= 1")
    dist = CircuitDistribution(n, depth)
    dim = 1 << n
    phi = b - 1.0
    hits = 0
    alarms = 0
    for i in range(trials):
        c = sample_circuit(dist, derive_u64(seed, i, 0))
        probs = full_distribution(c).probs
        uni = _mixture_sample(probs, n, 0.0, k, philox_rng(seed, i, 1), False)
        lvl = _mixture_sample(probs, n, phi, k, philox_rng(seed, i, 2), False)
        with np.errstate(divide="ignore"):
            llr_uni = np.sum(np.log((b - 1.0) * probs[uni.samples] * dim + (2.0 - b)))
            llr_lvl = np.sum(np.log((b - 1.0) * probs[lvl.samples] * dim + (2.0 - b)))
        alarms += bool(llr_uni > 0.0)
        hits += bool(llr_lvl > 0.0)
    return (hits - alarms) / trials
