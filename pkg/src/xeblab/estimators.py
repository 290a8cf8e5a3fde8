"""Probability estimators benchmarked by their MSE gain over the constant guess.

The benchmark objective for an estimator p of p0 = Pr[C outputs 0...0] is the
per-circuit gain X = (p0 - 2^-n)^2 - (p0 - p)^2, whose mean is how much mean
squared error the estimator shaves off the trivial estimate 1/2^n.  Gains are
reported in units of 2^-3n (``scaled_gain``), the natural scale for the
nontrivial-estimation advantage.

Three estimator families live here:

* the trivial and exact-oracle baselines,
* a Feynman-path amplitude sampler with several probability conversions,
* the solver reduction: randomize the target string with a NOT mask, ask an
  XHOG solver for heavy strings of the masked circuit, and bump the estimate
  to b/2^n exactly when the hidden string is among them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitDistribution, append_not_mask, sample_circuit
from .rng import derive_u64, philox_rng
from .samplers import SampleSet, _mixture_sample, sample_uniform, top_k_indices
from .simulator import full_distribution, output_probability
from .xeb import mean_probability

PATH_VARIANTS = ("shrunk", "unbiased", "raw")


@dataclass
class EstimatorTrial:
    """One benchmark trial: circuit seed, true p0, estimate p, gain X."""

    seed: int
    p0: float
    p: float
    gain: float
    solver_succeeded: bool | None = None


@dataclass
class MseBenchmark:
    """Aggregated trials: mean gain, its standard error, and the 2^3n scaling."""

    n: int
    trials: list[EstimatorTrial]
    mean_gain: float
    standard_error: float
    scaled_gain: float
    scaled_se: float
    solver_success_rate: float | None = None

    def to_text(self) -> str:
        lines = [
            f"n={self.n}",
            f"trials={len(self.trials)}",
            f"mean_gain={self.mean_gain!r}",
            f"standard_error={self.standard_error!r}",
            f"scaled_gain={self.scaled_gain!r}",
            f"scaled_se={self.scaled_se!r}",
            f"solver_success_rate="
            + ("" if self.solver_success_rate is None else repr(self.solver_success_rate)),
        ]
        return "\n".join(lines) + "\n"

    CSV_HEADER = "seed,p0,p,X"

    def to_csv(self) -> str:
        rows = [self.CSV_HEADER]
        rows.extend(
            f"{t.seed},{t.p0!r},{t.p!r},{t.gain!r}" for t in self.trials
        )
        return "\n".join(rows) + "\n"


def trivial_estimator(c: Circuit, rng=None) -> float:
    """The constant guess 1/2^n."""
    return 2.0 ** -c.n


def exact_estimator(c: Circuit, rng=None) -> float:
    """Oracle that returns p0 itself; realizes the maximal possible gain."""
    return output_probability(c, 0)


# --- Feynman paths -----------------------------------------------------------


def _layer_transition(layer, x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """<y|L|x> for a batch of basis-state pairs, factorized over qubits.

    Qubits untouched by the layer act as identity, so mismatched untouched
    bits kill the contribution.
    """
    t = np.ones(x.shape[0], dtype=np.complex128)
    touched = 0
    for g in layer:
        if g.kind == "U":
            q = g.qubits[0]
            touched |= 1 << q
            t = t * g.matrix[(y >> q) & 1, (x >> q) & 1]
        elif g.kind == "CZ":
            q1, q2 = g.qubits
            touched |= (1 << q1) | (1 << q2)
            b1 = (x >> q1) & 1
            b2 = (x >> q2) & 1
            same = (((y >> q1) & 1) == b1) & (((y >> q2) & 1) == b2)
            t = t * np.where(same, 1.0 - 2.0 * (b1 & b2), 0.0)
        else:  # X
            q = g.qubits[0]
            touched |= 1 << q
            t = t * (((y >> q) & 1) == (((x >> q) & 1) ^ 1))
    rest = ((1 << n) - 1) & ~touched
    if rest:
        t = t * ((x & rest) == (y & rest))
    return t


def _is_branching(layer) -> bool:
    return any(g.kind == "U" for g in layer)


def _det_step(layer, cur: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Push basis states through a CZ/X-only layer: phases and bit flips."""
    for g in layer:
        if g.kind == "CZ":
            q1, q2 = g.qubits
            w = w * (1.0 - 2.0 * ((cur >> q1) & (cur >> q2) & 1))
        else:  # X
            cur = cur ^ (1 << g.qubits[0])
    return cur, w


def path_slots(c: Circuit) -> int:
    """Number of free basis states a trajectory assigns for this circuit.

    Trajectories branch only at layers containing single-qubit unitaries;
    CZ layers are diagonal and X layers are permutations, so they propagate
    a basis state deterministically and are folded into the neighboring
    transitions.  With B branching layers there are B - 1 free slots (the
    input of the first and the output of the last are pinned by the circuit
    ends).
    """
    return max(sum(1 for layer in c.layers if _is_branching(layer)) - 1, 0)


def _path_weights(c: Circuit, traj: np.ndarray) -> np.ndarray:
    """Importance-weighted contributions of uniformly drawn trajectories.

    A trajectory assigns a basis state to each gap between branching layers;
    its weight is the product of transition amplitudes along the threaded
    states times the trajectory count 2^(n * slots), making every weight an
    unbiased estimate of the amplitude <0...0|C|0...0>.
    """
    n = c.n
    paths = traj.shape[0]
    branch = [_is_branching(layer) for layer in c.layers]
    B = sum(branch)
    w = np.ones(paths, dtype=np.complex128)
    cur = np.zeros(paths, dtype=np.int64)
    if B == 0:
        for layer in c.layers:
            cur, w = _det_step(layer, cur, w)
        return w * (cur == 0)
    last_branch = max(j for j, flag in enumerate(branch) if flag)
    pinned = 0
    for layer in c.layers[last_branch + 1 :]:
        for g in layer:
            if g.kind == "X":
                pinned ^= 1 << g.qubits[0]
    bi = 0
    for j, layer in enumerate(c.layers):
        if branch[j]:
            if bi < B - 1:
                y = traj[:, bi]
            else:
                y = np.full(paths, pinned, dtype=np.int64)
            w = w * _layer_transition(layer, cur, y, n)
            cur = y
            bi += 1
        else:
            cur, w = _det_step(layer, cur, w)
    return w * 2.0 ** (n * (B - 1))


def _path_weight_second_moment(c: Circuit) -> float:
    """Exact E|w|^2 over uniform trajectories for this circuit.

    |<y|L|x>|^2 factorizes per qubit for every gate kind here (CZ contributes
    a Kronecker delta, X a bit flip), so the expectation is a product of n
    independent two-state chains, costing O(layers * n).
    """
    chains = np.tile(np.eye(2), (c.n, 1, 1))
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    for layer in c.layers:
        for g in layer:
            if g.kind == "U":
                chains[g.qubits[0]] = np.abs(g.matrix) ** 2 @ chains[g.qubits[0]]
            elif g.kind == "X":
                chains[g.qubits[0]] = swap @ chains[g.qubits[0]]
            # CZ: |transition|^2 is the identity chain
    return 2.0 ** (c.n * path_slots(c)) * float(np.prod(chains[:, 0, 0]))


def feynman_path_amplitude(c: Circuit, paths: int, seed) -> complex:
    """Mean of ``paths`` sampled path contributions; unbiased for the amplitude."""
    if paths < 1:
        raise ValueError("need at least one path")
    rng = philox_rng(seed)
    traj = rng.integers(0, 1 << c.n, size=(paths, path_slots(c)), dtype=np.int64)
    return complex(_path_weights(c, traj).mean())


def feynman_path_estimator(
    c: Circuit, paths: int, seed, variant: str = "shrunk"
) -> float:
    """Probability estimate for p0 from ``paths`` sampled Feynman paths.

    Variants of the amplitude-to-probability conversion:

    * ``raw``: |a_hat|^2, biased upward by the sampling variance.
    * ``unbiased``: |a_hat|^2 minus the empirical variance over paths, an
      unbiased estimate of p0 for the given circuit.  Its own noise swamps
      the 2^-2n signal once circuits are more than a couple of layers deep,
      so its MSE gain goes negative.
    * ``shrunk`` (default): the unbiased estimate pulled toward 1/2^n with a
      deterministic weight t^2 / (t^2 + V), where t = 2^-n plays the role of
      the prior variance of p0 and V is the conversion noise implied by the
      exact per-circuit path-weight second moment.  The weight does not look
      at the sampled paths, so the gain stays nonnegative in expectation and
      decays geometrically as layers are added.
    """
    if variant not in PATH_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; pick from {PATH_VARIANTS}")
    if paths < 1:
        raise ValueError("need at least one path")
    rng = philox_rng(seed)
    n = c.n
    t = 2.0**-n
    slots = path_slots(c)
    traj = rng.integers(0, 1 << n, size=(paths, slots), dtype=np.int64)
    w = _path_weights(c, traj)
    if slots == 0:
        # single admissible trajectory: the weight is the amplitude itself
        return float(abs(w[0]) ** 2)
    ahat = complex(w.mean())
    raw = abs(ahat) ** 2
    if variant == "raw":
        return float(raw)
    var_w = max(_path_weight_second_moment(c) - t, 0.0)
    if paths > 1:
        s2 = float(np.sum(np.abs(w - ahat) ** 2)) / (paths - 1)
    else:
        s2 = var_w
    qhat = raw - s2 / paths
    if variant == "unbiased":
        return float(qhat)
    sig2 = var_w / paths
    vdet = 2.0 * t * sig2 + sig2 * sig2 * (1.0 + 2.0 / paths)
    lam = t * t / (t * t + vdet)
    return float(t + lam * (qhat - t))


@dataclass(frozen=True)
class FeynmanEstimator:
    """Benchmark adapter: fixed path budget and conversion variant."""

    paths: int
    variant: str = "shrunk"

    def __call__(self, c: Circuit, rng) -> float:
        return feynman_path_estimator(c, self.paths, rng, variant=self.variant)


# --- the solver reduction ----------------------------------------------------


@dataclass(frozen=True)
class TopKSolver:
    """Oracle XHOG solver: the k most probable strings, from exact simulation."""

    k: int

    def __call__(self, c: Circuit, rng, probs: np.ndarray | None = None) -> SampleSet:
        if probs is None:
            probs = full_distribution(c).probs
        return SampleSet(c.n, top_k_indices(probs, self.k), distinct=True)


@dataclass(frozen=True)
class UniformSolver:
    """Control solver that ignores the circuit: k distinct uniform strings."""

    k: int

    def __call__(self, c: Circuit, rng, probs: np.ndarray | None = None) -> SampleSet:
        return sample_uniform(c.n, self.k, rng, distinct=True)


@dataclass(frozen=True)
class DepolarizingSolver:
    """Simulated noisy device: k distinct samples at the given fidelity."""

    k: int
    fidelity: float

    def __call__(self, c: Circuit, rng, probs: np.ndarray | None = None) -> SampleSet:
        if probs is None:
            probs = full_distribution(c).probs
        return _mixture_sample(probs, c.n, self.fidelity, self.k, rng, distinct=True)


def reduction_estimator(c: Circuit, solver, b: float, seed) -> tuple[float, bool]:
    """Convert an XHOG solver into a probability estimator for p0.

    Draw a uniform string z, mask the circuit so that the original target
    amplitude now sits at z, run the solver on the masked circuit, and output
    b/2^n if z landed in the solver's samples, else 1/2^n.  Returns the
    estimate together with whether the solver's output actually met the XHOG
    threshold on this circuit; failed trials still count, the accounting is
    designed to absorb them.
    """
    rng = philox_rng(seed)
    n = c.n
    dim = 1 << n
    z = int(rng.integers(0, dim))
    masked = append_not_mask(c, z)
    probs = full_distribution(masked).probs
    found = solver(masked, rng, probs)
    if found.n != n:
        raise ValueError(f"solver returned n={found.n} samples for an n={n} circuit")
    hit = bool(np.any(found.samples == z))
    score = mean_probability(probs, found.samples)
    succeeded = bool(
        score * dim >= b and np.unique(found.samples).size == found.k
    )
    return (b / dim if hit else 1.0 / dim), succeeded


@dataclass(frozen=True)
class ReductionEstimator:
    """Benchmark adapter around ``reduction_estimator`` for a fixed solver."""

    solver: object
    b: float

    def __call__(self, c: Circuit, rng) -> tuple[float, bool]:
        return reduction_estimator(c, self.solver, self.b, rng)


# --- the benchmark loop ------------------------------------------------------


def _one_trial(dist: CircuitDistribution, estimator, seed: int, index: int) -> EstimatorTrial:
    cseed = derive_u64(seed, index, 0)
    rng = philox_rng(seed, index, 1)
    c = sample_circuit(dist, cseed)
    p0 = output_probability(c, 0)
    out = estimator(c, rng)
    succ = None
    if isinstance(out, tuple):
        out, succ = out
    p = float(out)
    t = 2.0**-dist.n
    gain = (p0 - t) ** 2 - (p0 - p) ** 2
    return EstimatorTrial(cseed, p0, p, gain, succ)


def _trial_range(args) -> list[EstimatorTrial]:
    dist, estimator, seed, lo, hi = args
    return [_one_trial(dist, estimator, seed, i) for i in range(lo, hi)]


def run_mse_benchmark(
    dist: CircuitDistribution,
    estimator,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MseBenchmark:
    """Benchmark an estimator over i.i.d. circuits from the ensemble.

    ``estimator`` is a callable (circuit, rng) -> p or (p, solver_succeeded);
    it must be picklable when workers > 1.  Trial i derives its own circuit
    seed and rng stream from (seed, i), so results are reproducible and
    independent of scheduling.
    """
    if trials < 2:
        raise ValueError("need at least two trials for a standard error")
    if workers > 1:
        bounds = np.linspace(0, trials, workers * 4 + 1).astype(int)
        chunks = [
            (dist, estimator, seed, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        results: list[EstimatorTrial] = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_trial_range, chunks):
                results.extend(part)
    else:
        results = _trial_range((dist, estimator, seed, 0, trials))

    gains = np.array([t.gain for t in results])
    mean_gain = math.fsum(gains) / trials
    se = float(gains.std(ddof=1)) / math.sqrt(trials)
    scale = 2.0 ** (3 * dist.n)
    flags = [t.solver_succeeded for t in results if t.solver_succeeded is not None]
    rate = (sum(flags) / len(flags)) if flags else None
    return MseBenchmark(
        n=dist.n,
        trials=results,
        mean_gain=mean_gain,
        standard_error=se,
        scaled_gain=mean_gain * scale,
        scaled_se=se * scale,
        solver_success_rate=rate,
    )
