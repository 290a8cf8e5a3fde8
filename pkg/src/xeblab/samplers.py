"""Sample generators: ideal device, uniform noise, depolarizing mixture, top-k spoofer.

All samplers consume the exact 2^n output distribution; they exist to build
ground-truth experiments, not to be classically cheap.  Each is a pure
function of its inputs and seed.  The three stochastic samplers share one
draw loop, so the depolarizing mixture degenerates bit-for-bit to the ideal
sampler at fidelity 1 and to the uniform sampler at fidelity 0 under the
same seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import index_to_bits, bits_to_index
from .circuit import Circuit
from .errors import ParseError
from .rng import philox_rng
from .simulator import full_distribution

_MAX_REJECTION_ROUNDS = 100_000


@dataclass
class SampleSet:
    """k ordered n-bit samples; ``distinct`` records whether dedup was enforced."""

    n: int
    samples: np.ndarray
    distinct: bool

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.int64)
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("need at least one sample")
        if self.samples.min() < 0 or self.samples.max() >= (1 << self.n):
            raise ValueError(f"sample out of range for n={self.n}")
        if self.distinct and np.unique(self.samples).size != self.samples.size:
            raise ValueError("samples marked distinct but contain duplicates")

    @property
    def k(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing mixture: each sample is ideal with probability ``fidelity``."""

    fidelity: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.fidelity <= 1.0:
            raise ValueError(f"fidelity must lie in [0, 1], got {self.fidelity}")


def _as_fidelity(noise: "float | NoiseModel") -> float:
    if isinstance(noise, NoiseModel):
        return noise.fidelity
    return NoiseModel(float(noise)).fidelity


def _mixture_sample(
    probs: np.ndarray | None,
    n: int,
    phi: float,
    k: int,
    seed,
    distinct: bool,
) -> SampleSet:
    """k draws, each ideal (inverse-CDF over probs) w.p. phi, else uniform.

    Dedup is rejection resampling: duplicates are thrown away and redrawn, so
    the marginal law of each retained sample stays close to the target when
    k << 2^n.  One rng stream supplies a coin block then a value block per
    round regardless of phi, which is what makes phi=1 and phi=0 reproduce
    the pure samplers draw-for-draw.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    dim = 1 << n
    if distinct and k > dim:
        raise ValueError(f"cannot draw {k} distinct samples from {dim} strings")
    rng = philox_rng(seed)
    cdf = np.cumsum(probs) if probs is not None else None

    out = np.empty(k, dtype=np.int64)
    filled = 0
    seen: set[int] = set()
    for _ in range(_MAX_REJECTION_ROUNDS):
        need = k - filled
        coins = rng.random(need)
        values = rng.random(need)
        uniform_cand = np.minimum((values * dim).astype(np.int64), dim - 1)
        if cdf is None:
            cand = uniform_cand
        else:
            ideal_cand = np.minimum(
                np.searchsorted(cdf, values, side="right"), dim - 1
            ).astype(np.int64)
            cand = np.where(coins < phi, ideal_cand, uniform_cand)
        if not distinct:
            out[filled : filled + need] = cand
            filled = k
        else:
            for v in cand:
                iv = int(v)
                if iv not in seen:
                    seen.add(iv)
                    out[filled] = iv
                    filled += 1
        if filled == k:
            break
    else:
        raise RuntimeError(
            f"could not draw {k} distinct samples; distribution support too small"
        )
    return SampleSet(n, out, distinct)


def sample_ideal(c: Circuit, k: int, seed, distinct: bool = True) -> SampleSet:
    """k samples from the exact output distribution of c."""
    probs = full_distribution(c).probs
    return _mixture_sample(probs, c.n, 1.0, k, seed, distinct)


def sample_uniform(n: int, k: int, seed, distinct: bool = True) -> SampleSet:
    """k samples uniform over the 2^n strings."""
    return _mixture_sample(None, n, 0.0, k, seed, distinct)


def sample_depolarizing(
    c: Circuit, noise: "float | NoiseModel", k: int, seed, distinct: bool = True
) -> SampleSet:
    """k samples, each independently ideal with probability phi, else uniform."""
    phi = _as_fidelity(noise)
    probs = full_distribution(c).probs
    return _mixture_sample(probs, c.n, phi, k, seed, distinct)


def top_k_indices(probs: np.ndarray, k: int) -> np.ndarray:
    """The k highest-probability indices, ties broken by ascending index."""
    if not 1 <= k <= probs.size:
        raise ValueError(f"k={k} out of range for {probs.size} strings")
    return np.argsort(-probs, kind="stable")[:k].astype(np.int64)


def sample_top_k(c: Circuit, k: int) -> SampleSet:
    """Greedy spoofer: the k most likely strings under the exact distribution."""
    probs = full_distribution(c).probs
    return SampleSet(c.n, top_k_indices(probs, k), distinct=True)


# --- text format: "n <n> k <k> distinct <0|1>", then one bitstring per line --


def serialize_samples(s: SampleSet) -> str:
    lines = [f"n {s.n} k {s.k} distinct {1 if s.distinct else 0}"]
    lines.extend(index_to_bits(int(v), s.n) for v in s.samples)
    return "\n".join(lines) + "\n"


def parse_samples(text: str) -> SampleSet:
    rows: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            rows.append((lineno, body))
    if not rows:
        raise ParseError(1, "empty sample file")
    lineno, header = rows[0]
    toks = header.split()
    if len(toks) != 6 or toks[0] != "n" or toks[2] != "k" or toks[4] != "distinct":
        raise ParseError(lineno, "expected header 'n <n> k <k> distinct <0|1>'")
    try:
        n, k, dflag = int(toks[1]), int(toks[3]), int(toks[5])
    except ValueError:
        raise ParseError(lineno, f"bad header numbers: {header!r}") from None
    if dflag not in (0, 1):
        raise ParseError(lineno, "distinct flag must be 0 or 1")
    if len(rows) - 1 != k:
        raise ParseError(lineno, f"header says k={k} but file has {len(rows) - 1} samples")
    samples = np.empty(k, dtype=np.int64)
    for i, (ln, body) in enumerate(rows[1:]):
        if len(body) != n or any(ch not in "01" for ch in body):
            raise ParseError(ln, f"bad {n}-bit string: {body!r}")
        samples[i] = bits_to_index(body)
    return SampleSet(n, samples, bool(dflag))
