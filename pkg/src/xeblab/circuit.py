"""Random circuits with exact invariance under appended NOT masks.

The ensemble alternates layers of independent Haar-random single-qubit
unitaries with layers of CZ gates on a rotating edge pattern of the chosen
topology; one unitary layer plus one CZ layer make a cycle, and depth is
counted in cycles.  When ``final_not_mask_layer`` is on, a uniformly random
X mask is appended as the last layer.  Appending further X gates XOR-folds
into that mask, so the ensemble is closed under the operation not just in
distribution but at the level of the circuit representation itself.

Circuits are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bits import as_index
from .errors import ConfigError, ParseError
from .rng import U64, philox_rng

GATE_KINDS = ("U", "CZ", "X")

_UNITARITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate: a 2x2 unitary, a CZ pair, or an X (NOT)."""

    kind: str
    qubits: tuple[int, ...]
    layer_index: int
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.layer_index < 0:
            raise ValueError("layer_index must be nonnegative")
        if self.kind == "U":
            if len(self.qubits) != 1 or self.matrix is None:
                raise ValueError("U gate needs one qubit and a 2x2 matrix")
            m = np.asarray(self.matrix, dtype=np.complex128)
            if m.shape != (2, 2):
                raise ValueError("U matrix must be 2x2")
            # max-entry norm of U^H U - I, via scalars (hot path)
            a, b = complex(m[0, 0]), complex(m[0, 1])
            c, d = complex(m[1, 0]), complex(m[1, 1])
            err = max(
                abs(a.real**2 + a.imag**2 + c.real**2 + c.imag**2 - 1.0),
                abs(b.real**2 + b.imag**2 + d.real**2 + d.imag**2 - 1.0),
                abs(a.conjugate() * b + c.conjugate() * d),
            )
            if err > _UNITARITY_TOL:
                raise ValueError(f"matrix not unitary (|U^H U - I| = {err:.3e})")
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)
        elif self.kind == "CZ":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError("CZ needs two distinct qubits")
            if self.matrix is not None:
                raise ValueError("CZ gate carries no matrix")
            object.__setattr__(self, "qubits", tuple(sorted(self.qubits)))
        else:  # X
            if len(self.qubits) != 1 or self.matrix is not None:
                raise ValueError("X gate needs one qubit and no matrix")

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.qubits, self.layer_index) != (
            other.kind,
            other.qubits,
            other.layer_index,
        ):
            return False
        if self.matrix is None:
            return other.matrix is None
        return other.matrix is not None and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gate layers over n qubits plus a seed provenance tag.

    Canonical form: gates in layer j all carry ``layer_index == j``, no qubit
    appears twice within a layer, and the last layer is nonempty (interior
    layers may be empty, e.g. a CZ edge class with no edges).
    """

    n: int
    layers: tuple[tuple[Gate, ...], ...]
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one qubit")
        object.__setattr__(
            self, "layers", tuple(tuple(layer) for layer in self.layers)
        )
        object.__setattr__(self, "seed", int(self.seed) & U64)
        if self.layers and not self.layers[-1]:
            raise ValueError("trailing empty layer (canonicalize first)")
        for j, layer in enumerate(self.layers):
            used = set()
            for g in layer:
                if g.layer_index != j:
                    raise ValueError(
                        f"gate layer_index {g.layer_index} placed at layer {j}"
                    )
                for q in g.qubits:
                    if not 0 <= q < self.n:
                        raise ValueError(f"qubit {q} out of range for n={self.n}")
                    if q in used:
                        raise ValueError(f"qubit {q} used twice in layer {j}")
                    used.add(q)

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.n == other.n
            and self.seed == other.seed
            and len(self.layers) == len(other.layers)
            and all(
                len(a) == len(b) and all(x == y for x, y in zip(a, b))
                for a, b in zip(self.layers, other.layers)
            )
        )

    __hash__ = None


@dataclass(frozen=True)
class Chain1D:
    """Line of n qubits; CZ edges split into even and odd classes."""

    def validate(self, n: int) -> None:
        pass

    def edge_classes(self, n: int) -> list[list[tuple[int, int]]]:
        return [
            [(i, i + 1) for i in range(0, n - 1, 2)],
            [(i, i + 1) for i in range(1, n - 1, 2)],
        ]


@dataclass(frozen=True)
class Grid2D:
    """rows x cols lattice, row-major qubit order; four CZ edge classes."""

    rows: int
    cols: int

    def validate(self, n: int) -> None:
        if self.rows < 1 or self.cols < 1 or self.rows * self.cols != n:
            raise ConfigError(
                f"Grid2D({self.rows}, {self.cols}) does not tile {n} qubits"
            )

    def edge_classes(self, n: int) -> list[list[tuple[int, int]]]:
        def q(r, c):
            return r * self.cols + c

        horiz = lambda parity: [
            (q(r, c), q(r, c + 1))
            for r in range(self.rows)
            for c in range(parity, self.cols - 1, 2)
        ]
        vert = lambda parity: [
            (q(r, c), q(r + 1, c))
            for r in range(parity, self.rows - 1, 2)
            for c in range(self.cols)
        ]
        return [horiz(0), vert(0), horiz(1), vert(1)]


@dataclass(frozen=True)
class CircuitDistribution:
    """The circuit ensemble: n qubits, depth, topology, final mask flag.

    ``depth`` counts cycles; each cycle contributes one layer of Haar-random
    single-qubit unitaries followed by one layer of CZ gates, so a circuit
    carries 2 * depth alternating gate layers.  The random NOT mask, when
    enabled, is appended after them and is what makes the ensemble exactly
    invariant under ``append_not_mask``; it is never counted in ``depth``.
    """

    n: int
    depth: int
    topology: "Chain1D | Grid2D" = field(default_factory=Chain1D)
    final_not_mask_layer: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("need at least one qubit")
        if self.depth < 0:
            raise ConfigError("depth must be nonnegative")
        self.topology.validate(self.n)


def haar_unitaries(rng: np.random.Generator, count: int) -> np.ndarray:
    """(count, 2, 2) independent Haar-random unitaries.

    Each is two complex Gaussian columns orthonormalized by Gram-Schmidt;
    the positive-real normalization constants fix the phase gauge, which is
    exactly the QR-with-positive-diagonal construction of Haar measure.
    """
    z = rng.standard_normal((count, 2, 2)) + 1j * rng.standard_normal((count, 2, 2))
    c0 = z[:, :, 0]
    v0 = c0 / np.linalg.norm(c0, axis=1, keepdims=True)
    c1 = z[:, :, 1]
    proj = np.sum(v0.conj() * c1, axis=1, keepdims=True)
    w = c1 - proj * v0
    v1 = w / np.linalg.norm(w, axis=1, keepdims=True)
    return np.stack([v0, v1], axis=2)


def _x_layer(mask: int, n: int, layer_index: int) -> tuple[Gate, ...]:
    return tuple(
        Gate("X", (q,), layer_index) for q in range(n) if (mask >> q) & 1
    )


def _trim_trailing_empty(layers: list[tuple[Gate, ...]]) -> list[tuple[Gate, ...]]:
    while layers and not layers[-1]:
        layers.pop()
    return layers


def _reindex(layer: tuple[Gate, ...], layer_index: int) -> tuple[Gate, ...]:
    return tuple(
        Gate(g.kind, g.qubits, layer_index, g.matrix) for g in layer
    )


def _assemble(gate_layers: list[tuple[Gate, ...]], mask: int, n: int, seed: int) -> Circuit:
    """Canonical circuit: trimmed gate layers plus the mask layer iff mask != 0."""
    layers = _trim_trailing_empty(list(gate_layers))
    if mask:
        layers.append(_x_layer(mask, n, len(layers)))
    return Circuit(n, tuple(layers), seed=seed)


def final_not_mask(c: Circuit) -> tuple[int, bool]:
    """(mask, present): the XOR mask of a final all-X layer, or (0, False)."""
    if not c.layers:
        return 0, False
    last = c.layers[-1]
    if not all(g.kind == "X" for g in last):
        return 0, False
    mask = 0
    for g in last:
        mask |= 1 << g.qubits[0]
    return mask, True


def sample_circuit(dist: CircuitDistribution, seed: "int | np.random.Generator") -> Circuit:
    """Draw one circuit from the ensemble; a pure function of (dist, seed).

    Cycle j emits a layer of fresh Haar-random single-qubit unitaries on
    every qubit, then a layer of CZs on edge class j mod (number of nonempty
    classes), so odd-numbered gate layers (1-based) are single-qubit and
    even-numbered ones are two-qubit.  The optional NOT mask is drawn last,
    on a uniformly random qubit subset.
    """
    rng = philox_rng(seed)
    n = dist.n
    classes = [cls for cls in dist.topology.edge_classes(n) if cls]
    layers: list[tuple[Gate, ...]] = []
    for j in range(dist.depth):
        li = 2 * j
        mats = haar_unitaries(rng, n)
        layers.append(tuple(Gate("U", (q,), li, mats[q]) for q in range(n)))
        pairs = classes[j % len(classes)] if classes else []
        layers.append(tuple(Gate("CZ", pair, li + 1) for pair in pairs))
    mask = 0
    if dist.final_not_mask_layer:
        mask = int(rng.integers(0, 1 << n, dtype=np.uint64))
    tag = seed if isinstance(seed, int) else 0
    return _assemble(layers, mask, n, seed=tag)


def append_not_mask(c: Circuit, z: "int | str") -> Circuit:
    """Append X gates on the set bits of z, XOR-folding into an existing mask.

    With z = 0 the circuit is returned unchanged.  If the final layer is
    already an all-X mask layer the two masks combine, and a cancelled mask
    layer is removed entirely, so the canonical form is stable under repeated
    application: appending z twice gives back the original circuit.
    """
    zi = as_index(z, c.n)
    if zi == 0:
        return c
    mask, present = final_not_mask(c)
    gate_layers = list(c.layers[:-1] if present else c.layers)
    return _assemble(gate_layers, mask ^ zi, c.n, seed=c.seed)


# --- text format ------------------------------------------------------------
#
# line 1: qubits <n>
# line 2: seed <u64>
# then one line per gate, whitespace separated, '#' starts a comment:
#   <layer> U  <qubit> <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>
#   <layer> CZ <q1> <q2>
#   <layer> X  <qubit>


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def serialize_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.n}", f"seed {c.seed}"]
    for layer in c.layers:
        for g in layer:
            if g.kind == "U":
                entries = " ".join(
                    f"{_fmt(v.real)} {_fmt(v.imag)}" for v in g.matrix.reshape(-1)
                )
                lines.append(f"{g.layer_index} U {g.qubits[0]} {entries}")
            elif g.kind == "CZ":
                lines.append(f"{g.layer_index} CZ {g.qubits[0]} {g.qubits[1]}")
            else:
                lines.append(f"{g.layer_index} X {g.qubits[0]}")
    return "\n".join(lines) + "\n"


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(lineno, f"bad {what}: {tok!r}") from None


def _parse_float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(lineno, f"bad float: {tok!r}") from None


def parse_circuit(text: str) -> Circuit:
    """Inverse of serialize_circuit; errors name the offending line."""
    data: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            data.append((lineno, body.split()))

    if not data or data[0][1][0] != "qubits" or len(data[0][1]) != 2:
        lineno = data[0][0] if data else 1
        raise ParseError(lineno, "expected header 'qubits <n>'")
    n = _parse_int(data[0][1][1], data[0][0], "qubit count")
    if n < 1:
        raise ParseError(data[0][0], f"qubit count must be positive, got {n}")
    if len(data) < 2 or data[1][1][0] != "seed" or len(data[1][1]) != 2:
        lineno = data[1][0] if len(data) > 1 else data[0][0]
        raise ParseError(lineno, "expected header 'seed <u64>'")
    seed = _parse_int(data[1][1][1], data[1][0], "seed")
    if not 0 <= seed <= U64:
        raise ParseError(data[1][0], f"seed out of 64-bit range: {seed}")

    by_layer: dict[int, list[Gate]] = {}
    claimed: dict[tuple[int, int], int] = {}
    for lineno, toks in data[2:]:
        layer = _parse_int(toks[0], lineno, "layer index")
        if layer < 0:
            raise ParseError(lineno, f"negative layer index {layer}")
        kind = toks[1] if len(toks) > 1 else ""
        try:
            if kind == "U":
                if len(toks) != 11:
                    raise ParseError(lineno, "U line needs qubit + 8 floats")
                q = _parse_int(toks[2], lineno, "qubit")
                vals = [_parse_float(t, lineno) for t in toks[3:11]]
                m = np.array(
                    [
                        [complex(vals[0], vals[1]), complex(vals[2], vals[3])],
                        [complex(vals[4], vals[5]), complex(vals[6], vals[7])],
                    ]
                )
                gate = Gate("U", (q,), layer, m)
            elif kind == "CZ":
                if len(toks) != 4:
                    raise ParseError(lineno, "CZ line needs two qubits")
                q1 = _parse_int(toks[2], lineno, "qubit")
                q2 = _parse_int(toks[3], lineno, "qubit")
                gate = Gate("CZ", (q1, q2), layer)
            elif kind == "X":
                if len(toks) != 3:
                    raise ParseError(lineno, "X line needs one qubit")
                gate = Gate("X", (_parse_int(toks[2], lineno, "qubit"),), layer)
            else:
                raise ParseError(lineno, f"unknown gate kind {kind!r}")
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(lineno, str(exc)) from None
        for q in gate.qubits:
            if q >= n:
                raise ParseError(lineno, f"qubit {q} out of range for n={n}")
            key = (layer, q)
            if key in claimed:
                raise ParseError(
                    lineno, f"qubit {q} already used in layer {layer} (line {claimed[key]})"
                )
            claimed[key] = lineno
        by_layer.setdefault(layer, []).append(gate)

    depth = max(by_layer) + 1 if by_layer else 0
    layers = tuple(tuple(by_layer.get(j, ())) for j in range(depth))
    return Circuit(n, layers, seed=seed)
