"""Exact statevector simulation for the circuit gate set.

Dense complex128 amplitudes, updated in place.  The single-qubit kernel
touches each amplitude pair (i, i ^ 2^q) once per gate, CZ flips signs in
place, and X swaps the two half-slices of its qubit axis.  Memory is the
only hard wall: 2^n * 16 bytes, capped at DEFAULT_MAX_QUBITS unless the
caller raises the limit explicitly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .bits import as_index
from .circuit import Circuit
from .errors import ResourceLimitError

DEFAULT_MAX_QUBITS = 22

_NORM_TOL = 1e-9


@dataclass
class StateVector:
    """2^n complex amplitudes; index i is basis state |i>, qubit 0 = LSB."""

    n: int
    amps: np.ndarray

    def amplitude(self, z: "int | str") -> complex:
        return complex(self.amps[as_index(z, self.n)])

    def norm_error(self) -> float:
        return abs(float(np.sum(np.abs(self.amps) ** 2)) - 1.0)


@dataclass
class OutputDistribution:
    """2^n output probabilities |amps|^2 for the same index convention."""

    n: int
    probs: np.ndarray


def _apply_u(amps: np.ndarray, q: int, u: np.ndarray) -> None:
    # axes: (higher bits, bit q, lower bits); one copy for the 0-branch
    v = amps.reshape(-1, 2, 1 << q)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    v[:, 1, :] = u[1, 0] * a + u[1, 1] * b


def _apply_cz(amps: np.ndarray, q1: int, q2: int) -> None:
    hi, lo = max(q1, q2), min(q1, q2)
    v = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    v[:, 1, :, 1, :] *= -1.0


def _apply_x(amps: np.ndarray, q: int) -> None:
    v = amps.reshape(-1, 2, 1 << q)
    tmp = v[:, 0, :].copy()
    v[:, 0, :] = v[:, 1, :]
    v[:, 1, :] = tmp


def simulate(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Statevector of C applied to |0...0>."""
    if c.n > max_qubits:
        need = (1 << c.n) * 16 / (1 << 20)
        raise ResourceLimitError(
            f"n={c.n} needs {need:.0f} MiB of amplitudes; cap is {max_qubits} "
            f"qubits (pass max_qubits to override)"
        )
    amps = np.zeros(1 << c.n, dtype=np.complex128)
    amps[0] = 1.0
    for layer in c.layers:
        for g in layer:
            if g.kind == "U":
                _apply_u(amps, g.qubits[0], g.matrix)
            elif g.kind == "CZ":
                _apply_cz(amps, g.qubits[0], g.qubits[1])
            else:
                _apply_x(amps, g.qubits[0])
    sv = StateVector(c.n, amps)
    assert sv.norm_error() < _NORM_TOL, "statevector norm drifted"
    return sv


def amplitude(c: Circuit, z: "int | str", max_qubits: int = DEFAULT_MAX_QUBITS) -> complex:
    """<z|C|0...0>."""
    return simulate(c, max_qubits=max_qubits).amplitude(z)


def output_probability(c: Circuit, z: "int | str", max_qubits: int = DEFAULT_MAX_QUBITS) -> float:
    """Pr[C outputs z], i.e. |<z|C|0...0>|^2."""
    return abs(amplitude(c, z, max_qubits=max_qubits)) ** 2


def full_distribution(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> OutputDistribution:
    """All 2^n output probabilities of C."""
    sv = simulate(c, max_qubits=max_qubits)
    return OutputDistribution(c.n, np.abs(sv.amps) ** 2)


# --- binary export: 8-byte little-endian header (n) + 2^n little-endian f64 --


def write_distribution(dist: OutputDistribution, path) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", dist.n))
        fh.write(dist.probs.astype("<f8", copy=False).tobytes())


def read_distribution(path) -> OutputDistribution:
    with open(path, "rb") as fh:
        header = fh.read(8)
        if len(header) != 8:
            raise ValueError("truncated distribution file")
        n = struct.unpack("<Q", header)[0]
        probs = np.frombuffer(fh.read(), dtype="<f8")
    if probs.size != 1 << n:
        raise ValueError(f"expected {1 << n} probabilities, found {probs.size}")
    return OutputDistribution(int(n), probs.astype(np.float64))
