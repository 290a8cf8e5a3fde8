"""Bitstring and index conventions.

Basis state ``|i>`` puts qubit 0 at the least significant bit of ``i``.
Text bitstrings are written most significant qubit first, so index 2 at
n=2 prints as ``"10"`` (qubit 1 set, qubit 0 clear).
"""

from __future__ import annotations


def bits_to_index(bits: str) -> int:
    """Parse an msb-first bitstring into a basis-state index."""
    if not bits or any(ch not in "01" for ch in bits):
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def index_to_bits(index: int, n: int) -> str:
    """Render a basis-state index as an msb-first bitstring of length n."""
    if not 0 <= index < (1 << n):
        raise ValueError(f"index {index} out of range for {n} qubits")
    return format(index, f"0{n}b")


def as_index(z: "int | str", n: int) -> int:
    """Normalize an output string (int index or text bitstring) to an index."""
    if isinstance(z, str):
        if len(z) != n:
            raise ValueError(f"bitstring length {len(z)} does not match n={n}")
        return bits_to_index(z)
    z = int(z)
    if not 0 <= z < (1 << n):
        raise ValueError(f"index {z} out of range for {n} qubits")
    return z
