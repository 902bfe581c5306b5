"""Lookup-table decoding and classical Pauli-frame bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

Syndrome = tuple[int, int, int]


@dataclass(frozen=True)
class LookupTable:
    """Map from a 3-bit syndrome to the 1-based data qubit to flip (None for 000)."""

    entries: dict

    def __getitem__(self, syndrome) -> Optional[int]:
        return self.entries[tuple(int(b) for b in syndrome)]


def membership_pattern(supports, qubit: int) -> Syndrome:
    """Which of the three check supports contain ``qubit`` (1-based)."""
    return tuple(int(qubit in s) for s in supports)


def build_lookup(code) -> LookupTable:
    """Single-qubit correction table derived from the code's check supports.

    The code is self-dual, so one table serves both error types.
    """
    entries: dict = {(0, 0, 0): None}
    for q in code.qubit_labels:
        pat = membership_pattern(code.supports, q)
        if pat in entries:
            raise AssertionError(f"syndrome {pat} is shared by qubit {q} and {entries[pat]}")
        entries[pat] = q
    if len(entries) != 8:
        raise AssertionError("lookup table does not cover all eight syndromes")
    return LookupTable(entries)


def decode(table: LookupTable, syndrome) -> Optional[int]:
    return table[syndrome]


@dataclass
class PauliFrame:
    """Pending logical X/Z corrections per block, kept classically."""

    x_flip: dict = field(default_factory=dict)
    z_flip: dict = field(default_factory=dict)

    def bits(self, block: int) -> tuple[int, int]:
        return self.x_flip.get(block, 0), self.z_flip.get(block, 0)

    def to_dict(self) -> dict:
        blocks = sorted(set(self.x_flip) | set(self.z_flip))
        return {str(b): {"x": self.x_flip.get(b, 0), "z": self.z_flip.get(b, 0)} for b in blocks}


def frame_update(frame: PauliFrame, block: int, pauli_kind: str, condition_bit: int) -> None:
    """XOR a conditional logical Pauli into the frame."""
    kind = pauli_kind.upper()
    if kind == "X":
        frame.x_flip[block] = frame.x_flip.get(block, 0) ^ (condition_bit & 1)
    elif kind == "Z":
        frame.z_flip[block] = frame.z_flip.get(block, 0) ^ (condition_bit & 1)
    else:
        raise ValueError(f"frame updates take X or Z, got {pauli_kind!r}")


def frame_adjust_readout(frame: PauliFrame, block: int, basis: str, logical_bit: int) -> int:
    """Reinterpret a logical readout through the frame.

    A pending X flips Z and Y outcomes, a pending Z flips X and Y outcomes.
    """
    x, z = frame.bits(block)
    basis = basis.upper()
    if basis == "Z":
        return logical_bit ^ x
    if basis == "X":
        return logical_bit ^ z
    if basis == "Y":
        return logical_bit ^ x ^ z
    raise ValueError(f"unknown basis {basis!r}")
