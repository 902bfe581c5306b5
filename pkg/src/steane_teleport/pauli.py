"""Signed n-qubit Pauli operators stored as a pair of bitmasks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

_LETTERS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_FROM_BITS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


def _phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Power of i picked up when multiplying P1 * P2 qubit-wise (mod 4)."""
    plus = (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2) | (x1 & z1 & ~x2 & z2)
    minus = (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2) | (x1 & z1 & x2 & ~z2)
    return (plus.bit_count() - minus.bit_count()) % 4


@dataclass(frozen=True)
class PauliString:
    """A Hermitian Pauli operator ``sign * P_0 (x) P_1 (x) ...``.

    Bit ``q`` of ``x_bits``/``z_bits`` describes qubit ``q`` (0-based);
    ``(1, 1)`` is Y.
    """

    num_qubits: int
    x_bits: int = 0
    z_bits: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        limit = 1 << self.num_qubits
        if not (0 <= self.x_bits < limit and 0 <= self.z_bits < limit):
            raise ValueError("Pauli bits exceed num_qubits")

    # construction -----------------------------------------------------

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls(num_qubits)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels such as ``"XIZ"``, ``"-ZZ"`` or ``"+Y"``; qubit 0 first."""
        sign = 1
        if label[:1] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        x = z = 0
        for q, ch in enumerate(label.upper()):
            try:
                bx, bz = _LETTERS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r}") from None
            x |= bx << q
            z |= bz << q
        return cls(len(label), x, z, sign)

    @classmethod
    def from_sparse(cls, num_qubits: int, ops: Mapping[int, str], sign: int = 1) -> "PauliString":
        """Build from ``{qubit: letter}``."""
        x = z = 0
        for q, ch in ops.items():
            if not 0 <= q < num_qubits:
                raise ValueError(f"qubit {q} out of range")
            bx, bz = _LETTERS[ch.upper()]
            x |= bx << q
            z |= bz << q
        return cls(num_qubits, x, z, sign)

    @classmethod
    def of_type(cls, num_qubits: int, letter: str, qubits: Iterable[int]) -> "PauliString":
        """The product of one letter over a set of qubits, e.g. ``Z_5 Z_6 Z_7``."""
        return cls.from_sparse(num_qubits, {q: letter for q in qubits})

    # queries ----------------------------------------------------------

    @property
    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x_bits | self.z_bits
        return tuple(q for q in range(self.num_qubits) if m >> q & 1)

    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def letter(self, q: int) -> str:
        return _FROM_BITS[(self.x_bits >> q & 1, self.z_bits >> q & 1)]

    def commutes_with(self, other: "PauliString") -> bool:
        self._check_size(other)
        return ((self.x_bits & other.z_bits) ^ (self.z_bits & other.x_bits)).bit_count() % 2 == 0

    # algebra ----------------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        self._check_size(other)
        k = _phase_exponent(self.x_bits, self.z_bits, other.x_bits, other.z_bits)
        if k % 2:
            raise ValueError(
                f"product {self} * {other} carries an imaginary phase; operands anticommute"
            )
        sign = self.sign * other.sign * (-1 if k == 2 else 1)
        return PauliString(self.num_qubits, self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits, sign)

    def __neg__(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x_bits, self.z_bits, -self.sign)

    def unsigned(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x_bits, self.z_bits, 1)

    def tensor(self, other: "PauliString") -> "PauliString":
        """``self (x) other``, with ``other`` on the higher qubit indices."""
        n = self.num_qubits
        return PauliString(
            n + other.num_qubits,
            self.x_bits | other.x_bits << n,
            self.z_bits | other.z_bits << n,
            self.sign * other.sign,
        )

    def embed(self, num_qubits: int, qubits: Iterable[int]) -> "PauliString":
        """Place this operator onto ``qubits`` of a larger register."""
        qubits = list(qubits)
        if len(qubits) != self.num_qubits:
            raise ValueError("qubit map length must equal num_qubits")
        x = z = 0
        for i, q in enumerate(qubits):
            x |= (self.x_bits >> i & 1) << q
            z |= (self.z_bits >> i & 1) << q
        return PauliString(num_qubits, x, z, self.sign)

    def _check_size(self, other: "PauliString") -> None:
        if self.num_qubits != other.num_qubits:
            raise ValueError(f"size mismatch: {self.num_qubits} vs {other.num_qubits}")

    def __str__(self) -> str:
        body = "".join(self.letter(q) for q in range(self.num_qubits))
        return ("+" if self.sign > 0 else "-") + body

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"
