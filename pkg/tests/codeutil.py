"""Brute-force helpers for the seven-qubit code, independent of the library decoder."""

from __future__ import annotations

from itertools import product

import numpy as np

from steane_teleport.pauli import PauliString

CHECKS = ((1, 3, 5, 7), (2, 3, 6, 7), (1, 2, 3, 4))
LOGICAL = (5, 6, 7)


def _mask(labels):
    return sum(1 << (q - 1) for q in labels)


CHECK_MASKS = [_mask(s) for s in CHECKS]
LOGICAL_MASK = _mask(LOGICAL)


def syndrome_of(mask: int) -> tuple[int, ...]:
    return tuple((mask & m).bit_count() & 1 for m in CHECK_MASKS)


def min_weight(syndrome, logical_flip: int) -> int:
    """Smallest weight of a one-type error with this syndrome and logical class."""
    best = 8
    for m in range(128):
        if syndrome_of(m) == tuple(syndrome) and ((m & LOGICAL_MASK).bit_count() & 1) == logical_flip:
            best = min(best, m.bit_count())
    return best


def op(n: int, letter: str, data, labels, sign: int = 1) -> PauliString:
    return PauliString.from_sparse(n, {data[q - 1]: letter for q in labels}, sign)


def signs(state, n: int, data):
    """Z-check signs, X-check signs, and the Z_L and X_L signs (None if random)."""
    z = [state.expectation(op(n, "Z", data, s)) for s in CHECKS]
    x = [state.expectation(op(n, "X", data, s)) for s in CHECKS]
    return z, x, state.expectation(op(n, "Z", data, LOGICAL)), state.expectation(op(n, "X", data, LOGICAL))


def bits(sign_list):
    return tuple(int(s == -1) for s in sign_list)


def code_states():
    """|0>_L and |1>_L as dense vectors from the stabilizer projector."""
    from oracle import StateVector, pauli_matrix

    dim = 128
    proj = np.eye(dim, dtype=complex)
    for s in CHECKS:
        for letter in "XZ":
            label = "".join(letter if q in s else "I" for q in range(1, 8))
            proj = proj @ (np.eye(dim) + pauli_matrix(label)) / 2
    zl = pauli_matrix("".join("Z" if q in LOGICAL else "I" for q in range(1, 8)))
    xl = pauli_matrix("".join("X" if q in LOGICAL else "I" for q in range(1, 8)))
    zero = proj @ ((np.eye(dim) + zl) / 2) @ np.eye(dim)[:, 0]
    # |0000000> has nonzero overlap with |0>_L
    zero = zero / np.linalg.norm(zero)
    return zero, xl @ zero, zl, xl


def all_single_paulis():
    for q, letter in product(range(1, 8), "XYZ"):
        yield q, letter
