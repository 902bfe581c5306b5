"""Aaronson-Gottesman stabilizer tableau with bit-packed rows.

The tableau is one ``uint64`` array of shape ``(2n + 1, 2W + 1)`` where
``W = ceil(n / 64)``: columns ``[0, W)`` hold the X bits of a row,
``[W, 2W)`` the Z bits and the last column the sign bit.  Rows ``0..n-1``
are destabilizers, ``n..2n-1`` stabilizers and row ``2n`` is scratch space.
The kernels below are compiled with numba; every row operation is a
word-wide XOR.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .pauli import PauliString

_ONE = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def _popcount(v):
    v = v - ((v >> np.uint64(1)) & _M1)
    v = (v & _M2) + ((v >> np.uint64(2)) & _M2)
    v = (v + (v >> np.uint64(4))) & _M4
    return (v * _H01) >> np.uint64(56)


@njit(cache=True, inline="always")
def _mask(q):
    return _ONE << np.uint64(q & 63)


@njit(cache=True)
def k_h(T, q):
    W = (T.shape[1] - 1) // 2
    w = q >> 6
    b = _mask(q)
    s = 2 * W
    for i in range(T.shape[0] - 1):
        x = T[i, w] & b
        z = T[i, W + w] & b
        if x != 0 and z != 0:
            T[i, s] ^= _ONE
        if (x != 0) != (z != 0):
            T[i, w] ^= b
            T[i, W + w] ^= b


@njit(cache=True)
def k_s(T, q):
    W = (T.shape[1] - 1) // 2
    w = q >> 6
    b = _mask(q)
    s = 2 * W
    for i in range(T.shape[0] - 1):
        if T[i, w] & b:
            if T[i, W + w] & b:
                T[i, s] ^= _ONE
            T[i, W + w] ^= b


@njit(cache=True)
def k_sdg(T, q):
    W = (T.shape[1] - 1) // 2
    w = q >> 6
    b = _mask(q)
    s = 2 * W
    for i in range(T.shape[0] - 1):
        if T[i, w] & b:
            if not (T[i, W + w] & b):
                T[i, s] ^= _ONE
            T[i, W + w] ^= b


@njit(cache=True)
def k_pauli1(T, q, xbit, zbit):
    """Conjugate by a single-qubit Pauli given as (x, z) bits."""
    W = (T.shape[1] - 1) // 2
    w = q >> 6
    b = _mask(q)
    s = 2 * W
    for i in range(T.shape[0] - 1):
        flip = 0
        if xbit and (T[i, W + w] & b):
            flip ^= 1
        if zbit and (T[i, w] & b):
            flip ^= 1
        if flip:
            T[i, s] ^= _ONE


@njit(cache=True)
def k_cx(T, c, t):
    W = (T.shape[1] - 1) // 2
    wc = c >> 6
    bc = _mask(c)
    wt = t >> 6
    bt = _mask(t)
    s = 2 * W
    for i in range(T.shape[0] - 1):
        xc = (T[i, wc] & bc) != 0
        zc = (T[i, W + wc] & bc) != 0
        xt = (T[i, wt] & bt) != 0
        zt = (T[i, W + wt] & bt) != 0
        if xc and zt and (xt == zc):
            T[i, s] ^= _ONE
        if xc:
            T[i, wt] ^= bt
        if zt:
            T[i, W + wc] ^= bc


@njit(cache=True)
def k_cz(T, a, c):
    W = (T.shape[1] - 1) // 2
    wa = a >> 6
    ba = _mask(a)
    wc = c >> 6
    bc = _mask(c)
    s = 2 * W
    for i in range(T.shape[0] - 1):
        xa = (T[i, wa] & ba) != 0
        za = (T[i, W + wa] & ba) != 0
        xc = (T[i, wc] & bc) != 0
        zc = (T[i, W + wc] & bc) != 0
        if xa and xc and (za != zc):
            T[i, s] ^= _ONE
        if xc:
            T[i, W + wa] ^= ba
        if xa:
            T[i, W + wc] ^= bc


@njit(cache=True)
def k_rowsum(T, h, i):
    """Row h <- row i * row h.  Returns 0, or 1 if an imaginary phase appeared."""
    W = (T.shape[1] - 1) // 2
    g = 0
    for w in range(W):
        x1 = T[i, w]
        z1 = T[i, W + w]
        x2 = T[h, w]
        z2 = T[h, W + w]
        plus = (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2) | (x1 & z1 & ~x2 & z2)
        minus = (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2) | (x1 & z1 & x2 & ~z2)
        g += np.int64(_popcount(plus)) - np.int64(_popcount(minus))
        T[h, w] = x1 ^ x2
        T[h, W + w] = z1 ^ z2
    total = (2 * np.int64(T[h, 2 * W]) + 2 * np.int64(T[i, 2 * W]) + g) % 4
    T[h, 2 * W] = np.uint64(1) if total == 2 else np.uint64(0)
    return total & 1


@njit(cache=True)
def k_pivot(T, n, q):
    """First stabilizer row with an X or Y on qubit q, or -1."""
    w = q >> 6
    b = _mask(q)
    for p in range(n, 2 * n):
        if T[p, w] & b:
            return p
    return -1


@njit(cache=True)
def k_collapse(T, n, q, p, outcome):
    W = (T.shape[1] - 1) // 2
    w = q >> 6
    b = _mask(q)
    bad = 0
    for i in range(2 * n):
        if i != p and (T[i, w] & b):
            # destabilizer phases carry no meaning, only stabilizer rows must stay real
            ph = k_rowsum(T, i, p)
            if i >= n:
                bad |= ph
    for c in range(2 * W + 1):
        T[p - n, c] = T[p, c]
        T[p, c] = np.uint64(0)
    T[p, W + w] = b
    T[p, 2 * W] = np.uint64(outcome)
    return bad


@njit(cache=True)
def k_deterministic(T, n, q):
    W = (T.shape[1] - 1) // 2
    w = q >> 6
    b = _mask(q)
    scratch = 2 * n
    for c in range(2 * W + 1):
        T[scratch, c] = np.uint64(0)
    for i in range(n):
        if T[i, w] & b:
            k_rowsum(T, scratch, i + n)
    return np.int64(T[scratch, 2 * W])


@njit(cache=True)
def _anticommutes(T, row, px, pz):
    W = (T.shape[1] - 1) // 2
    acc = np.uint64(0)
    for w in range(W):
        acc ^= (T[row, w] & pz[w]) ^ (T[row, W + w] & px[w])
    return _popcount(acc) & _ONE


@njit(cache=True)
def k_expectation(T, n, px, pz, psign):
    """+1 / -1 if +-P is in the stabilizer group, 0 if indeterminate,
    2 if the tableau is inconsistent (should not happen for a pure state)."""
    W = (T.shape[1] - 1) // 2
    for i in range(n, 2 * n):
        if _anticommutes(T, i, px, pz):
            return 0
    scratch = 2 * n
    for c in range(2 * W + 1):
        T[scratch, c] = np.uint64(0)
    for i in range(n):
        if _anticommutes(T, i, px, pz):
            k_rowsum(T, scratch, i + n)
    for w in range(W):
        if T[scratch, w] != px[w] or T[scratch, W + w] != pz[w]:
            return 2
    return 1 if np.int64(T[scratch, 2 * W]) == psign else -1


@njit(cache=True)
def k_apply_pauli(T, n, px, pz):
    W = (T.shape[1] - 1) // 2
    for i in range(2 * n):
        if _anticommutes(T, i, px, pz):
            T[i, 2 * W] ^= _ONE


def _words(bits: int, W: int) -> np.ndarray:
    return np.array([(bits >> (64 * w)) & 0xFFFFFFFFFFFFFFFF for w in range(W)], dtype=np.uint64)


def _from_words(words) -> int:
    out = 0
    for w, v in enumerate(words):
        out |= int(v) << (64 * w)
    return out


class StabilizerState:
    """A pure n-qubit stabilizer state plus a named classical register.

    ``bits`` maps ``(label, instance)`` keys to recorded classical outcomes.
    """

    def __init__(self, num_qubits: int):
        if num_qubits < 1:
            raise ValueError("need at least one qubit")
        n = num_qubits
        W = (n + 63) // 64
        T = np.zeros((2 * n + 1, 2 * W + 1), dtype=np.uint64)
        for q in range(n):
            T[q, q >> 6] |= np.uint64(1) << np.uint64(q & 63)  # destabilizer X_q
            T[n + q, W + (q >> 6)] |= np.uint64(1) << np.uint64(q & 63)  # stabilizer Z_q
        self.num_qubits = n
        self.words = W
        self.tableau = T
        self.bits: dict = {}

    def copy(self) -> "StabilizerState":
        other = StabilizerState.__new__(StabilizerState)
        other.num_qubits = self.num_qubits
        other.words = self.words
        other.tableau = self.tableau.copy()
        other.bits = dict(self.bits)
        return other

    # gates ------------------------------------------------------------

    def _check(self, *qubits: int) -> None:
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise IndexError(f"qubit {q} out of range for {self.num_qubits} qubits")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in {qubits}")

    def h(self, q: int) -> None:
        self._check(q)
        k_h(self.tableau, q)

    def s(self, q: int) -> None:
        self._check(q)
        k_s(self.tableau, q)

    def sdg(self, q: int) -> None:
        self._check(q)
        k_sdg(self.tableau, q)

    def x(self, q: int) -> None:
        self._check(q)
        k_pauli1(self.tableau, q, 1, 0)

    def y(self, q: int) -> None:
        self._check(q)
        k_pauli1(self.tableau, q, 1, 1)

    def z(self, q: int) -> None:
        self._check(q)
        k_pauli1(self.tableau, q, 0, 1)

    def cx(self, c: int, t: int) -> None:
        self._check(c, t)
        k_cx(self.tableau, c, t)

    def cz(self, a: int, b: int) -> None:
        self._check(a, b)
        k_cz(self.tableau, a, b)

    _ONE_QUBIT = {"H": "h", "S": "s", "S_DAGGER": "sdg", "SDG": "sdg", "X": "x", "Y": "y", "Z": "z"}
    _TWO_QUBIT = {"CX": "cx", "CNOT": "cx", "CZ": "cz"}

    def apply_clifford(self, gate: str, qubits) -> None:
        """Apply a named gate from {H, S, S_dagger, X, Y, Z, CX, CZ}."""
        name = gate.upper()
        qubits = tuple(qubits)
        if name in self._ONE_QUBIT:
            if len(qubits) != 1:
                raise ValueError(f"{gate} acts on one qubit, got {qubits}")
            getattr(self, self._ONE_QUBIT[name])(*qubits)
        elif name in self._TWO_QUBIT:
            if len(qubits) != 2:
                raise ValueError(f"{gate} acts on two qubits, got {qubits}")
            getattr(self, self._TWO_QUBIT[name])(*qubits)
        else:
            raise ValueError(f"unknown gate {gate!r}")

    def apply_pauli(self, p: PauliString) -> None:
        if p.num_qubits != self.num_qubits:
            raise ValueError("Pauli size does not match state")
        k_apply_pauli(self.tableau, self.num_qubits, _words(p.x_bits, self.words), _words(p.z_bits, self.words))

    # measurement ------------------------------------------------------

    def measure_z(self, q: int, rng) -> tuple[int, bool]:
        """Measure Z on qubit q; ``rng`` supplies the bit for random outcomes.

        Returns ``(outcome, was_random)``.
        """
        self._check(q)
        p = k_pivot(self.tableau, self.num_qubits, q)
        if p < 0:
            return int(k_deterministic(self.tableau, self.num_qubits, q)), False
        bit = rng.measurement_bit()
        if k_collapse(self.tableau, self.num_qubits, q, p, bit):
            raise AssertionError("imaginary phase during measurement collapse")
        return bit, True

    def peek_z(self, q: int) -> int | None:
        """Deterministic Z outcome of qubit q, or None if it would be random."""
        self._check(q)
        if k_pivot(self.tableau, self.num_qubits, q) >= 0:
            return None
        return int(k_deterministic(self.tableau, self.num_qubits, q))

    def reset(self, q: int, rng) -> None:
        bit, _ = self.measure_z(q, rng)
        if bit:
            self.x(q)

    def expectation(self, p: PauliString) -> int | None:
        """+1 or -1 when +-p stabilizes the state, None when indeterminate."""
        if p.num_qubits != self.num_qubits:
            raise ValueError("Pauli size does not match state")
        r = k_expectation(
            self.tableau,
            self.num_qubits,
            _words(p.x_bits, self.words),
            _words(p.z_bits, self.words),
            0 if p.sign > 0 else 1,
        )
        if r == 2:
            raise AssertionError("stabilizer tableau lost full rank")
        return None if r == 0 else int(r)

    # inspection -------------------------------------------------------

    def _row(self, i: int) -> PauliString:
        W = self.words
        row = self.tableau[i]
        return PauliString(
            self.num_qubits,
            _from_words(row[:W]),
            _from_words(row[W : 2 * W]),
            -1 if row[2 * W] else 1,
        )

    def stabilizers(self) -> list[PauliString]:
        n = self.num_qubits
        return [self._row(i) for i in range(n, 2 * n)]

    def destabilizers(self) -> list[PauliString]:
        return [self._row(i) for i in range(self.num_qubits)]

    def check_invariants(self) -> None:
        """Raise AssertionError unless the rows form a symplectic basis."""
        n = self.num_qubits
        stabs = self.stabilizers()
        destabs = self.destabilizers()
        for i in range(n):
            for j in range(n):
                if not stabs[i].commutes_with(stabs[j]):
                    raise AssertionError(f"stabilizers {i} and {j} anticommute")
                if i != j and not destabs[i].commutes_with(destabs[j]):
                    raise AssertionError(f"destabilizers {i} and {j} anticommute")
                if destabs[i].commutes_with(stabs[j]) != (i != j):
                    raise AssertionError(f"destabilizer {i} / stabilizer {j} pairing broken")


def zero_state(n: int) -> StabilizerState:
    """The all-zero state on ``n`` qubits."""
    if n < 1:
        raise ValueError("zero_state needs n >= 1")
    return StabilizerState(n)
