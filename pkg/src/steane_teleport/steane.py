"""The [[7,1,3]] Steane code and its single-block gadgets.

Data qubits carry labels 1..7.  Both stabilizer types live on the supports
{1,3,5,7}, {2,3,6,7} and {1,2,3,4}; the logical operators run along the
boundary, X_L = X5 X6 X7 and Z_L = Z5 Z6 Z7.  Syndromes are always ordered
Z-checks first, then X-checks, each in the support order above.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Optional

from .decoder import LookupTable, build_lookup, decode, membership_pattern
from .executor import Executor
from .pauli import PauliString

SUPPORTS = ((1, 3, 5, 7), (2, 3, 6, 7), (1, 2, 3, 4))
LOGICAL_SUPPORT = (5, 6, 7)
BLOCK_SIZE = 10  # 7 data + syndrome ancilla + flag + verification ancilla

# Encoder: H on one pivot per support, then fan out to the rest of the support.
# The last target of each fan-out is chosen so that the only weight-2 X errors
# a single fault can leave behind (pivot + last target) overlap the
# verification operator oddly.
_ENCODER = ((5, (1, 3, 7)), (6, (2, 7, 3)), (4, (3, 2, 1)))
VERIFY_SUPPORT = (3, 4, 7)  # a weight-3 Z_L representative


@dataclass(frozen=True)
class CodeDefinition:
    x_stabilizers: tuple[PauliString, ...]
    z_stabilizers: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    supports: tuple[tuple[int, ...], ...] = SUPPORTS
    qubit_labels: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7)

    @property
    def stabilizers(self) -> tuple[PauliString, ...]:
        return self.z_stabilizers + self.x_stabilizers

    def syndrome(self, error: PauliString) -> tuple[int, ...]:
        """Six check outcomes of a data error (Z-checks then X-checks)."""
        return tuple(int(not s.commutes_with(error)) for s in self.stabilizers)

    def is_logical(self, op: PauliString) -> bool:
        """True for operators that commute with every check but act non-trivially."""
        if any(not s.commutes_with(op) for s in self.stabilizers):
            return False
        return not (op.commutes_with(self.logical_x) and op.commutes_with(self.logical_z))


def _label_op(letter: str, labels) -> PauliString:
    return PauliString.of_type(7, letter, [q - 1 for q in labels])


@lru_cache(maxsize=None)
def code_definition() -> CodeDefinition:
    return CodeDefinition(
        x_stabilizers=tuple(_label_op("X", s) for s in SUPPORTS),
        z_stabilizers=tuple(_label_op("Z", s) for s in SUPPORTS),
        logical_x=_label_op("X", LOGICAL_SUPPORT),
        logical_z=_label_op("Z", LOGICAL_SUPPORT),
    )


@lru_cache(maxsize=None)
def lookup_table() -> LookupTable:
    return build_lookup(code_definition())


@dataclass(frozen=True)
class CodeCheckReport:
    commutation_ok: bool
    operators_checked: int
    low_weight_logicals: int
    distance: int

    @property
    def ok(self) -> bool:
        return self.commutation_ok and self.low_weight_logicals == 0 and self.distance == 3


def verify_code(code: Optional[CodeDefinition] = None) -> CodeCheckReport:
    """Commutation audit plus a brute-force distance search over all 4^7 Paulis."""
    code = code or code_definition()
    stabs = code.stabilizers
    ok = all(a.commutes_with(b) for a in stabs for b in stabs)
    ok &= all(s.commutes_with(code.logical_x) and s.commutes_with(code.logical_z) for s in stabs)
    ok &= not code.logical_x.commutes_with(code.logical_z)

    # symplectic form on 7-bit masks, faster than building PauliStrings
    sx = [s.x_bits for s in stabs]
    sz = [s.z_bits for s in stabs]
    lx = (code.logical_x.x_bits, code.logical_x.z_bits)
    lz = (code.logical_z.x_bits, code.logical_z.z_bits)

    def anti(ax, az, bx, bz):
        return ((ax & bz) ^ (az & bx)).bit_count() & 1

    checked = 0
    low = 0
    distance = 8
    for x in range(128):
        for z in range(128):
            w = (x | z).bit_count()
            if w == 0:
                continue
            if any(anti(x, z, a, b) for a, b in zip(sx, sz)):
                if w <= 2:
                    checked += 1
                continue
            logical = anti(x, z, *lx) or anti(x, z, *lz)
            if w <= 2:
                checked += 1
                low += bool(logical)
            if logical:
                distance = min(distance, w)
    return CodeCheckReport(ok, checked + 1, low, distance)  # + identity


# Layout -----------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    """Ten consecutive qubits holding one logical qubit and its ancillas."""

    index: int
    base: int

    def q(self, label: int) -> int:
        """Register index of data qubit ``label`` (1..7)."""
        if not 1 <= label <= 7:
            raise ValueError(f"data qubit labels run from 1 to 7, got {label}")
        return self.base + label - 1

    @property
    def data(self) -> tuple[int, ...]:
        return tuple(range(self.base, self.base + 7))

    @property
    def anc(self) -> int:
        return self.base + 7

    @property
    def flag(self) -> int:
        return self.base + 8

    @property
    def ver(self) -> int:
        return self.base + 9

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.base, self.base + BLOCK_SIZE))


def make_blocks(count: int) -> tuple[Block, ...]:
    return tuple(Block(i + 1, i * BLOCK_SIZE) for i in range(count))


@dataclass
class GadgetRecord:
    gadget_label: str
    syndrome_bits: tuple[int, ...] = ()
    flag_bits: tuple[int, ...] = ()
    verification_bits: tuple[int, ...] = ()
    attempts: int = 0
    corrections: tuple[tuple[str, int], ...] = ()  # (Pauli letter, qubit label)

    def is_trivial(self) -> bool:
        return not (any(self.syndrome_bits) or any(self.flag_bits) or any(self.verification_bits))

    def to_dict(self) -> dict:
        return {
            "label": self.gadget_label,
            "syndrome": list(self.syndrome_bits),
            "flags": list(self.flag_bits),
            "verification": list(self.verification_bits),
            "attempts": self.attempts,
            "corrections": [f"{p}{q}" for p, q in self.corrections],
        }


# Preparation --------------------------------------------------------------


def encode_zero(ex: Executor, block: Block) -> None:
    """Unverified encoding of |0>_L on freshly reset data qubits."""
    for pivot, _ in _ENCODER:
        ex.h(block.q(pivot))
    for pivot, targets in _ENCODER:
        for t in targets:
            ex.cx(block.q(pivot), block.q(t))


def prepare_zero(ex: Executor, block: Block, max_attempts: int = 3, label: str = "prep") -> GadgetRecord:
    """Verified |0>_L with repeat-until-success.

    Each attempt resets the block, encodes, and measures a Z_L representative
    onto the verification ancilla.  A trivial bit ends the loop; after the
    last attempt the block is kept whatever the bit says.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    bits = []
    attempt = 0
    with ex.gadget(label):
        for attempt in range(1, max_attempts + 1):
            for q in block.data:
                ex.reset(q)
            ex.reset(block.ver)
            encode_zero(ex, block)
            for label_q in VERIFY_SUPPORT:
                ex.cx(block.q(label_q), block.ver)
            bits.append(ex.measure(block.ver))
            if bits[-1] == 0:
                break
    ex.record(label, bits)
    return GadgetRecord(label, verification_bits=tuple(bits), attempts=attempt)


# Transversal gates -------------------------------------------------------

# Transversal S realizes the logical S-dagger on this code (and vice versa),
# so logical phase gates are issued as their physical inverses.
_LOGICAL_TO_PHYSICAL = {"H": "H", "X": "X", "Y": "Y", "Z": "Z", "S": "SDG", "SDG": "S"}


def transversal_gate(ex: Executor, gate: str, block: Block) -> None:
    """Physical ``gate`` on each data qubit of the block."""
    name = gate.upper()
    for q in block.data:
        ex.gate(name, q)


def logical_gate(ex: Executor, gate: str, block: Block) -> None:
    """Apply logical ``gate`` via its transversal implementation."""
    transversal_gate(ex, _LOGICAL_TO_PHYSICAL[gate.upper()], block)


def transversal_cx(ex: Executor, control: Block, target: Block) -> None:
    if set(control.qubits) & set(target.qubits):
        raise ValueError("transversal CX needs disjoint blocks")
    for c, t in zip(control.data, target.data):
        ex.cx(c, t)


# Syndrome extraction --------------------------------------------------------


def _z_check(ex: Executor, block: Block, support, flagged: bool) -> tuple[int, int]:
    a, f = block.anc, block.flag
    d = [block.q(i) for i in support]
    ex.reset(a)
    if flagged:
        ex.reset(f)
        ex.h(f)
        ex.cx(d[0], a)
        ex.cx(f, a)
        ex.cx(d[1], a)
        ex.cx(d[2], a)
        ex.cx(f, a)
        ex.cx(d[3], a)
        ex.h(f)
        return ex.measure(a), ex.measure(f)
    for q in d:
        ex.cx(q, a)
    return ex.measure(a), 0


def _x_check(ex: Executor, block: Block, support, flagged: bool) -> tuple[int, int]:
    a, f = block.anc, block.flag
    d = [block.q(i) for i in support]
    ex.reset(a)
    ex.h(a)
    if flagged:
        ex.reset(f)
        ex.cx(a, d[0])
        ex.cx(a, f)
        ex.cx(a, d[1])
        ex.cx(a, d[2])
        ex.cx(a, f)
        ex.cx(a, d[3])
        ex.h(a)
        return ex.measure(a), ex.measure(f)
    for q in d:
        ex.cx(a, q)
    ex.h(a)
    return ex.measure(a), 0


def _extract(ex: Executor, block: Block, flagged: bool) -> tuple[tuple[int, ...], tuple[int, ...]]:
    syn, flags = [], []
    for check in (_z_check, _x_check):
        for support in SUPPORTS:
            s, f = check(ex, block, support, flagged)
            syn.append(s)
            flags.append(f)
    return tuple(syn), tuple(flags)


def syn_round_flagged(ex: Executor, block: Block, label: str = "syn") -> GadgetRecord:
    """Measure all six checks once with flagged circuits."""
    with ex.gadget(label):
        syn, flags = _extract(ex, block, True)
    ex.record(label, syn + flags)
    return GadgetRecord(label, syndrome_bits=syn, flag_bits=flags)


def hook_error(support) -> tuple[int, int]:
    """Data pair hit when the ancilla fails between the flag couplings."""
    return (support[2], support[3])


def _hook_syndrome(support) -> tuple[int, ...]:
    a, b = hook_error(support)
    return tuple(x ^ y for x, y in zip(membership_pattern(SUPPORTS, a), membership_pattern(SUPPORTS, b)))


def flag_decode(syndrome, raised_flags, table: Optional[LookupTable] = None) -> tuple[int, ...]:
    """Correction (qubit labels) for one error type.

    ``raised_flags`` lists, per check support, whether the flagged circuit
    whose hook produces this error type fired in the first round.  If one did
    and the syndrome matches its hook, the hook pair is corrected instead of
    the single qubit the plain table would pick.
    """
    syndrome = tuple(syndrome)
    if not any(syndrome):
        return ()
    for support, raised in zip(SUPPORTS, raised_flags):
        if raised and syndrome == _hook_syndrome(support):
            return hook_error(support)
    q = decode(table or lookup_table(), syndrome)
    return () if q is None else (q,)


def qec_gadget_adaptive(ex: Executor, block: Block, label: str = "qec") -> GadgetRecord:
    """Flagged round; if anything fired, an unflagged round, decode and correct.

    Corrections are applied as physical Pauli gates.
    """
    with ex.gadget(label):
        syn1, flags1 = _extract(ex, block, True)
        if not (any(syn1) or any(flags1)):
            ex.record(label, syn1 + flags1)
            return GadgetRecord(label, syndrome_bits=syn1, flag_bits=flags1)
        syn2, _ = _extract(ex, block, False)
        # Z-checks see X errors; X-check hooks are X pairs and vice versa
        fix_x = flag_decode(syn2[:3], flags1[3:])
        fix_z = flag_decode(syn2[3:], flags1[:3])
        for q in fix_x:
            ex.x(block.q(q))
        for q in fix_z:
            ex.z(block.q(q))
    ex.record(label, syn1 + flags1 + syn2)
    corrections = tuple(("X", q) for q in fix_x) + tuple(("Z", q) for q in fix_z)
    return GadgetRecord(label, syndrome_bits=syn1 + syn2, flag_bits=flags1, corrections=corrections)


# Readout -----------------------------------------------------------------


@dataclass(frozen=True)
class DestructiveResult:
    raw_bits: tuple[int, ...]
    syndrome: tuple[int, int, int]
    logical_bit: int
    correction: Optional[int] = None


def decode_readout(raw_bits, table: Optional[LookupTable] = None) -> DestructiveResult:
    """Reconstruct syndrome and logical bit from seven single-qubit outcomes."""
    raw = tuple(int(b) for b in raw_bits)
    syndrome = tuple(sum(raw[i - 1] for i in s) & 1 for s in SUPPORTS)
    q = decode(table or lookup_table(), syndrome)
    bit = sum(raw[i - 1] for i in LOGICAL_SUPPORT) & 1
    if q is not None and q in LOGICAL_SUPPORT:
        bit ^= 1
    return DestructiveResult(raw, syndrome, bit, q)


def destructive_measure(ex: Executor, block: Block, basis: str = "Z", label: str = "readout") -> DestructiveResult:
    """Logical readout in the Z, X or Y basis by measuring every data qubit.

    X is rotated with H.  Y is rotated with S then H, which measures
    -Y on each qubit; the product over {5,6,7} is then the logical Y.
    Qubit 5 is measured as a branch point since its outcome carries the
    logical randomness when the data qubits are read in label order.
    """
    basis = basis.upper()
    with ex.gadget(label):
        if basis == "X":
            transversal_gate(ex, "H", block)
        elif basis == "Y":
            transversal_gate(ex, "S", block)
            transversal_gate(ex, "H", block)
        elif basis != "Z":
            raise ValueError(f"unknown basis {basis!r}")
        raw = [ex.measure(q, branch=(i == 5)) for i, q in enumerate(block.data, start=1)]
    result = decode_readout(raw)
    ex.record(label, result.raw_bits)
    return result


# Helpers for tests and audits -------------------------------------------------


def block_operator(code_op: PauliString, block: Block, num_qubits: int) -> PauliString:
    """Embed a 7-qubit code operator onto a block's data qubits."""
    return code_op.embed(num_qubits, block.data)


def residual_weight(error: PauliString) -> int:
    """Minimum weight of ``error`` times any stabilizer (7-qubit operators)."""
    code = code_definition()
    best = error.weight
    stabs = code.stabilizers
    for mask in range(1, 64):
        op = error
        for i, s in enumerate(stabs):
            if mask >> i & 1:
                op = PauliString(7, op.x_bits ^ s.x_bits, op.z_bits ^ s.z_bits)
        best = min(best, op.weight)
    return best


def weight_le(n: int, k: int):
    """All Pauli labels on ``n`` qubits with weight 1..k as (positions, letters)."""
    for w in range(1, k + 1):
        for pos in combinations(range(n), w):
            for letters in product("XYZ", repeat=w):
                yield pos, letters
