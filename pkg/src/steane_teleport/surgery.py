"""Flagged joint logical measurements between two Steane blocks.

Both circuits couple one ancilla to the boundary qubits 5, 6, 7 of each
block in the order 5a, flag, 5b, 6a, 6b, 7a, flag, 7b, so an ancilla fault
that would spread to two data qubits of the same block trips the flag.
"""

from __future__ import annotations

from dataclasses import dataclass

from .executor import Executor
from .steane import LOGICAL_SUPPORT, Block


@dataclass(frozen=True)
class JointMeasurementOutcome:
    parity_bit: int  # 0 for eigenvalue +1
    flag_bit: int
    ancilla_raw: int
    flag_raw: int
    label: str = ""

    def to_dict(self) -> dict:
        return {"label": self.label, "parity": self.parity_bit, "flag": self.flag_bit}


def _coupling_order(a: Block, b: Block):
    """Data couplings with the two flag slots marked as None."""
    q5, q6, q7 = LOGICAL_SUPPORT
    return (a.q(q5), None, b.q(q5), a.q(q6), b.q(q6), a.q(q7), None, b.q(q7))


def _joint(ex: Executor, a: Block, b: Block, couple, label: str) -> JointMeasurementOutcome:
    if set(a.qubits) & set(b.qubits):
        raise ValueError("joint measurement needs two distinct blocks")
    anc, flag = a.anc, a.flag
    with ex.gadget(label):
        ex.reset(anc)
        ex.reset(flag)
        ex.h(anc)
        for q in _coupling_order(a, b):
            if q is None:
                ex.cx(anc, flag)
            else:
                couple(anc, q)
        ex.h(anc)
        raw = ex.measure(anc, branch=True)
        flag_raw = ex.measure(flag)
    ex.record(label, (raw, flag_raw))
    return JointMeasurementOutcome(raw, flag_raw, raw, flag_raw, label)


def measure_xx_joint(ex: Executor, block_a: Block, block_b: Block, label: str = "mxx") -> JointMeasurementOutcome:
    """Measure X_L(a) X_L(b) with CX gates from the ancilla onto the data."""
    return _joint(ex, block_a, block_b, ex.cx, label)


def measure_zz_joint(ex: Executor, block_a: Block, block_b: Block, label: str = "mzz") -> JointMeasurementOutcome:
    """Measure Z_L(a) Z_L(b) with CZ gates between data and ancilla."""
    return _joint(ex, block_a, block_b, lambda anc, q: ex.cz(q, anc), label)
