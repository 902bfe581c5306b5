"""End-to-end teleportation experiments.

Five variants are available:

``physical``
    Three bare qubits.
``transversal_0qec`` / ``transversal_1qec``
    Three Steane blocks with a post-selected logical Bell pair and a
    transversal Bell measurement, optionally with an adaptive QEC gadget on
    the input block.
``lattice_mxx_mzz``
    Bell pair made by a joint X_L X_L measurement, teleportation by a joint
    Z_L Z_L measurement and two X-basis readouts.
``lattice_mzz``
    One-bit teleportation on two blocks with a single joint Z_L Z_L
    measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .decoder import PauliFrame, frame_adjust_readout, frame_update
from .executor import Executor
from .noise import NoiseParams
from .rng import RandomSource
from .steane import (
    BLOCK_SIZE,
    LOGICAL_SUPPORT,
    Block,
    DestructiveResult,
    GadgetRecord,
    destructive_measure,
    logical_gate,
    make_blocks,
    prepare_zero,
    qec_gadget_adaptive,
    syn_round_flagged,
    transversal_cx,
)
from .surgery import JointMeasurementOutcome, measure_xx_joint, measure_zz_joint

VARIANTS = ("physical", "transversal_0qec", "transversal_1qec", "lattice_mxx_mzz", "lattice_mzz")
DISCARD_REASONS = ("bell_verification", "bell_syndrome", "bell_flag")
RUS_ATTEMPTS = 3


@dataclass(frozen=True)
class InputState:
    """A Pauli eigenstate: gates that make it from |0>, and how to check it."""

    label: str
    prep: tuple[str, ...]
    readout_basis: str
    expected_bit: int


INPUT_STATES = (
    InputState("0", (), "Z", 0),
    InputState("1", ("X",), "Z", 1),
    InputState("+", ("H",), "X", 0),
    InputState("-", ("X", "H"), "X", 1),
    InputState("+i", ("H", "S"), "Y", 0),
    InputState("-i", ("X", "H", "S"), "Y", 1),
)
INPUT_BY_LABEL = {s.label: s for s in INPUT_STATES}


def input_state(label: str) -> InputState:
    key = label.strip().strip("|>").replace("⟩", "")
    try:
        return INPUT_BY_LABEL[key]
    except KeyError:
        raise ValueError(f"unknown input state {label!r}; expected one of {list(INPUT_BY_LABEL)}") from None


@dataclass
class ShotOutcome:
    variant: str
    input: InputState
    accepted: bool
    discard_reason: Optional[str] = None
    gadget_records: list[GadgetRecord] = field(default_factory=list)
    joint_outcomes: list[JointMeasurementOutcome] = field(default_factory=list)
    readouts: list[DestructiveResult] = field(default_factory=list)
    frame: PauliFrame = field(default_factory=PauliFrame)
    final_bit: Optional[int] = None
    correct: Optional[bool] = None
    qed_clean: bool = False
    qubits_used: int = 0

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "input": self.input.label,
            "accepted": self.accepted,
            "discard_reason": self.discard_reason,
            "qed_clean": self.qed_clean,
            "gadgets": [g.to_dict() for g in self.gadget_records],
            "joint": [j.to_dict() for j in self.joint_outcomes],
            "readouts": [{"raw": list(r.raw_bits), "syndrome": list(r.syndrome), "bit": r.logical_bit} for r in self.readouts],
            "frame": self.frame.to_dict(),
            "final_bit": self.final_bit,
            "correct": self.correct,
        }


def _finish(out: ShotOutcome, ex: Executor, bit: Optional[int]) -> ShotOutcome:
    """Fill the verdict fields once the shot is over."""
    ex.finish()
    out.qubits_used = ex.qubits_used
    if not out.accepted:
        return out
    out.final_bit = bit
    out.correct = bit == out.input.expected_bit
    out.qed_clean = (
        all(g.is_trivial() for g in out.gadget_records)
        and not any(j.flag_bit for j in out.joint_outcomes)
        and not any(any(r.syndrome) for r in out.readouts)
    )
    return out


def _bell_verdict(preps, checks, flags=()) -> Optional[str]:
    if any(any(r.verification_bits) for r in preps):
        return "bell_verification"
    if any(any(r.syndrome_bits) for r in checks):
        return "bell_syndrome"
    if any(flags) or any(any(r.flag_bits) for r in checks):
        return "bell_flag"
    return None


def _correct_output(ex: Executor, frame: PauliFrame, block: Block, corrections: str) -> None:
    """With physical corrections, move the frame onto the block as ideal Paulis.

    The conditional Paulis are applied without consuming fault locations, so a
    run with physical corrections sees the same noise schedule as a run with
    frame tracking.
    """
    if corrections == "frame":
        return
    if corrections != "physical":
        raise ValueError(f"corrections must be 'frame' or 'physical', got {corrections!r}")
    x, z = frame.bits(block.index)
    qubits = [block.q(i) for i in LOGICAL_SUPPORT]
    if x:
        ex.pauli_ideal("X", qubits)
    if z:
        ex.pauli_ideal("Z", qubits)
    frame.x_flip[block.index] = 0
    frame.z_flip[block.index] = 0


def _readout(ex: Executor, out: ShotOutcome, block: Block, corrections: str) -> ShotOutcome:
    basis = out.input.readout_basis
    _correct_output(ex, out.frame, block, corrections)
    r = destructive_measure(ex, block, basis, "out")
    out.readouts.append(r)
    return _finish(out, ex, frame_adjust_readout(out.frame, block.index, basis, r.logical_bit))


# Physical ---------------------------------------------------------------

_PHYSICAL_ROTATION = {"Z": (), "X": ("H",), "Y": ("SDG", "H")}


def physical_teleport(ex: Executor, inp: InputState, corrections: str = "frame") -> ShotOutcome:
    out = ShotOutcome("physical", inp, accepted=True)
    q1, q2, q3 = 0, 1, 2
    with ex.gadget("prep"):
        for q in (q1, q2, q3):
            ex.reset(q)
        for g in inp.prep:
            ex.gate(g, q1)
    with ex.gadget("bell"):
        ex.h(q2)
        ex.cx(q2, q3)
    with ex.gadget("bell_meas"):
        ex.cx(q1, q2)
        ex.h(q1)
        mz_bit = ex.measure(q1, branch=True)
        mx_bit = ex.measure(q2, branch=True)
    ex.record("bell_meas", (mz_bit, mx_bit))
    frame_update(out.frame, 3, "Z", mz_bit)
    frame_update(out.frame, 3, "X", mx_bit)
    x, z = out.frame.bits(3)
    if corrections == "physical":
        if x:
            ex.pauli_ideal("X", (q3,))
        if z:
            ex.pauli_ideal("Z", (q3,))
        out.frame.x_flip[3] = out.frame.z_flip[3] = 0
    with ex.gadget("out"):
        for g in _PHYSICAL_ROTATION[inp.readout_basis]:
            ex.gate(g, q3)
        bit = ex.measure(q3)
    return _finish(out, ex, frame_adjust_readout(out.frame, 3, inp.readout_basis, bit))


# Transversal --------------------------------------------------------------


def transversal_teleport(ex: Executor, inp: InputState, qec_gadgets: int = 0, corrections: str = "frame") -> ShotOutcome:
    if qec_gadgets not in (0, 1):
        raise ValueError("qec_gadgets must be 0 or 1")
    out = ShotOutcome(f"transversal_{qec_gadgets}qec", inp, accepted=True)
    b1, b2, b3 = make_blocks(3)
    recs = out.gadget_records

    # post-selected logical Bell pair on blocks 2 and 3
    p2 = prepare_zero(ex, b2, 1, "prep2")
    p3 = prepare_zero(ex, b3, 1, "prep3")
    with ex.gadget("bell"):
        logical_gate(ex, "H", b2)
        transversal_cx(ex, b2, b3)
    s2 = syn_round_flagged(ex, b2, "syn2")
    s3 = syn_round_flagged(ex, b3, "syn3")
    recs += [p2, p3, s2, s3]
    reason = _bell_verdict((p2, p3), (s2, s3))
    if reason:
        out.accepted = False
        out.discard_reason = reason
        return _finish(out, ex, None)

    # input block, never post-selected
    recs.append(prepare_zero(ex, b1, RUS_ATTEMPTS, "prep1"))
    with ex.gadget("input"):
        for g in inp.prep:
            logical_gate(ex, g, b1)
    if qec_gadgets:
        recs.append(qec_gadget_adaptive(ex, b1, "qec1"))

    with ex.gadget("bell_meas"):
        transversal_cx(ex, b1, b2)
    mx = destructive_measure(ex, b1, "X", "bell1")
    mz = destructive_measure(ex, b2, "Z", "bell2")
    out.readouts += [mx, mz]
    frame_update(out.frame, 3, "Z", mx.logical_bit)
    frame_update(out.frame, 3, "X", mz.logical_bit)
    return _readout(ex, out, b3, corrections)


# Lattice surgery ------------------------------------------------------------


def _zz_with_repeat(ex: Executor, out: ShotOutcome, a: Block, b: Block) -> int:
    """Joint Z_L Z_L, QEC on both blocks, and the conditional repeat.

    If the flag or either gadget's first round fired, the joint measurement is
    repeated followed by a flagged round on both blocks, and the repeated
    parity is used without further checks.
    """
    zz = measure_zz_joint(ex, a, b, "mzz")
    qa = qec_gadget_adaptive(ex, a, f"qec{a.index}")
    qb = qec_gadget_adaptive(ex, b, f"qec{b.index}")
    out.joint_outcomes.append(zz)
    out.gadget_records += [qa, qb]
    if not (zz.flag_bit or not qa.is_trivial() or not qb.is_trivial()):
        return zz.parity_bit
    zz2 = measure_zz_joint(ex, a, b, "mzz_repeat")
    out.joint_outcomes.append(zz2)
    out.gadget_records.append(syn_round_flagged(ex, a, f"syn{a.index}_repeat"))
    out.gadget_records.append(syn_round_flagged(ex, b, f"syn{b.index}_repeat"))
    return zz2.parity_bit


def lattice_mxx_mzz(ex: Executor, inp: InputState, corrections: str = "frame") -> ShotOutcome:
    out = ShotOutcome("lattice_mxx_mzz", inp, accepted=True)
    b1, b2, b3 = make_blocks(3)
    recs = out.gadget_records

    p2 = prepare_zero(ex, b2, 1, "prep2")
    p3 = prepare_zero(ex, b3, 1, "prep3")
    xx = measure_xx_joint(ex, b2, b3, "mxx")
    s2 = syn_round_flagged(ex, b2, "syn2")
    s3 = syn_round_flagged(ex, b3, "syn3")
    recs += [p2, p3, s2, s3]
    out.joint_outcomes.append(xx)
    reason = _bell_verdict((p2, p3), (s2, s3), (xx.flag_bit,))
    if reason:
        out.accepted = False
        out.discard_reason = reason
        return _finish(out, ex, None)
    # odd X parity leaves Z_L on the pair; track it on the output block
    frame_update(out.frame, 3, "Z", xx.parity_bit)

    recs.append(prepare_zero(ex, b1, RUS_ATTEMPTS, "prep1"))
    with ex.gadget("input"):
        for g in inp.prep:
            logical_gate(ex, g, b1)
    parity = _zz_with_repeat(ex, out, b1, b2)

    x1 = destructive_measure(ex, b1, "X", "read1")
    x2 = destructive_measure(ex, b2, "X", "read2")
    out.readouts += [x1, x2]
    frame_update(out.frame, 3, "X", parity)
    frame_update(out.frame, 3, "Z", x1.logical_bit ^ x2.logical_bit)
    return _readout(ex, out, b3, corrections)


def lattice_mzz(ex: Executor, inp: InputState, corrections: str = "frame") -> ShotOutcome:
    out = ShotOutcome("lattice_mzz", inp, accepted=True)
    b1, b2 = make_blocks(2)
    recs = out.gadget_records
    recs.append(prepare_zero(ex, b1, RUS_ATTEMPTS, "prep1"))
    recs.append(prepare_zero(ex, b2, RUS_ATTEMPTS, "prep2"))
    with ex.gadget("input"):
        logical_gate(ex, "H", b2)
        for g in inp.prep:
            logical_gate(ex, g, b1)
    parity = _zz_with_repeat(ex, out, b1, b2)
    m2 = destructive_measure(ex, b1, "X", "read1")
    out.readouts.append(m2)
    frame_update(out.frame, 2, "X", parity)
    frame_update(out.frame, 2, "Z", m2.logical_bit)
    return _readout(ex, out, b2, corrections)


# Dispatch -----------------------------------------------------------------

_RUNNERS: dict[str, tuple[int, Callable]] = {
    "physical": (3, physical_teleport),
    "transversal_0qec": (3 * BLOCK_SIZE, lambda ex, inp, c: transversal_teleport(ex, inp, 0, c)),
    "transversal_1qec": (3 * BLOCK_SIZE, lambda ex, inp, c: transversal_teleport(ex, inp, 1, c)),
    "lattice_mxx_mzz": (3 * BLOCK_SIZE, lattice_mxx_mzz),
    "lattice_mzz": (2 * BLOCK_SIZE, lattice_mzz),
}


def register_size(variant: str) -> int:
    return _RUNNERS[check_variant(variant)][0]


def check_variant(variant: str) -> str:
    if variant not in _RUNNERS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {list(VARIANTS)}")
    return variant


def execute(variant: str, inp: InputState, ex: Executor, corrections: str = "frame") -> ShotOutcome:
    """Run one shot of ``variant`` on a prepared executor."""
    return _RUNNERS[check_variant(variant)][1](ex, inp, corrections)


def new_executor(variant: str, noise: Optional[NoiseParams] = None, rng: Optional[RandomSource] = None, **kwargs) -> Executor:
    return Executor(register_size(variant), noise, rng, **kwargs)


def run_shot(
    variant: str,
    inp: InputState,
    noise: Optional[NoiseParams] = None,
    rng: Optional[RandomSource] = None,
    corrections: str = "frame",
    **executor_kwargs,
) -> ShotOutcome:
    ex = new_executor(variant, noise, rng, **executor_kwargs)
    return execute(variant, inp, ex, corrections)


def run_physical_teleport(inp, noise=None, rng=None, **kw) -> ShotOutcome:
    return run_shot("physical", inp, noise, rng, **kw)


def run_transversal(inp, qec_gadgets: int = 0, noise=None, rng=None, **kw) -> ShotOutcome:
    return run_shot(f"transversal_{qec_gadgets}qec", inp, noise, rng, **kw)


def run_lattice_mxx_mzz(inp, noise=None, rng=None, **kw) -> ShotOutcome:
    return run_shot("lattice_mxx_mzz", inp, noise, rng, **kw)


def run_lattice_mzz(inp, noise=None, rng=None, **kw) -> ShotOutcome:
    return run_shot("lattice_mzz", inp, noise, rng, **kw)


# Noiseless branch exploration -------------------------------------------------


class _BranchSource(RandomSource):
    """Replays a fixed prefix of branch outcomes, then answers 0 and records."""

    def __init__(self, prefix, seed: int, exhaustive: bool):
        super().__init__(seed, 0x5EED)
        self.prefix = list(prefix)
        self.path: list[int] = []
        self.exhaustive = exhaustive

    def measurement_bit(self, branch: bool = False) -> int:
        if not (branch or self.exhaustive):
            return super().measurement_bit()
        i = len(self.path)
        bit = self.prefix[i] if i < len(self.prefix) else 0
        self.path.append(bit)
        return bit


class LeafBudgetExceeded(RuntimeError):
    pass


@dataclass
class IdentityReport:
    variant: str
    leaves: int
    failures: int
    per_input: dict

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.leaves > 0

    @property
    def failure_fraction(self) -> float:
        return self.failures / self.leaves if self.leaves else 0.0


def explore_branches(run: Callable[[RandomSource], ShotOutcome], *, seed: int = 0, exhaustive: bool = False, leaf_budget: int = 2**20):
    """Depth-first walk over both outcomes of every branch-point measurement.

    Yields ``(path, outcome)`` per leaf.  Non-branch random outcomes are
    drawn from a seeded stream; ``exhaustive`` forks on those too.
    """
    stack = [[]]
    leaves = 0
    while stack:
        prefix = stack.pop()
        src = _BranchSource(prefix, seed, exhaustive)
        outcome = run(src)
        leaves += 1
        if leaves > leaf_budget:
            raise LeafBudgetExceeded(f"more than {leaf_budget} leaves")
        path = src.path
        for i in range(len(path) - 1, len(prefix) - 1, -1):
            stack.append(path[:i] + [1])
        yield tuple(path), outcome


def verify_noiseless_identity(
    variant: str,
    *,
    inputs=INPUT_STATES,
    exhaustive: bool = False,
    leaf_budget: int = 2**20,
    corrections: str = "frame",
    seed: int = 0,
) -> IdentityReport:
    """Check every branch of the noiseless protocol is accepted and correct."""
    check_variant(variant)
    leaves = failures = 0
    per_input = {}
    for inp in inputs:
        n_ok = n = 0
        run = lambda src, inp=inp: run_shot(variant, inp, None, src, corrections)
        for _, out in explore_branches(run, seed=seed, exhaustive=exhaustive, leaf_budget=leaf_budget - leaves):
            n += 1
            n_ok += bool(out.accepted and out.correct)
        per_input[inp.label] = (n_ok, n)
        leaves += n
        failures += n - n_ok
    return IdentityReport(variant, leaves, failures, per_input)
