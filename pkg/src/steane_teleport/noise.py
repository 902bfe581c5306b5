"""Circuit-level Pauli noise: parameters, samplers and fault descriptions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

from .pauli import PauliString

# (x, z) bits of the single-qubit Paulis indexed 0..3 = I, X, Y, Z
PAULI_BITS = ((0, 0), (1, 0), (1, 1), (0, 1))

OP_KINDS = ("gate", "measure", "init", "idle")


@dataclass(frozen=True)
class NoiseParams:
    """Error probabilities per noisy operation.

    ``p_mem`` is the per-qubit, per-layer memory error probability.  Of those
    events a fraction ``bias_eta`` is a Z flip and the rest is split equally
    between X and Y, i.e. ``P(Z) = p_mem * bias_eta`` and
    ``P(X) = P(Y) = p_mem * (1 - bias_eta) / 2``.
    """

    p1: float = 0.0
    p2: float = 0.0
    p_meas: float = 0.0
    p_init: float = 0.0
    p_mem: float = 0.0
    bias_eta: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or math.isnan(v):
                raise ValueError(f"{f.name} must be a number, got {v!r}")
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{f.name} must lie in [0, 1], got {v}")

    @classmethod
    def hardware(cls, p_mem: float = 0.0) -> "NoiseParams":
        """Trapped-ion gate and SPAM rates; memory error is opt-in."""
        return cls(p1=3e-5, p2=1.4e-3, p_meas=2e-3, p_init=2e-3, p_mem=p_mem)

    @classmethod
    def uniform(cls, p: float) -> "NoiseParams":
        """Same rate on every gate, measurement and preparation (no memory error)."""
        return cls(p1=p, p2=p, p_meas=p, p_init=p)

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown noise field(s): {', '.join(sorted(unknown))}")
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def is_noiseless(self) -> bool:
        return not (self.p1 or self.p2 or self.p_meas or self.p_init or self.p_mem)

    def rate(self, op_kind: str, arity: int = 1) -> float:
        if op_kind == "gate":
            return self.p1 if arity == 1 else self.p2
        if op_kind == "measure":
            return self.p_meas
        if op_kind == "init":
            return self.p_init
        if op_kind == "idle":
            return self.p_mem
        raise ValueError(f"unknown op kind {op_kind!r}")


@dataclass(frozen=True)
class FaultLocation:
    """One noisy operation in execution order."""

    location_index: int
    op_kind: str
    support: tuple[int, ...]
    tag: str = ""

    def signature(self) -> tuple:
        return (self.op_kind, self.support, self.tag)


@dataclass(frozen=True)
class FaultSpec:
    """A single fault: a Pauli on the location's support, or a classical flip.

    ``pauli`` is indexed in the location's local frame (qubit ``i`` of the
    Pauli acts on ``target.support[i]``).  Measurement and preparation
    locations take ``pauli=None``, meaning a bit flip.
    """

    target: FaultLocation
    pauli: Optional[PauliString] = None

    def __post_init__(self):
        kind = self.target.op_kind
        if kind in ("measure", "init"):
            if self.pauli is not None:
                raise ValueError(f"{kind} faults are bit flips; pass pauli=None")
            return
        if self.pauli is None:
            raise ValueError(f"{kind} faults need a Pauli")
        if self.pauli.num_qubits != len(self.target.support):
            raise ValueError("fault Pauli must act on exactly the location's support")
        if self.pauli.is_identity():
            raise ValueError("identity is not a fault")

    def local_codes(self) -> tuple[int, ...]:
        """Per-support-qubit Pauli index (0=I, 1=X, 2=Y, 3=Z)."""
        if self.pauli is None:
            return ()
        return tuple(PAULI_BITS.index((self.pauli.x_bits >> i & 1, self.pauli.z_bits >> i & 1)) for i in range(self.pauli.num_qubits))


def faults_at(location: FaultLocation) -> list[FaultSpec]:
    """Every single fault possible at a location (3 or 15 Paulis, or one flip)."""
    if location.op_kind in ("measure", "init"):
        return [FaultSpec(location)]
    k = len(location.support)
    out = []
    for code in range(1, 4**k):
        ops = {i: "IXYZ"[(code >> (2 * (k - 1 - i))) & 3] for i in range(k)}
        out.append(FaultSpec(location, PauliString.from_sparse(k, ops)))
    return out


def random_gate_pauli(arity: int, rng) -> tuple[int, ...]:
    """Uniform non-identity Pauli on ``arity`` qubits, as local codes."""
    if arity == 1:
        return (1 + rng.below(3),)
    code = 1 + rng.below(15)
    return (code >> 2, code & 3)


def random_idle_pauli(params: NoiseParams, rng) -> int:
    """Pauli code of a memory error, conditioned on an error having occurred."""
    u = rng.uniform()
    if u < params.bias_eta:
        return 3
    return 1 if u < params.bias_eta + (1.0 - params.bias_eta) / 2 else 2


def _to_pauli(codes, support, num_qubits: int) -> PauliString:
    ops = {q: "IXYZ"[c] for q, c in zip(support, codes) if c}
    return PauliString.from_sparse(num_qubits, ops)


def sample_gate_noise(params: NoiseParams, op_kind: str, support, rng, num_qubits: int | None = None) -> Optional[PauliString]:
    """Depolarizing error after a gate: with probability p1 (p2) a uniformly
    random non-identity Pauli on the support, else None."""
    support = tuple(support)
    if op_kind != "gate" or len(support) not in (1, 2):
        raise ValueError("gate noise needs a one- or two-qubit gate support")
    p = params.p1 if len(support) == 1 else params.p2
    if p <= 0.0 or rng.uniform() >= p:
        return None
    n = num_qubits if num_qubits is not None else max(support) + 1
    return _to_pauli(random_gate_pauli(len(support), rng), support, n)


def sample_idle_noise(params: NoiseParams, idle_qubits, rng, num_qubits: int | None = None) -> list[PauliString]:
    """Independent memory errors on each idle qubit of one layer."""
    idle_qubits = tuple(idle_qubits)
    if params.p_mem <= 0.0 or not idle_qubits:
        return []
    n = num_qubits if num_qubits is not None else max(idle_qubits) + 1
    out = []
    for q in idle_qubits:
        if rng.uniform() < params.p_mem:
            out.append(_to_pauli((random_idle_pauli(params, rng),), (q,), n))
    return out


def flip_bit(params: NoiseParams, kind: str, bit: int, rng) -> int:
    """Classical flip of a measured or prepared bit."""
    if kind == "measure":
        p = params.p_meas
    elif kind == "init":
        p = params.p_init
    else:
        raise ValueError(f"kind must be 'measure' or 'init', got {kind!r}")
    if p > 0.0 and rng.uniform() < p:
        return bit ^ 1
    return bit
