"""Noisy circuit execution on top of the tableau engine.

Every noisy operation (gate, measurement, preparation and, when memory
noise is on, each idle qubit of a layer) gets a location index in execution
order.  The executor samples background noise per location, can inject one
prescribed fault, and can record the location trace of a run.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Optional

from .noise import PAULI_BITS, FaultLocation, FaultSpec, NoiseParams, random_gate_pauli, random_idle_pauli
from .rng import RandomSource
from .tableau import (
    StabilizerState,
    k_collapse,
    k_cx,
    k_cz,
    k_deterministic,
    k_h,
    k_pauli1,
    k_pivot,
    k_s,
    k_sdg,
)

_NOISELESS = NoiseParams()


class Executor:
    """Issue operations to a stabilizer state under circuit-level noise.

    Parameters
    ----------
    num_qubits:
        Register size.
    noise:
        Background noise; ``None`` means noiseless.
    rng:
        Source of measurement outcomes and noise draws.
    fault:
        A single fault to inject right after the operation at
        ``fault.target.location_index``.  It is only injected if the
        operation found there has the same signature as the target.
    noise_start:
        Background noise is only sampled at locations ``>= noise_start``.
    forced_fault_at:
        Location at which an error is forced, drawn from that location's
        own error channel conditioned on an error happening.
    trace:
        Record a :class:`FaultLocation` for every location.
    track_idle:
        Group operations into layers and create idle locations.  Defaults to
        ``noise.p_mem > 0``.
    """

    def __init__(
        self,
        num_qubits: int,
        noise: Optional[NoiseParams] = None,
        rng: Optional[RandomSource] = None,
        *,
        fault: Optional[FaultSpec] = None,
        noise_start: int = 0,
        forced_fault_at: int = -1,
        trace: bool = False,
        track_idle: Optional[bool] = None,
    ):
        self.state = StabilizerState(num_qubits)
        self.num_qubits = num_qubits
        self.noise = noise if noise is not None else _NOISELESS
        self.rng = rng if rng is not None else RandomSource(0)
        self._T = self.state.tableau
        self.location = 0
        self.tag = ""
        self.trace: Optional[list[FaultLocation]] = [] if trace else None
        self.errors = 0  # faults that actually happened

        nz = self.noise
        self._p1 = nz.p1
        self._p2 = nz.p2
        self._pm = nz.p_meas
        self._pi = nz.p_init
        self._pmem = nz.p_mem
        self._start = noise_start
        self._forced = forced_fault_at

        self.fault = fault
        self._inject_at = fault.target.location_index if fault is not None else -1
        self.fault_reached = False
        self.fault_mismatch = False

        if track_idle is None:
            track_idle = nz.p_mem > 0
        self._layering = bool(track_idle)
        self._busy = 0
        self._all = (1 << num_qubits) - 1
        self.used = 0  # bitmask of qubits ever prepared or acted on

    # bookkeeping -----------------------------------------------------

    @contextmanager
    def gadget(self, label: str):
        """Tag locations issued inside the block with ``label``."""
        old = self.tag
        self.tag = label
        try:
            yield
        finally:
            self.tag = old

    def record(self, label: str, bits) -> tuple:
        """Store classical bits under ``(label, instance)`` and return the key."""
        reg = self.state.bits
        k = 0
        while (label, k) in reg:
            k += 1
        reg[(label, k)] = tuple(bits)
        return (label, k)

    def _layer(self, mask: int) -> None:
        if self._busy & mask:
            self.barrier()
        self._busy |= mask

    def barrier(self) -> None:
        """Close the current layer; every qubit it did not touch idles once."""
        if not self._layering:
            return
        idle = self._all & ~self._busy
        self._busy = 0
        q = 0
        while idle:
            if idle & 1:
                self._idle_location(q)
            idle >>= 1
            q += 1

    def _idle_location(self, q: int) -> None:
        i = self.location
        self.location = i + 1
        if self.trace is not None:
            self.trace.append(FaultLocation(i, "idle", (q,), self.tag))
        if i == self._inject_at:
            self._inject(i, "idle", (q,))
        elif i == self._forced:
            self._apply_codes((q,), (random_idle_pauli(self.noise, self.rng),))
        elif self._pmem and i >= self._start and self.rng.uniform() < self._pmem:
            self._apply_codes((q,), (random_idle_pauli(self.noise, self.rng),))

    def _apply_codes(self, support, codes) -> None:
        self.errors += 1
        for q, c in zip(support, codes):
            if c:
                bx, bz = PAULI_BITS[c]
                k_pauli1(self._T, q, bx, bz)

    def _inject(self, i: int, kind: str, support) -> bool:
        """Apply the prescribed fault if its target matches; return True for a flip."""
        target = self.fault.target
        if target.signature() != (kind, tuple(support), self.tag):
            self.fault_mismatch = True
            return False
        self.fault_reached = True
        if kind in ("measure", "init"):
            self.errors += 1
            return True
        self._apply_codes(support, self.fault.local_codes())
        return False

    def _gate1(self, q: int) -> None:
        i = self.location
        self.location = i + 1
        if self.trace is not None:
            self.trace.append(FaultLocation(i, "gate", (q,), self.tag))
        if i == self._inject_at:
            self._inject(i, "gate", (q,))
        elif i == self._forced:
            self._apply_codes((q,), random_gate_pauli(1, self.rng))
        elif self._p1 and i >= self._start and self.rng.uniform() < self._p1:
            self._apply_codes((q,), random_gate_pauli(1, self.rng))

    def _gate2(self, a: int, b: int) -> None:
        i = self.location
        self.location = i + 1
        if self.trace is not None:
            self.trace.append(FaultLocation(i, "gate", (a, b), self.tag))
        if i == self._inject_at:
            self._inject(i, "gate", (a, b))
        elif i == self._forced:
            self._apply_codes((a, b), random_gate_pauli(2, self.rng))
        elif self._p2 and i >= self._start and self.rng.uniform() < self._p2:
            self._apply_codes((a, b), random_gate_pauli(2, self.rng))

    # operations ------------------------------------------------------

    def h(self, q: int) -> None:
        if self._layering:
            self._layer(1 << q)
        k_h(self._T, q)
        self._gate1(q)

    def s(self, q: int) -> None:
        if self._layering:
            self._layer(1 << q)
        k_s(self._T, q)
        self._gate1(q)

    def sdg(self, q: int) -> None:
        if self._layering:
            self._layer(1 << q)
        k_sdg(self._T, q)
        self._gate1(q)

    def x(self, q: int) -> None:
        if self._layering:
            self._layer(1 << q)
        k_pauli1(self._T, q, 1, 0)
        self._gate1(q)

    def y(self, q: int) -> None:
        if self._layering:
            self._layer(1 << q)
        k_pauli1(self._T, q, 1, 1)
        self._gate1(q)

    def z(self, q: int) -> None:
        if self._layering:
            self._layer(1 << q)
        k_pauli1(self._T, q, 0, 1)
        self._gate1(q)

    def cx(self, c: int, t: int) -> None:
        if c == t:
            raise ValueError("control and target coincide")
        if self._layering:
            self._layer((1 << c) | (1 << t))
        k_cx(self._T, c, t)
        self._gate2(c, t)

    def cz(self, a: int, b: int) -> None:
        if a == b:
            raise ValueError("CZ needs two distinct qubits")
        if self._layering:
            self._layer((1 << a) | (1 << b))
        k_cz(self._T, a, b)
        self._gate2(a, b)

    def gate(self, name: str, *qubits: int) -> None:
        getattr(self, _GATE_METHODS[name.upper()])(*qubits)

    def pauli_ideal(self, letter: str, qubits) -> None:
        """Noiseless Pauli update that does not consume a location."""
        bx, bz = PAULI_BITS["IXYZ".index(letter)]
        for q in qubits:
            k_pauli1(self._T, q, bx, bz)

    def _raw_measure(self, q: int, branch: bool) -> int:
        n = self.num_qubits
        p = k_pivot(self._T, n, q)
        if p < 0:
            return int(k_deterministic(self._T, n, q))
        bit = self.rng.measurement_bit(branch)
        if k_collapse(self._T, n, q, p, bit):
            raise AssertionError("imaginary phase in tableau row product")
        return bit

    def measure(self, q: int, branch: bool = False) -> int:
        """Z measurement.  ``branch`` marks outcomes a branch explorer should fork on."""
        if self._layering:
            self._layer(1 << q)
        bit = self._raw_measure(q, branch)
        i = self.location
        self.location = i + 1
        if self.trace is not None:
            self.trace.append(FaultLocation(i, "measure", (q,), self.tag))
        if i == self._inject_at:
            if self._inject(i, "measure", (q,)):
                bit ^= 1
        elif i == self._forced:
            self.errors += 1
            bit ^= 1
        elif self._pm and i >= self._start and self.rng.uniform() < self._pm:
            self.errors += 1
            bit ^= 1
        return bit

    def reset(self, q: int) -> None:
        """Prepare |0>; a preparation fault leaves |1>."""
        if self._layering:
            self._layer(1 << q)
        self.used |= 1 << q
        if self._raw_measure(q, False):
            k_pauli1(self._T, q, 1, 0)
        i = self.location
        self.location = i + 1
        if self.trace is not None:
            self.trace.append(FaultLocation(i, "init", (q,), self.tag))
        flip = False
        if i == self._inject_at:
            flip = self._inject(i, "init", (q,))
        elif i == self._forced:
            self.errors += 1
            flip = True
        elif self._pi and i >= self._start and self.rng.uniform() < self._pi:
            self.errors += 1
            flip = True
        if flip:
            k_pauli1(self._T, q, 1, 0)

    def finish(self) -> None:
        self.barrier()

    @property
    def qubits_used(self) -> int:
        return self.used.bit_count()


_GATE_METHODS = {"H": "h", "S": "s", "SDG": "sdg", "S_DAGGER": "sdg", "X": "x", "Y": "y", "Z": "z", "CX": "cx", "CNOT": "cx", "CZ": "cz"}
