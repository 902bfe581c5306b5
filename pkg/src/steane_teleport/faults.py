"""Single-fault injection, the fault-tolerance audit, and fast Monte Carlo.

Fault locations are numbered in execution order.  Because a noiseless run
takes the same control flow whatever its random outcomes, one reference run
per input fixes the location list, and a fault at location k leaves every
earlier operation untouched.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .analysis import GroupCounts
from .noise import FaultLocation, FaultSpec, NoiseParams, faults_at
from .protocols import INPUT_STATES, InputState, ShotOutcome, execute, new_executor
from .rng import RandomSource


def enumerate_fault_locations(variant: str, inp: InputState, *, include_idle: bool = False, seed: int = 0) -> list[FaultLocation]:
    """Locations of a noiseless reference execution."""
    ex = new_executor(variant, None, RandomSource(seed, 0xFA17), trace=True, track_idle=include_idle)
    execute(variant, inp, ex)
    return ex.trace


@dataclass
class FaultRun:
    outcome: ShotOutcome
    reached: bool


def run_with_fault(
    variant: str,
    inp: InputState,
    spec: FaultSpec,
    rng: Optional[RandomSource] = None,
    *,
    include_idle: Optional[bool] = None,
    corrections: str = "frame",
) -> FaultRun:
    """Noiseless run with exactly one injected fault.

    If the operation at the target index is not the target (the run took a
    different branch, or ended first) nothing is injected and ``reached`` is
    False: the shot is a vacuous pass.
    """
    if not isinstance(spec, FaultSpec):
        raise TypeError("spec must be a FaultSpec")
    if include_idle is None:
        include_idle = spec.target.op_kind == "idle"
    ex = new_executor(variant, None, rng, fault=spec, track_idle=include_idle)
    out = execute(variant, inp, ex, corrections)
    return FaultRun(out, ex.fault_reached)


@dataclass
class AuditReport:
    variant: str
    seeds: int
    locations: int = 0
    fault_specs: int = 0
    runs: int = 0
    vacuous: int = 0
    accepted_wrong: int = 0
    accepted_correct: int = 0
    discarded: int = 0
    incomplete: bool = False
    seconds: float = 0.0
    failing_tags: Counter = field(default_factory=Counter)
    examples: list = field(default_factory=list)

    @property
    def discard_triggering(self) -> int:
        return self.discarded

    @property
    def fault_tolerant(self) -> bool:
        return self.accepted_wrong == 0 and not self.incomplete

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "seeds_per_fault": self.seeds,
            "locations": self.locations,
            "fault_specs": self.fault_specs,
            "runs": self.runs,
            "vacuous": self.vacuous,
            "accepted_wrong": self.accepted_wrong,
            "accepted_correct": self.accepted_correct,
            "discard_triggering": self.discarded,
            "incomplete": self.incomplete,
            "seconds": round(self.seconds, 2),
            "failing_tags": dict(self.failing_tags),
            "examples": self.examples,
        }


def _describe(spec: FaultSpec) -> str:
    loc = spec.target
    what = "flip" if spec.pauli is None else str(spec.pauli)[1:]
    return f"{what}@{loc.op_kind}{loc.support}#{loc.location_index}[{loc.tag}]"


def fault_audit(
    variant: str,
    seeds: int = 100,
    *,
    inputs=INPUT_STATES,
    budget: Optional[int] = None,
    include_idle: bool = False,
    seed: int = 0,
    max_examples: int = 20,
    progress: Optional[Callable[[int, int], None]] = None,
) -> AuditReport:
    """Inject every single fault of every reference location across seeds.

    Seeds are shared round-robin across the inputs: each (input, location,
    fault) gets ceil(seeds / len(inputs)) seeded shots, so every location and
    fault sees at least ``seeds`` shots in total.  ``budget`` caps the number
    of runs; hitting it marks the report incomplete.
    """
    t0 = time.perf_counter()
    report = AuditReport(variant, seeds)
    per_input = math.ceil(seeds / len(inputs))
    plans = []
    for i, inp in enumerate(inputs):
        locs = enumerate_fault_locations(variant, inp, include_idle=include_idle, seed=seed)
        specs = [s for loc in locs for s in faults_at(loc)]
        plans.append((i, inp, specs))
        report.locations += len(locs)
        report.fault_specs += len(specs)
    planned = sum(len(s) for _, _, s in plans) * per_input
    for i, inp, specs in plans:
        for spec in specs:
            for k in range(per_input):
                if budget is not None and report.runs >= budget:
                    report.incomplete = True
                    report.seconds = time.perf_counter() - t0
                    return report
                run = run_with_fault(variant, inp, spec, RandomSource.for_shot(seed, i, k), include_idle=include_idle)
                report.runs += 1
                out = run.outcome
                if not run.reached:
                    report.vacuous += 1
                elif not out.accepted:
                    report.discarded += 1
                elif out.correct:
                    report.accepted_correct += 1
                else:
                    report.accepted_wrong += 1
                    report.failing_tags[spec.target.tag] += 1
                    if len(report.examples) < max_examples:
                        report.examples.append({"input": inp.label, "seed": k, "fault": _describe(spec)})
                if progress is not None and report.runs % 10000 == 0:
                    progress(report.runs, planned)
    report.seconds = time.perf_counter() - t0
    return report


# Monte Carlo ----------------------------------------------------------------------

_FIRST_FAULT_STREAM = 1 << 46
_GROUP_STREAM = 1 << 47


def location_rates(trace, noise: NoiseParams) -> np.ndarray:
    return np.array([noise.rate(loc.op_kind, len(loc.support)) for loc in trace], dtype=float)


@dataclass
class FirstFaultModel:
    """First-fault distribution of one (variant, input) under given noise."""

    variant: str
    inp: InputState
    noise: NoiseParams
    trace: list
    cumulative: np.ndarray

    @classmethod
    def build(cls, variant: str, inp: InputState, noise: NoiseParams) -> "FirstFaultModel":
        trace = enumerate_fault_locations(variant, inp, include_idle=noise.p_mem > 0)
        r = location_rates(trace, noise)
        survive = np.concatenate(([1.0], np.cumprod(1.0 - r)[:-1]))
        return cls(variant, inp, noise, trace, np.cumsum(r * survive))

    @property
    def p_fault(self) -> float:
        """Probability that at least one reference location errs."""
        return float(self.cumulative[-1]) if len(self.cumulative) else 0.0

    def draw_location(self, rng: RandomSource) -> int:
        u = rng.uniform() * self.cumulative[-1]
        return int(min(np.searchsorted(self.cumulative, u, side="right"), len(self.cumulative) - 1))

    def faulty_shot(self, rng: RandomSource) -> ShotOutcome:
        """A shot conditioned on at least one error: noiseless up to the first,
        which is forced, then ordinary noise."""
        k = self.draw_location(rng)
        ex = new_executor(self.variant, self.noise, rng, noise_start=k + 1, forced_fault_at=k, track_idle=self.noise.p_mem > 0)
        return execute(self.variant, self.inp, ex)


def _split(shots: int, groups: int) -> list[int]:
    groups = max(1, min(groups, shots))
    return [(g + 1) * shots // groups - g * shots // groups for g in range(groups)]


def simulate_counts(
    variant: str,
    inp: InputState,
    noise: NoiseParams,
    shots: int,
    *,
    seed: int = 0,
    input_index: int = 0,
    job_groups: int = 10,
    method: str = "direct",
    on_shot: Optional[Callable[[int, ShotOutcome], None]] = None,
) -> list[GroupCounts]:
    """Run ``shots`` noisy shots and tally them per job group.

    ``direct`` simulates every shot with its own (seed, input, shot) stream.
    ``first_fault`` draws how many shots of each group see any error, counts
    the rest as clean successes, and simulates only the faulty ones starting
    from their first error; it samples the same distribution far faster at
    low noise but cannot produce a per-shot log.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    sizes = _split(shots, job_groups)
    groups = [GroupCounts() for _ in sizes]
    if method == "direct":
        j = 0
        for g, size in enumerate(sizes):
            for _ in range(size):
                out = execute(variant, inp, new_executor(variant, noise, RandomSource.for_shot(seed, input_index, j)))
                groups[g].add(out)
                if on_shot is not None:
                    on_shot(j, out)
                j += 1
        return groups
    if method != "first_fault":
        raise ValueError(f"unknown sampling method {method!r}")
    if on_shot is not None:
        raise ValueError("first_fault sampling does not produce individual shots")
    model = FirstFaultModel.build(variant, inp, noise)
    j = 0
    for g, size in enumerate(sizes):
        gen = RandomSource(seed, (input_index << 48) | _GROUP_STREAM | g).generator
        faulty = int(gen.binomial(size, model.p_fault)) if model.p_fault > 0 else 0
        clean = size - faulty
        c = groups[g]
        c.total += clean
        c.accepted += clean
        c.correct += clean
        c.qed_clean += clean
        c.qed_correct += clean
        for _ in range(faulty):
            rng = RandomSource(seed, (input_index << 48) | _FIRST_FAULT_STREAM | j)
            c.add(model.faulty_shot(rng))
            j += 1
    return groups
