"""Fidelity estimates, post-selection reprocessing and error bars.

Shots are reduced to per-group counts as they arrive; every estimate below
is a pure function of those counts, so a summary can be recomputed from a
shot log alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

ONE_SIGMA_CONFIDENCE = 0.6827
STATE_LABELS = ("0", "1", "+", "-", "+i", "-i")


class EmptyEstimateError(ValueError):
    """No shots survived post-selection, so there is nothing to estimate."""


@dataclass
class GroupCounts:
    """Tallies for one job group."""

    total: int = 0
    accepted: int = 0
    correct: int = 0
    qed_clean: int = 0
    qed_correct: int = 0

    def add(self, outcome) -> None:
        self.total += 1
        if outcome.accepted:
            self.accepted += 1
            self.correct += bool(outcome.correct)
            if outcome.qed_clean:
                self.qed_clean += 1
                self.qed_correct += bool(outcome.correct)

    def __add__(self, other: "GroupCounts") -> "GroupCounts":
        return GroupCounts(
            self.total + other.total,
            self.accepted + other.accepted,
            self.correct + other.correct,
            self.qed_clean + other.qed_clean,
            self.qed_correct + other.qed_correct,
        )

    def validate(self) -> None:
        if not (0 <= self.correct <= self.accepted <= self.total and 0 <= self.qed_correct <= self.qed_clean <= self.accepted):
            raise ValueError(f"inconsistent counts {self}")
        if self.qed_correct > self.correct:
            raise ValueError(f"inconsistent counts {self}")

    def to_dict(self) -> dict:
        return dict(vars(self))


def pooled(groups: Sequence[GroupCounts]) -> GroupCounts:
    out = GroupCounts()
    for g in groups:
        out = out + g
    return out


@dataclass
class ExperimentRecord:
    """All shots of one variant on one input, split into job groups."""

    variant: str
    input_label: str
    groups: list[GroupCounts] = field(default_factory=list)

    @classmethod
    def from_outcomes(cls, variant: str, input_label: str, outcomes, job_groups: int = 10) -> "ExperimentRecord":
        """Deal shots into ``job_groups`` contiguous groups in order."""
        outcomes = list(outcomes)
        groups = [GroupCounts() for _ in range(max(1, min(job_groups, len(outcomes))))]
        for i, out in enumerate(outcomes):
            groups[i * len(groups) // len(outcomes)].add(out)
        return cls(variant, input_label, groups)

    @property
    def totals(self) -> GroupCounts:
        return pooled(self.groups)


@dataclass(frozen=True)
class FidelityEstimate:
    value: float
    err_lo: float = 0.0
    err_hi: float = 0.0
    n_accepted: int = 0
    discard_fraction: float = 0.0
    n_total: int = 0

    def __post_init__(self):
        if not -1e-12 <= self.value <= 1 + 1e-12:
            raise ValueError(f"fidelity {self.value} outside [0, 1]")
        if self.err_lo < 0 or self.err_hi < 0:
            raise ValueError("error bars must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "err_lo": self.err_lo,
            "err_hi": self.err_hi,
            "n_accepted": self.n_accepted,
            "n_total": self.n_total,
            "discard_fraction": self.discard_fraction,
        }

    def format(self, digits: int = 4) -> str:
        return format_estimate(self, digits)


# Error bars -----------------------------------------------------------------


def one_sigma_zero_failure_bound(n_shots: int) -> float:
    """Lower error bar when none of ``n_shots`` failed.

    The one-sided exact binomial bound at one-sigma confidence:
    (1 - eps)^n = 1 - 0.6827, i.e. eps ~ 1.148 / n.
    """
    if n_shots < 1:
        raise ValueError("need at least one shot")
    return math.log(1.0 / (1.0 - ONE_SIGMA_CONFIDENCE)) / n_shots


def jackknife_values(values: Sequence[float]) -> float:
    """Jackknife standard error of the mean of per-group values."""
    v = np.asarray(values, dtype=float)
    g = len(v)
    if g < 2:
        raise ValueError("jackknife needs at least two groups")
    loo = (v.sum() - v) / (g - 1)
    return float(math.sqrt((g - 1) / g * np.sum((loo - loo.mean()) ** 2)))


def jackknife_error(record: ExperimentRecord, statistic: Callable[[GroupCounts], float]) -> tuple[float, float]:
    """Leave-one-group-out jackknife of ``statistic`` over pooled counts.

    Groups whose removal leaves the statistic undefined are skipped.
    """
    groups = record.groups
    if len(groups) < 2:
        raise ValueError("jackknife needs at least two job groups")
    total = pooled(groups)
    thetas = []
    for g in groups:
        rest = GroupCounts(
            total.total - g.total,
            total.accepted - g.accepted,
            total.correct - g.correct,
            total.qed_clean - g.qed_clean,
            total.qed_correct - g.qed_correct,
        )
        try:
            thetas.append(statistic(rest))
        except ZeroDivisionError:
            continue
    k = len(thetas)
    if k < 2:
        return 0.0, 0.0
    t = np.asarray(thetas)
    se = float(math.sqrt((k - 1) / k * np.sum((t - t.mean()) ** 2)))
    return se, se


def _qec_stat(c: GroupCounts) -> float:
    return c.correct / c.accepted


def _qed_stat(c: GroupCounts) -> float:
    return c.qed_correct / c.qed_clean


def state_fidelity(record: ExperimentRecord, mode: str = "QEC") -> FidelityEstimate:
    """Probability of reading out the expected state among kept shots.

    QEC mode keeps accepted shots; QED mode keeps only shots whose every
    check bit was trivial.  With no failures the lower bar is the one-sigma
    zero-failure bound; otherwise it is the jackknife over job groups (a
    binomial standard error if there is a single group).
    """
    mode = mode.upper()
    if mode not in ("QEC", "QED"):
        raise ValueError(f"mode must be QEC or QED, got {mode!r}")
    c = record.totals
    stat = _qec_stat if mode == "QEC" else _qed_stat
    kept, good = (c.accepted, c.correct) if mode == "QEC" else (c.qed_clean, c.qed_correct)
    if kept == 0:
        raise EmptyEstimateError(f"no {'accepted' if mode == 'QEC' else 'QED-clean'} shots for {record.variant} |{record.input_label}>")
    value = good / kept
    if good == kept:
        lo, hi = one_sigma_zero_failure_bound(kept), 0.0
    elif len(record.groups) >= 2:
        lo, hi = jackknife_error(record, stat)
    else:
        lo = hi = math.sqrt(value * (1 - value) / kept)
    lo = min(lo, value)
    hi = min(hi, 1.0 - value)
    return FidelityEstimate(value, lo, hi, kept, 1.0 - kept / c.total, c.total)


def _as_estimate(x) -> FidelityEstimate:
    return x if isinstance(x, FidelityEstimate) else FidelityEstimate(float(x))


def average_state_fidelity(estimates: Mapping[str, object]) -> FidelityEstimate:
    """Unweighted mean over the six Pauli eigenstates.

    ``estimates`` maps state labels to estimates or plain numbers.  Error bars
    add in quadrature.
    """
    missing = [s for s in STATE_LABELS if s not in estimates]
    if missing:
        raise ValueError(f"missing input state(s): {', '.join(missing)}")
    ests = [_as_estimate(estimates[s]) for s in STATE_LABELS]
    value = sum(e.value for e in ests) / 6
    lo = math.sqrt(sum(e.err_lo**2 for e in ests)) / 6
    hi = math.sqrt(sum(e.err_hi**2 for e in ests)) / 6
    n_acc = sum(e.n_accepted for e in ests)
    n_tot = sum(e.n_total for e in ests)
    discard = 1.0 - n_acc / n_tot if n_tot else 0.0
    return FidelityEstimate(value, lo, hi, n_acc, discard, n_tot)


def process_fidelity(f_a, dim: int = 2) -> FidelityEstimate:
    """F_p = ((d + 1) F_a - 1) / d, with linearly scaled error bars."""
    est = _as_estimate(f_a)
    scale = (dim + 1) / dim
    value = ((dim + 1) * est.value - 1) / dim
    if value < -1e-12:
        raise ValueError(f"average fidelity {est.value} is below the fully depolarizing value")
    return FidelityEstimate(max(value, 0.0), est.err_lo * scale, est.err_hi * scale, est.n_accepted, est.discard_fraction, est.n_total)


# Reporting ------------------------------------------------------------------


def format_estimate(est: FidelityEstimate, digits: int = 4) -> str:
    """``0.9895(+3/-8)``: value with error bars in units of the last digit."""
    unit = 10.0**-digits
    up = round(est.err_hi / unit)
    down = round(est.err_lo / unit)
    return f"{est.value:.{digits}f}(+{up}/-{down})"


@dataclass
class VariantSummary:
    variant: str
    states: dict  # label -> {"QEC": FidelityEstimate, "QED": FidelityEstimate | None}
    f_a: FidelityEstimate
    f_p: FidelityEstimate
    f_a_qed: Optional[FidelityEstimate]
    f_p_qed: Optional[FidelityEstimate]

    def to_dict(self) -> dict:
        def d(e):
            return None if e is None else e.to_dict()

        return {
            "variant": self.variant,
            "F_s": {k: d(v["QEC"]) for k, v in self.states.items()},
            "F_s_QED": {k: d(v["QED"]) for k, v in self.states.items()},
            "F_a": d(self.f_a),
            "F_p": d(self.f_p),
            "F_a_QED": d(self.f_a_qed),
            "F_p_QED": d(self.f_p_qed),
            "discard_fraction": self.f_a.discard_fraction,
            "discard_fraction_QED": None if self.f_a_qed is None else self.f_a_qed.discard_fraction,
        }


def summarize(records: Mapping[str, ExperimentRecord], variant: str = "") -> VariantSummary:
    """Per-state, average and process fidelities in both modes.

    ``records`` maps state labels to records; the averaged rows are only
    produced when all six states are present.
    """
    states = {}
    for label, rec in records.items():
        try:
            qed = state_fidelity(rec, "QED")
        except EmptyEstimateError:
            qed = None
        states[label] = {"QEC": state_fidelity(rec, "QEC"), "QED": qed}
    f_a = f_p = f_a_qed = f_p_qed = None
    if all(s in states for s in STATE_LABELS):
        f_a = average_state_fidelity({k: v["QEC"] for k, v in states.items()})
        f_p = process_fidelity(f_a)
        if all(states[s]["QED"] is not None for s in STATE_LABELS):
            f_a_qed = average_state_fidelity({k: v["QED"] for k, v in states.items()})
            f_p_qed = process_fidelity(f_a_qed)
    return VariantSummary(variant or next(iter(records.values())).variant, states, f_a, f_p, f_a_qed, f_p_qed)


def table_text(summaries: Sequence[VariantSummary], digits: int = 4) -> str:
    """Fixed-width table with one column per variant."""
    rows = [("", [s.variant for s in summaries])]
    for label in STATE_LABELS:
        rows.append((f"|{label}>", [_cell(s.states.get(label, {}).get("QEC"), digits) for s in summaries]))
    for name, attr in (("F_a", "f_a"), ("F_p", "f_p"), ("F_a,QED", "f_a_qed"), ("F_p,QED", "f_p_qed")):
        rows.append((name, [_cell(getattr(s, attr), digits) for s in summaries]))
    rows.append(("discard", [f"{s.f_a.discard_fraction:.4f}" if s.f_a else "-" for s in summaries]))
    rows.append(("discard,QED", [f"{s.f_a_qed.discard_fraction:.4f}" if s.f_a_qed else "-" for s in summaries]))
    width = max(len(c) for _, cells in rows for c in cells) + 2
    lines = [f"{name:<12}" + "".join(f"{c:>{width}}" for c in cells) for name, cells in rows]
    return "\n".join(lines)


def _cell(est, digits):
    return "-" if est is None else format_estimate(est, digits)


def loglog_slope(p, infidelity) -> tuple[float, float]:
    """Least-squares slope and intercept of log(infidelity) against log(p)."""
    p = np.asarray(p, dtype=float)
    y = np.asarray(infidelity, dtype=float)
    keep = (p > 0) & (y > 0)
    if keep.sum() < 3:
        raise ValueError("slope fit needs at least three points with nonzero p and infidelity")
    slope, intercept = np.polyfit(np.log(p[keep]), np.log(y[keep]), 1)
    return float(slope), float(intercept)
