"""Batch front end: ``run``, ``ftcheck``, ``sweep`` and ``report``.

Errors end with a non-zero exit status and a one-line JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

from .analysis import ExperimentRecord, GroupCounts, loglog_slope, summarize, table_text
from .faults import fault_audit, simulate_counts
from .noise import NoiseParams
from .protocols import INPUT_BY_LABEL, INPUT_STATES, VARIANTS, execute, new_executor
from .rng import RandomSource

ALL_INPUTS = tuple(s.label for s in INPUT_STATES)
SWEEP_AXES = ("uniform", "p1", "p2", "p_meas", "p_init", "p_mem")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    variant: str
    shots: int
    inputs: tuple[str, ...] = ALL_INPUTS
    noise: NoiseParams = field(default_factory=NoiseParams.hardware)
    seed: int = 0
    job_groups: int = 10
    output_path: str = "results"
    qec_report: bool = True
    qed_report: bool = False
    method: str = "direct"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError("variant", f"unknown variant {self.variant!r}; choose from {', '.join(VARIANTS)}")
        if isinstance(self.shots, bool) or not isinstance(self.shots, int) or self.shots < 1:
            raise ConfigError("shots", f"must be a positive integer, got {self.shots!r}")
        self.inputs = tuple(self.inputs)
        if not self.inputs:
            raise ConfigError("inputs", "at least one input state is required")
        for s in self.inputs:
            if s not in INPUT_BY_LABEL:
                raise ConfigError("inputs", f"unknown input {s!r}; choose from {', '.join(ALL_INPUTS)}")
        if len(set(self.inputs)) != len(self.inputs):
            raise ConfigError("inputs", "duplicate input state")
        if not isinstance(self.job_groups, int) or self.job_groups < 1:
            raise ConfigError("job_groups", f"must be a positive integer, got {self.job_groups!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an integer in [0, 2^64), got {self.seed!r}")
        if self.method not in ("direct", "first_fault"):
            raise ConfigError("method", f"must be 'direct' or 'first_fault', got {self.method!r}")
        if not isinstance(self.noise, NoiseParams):
            raise ConfigError("noise", "must be a NoiseParams")

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["inputs"] = list(self.inputs)
        d["noise"] = self.noise.to_dict()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown config field")
        data = dict(data)
        if "noise" in data:
            try:
                data["noise"] = NoiseParams.from_dict(data["noise"])
            except (ValueError, TypeError) as exc:
                raise ConfigError("noise", str(exc)) from None
        if "inputs" in data:
            data["inputs"] = tuple(data["inputs"])
        for req in ("variant", "shots"):
            if req not in data:
                raise ConfigError(req, "required field missing")
        return cls(**data)


# run ------------------------------------------------------------------------


def _run_chunk(args) -> tuple[list[str], list[dict]]:
    """Simulate a contiguous slice of shots of one input; returns log lines and
    per-shot verdicts (kept small so they travel cheaply between processes)."""
    variant, label, input_index, noise_dict, seed, start, stop = args
    noise = NoiseParams.from_dict(noise_dict)
    inp = INPUT_BY_LABEL[label]
    lines, verdicts = [], []
    for j in range(start, stop):
        rng = RandomSource.for_shot(seed, input_index, j)
        out = execute(variant, inp, new_executor(variant, noise, rng))
        rec = out.to_dict()
        rec.update(seed=seed, input_index=input_index, shot_index=j, stream_id=rng.stream_id)
        lines.append(json.dumps(rec, separators=(",", ":")))
        verdicts.append({"accepted": out.accepted, "correct": out.correct, "qed_clean": out.qed_clean})
    return lines, verdicts


class _Verdict:
    __slots__ = ("accepted", "correct", "qed_clean")

    def __init__(self, d):
        self.accepted = d["accepted"]
        self.correct = d["correct"]
        self.qed_clean = d["qed_clean"]


def group_of(shot_index: int, shots: int, job_groups: int) -> int:
    g = max(1, min(job_groups, shots))
    return shot_index * g // shots


def _chunks(shots: int, size: int):
    for start in range(0, shots, size):
        yield start, min(shots, start + size)


def cmd_run(config: RunConfig, jobs: int = 1) -> dict:
    """Run every configured input, stream the shot log, write the summary."""
    out_dir = Path(config.output_path)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_test"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise ConfigError("output_path", f"not writable: {exc}") from None
    records = {}
    log_path = out_dir / "shots.jsonl"
    with open(log_path, "w") as log:
        for label in config.inputs:
            i = ALL_INPUTS.index(label)
            g = max(1, min(config.job_groups, config.shots))
            if config.method == "first_fault":
                groups = simulate_counts(
                    config.variant, INPUT_BY_LABEL[label], config.noise, config.shots,
                    seed=config.seed, input_index=i, job_groups=g, method="first_fault",
                )
            else:
                groups = [GroupCounts() for _ in range(g)]
                tasks = [
                    (config.variant, label, i, config.noise.to_dict(), config.seed, a, b)
                    for a, b in _chunks(config.shots, 2000)
                ]
                if jobs > 1:
                    with ProcessPoolExecutor(max_workers=jobs) as pool:
                        results = pool.map(_run_chunk, tasks)
                        _fold(results, tasks, groups, log, config)
                else:
                    _fold(map(_run_chunk, tasks), tasks, groups, log, config)
            records[label] = ExperimentRecord(config.variant, label, groups)
    summary = build_summary(config, records)
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary


def _fold(results, tasks, groups, log, config) -> None:
    # results arrive in task order, which is stream order
    for (lines, verdicts), task in zip(results, tasks):
        start = task[5]
        for k, (line, v) in enumerate(zip(lines, verdicts)):
            log.write(line + "\n")
            groups[group_of(start + k, config.shots, config.job_groups)].add(_Verdict(v))


def build_summary(config: RunConfig, records: dict) -> dict:
    s = summarize(records, config.variant)
    body = s.to_dict()
    if not config.qed_report:
        for key in ("F_s_QED", "F_a_QED", "F_p_QED", "discard_fraction_QED"):
            body.pop(key, None)
    body["counts"] = {k: [g.to_dict() for g in r.groups] for k, r in records.items()}
    body["config"] = config.to_dict()
    body["table"] = table_text([s]) if s.f_a is not None else None
    return body


def summarize_log(path, job_groups: int = 10, qed_report: bool = True) -> dict:
    """Rebuild the summary from a shot log alone."""
    rows = [json.loads(line) for line in open(path) if line.strip()]
    if not rows:
        raise ValueError("empty shot log")
    variant = rows[0]["variant"]
    per_input: dict = {}
    for r in rows:
        per_input.setdefault(r["input"], []).append(r)
    records = {}
    for label, rs in per_input.items():
        n = len(rs)
        g = max(1, min(job_groups, n))
        groups = [GroupCounts() for _ in range(g)]
        for r in rs:
            groups[group_of(r["shot_index"], n, job_groups)].add(_Verdict(r))
        records[label] = ExperimentRecord(variant, label, groups)
    order = [s for s in ALL_INPUTS if s in records]
    records = {k: records[k] for k in order}
    s = summarize(records, variant)
    body = s.to_dict()
    if not qed_report:
        for key in ("F_s_QED", "F_a_QED", "F_p_QED", "discard_fraction_QED"):
            body.pop(key, None)
    return body


# ftcheck ----------------------------------------------------------------------


def cmd_ftcheck(variant: str, budget: Optional[int] = None, seeds: int = 100, include_idle: bool = False, seed: int = 0) -> dict:
    report = fault_audit(variant, seeds, budget=budget, include_idle=include_idle, seed=seed)
    return report.to_dict()


# sweep ------------------------------------------------------------------------


def _noise_at(base: NoiseParams, axis: str, p: float) -> NoiseParams:
    if axis == "uniform":
        return NoiseParams(p1=p, p2=p, p_meas=p, p_init=p, p_mem=base.p_mem, bias_eta=base.bias_eta)
    d = base.to_dict()
    d[axis] = p
    return NoiseParams(**d)


def cmd_sweep(
    variant: str,
    axis: str,
    grid: Sequence[float],
    shots: int,
    *,
    base: Optional[NoiseParams] = None,
    seed: int = 0,
    job_groups: int = 10,
    fit_range: tuple[float, float] = (2e-4, 2e-3),
    method: str = "first_fault",
) -> dict:
    """Process fidelity along one noise axis, with a log-log slope fit.

    ``shots`` is the total per grid point, split evenly over the six inputs.
    """
    if variant not in VARIANTS:
        raise ConfigError("variant", f"unknown variant {variant!r}")
    if axis not in SWEEP_AXES:
        raise ConfigError("axis", f"choose from {', '.join(SWEEP_AXES)}")
    grid = [float(p) for p in grid]
    if len(grid) < 3:
        raise ConfigError("grid", "need at least three points for the slope fit")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("grid", "must be strictly increasing")
    if shots < len(INPUT_STATES):
        raise ConfigError("shots", "need at least one shot per input state")
    base = base or NoiseParams()
    per_input = shots // len(INPUT_STATES)
    points = []
    for p in grid:
        noise = _noise_at(base, axis, p)
        records = {}
        for i, inp in enumerate(INPUT_STATES):
            groups = simulate_counts(variant, inp, noise, per_input, seed=seed, input_index=i, job_groups=job_groups, method=method)
            records[inp.label] = ExperimentRecord(variant, inp.label, groups)
        s = summarize(records, variant)
        points.append(
            {
                "p": p,
                "F_p": s.f_p.value,
                "err_lo": s.f_p.err_lo,
                "err_hi": s.f_p.err_hi,
                "infidelity": 1.0 - s.f_p.value,
                "F_p_QED": None if s.f_p_qed is None else s.f_p_qed.value,
                "discard_fraction": s.f_a.discard_fraction,
                "shots": per_input * len(INPUT_STATES),
            }
        )
    lo, hi = fit_range
    fit_pts = [(pt["p"], pt["infidelity"]) for pt in points if lo <= pt["p"] <= hi]
    try:
        slope, intercept = loglog_slope([a for a, _ in fit_pts], [b for _, b in fit_pts])
    except ValueError as exc:
        slope = intercept = None
        fit_note = str(exc)
    else:
        fit_note = None
    return {
        "variant": variant,
        "axis": axis,
        "method": method,
        "points": points,
        "fit_range": [lo, hi],
        "slope": slope,
        "intercept": intercept,
        "fit_note": fit_note,
    }


# argument parsing ---------------------------------------------------------------


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(what, f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(what, f"invalid JSON in {path}: {exc}") from None


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise ConfigError("grid", f"not a comma-separated list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steane-teleport", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate shots and write a shot log plus summary")
    run.add_argument("--config", help="JSON run config; flags override its fields")
    run.add_argument("--variant", choices=VARIANTS)
    run.add_argument("--shots", type=int, help="shots per input state")
    run.add_argument("--inputs", help="comma-separated subset of 0,1,+,-,+i,-i")
    run.add_argument("--noise-file", help="JSON file with NoiseParams fields")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="output directory")
    run.add_argument("--qed", action="store_true", help="include QED-reprocessed rows")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")
    run.add_argument("--job-groups", type=int)
    run.add_argument("--method", choices=("direct", "first_fault"))

    ft = sub.add_parser("ftcheck", help="exhaustive single-fault audit")
    ft.add_argument("--variant", choices=VARIANTS, required=True)
    ft.add_argument("--seeds", type=int, default=100, help="seeded shots per location and fault")
    ft.add_argument("--budget", type=int, help="maximum number of runs")
    ft.add_argument("--include-idle", action="store_true")
    ft.add_argument("--seed", type=int, default=0)
    ft.add_argument("--out", help="write the JSON report here")

    sw = sub.add_parser("sweep", help="fidelity along a noise axis")
    sw.add_argument("--variant", choices=VARIANTS, required=True)
    sw.add_argument("--axis", choices=SWEEP_AXES, default="uniform")
    sw.add_argument("--grid", required=True, help="comma-separated increasing noise values")
    sw.add_argument("--shots", type=int, required=True, help="shots per grid point")
    sw.add_argument("--noise-file", help="base NoiseParams for the other axes")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--fit-range", default="2e-4,2e-3")
    sw.add_argument("--method", choices=("direct", "first_fault"), default="first_fault")
    sw.add_argument("--out", help="write the JSON curve here")

    rep = sub.add_parser("report", help="recompute a summary from a shot log")
    rep.add_argument("log")
    rep.add_argument("--job-groups", type=int, default=10)
    rep.add_argument("--qed", action="store_true")
    return parser


def _config_from_args(args) -> RunConfig:
    data = _load_json(args.config, "config") if args.config else {}
    if args.variant is not None:
        data["variant"] = args.variant
    if args.shots is not None:
        data["shots"] = args.shots
    if args.inputs is not None:
        data["inputs"] = [s.strip() for s in args.inputs.split(",") if s.strip()]
    if args.noise_file:
        data["noise"] = _load_json(args.noise_file, "noise")
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["output_path"] = args.out
    if args.qed:
        data["qed_report"] = True
    if args.job_groups is not None:
        data["job_groups"] = args.job_groups
    if args.method is not None:
        data["method"] = args.method
    return RunConfig.from_dict(data)


def _write_json(path: Optional[str], body: dict) -> None:
    text = json.dumps(body, indent=2)
    if path:
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            Path(path).write_text(text + "\n")
        except OSError as exc:
            raise ConfigError("out", f"not writable: {exc.strerror}") from None
    print(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            if args.jobs < 1:
                raise ConfigError("jobs", "must be at least 1")
            config = _config_from_args(args)
            summary = cmd_run(config, jobs=args.jobs)
            if summary.get("table"):
                print(summary["table"])
            print(f"wrote {Path(config.output_path) / 'shots.jsonl'} and {Path(config.output_path) / 'summary.json'}")
        elif args.command == "ftcheck":
            _write_json(args.out, cmd_ftcheck(args.variant, args.budget, args.seeds, args.include_idle, args.seed))
        elif args.command == "sweep":
            base = NoiseParams.from_dict(_load_json(args.noise_file, "noise")) if args.noise_file else None
            fr = _parse_grid(args.fit_range)
            if len(fr) != 2:
                raise ConfigError("fit_range", "expected two numbers")
            body = cmd_sweep(args.variant, args.axis, _parse_grid(args.grid), args.shots, base=base, seed=args.seed, fit_range=(fr[0], fr[1]), method=args.method)
            _write_json(args.out, body)
        elif args.command == "report":
            print(json.dumps(summarize_log(args.log, args.job_groups, args.qed), indent=2))
    except ConfigError as exc:
        print(json.dumps({"error": "config", "field": exc.field, "message": str(exc)}), file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
