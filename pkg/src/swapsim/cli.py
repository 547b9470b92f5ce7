"""Command-line entry point: `run`, `trace-gen`, and `report` subcommands.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .cache import HierarchyConfig
from .controller import ControllerConfig
from .metrics import IntervalRecord, per_phase_accuracy
from .models import ModelKind
from .phase import PhaseDetectorConfig
from .sim import RunResult, run_simulation
from .trace import PRESET_NAMES, build_preset, load_trace, write_trace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_MODEL_FLAGS = {
    "fixed-rate": ModelKind.FIXED_RATE,
    "markov4": ModelKind.MARKOV4,
    "markov8": ModelKind.MARKOV8,
}


def _build_parser() -> _Parser:
    p = _Parser(prog="swapsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a trace and write report files")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--trace", help="trace file to simulate")
    src.add_argument("--synthetic", choices=PRESET_NAMES, help="synthetic preset to simulate")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--models", default="all",
                     help="comma-separated candidate models, or 'all'")
    run.add_argument("--force-model", choices=sorted(_MODEL_FLAGS),
                     help="train and swap only this model for every phase")
    run.add_argument("--train-intervals", type=int, default=2)
    run.add_argument("--give-up-after", type=int, default=None)
    run.add_argument("--validate", action="store_true",
                     help="run a detailed hierarchy in parallel as ground truth")
    run.add_argument("--out", default="swapsim-out", help="output directory")
    run.add_argument("--config", help="JSON config file (flags win)")
    run.add_argument("--threshold", type=float, default=None)
    run.add_argument("--interval-len", type=int, default=None)
    run.add_argument("--sig-len", type=int, default=None)
    run.add_argument("--drop-bits", type=int, default=None)
    run.add_argument("--stable-min", type=int, default=None)

    gen = sub.add_parser("trace-gen", help="write a synthetic trace file")
    gen.add_argument("--synthetic", choices=PRESET_NAMES, required=True)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", required=True)

    rep = sub.add_parser("report", help="re-render CSV files from a prior run")
    rep.add_argument("--run", required=True, help="output directory of a prior run")
    return p


def _detector_config(args, file_cfg: dict) -> PhaseDetectorConfig:
    base = dict(file_cfg.get("detector", {}))
    for key, flag in (
        ("threshold", args.threshold),
        ("interval_len", args.interval_len),
        ("sig_len", args.sig_len),
        ("drop_bits", args.drop_bits),
        ("stable_min", args.stable_min),
    ):
        if flag is not None:
            base[key] = flag
    return PhaseDetectorConfig(**base)


def _controller_config(args) -> ControllerConfig:
    override = _MODEL_FLAGS[args.force_model] if args.force_model else None
    if args.models == "all":
        kinds = tuple(_MODEL_FLAGS.values())
    else:
        try:
            kinds = tuple(_MODEL_FLAGS[m.strip()] for m in args.models.split(","))
        except KeyError as e:
            raise UsageError(f"unknown model {e.args[0]!r}") from None
    return ControllerConfig(
        train_intervals=args.train_intervals,
        candidate_kinds=kinds,
        give_up_after=args.give_up_after,
        single_model_override=override,
    )


def _result_to_report(result: RunResult) -> dict:
    return {
        "seed": result.seed,
        "interval_len": result.interval_len,
        "swapped_fraction": result.swapped_fraction,
        "phase_count": result.phase_count,
        "chosen_models": {str(k): v for k, v in result.chosen.items()},
        "scores": {str(k): v for k, v in result.scores.items()},
        "score_vectors": {str(k): {m: list(v) for m, v in d.items()}
                          for k, d in result.score_vectors.items()},
        "totals": result.totals,
        "base_totals": result.base_totals,
        "per_phase_accuracy": {
            str(k): list(v) for k, v in per_phase_accuracy(result.intervals).items()
        },
        "intervals": [
            {
                "interval_index": r.interval_index,
                "phase_id": r.phase_id,
                "directive": r.directive,
                "accuracy": r.accuracy,
                "l1_hits": r.l1_hits,
                "l2_hits": r.l2_hits,
                "l3_hits": r.l3_hits,
                "mem_accesses": r.mem_accesses,
                "cycles": r.cycles,
            }
            for r in result.intervals
        ],
        "reuse": {
            str(pid): {"cold": h.cold_count, "cap": h.cap, "buckets": h.to_rows()}
            for pid, h in sorted(result.reuse.items())
        },
        "base_reuse": None
        if result.base_reuse is None
        else {
            str(pid): {"cold": h.cold_count, "cap": h.cap, "buckets": h.to_rows()}
            for pid, h in sorted(result.base_reuse.items())
        },
    }


def _write_csvs(report: dict, out: Path) -> None:
    with open(out / "intervals.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["interval_index", "phase_id", "directive", "accuracy",
                    "l1_hits", "l2_hits", "l3_hits", "mem_accesses", "cycles"])
        for r in report["intervals"]:
            w.writerow([r["interval_index"], r["phase_id"], r["directive"],
                        "" if r["accuracy"] is None else r["accuracy"],
                        r["l1_hits"], r["l2_hits"], r["l3_hits"],
                        r["mem_accesses"], r["cycles"]])

    with open(out / "reuse.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["stream", "phase_id", "distance", "count"])
        for stream_key in ("reuse", "base_reuse"):
            data = report.get(stream_key)
            if not data:
                continue
            stream = "model" if stream_key == "reuse" else "base"
            for pid, hist in sorted(data.items(), key=lambda kv: int(kv[0])):
                w.writerow([stream, pid, "cold", hist["cold"]])
                for distance, count in hist["buckets"]:
                    w.writerow([stream, pid, distance, count])


def _cmd_run(args) -> int:
    file_cfg = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as f:
            file_cfg = json.load(f)
    hier_cfg = HierarchyConfig.from_dict(file_cfg.get("hierarchy", {}))
    det_cfg = _detector_config(args, file_cfg)
    ctrl_cfg = _controller_config(args)

    if args.trace:
        trace = load_trace(args.trace)
    else:
        trace = build_preset(args.synthetic, args.seed)

    result = run_simulation(
        trace,
        hierarchy_config=hier_cfg,
        detector_config=det_cfg,
        controller_config=ctrl_cfg,
        seed=args.seed,
        validate=args.validate,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = _result_to_report(result)
    with open(out / "report.json", "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_csvs(report, out)
    print(f"wrote {out / 'report.json'} ({result.phase_count} phases, "
          f"{result.swapped_fraction:.1%} of intervals swapped)")
    return EXIT_OK


def _cmd_trace_gen(args) -> int:
    trace = build_preset(args.synthetic, args.seed)
    write_trace(trace, args.out)
    print(f"wrote {args.out} ({len(trace)} references)")
    return EXIT_OK


def _cmd_report(args) -> int:
    run_dir = Path(args.run)
    with open(run_dir / "report.json", "r", encoding="utf-8") as f:
        report = json.load(f)
    # JSON round-trips bucket rows as lists; normalize for the CSV writer.
    for key in ("reuse", "base_reuse"):
        if report.get(key):
            for hist in report[key].values():
                hist["buckets"] = [tuple(b) for b in hist["buckets"]]
    _write_csvs(report, run_dir)
    print(f"re-rendered CSV files in {run_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "trace-gen":
            return _cmd_trace_gen(args)
        return _cmd_report(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
