"""Command-line entry point: ``ghz-qsdc run|stats|sweep|selftest``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (
    CONFIG_DIR_ENV,
    METRICS,
    SWEEP_PARAMETERS,
    ConfigError,
    ExperimentSpec,
    detection_curve,
    format_table,
    load_spec,
    run_experiment,
    run_trial,
)
from .harness import __doc__ as SCHEMA_HELP
from .protocol import COMPLETED
from .selftest import run_selftest
from .transcript import party_name

EXIT_ABORT = 3
EXIT_USAGE = 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"YAML experiment file (relative paths also tried under ${CONFIG_DIR_ENV})")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--trials", type=int, help="number of sessions (overrides the config)")
    common.add_argument("--out", help="output path: transcript for run, table for stats/sweep")
    common.add_argument("--fail-on-abort", action="store_true", help="exit nonzero if any session aborted")

    p = argparse.ArgumentParser(prog="ghz-qsdc", description="GHZ-state simultaneous secure direct communication simulator")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run one session and print what every party decoded")
    sub.add_parser("stats", parents=[common], help="Monte Carlo estimates of the configured metrics")
    sw = sub.add_parser("sweep", parents=[common], help="metrics as a function of one parameter")
    sw.add_argument("--param", choices=sorted(SWEEP_PARAMETERS), help="parameter to sweep (overrides the config)")
    sw.add_argument("--values", help="comma-separated sweep values (overrides the config)")
    sub.add_parser("selftest", help="run the built-in invariant checks")
    return p


def _spec_from_args(args) -> ExperimentSpec:
    spec = load_spec(args.config) if args.config else ExperimentSpec()
    raw = spec.to_dict()
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.trials is not None:
        raw["trials"] = args.trials
    if args.out:
        key = "transcript" if args.command == "run" else "table"
        raw["output"] = {**raw["output"], key: args.out}
    return ExperimentSpec.from_dict(raw)


def _cmd_run(spec: ExperimentSpec, args) -> int:
    res = run_trial(spec, 0)
    path = Path(spec.output.get("transcript", "transcript.jsonl"))
    res.transcript.write(path)
    print(f"status: {res.status}")
    print(f"check error rate: {res.check_error_rate}")
    for ann in res.announcements:
        print(f"group {ann.group}: initial {ann.initial} measured {ann.measured}")
    for viewer in sorted(res.decoded):
        view = {party_name(p): res.decoded_message(viewer, p) for p in sorted(res.decoded[viewer])}
        print(f"decoded by {party_name(viewer)}: {view}")
    print(f"transcript: {path}")
    if args.fail_on_abort and res.status != COMPLETED:
        print(f"session aborted ({res.status})", file=sys.stderr)
        return EXIT_ABORT
    return 0


def _report(records, args) -> int:
    sys.stdout.write(format_table(records))
    if args.fail_on_abort:
        hit = [r for r in records if r.metric == "detection-probability" and r.estimate > 0]
        if hit:
            print(f"aborts observed (detection-probability={hit[0].estimate})", file=sys.stderr)
            return EXIT_ABORT
    return 0


def _ensure_detection(spec: ExperimentSpec, args) -> ExperimentSpec:
    if args.fail_on_abort and "detection-probability" not in spec.metrics:
        return spec.replace(metrics=spec.metrics + ("detection-probability",))
    return spec


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if args.command == "selftest":
        return 0 if run_selftest() else 1
    try:
        spec = _ensure_detection(_spec_from_args(args), args)
        if args.command == "run":
            return _cmd_run(spec, args)
        if args.command == "stats":
            return _report(run_experiment(spec), args)
        param = args.param or (spec.sweep or {}).get("parameter")
        values = args.values.split(",") if args.values else (spec.sweep or {}).get("values")
        if not param or not values:
            raise ConfigError("sweep needs a parameter and values (--param/--values or a 'sweep' config entry)")
        return _report(detection_curve(spec, str(param), values), args)
    except ConfigError as exc:
        print(f"error: {exc}\n", file=sys.stderr)
        print(f"metrics: {', '.join(METRICS)}", file=sys.stderr)
        print(SCHEMA_HELP, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
