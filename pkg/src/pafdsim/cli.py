"""Command-line frontend: run one experiment, sweep the policy x scheduler
grid over offered loads, or replay a dataplane trace.

Exit codes: 0 success, 1 missing/unreadable input, 2 config validation error,
3 dataplane invariant violation.  PAFD_SEED overrides the config seed; the
--seed flag overrides both.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from . import engine
from .engine import ALL_COMBOS, ConfigError, POLICIES, SCHEDULERS
from .metrics import report_to_dict, reports_to_csv
from .npdataplane import TraceError, format_message, replay_trace

_COMBO_POLICY = {"PAFD": "pafd", "DSPAFD": "pafd-ds", "PAFD-DS": "pafd-ds",
                 "RED": "red", "TD": "td"}


def _parse_combos(text: str) -> list[tuple[str, str]]:
    if text.strip().lower() == "all":
        return list(ALL_COMBOS)
    combos = []
    for item in text.split(","):
        label = item.strip().upper()
        if not label:
            continue
        head, sep, sched = label.rpartition("-")
        if not sep or head not in _COMBO_POLICY or sched.lower() not in SCHEDULERS:
            raise ConfigError("combos", f"unknown combo {item.strip()!r}")
        combos.append((_COMBO_POLICY[head], sched.lower()))
    if not combos:
        raise ConfigError("combos", "no combos given")
    return combos


def _parse_loads(text: str) -> list[float]:
    try:
        loads = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError("loads", f"could not parse {text!r}")
    if not loads or any(l <= 0 for l in loads):
        raise ConfigError("loads", "loads must be positive")
    return loads


def _load_config(path: str, seed_flag: int | None):
    if not os.path.exists(path):
        print(f"error: config file not found: {path}", file=sys.stderr)
        return None, 1
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None, 1
    try:
        cfg = engine.config_from_dict(doc)
        seed = seed_flag
        if seed is None and "PAFD_SEED" in os.environ:
            try:
                seed = int(os.environ["PAFD_SEED"])
            except ValueError:
                raise ConfigError("seed", "PAFD_SEED must be an integer")
        if seed is not None:
            cfg = replace(cfg, seed=seed)
            cfg.validate()
    except ConfigError as exc:
        print(f"error: invalid config field {exc.field}: {exc}", file=sys.stderr)
        return None, 2
    return cfg, 0


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg, rc = _load_config(args.config, args.seed)
    if cfg is None:
        return rc
    report = engine.run(cfg)
    if args.format == "csv":
        text = reports_to_csv([report])
    else:
        text = json.dumps(report_to_dict(report), indent=2) + "\n"
    _write_out(text, args.out)
    return 0


def cmd_sweep(args) -> int:
    cfg, rc = _load_config(args.config, args.seed)
    if cfg is None:
        return rc
    try:
        combos = _parse_combos(args.combos)
        loads = _parse_loads(args.loads)
    except ConfigError as exc:
        print(f"error: invalid config field {exc.field}: {exc}", file=sys.stderr)
        return 2
    cells = engine.sweep(cfg, loads, combos)
    reports = []
    for cell in cells:
        if cell.report is None:
            print(f"warning: {cell.combo} load={cell.load:g}: {cell.error}",
                  file=sys.stderr)
        else:
            reports.append(cell.report)
    _write_out(reports_to_csv(reports), args.out)
    return 0


def cmd_nptrace(args) -> int:
    if not os.path.exists(args.trace):
        print(f"error: trace file not found: {args.trace}", file=sys.stderr)
        return 1
    try:
        with open(args.trace, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
        for msg in replay_trace(lines):
            print(format_message(msg))
    except TraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pafdsim",
        description="Shared-buffer queue management simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--format", choices=("csv", "json"), default="json")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser(
        "sweep", help="run a load sweep across policy x scheduler combos")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--loads", default="0.2,0.6,1.0,1.4",
                         help="comma-separated offered loads (x link rate)")
    p_sweep.add_argument("--combos", default="all",
                         help='"all" or e.g. "PAFD-LQF,TD-BCF"')
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_np = sub.add_parser("nptrace",
                          help="replay a dataplane trace, print transitions")
    p_np.add_argument("trace")
    p_np.set_defaults(func=cmd_nptrace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
