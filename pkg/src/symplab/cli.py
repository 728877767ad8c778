"""Command line entry point: ``symplab run|sweep|list-checks|print-conventions``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.
``SYMPLAB_OUTPUT_DIR`` relocates report files (their names are kept).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, conventions
from .config import CHECKS, THEORIES, ScenarioConfig, load
from .errors import ConfigError, PreconditionError
from .report import VerificationReport, constants
from .scenarios import COVERAGE, REGISTRY, convergence_sweep, run_scenario

OUTPUT_ENV = "SYMPLAB_OUTPUT_DIR"


def _overrides(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _output(path: str | None) -> Path | None:
    if path is None:
        return None
    base = os.environ.get(OUTPUT_ENV)
    return Path(base) / Path(path).name if base else Path(path)


def _print_records(report: VerificationReport, out) -> None:
    for r in report.records:
        order = "" if r.order is None else f" order={r.order if isinstance(r.order, str) else f'{r.order:.3f}'}"
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:24s} {r.metric}={r.value:.3e} tol={r.tolerance:.1e}{order}",
              file=out)


def _finish(report: VerificationReport, cfg: ScenarioConfig) -> int:
    files = report.write(_output(cfg.report), _output(cfg.csv))
    _print_records(report, sys.stdout)
    print(f"{'passed' if report.passed else 'FAILED'}: {cfg.theory}/{cfg.check} -> {files[0]}")
    return 0 if report.passed else 1


def cmd_run(args) -> int:
    cfg = load(args.config, _overrides(args.set))
    records, dt = run_scenario(cfg)
    report = VerificationReport(cfg.echo(), records, timings={f"{cfg.theory}/{cfg.check}": dt})
    return _finish(report, cfg)


def cmd_sweep(args) -> int:
    cfg = load(args.config, _overrides(args.set))
    records, timings = convergence_sweep(cfg, args.levels)
    report = VerificationReport(cfg.echo(), records, "sweep", list(args.levels), timings)
    return _finish(report, cfg)


def cmd_list_checks(args) -> int:
    if args.json:
        doc = {"scenarios": [list(k) for k in REGISTRY],
               "coverage": {op: [list(s) for s in scen] for op, scen in COVERAGE.items()}}
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0
    print("scenarios (theory / check):")
    for theory in THEORIES:
        checks = [c for c in CHECKS if (theory, c) in REGISTRY]
        print(f"  {theory:20s} {', '.join(checks)}")
    print("coverage (operation -> scenarios):")
    for op, scen in COVERAGE.items():
        print(f"  {op:28s} {', '.join(f'{t}/{c}' for t, c in scen)}")
    return 0


def cmd_print_conventions(args) -> int:
    doc = {"constants": constants(), "signature": conventions.SIGNATURE, "trace_norm": conventions.TRACE_NORM,
           "su2_generators": conventions.SU2_GENERATORS, "extraction": conventions.EXTRACTION}
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symplab", description="Symplectic current verification scenarios.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write its report")
    run.add_argument("config", help="flat key = value scenario file")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    run.set_defaults(fn=cmd_run)

    sweep = sub.add_parser("sweep", help="run a scenario over grid levels and fit the convergence order")
    sweep.add_argument("config")
    sweep.add_argument("--levels", type=int, nargs="+", required=True, metavar="N", help="grid sizes N")
    sweep.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    sweep.set_defaults(fn=cmd_sweep)

    ls = sub.add_parser("list-checks", help="list scenarios and the operations each one exercises")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(fn=cmd_list_checks)

    conv = sub.add_parser("print-conventions", help="print frozen sign and normalization conventions")
    conv.set_defaults(fn=cmd_print_conventions)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, PreconditionError) as exc:
        print(f"symplab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
