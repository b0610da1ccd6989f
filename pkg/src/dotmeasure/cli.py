"""Command-line entry point.

    dotmeasure evolve   --config run.ini [--out traj.csv] [--set key=value ...]
    dotmeasure steady   --config run.ini
    dotmeasure sweep    --config run.ini --set run.parameter=gamma_L ...
    dotmeasure scenario fig3|zeno|noninvasive|reduction [--set key=value ...]

CSV goes to ``--out`` or stdout.  On failure a single JSON line prefixed
with ``error:`` is written to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import scenarios
from .config import apply_overrides, parse_config, read_ini
from .errors import ConfigError, DotMeasureError
from .table import emit_csv

logger = logging.getLogger("dotmeasure")


def _parser():
    parser = argparse.ArgumentParser(
        prog="dotmeasure",
        description="Measurement-induced decoherence in quantum-dot transport.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required):
        p.add_argument("--config", type=Path, required=config_required,
                       help="INI file with [model], [params], [run] sections")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a parameter (run.<key> for [run])")

    for name in ("evolve", "steady", "sweep"):
        p = sub.add_parser(name)
        common(p, config_required=True)
        p.add_argument("--method", choices=("exact", "rk-adaptive"), default=None)
        p.add_argument("--tol", type=float, default=None)
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")

    p = sub.add_parser("scenario")
    p.add_argument("name", choices=sorted(scenarios.SCENARIOS))
    common(p, config_required=False)
    return parser


def _scenario_overrides(args):
    overrides = {}
    if args.config is not None:
        cp = read_ini(args.config.read_text())
        if cp.has_section("params"):
            overrides.update(cp["params"])
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value", key=item)
        key, value = (s.strip() for s in item.split("=", 1))
        overrides[key] = value
    return overrides


def run(args) -> None:
    if args.command == "scenario":
        overrides = _scenario_overrides(args)
        if args.name == "reduction":
            table, report = scenarios.scenario_reduction(overrides)
            emit_csv(table, args.out)
            print(f"scaling_exponent={report.scaling_exponent:.6g} "
                  f"steady_current_discrepancy={report.steady_current_discrepancy:.6g} "
                  f"max_state_discrepancy={report.max_state_discrepancy:.6g}",
                  file=sys.stderr)
        else:
            emit_csv(scenarios.run_scenario(args.name, overrides), args.out)
        return

    try:
        text = args.config.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
    extra = list(args.overrides)
    if args.method:
        extra.append(f"run.method={args.method}")
    if args.tol is not None:
        extra.append(f"run.tol={args.tol!r}")
    cfg = apply_overrides(parse_config(text), extra)

    if args.command == "evolve":
        table = scenarios.run_evolve(cfg)
    elif args.command == "steady":
        table = scenarios.run_steady(cfg)
    else:
        table = scenarios.run_sweep(cfg, jobs=args.jobs)
    emit_csv(table, args.out)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run(args)
    except (DotMeasureError, OSError, ValueError) as exc:
        payload = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            payload.update(key=exc.key, line=exc.line)
        print("error: " + json.dumps(payload), file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
