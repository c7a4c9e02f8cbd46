from __future__ import annotations

import argparse
import difflib
import logging
import sys
from pathlib import Path

from engine.errors import BadSpec, ScenarioError
from engine.oracle import OracleSettings
from engine.pipeline import run_scenario
from engine.report import FORMATS, render_report, write_oracle_csv
from engine.scenario import parse_scenario

LOGGER = logging.getLogger("engine.cli")

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_FAILED = 3


def _settings(args: argparse.Namespace) -> OracleSettings:
    defaults = OracleSettings()
    return OracleSettings(
        radial_points=args.radial_points or defaults.radial_points,
        angular_points=args.angular_points or defaults.angular_points,
        max_points=args.max_points or defaults.max_points,
        epsilon=args.epsilon or defaults.epsilon,
    )


def cmd_run(args: argparse.Namespace) -> int:
    path = Path(args.scenario)
    try:
        scenario = parse_scenario(path.read_text(encoding="utf-8"))
    except ScenarioError as exc:
        print(f"{path}:{exc.line}:{exc.column}: {exc.rule}: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (OSError, UnicodeDecodeError) as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_SCENARIO

    try:
        settings = _settings(args)
    except BadSpec as exc:
        print(f"bad oracle settings: {exc}", file=sys.stderr)
        return EXIT_SCENARIO

    report = run_scenario(scenario, settings)
    payload = render_report(report, args.format)
    if args.out:
        Path(args.out).write_bytes(payload)
        print(f"Wrote: {args.out}")
    else:
        sys.stdout.write(payload.decode("utf-8"))

    if args.oracle_csv:
        with open(args.oracle_csv, "w", encoding="utf-8", newline="") as f:
            write_oracle_csv(report.oracle_rows, f)
        LOGGER.info("oracle rows written to %s", args.oracle_csv)

    return EXIT_FAILED if report.failed else EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    root = Path(args.scenarios_dir)
    files = sorted(root.glob("*.scn"))
    if not files:
        print(f"No *.scn files in {root}", file=sys.stderr)
        return EXIT_SCENARIO

    status = EXIT_OK
    for scn in files:
        expected = scn.with_suffix(".expected.txt")
        try:
            report = run_scenario(parse_scenario(scn.read_text(encoding="utf-8")))
        except ScenarioError as exc:
            print(f"{scn.name}: {exc.rule} at {exc.line}:{exc.column}: {exc}")
            status = EXIT_SCENARIO
            continue
        except (OSError, UnicodeDecodeError) as exc:
            print(f"{scn.name}: cannot read: {exc}")
            status = EXIT_SCENARIO
            continue
        actual = render_report(report).decode("utf-8")
        if not expected.exists():
            print(f"{scn.name}: no {expected.name}")
            status = max(status, EXIT_FAILED)
            continue
        try:
            want = expected.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            print(f"{expected.name}: cannot read: {exc}")
            status = EXIT_SCENARIO
            continue
        if actual == want:
            print(f"{scn.name}: ok")
            continue
        status = max(status, EXIT_FAILED)
        print(f"{scn.name}: differs")
        diff = difflib.unified_diff(
            want.splitlines(keepends=True), actual.splitlines(keepends=True), str(expected), "actual"
        )
        sys.stdout.writelines(diff)
    return status


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(prog="cli.py", description="Symbolic Monge-Ampere and Segre current engine")
    p.add_argument("--verbose", "-v", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="Evaluate one scenario file")
    r.add_argument("scenario")
    r.add_argument("--format", default="text", choices=FORMATS)
    r.add_argument("--out", default="")
    r.add_argument("--oracle-csv", default="", help="Write numeric oracle rows to this CSV")
    r.add_argument("--radial-points", type=int, default=0)
    r.add_argument("--angular-points", type=int, default=0)
    r.add_argument("--max-points", type=int, default=0, help="Refuse oracle grids larger than this")
    r.add_argument("--epsilon", type=float, default=0.0, help="Regularization at unit radius")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("check", help="Compare every scenario against its expected report")
    c.add_argument("--scenarios-dir", default="scenarios")
    c.set_defaults(func=cmd_check)

    args = p.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
