"""``thermopurity`` command line: sweeps, figure presets and self-checks.

All quantities are dimensionless (hbar = m = omega = 1, beta stands for
hbar*omega*beta).

Exit codes: 0 success, 2 invalid spec, 3 verification failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import sweep, verify
from .errors import InvalidSpec, IoError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VERIFY = 3
EXIT_IO = 4
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5")


def _parse_fixed(items) -> dict[str, float]:
    fixed = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidSpec(f"--fix expects key=value, got {item!r}")
        try:
            fixed[key.strip()] = float(value)
        except ValueError:
            raise InvalidSpec(f"--fix {key}: {value!r} is not a number") from None
    return fixed


def build_parser() -> argparse.ArgumentParser:
    # argparse exits with status 2 on usage errors, which matches EXIT_INVALID.
    parser = argparse.ArgumentParser(prog="thermopurity", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("sweep", help="evaluate the purity on a grid")
    run.add_argument("--mode", required=True, choices=sorted(sweep.MODES))
    run.add_argument("--fix", action="append", metavar="KEY=VALUE", help="fixed parameter (repeatable)")
    run.add_argument("--axis1", required=True, metavar="NAME:MIN:MAX:COUNT")
    run.add_argument("--axis2", metavar="NAME:MIN:MAX:COUNT")
    run.add_argument("--format", default="csv", choices=sweep.FORMATS)
    run.add_argument("--out", required=True, metavar="PATH")

    check = commands.add_parser("verify", help="run the self-check suite")
    check.add_argument("--level", default="quick", choices=("quick", "full"))

    for name in FIGURES:
        fig = commands.add_parser(name, help=f"emit the {name} dataset")
        fig.add_argument("--out", required=True, metavar="PATH")
        fig.add_argument("--fix", action="append", metavar="KEY=VALUE", help="override a fixed parameter")
        fig.add_argument("--format", choices=sweep.FORMATS)
    return parser


def _sweep_spec(args) -> sweep.SweepSpec:
    return sweep.SweepSpec(
        mode=args.mode,
        axis1=sweep.parse_axis(args.axis1),
        axis2=sweep.parse_axis(args.axis2) if args.axis2 else None,
        fixed=_parse_fixed(args.fix),
        output_format=args.format,
        output_path=args.out,
    )


def _figure_spec(args) -> sweep.SweepSpec:
    base = sweep.preset(args.command)
    fixed = {**base.fixed, **_parse_fixed(args.fix)}
    return dataclasses.replace(
        base,
        fixed=fixed,
        output_format=args.format or base.output_format,
        output_path=args.out,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            report = verify.verify(args.level)
            print(report.format())
            return EXIT_OK if report.passed else EXIT_VERIFY
        spec = _sweep_spec(args) if args.command == "sweep" else _figure_spec(args)
        result = sweep.run_sweep(spec)
        sweep.emit(result, spec)
    except InvalidSpec as exc:
        print(f"thermopurity: invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IoError as exc:
        print(f"thermopurity: {exc}", file=sys.stderr)
        return EXIT_IO
    violations = result.metadata["range_violations"]
    if violations:
        print(f"thermopurity: {len(violations)} rows outside (0, 1]", file=sys.stderr)
    print(f"wrote {len(result.rows)} rows to {spec.output_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
