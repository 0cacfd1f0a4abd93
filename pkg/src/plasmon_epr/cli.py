"""Command-line entry point: ``plasmon-epr <scenario> [--config PATH] [--out DIR] [--format csv|json]``.

Exit codes: 0 all checks passed, 1 usage or configuration error, 2 numeric
failure, 3 a built-in consistency check failed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import FORMATS, SCENARIOS, default_config, parse_config
from .errors import ConfigError, InvalidParameterError, ScenarioError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_CHECK = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plasmon-epr",
                     description="Run plasmon-decay and photon-pair squeezing scenarios.")
    sub = parser.add_subparsers(dest="scenario", required=True, parser_class=_Parser)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", type=Path, help="YAML scenario file (defaults used if omitted)")
        p.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
        p.add_argument("--format", choices=FORMATS, help="table format (overrides output.format)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            config = default_config(args.scenario)
        else:
            config = parse_config(args.config.read_text())
            if config.scenario != args.scenario:
                raise ConfigError(
                    f"config describes scenario {config.scenario!r} but {args.scenario!r} was requested",
                    key="scenario")
    except OSError as exc:
        print(f"plasmon-epr: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"plasmon-epr: {exc}", file=sys.stderr)
        return EXIT_USAGE
    output = dict(config.output)
    if args.out is not None:
        output["dir"] = str(args.out)
    if args.format is not None:
        output["format"] = args.format
    config = replace(config, output=output)

    from .scenarios import run_scenario

    try:
        result = run_scenario(config)
    except ScenarioError as exc:
        print(f"plasmon-epr: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc.cause, InvalidParameterError) else EXIT_NUMERIC
    except OSError as exc:
        print(f"plasmon-epr: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for check in result.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.value:.6g} (tolerance {check.tolerance:.3g})")
    print(f"wrote {len(result.files)} files to {output['dir']} in {result.elapsed:.2f} s", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
