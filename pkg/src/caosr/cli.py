"""Command-line front end: run scenarios, execute presets, validate files.

Exit codes: 0 success, 1 usage error, 2 scenario validation error,
3 runtime abort (strict-mode protocol violation or I/O failure).
"""

import argparse
import os
import sys
from dataclasses import replace

from . import engine
from .errors import CaosrError, ScenarioError, UnknownPreset
from .presets import PRESET_NAMES, execute_preset, preset
from .scenario import load_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_out() -> str:
    return os.environ.get("CAOSR_OUT", "out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="caosr", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_cmd = commands.add_parser("run", help="execute one scenario")
    run_cmd.add_argument("--scenario", required=True, help="scenario file path")
    run_cmd.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run_cmd.add_argument("--out", default=None, help="output directory (default $CAOSR_OUT or ./out)")
    run_cmd.add_argument("--strict", action="store_true", help="abort on protocol violations")

    preset_cmd = commands.add_parser("preset", help="execute a figure preset")
    preset_cmd.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    preset_cmd.add_argument("--out", default=None, help="output directory (default $CAOSR_OUT or ./out)")
    preset_cmd.add_argument("--seed", type=int, default=42)

    validate_cmd = commands.add_parser("validate", help="parse and validate a scenario file")
    validate_cmd.add_argument("--scenario", required=True, help="scenario file path")

    return parser


def _cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"caosr: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ScenarioError as exc:
        print(f"caosr: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.seed is not None:
        scenario.seed = args.seed
    if args.strict:
        scenario.strict = True
    try:
        result = engine.run(scenario)
        paths = engine.emit(result, args.out or _default_out())
    except CaosrError as exc:
        print(f"caosr: run aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"caosr: cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    contacts = result.metrics.contacts
    print(f"run complete: {result.registered} registered nodes, "
          f"{contacts.n_tc} contacts, {len(result.metrics.exchanges)} exchanges")
    for kind in ("metrics", "contacts", "scenario", "manifest"):
        if kind in paths:
            print(f"  {kind}: {paths[kind]}")
    return EXIT_OK


def _cmd_preset(args) -> int:
    try:
        plan = preset(args.name, seed=args.seed)
    except UnknownPreset as exc:
        print(f"caosr: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = args.out or _default_out()
    try:
        rows, _ = execute_preset(plan, out_dir)
    except CaosrError as exc:
        print(f"caosr: preset aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"caosr: cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{plan.name}: {plan.description}")
    print(f"  {len(plan.runs)} runs, {len(rows)} summary rows")
    print(f"  summary: {os.path.join(out_dir, plan.name + '.csv')}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"caosr: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ScenarioError as exc:
        print(f"caosr: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"scenario ok: {scenario.total_nodes()} nodes, "
          f"duration {scenario.duration / 1_000_000:.1f}s, seed {scenario.seed}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handlers = {"run": _cmd_run, "preset": _cmd_preset, "validate": _cmd_validate}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
