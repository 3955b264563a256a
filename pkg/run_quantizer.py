#!/usr/bin/env python3
"""
Twist Quantizer Runner
Verification, star-product tables and twist solving from problem files
"""

import sys
import os
import json
import argparse
from pathlib import Path

from colorama import Fore, Style, init as colorama_init

# Add the current directory to Python path
sys.path.insert(0, str(Path(__file__).parent))

from algebra.errors import SchemaError
from config.constants import EXIT_CODES, LOG_LEVELS
from config.settings import config, parse_degree_schedule
from service.pipelines import COMMANDS, Report, dump_json
from service.problem import build_problem, load_problem

STATUS_COLORS = {
    "pass": Fore.GREEN,
    "fail": Fore.RED,
    "skipped": Fore.YELLOW,
}


class UsageError(Exception):
    """Bad command line or configuration; exit code 2"""


def parse_arguments(argv=None):
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(
        description="Exact deformation quantization from Drinfeld twists",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python run_quantizer.py verify data/jordanian.json
  python run_quantizer.py quantize data/moyal.json --order 4 --max-degree 2 --out table.json
  python run_quantizer.py twist-solve data/sl2_triangular.json --schedule 2:4,3:6 --out twist.json
  python run_quantizer.py serve --port 8000
        """
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, help="Truncation order N (arithmetic mod hbar^(N+1))")
    common.add_argument("--seed", type=int, help="Seed for sampled checks")
    common.add_argument("--schedule", type=str, help="Solver degree schedule, e.g. 2:4,3:6")
    common.add_argument("--config", type=str, help="Path to custom configuration file")
    common.add_argument("--out", type=str, help="Write the JSON output to this file")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")

    commands = parser.add_subparsers(dest="command", required=True)
    verify = commands.add_parser("verify", parents=[common], help="Run the structural checks")
    verify.add_argument("problem", help="Problem specification (JSON)")
    quantize = commands.add_parser("quantize", parents=[common], help="Emit a star-product table")
    quantize.add_argument("problem", help="Problem specification (JSON)")
    quantize.add_argument("--max-degree", type=int, help="Largest monomial degree in the table")
    solve = commands.add_parser("twist-solve", parents=[common], help="Solve for a twist order by order")
    solve.add_argument("problem", help="Problem specification (JSON)")
    serve = commands.add_parser("serve", help="Start the HTTP service")
    serve.add_argument("--port", type=int, default=None, help="Port to run the server on (default: 8000)")
    serve.add_argument("--host", type=str, default=None, help="Interface to bind")
    serve.add_argument("--config", type=str, help="Path to custom configuration file")
    serve.add_argument("--debug", action="store_true", help="Enable debug logging")

    return parser.parse_args(argv)


def setup_environment(args):
    """Setup configuration based on arguments"""
    if args.config:
        if not os.path.exists(args.config):
            raise UsageError(f"Configuration file not found: {args.config}")
        with open(args.config, 'r', encoding='utf-8') as f:
            try:
                custom_config = json.load(f)
            except json.JSONDecodeError as e:
                raise UsageError(f"Configuration file is not valid JSON: {e}") from None
            for key, value in custom_config.items():
                config.set(key, value)

    if getattr(args, "order", None) is not None:
        if args.order < 1:
            raise UsageError("--order must be a positive integer")
        config.set("truncation_order", args.order)
    if getattr(args, "seed", None) is not None:
        config.set("seed", args.seed)
    if getattr(args, "max_degree", None) is not None:
        config.set("max_degree", args.max_degree)
    if getattr(args, "schedule", None):
        try:
            parse_degree_schedule(args.schedule)
        except ValueError as e:
            raise UsageError(str(e)) from None
        config.set("degree_schedule", args.schedule)
    if args.debug:
        config.set("log_level", "DEBUG")


def print_banner(args):
    """Print startup banner; stdout is reserved for JSON"""
    print("\n" + "=" * 60, file=sys.stderr)
    print(f"{Style.BRIGHT}Twist Quantizer{Style.RESET_ALL} :: {args.command}", file=sys.stderr)
    print("=" * 60, file=sys.stderr)
    if args.command != "serve":
        print(f"Problem: {args.problem}", file=sys.stderr)
        print(f"Truncation order: {args.order or 'from problem / config'}", file=sys.stderr)
        print(f"Seed: {config.get('seed')}", file=sys.stderr)
        if config.get("degree_schedule"):
            print(f"Degree schedule: {config.get('degree_schedule')}", file=sys.stderr)
    print("=" * 60, file=sys.stderr)


def print_report(report: Report):
    """Colored one-line verdict per check, on stderr"""
    for check in report.checks:
        color = STATUS_COLORS.get(check.status, "")
        line = f"  {color}{check.status.upper():8}{Style.RESET_ALL} {check.name}"
        if check.first_failure_order is not None:
            line += f" (first failure at hbar^{check.first_failure_order})"
        print(line, file=sys.stderr)
    if report.error:
        print(f"  {Fore.RED}ERROR{Style.RESET_ALL}    {report.error['type']}: {report.error['message']}", file=sys.stderr)
    verdict = f"{Fore.GREEN}PASS" if report.passed else f"{Fore.RED}FAIL"
    print(f"\n{Style.BRIGHT}{verdict}{Style.RESET_ALL} (exit code {report.exit_code})", file=sys.stderr)


def write_output(text: str, path: str = None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
        print(f"Wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def run_command(args) -> int:
    """Execute a batch command and return its exit code"""
    spec = load_problem(args.problem)
    problem = build_problem(spec, order=args.order, degree_schedule=config.get_degree_schedule() or None)
    command = COMMANDS[args.command]
    if args.command == "quantize":
        report = command(problem, max_degree=config.get("max_degree"), seed=config.get("seed"))
    else:
        report = command(problem, seed=config.get("seed"))
    print_report(report)
    if args.command == "twist-solve" and args.out:
        if report.twist is not None:
            write_output(dump_json(report.twist), args.out)
        sys.stdout.write(report.to_json())
    else:
        write_output(report.to_json(), args.out)
    return report.exit_code


def serve(args):
    import uvicorn
    from service.app import app

    port = args.port or config.get("port")
    host = args.host or config.get("host")
    print(f"Serving on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level=LOG_LEVELS.get(config.get("log_level").upper(), "info"))
    return EXIT_CODES["PASS"]


def main(argv=None) -> int:
    """Main function; returns the process exit code"""
    colorama_init()
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return EXIT_CODES["PASS"] if e.code == 0 else EXIT_CODES["USAGE"]

    try:
        setup_environment(args)
        from service.app import configure_logging
        configure_logging()
        print_banner(args)
        if args.command == "serve":
            return serve(args)
        return run_command(args)
    except (UsageError, SchemaError) as e:
        print(f"\n{Fore.RED}Usage error:{Style.RESET_ALL} {e}", file=sys.stderr)
        if getattr(e, "witness", None):
            print(json.dumps(e.witness, indent=2, default=str), file=sys.stderr)
        return EXIT_CODES["USAGE"]


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\nStopped by user")
        sys.exit(EXIT_CODES["CHECK_FAILED"])
