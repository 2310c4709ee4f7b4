"""
symnf command line — `symnf <command> [INPUT] [options]`.

Reads one JSON payload (file or stdin), writes one JSON report (file or
stdout). Exit codes: 0 ok, 1 internal error, 2 usage, 3 precondition,
4 resonance, 5 I/O or schema.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import structlog

from . import __version__
from .codec import parse
from .commands import list_commands, names, run_command
from .errors import NormalFormError, PreconditionError, ResonanceError, SchemaError
from .logging import setup_logging
from .models import RunOptions

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_RESONANCE = 4
EXIT_IO = 5


def dumps(report: Any) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, SchemaError | OSError | json.JSONDecodeError):
        return EXIT_IO
    if isinstance(exc, ResonanceError):
        return EXIT_RESONANCE
    if isinstance(exc, PreconditionError):
        return EXIT_PRECONDITION
    return EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symnf",
        description="Symplectic logarithms and classical / quantum Birkhoff normal forms on jets",
        epilog="\n".join(f"  {c['id']:<10} {c['description']}" for c in list_commands()),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"symnf {__version__}")
    parser.add_argument("command", choices=names(), help="stage to run")
    parser.add_argument("input", nargs="?", default="-", help="JSON input file, '-' for stdin")
    parser.add_argument("--trunc", type=int, help="N: max total degree in ρ")
    parser.add_argument("--h-trunc", type=int, help="M: max power of h")
    parser.add_argument("--field", choices=["exact", "float"], help="coefficient field")
    parser.add_argument("--tol", type=float, help="float zero / resonance tolerance")
    parser.add_argument("--branch", choices=["principal"], help="logarithm branch rule")
    parser.add_argument("--homotopy", choices=["exponential", "linear"], default="exponential")
    parser.add_argument("--winding", type=int, default=0, help="branch of log a₀(0)")
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")
    return parser


def _options(args: argparse.Namespace) -> RunOptions:
    fields = ("trunc", "h_trunc", "field", "tol", "branch", "homotopy", "winding")
    return parse(RunOptions, {k: getattr(args, k) for k in fields}, prefix=("options",))


def _read(path: str) -> Any:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    setup_logging(args.log_level)

    try:
        options = _options(args)
        report = run_command(args.command, _read(args.input), options)
        _write(args.out, dumps(report))
    except NormalFormError as exc:
        code = exit_code(exc)
        logger.error("command_failed", command=args.command, exit_code=code, **exc.to_dict())
        sys.stdout.write(dumps({"error": exc.to_dict()}))
        return code
    except (OSError, json.JSONDecodeError) as exc:
        logger.error("io_failed", command=args.command, error=str(exc))
        return EXIT_IO
    except Exception:
        logger.exception("command_crashed", command=args.command)
        return EXIT_INTERNAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
