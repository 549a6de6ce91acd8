"""
Command-line entry point.

Run with:
    python -m svineq <command> [options]
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from svineq.api.cli import add_commands, render
from svineq.config import get_settings
from svineq.core.errors import SvineqError
from svineq.models.schemas import ErrorResponse

EXIT_USAGE = 2


def configure_logging() -> None:
    """Structured logging to stderr; stdout is reserved for reports."""
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s | %(levelname)-7s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description=(
            "Numerically check singular-value inequalities: generalised Mirsky, "
            "Thompson-Freede and their concave f-versions."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    add_commands(subparsers)
    return parser


def _fail(error: str, detail: str) -> int:
    sys.stderr.write(ErrorResponse(error=error, detail=detail).model_dump_json() + "\n")
    return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse ``argv``, run the command and return its exit code.

    0: every evaluated inequality held. 1: a violation was found.
    2: usage or input error, reported as an ``ErrorResponse`` on stderr.
    """
    configure_logging()
    logger = logging.getLogger(__name__)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE

    try:
        result, code = args.main(args)
        text = render(result, args.format)
        if args.out:
            path = Path(args.out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except ValidationError as exc:
        logger.error("Invalid input: %s", exc.error_count())
        return _fail("validation_error", str(exc))
    except SvineqError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return _fail(type(exc).__name__, str(exc))
    except (ValueError, OSError) as exc:
        logger.error("Input error: %s", exc)
        return _fail("input_error", str(exc))

    logger.debug("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
