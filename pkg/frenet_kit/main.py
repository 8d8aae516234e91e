"""
frenet-kit command-line entry point
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import pydantic

from frenet_kit import __version__
from frenet_kit.cli import curve, flags, frame, tangents
from frenet_kit.cli.common import EXIT_ERROR, EXIT_OK
from frenet_kit.core.config import Settings, build_settings, settings
from frenet_kit.core.exceptions import FrenetKitException, InputFormatError
from frenet_kit.core.logging import configure_logging, get_logger

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frenet-kit",
        description="Frenet frames of point sequences and tangents of sampled sets",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file with settings groups")
    parser.add_argument(
        "--seed", type=int, help="Seed for randomized internals (env FRENET_KIT_SEED)"
    )
    parser.add_argument("--debug", action="store_true", help="Verbose logging")
    subparsers = parser.add_subparsers(dest="command", required=True)
    curve.register(subparsers)
    frame.register(subparsers)
    tangents.register(subparsers)
    flags.register(subparsers)
    return parser


def _checked_sections(path: str, data) -> dict:
    """Check that a config file holds known groups of known keys"""
    if not isinstance(data, dict):
        raise InputFormatError(path, "config file must hold an object of settings groups")
    for name, values in data.items():
        if name not in Settings.model_fields:
            raise InputFormatError(path, f"unknown settings group '{name}'")
        if not isinstance(values, dict):
            raise InputFormatError(path, f"settings group '{name}' must be an object")
        fields = Settings.model_fields[name].annotation.model_fields
        unknown = sorted(set(values) - set(fields))
        if unknown:
            raise InputFormatError(path, f"unknown keys in '{name}': {', '.join(unknown)}")
    return data


def load_settings(path: Optional[str]) -> Settings:
    """
    Settings from the environment, .env and a JSON config file

    A key set in the environment wins over the same key in the file.

    Raises:
        InputFormatError: If the file cannot be read or validated
    """
    if path is None:
        return build_settings()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return build_settings(_checked_sections(path, data))
    except (OSError, json.JSONDecodeError, pydantic.ValidationError) as e:
        raise InputFormatError(path, str(e)) from e


def _apply(groups: dict) -> None:
    for name, group in groups.items():
        setattr(settings, name, group)


def _handle_service_exception(e: Exception) -> int:
    """Report an error on stderr and map it to the error exit code"""
    if isinstance(e, FrenetKitException):
        logger.debug("%s details: %s", e.error_code, e.details)
        print(f"error: {e.message}", file=sys.stderr)
    else:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand

    Returns:
        0 on success, 1 on errors (bad input included), 2 when a frame estimate diverged
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR

    previous = {name: getattr(settings, name) for name in Settings.model_fields}
    try:
        loaded = load_settings(args.config)
        if args.seed is not None:
            loaded.app = loaded.app.model_copy(update={"seed": args.seed})
        if args.debug:
            loaded.app = loaded.app.model_copy(update={"debug": True})
        _apply({name: getattr(loaded, name) for name in Settings.model_fields})
        configure_logging(settings.app.debug)
        logger.debug("Running %s with seed %d", args.command, settings.app.seed)
        return args.handler(args)
    except (FrenetKitException, pydantic.ValidationError) as e:
        return _handle_service_exception(e)
    finally:
        _apply(previous)


if __name__ == "__main__":
    sys.exit(main())
