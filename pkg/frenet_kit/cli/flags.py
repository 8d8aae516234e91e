"""
flags subcommands: intersections of flag simplices
"""

import argparse
import json

import numpy as np

from frenet_kit.cli.common import EXIT_OK, write_model
from frenet_kit.core.config import settings
from frenet_kit.core.exceptions import FlagMismatchError, ValidationError
from frenet_kit.core.logging import get_logger
from frenet_kit.models.geometry import FlagSimplex, Frame
from frenet_kit.schemas.witness import FlagIntersectionReport
from frenet_kit.services.geometry_core import intersect_flags, intersect_flags_by_steps

logger = get_logger(__name__)


def register(subparsers) -> None:
    flags = subparsers.add_parser("flags", help="Flag simplex operations")
    commands = flags.add_subparsers(dest="flags_command", required=True)

    intersect = commands.add_parser("intersect", help="Intersect two flags on one base and frame")
    intersect.add_argument("--lambda", dest="lam", type=float, nargs="+", required=True)
    intersect.add_argument("--mu", type=float, nargs="+", required=True)
    intersect.add_argument(
        "--base", type=float, nargs="+", help="Base point (default: origin of R^k)"
    )
    intersect.add_argument(
        "--frame", help="Frame vectors as JSON rows (default: first standard basis vectors)"
    )
    intersect.add_argument(
        "--verify", action="store_true", help="Cross-check with the step recursion"
    )
    intersect.add_argument("--out", help="Report JSON (stdout if omitted)")
    intersect.set_defaults(handler=cmd_flags_intersect)


def _frame_rows(args: argparse.Namespace):
    if args.frame is None:
        return None
    try:
        return json.loads(args.frame)
    except json.JSONDecodeError as e:
        raise ValidationError("frame", args.frame, f"not valid JSON: {e.msg}") from e


def cmd_flags_intersect(args: argparse.Namespace) -> int:
    """
    Print the intersection scales nu of two flags

    Returns:
        Exit code

    Raises:
        FlagMismatchError: If the two scale vectors or the frame do not match
    """
    if len(args.lam) != len(args.mu):
        raise FlagMismatchError(f"frame lengths {len(args.lam)} and {len(args.mu)} differ")
    k = len(args.lam)
    rows = _frame_rows(args)
    if args.base is not None:
        base = np.array(args.base, dtype=float)
    else:
        base = np.zeros(len(rows[0]) if rows else k)
    frame = Frame.of(np.eye(base.size)[:k] if rows is None else rows, dim=base.size)
    A = FlagSimplex(base=base, frame=frame, scales=args.lam)
    B = FlagSimplex(base=base, frame=frame, scales=args.mu)
    nu = intersect_flags(A, B).scales

    verified, by_steps = None, None
    if args.verify:
        by_steps = intersect_flags_by_steps(A, B).scales
        verified = bool(np.allclose(nu, by_steps, rtol=0.0, atol=settings.geometry.tol_bary))
        logger.info("Step recursion %s the closed form", "agrees with" if verified else "differs from")

    write_model(
        FlagIntersectionReport(
            schema_version=settings.app.schema_version,
            base=base.tolist(),
            frame=frame.to_list(),
            lam=list(args.lam),
            mu=list(args.mu),
            nu=nu.tolist(),
            verified=verified,
            nu_by_steps=None if by_steps is None else by_steps.tolist(),
        ),
        args.out,
    )
    return EXIT_OK
