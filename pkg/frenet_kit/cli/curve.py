"""
curve subcommands: sample builtin and polynomial curves
"""

import argparse
import json

from frenet_kit.cli.common import EXIT_OK, write_model
from frenet_kit.core.exceptions import ValidationError
from frenet_kit.core.logging import get_logger
from frenet_kit.core.utils import (
    curve_from_schema,
    plan_from_schema,
    sequence_to_schema,
)
from frenet_kit.models.sequence import CurveKind, SamplePhase
from frenet_kit.schemas.sequence import CurveSpecSchema, SamplePlanSchema
from frenet_kit.services.frame_estimator import sample_curve

logger = get_logger(__name__)


def register(subparsers) -> None:
    curve = subparsers.add_parser("curve", help="Curve sampling")
    commands = curve.add_subparsers(dest="curve_command", required=True)

    sample = commands.add_parser("sample", help="Sample a curve along a geometric schedule")
    sample.add_argument(
        "--kind", required=True, choices=[k.value for k in CurveKind], help="Curve family"
    )
    sample.add_argument("--t0", type=float, default=0.0, help="Base parameter")
    sample.add_argument("--t-start", type=float, default=0.5, help="First parameter")
    sample.add_argument("--ratio", type=float, default=0.5, help="Geometric ratio in (0, 1)")
    sample.add_argument("--count", type=int, default=20, help="Number of samples")
    sample.add_argument(
        "--phase",
        default=SamplePhase.NONE.value,
        choices=[p.value for p in SamplePhase],
        help="Parameter snapping for the sin2 curve",
    )
    sample.add_argument(
        "--coeffs",
        help="Polynomial coefficients as JSON, one row per coordinate, lowest degree first",
    )
    sample.add_argument("--dim", type=int, help="Ambient dimension for polynomial curves")
    sample.add_argument("--out", help="Output PointSequence JSON (stdout if omitted)")
    sample.set_defaults(handler=cmd_curve_sample)


def _parse_coeffs(raw: str | None):
    if raw is None:
        return None
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise ValidationError("coeffs", raw, f"not valid JSON: {e.msg}") from e


def cmd_curve_sample(args: argparse.Namespace) -> int:
    """
    Sample a curve and write the point sequence

    Returns:
        Exit code
    """
    spec = curve_from_schema(
        CurveSpecSchema(kind=args.kind, dim=args.dim, coefficients=_parse_coeffs(args.coeffs))
    )
    plan = plan_from_schema(
        SamplePlanSchema(
            t0=args.t0,
            ratio=args.ratio,
            count=args.count,
            t_start=args.t_start,
            phase=args.phase,
        )
    )
    seq = sample_curve(spec, plan)
    logger.info("Sampled %d points of the %s curve", len(seq), spec.kind.value)
    write_model(sequence_to_schema(seq), args.out)
    return EXIT_OK
