"""
frame subcommands: estimate Frenet frames of point sequences
"""

import argparse
import json
from typing import Optional

import pandas as pd

from frenet_kit.cli.common import EXIT_DIVERGED, EXIT_OK, read_model, write_csv, write_model
from frenet_kit.core.exceptions import InvalidSampleError, RankDeficiencyError, ValidationError
from frenet_kit.core.logging import get_logger
from frenet_kit.core.utils import (
    angle_between,
    curve_from_schema,
    estimate_to_report,
    sequence_from_schema,
)
from frenet_kit.models.sequence import CurveKind, FrameEstimate
from frenet_kit.schemas.sequence import ClassicalComparison, CurveSpecSchema, PointSequenceFile
from frenet_kit.services.frame_estimator import (
    classical_frame,
    curve_derivatives,
    estimate_frame,
)

logger = get_logger(__name__)


def register(subparsers) -> None:
    frame = subparsers.add_parser("frame", help="Frenet frame estimation")
    commands = frame.add_subparsers(dest="frame_command", required=True)

    estimate = commands.add_parser("estimate", help="Estimate the Frenet frame of a sequence")
    estimate.add_argument("--input", required=True, help="PointSequence JSON")
    estimate.add_argument("--k", type=int, help="Highest level (default: dimension)")
    estimate.add_argument("--out", help="Report JSON (stdout if omitted)")
    estimate.add_argument("--csv", help="Angle-vs-index CSV for plotting")
    estimate.add_argument(
        "--compare-classical",
        action="store_true",
        help="Compare with the analytic frame of a builtin curve",
    )
    estimate.add_argument(
        "--kind", choices=[k.value for k in CurveKind], help="Curve behind the sequence"
    )
    estimate.add_argument("--t0", type=float, default=0.0, help="Base parameter of the curve")
    estimate.add_argument("--coeffs", help="Polynomial coefficients as JSON")
    estimate.set_defaults(handler=cmd_frame_estimate)


def angle_table(estimate: FrameEstimate) -> pd.DataFrame:
    """Long-form table (level, index, angle) of residual angles to each converged level"""
    frames = [
        pd.DataFrame({"level": lvl.level, "index": lvl.indices, "angle": lvl.angles})
        for lvl in estimate.levels
        if lvl.angles.size
    ]
    if not frames:
        return pd.DataFrame(columns=["level", "index", "angle"])
    return pd.concat(frames, ignore_index=True)


def compare_classical(
    estimate: FrameEstimate, kind: str, t0: float, coeffs: Optional[str], k: int
) -> ClassicalComparison:
    """
    Per-level angle between the estimate and the classical Frenet frame

    The classical frame may not exist; the comparison then records the
    level of the rank deficiency, or a note when the derivatives are missing.
    """
    try:
        raw = json.loads(coeffs) if coeffs else None
    except json.JSONDecodeError as e:
        raise ValidationError("coeffs", coeffs, f"not valid JSON: {e.msg}") from e
    spec = curve_from_schema(CurveSpecSchema(kind=kind, coefficients=raw))
    try:
        derivatives = curve_derivatives(spec, t0, k)
    except InvalidSampleError as e:
        logger.warning("No classical comparison: %s", e.message)
        return ClassicalComparison(note=e.message)
    try:
        classical = classical_frame(derivatives)
    except RankDeficiencyError as e:
        return ClassicalComparison(rank_deficient_at=e.index, note=e.message)
    angles = [angle_between(a, b) for a, b in zip(estimate.frame, classical)]
    return ClassicalComparison(angles=angles, classical_frame=classical.to_list())


def cmd_frame_estimate(args: argparse.Namespace) -> int:
    """
    Estimate a frame and write the report

    Returns:
        EXIT_DIVERGED when some level diverged, EXIT_OK otherwise
    """
    seq = sequence_from_schema(read_model(args.input, PointSequenceFile))
    k = args.k or seq.dim
    estimate = estimate_frame(seq, k)

    classical = None
    if args.compare_classical:
        if args.kind is None:
            raise ValidationError("kind", None, "--compare-classical needs --kind")
        classical = compare_classical(estimate, args.kind, args.t0, args.coeffs, k)

    write_model(estimate_to_report(estimate, classical), args.out)
    if args.csv:
        write_csv(angle_table(estimate), args.csv)

    logger.info(
        "Estimated %d of %d levels: %s",
        estimate.k,
        k,
        ", ".join(s.value for s in estimate.statuses),
    )
    return EXIT_DIVERGED if estimate.diverged else EXIT_OK
