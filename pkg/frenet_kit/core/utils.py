"""
Utility functions for frenet-kit
"""

from typing import Optional

import numpy as np

from frenet_kit.core.config import settings
from frenet_kit.models.geometry import Frame, as_vector
from frenet_kit.models.sequence import (
    CurveKind,
    CurveSpec,
    FrameEstimate,
    PointSequence,
    SamplePlan,
)
from frenet_kit.models.tangent import OutgoingReport, SampledSet, TangentReport
from frenet_kit.models.witness import PLFormula, PLTerm, RatioTable
from frenet_kit.schemas.sequence import (
    ClassicalComparison,
    CurveSpecSchema,
    FrameEstimateReport,
    LevelReport,
    PointSequenceFile,
    SamplePlanSchema,
)
from frenet_kit.schemas.tangent import (
    OutgoingReportSchema,
    PolyhedralTrendSchema,
    SampledSetFile,
    TangentAnalysisSchema,
    TangentRecordSchema,
    TangentReportSchema,
)
from frenet_kit.schemas.witness import (
    PLFormulaSchema,
    PLTermSchema,
    RatioRowSchema,
    RatioTableSchema,
)


def angle_between(a: np.ndarray, b: np.ndarray) -> float:
    """
    Angle between two vectors, accurate for small angles

    Args:
        a: Nonzero vector
        b: Nonzero vector

    Returns:
        Angle in radians in [0, pi]
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(2.0 * np.arcsin(min(1.0, np.linalg.norm(a - b) / 2.0)))


def pairwise_angles(directions: np.ndarray) -> np.ndarray:
    """Matrix of angles between unit row vectors"""
    diff = directions[:, None, :] - directions[None, :, :]
    chords = np.linalg.norm(diff, axis=2) / 2.0
    return 2.0 * np.arcsin(np.clip(chords, 0.0, 1.0))


def max_pairwise_angle(directions: np.ndarray) -> tuple[float, tuple[int, int]]:
    """
    Largest angle among unit row vectors and the pair attaining it

    Returns:
        (angle, (i, j)) with i < j; (0.0, (0, 0)) for fewer than two rows
    """
    if directions.shape[0] < 2:
        return 0.0, (0, 0)
    angles = pairwise_angles(directions)
    i, j = np.unravel_index(int(np.argmax(angles)), angles.shape)
    return float(angles[i, j]), (int(min(i, j)), int(max(i, j)))


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """
    Random generator for all randomized internals

    Args:
        seed: Explicit seed; falls back to settings.app.seed

    Returns:
        numpy Generator
    """
    return np.random.default_rng(settings.app.seed if seed is None else seed)


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random proper rotation matrix"""
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def sequence_from_schema(data: PointSequenceFile) -> PointSequence:
    """Build a PointSequence from its file schema"""
    points = np.array(data.points, dtype=float).reshape(len(data.points), data.dim)
    return PointSequence(base=data.base, points=points)


def sequence_to_schema(seq: PointSequence) -> PointSequenceFile:
    return PointSequenceFile(
        schema_version=settings.app.schema_version,
        dim=seq.dim,
        base=seq.base.tolist(),
        points=seq.points.tolist(),
    )


def sampled_set_from_schema(data: SampledSetFile) -> SampledSet:
    """Build a SampledSet from its file schema"""
    return SampledSet(points=np.array(data.points, dtype=float), bases=data.bases)


def sampled_set_to_schema(S: SampledSet) -> SampledSetFile:
    return SampledSetFile(
        schema_version=settings.app.schema_version,
        dim=S.dim,
        points=S.points.tolist(),
        bases=None if S.bases is None else S.bases.tolist(),
    )


def curve_from_schema(data: CurveSpecSchema) -> CurveSpec:
    """
    Build a CurveSpec, filling in the dimension of builtin curves

    Args:
        data: Validated curve schema

    Returns:
        CurveSpec domain value
    """
    fixed = {CurveKind.HELIX: 3, CurveKind.CUBIC: 2, CurveKind.SIN2: 2}
    if data.kind is CurveKind.POLYNOMIAL:
        rows = data.coefficients or []
        return CurveSpec(kind=data.kind, dim=data.dim or len(rows), coefficients=rows)
    return CurveSpec(kind=data.kind, dim=data.dim or fixed[data.kind])


def plan_from_schema(data: SamplePlanSchema) -> SamplePlan:
    return SamplePlan(
        t0=data.t0, ratio=data.ratio, count=data.count, t_start=data.t_start, phase=data.phase
    )


def estimate_to_report(
    estimate: FrameEstimate, classical: Optional[ClassicalComparison] = None
) -> FrameEstimateReport:
    """
    Convert a FrameEstimate to its report schema

    Args:
        estimate: Estimator output
        classical: Optional comparison with the analytic frame

    Returns:
        FrameEstimateReport
    """
    levels = [
        LevelReport(
            level=lvl.level,
            status=lvl.status,
            spread=None if np.isnan(lvl.spread) else lvl.spread,
            residual_norms=lvl.residual_norms.tolist(),
            indices=lvl.indices.tolist(),
            angles=lvl.angles.tolist(),
            witnesses=None if lvl.witnesses is None else lvl.witnesses.tolist(),
        )
        for lvl in estimate.levels
    ]
    return FrameEstimateReport(
        schema_version=settings.app.schema_version,
        dim=estimate.frame.dim,
        k=estimate.k,
        frame=estimate.frame.to_list(),
        levels=levels,
        diverged=estimate.diverged,
        classical=classical,
    )


def outgoing_to_schema(report: OutgoingReport) -> OutgoingReportSchema:
    return OutgoingReportSchema(
        scales=np.asarray(report.scales).tolist(),
        count_c=report.count_c,
        count_facet=report.count_facet,
        verdict=report.verdict,
        witness_indices=np.asarray(report.witness_indices).tolist(),
        tail_in_ball=report.tail_in_ball,
        ball_radius=report.ball_radius,
    )


def tangent_report_to_schema(report: TangentReport) -> TangentReportSchema:
    """Convert a TangentReport with all records and verdicts to its schema"""
    analyses = []
    for analysis in report.analyses:
        records = [
            TangentRecordSchema(
                base=rec.base.tolist(),
                frame=rec.frame.to_list(),
                k=rec.k,
                determining_indices=rec.determining_indices.tolist(),
                outgoing=rec.outgoing,
                on_affine_hull=rec.on_affine_hull,
                prefix_indices=[np.asarray(p).tolist() for p in rec.prefix_indices],
                report=outgoing_to_schema(out),
                prefix_reports=[outgoing_to_schema(p) for p in prefixes],
            )
            for rec, out, prefixes in zip(
                analysis.records, analysis.reports, analysis.prefix_reports
            )
        ]
        analyses.append(TangentAnalysisSchema(base=analysis.base.tolist(), records=records))
    trend = None
    if report.trend is not None:
        trend = PolyhedralTrendSchema(
            sizes=report.trend.sizes, counts=report.trend.counts, verdict=report.trend.verdict
        )
    return TangentReportSchema(
        schema_version=settings.app.schema_version,
        analyses=analyses,
        extreme_indices=report.extreme_indices.tolist(),
        trend=trend,
        outgoing_found=report.outgoing_found,
        semisimple_surrogate=report.semisimple_surrogate,
    )


def formula_to_schema(f: PLFormula) -> PLFormulaSchema:
    return PLFormulaSchema(
        kind=f.kind,
        base=f.base.tolist(),
        frame=f.frame.to_list(),
        k=f.k,
        scales=f.scales.tolist(),
        terms=[
            PLTermSchema(op=t.op, coeffs=t.coeffs.tolist(), offset=t.offset) for t in f.terms
        ],
    )


def formula_from_schema(data: PLFormulaSchema) -> PLFormula:
    """Rebuild a witness formula from its JSON term list"""
    frame = Frame.of(data.frame, dim=len(data.base))
    return PLFormula(
        base=as_vector(data.base),
        frame=frame,
        k=data.k,
        scales=np.array(data.scales, dtype=float),
        kind=data.kind,
        terms=[
            PLTerm(op=t.op, coeffs=np.array(t.coeffs, dtype=float), offset=t.offset)
            for t in data.terms
        ],
    )


def ratio_table_to_schema(table: RatioTable) -> RatioTableSchema:
    rows = [
        RatioRowSchema(multiplier=m, value=float(v), argmax=int(i))
        for m, v, i in zip(table.multipliers, table.values, table.argmax)
    ]
    return RatioTableSchema(
        rows=rows,
        applicable=table.applicable,
        certified_at=table.certified_at,
        message=table.message,
    )
