"""
Derivative-free Frenet frames of convergent point sequences,
classical frames from derivatives, and builtin curve samplers
"""

from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from frenet_kit.core.config import EstimatorSettings, settings
from frenet_kit.core.exceptions import (
    DimensionMismatchError,
    InvalidSampleError,
    RankDeficiencyError,
    ValidationError,
)
from frenet_kit.core.logging import get_logger
from frenet_kit.core.utils import angle_between, max_pairwise_angle
from frenet_kit.models.geometry import Frame, as_vector
from frenet_kit.models.sequence import (
    CurveKind,
    CurveSpec,
    FrameEstimate,
    LevelDiagnostics,
    LevelStatus,
    PointSequence,
    SamplePhase,
    SamplePlan,
)
from frenet_kit.services.geometry_core import gram_schmidt, project_onto_span

logger = get_logger(__name__)

_EPS = float(np.finfo(float).eps)


def residual(p, base, prefix: Frame) -> np.ndarray:
    """
    Part of p - base orthogonal to the span of prefix

    Args:
        p: Sample point
        base: Limit point
        prefix: Frame of the levels found so far

    Returns:
        (p - base) - proj_span(prefix)(p - base)

    Raises:
        DimensionMismatchError: If the dimensions disagree
    """
    p = as_vector(p)
    base = as_vector(base)
    if p.size != base.size:
        raise DimensionMismatchError(base.size, p.size)
    offset = p - base
    return offset - project_onto_span(offset, prefix)


def _normalize_against(v: np.ndarray, basis: list[np.ndarray]) -> Optional[np.ndarray]:
    w = v.copy()
    for _ in range(2):
        for q in basis:
            w -= np.dot(q, w) * q
    norm = float(np.linalg.norm(w))
    if norm < _EPS:
        return None
    return w / norm


def _check_sequence(seq: PointSequence, window: int) -> np.ndarray:
    if window > len(seq):
        raise InvalidSampleError(
            f"window {window} is larger than the sequence ({len(seq)} points)",
            {"window": window, "points": len(seq)},
        )
    distances = seq.distances()
    hits = np.flatnonzero(distances == 0.0)
    if hits.size:
        raise InvalidSampleError(
            f"point {int(hits[0])} equals the base point", {"index": int(hits[0])}
        )
    tail = distances[-window:]
    if np.any(np.diff(tail) > 0):
        logger.warning("Distances to the base are not decreasing over the tail")
    return distances


def estimate_frame(
    seq: PointSequence,
    k_max: int,
    cfg: Optional[EstimatorSettings] = None,
) -> FrameEstimate:
    """
    Estimate the Frenet k-frame of a sequence converging to its base

    Level j takes the normalized residuals of x_i - x against the levels
    already found, keeps the samples whose residual clears the error
    inherited from those levels, and averages the last cfg.window of them.

    Args:
        seq: Point sequence in convergence order
        k_max: Highest level to estimate
        cfg: Estimator settings; defaults to settings.estimator

    Returns:
        FrameEstimate holding the converged levels and per-level diagnostics

    Raises:
        InvalidSampleError: If a point equals the base or the window is too large
        ValidationError: If k_max is outside [1, n]
    """
    cfg = cfg or settings.estimator
    if not 1 <= k_max <= seq.dim:
        raise ValidationError("k_max", k_max, f"must lie in [1, {seq.dim}]")
    distances = _check_sequence(seq, cfg.window)

    offsets = seq.offsets
    floor = cfg.floor_factor * float(distances.max())
    magnitude = max(
        float(np.linalg.norm(seq.base)), float(np.linalg.norm(seq.points, axis=1).max())
    )
    # keep rounding-induced angular error an order of magnitude below angle_tol
    rounding = 10.0 * _EPS * magnitude / cfg.angle_tol

    basis: list[np.ndarray] = []
    errors: list[float] = []
    levels: list[LevelDiagnostics] = []

    for level in range(1, k_max + 1):
        U = np.array(basis).reshape(-1, seq.dim)
        coeffs = offsets @ U.T
        residuals = offsets - coeffs @ U
        norms = np.linalg.norm(residuals, axis=1)

        inherited = cfg.noise_factor * (np.abs(coeffs) @ np.array(errors)) if errors else 0.0
        threshold = np.maximum(np.maximum(floor, rounding), inherited)
        indices = np.flatnonzero(norms > threshold)

        if indices.size < cfg.window:
            tail_norms = norms[-cfg.window :]
            status = (
                LevelStatus.RESIDUAL_FLOOR
                if np.all(tail_norms <= max(floor, rounding))
                else LevelStatus.EXHAUSTED
            )
            logger.debug("level %d: %d usable residuals, %s", level, indices.size, status.value)
            levels.append(
                LevelDiagnostics(
                    level=level,
                    status=status,
                    spread=float("nan"),
                    residual_norms=norms,
                    indices=indices,
                )
            )
            break

        directions = residuals[indices] / norms[indices, None]
        tail = directions[-cfg.window :]
        spread, (a, b) = max_pairwise_angle(tail)
        estimate = _normalize_against(tail.mean(axis=0), basis)

        if spread <= cfg.angle_tol and estimate is not None:
            angles = np.array([angle_between(d, estimate) for d in directions])
            levels.append(
                LevelDiagnostics(
                    level=level,
                    status=LevelStatus.CONVERGED,
                    spread=spread,
                    residual_norms=norms,
                    indices=indices,
                    angles=angles,
                )
            )
            basis.append(estimate)
            errors.append(max(spread, 10.0 * _EPS))
            logger.debug("level %d converged, spread %.3e", level, spread)
            continue

        previous = directions[-2 * cfg.window : -cfg.window]
        previous_spread = (
            max_pairwise_angle(previous)[0] if previous.shape[0] >= 2 else None
        )
        diverged = spread > cfg.divergence_angle and (
            previous_spread is None or previous_spread > cfg.divergence_angle
        )
        status = LevelStatus.DIVERGED if diverged else LevelStatus.EXHAUSTED
        levels.append(
            LevelDiagnostics(
                level=level,
                status=status,
                spread=spread,
                residual_norms=norms,
                indices=indices,
                witnesses=np.array([tail[a], tail[b]]) if diverged else None,
            )
        )
        logger.info("level %d %s, tail spread %.3e rad", level, status.value, spread)
        break

    frame = Frame(vectors=np.array(basis).reshape(-1, seq.dim), dim=seq.dim)
    return FrameEstimate(frame=frame, levels=levels)


def classical_frame(derivatives: Sequence) -> Frame:
    """
    Frenet frame of a curve from its derivative vectors at a point

    Args:
        derivatives: phi'(t0), ..., phi^(k)(t0)

    Returns:
        Gram-Schmidt frame of the derivatives

    Raises:
        RankDeficiencyError: If no classical Frenet k-frame exists
    """
    try:
        return gram_schmidt(derivatives)
    except RankDeficiencyError as e:
        logger.info("No classical Frenet %d-frame: %s", len(derivatives), e.message)
        raise


def _evaluate(spec: CurveSpec, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if spec.kind is CurveKind.HELIX:
        return np.column_stack([np.cos(t), np.sin(t), t])
    if spec.kind is CurveKind.CUBIC:
        return np.column_stack([t, t**3])
    if spec.kind is CurveKind.SIN2:
        safe = np.where(t == 0.0, 1.0, t)
        y = np.where(t == 0.0, 0.0, t**2 * np.sin(1.0 / safe))
        return np.column_stack([t, y])
    return np.column_stack([P.polyval(t, row) for row in spec.coefficients])


def curve_derivatives(spec: CurveSpec, t0: float, k: int) -> list[np.ndarray]:
    """
    Analytic derivatives phi'(t0), ..., phi^(k)(t0) of a builtin curve

    Raises:
        InvalidSampleError: If a requested derivative does not exist
    """
    out = []
    for order in range(1, k + 1):
        if spec.kind is CurveKind.HELIX:
            c, s = np.cos(t0), np.sin(t0)
            cycle = [(-s, c, 1.0), (-c, -s, 0.0), (s, -c, 0.0), (c, s, 0.0)]
            out.append(np.array(cycle[(order - 1) % 4]))
        elif spec.kind is CurveKind.CUBIC:
            cubic = P.polyder([0.0, 0.0, 0.0, 1.0], order)
            out.append(np.array([1.0 if order == 1 else 0.0, P.polyval(t0, cubic)]))
        elif spec.kind is CurveKind.SIN2:
            out.append(_sin2_derivative(t0, order))
        else:
            out.append(
                np.array([P.polyval(t0, P.polyder(row, order)) for row in spec.coefficients])
            )
    return out


def _sin2_derivative(t0: float, order: int) -> np.ndarray:
    if t0 == 0.0:
        if order == 1:
            return np.array([1.0, 0.0])
        raise InvalidSampleError(
            f"t^2 sin(1/t) has no derivative of order {order} at 0", {"order": order}
        )
    s, c = np.sin(1.0 / t0), np.cos(1.0 / t0)
    dy = {
        1: 2 * t0 * s - c,
        2: 2 * s - 2 * c / t0 - s / t0**2,
        3: c / t0**4,
    }
    if order not in dy:
        raise InvalidSampleError(
            "derivatives of t^2 sin(1/t) are tabulated up to order 3", {"order": order}
        )
    return np.array([1.0 if order == 1 else 0.0, dy[order]])


def sample_parameters(spec: CurveSpec, plan: SamplePlan) -> np.ndarray:
    """
    Parameters t_i for a sampling plan

    For the sin2 curve a phase other than none snaps each geometric target
    to the nearest t = 1/(2*pi*i + pi/2) (peaks, sin(1/t) = 1) or
    t = 1/(2*pi*i + 3*pi/2) (troughs); mixed alternates the two.
    """
    if plan.phase is SamplePhase.NONE:
        return plan.parameters()
    if spec.kind is not CurveKind.SIN2:
        raise InvalidSampleError("phases apply to the sin2 curve only")
    if plan.t0 != 0.0:
        raise InvalidSampleError("phase sampling of sin2 needs t0 = 0", {"t0": plan.t0})
    targets = plan.parameters()
    params = np.empty(plan.count)
    previous = 0
    for j, target in enumerate(targets):
        trough = plan.phase is SamplePhase.TROUGHS or (
            plan.phase is SamplePhase.MIXED and j % 2 == 1
        )
        offset = 1.5 * np.pi if trough else 0.5 * np.pi
        i = max(1, int(round((1.0 / target - offset) / (2.0 * np.pi))), previous + 1)
        previous = i
        params[j] = 1.0 / (2.0 * np.pi * i + offset)
    return params


def sample_curve(spec: CurveSpec, plan: SamplePlan) -> PointSequence:
    """
    Sample a curve at a sequence of parameters converging to plan.t0

    Args:
        spec: Curve description
        plan: Parameter schedule

    Returns:
        PointSequence with base phi(t0) and points phi(t_i) in order

    Raises:
        InvalidSampleError: If the plan is unusable for the curve
    """
    params = sample_parameters(spec, plan)
    if spec.kind is CurveKind.SIN2 and np.any(params == 0.0):
        raise InvalidSampleError("sin2 parameters must be nonzero")
    base = _evaluate(spec, np.array([plan.t0]))[0]
    points = _evaluate(spec, params)
    keep = np.any(points != base, axis=1)
    if not np.all(keep):
        logger.warning("Dropped %d samples equal to the base point", int(np.sum(~keep)))
    return PointSequence(base=base, points=points[keep])
