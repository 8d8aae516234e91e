"""
Point sequences, curve sampling plans and frame estimates
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from frenet_kit.core.exceptions import DimensionMismatchError, InvalidSampleError
from frenet_kit.models.geometry import Frame, as_vector


class CurveKind(str, Enum):
    """Builtin curve families"""

    HELIX = "helix"
    CUBIC = "cubic"
    SIN2 = "sin2"
    POLYNOMIAL = "polynomial"


class SamplePhase(str, Enum):
    """Parameter selection for the sin2 curve"""

    NONE = "none"
    PEAKS = "peaks"
    TROUGHS = "troughs"
    MIXED = "mixed"


class LevelStatus(str, Enum):
    """Outcome of estimating one frame level"""

    CONVERGED = "converged"
    DIVERGED = "diverged"
    RESIDUAL_FLOOR = "residual_floor"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True, eq=False)
class PointSequence:
    """Points x_i listed in convergence order towards base"""

    base: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        base = as_vector(self.base)
        pts = np.array(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, base.size)
        if pts.ndim != 2:
            raise InvalidSampleError("points must be a list of vectors")
        if pts.shape[1] != base.size:
            raise DimensionMismatchError(base.size, pts.shape[1], "sequence point")
        if not np.all(np.isfinite(pts)):
            raise InvalidSampleError("points must have finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.base.size

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def offsets(self) -> np.ndarray:
        return self.points - self.base

    def distances(self) -> np.ndarray:
        return np.linalg.norm(self.offsets, axis=1)

    def subsequence(self, indices) -> "PointSequence":
        return PointSequence(base=self.base, points=self.points[list(indices)])


def _coefficient_matrix(rows) -> np.ndarray:
    """Coefficient rows as a matrix, shorter rows padded with zeros"""
    if isinstance(rows, np.ndarray):
        rows = np.atleast_2d(rows)
    try:
        rows = [np.atleast_1d(np.asarray(row, dtype=float)) for row in rows]
    except (TypeError, ValueError) as e:
        raise InvalidSampleError(f"coefficients must be numeric rows: {e}") from e
    if not rows or any(row.ndim != 1 for row in rows):
        raise InvalidSampleError("coefficients must be a nonempty list of numeric rows")
    if not all(np.all(np.isfinite(row)) for row in rows):
        raise InvalidSampleError("coefficients must be finite")
    width = max(row.size for row in rows)
    return np.array([np.pad(row, (0, width - row.size)) for row in rows])


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """A builtin curve or a polynomial curve given by coefficient rows"""

    kind: CurveKind
    dim: int
    # row r holds the coefficients of coordinate r, lowest degree first
    coefficients: Optional[np.ndarray] = None

    def __post_init__(self):
        kind = CurveKind(self.kind)
        object.__setattr__(self, "kind", kind)
        expected = {CurveKind.HELIX: 3, CurveKind.CUBIC: 2, CurveKind.SIN2: 2}
        if kind in expected and self.dim != expected[kind]:
            raise InvalidSampleError(
                f"{kind.value} curve lives in dimension {expected[kind]}",
                {"kind": kind.value, "dim": self.dim},
            )
        if kind is CurveKind.POLYNOMIAL:
            if self.coefficients is None:
                raise InvalidSampleError("polynomial curve needs a coefficient matrix")
            coeffs = _coefficient_matrix(self.coefficients)
            if coeffs.shape[0] != self.dim:
                raise InvalidSampleError(
                    "coefficient matrix must have one row per coordinate",
                    {"rows": coeffs.shape[0], "dim": self.dim},
                )
            coeffs.setflags(write=False)
            object.__setattr__(self, "coefficients", coeffs)


@dataclass(frozen=True)
class SamplePlan:
    """Geometric parameter schedule t_i = t0 + (t_start - t0) * ratio**i"""

    t0: float = 0.0
    ratio: float = 0.5
    count: int = 20
    t_start: float = 0.5
    phase: SamplePhase = SamplePhase.NONE

    def __post_init__(self):
        object.__setattr__(self, "phase", SamplePhase(self.phase))
        if not 0 < self.ratio < 1:
            raise InvalidSampleError("ratio must lie in (0, 1)", {"ratio": self.ratio})
        if self.count < 3:
            raise InvalidSampleError("count must be at least 3", {"count": self.count})
        if self.phase is SamplePhase.NONE and not self.t_start > self.t0:
            raise InvalidSampleError(
                "t_start must exceed t0", {"t0": self.t0, "t_start": self.t_start}
            )

    def parameters(self) -> np.ndarray:
        i = np.arange(self.count, dtype=float)
        return self.t0 + (self.t_start - self.t0) * self.ratio**i


@dataclass(frozen=True, eq=False)
class LevelDiagnostics:
    """Per-level record of the estimator"""

    level: int
    status: LevelStatus
    spread: float
    residual_norms: np.ndarray
    # sample indices whose residual cleared the noise threshold, and the
    # angle of each one's normalized residual to the level estimate
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    angles: np.ndarray = field(default_factory=lambda: np.zeros(0))
    witnesses: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class FrameEstimate:
    """Frame levels achieved plus per-level diagnostics"""

    frame: Frame
    levels: list[LevelDiagnostics]

    @property
    def k(self) -> int:
        return self.frame.k

    @property
    def statuses(self) -> list[LevelStatus]:
        return [lvl.status for lvl in self.levels]

    @property
    def diverged(self) -> bool:
        return LevelStatus.DIVERGED in self.statuses
