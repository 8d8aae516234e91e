"""
Pydantic schemas for point sequences, curve sampling and frame estimate reports
"""

from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from frenet_kit.models.sequence import CurveKind, LevelStatus, SamplePhase

SCHEMA_VERSION = "1.0"


def _check_rows(points: List[List[float]], dim: int, what: str) -> None:
    for row in points:
        if len(row) != dim:
            raise ValueError(f"every {what} must have {dim} coordinates, got {len(row)}")


class PointSequenceFile(BaseModel):
    """Point sequence converging to a base point"""

    schema_version: Optional[str] = Field(
        default=SCHEMA_VERSION, description="File format version"
    )
    dim: int = Field(..., ge=1, description="Ambient dimension", examples=[2, 3])
    base: List[float] = Field(..., description="Accumulation point x", examples=[[0.0, 0.0]])
    points: List[List[float]] = Field(
        ..., description="Points x_i in convergence order", examples=[[[0.5, 0.125]]]
    )

    @model_validator(mode="after")
    def validate_dimensions(self):
        _check_rows([self.base], self.dim, "base")
        _check_rows(self.points, self.dim, "point")
        return self


class CurveSpecSchema(BaseModel):
    """Curve to sample"""

    kind: CurveKind = Field(..., description="Builtin curve family")
    dim: Optional[int] = Field(
        default=None, ge=1, description="Ambient dimension (fixed for builtin curves)"
    )
    coefficients: Optional[List[List[float]]] = Field(
        default=None,
        description="Polynomial coefficients, one row per coordinate, lowest degree first",
        examples=[[[0.0, 1.0], [0.0, 0.0, 0.0, 1.0]]],
    )

    @model_validator(mode="after")
    def validate_polynomial(self):
        if self.kind is CurveKind.POLYNOMIAL and not self.coefficients:
            raise ValueError("polynomial curves need coefficients")
        return self


class SamplePlanSchema(BaseModel):
    """Parameter schedule t_i = t0 + (t_start - t0) * ratio**i"""

    t0: float = Field(default=0.0, description="Base parameter")
    ratio: float = Field(default=0.5, description="Geometric ratio in (0, 1)")
    count: int = Field(default=20, description="Number of samples")
    t_start: float = Field(default=0.5, description="First parameter")
    phase: SamplePhase = Field(
        default=SamplePhase.NONE, description="Parameter snapping for the sin2 curve"
    )

    @field_validator("ratio")
    @classmethod
    def validate_ratio(cls, v):
        if not 0 < v < 1:
            raise ValueError("ratio must lie in (0, 1)")
        return v

    @field_validator("count")
    @classmethod
    def validate_count(cls, v):
        if v < 3:
            raise ValueError("count must be at least 3")
        return v

    @model_validator(mode="after")
    def validate_start(self):
        if self.phase is SamplePhase.NONE and not self.t_start > self.t0:
            raise ValueError("t_start must exceed t0")
        return self


class LevelReport(BaseModel):
    """Diagnostics of one estimated level"""

    level: int = Field(..., ge=1, description="1-based frame level")
    status: LevelStatus = Field(..., description="Level outcome")
    spread: Optional[float] = Field(
        default=None, ge=0, description="Max pairwise angle (rad) of the tail; unset without a tail"
    )
    residual_norms: List[float] = Field(
        default_factory=list, description="Residual norm of every sample at this level"
    )
    indices: List[int] = Field(
        default_factory=list, description="Samples whose residual cleared the noise threshold"
    )
    angles: List[float] = Field(
        default_factory=list, description="Angle of each such residual to the level estimate"
    )
    witnesses: Optional[List[List[float]]] = Field(
        default=None, description="Two directions far apart, reported on divergence"
    )


class ClassicalComparison(BaseModel):
    """Estimated frame against the analytic Frenet frame of a builtin curve"""

    angles: List[float] = Field(
        default_factory=list, description="Angle per level between estimate and classical vector"
    )
    classical_frame: List[List[float]] = Field(
        default_factory=list, description="Classical frame vectors"
    )
    rank_deficient_at: Optional[int] = Field(
        default=None, description="Level at which the derivatives become dependent"
    )
    note: Optional[str] = Field(default=None, description="Why no comparison was made")


class FrameEstimateReport(BaseModel):
    """Result of estimating a Frenet frame from a point sequence"""

    schema_version: str = Field(default=SCHEMA_VERSION, description="Report format version")
    dim: int = Field(..., ge=1, description="Ambient dimension")
    k: int = Field(..., ge=0, description="Number of levels achieved")
    frame: List[List[float]] = Field(default_factory=list, description="Frame vectors")
    levels: List[LevelReport] = Field(default_factory=list, description="Per-level diagnostics")
    diverged: bool = Field(default=False, description="Some level diverged")
    classical: Optional[ClassicalComparison] = Field(
        default=None, description="Comparison with the classical frame, when requested"
    )
