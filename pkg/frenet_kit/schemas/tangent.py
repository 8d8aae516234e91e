"""
Pydantic schemas for sampled sets and tangent reports
"""

from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from frenet_kit.models.tangent import TrendVerdict, Verdict
from frenet_kit.schemas.sequence import SCHEMA_VERSION


class SampledSetFile(BaseModel):
    """Finite sample of a subset of R^n"""

    schema_version: Optional[str] = Field(
        default=SCHEMA_VERSION, description="File format version"
    )
    dim: int = Field(..., ge=1, description="Ambient dimension")
    points: List[List[float]] = Field(..., min_length=2, description="Sample points")
    bases: Optional[List[List[float]]] = Field(
        default=None, description="Labeled accumulation points; detected when absent"
    )

    @model_validator(mode="after")
    def validate_dimensions(self):
        for row in self.points + (self.bases or []):
            if len(row) != self.dim:
                raise ValueError(f"every point must have {self.dim} coordinates, got {len(row)}")
        return self


class OutgoingReportSchema(BaseModel):
    """Outgoing test of one tangent frame"""

    scales: List[float] = Field(..., description="Flag scales lambda")
    count_c: int = Field(..., ge=0, description="Samples in C")
    count_facet: int = Field(..., ge=0, description="Samples in the facet C'")
    verdict: Verdict = Field(..., description="yes, no or vacuous")
    witness_indices: List[int] = Field(
        default_factory=list, description="Samples in C but not in C'"
    )
    tail_in_ball: int = Field(..., ge=0, description="Determining samples inside the test ball")
    ball_radius: float = Field(..., ge=0, description="Radius of the test ball")


class TangentRecordSchema(BaseModel):
    """Tangent frame at a base with its determining subsequence"""

    base: List[float] = Field(..., description="Base point")
    frame: List[List[float]] = Field(..., description="Frame vectors")
    k: int = Field(..., ge=1, description="Frame length")
    determining_indices: List[int] = Field(..., description="Determining subsequence")
    outgoing: Optional[Verdict] = Field(default=None, description="Outgoing verdict")
    on_affine_hull: bool = Field(
        default=False, description="Determining samples lie on base + span(frame)"
    )
    prefix_indices: List[List[int]] = Field(
        default_factory=list, description="Determining subsequences of the proper prefixes"
    )
    report: Optional[OutgoingReportSchema] = Field(default=None, description="Outgoing test")
    prefix_reports: List[OutgoingReportSchema] = Field(
        default_factory=list, description="Outgoing tests of the proper prefixes"
    )


class TangentAnalysisSchema(BaseModel):
    """Records found at one base"""

    base: List[float] = Field(..., description="Base point")
    records: List[TangentRecordSchema] = Field(default_factory=list)


class PolyhedralTrendSchema(BaseModel):
    """Extreme-point counts on nested subsamples"""

    sizes: List[int] = Field(default_factory=list, description="Subsample sizes")
    counts: List[int] = Field(default_factory=list, description="Extreme points per subsample")
    verdict: TrendVerdict = Field(..., description="Trend reading")


class TangentReportSchema(BaseModel):
    """Aggregate tangent analysis of a sampled set"""

    schema_version: str = Field(default=SCHEMA_VERSION, description="Report format version")
    analyses: List[TangentAnalysisSchema] = Field(default_factory=list)
    extreme_indices: List[int] = Field(default_factory=list, description="Extreme sample points")
    trend: Optional[PolyhedralTrendSchema] = Field(default=None)
    outgoing_found: bool = Field(default=False, description="Some tangent tested outgoing")
    semisimple_surrogate: bool = Field(
        default=True, description="No outgoing tangent was found on the sample"
    )
