"""
Pydantic schemas for witness formulas, ratio tables and flag intersections
"""

from typing import List, Optional

from pydantic import BaseModel, Field

from frenet_kit.models.witness import FormulaKind, TermOp
from frenet_kit.schemas.sequence import SCHEMA_VERSION


class PLTermSchema(BaseModel):
    """op(<coeffs, s> + offset) over frame coordinates s"""

    op: TermOp = Field(..., description="abs or pos (positive part)")
    coeffs: List[float] = Field(..., description="Coefficients on the frame coordinates")
    offset: float = Field(default=0.0, description="Constant term")


class PLFormulaSchema(BaseModel):
    """Sum of PL terms in the frame coordinates s_i = <y - x, u_i>"""

    kind: FormulaKind = Field(..., description="Zero set realized by the formula")
    base: List[float] = Field(..., description="Base point x")
    frame: List[List[float]] = Field(..., description="Full orthonormal frame")
    k: int = Field(..., ge=1, description="Length of the flag")
    scales: List[float] = Field(..., description="Flag scales")
    terms: List[PLTermSchema] = Field(default_factory=list)


class RatioRowSchema(BaseModel):
    """One multiplier row"""

    multiplier: int = Field(..., gt=0)
    value: float = Field(..., description="max_i f2(x_i) - m f1(x_i)")
    argmax: int = Field(..., ge=0, description="Sample attaining the maximum")


class RatioTableSchema(BaseModel):
    """Rows of a ratio table"""

    rows: List[RatioRowSchema] = Field(default_factory=list)
    applicable: bool = Field(..., description="f1 and f2 vanish on the same samples")
    certified_at: Optional[int] = Field(
        default=None, description="Largest multiplier with a positive row"
    )
    message: str = Field(..., description="Human readable outcome")


class WitnessReport(BaseModel):
    """Witness pair built on a tangent and its ratio table"""

    schema_version: str = Field(default=SCHEMA_VERSION, description="Report format version")
    f1: PLFormulaSchema
    f2: PLFormulaSchema
    table: Optional[RatioTableSchema] = None


class FlagIntersectionReport(BaseModel):
    """Scales of the intersection of two flag simplices on one base and frame"""

    schema_version: str = Field(default=SCHEMA_VERSION, description="Report format version")
    base: List[float] = Field(..., description="Shared base point")
    frame: List[List[float]] = Field(..., description="Shared frame")
    lam: List[float] = Field(..., description="Scales of the first flag")
    mu: List[float] = Field(..., description="Scales of the second flag")
    nu: List[float] = Field(..., description="Scales of the intersection")
    verified: Optional[bool] = Field(
        default=None, description="Closed form agrees with the step recursion"
    )
    nu_by_steps: Optional[List[float]] = Field(
        default=None, description="Scales found by the step recursion"
    )
