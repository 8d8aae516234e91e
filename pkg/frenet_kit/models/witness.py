"""
Piecewise-linear witness formulas and ratio tables
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from frenet_kit.models.geometry import Frame


class TermOp(str, Enum):
    """Outer operation applied to an affine form of the frame coordinates"""

    ABS = "abs"
    POS = "pos"


class FormulaKind(str, Enum):
    """Which zero set a witness formula realizes"""

    ZERO_ON_C = "zero_on_C"
    ZERO_ON_CFACET = "zero_on_Cfacet"


@dataclass(frozen=True, eq=False)
class PLTerm:
    """op(<coeffs, s> + offset) with s the frame coordinates of y - x"""

    op: TermOp
    coeffs: np.ndarray
    offset: float = 0.0

    def evaluate(self, s: np.ndarray) -> np.ndarray:
        value = s @ self.coeffs + self.offset
        if self.op is TermOp.ABS:
            return np.abs(value)
        return np.maximum(value, 0.0)


@dataclass(frozen=True, eq=False)
class PLFormula:
    """Sum of PL terms over the coordinates s_i = <y - x, u_i> in a full frame"""

    base: np.ndarray
    frame: Frame
    k: int
    scales: np.ndarray
    kind: FormulaKind
    terms: list[PLTerm]


@dataclass(frozen=True, eq=False)
class RatioTable:
    """max_i (f2(x_i) - m f1(x_i)) for each multiplier m"""

    multipliers: list[int]
    values: np.ndarray
    argmax: np.ndarray
    applicable: bool
    certified_at: Optional[int]
    message: str
