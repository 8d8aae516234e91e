"""
Piecewise-linear witness pairs with prescribed zero sets and
the multiplier ratio tables that use them
"""

from typing import Optional, Sequence

import numpy as np

from frenet_kit.core.config import settings
from frenet_kit.core.exceptions import (
    FrameNotFullError,
    InvalidSampleError,
    NonPositiveScaleError,
    ValidationError,
)
from frenet_kit.core.logging import get_logger
from frenet_kit.models.geometry import Frame, as_vector
from frenet_kit.models.tangent import SampledSet
from frenet_kit.models.witness import FormulaKind, PLFormula, PLTerm, RatioTable, TermOp
from frenet_kit.services.geometry_core import complete_frame

logger = get_logger(__name__)


def frame_coordinates(p, x, fullframe: Frame) -> np.ndarray:
    """
    Coordinates s_i = <p - x, u_i> in a full orthonormal frame

    Raises:
        FrameNotFullError: If the frame does not span R^n
    """
    if fullframe.k != fullframe.dim:
        raise FrameNotFullError(fullframe.k, fullframe.dim)
    p = as_vector(p, fullframe.dim)
    x = as_vector(x, fullframe.dim)
    return fullframe.vectors @ (p - x)


def _chain_terms(n: int, scales: np.ndarray, m: int) -> list[PLTerm]:
    """Terms vanishing exactly on 0 <= r_m <= ... <= r_1 <= 1 with r_i = s_i / scales_i"""
    if m == 0:
        return []

    def r(i: int) -> np.ndarray:
        c = np.zeros(n)
        c[i] = 1.0 / scales[i]
        return c

    terms = [PLTerm(TermOp.POS, -r(m - 1))]
    for i in range(m - 1):
        terms.append(PLTerm(TermOp.POS, r(i + 1) - r(i)))
    terms.append(PLTerm(TermOp.POS, r(0), -1.0))
    return terms


def _abs_terms(n: int, start: int) -> list[PLTerm]:
    return [PLTerm(TermOp.ABS, np.eye(n)[j]) for j in range(start, n)]


def build_witness(x, u: Frame, scales: Sequence[float]) -> tuple[PLFormula, PLFormula]:
    """
    Witness pair (f1, f2) for the flag simplex C on base x, frame u and scales

    f1 vanishes exactly on C; f2 vanishes exactly on the facet C' and equals
    y -> <y - x, u_k> on C.

    Args:
        x: Base point
        u: Orthonormal frame (extended to a full basis internally)
        scales: Positive scales, one per frame vector

    Returns:
        (f1, f2)

    Raises:
        NonPositiveScaleError: If some scale is not positive
    """
    lam = np.asarray(scales, dtype=float).reshape(-1)
    if lam.size != u.k or u.k == 0:
        raise ValidationError("scales", lam.tolist(), f"expected {u.k} scales for a nonempty frame")
    if np.any(lam <= 0):
        raise NonPositiveScaleError(lam.tolist())
    x = as_vector(x, u.dim)
    full = complete_frame(u)
    n, k = u.dim, u.k

    f1_terms = _abs_terms(n, k) + _chain_terms(n, lam, k)
    f2_terms = _abs_terms(n, k - 1) + _chain_terms(n, lam, k - 1)
    f1 = PLFormula(base=x, frame=full, k=k, scales=lam, kind=FormulaKind.ZERO_ON_C, terms=f1_terms)
    f2 = PLFormula(
        base=x, frame=full, k=k, scales=lam, kind=FormulaKind.ZERO_ON_CFACET, terms=f2_terms
    )
    return f1, f2


def eval_pl_many(f: PLFormula, points: np.ndarray) -> np.ndarray:
    """Evaluate a formula on the rows of points"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    s = (points - f.base) @ f.frame.vectors.T
    total = np.zeros(points.shape[0])
    for term in f.terms:
        total += term.evaluate(s)
    return total


def eval_pl(f: PLFormula, p) -> float:
    """
    Value of a witness formula at p (always >= 0)

    Raises:
        DimensionMismatchError: If p is not in the formula's space
    """
    p = as_vector(p, f.frame.dim)
    return float(eval_pl_many(f, p[None, :])[0])


def ratio_table(
    f1: PLFormula,
    f2: PLFormula,
    S: SampledSet,
    multipliers: Optional[Sequence[int]] = None,
    mem_tol: Optional[float] = None,
) -> RatioTable:
    """
    Rows max_i (f2(x_i) - m f1(x_i)) over the sample for each multiplier

    A certificate needs f1 and f2 to vanish on the same samples; when they
    do not, the table is still computed but flagged inapplicable.

    Args:
        f1: Formula vanishing on C
        f2: Formula vanishing on C'
        S: Sample
        multipliers: Positive increasing multipliers; defaults to settings.witness
        mem_tol: Threshold below which a value counts as zero

    Returns:
        RatioTable with the largest certifying multiplier, if any

    Raises:
        InvalidSampleError: If the sample is empty
        ValidationError: If the multipliers are not positive and increasing
    """
    multipliers = list(multipliers or settings.witness.multipliers)
    mem_tol = settings.tangent.mem_tol if mem_tol is None else mem_tol
    if any(m <= 0 for m in multipliers) or any(
        b <= a for a, b in zip(multipliers, multipliers[1:])
    ):
        raise ValidationError("multipliers", multipliers, "must be positive and increasing")
    if len(S) == 0:
        raise InvalidSampleError("ratio table needs a nonempty sample")

    v1 = eval_pl_many(f1, S.points)
    v2 = eval_pl_many(f2, S.points)
    applicable = bool(np.array_equal(v1 <= mem_tol, v2 <= mem_tol))

    values = np.empty(len(multipliers))
    argmax = np.empty(len(multipliers), dtype=int)
    for row, m in enumerate(multipliers):
        diff = v2 - m * v1
        argmax[row] = int(np.argmax(diff))
        values[row] = float(diff[argmax[row]])

    positive = [m for m, v in zip(multipliers, values) if v > 0]
    if not applicable:
        certified_at = None
        message = "witness inapplicable: zero-set mismatch on X"
    elif positive:
        certified_at = max(positive)
        message = f"non-semisimplicity certified at scale m*={certified_at}"
    else:
        certified_at = None
        message = "no certificate"
    logger.info("Ratio table: %s", message)
    return RatioTable(
        multipliers=multipliers,
        values=values,
        argmax=argmax,
        applicable=applicable,
        certified_at=certified_at,
        message=message,
    )
