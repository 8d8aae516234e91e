"""
Simplex and flag-simplex geometry: projections, orthonormalization,
barycentric coordinates, faces, cones and flag constructions
"""

from typing import Optional, Sequence

import numpy as np

from frenet_kit.core.config import settings
from frenet_kit.core.exceptions import (
    DimensionMismatchError,
    FlagMismatchError,
    NoPositiveStepError,
    NotInSimplexError,
    OffAffineHullError,
    RankDeficiencyError,
    ValidationError,
)
from frenet_kit.core.logging import get_logger
from frenet_kit.models.geometry import (
    BarycentricCoords,
    FlagSimplex,
    Frame,
    Simplex,
    as_vector,
)

logger = get_logger(__name__)


def _tol(value: Optional[float], default: float) -> float:
    return default if value is None else value


def project_onto_span(v, prefix: Frame) -> np.ndarray:
    """
    Orthogonal projection of v onto the span of an orthonormal frame

    Args:
        v: Vector to project
        prefix: Orthonormal frame (may be empty)

    Returns:
        Sum of <v, u_j> u_j over the frame vectors

    Raises:
        DimensionMismatchError: If v and the frame live in different spaces
    """
    v = as_vector(v)
    if v.size != prefix.dim:
        raise DimensionMismatchError(prefix.dim, v.size)
    if prefix.k == 0:
        return np.zeros_like(v)
    return prefix.vectors.T @ (prefix.vectors @ v)


def gram_schmidt(vectors: Sequence, rank_tol: Optional[float] = None) -> Frame:
    """
    Orthonormalize vectors in order, preserving the flag of spans

    Modified Gram-Schmidt with one reorthogonalization pass per vector.

    Args:
        vectors: Input vectors of equal dimension
        rank_tol: Residual norm (relative to max(1, ||v_j||)) below which
            v_j counts as dependent on its predecessors

    Returns:
        Orthonormal frame with span(first j outputs) = span(first j inputs)

    Raises:
        RankDeficiencyError: Naming the first 1-based index that is dependent
        DimensionMismatchError: If the inputs have different dimensions
    """
    rank_tol = _tol(rank_tol, settings.geometry.rank_tol)
    if not len(vectors):
        raise ValidationError("vectors", [], "need at least one vector")
    dim = len(vectors[0])
    basis: list[np.ndarray] = []
    for j, raw in enumerate(vectors, start=1):
        v = as_vector(raw)
        if v.size != dim:
            raise DimensionMismatchError(dim, v.size)
        w = v.copy()
        for _ in range(2):
            for q in basis:
                w -= np.dot(q, w) * q
        norm = float(np.linalg.norm(w))
        if norm < rank_tol * max(1.0, float(np.linalg.norm(v))):
            raise RankDeficiencyError(j, norm)
        basis.append(w / norm)
    return Frame(vectors=np.array(basis), dim=dim)


def complete_frame(frame: Frame) -> Frame:
    """
    Extend an orthonormal frame to a basis of R^n

    Canonical basis vectors are tried in index order and skipped when
    nearly dependent on the vectors already chosen.
    """
    basis = [row.copy() for row in frame.vectors]
    for e in np.eye(frame.dim):
        if len(basis) == frame.dim:
            break
        w = e.copy()
        for _ in range(2):
            for q in basis:
                w -= np.dot(q, w) * q
        norm = float(np.linalg.norm(w))
        if norm > 1e-6:
            basis.append(w / norm)
    return Frame(vectors=np.array(basis), dim=frame.dim)


def _affine_solve(T: Simplex, p: np.ndarray) -> tuple[np.ndarray, float]:
    """Barycentric weights of the closest point of aff(T), and the distance to it"""
    v0 = T.vertices[0]
    if T.order == 0:
        return np.ones(1), float(np.linalg.norm(p - v0))
    edges = T.vertices[1:] - v0
    coeffs, *_ = np.linalg.lstsq(edges.T, p - v0, rcond=None)
    distance = float(np.linalg.norm(edges.T @ coeffs - (p - v0)))
    weights = np.concatenate([[1.0 - coeffs.sum()], coeffs])
    return weights, distance


def barycentric(
    T: Simplex, p, tol_aff: Optional[float] = None
) -> BarycentricCoords:
    """
    Barycentric coordinates of p with respect to the vertices of T

    Args:
        T: Simplex
        p: Point in the ambient space of T
        tol_aff: Allowed distance of p from aff(T)

    Returns:
        Weights summing to 1 that reproduce p as an affine combination

    Raises:
        DimensionMismatchError: If p is not in the ambient space of T
        OffAffineHullError: If p lies farther than tol_aff from aff(T)
    """
    tol_aff = _tol(tol_aff, settings.geometry.tol_aff)
    p = as_vector(p)
    if p.size != T.dim:
        raise DimensionMismatchError(T.dim, p.size)
    weights, distance = _affine_solve(T, p)
    if distance > tol_aff:
        raise OffAffineHullError(distance)
    return BarycentricCoords(weights=weights)


def contains(T: Simplex, p, tol_bary: Optional[float] = None) -> bool:
    """True iff p lies in T (on its affine hull and with nonnegative weights)"""
    tol_bary = _tol(tol_bary, settings.geometry.tol_bary)
    try:
        coords = barycentric(T, p)
    except OffAffineHullError:
        return False
    return coords.is_member(tol_bary)


def _require_member(T: Simplex, z, tol_bary: float) -> BarycentricCoords:
    try:
        coords = barycentric(T, z)
    except OffAffineHullError as e:
        raise NotInSimplexError(-e.distance) from e
    if not coords.is_member(tol_bary):
        raise NotInSimplexError(coords.min_weight)
    return coords


def smallest_face(T: Simplex, z, tol_bary: Optional[float] = None) -> Simplex:
    """
    The smallest face of T containing z

    Args:
        T: Simplex
        z: Point of T
        tol_bary: Weights above this value mark supporting vertices

    Returns:
        Face spanned by the vertices with positive barycentric weight

    Raises:
        NotInSimplexError: If z is not in T
    """
    tol_bary = _tol(tol_bary, settings.geometry.tol_bary)
    coords = _require_member(T, z, tol_bary)
    return T.face(coords.support(tol_bary))


def in_relint(F: Simplex, z, tol_bary: Optional[float] = None) -> bool:
    """True iff z lies in F with every barycentric weight above tol_bary"""
    tol_bary = _tol(tol_bary, settings.geometry.tol_bary)
    try:
        coords = barycentric(F, z)
    except (OffAffineHullError, DimensionMismatchError):
        return False
    return bool(np.all(coords.weights > tol_bary))


def max_step(
    T: Simplex,
    z,
    u,
    tol_bary: Optional[float] = None,
    tol_aff: Optional[float] = None,
) -> float:
    """
    Largest eta >= 0 with z + eta*u in T

    A ratio test over the barycentric weights: along u the weights move
    linearly and the first one reaching zero bounds the step.

    Args:
        T: Simplex
        z: Starting point inside T
        u: Nonzero direction
        tol_bary: Membership tolerance for z
        tol_aff: Relative tolerance for u lying in the direction space of T

    Returns:
        The maximal step, 0 when u leaves aff(T) or points outward at z

    Raises:
        NotInSimplexError: If z is not in T
        ValidationError: If u is the zero vector
    """
    tol_bary = _tol(tol_bary, settings.geometry.tol_bary)
    tol_aff = _tol(tol_aff, settings.geometry.tol_aff)
    u = as_vector(u, T.dim)
    u_norm = float(np.linalg.norm(u))
    if u_norm == 0.0:
        raise ValidationError("u", u.tolist(), "direction must be nonzero")
    weights = np.clip(_require_member(T, z, tol_bary).weights, 0.0, None)
    if T.order == 0:
        return 0.0

    edges = T.vertices[1:] - T.vertices[0]
    coeffs, *_ = np.linalg.lstsq(edges.T, u, rcond=None)
    if np.linalg.norm(edges.T @ coeffs - u) > tol_aff * u_norm:
        return 0.0
    delta = np.concatenate([[-coeffs.sum()], coeffs])
    # components at rounding level do not bound the step
    shrinking = delta < -tol_bary * np.max(np.abs(delta))
    if not np.any(shrinking):
        return float("inf")
    return float(np.min(weights[shrinking] / -delta[shrinking]))


def in_cone(T: Simplex, x, y, tol_bary: Optional[float] = None) -> bool:
    """
    True iff y is in Cone(T, x), i.e. x + rho*(y - x) lies in T for some rho > 0

    Raises:
        NotInSimplexError: If x is not in T
    """
    tol_bary = _tol(tol_bary, settings.geometry.tol_bary)
    x = as_vector(x, T.dim)
    y = as_vector(y, T.dim)
    _require_member(T, x, tol_bary)
    direction = y - x
    norm = float(np.linalg.norm(direction))
    if norm <= settings.geometry.tol_aff:
        return True
    return max_step(T, x, direction / norm, tol_bary=tol_bary) > tol_bary


def flag_coordinates(Cf: FlagSimplex, p) -> tuple[np.ndarray, float]:
    """Frame coordinates s_i of p - x and the norm of the part off span(u)"""
    offset = as_vector(p, Cf.dim) - Cf.base
    s = Cf.frame.vectors @ offset
    perp = offset - Cf.frame.vectors.T @ s
    return s, float(np.linalg.norm(perp))


def flag_membership(Cf: FlagSimplex, p, tol: Optional[float] = None) -> bool:
    """
    Membership in a flag simplex through its chain description

    p is in conv(x, x+l_1u_1, ..., x+l_1u_1+...+l_ku_k) iff p - x lies in
    span(u) and 0 <= s_k/l_k <= ... <= s_1/l_1 <= 1 with s_i = <p - x, u_i>.

    Args:
        Cf: Flag simplex
        p: Point
        tol: Slack for the distance off span(u) and for each chain inequality

    Returns:
        True when every condition holds within tol
    """
    tol = _tol(tol, settings.geometry.tol_aff)
    s, off = flag_coordinates(Cf, p)
    if off > tol:
        return False
    if Cf.k == 0:
        return True
    r = s / Cf.scales
    if r[-1] < -tol or r[0] > 1.0 + tol:
        return False
    return bool(np.all(r[1:] - r[:-1] <= tol))


def _check_compatible(A: FlagSimplex, B: FlagSimplex) -> None:
    if A.dim != B.dim:
        raise FlagMismatchError(f"dimensions {A.dim} and {B.dim} differ")
    if A.k != B.k:
        raise FlagMismatchError(f"frame lengths {A.k} and {B.k} differ")
    if np.linalg.norm(A.base - B.base) > settings.geometry.tol_aff:
        raise FlagMismatchError("base points differ")
    if A.k and np.max(np.abs(A.frame.vectors - B.frame.vectors)) > settings.geometry.tol_orth:
        raise FlagMismatchError("frames differ")


def intersect_flags(A: FlagSimplex, B: FlagSimplex) -> FlagSimplex:
    """
    Intersection of two flag simplices on a common base and frame

    The intersection is again a flag simplex with scales
    nu_1 = min(l_1, m_1) and nu_t = nu_{t-1} * min(l_t/l_{t-1}, m_t/m_{t-1}).

    Args:
        A: Flag simplex with scales l
        B: Flag simplex with scales m

    Returns:
        The flag simplex with scales nu

    Raises:
        FlagMismatchError: If base, frame or k differ
    """
    _check_compatible(A, B)
    nu = np.empty(A.k)
    for t in range(A.k):
        if t == 0:
            nu[t] = min(A.scales[0], B.scales[0])
        else:
            nu[t] = nu[t - 1] * min(
                A.scales[t] / A.scales[t - 1], B.scales[t] / B.scales[t - 1]
            )
    return FlagSimplex(base=A.base, frame=A.frame, scales=nu)


def intersect_flags_by_steps(A: FlagSimplex, B: FlagSimplex) -> FlagSimplex:
    """
    Intersection scales found by ray casting

    Starting from the base, walk along u_t as far as both simplices allow.
    Used to cross-check intersect_flags.
    """
    _check_compatible(A, B)
    simplex_a, simplex_b = A.as_simplex(), B.as_simplex()
    z = A.base.copy()
    nu = np.empty(A.k)
    for t, u in enumerate(A.frame):
        nu[t] = min(max_step(simplex_a, z, u), max_step(simplex_b, z, u))
        z = z + nu[t] * u
    return FlagSimplex(base=A.base, frame=A.frame, scales=nu)


def find_flag_in_simplex(T: Simplex, x, u: Frame) -> FlagSimplex:
    """
    Grow a flag simplex on base x and frame u inside T

    Each level takes half of the largest admissible step from the running
    top vertex.

    Args:
        T: Simplex containing x
        x: Base point
        u: Orthonormal frame

    Returns:
        Flag simplex whose vertices all lie in T

    Raises:
        NotInSimplexError: If x is not in T
        NoPositiveStepError: If some level admits no positive step
    """
    tol_bary = settings.geometry.tol_bary
    x = as_vector(x, T.dim)
    _require_member(T, x, tol_bary)
    z = x.copy()
    scales = []
    for level, direction in enumerate(u, start=1):
        step = max_step(T, z, direction)
        if not step > tol_bary:
            raise NoPositiveStepError(level)
        if not np.isfinite(step):
            step = 1.0
        scales.append(step / 2.0)
        z = z + scales[-1] * direction
        logger.debug("flag level %d: max step %.6g", level, step)
    return FlagSimplex(base=x, frame=u, scales=np.array(scales))
