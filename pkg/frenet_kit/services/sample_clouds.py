"""
Builtin sampled sets with labeled accumulation points
"""

from enum import Enum
from typing import Optional

import numpy as np

from frenet_kit.core.exceptions import ValidationError
from frenet_kit.models.tangent import SampledSet


class CloudKind(str, Enum):
    """Builtin clouds"""

    COMB = "comb"
    PARABOLA = "parabola"
    SEGMENT = "segment"
    TRIANGLE = "triangle"
    SQUARE = "square"


DEFAULT_COUNTS = {
    CloudKind.COMB: 200,
    CloudKind.PARABOLA: 12,
    CloudKind.SEGMENT: 20,
    CloudKind.TRIANGLE: 12,
    CloudKind.SQUARE: 12,
}


def comb_cloud(count: int = 200) -> SampledSet:
    """{(0,0)} with (1/n, 0) and (1/n, 1/n^2) for n = 1..count, based at the origin"""
    n = np.arange(1, count + 1, dtype=float)
    on_axis = np.column_stack([1.0 / n, np.zeros_like(n)])
    off_axis = np.column_stack([1.0 / n, 1.0 / n**2])
    points = np.vstack([[0.0, 0.0], on_axis, off_axis])
    return SampledSet(points=points, bases=[[0.0, 0.0]])


def parabola_cloud(count: int = 12) -> SampledSet:
    """The origin and (t, t^2) for t = 2^-i, i = 1..count"""
    t = 2.0 ** -np.arange(1, count + 1, dtype=float)
    points = np.vstack([[0.0, 0.0], np.column_stack([t, t**2])])
    return SampledSet(points=points, bases=[[0.0, 0.0]])


def segment_cloud(count: int = 20) -> SampledSet:
    """The origin and (2^-i, 0) for i = 0..count"""
    s = 2.0 ** -np.arange(0, count + 1, dtype=float)
    points = np.vstack([[0.0, 0.0], np.column_stack([s, np.zeros_like(s)])])
    return SampledSet(points=points, bases=[[0.0, 0.0]])


def polygon_boundary_cloud(vertices: np.ndarray, count: int = 12) -> SampledSet:
    """
    Boundary samples of a convex polygon accumulating at every vertex

    Each edge (v, w) gets v + 2^-i (w - v) and w + 2^-i (v - w) for
    i = 1..count; the vertices are the labeled bases.
    """
    vertices = np.asarray(vertices, dtype=float)
    s = 2.0 ** -np.arange(1, count + 1, dtype=float)[:, None]
    chunks = [vertices]
    for v, w in zip(vertices, np.roll(vertices, -1, axis=0)):
        chunks.append(v + s * (w - v))
        chunks.append(w + s * (v - w))
    points = np.unique(np.vstack(chunks), axis=0)
    return SampledSet(points=points, bases=vertices)


def sample_cloud(kind: CloudKind, count: Optional[int] = None) -> SampledSet:
    """
    Builtin cloud by name

    Args:
        kind: Cloud family
        count: Samples per accumulating branch; family default when None

    Returns:
        SampledSet with its bases labeled

    Raises:
        ValidationError: If count is too small to accumulate
    """
    kind = CloudKind(kind)
    count = DEFAULT_COUNTS[kind] if count is None else count
    if count < 2:
        raise ValidationError("count", count, "must be at least 2")
    if kind is CloudKind.COMB:
        return comb_cloud(count)
    if kind is CloudKind.PARABOLA:
        return parabola_cloud(count)
    if kind is CloudKind.SEGMENT:
        return segment_cloud(count)
    if kind is CloudKind.TRIANGLE:
        return polygon_boundary_cloud(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), count)
    return polygon_boundary_cloud(
        np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), count
    )
