"""
Immutable geometric values: frames, simplices and flag simplices
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from frenet_kit.core.config import settings
from frenet_kit.core.exceptions import (
    DegenerateSimplexError,
    DimensionMismatchError,
    NonPositiveScaleError,
    ValidationError,
)


def as_vector(coords, dim: Optional[int] = None) -> np.ndarray:
    """
    Convert coordinates to a read-only float vector

    Args:
        coords: Sequence of coordinates
        dim: Expected dimension, checked when given

    Returns:
        1-D float64 array

    Raises:
        DimensionMismatchError: If dim is given and does not match
        ValidationError: If the coordinates are empty or not finite
    """
    v = np.array(coords, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValidationError("coords", [], "vector must have at least one coordinate")
    if not np.all(np.isfinite(v)):
        raise ValidationError("coords", v.tolist(), "coordinates must be finite")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(dim, v.size)
    v.setflags(write=False)
    return v


def _frozen_matrix(rows, dim: int) -> np.ndarray:
    m = np.array(rows, dtype=float).reshape(-1, dim) if len(rows) else np.zeros((0, dim))
    if not np.all(np.isfinite(m)):
        raise ValidationError("vectors", m.tolist(), "coordinates must be finite")
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class Frame:
    """Ordered tuple of pairwise orthonormal vectors in R^dim (possibly empty)"""

    vectors: np.ndarray
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim", self.dim, "dimension must be at least 1")
        m = np.asarray(self.vectors, dtype=float)
        if m.size and m.ndim == 2 and m.shape[1] != self.dim:
            raise DimensionMismatchError(self.dim, m.shape[1], "frame vector")
        m = _frozen_matrix(m, self.dim)
        if m.shape[0] > self.dim:
            raise ValidationError("vectors", m.shape[0], "frame longer than dimension")
        object.__setattr__(self, "vectors", m)
        error = self.orthonormality_error()
        if error > settings.geometry.tol_orth:
            raise ValidationError(
                "vectors", m.tolist(), f"frame is not orthonormal (error {error:.3e})"
            )

    @classmethod
    def of(cls, vectors: Sequence, dim: Optional[int] = None) -> "Frame":
        """Build a frame from a list of vectors; dim is required when the list is empty"""
        if dim is None:
            if not len(vectors):
                raise ValidationError("dim", None, "empty frame needs an explicit dimension")
            dim = len(vectors[0])
        return cls(vectors=np.asarray(vectors, dtype=float), dim=dim)

    @classmethod
    def empty(cls, dim: int) -> "Frame":
        return cls(vectors=np.zeros((0, dim)), dim=dim)

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.k

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.vectors)

    def __getitem__(self, index: int) -> np.ndarray:
        return self.vectors[index]

    def prefix(self, j: int) -> "Frame":
        """The frame of the first j vectors"""
        return Frame(vectors=self.vectors[:j], dim=self.dim)

    def orthonormality_error(self) -> float:
        if self.k == 0:
            return 0.0
        gram = self.vectors @ self.vectors.T
        return float(np.max(np.abs(gram - np.eye(self.k))))

    def transformed(self, rotation: np.ndarray) -> "Frame":
        """Image of the frame under an orthogonal map"""
        return Frame(vectors=self.vectors @ np.asarray(rotation).T, dim=self.dim)

    def to_list(self) -> list:
        return self.vectors.tolist()


@dataclass(frozen=True, eq=False)
class Simplex:
    """conv(v_0, ..., v_d) of affinely independent vertices"""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] == 0:
            raise ValidationError("vertices", v.tolist(), "need a non-empty list of points")
        v = _frozen_matrix(v, v.shape[1])
        object.__setattr__(self, "vertices", v)
        edges = v[1:] - v[0]
        if edges.shape[0] > v.shape[1]:
            raise DegenerateSimplexError(v.shape[0], v.shape[1])
        if edges.shape[0]:
            singular = np.linalg.svd(edges, compute_uv=False)
            rank = int(np.sum(singular > settings.geometry.rank_tol))
            if rank < edges.shape[0]:
                raise DegenerateSimplexError(v.shape[0], rank)

    @classmethod
    def of(cls, vertices: Sequence) -> "Simplex":
        return cls(vertices=np.asarray(vertices, dtype=float))

    @property
    def dim(self) -> int:
        """Ambient dimension"""
        return self.vertices.shape[1]

    @property
    def order(self) -> int:
        """Simplex dimension d"""
        return self.vertices.shape[0] - 1

    def face(self, indices: Sequence[int]) -> "Simplex":
        """Face spanned by the given vertex indices (kept in index order)"""
        idx = sorted(set(int(i) for i in indices))
        return Simplex(vertices=self.vertices[idx])

    def facets(self) -> list["Simplex"]:
        if self.order == 0:
            return []
        return [
            self.face([j for j in range(self.order + 1) if j != i])
            for i in range(self.order + 1)
        ]

    def same_vertices(self, other: "Simplex", tol: float = 1e-12) -> bool:
        if self.vertices.shape != other.vertices.shape:
            return False
        return bool(np.allclose(self.vertices, other.vertices, atol=tol, rtol=0))


@dataclass(frozen=True, eq=False)
class FlagSimplex:
    """conv(x, x+l_1u_1, ..., x+l_1u_1+...+l_ku_k)"""

    base: np.ndarray
    frame: Frame
    scales: np.ndarray

    def __post_init__(self):
        base = as_vector(self.base, self.frame.dim)
        scales = np.array(self.scales, dtype=float).reshape(-1)
        if scales.size != self.frame.k:
            raise ValidationError(
                "scales", scales.tolist(), f"expected {self.frame.k} scales"
            )
        if np.any(scales <= 0) or not np.all(np.isfinite(scales)):
            raise NonPositiveScaleError(scales.tolist())
        scales.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "scales", scales)
        # orthonormal frame and positive scales make this automatic
        Simplex(vertices=self.vertices)

    @property
    def dim(self) -> int:
        return self.frame.dim

    @property
    def k(self) -> int:
        return self.frame.k

    @property
    def vertices(self) -> np.ndarray:
        steps = self.scales[:, None] * self.frame.vectors
        return np.vstack([self.base, self.base + np.cumsum(steps, axis=0)])

    def as_simplex(self) -> Simplex:
        return Simplex(vertices=self.vertices)

    def facet(self) -> "FlagSimplex":
        """The facet obtained by dropping the last level"""
        return FlagSimplex(
            base=self.base, frame=self.frame.prefix(self.k - 1), scales=self.scales[:-1]
        )

    def rescaled(self, factor: float) -> "FlagSimplex":
        return FlagSimplex(base=self.base, frame=self.frame, scales=self.scales * factor)


@dataclass(frozen=True, eq=False)
class BarycentricCoords:
    """Affine weights of a point with respect to simplex vertices"""

    weights: np.ndarray

    def is_member(self, tol: float) -> bool:
        return bool(np.all(self.weights >= -tol))

    def support(self, tol: float) -> list[int]:
        """Indices of vertices carrying weight above tol"""
        return [int(i) for i in np.flatnonzero(self.weights > tol)]

    @property
    def min_weight(self) -> float:
        return float(np.min(self.weights))
