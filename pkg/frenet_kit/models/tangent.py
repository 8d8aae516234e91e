"""
Sampled sets, tangent records and outgoing-test reports
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from frenet_kit.core.exceptions import DimensionMismatchError, InvalidSampleError
from frenet_kit.models.geometry import FlagSimplex, Frame, as_vector


class Verdict(str, Enum):
    """Outgoing test outcome"""

    YES = "yes"
    NO = "no"
    VACUOUS = "vacuous"


class TrendVerdict(str, Enum):
    """Extreme-point count behaviour under refinement"""

    POLYHEDRON_LIKE = "polyhedron-like"
    NON_POLYHEDRAL = "non-polyhedral"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True, eq=False)
class SampledSet:
    """Finite sample of a subset of R^n with optional labeled accumulation bases"""

    points: np.ndarray
    bases: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise InvalidSampleError("a sampled set needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise InvalidSampleError("points must have finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.bases is not None:
            bases = np.array(self.bases, dtype=float)
            if bases.size == 0:
                bases = bases.reshape(0, pts.shape[1])
            bases = np.atleast_2d(bases)
            if bases.shape[1] != pts.shape[1]:
                raise DimensionMismatchError(pts.shape[1], bases.shape[1], "base")
            bases.setflags(write=False)
            object.__setattr__(self, "bases", bases)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def transformed(
        self, rotation: np.ndarray, shift: np.ndarray, scale: float = 1.0
    ) -> "SampledSet":
        """Image under y -> scale * R y + shift"""
        R = np.asarray(rotation, dtype=float)
        points = scale * self.points @ R.T + shift
        bases = None if self.bases is None else scale * self.bases @ R.T + shift
        return SampledSet(points=points, bases=bases)


@dataclass(frozen=True, eq=False)
class TangentRecord:
    """A tangent frame at base together with the subsequence determining it"""

    base: np.ndarray
    frame: Frame
    determining_indices: np.ndarray
    outgoing: Optional[Verdict] = None
    on_affine_hull: bool = False
    # determining indices of each proper prefix frame, shortest first
    prefix_indices: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        object.__setattr__(self, "base", as_vector(self.base, self.frame.dim))
        idx = np.array(self.determining_indices, dtype=int).reshape(-1)
        idx.setflags(write=False)
        object.__setattr__(self, "determining_indices", idx)

    @property
    def k(self) -> int:
        return self.frame.k

    def prefixes(self) -> list["TangentRecord"]:
        """The proper prefix tangents, each with its own determining subsequence"""
        return [
            TangentRecord(
                base=self.base,
                frame=self.frame.prefix(j),
                determining_indices=indices,
                prefix_indices=self.prefix_indices[: j - 1],
            )
            for j, indices in enumerate(self.prefix_indices, start=1)
        ]

    def with_verdict(self, verdict: Verdict) -> "TangentRecord":
        return TangentRecord(
            base=self.base,
            frame=self.frame,
            determining_indices=self.determining_indices,
            outgoing=verdict,
            on_affine_hull=self.on_affine_hull,
            prefix_indices=self.prefix_indices,
        )


@dataclass(frozen=True, eq=False)
class OutgoingReport:
    """Comparison of the flag simplex C and its facet C' on the sample near base"""

    scales: np.ndarray
    count_c: int
    count_facet: int
    verdict: Verdict
    witness_indices: np.ndarray
    tail_in_ball: int
    ball_radius: float
    flag: Optional[FlagSimplex] = None


@dataclass(frozen=True, eq=False)
class PolyhedralTrend:
    """Extreme-point counts on nested subsamples"""

    sizes: list[int]
    counts: list[int]
    verdict: TrendVerdict


@dataclass(frozen=True, eq=False)
class TangentAnalysis:
    """Per-base records with their outgoing reports"""

    base: np.ndarray
    records: list[TangentRecord]
    reports: list[OutgoingReport]
    prefix_reports: list[list[OutgoingReport]]


@dataclass(frozen=True, eq=False)
class TangentReport:
    """Aggregate analysis of a sampled set"""

    analyses: list[TangentAnalysis]
    extreme_indices: np.ndarray
    trend: Optional[PolyhedralTrend]

    @property
    def outgoing_found(self) -> bool:
        for analysis in self.analyses:
            for report in analysis.reports:
                if report.verdict is Verdict.YES:
                    return True
            for reports in analysis.prefix_reports:
                if any(r.verdict is Verdict.YES for r in reports):
                    return True
        return False

    @property
    def semisimple_surrogate(self) -> bool:
        """True when no outgoing tangent was found"""
        return not self.outgoing_found
