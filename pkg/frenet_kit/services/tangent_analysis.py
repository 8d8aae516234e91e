"""
Tangent frames of sampled sets, the outgoing test and convex-case diagnostics
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull

from frenet_kit.core.config import TangentSettings, settings
from frenet_kit.core.exceptions import InsufficientPointsError
from frenet_kit.core.logging import get_logger
from frenet_kit.core.utils import angle_between, make_rng, max_pairwise_angle
from frenet_kit.models.geometry import FlagSimplex, Frame, as_vector
from frenet_kit.models.tangent import (
    OutgoingReport,
    PolyhedralTrend,
    SampledSet,
    TangentAnalysis,
    TangentRecord,
    TangentReport,
    TrendVerdict,
    Verdict,
)
from frenet_kit.services.geometry_core import flag_membership

logger = get_logger(__name__)

_EPS = float(np.finfo(float).eps)


@dataclass
class _Context:
    """Fixed data for one base point"""

    base: np.ndarray
    offsets: np.ndarray  # offsets of all samples from base
    distances: np.ndarray
    floor: float
    extent: float
    cfg: TangentSettings
    max_depth: int


def _residuals(ctx: _Context, group: np.ndarray, basis: list[np.ndarray]):
    offsets = ctx.offsets[group]
    if basis:
        U = np.array(basis)
        offsets = offsets - (offsets @ U.T) @ U
    return offsets, np.linalg.norm(offsets, axis=1)


def _orthonormal(v: np.ndarray, basis: list[np.ndarray]) -> Optional[np.ndarray]:
    w = v.copy()
    for _ in range(2):
        for q in basis:
            w -= np.dot(q, w) * q
    norm = float(np.linalg.norm(w))
    return None if norm < _EPS else w / norm


def _cluster_directions(
    directions: np.ndarray, cluster_angle: float, window: int
) -> list[np.ndarray]:
    """
    Greedy angular clustering, closest samples first

    Rows must be ordered by decreasing distance to base. Each direction joins
    the cluster whose seed (mean of its first few members, i.e. the closest
    ones) is within cluster_angle, otherwise it opens a new cluster.

    Returns:
        Row positions of each cluster, in decreasing-distance order
    """
    members: list[list[int]] = []
    seeds: list[np.ndarray] = []
    for pos in range(directions.shape[0] - 1, -1, -1):
        d = directions[pos]
        best, best_angle = None, cluster_angle
        for c, seed in enumerate(seeds):
            angle = angle_between(d, seed)
            if angle <= best_angle:
                best, best_angle = c, angle
        if best is None:
            members.append([pos])
            seeds.append(d.copy())
            continue
        members[best].append(pos)
        if len(members[best]) <= window:
            seeds[best] = directions[members[best]].mean(axis=0)
    return [np.array(sorted(m)) for m in members]


def _tail_converges(directions: np.ndarray, cfg: TangentSettings, noise: float = 0.0) -> bool:
    """Tail spread below cluster_angle and not growing; spreads under noise count as zero"""
    window = cfg.window
    tail, _ = max_pairwise_angle(directions[-window:])
    if tail >= cfg.cluster_angle:
        return False
    if tail <= noise:
        return True
    previous = directions[-2 * window : -window]
    if previous.shape[0] >= 2:
        return tail <= max_pairwise_angle(previous)[0] + max(noise, 10.0 * _EPS)
    return True


def _accumulates(ctx: _Context, group: np.ndarray) -> bool:
    return bool(ctx.distances[group].min() <= ctx.cfg.accumulation_ratio * ctx.extent)


def _branches(
    ctx: _Context, group: np.ndarray, basis: list[np.ndarray]
) -> tuple[np.ndarray, list[np.ndarray], np.ndarray, np.ndarray]:
    """
    Split a group by its residuals against basis

    Returns:
        (floor group, convergent clusters, residuals, norms)
    """
    residuals, norms = _residuals(ctx, group, basis)
    on_flat = norms <= ctx.floor
    floor_group = group[on_flat]
    rest = np.flatnonzero(~on_flat)
    clusters = []
    if rest.size >= ctx.cfg.min_points:
        directions = residuals[rest] / norms[rest, None]
        for positions in _cluster_directions(
            directions, ctx.cfg.cluster_angle, ctx.cfg.window
        ):
            members = group[rest[positions]]
            if members.size < ctx.cfg.min_points or not _accumulates(ctx, members):
                continue
            # rounding limit of the closest residuals
            noise = 10.0 * ctx.floor / float(norms[rest[positions]].min())
            if _tail_converges(directions[positions], ctx.cfg, noise):
                clusters.append(members)
    return floor_group, clusters, residuals, norms


def _estimate_direction(
    ctx: _Context, group: np.ndarray, basis: list[np.ndarray]
) -> Optional[np.ndarray]:
    residuals, norms = _residuals(ctx, group, basis)
    keep = norms > ctx.floor
    directions = residuals[keep] / norms[keep, None]
    if directions.shape[0] == 0:
        return None
    return _orthonormal(directions[-ctx.cfg.window :].mean(axis=0), basis)


def _record(
    ctx: _Context, basis: list[np.ndarray], group: np.ndarray, history: list[np.ndarray]
) -> TangentRecord:
    frame = Frame(vectors=np.array(basis), dim=ctx.base.size)
    _, norms = _residuals(ctx, group, basis)
    return TangentRecord(
        base=ctx.base,
        frame=frame,
        determining_indices=group,
        on_affine_hull=bool(np.all(norms <= ctx.floor)),
        prefix_indices=list(history[:-1]),
    )


def _explore(
    ctx: _Context,
    group: np.ndarray,
    basis: list[np.ndarray],
    history: list[np.ndarray],
) -> list[TangentRecord]:
    depth = len(basis)
    floor_group, clusters, _, _ = _branches(ctx, group, basis)
    records: list[TangentRecord] = []
    if depth >= 1 and floor_group.size >= ctx.cfg.min_points and _accumulates(
        ctx, floor_group
    ):
        records.append(_record(ctx, basis, floor_group, history))
    if depth < ctx.max_depth:
        for cluster in clusters:
            records.extend(_descend(ctx, cluster, basis, history))
    if depth >= 1 and not records:
        records.append(_record(ctx, basis, group, history))
    return records


def _descend(
    ctx: _Context,
    cluster: np.ndarray,
    basis: list[np.ndarray],
    history: list[np.ndarray],
) -> list[TangentRecord]:
    """
    Add one level for a convergent cluster

    When the residuals one level further down split the cluster into
    several accumulating branches, each branch re-estimates the new
    direction from its own points before going on.
    """
    u = _estimate_direction(ctx, cluster, basis)
    if u is None:
        return []
    floor_group, clusters, _, _ = _branches(ctx, cluster, basis + [u])
    parts = list(clusters)
    if floor_group.size >= ctx.cfg.min_points and _accumulates(ctx, floor_group):
        parts.append(floor_group)
    if len(parts) < 2:
        logger.debug("depth %d: cluster of %d points", len(basis) + 1, cluster.size)
        return _explore(ctx, cluster, basis + [u], history + [cluster])

    logger.debug("depth %d: cluster splits into %d branches", len(basis) + 1, len(parts))
    refined = []
    for part in parts:
        part = part[np.argsort(-ctx.distances[part], kind="stable")]
        v = _estimate_direction(ctx, part, basis)
        if v is not None:
            refined.append((part, v, _on_flat(ctx, part, basis + [v])))
    # branches share the new direction; a flat branch pins it exactly
    exact = [v for _, v, flat in refined if flat]
    records = []
    for part, v, flat in refined:
        if not flat and exact:
            slack = _direction_uncertainty(ctx, part, basis)
            closest = min(exact, key=lambda w: angle_between(w, v))
            if angle_between(closest, v) <= slack:
                logger.debug("depth %d: branch adopts a flat sibling's direction", len(basis) + 1)
                v = closest
        records.extend(_explore(ctx, part, basis + [v], history + [part]))
    return records


def _on_flat(ctx: _Context, group: np.ndarray, basis: list[np.ndarray]) -> bool:
    _, norms = _residuals(ctx, group, basis)
    return bool(np.all(norms <= ctx.floor))


def _direction_uncertainty(ctx: _Context, group: np.ndarray, basis: list[np.ndarray]) -> float:
    """
    Angular error bound for a direction estimated from a converging tail

    The tail's rate of turning per unit residual norm, extrapolated over the
    smallest residual norm left, doubled.
    """
    residuals, norms = _residuals(ctx, group, basis)
    keep = norms > ctx.floor
    directions = residuals[keep] / norms[keep, None]
    tail = directions[-2 * ctx.cfg.window :]
    tail_norms = norms[keep][-2 * ctx.cfg.window :]
    if tail.shape[0] < 2:
        return 0.0
    travel = float(tail_norms[0] - tail_norms[-1])
    if travel <= 0.0:
        return 0.0
    rate = angle_between(tail[0], tail[-1]) / travel
    return 2.0 * rate * float(tail_norms[-1])


def _context(
    S: SampledSet, base: np.ndarray, cfg: TangentSettings
) -> tuple[_Context, np.ndarray]:
    offsets = S.points - base
    distances = np.linalg.norm(offsets, axis=1)
    scale = float(distances.max())
    radius = cfg.radius if cfg.radius is not None else scale
    magnitude = max(float(np.linalg.norm(base)), float(np.linalg.norm(S.points, axis=1).max()))
    floor = max(settings.estimator.floor_factor * scale, 100.0 * _EPS * magnitude)
    near = np.flatnonzero((distances <= radius) & (distances > floor))
    near = near[np.argsort(-distances[near], kind="stable")]
    extent = float(distances[near].max()) if near.size else 0.0
    max_depth = min(cfg.max_depth or S.dim, S.dim)
    ctx = _Context(
        base=base,
        offsets=offsets,
        distances=distances,
        floor=floor,
        extent=extent,
        cfg=cfg,
        max_depth=max_depth,
    )
    return ctx, near


def detect_tangent_frames(
    S: SampledSet, base, cfg: Optional[TangentSettings] = None
) -> list[TangentRecord]:
    """
    Tangent frames of S at base found by recursive direction clustering

    At depth j the residuals of the samples against the j directions found
    so far are computed. Samples on the flat x + span(u) end a branch;
    the others are clustered by angle, and every cluster that accumulates
    at base with converging tail directions contributes u_{j+1}.

    Args:
        S: Sampled set
        base: Accumulation point
        cfg: Tangent settings; defaults to settings.tangent

    Returns:
        One record per terminal branch, ordered by frame length

    Raises:
        InsufficientPointsError: If fewer than cfg.min_points samples lie near base
    """
    cfg = cfg or settings.tangent
    base = as_vector(base, S.dim)
    ctx, near = _context(S, base, cfg)
    if near.size < cfg.min_points:
        raise InsufficientPointsError(int(near.size), cfg.min_points)
    records = _explore(ctx, near, [], [])
    records.sort(key=lambda r: (r.k, -r.determining_indices.size))
    logger.info(
        "Found %d tangent record(s) at %s", len(records), np.array2string(base, precision=4)
    )
    return records


def _default_scales(S: SampledSet, rec: TangentRecord) -> np.ndarray:
    distances = np.linalg.norm(S.points[rec.determining_indices] - rec.base, axis=1)
    return np.full(rec.k, 0.5 * float(distances.max()))


def outgoing_test(
    S: SampledSet,
    rec: TangentRecord,
    cfg: Optional[TangentSettings] = None,
    scales: Optional[Sequence[float]] = None,
) -> OutgoingReport:
    """
    Compare the flag simplex C on rec's frame with its facet C' on the sample

    Args:
        S: Sampled set the record was detected on
        rec: Tangent record
        cfg: Tangent settings (membership tolerance, non-vacuity guard)
        scales: Flag scales; defaults to cfg.scales, then to half the largest
            distance of the determining subsequence from base

    Returns:
        OutgoingReport with membership counts, verdict and witnesses in C \\ C'
    """
    cfg = cfg or settings.tangent
    if scales is None:
        scales = cfg.scales if cfg.scales and len(cfg.scales) == rec.k else None
    lam = np.asarray(scales, dtype=float) if scales is not None else _default_scales(S, rec)

    flag = FlagSimplex(base=rec.base, frame=rec.frame, scales=lam)
    facet = flag.facet()
    ball_radius = float(lam.sum())
    distances = np.linalg.norm(S.points - rec.base, axis=1)
    in_ball = np.flatnonzero(distances <= ball_radius * (1.0 + 1e-12) + cfg.mem_tol)

    in_facet = np.array([flag_membership(facet, S.points[i], cfg.mem_tol) for i in in_ball], dtype=bool)
    in_flag = np.array([flag_membership(flag, S.points[i], cfg.mem_tol) for i in in_ball], dtype=bool)
    # C' is a face of C
    in_flag |= in_facet

    det = rec.determining_indices
    offsets = distances[det]
    if offsets.size and float(np.min(offsets)) ** 2 < 100.0 * cfg.mem_tol:
        logger.warning(
            "Smallest determining offset squared (%.3e) is close to mem_tol (%.1e)",
            float(np.min(offsets)) ** 2,
            cfg.mem_tol,
        )
    tail_in_ball = int(np.sum(distances[det] <= ball_radius))
    witnesses = in_ball[in_flag & ~in_facet]

    if tail_in_ball < cfg.min_tail:
        verdict = Verdict.VACUOUS
    elif witnesses.size == 0:
        verdict = Verdict.YES
    else:
        verdict = Verdict.NO
    logger.debug(
        "outgoing test k=%d: |C|=%d |C'|=%d tail=%d -> %s",
        rec.k,
        int(in_flag.sum()),
        int(in_facet.sum()),
        tail_in_ball,
        verdict.value,
    )
    return OutgoingReport(
        scales=lam,
        count_c=int(in_flag.sum()),
        count_facet=int(in_facet.sum()),
        verdict=verdict,
        witness_indices=witnesses,
        tail_in_ball=tail_in_ball,
        ball_radius=ball_radius,
        flag=flag,
    )


def outgoing_sweep(
    S: SampledSet,
    rec: TangentRecord,
    factors: Sequence[float],
    cfg: Optional[TangentSettings] = None,
) -> OutgoingReport:
    """
    Majority vote of outgoing tests over rescaled flags

    Vacuous runs do not vote; a tie counts as "no". Returns the report of
    the first run agreeing with the vote, or the base-scale report when
    every run was vacuous.
    """
    cfg = cfg or settings.tangent
    base_scales = (
        np.asarray(cfg.scales, dtype=float)
        if cfg.scales and len(cfg.scales) == rec.k
        else _default_scales(S, rec)
    )
    reports = [outgoing_test(S, rec, cfg, base_scales * f) for f in factors]
    votes = [r.verdict for r in reports if r.verdict is not Verdict.VACUOUS]
    if not votes:
        return outgoing_test(S, rec, cfg, base_scales)
    yes = sum(v is Verdict.YES for v in votes)
    winner = Verdict.YES if yes > len(votes) - yes else Verdict.NO
    return next(r for r in reports if r.verdict is winner)


def extreme_points(S: SampledSet) -> np.ndarray:
    """
    Indices of points that are not convex combinations of the other points

    The distinct points are reduced to coordinates in their affine hull and
    handed to Qhull; among duplicates only the first occurrence can be extreme.

    Returns:
        Sorted array of indices into S.points
    """
    _, first = np.unique(S.points, axis=0, return_index=True)
    first = np.sort(first)
    if first.size <= 2:
        return first
    centered = S.points[first] - S.points[first].mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(sv > settings.geometry.tol_aff * sv[0]))
    coords = centered @ vt[:rank].T
    if rank == 1:
        line = coords[:, 0]
        return np.sort(first[[np.argmin(line), np.argmax(line)]])
    hull = ConvexHull(coords)
    return np.sort(first[hull.vertices])


def polyhedral_trend(
    S: SampledSet,
    fractions: Sequence[float] = (0.25, 0.5, 1.0),
    rng: Optional[np.random.Generator] = None,
) -> PolyhedralTrend:
    """
    Extreme-point counts on nested random subsamples

    A count that is the same on the two largest subsamples reads as
    polyhedron-like, a strictly increasing count as non-polyhedral.
    """
    rng = rng or make_rng()
    order = rng.permutation(len(S))
    sizes, counts = [], []
    for fraction in sorted(fractions):
        size = max(2, int(np.ceil(fraction * len(S))))
        sub = SampledSet(points=S.points[np.sort(order[:size])])
        sizes.append(size)
        counts.append(int(extreme_points(sub).size))
    if len(counts) >= 2 and counts[-1] == counts[-2]:
        verdict = TrendVerdict.POLYHEDRON_LIKE
    elif len(counts) >= 2 and all(b > a for a, b in zip(counts, counts[1:])):
        verdict = TrendVerdict.NON_POLYHEDRAL
    else:
        verdict = TrendVerdict.UNDETERMINED
    return PolyhedralTrend(sizes=sizes, counts=counts, verdict=verdict)


def _scale_run(distances: np.ndarray, diameter: float) -> tuple[int, float]:
    """
    Occupied dyadic shells counted outward from the nearest neighbour

    Shell l holds the distances in (diameter / 2^(l+1), diameter / 2^l].

    Returns:
        Number of consecutive occupied shells and the outer radius of the last one
    """
    levels = np.floor(np.log2(diameter / distances)).astype(int)
    occupied = set(levels.tolist())
    finest = int(levels.max())
    run = 0
    while finest - run in occupied:
        run += 1
    return run, diameter / 2.0 ** (finest - run + 1)


def detect_bases(S: SampledSet, cfg: Optional[TangentSettings] = None) -> np.ndarray:
    """
    Guess accumulation points of a finite sample

    A sample point is a base when its neighbours fill at least min_points
    consecutive dyadic distance shells, from its nearest neighbour outward,
    and every neighbour inside those shells lies within 90 degrees of their
    mean direction. Points inside a branch see neighbours on both sides;
    isolated extreme points fill only a few shells.

    Returns:
        Array of base points, one per row in sample order (possibly empty)
    """
    cfg = cfg or settings.tangent
    if len(S) <= cfg.min_points:
        return np.zeros((0, S.dim))
    hull = S.points[extreme_points(S)]
    diameter = max(float(np.linalg.norm(hull - v, axis=1).max()) for v in hull)
    if diameter == 0.0:
        return np.zeros((0, S.dim))
    _, first = np.unique(S.points, axis=0, return_index=True)
    accepted: list[int] = []
    for i in np.sort(first):
        offsets = S.points - S.points[i]
        d = np.linalg.norm(offsets, axis=1)
        near = d > 0
        run, radius = _scale_run(d[near], diameter)
        if run < cfg.min_points:
            continue
        inside = near & (d <= radius)
        directions = offsets[inside] / d[inside, None]
        mean = directions.mean(axis=0)
        size = np.linalg.norm(mean)
        if size > 0 and np.min(directions @ mean) > np.sqrt(_EPS) * size:
            accepted.append(int(i))
    logger.info("Detected %d accumulation base(s)", len(accepted))
    return S.points[accepted]


def analyze(S: SampledSet, cfg: Optional[TangentSettings] = None) -> TangentReport:
    """
    Tangent records, outgoing verdicts and extreme points of a sampled set

    Args:
        S: Sampled set; labeled bases are used when present, detected otherwise
        cfg: Tangent settings

    Returns:
        TangentReport; its semisimple_surrogate flag is set when no tangent
        or prefix tangent tested outgoing
    """
    cfg = cfg or settings.tangent
    bases = S.bases if S.bases is not None and len(S.bases) else detect_bases(S, cfg)
    analyses = []
    for base in bases:
        try:
            records = detect_tangent_frames(S, base, cfg)
        except InsufficientPointsError as e:
            logger.warning("Skipping base %s: %s", np.array2string(base, precision=4), e.message)
            continue

        def test(rec: TangentRecord) -> OutgoingReport:
            if cfg.sweep_factors:
                return outgoing_sweep(S, rec, cfg.sweep_factors, cfg)
            return outgoing_test(S, rec, cfg)

        reports = [test(rec) for rec in records]
        prefix_reports = [[test(p) for p in rec.prefixes()] for rec in records]
        records = [rec.with_verdict(r.verdict) for rec, r in zip(records, reports)]
        analyses.append(
            TangentAnalysis(
                base=np.asarray(base),
                records=records,
                reports=reports,
                prefix_reports=prefix_reports,
            )
        )
    report = TangentReport(
        analyses=analyses,
        extreme_indices=extreme_points(S),
        trend=polyhedral_trend(S),
    )
    logger.info(
        "Analysis: %d base(s), outgoing tangent %s",
        len(analyses),
        "found" if report.outgoing_found else "not found",
    )
    return report
