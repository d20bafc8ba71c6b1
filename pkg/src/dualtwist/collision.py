"""Self-collision distance between the two arms' link polylines.

Links are zero-radius line segments between consecutive joint positions;
link thickness is absorbed into the distance threshold. The segment-segment
routine solves the closest-point system on the infinite lines first and
falls back to the four endpoint-to-segment checks when the closest approach
leaves the segments or the lines are parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DegenerateGeometryError

PARALLEL_TOL = 1e-9
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class Segment:
    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "start", np.asarray(self.start, dtype=float))
        object.__setattr__(self, "end", np.asarray(self.end, dtype=float))

    @property
    def direction(self) -> np.ndarray:
        return self.end - self.start

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.direction))

    @property
    def degenerate(self) -> bool:
        return self.length <= DEGENERATE_TOL

    def point_at(self, t: float) -> np.ndarray:
        return self.start + t * self.direction


@dataclass(frozen=True)
class ArmSkeleton:
    """Ordered joint positions (base..tool) and the segments between them."""

    points: np.ndarray  # (n+1, 3)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 3:
            raise ConfigError(f"skeleton needs at least two 3D points, got shape {pts.shape}")
        object.__setattr__(self, "points", pts)

    @property
    def segments(self) -> list[Segment]:
        return [Segment(self.points[i], self.points[i + 1]) for i in range(len(self.points) - 1)]


@dataclass(frozen=True)
class DistanceReport:
    d_min: float
    closest_pair: tuple[int, int]  # (left segment index, right segment index)
    witness_left: np.ndarray
    witness_right: np.ndarray


@dataclass(frozen=True)
class CollisionVerdict:
    safe: bool
    d_thr: float
    report: DistanceReport


class LineDistance(NamedTuple):
    distance: float
    c_a: float
    c_b: float
    parallel: bool


class PointDistance(NamedTuple):
    distance: float
    b: float  # unclamped projection parameter
    witness: np.ndarray  # closest point on the segment


class SegmentDistance(NamedTuple):
    distance: float
    witness_a: np.ndarray
    witness_b: np.ndarray


def line_line_distance(a: Segment, b: Segment) -> LineDistance:
    """Distance between the infinite carrier lines and their closest-approach parameters.

    Parallel lines (cross product below tolerance) report the point-to-line
    distance with c_b the projection of a.start onto line b.
    """
    if a.degenerate or b.degenerate:
        raise DegenerateGeometryError("line distance undefined for zero-length segment")
    na, nb = a.direction, b.direction
    cross = np.cross(na, nb)
    cross_norm = float(np.linalg.norm(cross))
    if cross_norm <= PARALLEL_TOL * a.length * b.length:
        d, t, _ = point_segment_distance_unclamped(a.start, b)
        return LineDistance(d, 0.0, t, True)
    w0 = a.start - b.start
    # distance via the common normal; closest-approach parameters from the 2x2 system
    d = abs(float(np.dot(cross, w0))) / cross_norm
    aa = float(np.dot(na, na))
    bb = float(np.dot(nb, nb))
    ab = float(np.dot(na, nb))
    ad = float(np.dot(na, w0))
    bd = float(np.dot(nb, w0))
    denom = aa * bb - ab * ab
    c_a = (ab * bd - bb * ad) / denom
    c_b = (aa * bd - ab * ad) / denom
    return LineDistance(d, c_a, c_b, False)


def point_segment_distance_unclamped(point: np.ndarray, s: Segment):
    """Perpendicular distance to the carrier line plus the raw projection parameter."""
    if s.degenerate:
        raise DegenerateGeometryError("point-line distance undefined for zero-length segment")
    point = np.asarray(point, dtype=float)
    n = s.direction
    b = float(np.dot(point - s.start, n) / np.dot(n, n))
    foot = s.point_at(b)
    return float(np.linalg.norm(point - foot)), b, foot


def point_segment_distance(point: np.ndarray, s: Segment) -> PointDistance:
    """Distance from a point to a closed segment.

    When the perpendicular foot falls outside [0, 1] the nearer endpoint is
    the witness; the returned b is always the unclamped projection parameter.
    """
    d_line, b, foot = point_segment_distance_unclamped(point, s)
    if 0.0 <= b <= 1.0:
        return PointDistance(d_line, b, foot)
    point = np.asarray(point, dtype=float)
    d_start = float(np.linalg.norm(point - s.start))
    d_end = float(np.linalg.norm(point - s.end))
    if d_start <= d_end:
        return PointDistance(d_start, b, s.start.copy())
    return PointDistance(d_end, b, s.end.copy())


def segment_segment_distance(a: Segment, b: Segment) -> SegmentDistance:
    """Exact minimum distance between two closed segments with witness points.

    Zero-length segments collapse to points and are handled by the
    point-to-segment fallback.
    """
    if a.degenerate and b.degenerate:
        return SegmentDistance(float(np.linalg.norm(a.start - b.start)), a.start.copy(), b.start.copy())
    if a.degenerate:
        res = point_segment_distance(a.start, b)
        return SegmentDistance(res.distance, a.start.copy(), res.witness)
    if b.degenerate:
        res = point_segment_distance(b.start, a)
        return SegmentDistance(res.distance, res.witness, b.start.copy())

    line = line_line_distance(a, b)
    if not line.parallel and 0.0 <= line.c_a <= 1.0 and 0.0 <= line.c_b <= 1.0:
        wa = a.point_at(line.c_a)
        wb = b.point_at(line.c_b)
        return SegmentDistance(float(np.linalg.norm(wa - wb)), wa, wb)

    # closest approach off-segment (or parallel lines): minimum lies on the
    # boundary, i.e. one of the four endpoint-to-segment distances
    best = None
    for point, seg, point_on_a in (
        (a.start, b, True),
        (a.end, b, True),
        (b.start, a, False),
        (b.end, a, False),
    ):
        res = point_segment_distance(point, seg)
        if best is None or res.distance < best[0]:
            if point_on_a:
                best = (res.distance, np.asarray(point, dtype=float).copy(), res.witness)
            else:
                best = (res.distance, res.witness, np.asarray(point, dtype=float).copy())
    return SegmentDistance(*best)


def _clamped_point_segment_d2(P, A0, D, DD):
    """Squared point-to-segment distances, broadcasting P against segments (A0, D)."""
    W = P[:, None, :] - A0[None, :, :]
    t = np.einsum("ijk,jk->ij", W, D) / DD[None, :]
    np.clip(t, 0.0, 1.0, out=t)
    diff = W - t[:, :, None] * D[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _pairwise_min(points_a: np.ndarray, points_b: np.ndarray):
    """Vectorized all-pairs segment distances; same branch structure as the scalar routine."""
    A0, A1 = points_a[:-1], points_a[1:]
    B0, B1 = points_b[:-1], points_b[1:]
    Da, Db = A1 - A0, B1 - B0
    la2 = np.einsum("ij,ij->i", Da, Da)
    lb2 = np.einsum("ij,ij->i", Db, Db)

    # endpoint-to-segment bound (exact when the interior solution is invalid)
    d2 = np.minimum(
        np.minimum(
            _clamped_point_segment_d2(A0, B0, Db, lb2), _clamped_point_segment_d2(A1, B0, Db, lb2)
        ),
        np.minimum(
            _clamped_point_segment_d2(B0, A0, Da, la2).T,
            _clamped_point_segment_d2(B1, A0, Da, la2).T,
        ),
    )

    # interior closest-approach where it lands on both segments
    cross = np.cross(Da[:, None, :], Db[None, :, :])
    cross_norm = np.linalg.norm(cross, axis=2)
    ab = np.einsum("ik,jk->ij", Da, Db)
    W0 = A0[:, None, :] - B0[None, :, :]
    ad = np.einsum("ijk,ik->ij", W0, Da)
    bd = np.einsum("ijk,jk->ij", W0, Db)
    denom = la2[:, None] * lb2[None, :] - ab * ab
    nonparallel = cross_norm > PARALLEL_TOL * np.sqrt(la2[:, None] * lb2[None, :])
    safe = np.where(nonparallel, denom, 1.0)
    c_a = (ab * bd - lb2[None, :] * ad) / safe
    c_b = (la2[:, None] * bd - ab * ad) / safe
    interior = nonparallel & (c_a >= 0.0) & (c_a <= 1.0) & (c_b >= 0.0) & (c_b <= 1.0)
    gap = W0 + c_a[:, :, None] * Da[:, None, :] - c_b[:, :, None] * Db[None, :, :]
    d2_interior = np.einsum("ijk,ijk->ij", gap, gap)
    return np.where(interior, d2_interior, d2)


def min_arm_distance(
    left: ArmSkeleton, right: ArmSkeleton, skip_adjacent_to_grasp: bool = False
) -> DistanceReport:
    """Minimum distance over all left x right link pairs.

    With skip_adjacent_to_grasp the terminal (gripper) segment of each arm is
    excluded: those intentionally approach each other while both grippers
    hold the object. All pairs are scanned batched; the winning pair is
    re-evaluated by the scalar routine for the exact witness points.
    """
    left_points = left.points[:-1] if skip_adjacent_to_grasp else left.points
    right_points = right.points[:-1] if skip_adjacent_to_grasp else right.points
    if len(left_points) < 2 or len(right_points) < 2:
        raise ConfigError("skeleton has no segments to check")

    la = np.linalg.norm(left_points[1:] - left_points[:-1], axis=1)
    lb = np.linalg.norm(right_points[1:] - right_points[:-1], axis=1)
    if np.any(la <= DEGENERATE_TOL) or np.any(lb <= DEGENERATE_TOL):
        return _min_arm_distance_scalar(left_points, right_points)

    d2 = _pairwise_min(left_points, right_points)
    i, j = np.unravel_index(int(np.argmin(d2)), d2.shape)
    res = segment_segment_distance(
        Segment(left_points[i], left_points[i + 1]), Segment(right_points[j], right_points[j + 1])
    )
    return DistanceReport(res.distance, (int(i), int(j)), res.witness_a, res.witness_b)


def _min_arm_distance_scalar(left_points, right_points) -> DistanceReport:
    best: tuple[float, tuple[int, int], np.ndarray, np.ndarray] | None = None
    for i in range(len(left_points) - 1):
        sl = Segment(left_points[i], left_points[i + 1])
        for j in range(len(right_points) - 1):
            res = segment_segment_distance(sl, Segment(right_points[j], right_points[j + 1]))
            if best is None or res.distance < best[0]:
                best = (res.distance, (i, j), res.witness_a, res.witness_b)
    return DistanceReport(best[0], best[1], best[2], best[3])


def collision_check(report: DistanceReport, d_thr: float) -> CollisionVerdict:
    """SAFE iff d_min >= d_thr (boundary inclusive)."""
    if d_thr <= 0.0:
        raise ConfigError("d_thr must be positive")
    return CollisionVerdict(report.d_min >= d_thr, d_thr, report)
