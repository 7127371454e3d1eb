"""Cutter-workpiece engagement extraction at the end of each segment.

Engagement is evaluated against the slice regions as they stand BEFORE the
segment's own material removal: the arcs of the tool circle lying in that
material are exactly the contact arcs adjacent to the freshly cut surface.
Raw angles are degrees CCW from the workpiece +X axis; feed-referenced
angles can be derived with :func:`feed_relative`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geom2d import (
    DEFAULT_CHORD_TOL,
    Circle,
    PointLocation,
    Region2D,
    bounds_overlap,
    circle_boundary_angles,
    polygonize,
)
from .ipw import SliceStack
from .sweep import CLSegment

# Intervals separated by a thinner gap are chord-discretization slivers.
MERGE_GAP_DEG = 0.01


@dataclass(frozen=True)
class AngularInterval:
    """Contact arc traversed CCW from ``entry`` to ``exit`` (degrees).

    Bounds lie in [0, 360); an arc crossing 0 has ``exit < entry``. Full
    engagement is encoded as (0, 360).
    """

    entry: float
    exit: float

    @property
    def is_full(self) -> bool:
        return self.entry == 0.0 and self.exit == 360.0

    @property
    def width(self) -> float:
        if self.is_full:
            return 360.0
        w = (self.exit - self.entry) % 360.0
        return w if w > 0.0 else 360.0

    @property
    def exit_unwrapped(self) -> float:
        """Exit angle continued past 360 so that exit - entry equals the width."""
        return self.entry + self.width

    def contains(self, angle_deg: float) -> bool:
        if self.is_full:
            return True
        return (angle_deg - self.entry) % 360.0 <= self.width

    def shifted(self, delta_deg: float) -> "AngularInterval":
        if self.is_full:
            return self
        return AngularInterval((self.entry + delta_deg) % 360.0, (self.exit + delta_deg) % 360.0)


@dataclass(frozen=True)
class EngagementSlice:
    """Engagement on one axial slice: contact arcs plus the chip cross-section."""

    z_mid: float
    intervals: tuple[AngularInterval, ...]
    chip_area: float


@dataclass
class CWERecord:
    """Aggregate engagement for one segment, evaluated at its end CL."""

    cl_index: int
    x: float
    y: float
    z: float
    feed_angle: float
    tool_radius: float = 0.0
    engagement_volume: float = 0.0
    flank_contact_area: float = 0.0
    bottom_contact_area: float = 0.0
    removed_volume: float = 0.0
    n_slices_engaged: int = 0
    min_entry: float = 0.0
    max_exit: float = 0.0
    slices: list[EngagementSlice] = field(default_factory=list)
    feed_angle_fallback: bool = False
    segment_time_ms: float = 0.0
    processed: bool = False


def feed_relative(intervals, feed_angle_deg: float) -> list[AngularInterval]:
    """Re-reference interval bounds to the feed direction; widths are preserved."""
    return [iv.shifted(-feed_angle_deg) for iv in intervals]


def engagement_intervals(
    circle: Circle,
    pre_region: Region2D,
    merge_gap_deg: float = MERGE_GAP_DEG,
) -> list[AngularInterval]:
    """Contact arcs of ``circle`` against the material in ``pre_region``.

    Boundary crossing angles partition the circle; a gap whose midpoint lies
    inside the material is a contact arc. Grazing (ON_BOUNDARY) midpoints do
    not count as engagement. Arcs separated by gaps thinner than
    ``merge_gap_deg`` are merged.
    """
    crossings = circle_boundary_angles(circle, pre_region)
    if not crossings:
        for probe in (0.0, 90.0, 180.0, 270.0):
            loc = pre_region.point_in(circle.point_at(probe))
            if loc is PointLocation.INSIDE:
                return [AngularInterval(0.0, 360.0)]
            if loc is PointLocation.OUTSIDE:
                return []
        return []

    # classify the midpoint of every cyclic gap between crossings
    n = len(crossings)
    mids = []
    for i in range(n):
        a = crossings[i]
        b = crossings[(i + 1) % n] + (360.0 if i + 1 == n else 0.0)
        mids.append(((a + b) / 2.0) % 360.0)
    pts = np.array([[circle.point_at(m).x, circle.point_at(m).y] for m in mids])
    locs = pre_region.classify_points(pts)

    arcs = [
        (crossings[i], crossings[(i + 1) % n])
        for i in range(n)
        if locs[i] is PointLocation.INSIDE
    ]
    if not arcs:
        return []
    if len(arcs) == n:
        return [AngularInterval(0.0, 360.0)]

    merged = _merge_adjacent(arcs, merge_gap_deg)
    if not merged:
        return []
    intervals = [AngularInterval(a % 360.0, b % 360.0) for a, b in merged]
    return sorted(intervals, key=lambda iv: iv.entry)


def _merge_adjacent(arcs: list[tuple[float, float]], merge_gap_deg: float):
    """Merge CCW arcs whose cyclic separation is below the gap tolerance."""
    merged = [list(arcs[0])]
    for a, b in arcs[1:]:
        gap = (a - merged[-1][1]) % 360.0
        if gap <= merge_gap_deg:
            merged[-1][1] = b
        else:
            merged.append([a, b])
    if len(merged) > 1:
        wrap_gap = (merged[0][0] - merged[-1][1]) % 360.0
        if wrap_gap <= merge_gap_deg:
            merged[0][0] = merged[-1][0]
            merged.pop()
    if len(merged) == 1:
        a, b = merged[0]
        if (b - a) % 360.0 <= merge_gap_deg and len(arcs) > 1:
            # merging consumed the whole circle
            return [(0.0, 360.0)]
    return [tuple(m) for m in merged]


def cwe_for_segment(
    pre_stack: SliceStack,
    seg: CLSegment,
    prev_feed_angle: float | None = None,
    chord_tol: float = DEFAULT_CHORD_TOL,
    merge_gap_deg: float = MERGE_GAP_DEG,
    parallel: bool = False,
) -> CWERecord:
    """Instantaneous engagement at the segment's end cutter location.

    ``pre_stack`` must be the workpiece state before this segment's removal.
    Flank contact is the cylindrical band area R * width * dz summed over
    engaged slices; bottom contact is the chip area of the lowest slice in
    the tool's axial span, provided that slice is engaged (a tool tip
    hanging in air below the material rubs nothing).
    """
    feed = seg.feed_angle_deg
    fallback = False
    if feed is None:
        fallback = True
        feed = prev_feed_angle if prev_feed_angle is not None else 0.0

    end = seg.end
    radius = seg.tool.radius
    rec = CWERecord(cl_index=seg.index, x=end.x, y=end.y, z=end.z, feed_angle=feed,
                    tool_radius=radius, feed_angle_fallback=fallback)
    z_lo = end.z - 1e-9
    z_hi = end.z + seg.tool.flute_length + 1e-9
    circle = Circle(end.xy, radius)
    circle_bounds = (end.x - radius, end.y - radius, end.x + radius, end.y + radius)

    span = [(z, r) for z, r in pre_stack.slices if z_lo <= z <= z_hi]

    def work(item):
        z_mid, region = item
        if region.is_empty or not bounds_overlap(circle_bounds, region.bounds):
            return None
        intervals = engagement_intervals(circle, region, merge_gap_deg)
        if not intervals:
            return None
        chip = region.intersection(polygonize(circle, chord_tol)).area()
        return EngagementSlice(z_mid, tuple(intervals), chip)

    if parallel and len(span) > 1:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(work, span))
    else:
        results = [work(item) for item in span]

    dz = pre_stack.dz
    engaged = [s for s in results if s is not None]
    rec.slices = engaged
    rec.n_slices_engaged = len(engaged)
    if not engaged:
        return rec

    for s in engaged:
        width_rad = math.radians(sum(iv.width for iv in s.intervals))
        rec.flank_contact_area += radius * width_rad * dz
        rec.engagement_volume += s.chip_area * dz
    # bottom face rubs only when the lowest engaged slice sits in the slab
    # at the tool tip; a tip hanging in air below the material rubs nothing
    if span and engaged[0].z_mid == span[0][0] and engaged[0].z_mid - end.z <= dz + 1e-9:
        rec.bottom_contact_area = engaged[0].chip_area
    rec.min_entry = min(iv.entry for s in engaged for iv in s.intervals)
    rec.max_exit = max(iv.exit_unwrapped for s in engaged for iv in s.intervals)
    return rec
