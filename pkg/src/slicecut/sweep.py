"""Per-segment swept footprints for flat end mills on linear moves.

A segment's removal footprint at one axial height is exactly a capsule: the
stadium traced by the tool's circular cross-section over the part of the
move during which the flute covers that height. ``SampledUnion`` mode
instead unions discrete tool positions along the move, which is useful for
convergence studies against the exact capsule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import shapely
from shapely.geometry import Polygon

from .errors import ValidationError
from .geom2d import (
    DEFAULT_CHORD_TOL,
    SNAP,
    Capsule,
    Circle,
    Point2,
    Region2D,
    _shape_polygon_points,
)

# Sample spacing for SampledUnion mode when none is given, as a fraction of
# the tool radius. Keeps the union-vs-capsule area error well under 0.5%.
DEFAULT_SPACING_FACTOR = 0.25

_Z_TOL = 1e-9


class ToolKind(Enum):
    FLAT_END_MILL = "flat_end_mill"


class SweepMode(Enum):
    EXACT = "exact"
    SAMPLED_UNION = "sampled_union"


@dataclass(frozen=True)
class ToolDefinition:
    """Flat end mill. ``diameter`` and ``flute_length`` in mm."""

    id: str
    kind: ToolKind
    diameter: float
    flute_length: float

    def __post_init__(self):
        if self.diameter <= 0:
            raise ValidationError(f"tool diameter must be > 0, got {self.diameter}")
        if self.flute_length <= 0:
            raise ValidationError(f"flute length must be > 0, got {self.flute_length}")

    @property
    def radius(self) -> float:
        return self.diameter / 2.0


@dataclass(frozen=True)
class CutterLocation:
    """Tool-tip position in the workpiece frame, mm."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"cutter location {name} must be finite, got {v!r}")

    @property
    def xy(self) -> Point2:
        return Point2(self.x, self.y)


@dataclass(frozen=True)
class Toolpath:
    """One operation's ordered cutter locations, referencing a tool id."""

    operation: str
    tool_id: str
    points: tuple[CutterLocation, ...]

    def segments(self, tool: ToolDefinition) -> list["CLSegment"]:
        return [
            CLSegment(index=i + 1, start=p0, end=p1, tool=tool)
            for i, (p0, p1) in enumerate(zip(self.points, self.points[1:]))
        ]


@dataclass(frozen=True)
class CLSegment:
    """Linear move between consecutive cutter locations.

    ``index`` is the toolpath index of the END cutter location, where the
    engagement for this segment is evaluated.
    """

    index: int
    start: CutterLocation
    end: CutterLocation
    tool: ToolDefinition

    @property
    def xy_length(self) -> float:
        return math.hypot(self.end.x - self.start.x, self.end.y - self.start.y)

    @property
    def dz(self) -> float:
        return self.end.z - self.start.z

    @property
    def is_dwell(self) -> bool:
        return self.xy_length <= SNAP and abs(self.dz) <= SNAP

    @property
    def feed_angle_deg(self) -> float | None:
        """Feed direction in degrees CCW from +X; None for pure-Z or dwell moves."""
        if self.xy_length <= SNAP:
            return None
        return math.degrees(math.atan2(self.end.y - self.start.y, self.end.x - self.start.x)) % 360.0

    def inflated_bounds(self) -> tuple[float, float, float, float]:
        """Segment XY bounding box grown by the tool radius."""
        r = self.tool.radius
        return (
            min(self.start.x, self.end.x) - r,
            min(self.start.y, self.end.y) - r,
            max(self.start.x, self.end.x) + r,
            max(self.start.y, self.end.y) + r,
        )


def capsule_for_segment(seg: CLSegment) -> Capsule:
    """Full-move footprint of a constant-z segment."""
    if abs(seg.dz) > SNAP:
        raise ValidationError(
            f"segment {seg.index} changes z by {seg.dz}; use footprint_at_slice for ramps"
        )
    return Capsule(seg.start.xy, seg.end.xy, seg.tool.radius)


def footprint_at_slice(seg: CLSegment, z_slice: float) -> Capsule | None:
    """Capsule cut at height ``z_slice``, or None when the flute never covers it.

    The flute spans [tip, tip + flute_length]; along the move the tip height
    interpolates linearly, so the cutting parameter interval is where
    ``z_tip(t) <= z_slice <= z_tip(t) + flute_length``.
    """
    z0, z1 = seg.start.z, seg.end.z
    flute = seg.tool.flute_length
    lo, hi = 0.0, 1.0
    if abs(z1 - z0) <= _Z_TOL:
        if not (z0 - _Z_TOL <= z_slice <= z0 + flute + _Z_TOL):
            return None
    else:
        # z_tip(t) <= z_slice        -> t bound from one side
        # z_tip(t) >= z_slice - flute -> t bound from the other
        t_at = lambda z: (z - z0) / (z1 - z0)
        if z1 > z0:
            hi = min(hi, t_at(z_slice))
            lo = max(lo, t_at(z_slice - flute))
        else:
            lo = max(lo, t_at(z_slice))
            hi = min(hi, t_at(z_slice - flute))
        if hi < lo - _Z_TOL:
            return None
        lo, hi = max(0.0, lo), min(1.0, hi)
        if hi < lo:
            return None
    ax = seg.start.x + lo * (seg.end.x - seg.start.x)
    ay = seg.start.y + lo * (seg.end.y - seg.start.y)
    bx = seg.start.x + hi * (seg.end.x - seg.start.x)
    by = seg.start.y + hi * (seg.end.y - seg.start.y)
    return Capsule(Point2(ax, ay), Point2(bx, by), seg.tool.radius)


def sampled_union_footprint(
    seg: CLSegment,
    z_slice: float,
    spacing: float | None = None,
    chord_tol: float = DEFAULT_CHORD_TOL,
) -> Region2D:
    """Union of tool disks at intermediate positions along the cut sub-segment.

    Positions are spaced at most ``spacing`` apart with both endpoints
    included; ``spacing`` defaults to radius / 4. Because every disk is
    inscribed in the exact capsule, the union area converges to the capsule
    area from below as the spacing shrinks.
    """
    r = seg.tool.radius
    if spacing is None:
        spacing = DEFAULT_SPACING_FACTOR * r
    if spacing <= 0:
        raise ValidationError(f"sample spacing must be > 0, got {spacing}")
    cap = footprint_at_slice(seg, z_slice)
    if cap is None:
        return Region2D.empty()
    return union_of_disks(cap, spacing, chord_tol)


def union_of_disks(cap: Capsule, spacing: float, chord_tol: float) -> Region2D:
    """Polygonized disks at <= ``spacing`` intervals along the capsule spine."""
    r = cap.radius
    n_semi = max(8, math.ceil(math.pi / math.acos(1.0 - min(chord_tol, r / 2) / r)))
    L = cap.length
    n_steps = max(1, math.ceil(L / spacing - 1e-12)) if L > SNAP else 0
    ts = np.linspace(0.0, 1.0, n_steps + 1)
    disks = []
    for t in ts:
        cx = cap.a.x + t * (cap.b.x - cap.a.x)
        cy = cap.a.y + t * (cap.b.y - cap.a.y)
        pts = _shape_polygon_points(Circle(Point2(cx, cy), r), n_semi)
        disks.append(shapely.set_precision(Polygon(pts), SNAP))
    return Region2D._wrap(shapely.union_all(disks))
