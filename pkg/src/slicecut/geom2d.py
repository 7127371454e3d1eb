"""2D region kernel: polygons with holes, booleans, and circle queries.

All coordinates are millimeters in the workpiece frame. Angles returned by
:func:`circle_boundary_angles` are degrees in [0, 360), counterclockwise from
the workpiece +X axis.

Boolean set operations are evaluated on a snap-rounded coordinate grid
(``SNAP`` mm) via the GEOS overlay engine, which subdivides intersecting
edges in a plane sweep and therefore tolerates the coincident and repeated
edges produced by subtracting many overlapping tool footprints. Curved
boundaries only enter a :class:`Region2D` through :func:`polygonize`, so
every downstream area and angle error is bounded by the chord tolerance
chosen there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import shapely
from shapely.errors import GEOSException
from shapely.geometry import MultiPolygon, Polygon
from shapely.geometry.polygon import orient

from .errors import GeometryError, ValidationError

# Coordinate snap grid for all boolean work, in mm.
SNAP = 1e-7

# Default linearization tolerance for circular boundaries, in mm.
DEFAULT_CHORD_TOL = 1e-3

# Crossing angles closer than this are duplicates of one geometric crossing.
ANGLE_SNAP_DEG = 1e-7


class PointLocation(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    ON_BOUNDARY = "on_boundary"


def _require_finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Point2:
    """A point in the XY plane (mm)."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _require_finite(self.x, "x"))
        object.__setattr__(self, "y", _require_finite(self.y, "y"))

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class Contour:
    """A closed polygonal loop (the edge back to the first vertex is implicit)."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = np.asarray(
            [(p.x, p.y) if isinstance(p, Point2) else (p[0], p[1]) for p in points],
            dtype=float,
        )
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValidationError("contour needs a sequence of XY points")
        # drop an explicit closing vertex
        if len(pts) > 1 and np.allclose(pts[0], pts[-1], atol=SNAP, rtol=0.0):
            pts = pts[:-1]
        if len(pts) < 3:
            raise ValidationError(f"contour needs at least 3 vertices, got {len(pts)}")
        if not np.isfinite(pts).all():
            raise ValidationError("contour has non-finite coordinates")
        self.points = pts

    def __len__(self) -> int:
        return len(self.points)

    @property
    def signed_area(self) -> float:
        """Shoelace area; positive for counterclockwise loops."""
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    @property
    def is_ccw(self) -> bool:
        return self.signed_area > 0.0


@dataclass(frozen=True)
class Circle:
    """Tool cross-section: a circle of ``radius`` mm about ``center``."""

    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "radius", _require_finite(self.radius, "radius"))
        if self.radius <= 0.0:
            raise ValidationError(f"circle radius must be > 0, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def point_at(self, angle_deg: float) -> Point2:
        a = math.radians(angle_deg)
        return Point2(
            self.center.x + self.radius * math.cos(a),
            self.center.y + self.radius * math.sin(a),
        )


@dataclass(frozen=True)
class Capsule:
    """Stadium swept by a disk of ``radius`` translating from ``a`` to ``b``.

    Degenerates to a plain disk when the endpoints coincide.
    """

    a: Point2
    b: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "radius", _require_finite(self.radius, "radius"))
        if self.radius <= 0.0:
            raise ValidationError(f"capsule radius must be > 0, got {self.radius}")

    @property
    def length(self) -> float:
        return self.a.distance_to(self.b)

    @property
    def is_disk(self) -> bool:
        return self.length <= SNAP

    @property
    def area(self) -> float:
        """Exact area: pi R^2 + 2 R L."""
        return math.pi * self.radius**2 + 2.0 * self.radius * self.length

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        r = self.radius
        return (
            min(self.a.x, self.b.x) - r,
            min(self.a.y, self.b.y) - r,
            max(self.a.x, self.b.x) + r,
            max(self.a.y, self.b.y) + r,
        )

    def contains(self, p: Point2, tol: float = 0.0) -> bool:
        """Membership by exact distance to the spine segment."""
        return _dist_point_segment(p.x, p.y, self.a.x, self.a.y, self.b.x, self.b.y) <= self.radius + tol


def _dist_point_segment(px, py, ax, ay, bx, by) -> float:
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 <= 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


class Region2D:
    """Plane set as disjoint polygons with holes.

    Instances are immutable; boolean operations return new regions. The
    canonical form exposed by :attr:`outers` / :attr:`holes` has outer
    contours counterclockwise and holes clockwise; constructors accept
    either orientation and normalize.
    """

    __slots__ = ("_geom", "_edges_cache", "_bounds_cache")

    def __init__(self, geom):
        # internal: geom is a snap-rounded, valid (Multi)Polygon
        self._geom = geom
        self._edges_cache = None
        self._bounds_cache = None

    # -- construction -------------------------------------------------

    @classmethod
    def empty(cls) -> "Region2D":
        return cls(MultiPolygon([]))

    @classmethod
    def from_contours(cls, outers, holes=()) -> "Region2D":
        """Build from outer loops and hole loops (any orientation).

        Raises :class:`ValidationError` for self-intersecting contours.
        Overlapping outers are merged; holes are clipped to the outers
        they actually lie in.
        """
        outer_polys = [cls._ring_to_polygon(c) for c in outers]
        hole_polys = [cls._ring_to_polygon(c) for c in holes]
        if not outer_polys:
            return cls.empty()
        solid = shapely.union_all(outer_polys)
        if hole_polys:
            solid = solid.difference(shapely.union_all(hole_polys))
        return cls._wrap(solid)

    @classmethod
    def rectangle(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "Region2D":
        if not (xmax > xmin and ymax > ymin):
            raise ValidationError(f"degenerate rectangle [{xmin},{xmax}]x[{ymin},{ymax}]")
        return cls.from_contours([Contour([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)])])

    @staticmethod
    def _ring_to_polygon(contour) -> Polygon:
        if not isinstance(contour, Contour):
            contour = Contour(contour)
        poly = Polygon(contour.points)
        if not poly.is_valid:
            raise ValidationError(
                f"self-intersecting contour near {shapely.get_coordinates(poly)[:4].tolist()}"
            )
        try:
            snapped = shapely.set_precision(poly, SNAP)
        except GEOSException as exc:
            raise GeometryError(f"snap-rounding failed: {exc}", coords=contour.points) from exc
        return snapped

    @classmethod
    def _wrap(cls, geom) -> "Region2D":
        """Normalize a GEOS result to a clean polygonal region."""
        if geom.is_empty:
            return cls.empty()
        polys = []
        queue = [geom]
        while queue:
            g = queue.pop(0)
            if isinstance(g, Polygon):
                if not g.is_empty and g.area > 0.0:
                    polys.append(g)
            elif hasattr(g, "geoms"):  # MultiPolygon / GeometryCollection
                queue.extend(g.geoms)
            # lines and points from precision collapse are dropped
        if not polys:
            return cls.empty()
        out = MultiPolygon(polys) if len(polys) > 1 else polys[0]
        if shapely.get_precision(out) != SNAP:
            out = shapely.set_precision(out, SNAP)
        return cls(out)

    # -- basic queries ------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self._geom.is_empty

    @property
    def bounds(self) -> tuple[float, float, float, float] | None:
        """(xmin, ymin, xmax, ymax), or None when empty."""
        if self.is_empty:
            return None
        if self._bounds_cache is None:
            self._bounds_cache = tuple(self._geom.bounds)
        return self._bounds_cache

    @property
    def outers(self) -> list[Contour]:
        return [Contour(np.asarray(orient(p, 1.0).exterior.coords)) for p in self._polygons()]

    @property
    def holes(self) -> list[Contour]:
        out = []
        for p in self._polygons():
            out.extend(Contour(np.asarray(ring.coords)) for ring in orient(p, 1.0).interiors)
        return out

    def _polygons(self) -> list[Polygon]:
        if self.is_empty:
            return []
        if isinstance(self._geom, Polygon):
            return [self._geom]
        return list(self._geom.geoms)

    def area(self) -> float:
        """Total enclosed area: sum over outers minus sum over holes."""
        return float(self._geom.area)

    def perimeter(self) -> float:
        return float(self._geom.length)

    # -- point classification ------------------------------------------

    def _edge_arrays(self):
        """Stacked edge endpoints (A, B) over every ring, cached."""
        if self._edges_cache is None:
            a_parts, b_parts = [], []
            for poly in self._polygons():
                for ring in (poly.exterior, *poly.interiors):
                    coords = np.asarray(ring.coords)  # closed: first == last
                    a_parts.append(coords[:-1])
                    b_parts.append(coords[1:])
            if a_parts:
                self._edges_cache = (np.vstack(a_parts), np.vstack(b_parts))
            else:
                self._edges_cache = (np.empty((0, 2)), np.empty((0, 2)))
        return self._edges_cache

    def point_in(self, p: Point2, tol: float = SNAP) -> PointLocation:
        """Classify a point; within ``tol`` of any edge counts as ON_BOUNDARY."""
        return self.classify_points(np.array([[p.x, p.y]]), tol=tol)[0]

    def classify_points(self, pts: np.ndarray, tol: float = SNAP) -> list[PointLocation]:
        """Vectorized :meth:`point_in` for an (N, 2) array."""
        a, b = self._edge_arrays()
        n = len(pts)
        if len(a) == 0:
            return [PointLocation.OUTSIDE] * n
        px = pts[:, 0][:, None]
        py = pts[:, 1][:, None]
        ax, ay = a[:, 0][None, :], a[:, 1][None, :]
        bx, by = b[:, 0][None, :], b[:, 1][None, :]
        dx, dy = bx - ax, by - ay
        L2 = dx * dx + dy * dy
        t = np.clip(((px - ax) * dx + (py - ay) * dy) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
        d2 = (px - (ax + t * dx)) ** 2 + (py - (ay + t * dy)) ** 2
        on_boundary = d2.min(axis=1) <= tol * tol

        crosses = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = ax + (py - ay) / np.where(dy != 0, dy, 1.0) * dx
        inside = (np.sum(crosses & (x_at > px), axis=1) % 2) == 1

        out = []
        for i in range(n):
            if on_boundary[i]:
                out.append(PointLocation.ON_BOUNDARY)
            elif inside[i]:
                out.append(PointLocation.INSIDE)
            else:
                out.append(PointLocation.OUTSIDE)
        return out

    # -- booleans -------------------------------------------------------

    def difference(self, other: "Region2D") -> "Region2D":
        return self._overlay(other, "difference")

    def intersection(self, other: "Region2D") -> "Region2D":
        return self._overlay(other, "intersection")

    def union(self, other: "Region2D") -> "Region2D":
        return self._overlay(other, "union")

    def _overlay(self, other: "Region2D", op: str) -> "Region2D":
        fn = getattr(shapely, op)
        try:
            return Region2D._wrap(fn(self._geom, other._geom))
        except GEOSException:
            # one repair attempt, then report the degeneracy
            try:
                g1 = shapely.set_precision(shapely.make_valid(self._geom), SNAP)
                g2 = shapely.set_precision(shapely.make_valid(other._geom), SNAP)
                return Region2D._wrap(fn(g1, g2))
            except GEOSException as exc:
                raise GeometryError(
                    f"{op} failed after snap-rounding: {exc}",
                    coords=(self.bounds, other.bounds),
                ) from exc


def bounds_overlap(a, b) -> bool:
    """Axis-aligned bounding box overlap; either side may be None (empty)."""
    if a is None or b is None:
        return False
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def polygonize(shape, chord_tol: float = DEFAULT_CHORD_TOL) -> Region2D:
    """Inscribed polygonal approximation of a circle or capsule.

    The boundary deviates from the true arc by at most ``chord_tol``. The
    vertex count per semicircle is ``ceil(pi / acos(1 - chord_tol / R))``
    with a floor of 8.
    """
    if not isinstance(shape, (Circle, Capsule)):
        raise ValidationError(f"cannot polygonize {type(shape).__name__}")
    radius = shape.radius
    if not 0.0 < chord_tol < radius:
        raise ValidationError(
            f"chord tolerance must be in (0, radius), got {chord_tol} for radius {radius}"
        )
    n_semi = max(8, math.ceil(math.pi / math.acos(1.0 - chord_tol / radius)))
    pts = _shape_polygon_points(shape, n_semi)
    return Region2D.from_contours([Contour(pts)])


def _shape_polygon_points(shape, n_semi: int) -> np.ndarray:
    r = shape.radius
    if isinstance(shape, Circle) or shape.is_disk:
        c = shape.center if isinstance(shape, Circle) else shape.a
        ang = np.linspace(0.0, 2.0 * math.pi, 2 * n_semi, endpoint=False)
        return np.column_stack([c.x + r * np.cos(ang), c.y + r * np.sin(ang)])
    a, b = shape.a, shape.b
    phi = math.atan2(b.y - a.y, b.x - a.x)
    ang_b = np.linspace(phi - math.pi / 2, phi + math.pi / 2, n_semi + 1)
    ang_a = np.linspace(phi + math.pi / 2, phi + 3 * math.pi / 2, n_semi + 1)
    cap_b = np.column_stack([b.x + r * np.cos(ang_b), b.y + r * np.sin(ang_b)])
    cap_a = np.column_stack([a.x + r * np.cos(ang_a), a.y + r * np.sin(ang_a)])
    return np.vstack([cap_b, cap_a])


def circle_boundary_angles(circle: Circle, region: Region2D) -> list[float]:
    """Angles (deg, sorted, [0, 360)) where the circle crosses the region boundary.

    Only transversal crossings are reported: an edge whose supporting line
    passes within ``SNAP`` of tangency contributes nothing, so a grazing
    touch never opens or closes an engagement interval. Crossings repeated
    by adjacent edges sharing a vertex are deduplicated.
    """
    a, b = region._edge_arrays()
    if len(a) == 0:
        return []
    cx, cy, r = circle.center.x, circle.center.y, circle.radius

    d = b - a
    f = a - np.array([cx, cy])
    dd = np.einsum("ij,ij->i", d, d)
    fd = np.einsum("ij,ij->i", f, d)
    ff = np.einsum("ij,ij->i", f, f)
    ok = dd > 0.0
    # squared half-chord of the supporting line: r^2 - dist_line^2
    with np.errstate(divide="ignore", invalid="ignore"):
        h2 = (fd * fd - dd * (ff - r * r)) / np.where(ok, dd, 1.0)
    transversal = ok & (h2 > 2.0 * r * SNAP)

    angles: list[float] = []
    idx = np.nonzero(transversal)[0]
    if len(idx):
        sq = np.sqrt(h2[idx] * dd[idx])
        t1 = (-fd[idx] - sq) / dd[idx]
        t2 = (-fd[idx] + sq) / dd[idx]
        for i, tA, tB in zip(idx, t1, t2):
            for t in (tA, tB):
                if 0.0 <= t <= 1.0:
                    # snap the crossing point so shared vertices dedupe exactly
                    x = round((a[i, 0] + t * d[i, 0]) / SNAP) * SNAP
                    y = round((a[i, 1] + t * d[i, 1]) / SNAP) * SNAP
                    ang = math.degrees(math.atan2(y - cy, x - cx)) % 360.0
                    angles.append(ang)
    if not angles:
        return []
    angles.sort()
    deduped = [angles[0]]
    for ang in angles[1:]:
        if ang - deduped[-1] > ANGLE_SNAP_DEG:
            deduped.append(ang)
    # wraparound duplicate (e.g. 0.0 vs 359.9999999)
    if len(deduped) > 1 and (360.0 - deduped[-1]) + deduped[0] <= ANGLE_SNAP_DEG:
        deduped.pop()
    return deduped
