"""Independent validators for engagement geometry.

Everything here is deliberately computed WITHOUT the polygon kernel:
closed-form circle-line / circle-circle trigonometry for scenes built from
a rectangle with stadium-shaped material removals, plus brute-force raster
and circle-sampling checks. These act as the ground truth the kernel-based
pipeline is compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engagement import AngularInterval
from .errors import DegenerateInputError, UnsupportedSceneError, ValidationError
from .geom2d import SNAP, Capsule, Circle, Point2, Region2D, _dist_point_segment

_EPS = 1e-9


def circle_line_intersections(circle: Circle, p1: Point2, p2: Point2) -> list[Point2]:
    """Intersections of a circle with the infinite line through p1, p2.

    Tangency (discriminant within snap) yields no points.
    """
    dx, dy = p2.x - p1.x, p2.y - p1.y
    L = math.hypot(dx, dy)
    if L <= SNAP:
        raise DegenerateInputError("line points coincide")
    ux, uy = dx / L, dy / L
    # foot of perpendicular from the center
    t0 = (circle.center.x - p1.x) * ux + (circle.center.y - p1.y) * uy
    fx, fy = p1.x + t0 * ux, p1.y + t0 * uy
    d2 = (circle.center.x - fx) ** 2 + (circle.center.y - fy) ** 2
    h2 = circle.radius**2 - d2
    if h2 <= 2.0 * circle.radius * SNAP:
        return []
    h = math.sqrt(h2)
    return [Point2(fx - h * ux, fy - h * uy), Point2(fx + h * ux, fy + h * uy)]


def circle_circle_intersections(a: Circle, b: Circle) -> list[Point2]:
    """Intersections of two circles; tangency yields no points."""
    dx, dy = b.center.x - a.center.x, b.center.y - a.center.y
    d = math.hypot(dx, dy)
    if d <= SNAP and abs(a.radius - b.radius) <= SNAP:
        raise DegenerateInputError("coincident circles")
    if d <= SNAP:
        return []
    # separation / containment, with the tangency window excluded
    if d >= a.radius + b.radius - SNAP or d <= abs(a.radius - b.radius) + SNAP:
        return []
    # distance from center a to the chord line
    m = (a.radius**2 - b.radius**2 + d * d) / (2.0 * d)
    h2 = a.radius**2 - m * m
    if h2 <= 0.0:
        return []
    h = math.sqrt(h2)
    ux, uy = dx / d, dy / d
    mx, my = a.center.x + m * ux, a.center.y + m * uy
    return [Point2(mx - h * uy, my + h * ux), Point2(mx + h * uy, my - h * ux)]


@dataclass(frozen=True)
class AnalyticalScene:
    """A rectangle of stock with stadium-shaped prior removals.

    ``rect`` is (xmin, ymin, xmax, ymax); ``prior_passes`` are the swept
    footprints of earlier straight moves; the tool of ``radius`` sits at
    ``cl``.
    """

    rect: tuple[float, float, float, float]
    prior_passes: tuple[Capsule, ...]
    cl: Point2
    radius: float

    def __post_init__(self):
        xmin, ymin, xmax, ymax = self.rect
        if not (xmax > xmin and ymax > ymin):
            raise ValidationError("scene rectangle is degenerate")
        if self.radius <= 0:
            raise ValidationError("scene tool radius must be > 0")

    # -- exact membership ------------------------------------------------

    def classify(self, x: float, y: float, eps: float = _EPS) -> str:
        """'material', 'void', or 'boundary' by signed-distance tests only."""
        xmin, ymin, xmax, ymax = self.rect
        d_rect = min(x - xmin, xmax - x, y - ymin, ymax - y)  # >0 inside
        state = None
        if abs(d_rect) <= eps:
            state = "boundary"
        elif d_rect < 0:
            return "void"
        for cap in self.prior_passes:
            d = _dist_point_segment(x, y, cap.a.x, cap.a.y, cap.b.x, cap.b.y) - cap.radius
            if abs(d) <= eps:
                state = "boundary"
            elif d < 0:
                return "void"
        return state or "material"

    def contains(self, x: float, y: float) -> bool:
        return self.classify(x, y, eps=0.0) == "material"


def analytical_engagement(scene: AnalyticalScene) -> list[AngularInterval]:
    """Engagement arcs from pure trigonometry.

    Candidate crossings come from circle-line intersections with the
    rectangle edges and the straight capsule sides, and circle-circle
    intersections with the capsule end caps; candidates that are not on the
    true material boundary (machined away, outside the stock, or beyond a
    finite feature) are discarded. Gap midpoints are then classified with
    the scene's exact membership test.

    Raises :class:`UnsupportedSceneError` when a midpoint cannot be
    classified robustly (it lands on a boundary), which signals a scene
    outside this oracle's intended rectangle-minus-capsules scope.
    """
    tool = Circle(scene.cl, scene.radius)
    xmin, ymin, xmax, ymax = scene.rect
    corners = [Point2(xmin, ymin), Point2(xmax, ymin), Point2(xmax, ymax), Point2(xmin, ymax)]
    angles: list[float] = []

    def on_material_boundary(p: Point2, skip=None) -> bool:
        # a boundary candidate survives only if no OTHER feature removed it
        if not (xmin - _EPS <= p.x <= xmax + _EPS and ymin - _EPS <= p.y <= ymax + _EPS):
            return False
        for cap in scene.prior_passes:
            if cap is skip:
                continue
            if cap.contains(p, tol=-_EPS):
                return False
        return True

    def add(p: Point2) -> None:
        angles.append(math.degrees(math.atan2(p.y - scene.cl.y, p.x - scene.cl.x)) % 360.0)

    # rectangle edges (finite)
    for e1, e2 in zip(corners, corners[1:] + corners[:1]):
        for p in circle_line_intersections(tool, e1, e2):
            lo_x, hi_x = min(e1.x, e2.x), max(e1.x, e2.x)
            lo_y, hi_y = min(e1.y, e2.y), max(e1.y, e2.y)
            if lo_x - _EPS <= p.x <= hi_x + _EPS and lo_y - _EPS <= p.y <= hi_y + _EPS:
                if on_material_boundary(p):
                    add(p)

    # capsule sides and end caps
    for cap in scene.prior_passes:
        L = cap.length
        if L > SNAP:
            ux, uy = (cap.b.x - cap.a.x) / L, (cap.b.y - cap.a.y) / L
            nx, ny = -uy, ux
            for sign in (1.0, -1.0):
                s1 = Point2(cap.a.x + sign * cap.radius * nx, cap.a.y + sign * cap.radius * ny)
                s2 = Point2(cap.b.x + sign * cap.radius * nx, cap.b.y + sign * cap.radius * ny)
                for p in circle_line_intersections(tool, s1, s2):
                    t = (p.x - s1.x) * ux + (p.y - s1.y) * uy
                    if -_EPS <= t <= L + _EPS and on_material_boundary(p, skip=cap):
                        add(p)
        for center, outward in ((cap.a, -1.0), (cap.b, 1.0)):
            cap_circle = Circle(center, cap.radius)
            try:
                pts = circle_circle_intersections(tool, cap_circle)
            except DegenerateInputError:
                raise UnsupportedSceneError(
                    "tool circle coincides with a prior-pass end cap"
                )
            for p in pts:
                if L > SNAP:
                    # keep only the outward-facing semicircle of the cap
                    proj = (p.x - center.x) * ux + (p.y - center.y) * uy
                    if outward * proj < -_EPS:
                        continue
                if on_material_boundary(p, skip=cap):
                    add(p)

    if not angles:
        for probe in (0.0, 90.0, 180.0, 270.0):
            q = tool.point_at(probe)
            state = scene.classify(q.x, q.y)
            if state == "material":
                return [AngularInterval(0.0, 360.0)]
            if state == "void":
                return []
        raise UnsupportedSceneError("tool circle runs along the material boundary")

    angles = sorted(set(angles))
    deduped = [angles[0]]
    for ang in angles[1:]:
        if ang - deduped[-1] > 1e-9:
            deduped.append(ang)
    if len(deduped) > 1 and (360.0 - deduped[-1]) + deduped[0] <= 1e-9:
        deduped.pop()

    n = len(deduped)
    arcs = []
    for i in range(n):
        a = deduped[i]
        b = deduped[(i + 1) % n] + (360.0 if i + 1 == n else 0.0)
        mid = tool.point_at(((a + b) / 2.0) % 360.0)
        state = scene.classify(mid.x, mid.y)
        if state == "boundary":
            raise UnsupportedSceneError(
                f"gap midpoint at {((a + b) / 2.0) % 360.0:.6f} deg lies on a boundary"
            )
        if state == "material":
            arcs.append((a % 360.0, deduped[(i + 1) % n]))
    if not arcs:
        return []
    if len(arcs) == n:
        return [AngularInterval(0.0, 360.0)]

    # merge arcs that share a crossing (a feature crossing with material on
    # both sides separates nothing)
    merged = [list(arcs[0])]
    for a, b in arcs[1:]:
        if (a - merged[-1][1]) % 360.0 <= 1e-9:
            merged[-1][1] = b
        else:
            merged.append([a, b])
    if len(merged) > 1 and (merged[0][0] - merged[-1][1]) % 360.0 <= 1e-9:
        merged[0][0] = merged[-1][0]
        merged.pop()
    return sorted(
        (AngularInterval(a % 360.0, b % 360.0) for a, b in merged), key=lambda iv: iv.entry
    )


# -- brute force ---------------------------------------------------------


def _region_edges(region: Region2D) -> tuple[np.ndarray, np.ndarray]:
    """Edge arrays from a region's contours, built independently of the kernel."""
    a_parts, b_parts = [], []
    for contour in (*region.outers, *region.holes):
        pts = contour.points
        closed = np.vstack([pts, pts[:1]])
        a_parts.append(closed[:-1])
        b_parts.append(closed[1:])
    if not a_parts:
        return np.empty((0, 2)), np.empty((0, 2))
    return np.vstack(a_parts), np.vstack(b_parts)


def _points_in_region(pts: np.ndarray, region: Region2D) -> np.ndarray:
    """Even-odd membership for an (N, 2) array of points."""
    a, b = _region_edges(region)
    if len(a) == 0:
        return np.zeros(len(pts), dtype=bool)
    inside = np.zeros(len(pts), dtype=bool)
    # chunk to bound the broadcast matrix size
    step = max(1, int(4e6 // max(1, len(a))))
    for i in range(0, len(pts), step):
        px = pts[i : i + step, 0][:, None]
        py = pts[i : i + step, 1][:, None]
        ax, ay = a[:, 0][None, :], a[:, 1][None, :]
        bx, by = b[:, 0][None, :], b[:, 1][None, :]
        crosses = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = ax + (py - ay) / np.where(by != ay, by - ay, 1.0) * (bx - ax)
        inside[i : i + step] = (np.sum(crosses & (x_at > px), axis=1) % 2) == 1
    return inside


def raster_area(target, grid: float) -> float:
    """Grid-counting area: inside cell centers times grid^2.

    Accepts a :class:`Region2D`, :class:`Circle`, :class:`Capsule`, or
    :class:`AnalyticalScene`; the classification for shapes and scenes uses
    exact distance tests. Error is bounded by grid * perimeter.
    """
    if grid <= 0:
        raise ValidationError(f"grid must be > 0, got {grid}")
    if isinstance(target, Region2D):
        if target.is_empty:
            return 0.0
        bounds = target.bounds
    elif isinstance(target, Circle):
        c = target
        bounds = (c.center.x - c.radius, c.center.y - c.radius, c.center.x + c.radius, c.center.y + c.radius)
    elif isinstance(target, Capsule):
        bounds = target.bounds
    elif isinstance(target, AnalyticalScene):
        bounds = target.rect
    else:
        raise ValidationError(f"cannot raster {type(target).__name__}")

    xmin, ymin, xmax, ymax = bounds
    nx = max(1, int(math.ceil((xmax - xmin) / grid)))
    ny = max(1, int(math.ceil((ymax - ymin) / grid)))
    xs = xmin + (np.arange(nx) + 0.5) * grid
    ys = ymin + (np.arange(ny) + 0.5) * grid

    if isinstance(target, Circle):
        X, Y = np.meshgrid(xs, ys)
        inside = (X - target.center.x) ** 2 + (Y - target.center.y) ** 2 <= target.radius**2
        return float(inside.sum()) * grid * grid
    if isinstance(target, Capsule):
        X, Y = np.meshgrid(xs, ys)
        d = _dist_to_segment_grid(X, Y, target)
        return float((d <= target.radius).sum()) * grid * grid
    if isinstance(target, AnalyticalScene):
        X, Y = np.meshgrid(xs, ys)
        inside = (X >= xmin) & (X <= xmax) & (Y >= ymin) & (Y <= ymax)
        for cap in target.prior_passes:
            inside &= _dist_to_segment_grid(X, Y, cap) > cap.radius
        return float(inside.sum()) * grid * grid

    return _scanline_region_area(target, xs, ys) * grid * grid


def _scanline_region_area(region: Region2D, xs: np.ndarray, ys: np.ndarray) -> float:
    """Count grid centers inside the region one scanline at a time.

    Per row, the even-odd rule reduces to sorted edge crossings; centers
    between alternate crossings are inside. Avoids the centers-by-edges
    broadcast, which is too large for fine grids.
    """
    a, b = _region_edges(region)
    if len(a) == 0:
        return 0.0
    ay, by = a[:, 1], b[:, 1]
    count = 0
    for y in ys:
        hit = (ay > y) != (by > y)
        if not hit.any():
            continue
        ah, bh = a[hit], b[hit]
        t = (y - ah[:, 1]) / (bh[:, 1] - ah[:, 1])
        x_cross = np.sort(ah[:, 0] + t * (bh[:, 0] - ah[:, 0]))
        # centers with an odd number of crossings strictly to their left
        left = np.searchsorted(xs, x_cross, side="left")
        for k in range(0, len(left) - 1, 2):
            count += left[k + 1] - left[k]
    return float(count)


def _dist_to_segment_grid(X: np.ndarray, Y: np.ndarray, cap: Capsule) -> np.ndarray:
    ax, ay, bx, by = cap.a.x, cap.a.y, cap.b.x, cap.b.y
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 <= 0.0:
        return np.hypot(X - ax, Y - ay)
    t = np.clip(((X - ax) * dx + (Y - ay) * dy) / L2, 0.0, 1.0)
    return np.hypot(X - (ax + t * dx), Y - (ay + t * dy))


def raster_intervals(circle: Circle, region: Region2D, n_samples: int = 36000) -> list[AngularInterval]:
    """Engagement arcs by dense sampling of the tool circumference.

    Classifies ``n_samples`` equally spaced circle points and turns runs of
    inside points into intervals; bounds are accurate to half the angular
    step. Serves as a brute-force cross-check of the crossing-angle path.
    """
    if n_samples < 3600:
        raise ValidationError(f"need at least 3600 samples, got {n_samples}")
    step = 360.0 / n_samples
    ang = np.arange(n_samples) * step
    rad = np.radians(ang)
    pts = np.column_stack(
        [circle.center.x + circle.radius * np.cos(rad), circle.center.y + circle.radius * np.sin(rad)]
    )
    inside = _points_in_region(pts, region)
    if inside.all():
        return [AngularInterval(0.0, 360.0)]
    if not inside.any():
        return []

    # find runs, allowing one run to wrap across index 0
    flips = np.nonzero(inside != np.roll(inside, 1))[0]
    intervals = []
    for k in range(len(flips)):
        start = flips[k]
        if not inside[start]:
            continue
        end = flips[(k + 1) % len(flips)]  # first outside index after the run
        entry = ((start - 0.5) * step) % 360.0
        exit_ = ((end - 0.5) * step) % 360.0
        intervals.append(AngularInterval(entry, exit_))
    return sorted(intervals, key=lambda iv: iv.entry)
