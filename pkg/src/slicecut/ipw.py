"""In-process workpiece as a stack of axial slices.

Each slice is the exact 2D material cross-section on the slab midline; a
segment's removal subtracts its per-slice footprint from every slice the
flute covers. Segments must be applied in toolpath order (each subtraction
sees the workpiece state left by the previous one), but the slices within
one segment are independent and may be updated in parallel.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import GeometryError, ValidationError
from .geom2d import DEFAULT_CHORD_TOL, Capsule, Region2D, bounds_overlap, polygonize
from .sweep import CLSegment, SweepMode, footprint_at_slice, sampled_union_footprint

# Per-slice removed areas below this are boolean reconstruction noise, mm^2.
_AREA_NOISE = 1e-12


@dataclass(frozen=True)
class BoxStock:
    """Axis-aligned box, corners in mm."""

    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]

    def __post_init__(self):
        for lo, hi, axis in zip(self.min_corner, self.max_corner, "xyz"):
            if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                raise ValidationError(f"box stock must have positive {axis} extent")

    @property
    def z_bottom(self) -> float:
        return self.min_corner[2]

    @property
    def z_top(self) -> float:
        return self.max_corner[2]

    def cross_section(self) -> Region2D:
        return Region2D.rectangle(
            self.min_corner[0], self.min_corner[1], self.max_corner[0], self.max_corner[1]
        )


@dataclass(frozen=True)
class ExtrudedPolygonStock:
    """A 2D base region extruded from ``z_bottom`` to ``z_top``."""

    base: Region2D
    z_bottom: float
    z_top: float

    def __post_init__(self):
        if not self.z_top > self.z_bottom:
            raise ValidationError("extruded stock must have z_top > z_bottom")
        if self.base.is_empty:
            raise ValidationError("extruded stock base region is empty")

    def cross_section(self) -> Region2D:
        return self.base


StockDefinition = BoxStock | ExtrudedPolygonStock


@dataclass
class SliceStack:
    """Uniformly spaced axial slices (z_mid, material region), ascending in z.

    ``frame`` documents the coordinate convention the regions live in.
    """

    dz: float
    slices: list[tuple[float, Region2D]]
    frame: str = "workpiece frame, mm, z up, angles CCW from +X"

    @classmethod
    def from_stock(cls, stock: StockDefinition, dz: float) -> "SliceStack":
        """Initialize from virgin stock with slab midlines spaced ``dz`` apart."""
        if dz <= 0:
            raise ValidationError(f"dz must be > 0, got {dz}")
        height = stock.z_top - stock.z_bottom
        if dz > height:
            raise ValidationError(f"dz {dz} exceeds stock height {height}")
        n = max(1, math.ceil(height / dz - 1e-9))
        section = stock.cross_section()
        slices = [(stock.z_bottom + (k + 0.5) * dz, section) for k in range(n)]
        return cls(dz=dz, slices=slices)

    def __len__(self) -> int:
        return len(self.slices)

    @property
    def z_values(self) -> list[float]:
        return [z for z, _ in self.slices]

    def volume(self) -> float:
        """Material volume, mm^3: sum of slice areas times dz."""
        return sum(region.area() for _, region in self.slices) * self.dz

    def bounds(self) -> tuple[float, float, float, float] | None:
        """XY bounding box over all slices, or None when fully machined away."""
        boxes = [r.bounds for _, r in self.slices if r.bounds is not None]
        if not boxes:
            return None
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )

    def write_snapshot(self, path) -> None:
        """Dump all contours as plain text, one contour per line.

        Line format: ``z x0 y0 x1 y1 ...`` with outer loops counterclockwise
        and holes clockwise, so orientation distinguishes them.
        """
        with open(path, "w", encoding="utf-8", newline="") as fh:
            for z, region in self.slices:
                for contour in (*region.outers, *region.holes):
                    coords = " ".join(repr(float(v)) for xy in contour.points for v in xy)
                    fh.write(f"{float(z)!r} {coords}\n")


@dataclass
class RemovalReport:
    """What one segment removed: per-slice areas (mm^2) and total volume (mm^3)."""

    segment_index: int
    per_slice: list[tuple[float, float]] = field(default_factory=list)
    removed_volume: float = 0.0


def subtract_segment(
    stack: SliceStack,
    seg: CLSegment,
    mode: SweepMode = SweepMode.EXACT,
    chord_tol: float = DEFAULT_CHORD_TOL,
    spacing: float | None = None,
    parallel: bool = False,
) -> RemovalReport:
    """Remove one segment's swept footprint from every slice it cuts.

    Mutates ``stack`` in place and reports removed area per touched slice.
    Slice areas never grow; repeating an identical segment removes nothing.
    """
    report = RemovalReport(segment_index=seg.index)
    seg_bounds = seg.inflated_bounds()

    jobs: list[tuple[int, float, Region2D, Capsule]] = []
    for i, (z_mid, region) in enumerate(stack.slices):
        if region.is_empty:
            continue
        cap = footprint_at_slice(seg, z_mid)
        if cap is None:
            continue
        if not bounds_overlap(seg_bounds, region.bounds):
            continue
        jobs.append((i, z_mid, region, cap))

    def work(job):
        i, z_mid, region, cap = job
        try:
            if mode is SweepMode.SAMPLED_UNION:
                footprint = sampled_union_footprint(seg, z_mid, spacing=spacing, chord_tol=chord_tol)
            else:
                footprint = polygonize(cap, chord_tol)
            updated = region.difference(footprint)
        except GeometryError as exc:
            raise GeometryError(str(exc), coords=exc.coords, segment_index=seg.index) from exc
        removed = region.area() - updated.area()
        if removed <= _AREA_NOISE:
            # keep the untouched region object to avoid geometry churn
            return i, z_mid, region, 0.0
        return i, z_mid, updated, removed

    if parallel and len(jobs) > 1:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(job) for job in jobs]

    for i, z_mid, updated, removed in results:
        stack.slices[i] = (z_mid, updated)
        report.per_slice.append((z_mid, removed))
        report.removed_volume += removed * stack.dz
    return report
