"""File interfaces: JSON inputs, CSV outputs, SVG engagement plots.

All lengths are millimeters. CSV files use LF line endings, '.' as the
decimal separator, and 6-significant-digit numbers, so identical runs
produce byte-identical files.

JSON schemas (all fields required unless noted):

tool::

    {"id": "T1", "type": "flat_end_mill", "diameter_mm": 12.0,
     "flute_length_mm": 26.0}

stock::

    {"type": "box", "min": [0, 0, 0], "max": [100, 100, 20]}
    {"type": "extruded_polygon", "base": [[x, y], ...],
     "z_bottom": 0.0, "z_top": 20.0}

toolpath::

    {"operation": "Face1", "tool_id": "T1",
     "cutter_locations": [[x, y, z], ...]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .engagement import CWERecord
from .errors import ValidationError
from .geom2d import DEFAULT_CHORD_TOL, Contour, Region2D
from .ipw import BoxStock, ExtrudedPolygonStock, StockDefinition
from .sweep import CutterLocation, SweepMode, ToolDefinition, ToolKind, Toolpath

CWE_CSV_HEADER = (
    "cl_index,x_mm,y_mm,z_mm,feed_angle_deg,removed_volume_mm3,"
    "engagement_volume_mm3,flank_contact_area_mm2,bottom_contact_area_mm2,"
    "n_slices_engaged,min_entry_deg,max_exit_deg,segment_time_ms"
)
SLICE_CSV_HEADER = "cl_index,z_mm,interval_index,entry_deg,exit_deg,chip_area_mm2"
PERF_CSV_HEADER = "operation,n_cls_scheduled,n_cls_processed,total_time_s,avg_time_per_processed_cl_ms"


class AngleOutput(Enum):
    RAW = "raw"
    FEED_RELATIVE = "feed_relative"
    BOTH = "both"


@dataclass
class SimulationConfig:
    """Knobs for one simulation run.

    ``spacing`` of None means radius / 4 when ``mode`` is SAMPLED_UNION.
    ``snapshot_interval`` / ``svg_every`` of 0 disable those outputs.
    ``timing`` False zeroes all wall-clock fields, which makes every output
    file byte-reproducible.
    """

    dz: float = 1.0
    chord_tol: float = DEFAULT_CHORD_TOL
    mode: SweepMode = SweepMode.EXACT
    spacing: float | None = None
    out_dir: Path = field(default_factory=lambda: Path("out"))
    snapshot_interval: int = 0
    angle_output: AngleOutput = AngleOutput.RAW
    svg_every: int = 0
    parallel_slices: bool = False
    timing: bool = True

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        if self.dz <= 0:
            raise ValidationError("dz must be > 0", path="config.dz")
        if self.chord_tol <= 0:
            raise ValidationError("chord_tol must be > 0", path="config.chord_tol")
        if self.spacing is not None and self.spacing <= 0:
            raise ValidationError("spacing must be > 0", path="config.spacing")


# -- JSON loading ----------------------------------------------------------


def _load_json(path) -> dict:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {path}: {exc}")


def _take(obj: dict, key: str, where: str):
    if key not in obj:
        raise ValidationError("missing required field", path=f"{where}.{key}")
    return obj.pop(key)


def _no_extras(obj: dict, where: str) -> None:
    if obj:
        raise ValidationError("unknown field", path=f"{where}.{next(iter(obj))}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"expected a number, got {value!r}", path=where)
    v = float(value)
    if not math.isfinite(v):
        raise ValidationError(f"non-finite number {value!r}", path=where)
    return v


def load_tool(path) -> ToolDefinition:
    obj = _load_json(path)
    tool_id = _take(obj, "id", "tool")
    kind_raw = _take(obj, "type", "tool")
    try:
        kind = ToolKind(kind_raw)
    except ValueError:
        raise ValidationError(f"unknown tool kind {kind_raw!r}", path="tool.type")
    diameter = _number(_take(obj, "diameter_mm", "tool"), "tool.diameter_mm")
    flute = _number(_take(obj, "flute_length_mm", "tool"), "tool.flute_length_mm")
    _no_extras(obj, "tool")
    if diameter <= 0:
        raise ValidationError("diameter must be > 0", path="tool.diameter_mm")
    if flute <= 0:
        raise ValidationError("flute length must be > 0", path="tool.flute_length_mm")
    return ToolDefinition(id=str(tool_id), kind=kind, diameter=diameter, flute_length=flute)


def save_tool(tool: ToolDefinition, path) -> None:
    _dump_json(
        {
            "id": tool.id,
            "type": tool.kind.value,
            "diameter_mm": tool.diameter,
            "flute_length_mm": tool.flute_length,
        },
        path,
    )


def load_stock(path) -> StockDefinition:
    obj = _load_json(path)
    kind = _take(obj, "type", "stock")
    if kind == "box":
        lo = _take(obj, "min", "stock")
        hi = _take(obj, "max", "stock")
        _no_extras(obj, "stock")
        for name, corner in (("min", lo), ("max", hi)):
            if not (isinstance(corner, list) and len(corner) == 3):
                raise ValidationError("expected [x, y, z]", path=f"stock.{name}")
        lo = tuple(_number(v, f"stock.min[{i}]") for i, v in enumerate(lo))
        hi = tuple(_number(v, f"stock.max[{i}]") for i, v in enumerate(hi))
        return BoxStock(min_corner=lo, max_corner=hi)
    if kind == "extruded_polygon":
        base = _take(obj, "base", "stock")
        z0 = _number(_take(obj, "z_bottom", "stock"), "stock.z_bottom")
        z1 = _number(_take(obj, "z_top", "stock"), "stock.z_top")
        _no_extras(obj, "stock")
        if not (isinstance(base, list) and len(base) >= 3):
            raise ValidationError("expected at least 3 [x, y] vertices", path="stock.base")
        pts = []
        for i, xy in enumerate(base):
            if not (isinstance(xy, list) and len(xy) == 2):
                raise ValidationError("expected [x, y]", path=f"stock.base[{i}]")
            pts.append((_number(xy[0], f"stock.base[{i}][0]"), _number(xy[1], f"stock.base[{i}][1]")))
        region = Region2D.from_contours([Contour(pts)])
        return ExtrudedPolygonStock(base=region, z_bottom=z0, z_top=z1)
    raise ValidationError(f"unknown stock kind {kind!r}", path="stock.type")


def save_stock(stock: StockDefinition, path) -> None:
    if isinstance(stock, BoxStock):
        _dump_json(
            {"type": "box", "min": list(stock.min_corner), "max": list(stock.max_corner)}, path
        )
    else:
        base = stock.base.outers[0].points.tolist()
        _dump_json(
            {
                "type": "extruded_polygon",
                "base": base,
                "z_bottom": stock.z_bottom,
                "z_top": stock.z_top,
            },
            path,
        )


def load_toolpath(path) -> Toolpath:
    obj = _load_json(path)
    operation = _take(obj, "operation", "toolpath")
    tool_id = _take(obj, "tool_id", "toolpath")
    raw = _take(obj, "cutter_locations", "toolpath")
    _no_extras(obj, "toolpath")
    if not isinstance(raw, list):
        raise ValidationError("expected a list of [x, y, z]", path="toolpath.cutter_locations")
    points = []
    for i, xyz in enumerate(raw):
        where = f"toolpath.cutter_locations[{i}]"
        if not (isinstance(xyz, list) and len(xyz) == 3):
            raise ValidationError("expected [x, y, z]", path=where)
        points.append(
            CutterLocation(*(_number(v, f"{where}[{k}]") for k, v in enumerate(xyz)))
        )
    return Toolpath(operation=str(operation), tool_id=str(tool_id), points=tuple(points))


def save_toolpath(toolpath: Toolpath, path) -> None:
    _dump_json(
        {
            "operation": toolpath.operation,
            "tool_id": toolpath.tool_id,
            "cutter_locations": [[p.x, p.y, p.z] for p in toolpath.points],
        },
        path,
    )


def _dump_json(obj: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


# -- CSV output ------------------------------------------------------------


def fmt(value: float) -> str:
    """6-significant-digit number with a '.' separator."""
    v = float(value)
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return f"{v:.6g}"


def write_cwe_csv(records: list[CWERecord], path) -> None:
    """One row per segment with end-CL coordinates and aggregate engagement."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CWE_CSV_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.cl_index},{fmt(r.x)},{fmt(r.y)},{fmt(r.z)},{fmt(r.feed_angle)},"
                f"{fmt(r.removed_volume)},{fmt(r.engagement_volume)},"
                f"{fmt(r.flank_contact_area)},{fmt(r.bottom_contact_area)},"
                f"{r.n_slices_engaged},{fmt(r.min_entry)},{fmt(r.max_exit)},"
                f"{fmt(r.segment_time_ms)}\n"
            )


def write_slice_csv(records: list[CWERecord], path, angle_output: AngleOutput = AngleOutput.RAW) -> None:
    """One row per angular interval per engaged slice.

    ``exit_deg`` is unwrapped past 360 when the arc crosses the +X axis, so
    ``exit_deg - entry_deg`` always equals the arc width; reduce modulo 360
    for the raw exit angle. With FEED_RELATIVE both bounds are re-referenced
    to the segment's feed direction.
    """
    feed_ref = angle_output is AngleOutput.FEED_RELATIVE
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(SLICE_CSV_HEADER + "\n")
        for r in records:
            for s in r.slices:
                for k, iv in enumerate(s.intervals):
                    if feed_ref:
                        iv = iv.shifted(-r.feed_angle)
                    fh.write(
                        f"{r.cl_index},{fmt(s.z_mid)},{k},{fmt(iv.entry)},"
                        f"{fmt(iv.exit_unwrapped)},{fmt(s.chip_area)}\n"
                    )


def write_perf_csv(perf, path, comments: tuple[str, ...] = ()) -> None:
    """Single-row performance summary, with optional '#' metadata comments."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# timing scope: per-segment = engagement extraction + workpiece update, I/O excluded\n")
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(PERF_CSV_HEADER + "\n")
        fh.write(
            f"{perf.operation},{perf.n_cls_scheduled},{perf.n_cls_processed},"
            f"{fmt(perf.total_time_s)},{fmt(perf.avg_time_per_processed_cl_ms)}\n"
        )


# -- SVG -------------------------------------------------------------------


def emit_svg_topview(
    record: CWERecord,
    pre_slice_region: Region2D,
    slice_index: int = 0,
    size: int = 640,
) -> str:
    """Top view of one slice: material boundary, tool circle, engaged arcs.

    Engaged arcs are stroked in red with radial entry/exit ticks and angle
    labels; a feed arrow marks the segment direction. Output is a
    deterministic standalone SVG document.
    """
    tool_r = record.tool_radius if record.tool_radius > 0 else 5.0
    intervals = record.slices[slice_index].intervals if record.slices else ()
    cx, cy = record.x, record.y

    bounds = pre_slice_region.bounds or (cx - 2 * tool_r, cy - 2 * tool_r, cx + 2 * tool_r, cy + 2 * tool_r)
    xmin = min(bounds[0], cx - 1.6 * tool_r)
    ymin = min(bounds[1], cy - 1.6 * tool_r)
    xmax = max(bounds[2], cx + 1.6 * tool_r)
    ymax = max(bounds[3], cy + 1.6 * tool_r)
    margin = 0.05 * max(xmax - xmin, ymax - ymin)
    xmin, ymin, xmax, ymax = xmin - margin, ymin - margin, xmax + margin, ymax + margin
    scale = size / max(xmax - xmin, ymax - ymin)

    def sx(x: float) -> str:
        return f"{(x - xmin) * scale:.2f}"

    def sy(y: float) -> str:
        return f"{(ymax - y) * scale:.2f}"  # SVG y grows downward

    w = f"{(xmax - xmin) * scale:.2f}"
    h = f"{(ymax - ymin) * scale:.2f}"
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]

    for contour, fill in [(c, "#d9d9d9") for c in pre_slice_region.outers] + [
        (c, "white") for c in pre_slice_region.holes
    ]:
        d = "M " + " L ".join(f"{sx(x)} {sy(y)}" for x, y in contour.points) + " Z"
        parts.append(f'<path d="{d}" fill="{fill}" stroke="black" stroke-width="1"/>')

    parts.append(
        f'<circle cx="{sx(cx)}" cy="{sy(cy)}" r="{tool_r * scale:.2f}" '
        'fill="none" stroke="#1f77b4" stroke-width="1" stroke-dasharray="4 3"/>'
    )

    def arc_point(angle_deg: float) -> tuple[float, float]:
        a = math.radians(angle_deg)
        return cx + tool_r * math.cos(a), cy + tool_r * math.sin(a)

    for iv in intervals:
        start, sweep = iv.entry, iv.width
        # split arcs over 180 degrees so the SVG arc flags stay simple
        n_parts = max(1, int(math.ceil(sweep / 180.0 - 1e-9)))
        for k in range(n_parts):
            a0 = start + sweep * k / n_parts
            a1 = start + sweep * (k + 1) / n_parts
            x0, y0 = arc_point(a0)
            x1, y1 = arc_point(a1)
            r_px = f"{tool_r * scale:.2f}"
            # CCW in workpiece coordinates is CW on screen: sweep flag 0
            parts.append(
                f'<path d="M {sx(x0)} {sy(y0)} A {r_px} {r_px} 0 0 0 {sx(x1)} {sy(y1)}" '
                'fill="none" stroke="#d62728" stroke-width="3"/>'
            )
        for angle, label in ((iv.entry, f"{iv.entry:.1f}°"), (iv.exit % 360.0, f"{iv.exit % 360.0:.1f}°")):
            x0, y0 = arc_point(angle)
            a = math.radians(angle)
            x1 = cx + 1.25 * tool_r * math.cos(a)
            y1 = cy + 1.25 * tool_r * math.sin(a)
            parts.append(
                f'<line x1="{sx(x0)}" y1="{sy(y0)}" x2="{sx(x1)}" y2="{sy(y1)}" '
                'stroke="#d62728" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{sx(x1)}" y="{sy(y1)}" font-size="11" fill="#d62728">{label}</text>'
            )

    a = math.radians(record.feed_angle)
    fx = cx + 1.4 * tool_r * math.cos(a)
    fy = cy + 1.4 * tool_r * math.sin(a)
    parts.append(
        f'<line x1="{sx(cx)}" y1="{sy(cy)}" x2="{sx(fx)}" y2="{sy(fy)}" '
        'stroke="#2ca02c" stroke-width="2"/>'
    )
    parts.append(f'<text x="{sx(fx)}" y="{sy(fy)}" font-size="11" fill="#2ca02c">feed</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
