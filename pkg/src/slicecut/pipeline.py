"""Sequential simulation loop, performance accounting, and validation runs.

For each toolpath segment the loop (a) extracts the engagement record
against the pre-update slice stack, (b) subtracts the segment's swept
footprint, and (c) attributes the wall time of (a)+(b) to that segment.
A segment counts as PROCESSED when its tool-inflated bounding box overlaps
the current workpiece and it actually engages or removes material; air
moves are scheduled but not processed.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

from .engagement import CWERecord, cwe_for_segment
from .errors import GeometryError
from .geom2d import Capsule, Circle, Point2, Region2D, bounds_overlap, polygonize
from .io import SimulationConfig, write_cwe_csv, write_perf_csv, write_slice_csv
from .ipw import SliceStack, StockDefinition, subtract_segment
from .oracle import AnalyticalScene, analytical_engagement
from .sweep import CutterLocation, ToolDefinition, ToolKind, Toolpath

VALIDATION_CHORD_TOL = 1e-4


@dataclass
class PerfRecord:
    """Table-style run summary: scheduled CLs vs processed segments and timings."""

    operation: str
    n_cls_scheduled: int
    n_cls_processed: int
    total_time_s: float
    avg_time_per_processed_cl_ms: float


@dataclass
class SimulationResult:
    records: list[CWERecord]
    perf: PerfRecord
    final_stack: SliceStack


def run_simulation(
    config: SimulationConfig,
    tool: ToolDefinition,
    stock: StockDefinition,
    toolpath: Toolpath,
    on_segment=None,
) -> SimulationResult:
    """Run the full three-stage loop over every segment of ``toolpath``.

    ``on_segment`` is an optional callback ``(record, pre_slices)`` invoked
    after each segment with the slice list as it stood before the removal,
    used by the CLI for SVG emission.
    """
    stack = SliceStack.from_stock(stock, config.dz)
    segments = toolpath.segments(tool)
    records: list[CWERecord] = []
    processed = 0
    time_sum_ms = 0.0
    prev_feed: float | None = None

    t_start = time.perf_counter()
    for seg in segments:
        stack_bounds = stack.bounds()
        pre_slices = list(stack.slices) if on_segment is not None else None
        t0 = time.perf_counter()
        try:
            rec = cwe_for_segment(
                stack,
                seg,
                prev_feed_angle=prev_feed,
                chord_tol=config.chord_tol,
                parallel=config.parallel_slices,
            )
            report = subtract_segment(
                stack,
                seg,
                mode=config.mode,
                chord_tol=config.chord_tol,
                spacing=config.spacing,
                parallel=config.parallel_slices,
            )
        except GeometryError as exc:
            snapshot = Path(config.out_dir) / f"ipw_error_seg{seg.index:06d}.txt"
            try:
                snapshot.parent.mkdir(parents=True, exist_ok=True)
                stack.write_snapshot(snapshot)
                where = f"; workpiece snapshot written to {snapshot}"
            except OSError:
                where = ""
            raise GeometryError(
                f"{exc} at CL ({seg.end.x}, {seg.end.y}, {seg.end.z}){where}",
                coords=exc.coords,
                segment_index=seg.index,
            ) from exc
        elapsed_ms = (time.perf_counter() - t0) * 1000.0

        rec.removed_volume = report.removed_volume
        rec.segment_time_ms = elapsed_ms if config.timing else 0.0
        if not rec.feed_angle_fallback:
            prev_feed = rec.feed_angle

        overlaps = bounds_overlap(seg.inflated_bounds(), stack_bounds)
        if overlaps and (report.removed_volume > 0.0 or rec.n_slices_engaged > 0):
            rec.processed = True
            processed += 1
            time_sum_ms += elapsed_ms
        records.append(rec)
        if on_segment is not None:
            on_segment(rec, pre_slices)
        if config.snapshot_interval > 0 and seg.index % config.snapshot_interval == 0:
            snap_dir = Path(config.out_dir)
            snap_dir.mkdir(parents=True, exist_ok=True)
            stack.write_snapshot(snap_dir / f"ipw_{seg.index:06d}.txt")
    total_s = time.perf_counter() - t_start

    if not config.timing:
        total_s = 0.0
        time_sum_ms = 0.0
    perf = PerfRecord(
        operation=toolpath.operation,
        n_cls_scheduled=len(toolpath.points),
        n_cls_processed=processed,
        total_time_s=total_s,
        avg_time_per_processed_cl_ms=time_sum_ms / processed if processed else 0.0,
    )
    return SimulationResult(records=records, perf=perf, final_stack=stack)


def write_outputs(result: SimulationResult, config: SimulationConfig, comments: tuple[str, ...] = ()) -> None:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    from .io import AngleOutput

    write_cwe_csv(result.records, out / "cwe.csv")
    if config.angle_output is AngleOutput.BOTH:
        write_slice_csv(result.records, out / "slices.csv", AngleOutput.RAW)
        write_slice_csv(result.records, out / "slices_feed.csv", AngleOutput.FEED_RELATIVE)
    else:
        write_slice_csv(result.records, out / "slices.csv", config.angle_output)
    write_perf_csv(result.perf, out / "perf.csv", comments=comments)


# -- synthetic toolpaths -----------------------------------------------------


def generate_clearing_toolpath(
    n_segments: int,
    operation: str = "SyntheticClearing",
    tool_id: str = "T1",
    stock_size: tuple[float, float, float] = (100.0, 100.0, 20.0),
    tool_radius: float = 5.0,
    stepover: float = 6.0,
    step: float = 1.5,
    depth_per_level: float = 2.0,
) -> Toolpath:
    """Deterministic serpentine clearing path used by bench and tests.

    Rows sweep X back and forth with a fixed stepover, descending one level
    per filled layer; approach and retract moves above the stock are
    inserted between levels so some scheduled segments are air moves.
    """
    sx, sy, sz = stock_size
    margin = tool_radius * 0.8
    x_lo, x_hi = margin, sx - margin
    y_lo, y_hi = margin, sy - margin
    z_clear = sz + 5.0

    points: list[CutterLocation] = []
    level = 0
    while len(points) < n_segments + 1:
        z = sz - depth_per_level * (level + 1)
        if z < 0:
            level = 0
            continue
        y = y_lo
        direction = 1
        points.append(CutterLocation(x_lo, y_lo, z_clear))  # air approach
        points.append(CutterLocation(x_lo, y_lo, z))  # plunge
        while y <= y_hi and len(points) < n_segments + 1:
            x_run = x_lo if direction > 0 else x_hi
            x_end = x_hi if direction > 0 else x_lo
            n_steps = max(1, int(round(abs(x_end - x_run) / step)))
            for k in range(1, n_steps + 1):
                if len(points) >= n_segments + 1:
                    break
                points.append(CutterLocation(x_run + direction * k * step, y, z))
            y += stepover
            if y <= y_hi and len(points) < n_segments + 1:
                points.append(CutterLocation(points[-1].x, y, z))
            direction = -direction
        if len(points) < n_segments + 1:
            points.append(CutterLocation(points[-1].x, points[-1].y, z_clear))  # retract
        level += 1
    return Toolpath(operation=operation, tool_id=tool_id, points=tuple(points[: n_segments + 1]))


def default_bench_tool(tool_radius: float = 5.0) -> ToolDefinition:
    return ToolDefinition(
        id="T1", kind=ToolKind.FLAT_END_MILL, diameter=2 * tool_radius, flute_length=26.0
    )


def run_bench(n_segments: int, dz: float, out_dir, parallel: bool = False) -> tuple[PerfRecord, float]:
    """Run the synthetic benchmark and report (perf, median segment ms)."""
    from .ipw import BoxStock

    tool = default_bench_tool()
    stock = BoxStock((0.0, 0.0, 0.0), (100.0, 100.0, 20.0))
    toolpath = generate_clearing_toolpath(n_segments)
    config = SimulationConfig(dz=dz, out_dir=Path(out_dir), parallel_slices=parallel)
    result = run_simulation(config, tool, stock, toolpath)
    times = [r.segment_time_ms for r in result.records if r.processed]
    median_ms = statistics.median(times) if times else 0.0
    write_outputs(result, config, comments=(f"median_time_per_processed_cl_ms: {median_ms:.6g}",))
    return result.perf, median_ms


# -- oracle validation --------------------------------------------------------


@dataclass(frozen=True)
class ValidationCase:
    """One engine-vs-oracle comparison with its acceptance threshold."""

    name: str
    kind: str
    scene: AnalyticalScene
    threshold_deg: float


@dataclass
class ValidationOutcome:
    case: ValidationCase
    engine_bounds: tuple[float, ...]
    oracle_bounds: tuple[float, ...]
    max_delta_deg: float

    @property
    def passed(self) -> bool:
        return self.max_delta_deg <= self.case.threshold_deg


def midpass_scenes() -> list[ValidationCase]:
    """Straight side cuts at varied radius, immersion, spacing, and feed direction."""
    cases = []
    rect = (0.0, 0.0, 100.0, 100.0)
    combos = [
        (r, ae_frac, s_frac)
        for r in (3.0, 5.0, 6.0)
        for ae_frac in (0.3, 0.6, 1.0, 1.4)
        for s_frac in (0.25, 0.6)
    ]
    for i, (r, ae_frac, s_frac) in enumerate(combos):
        a_e = ae_frac * r
        s = s_frac * r
        edge = i % 4  # rotate the feed direction through all four stock edges
        scene = _straight_cut_scene(rect, r, a_e, s, edge)
        cases.append(
            ValidationCase(
                name=f"midpass_r{r}_ae{ae_frac}_s{s_frac}_e{edge}",
                kind="midpass",
                scene=scene,
                threshold_deg=0.02,
            )
        )
    return cases


def _straight_cut_scene(rect, r: float, a_e: float, s: float, edge: int) -> AnalyticalScene:
    """Cut running parallel to one stock edge at radial immersion ``a_e``.

    The tool center line sits R - a_e outside the edge; the prior pass is
    the capsule of the same cut ending ``s`` behind the query CL.
    """
    xmin, ymin, xmax, ymax = rect
    offset = r - a_e  # distance of center line outside the material edge
    run_lo, run_hi = 25.0, 60.0
    if edge == 0:  # along top edge, feeding +X
        y = ymax + offset
        prior = Capsule(Point2(run_lo, y), Point2(run_hi - s, y), r)
        cl = Point2(run_hi, y)
    elif edge == 1:  # along bottom edge, feeding -X
        y = ymin - offset
        prior = Capsule(Point2(run_hi, y), Point2(run_lo + s, y), r)
        cl = Point2(run_lo, y)
    elif edge == 2:  # along right edge, feeding +Y
        x = xmax + offset
        prior = Capsule(Point2(x, run_lo), Point2(x, run_hi - s), r)
        cl = Point2(x, run_hi)
    else:  # along left edge, feeding -Y
        x = xmin - offset
        prior = Capsule(Point2(x, run_hi), Point2(x, run_lo + s), r)
        cl = Point2(x, run_lo)
    return AnalyticalScene(rect=rect, prior_passes=(prior,), cl=cl, radius=r)


def corner_exit_scenes() -> list[ValidationCase]:
    """Cuts exiting through the stock boundary, splitting the arc in two."""
    cases = []
    rect = (0.0, 0.0, 100.0, 100.0)
    # (radius, center depth below top edge, poke distance past right edge, spacing)
    params = [
        (5.0, 20.0, 2.0, 2.0),
        (5.0, 20.0, 3.5, 1.5),
        (6.0, 30.0, 2.5, 2.5),
        (4.0, 15.0, 1.5, 1.2),
        (5.0, 50.0, 3.0, 2.0),
        (3.0, 25.0, 1.2, 1.0),
    ]
    for i, (r, depth, poke, s) in enumerate(params):
        y = 100.0 - depth
        cl = Point2(100.0 - r + poke, y)
        prior = Capsule(Point2(20.0, y), Point2(cl.x - s, y), r)
        cases.append(
            ValidationCase(
                name=f"corner_exit_{i}_r{r}",
                kind="corner_exit",
                scene=AnalyticalScene(rect=rect, prior_passes=(prior,), cl=cl, radius=r),
                threshold_deg=0.25,
            )
        )
    return cases


def slot_scenes() -> list[ValidationCase]:
    """Steady-state slotting at several CL spacings, far from any stock edge."""
    cases = []
    rect = (0.0, 0.0, 100.0, 100.0)
    r = 5.0
    for s_frac in (0.1, 0.5, 1.0):
        s = s_frac * r
        cl = Point2(60.0, 50.0)
        prior = Capsule(Point2(20.0, 50.0), Point2(cl.x - s, 50.0), r)
        cases.append(
            ValidationCase(
                name=f"slot_s{s_frac}R",
                kind="slot",
                scene=AnalyticalScene(rect=rect, prior_passes=(prior,), cl=cl, radius=r),
                threshold_deg=0.05,
            )
        )
    return cases


def scene_pre_region(scene: AnalyticalScene, chord_tol: float) -> Region2D:
    """Kernel-side build of a scene's material region."""
    region = Region2D.rectangle(*scene.rect)
    for cap in scene.prior_passes:
        region = region.difference(polygonize(cap, chord_tol))
    return region


def evaluate_case(case: ValidationCase, chord_tol: float = VALIDATION_CHORD_TOL) -> ValidationOutcome:
    """Engine vs analytical oracle on one scene, compared bound by bound."""
    from .engagement import engagement_intervals

    region = scene_pre_region(case.scene, chord_tol)
    circle = Circle(case.scene.cl, case.scene.radius)
    engine = engagement_intervals(circle, region)
    oracle_ivs = analytical_engagement(case.scene)

    engine_bounds = tuple(b for iv in engine for b in (iv.entry, iv.exit))
    oracle_bounds = tuple(b for iv in oracle_ivs for b in (iv.entry, iv.exit))
    if len(engine_bounds) != len(oracle_bounds):
        delta = math.inf
    elif not engine_bounds:
        delta = 0.0
    else:
        delta = max(
            _angle_delta(e, o) for e, o in zip(engine_bounds, oracle_bounds)
        )
    return ValidationOutcome(case, engine_bounds, oracle_bounds, delta)


def _angle_delta(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def run_oracle_validation(chord_tol: float = VALIDATION_CHORD_TOL) -> list[ValidationOutcome]:
    cases = midpass_scenes() + corner_exit_scenes() + slot_scenes()
    return [evaluate_case(c, chord_tol) for c in cases]
