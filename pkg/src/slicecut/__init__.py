"""slicecut: cutter-workpiece engagement for 2.5-axis flat end milling.

The in-process workpiece is kept as a stack of exact 2D cross-sections;
each toolpath segment subtracts its capsule-shaped swept footprint per
slice, and the engagement at the segment's end cutter location is read off
as angular contact arcs, contact areas, and removed/engaged volumes.

Submodules:

- ``geom2d``: region kernel (polygons with holes, booleans, circle queries)
- ``sweep``: tools, cutter locations, per-slice swept footprints
- ``ipw``: the slice-stack workpiece and material removal
- ``engagement``: entry/exit angle and contact-area extraction
- ``oracle``: independent trigonometric and raster validators
- ``io``: JSON inputs, CSV outputs, SVG plots
- ``pipeline``: the sequential simulation loop, benchmarks, validation
"""

from .engagement import AngularInterval, CWERecord, EngagementSlice, cwe_for_segment, engagement_intervals, feed_relative
from .errors import (
    DegenerateInputError,
    GeometryError,
    SlicecutError,
    UnsupportedSceneError,
    ValidationError,
)
from .geom2d import (
    Capsule,
    Circle,
    Contour,
    Point2,
    PointLocation,
    Region2D,
    circle_boundary_angles,
    polygonize,
)
from .io import AngleOutput, SimulationConfig, load_stock, load_tool, load_toolpath
from .ipw import BoxStock, ExtrudedPolygonStock, RemovalReport, SliceStack, subtract_segment
from .oracle import (
    AnalyticalScene,
    analytical_engagement,
    circle_circle_intersections,
    circle_line_intersections,
    raster_area,
    raster_intervals,
)
from .pipeline import PerfRecord, SimulationResult, run_simulation
from .sweep import (
    CLSegment,
    CutterLocation,
    SweepMode,
    ToolDefinition,
    ToolKind,
    Toolpath,
    capsule_for_segment,
    footprint_at_slice,
    sampled_union_footprint,
)

__version__ = "0.1.0"
