"""Corner exit: the tool leaves the stock and the contact splits in two.

When a straight pass runs off the stock edge, the single contact arc is cut
by the void beyond the boundary into two separate arcs. The engine result is
validated bound-by-bound against circle-line / circle-circle trigonometry,
and a top-view SVG of the situation is written next to this script.

Run: python demos/04_corner_exit_validation.py
"""

from pathlib import Path

from slicecut import Capsule, Circle, Point2, Region2D, polygonize
from slicecut.engagement import CWERecord, EngagementSlice, engagement_intervals
from slicecut.io import emit_svg_topview
from slicecut.oracle import AnalyticalScene, analytical_engagement

R = 5.0
rect = (0.0, 0.0, 100.0, 100.0)
y = 80.0
cl = Point2(98.0, y)  # pokes 3 mm past the x=100 edge
prior = Capsule(Point2(20, y), Point2(96, y), R)
scene = AnalyticalScene(rect=rect, prior_passes=(prior,), cl=cl, radius=R)

region = Region2D.rectangle(*rect).difference(polygonize(prior, 1e-4))
engine = engagement_intervals(Circle(cl, R), region)
oracle = analytical_engagement(scene)

print(f"engine intervals: {len(engine)}, oracle intervals: {len(oracle)}")
for k, (e, o) in enumerate(zip(engine, oracle)):
    print(
        f"  arc {k}: engine ({e.entry:8.4f}, {e.exit:8.4f})  "
        f"oracle ({o.entry:8.4f}, {o.exit:8.4f})  "
        f"delta ({abs(e.entry - o.entry):.5f}, {abs(e.exit - o.exit):.5f}) deg"
    )

record = CWERecord(
    cl_index=138,
    x=cl.x,
    y=cl.y,
    z=18.0,
    feed_angle=0.0,
    tool_radius=R,
    slices=[EngagementSlice(18.5, tuple(engine), 0.0)],
)
out = Path(__file__).parent / "corner_exit.svg"
out.write_text(emit_svg_topview(record, region), encoding="utf-8")
print(f"wrote {out}")
