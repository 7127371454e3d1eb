"""Slot engagement width vs the closed-form law.

A steady slot cut with cutter-location spacing s engages the tool over
360 - 2*acos(s / 2R) degrees: the material ahead minus the wedge already
removed by the previous position. This sweeps s and compares the engine
against the formula and the trigonometric oracle.

Run: python demos/03_slot_engagement.py
"""

import math

from slicecut import AnalyticalScene, Capsule, Circle, Point2, Region2D, polygonize
from slicecut.engagement import engagement_intervals
from slicecut.oracle import analytical_engagement

R = 5.0
CL = Point2(60.0, 50.0)

print(f"tool radius {R} mm, CL at {CL.x, CL.y}, virgin 100x100 stock")
print(f"{'s/R':>6} {'engine width':>14} {'formula':>10} {'oracle':>10} {'delta':>10}")
for s_frac in (0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5):
    s = s_frac * R
    prior = Capsule(Point2(20, 50), Point2(CL.x - s, 50), R)
    region = Region2D.rectangle(0, 0, 100, 100).difference(polygonize(prior, 1e-4))
    (engine,) = engagement_intervals(Circle(CL, R), region)

    formula = 360.0 - 2.0 * math.degrees(math.acos(s / (2.0 * R)))
    scene = AnalyticalScene(rect=(0, 0, 100, 100), prior_passes=(prior,), cl=CL, radius=R)
    (oracle,) = analytical_engagement(scene)

    print(
        f"{s_frac:6.2f} {engine.width:14.4f} {formula:10.4f} {oracle.width:10.4f} "
        f"{abs(engine.width - formula):10.6f}"
    )
print("\nwidths tend to 180 deg as s -> 0 (full slot) and 360 deg as s -> 2R (plunge).")
