"""Per-slice footprints of one toolpath segment, exact vs sampled union.

The exact footprint of a linear move at one height is a capsule; the
sampled-union mode unions discrete tool positions instead and converges to
the capsule from below as the spacing shrinks.

Run: python demos/02_swept_footprints.py
"""

from slicecut import CLSegment, CutterLocation, ToolDefinition, ToolKind
from slicecut.sweep import capsule_for_segment, footprint_at_slice, sampled_union_footprint

tool = ToolDefinition(id="T1", kind=ToolKind.FLAT_END_MILL, diameter=10.0, flute_length=26.0)

# A ramp move: the tool descends 2 mm while traveling 40 mm in X.
ramp = CLSegment(
    index=1,
    start=CutterLocation(10, 50, 18.0),
    end=CutterLocation(50, 50, 16.0),
    tool=tool,
)

print("footprints of a ramp move (z 18 -> 16, flute 26 mm):")
for z in (15.5, 16.5, 17.5, 18.5, 43.5, 45.0):
    cap = footprint_at_slice(ramp, z)
    if cap is None:
        print(f"  z={z:5.1f}  not cut")
    else:
        print(f"  z={z:5.1f}  capsule x {cap.a.x:5.1f} -> {cap.b.x:5.1f}  (length {cap.length:5.2f})")

# Constant-z moves have one capsule for the whole flute span.
flat = CLSegment(
    index=2,
    start=CutterLocation(10, 50, 16.0),
    end=CutterLocation(30, 50, 16.0),
    tool=tool,
)
exact = capsule_for_segment(flat)
print(f"\nexact capsule area {exact.area:.4f} mm^2")

print("\nsampled-union convergence (area deficit vs exact capsule):")
spacing = tool.radius / 4.0
for _ in range(5):
    union = sampled_union_footprint(flat, 16.0, spacing=spacing)
    deficit = exact.area - union.area()
    print(f"  spacing {spacing:7.4f} mm  union {union.area():9.4f}  deficit {deficit:8.5f} "
          f"({100 * deficit / exact.area:.4f}%)")
    spacing /= 2.0
