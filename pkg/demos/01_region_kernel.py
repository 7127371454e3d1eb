"""Region kernel walkthrough: build regions, subtract a tool footprint,
cross-check every area against brute force.

Run: python demos/01_region_kernel.py
"""

from slicecut import AnalyticalScene, Capsule, Point2, Region2D, polygonize, raster_area

# Stock cross-section: a 100 x 100 plate.
plate = Region2D.rectangle(0, 0, 100, 100)
print(f"plate area            {plate.area():10.3f} mm^2")

# One straight pass of a 10 mm end mill leaves a stadium-shaped pocket.
pass1 = Capsule(Point2(30, 50), Point2(70, 50), radius=5.0)
print(f"capsule area (exact)  {pass1.area:10.3f} mm^2  (pi R^2 + 2 R L)")

# The kernel works on polygons; chord_tol bounds the linearization error.
after = plate.difference(polygonize(pass1, chord_tol=1e-3))
print(f"plate minus capsule   {after.area():10.3f} mm^2")
print(f"analytic expectation  {plate.area() - pass1.area:10.3f} mm^2")

# Independent check: count grid cells against pure distance tests.
scene = AnalyticalScene(rect=(0, 0, 100, 100), prior_passes=(pass1,), cl=Point2(50, 50), radius=5.0)
raster = raster_area(scene, grid=0.05)
print(f"raster oracle         {raster:10.3f} mm^2  (grid 0.05 mm)")

# A second, crossing pass shows booleans with real interaction.
pass2 = Capsule(Point2(50, 20), Point2(50, 80), radius=4.0)
after2 = after.difference(polygonize(pass2, chord_tol=1e-3))
print(f"\nafter crossing pass   {after2.area():10.3f} mm^2")
print(f"outer contours: {len(after2.outers)}, holes: {len(after2.holes)}")

# Classification drives the engagement logic downstream.
for label, p in [("pocket center", Point2(50, 50)), ("solid corner", Point2(5, 5))]:
    print(f"point_in {label:14s} -> {after2.point_in(p).value}")
