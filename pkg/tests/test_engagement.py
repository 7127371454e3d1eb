"""Engagement extraction tests: intervals, aggregates, invariances."""

import math

import numpy as np
import pytest

from slicecut.engagement import (
    AngularInterval,
    cwe_for_segment,
    engagement_intervals,
    feed_relative,
)
from slicecut.geom2d import Capsule, Circle, Point2, PointLocation, Region2D, polygonize
from slicecut.ipw import BoxStock, SliceStack, subtract_segment
from slicecut.sweep import CLSegment, CutterLocation, ToolDefinition, ToolKind

TOOL = ToolDefinition(id="T1", kind=ToolKind.FLAT_END_MILL, diameter=10.0, flute_length=26.0)
BOX = BoxStock((0.0, 0.0, 0.0), (100.0, 100.0, 20.0))


def seg(x0, y0, z0, x1, y1, z1, index=1, tool=TOOL) -> CLSegment:
    return CLSegment(
        index=index,
        start=CutterLocation(x0, y0, z0),
        end=CutterLocation(x1, y1, z1),
        tool=tool,
    )


def slot_pre_region(s: float, r: float = 5.0, chord_tol: float = 1e-4) -> Region2D:
    """Stock minus a prior straight pass ending ``s`` behind the query CL at (60, 50)."""
    rect = Region2D.rectangle(0, 0, 100, 100)
    prior = Capsule(Point2(20, 50), Point2(60 - s, 50), r)
    return rect.difference(polygonize(prior, chord_tol))


def slot_width_deg(s: float, r: float) -> float:
    return 360.0 - 2.0 * math.degrees(math.acos(s / (2.0 * r)))


# -- engagement_intervals ------------------------------------------------------


def test_tool_outside_material():
    region = Region2D.rectangle(0, 0, 100, 100)
    assert engagement_intervals(Circle(Point2(150, 50), 5.0), region) == []


def test_plunge_in_solid_interior_full_circle():
    region = Region2D.rectangle(0, 0, 100, 100)
    ivs = engagement_intervals(Circle(Point2(50, 50), 5.0), region)
    assert ivs == [AngularInterval(0.0, 360.0)]
    assert ivs[0].width == 360.0


def test_slot_width_at_spacing_r():
    # circle-circle oracle: width = 360 - 2*acos(s / 2R); acos(0.5) = 60 deg
    ivs = engagement_intervals(Circle(Point2(60, 50), 5.0), slot_pre_region(s=5.0))
    assert len(ivs) == 1
    assert ivs[0].width == pytest.approx(240.0, abs=0.02)


@pytest.mark.parametrize("s_frac", [0.1, 0.5, 1.0])
def test_slot_width_law(s_frac):
    r = 5.0
    s = s_frac * r
    ivs = engagement_intervals(Circle(Point2(60, 50), r), slot_pre_region(s=s, r=r))
    assert len(ivs) == 1
    assert ivs[0].width == pytest.approx(slot_width_deg(s, r), abs=0.05)


def test_full_slot_width_approaches_180():
    r = 5.0
    s = 0.05 * r
    ivs = engagement_intervals(Circle(Point2(60, 50), r), slot_pre_region(s=s, r=r))
    assert ivs[0].width == pytest.approx(slot_width_deg(s, r), abs=0.05)
    assert ivs[0].width == pytest.approx(180.0, abs=3.0)


# -- feed_relative ---------------------------------------------------------------


def test_feed_relative_zero_is_identity():
    ivs = [AngularInterval(10.0, 80.0), AngularInterval(200.0, 350.0)]
    assert feed_relative(ivs, 0.0) == ivs


def test_feed_relative_simple_shift():
    assert feed_relative([AngularInterval(90.0, 270.0)], 90.0) == [AngularInterval(0.0, 180.0)]


def test_feed_relative_preserves_width_random():
    rng = np.random.default_rng(2)
    for _ in range(200):
        entry = rng.uniform(0, 360)
        width = rng.uniform(1, 359)
        iv = AngularInterval(entry, (entry + width) % 360.0)
        (shifted,) = feed_relative([iv], rng.uniform(-720, 720))
        assert shifted.width == pytest.approx(iv.width, abs=1e-9)


def test_feed_relative_keeps_full_interval():
    assert feed_relative([AngularInterval(0.0, 360.0)], 123.4) == [AngularInterval(0.0, 360.0)]


# -- cwe_for_segment -------------------------------------------------------------


def test_air_segment_zero_record():
    stack = SliceStack.from_stock(BOX, 1.0)
    rec = cwe_for_segment(stack, seg(20, 50, 30, 80, 50, 30))
    assert rec.n_slices_engaged == 0
    assert rec.slices == []
    assert rec.engagement_volume == 0.0
    assert rec.flank_contact_area == 0.0
    assert rec.bottom_contact_area == 0.0
    assert (rec.min_entry, rec.max_exit) == (0.0, 0.0)


def test_corner_cut_half_immersion_aggregates():
    # segment ends at the (0, 100) stock corner 2 mm deep: the quarter of the
    # tool inside material gives per-slice width 90 deg over 2 slices
    stack = SliceStack.from_stock(BOX, 1.0)
    rec = cwe_for_segment(stack, seg(-20, 100, 18, 0, 100, 18))
    assert rec.n_slices_engaged == 2
    for s in rec.slices:
        assert len(s.intervals) == 1
        assert s.intervals[0].width == pytest.approx(90.0, abs=1e-6)
        assert s.intervals[0].entry == pytest.approx(270.0, abs=1e-6)
    assert rec.flank_contact_area == pytest.approx(5 * (math.pi / 2) * 1 * 2, abs=1e-4)
    assert rec.flank_contact_area == pytest.approx(15.708, abs=1e-3)
    quarter_disk = math.pi * 25 / 4
    assert rec.bottom_contact_area == pytest.approx(quarter_disk, rel=1e-3)
    assert rec.engagement_volume == pytest.approx(2 * quarter_disk, rel=1e-3)
    assert rec.feed_angle == pytest.approx(0.0)
    assert rec.processed is False  # set by the pipeline, not here


def test_bottom_contact_zero_when_tip_in_air():
    # tool tip 3 mm below the stock: the lowest slices in the axial span hold
    # no material, so the bottom face rubs nothing
    stack = SliceStack.from_stock(BOX, 1.0)
    rec = cwe_for_segment(stack, seg(-20, 100, -3, 0, 100, -3))
    assert rec.n_slices_engaged > 0
    assert rec.bottom_contact_area == 0.0


def test_dwell_uses_previous_feed_angle():
    stack = SliceStack.from_stock(BOX, 1.0)
    rec = cwe_for_segment(stack, seg(50, 50, 18, 50, 50, 18), prev_feed_angle=135.0)
    assert rec.feed_angle_fallback
    assert rec.feed_angle == 135.0
    rec2 = cwe_for_segment(stack, seg(50, 50, 18, 50, 50, 18))
    assert rec2.feed_angle_fallback
    assert rec2.feed_angle == 0.0


def test_chip_area_bounded_by_tool_and_slice():
    stack = SliceStack.from_stock(BOX, 1.0)
    pre_areas = {z: r.area() for z, r in stack.slices}
    rec = cwe_for_segment(stack, seg(20, 50, 18, 60, 50, 18))
    for s in rec.slices:
        assert s.chip_area <= math.pi * 25 + 1e-6
        assert s.chip_area <= pre_areas[s.z_mid] + 1e-6


def test_classification_consistency_random_scenes():
    rng = np.random.default_rng(8)
    region = Region2D.rectangle(0, 0, 60, 60)
    for i in range(12):
        cap = Capsule(
            Point2(rng.uniform(10, 50), rng.uniform(10, 50)),
            Point2(rng.uniform(10, 50), rng.uniform(10, 50)),
            rng.uniform(2, 5),
        )
        region = region.difference(polygonize(cap, 1e-3))
    for _ in range(40):
        c = Circle(Point2(rng.uniform(0, 60), rng.uniform(0, 60)), rng.uniform(2, 6))
        ivs = engagement_intervals(c, region)
        for iv in ivs:
            mid = (iv.entry + iv.width / 2.0) % 360.0
            assert region.point_in(c.point_at(mid)) is PointLocation.INSIDE
        # gap midpoints between consecutive intervals are not inside
        for a, b in zip(ivs, ivs[1:] + ivs[:1]):
            if len(ivs) == 1 and ivs[0].is_full:
                break
            gap = (b.entry - a.exit) % 360.0
            if gap <= 0.02:
                continue
            mid = (a.exit + gap / 2.0) % 360.0
            assert region.point_in(c.point_at(mid)) is not PointLocation.INSIDE


def test_rotation_equivariance_90deg():
    # same cut rotated 90 deg about the stock center: bounds rotate, widths
    # and scalar aggregates are unchanged
    stack1 = SliceStack.from_stock(BOX, 1.0)
    rec1 = cwe_for_segment(stack1, seg(-20, 100, 18, 0, 100, 18))
    stack2 = SliceStack.from_stock(BOX, 1.0)
    rec2 = cwe_for_segment(stack2, seg(0, -20, 18, 0, 0, 18))
    assert rec2.feed_angle == pytest.approx((rec1.feed_angle + 90.0) % 360.0)
    assert rec2.flank_contact_area == pytest.approx(rec1.flank_contact_area, rel=1e-9)
    assert rec2.engagement_volume == pytest.approx(rec1.engagement_volume, rel=1e-6)
    assert rec2.bottom_contact_area == pytest.approx(rec1.bottom_contact_area, rel=1e-6)
    for s1, s2 in zip(rec1.slices, rec2.slices):
        for iv1, iv2 in zip(s1.intervals, s2.intervals):
            assert iv2.width == pytest.approx(iv1.width, abs=1e-6)
            assert iv2.entry == pytest.approx((iv1.entry + 90.0) % 360.0, abs=1e-6)


def test_engagement_volume_vs_removed_volume():
    # the chip at the end CL is part of what the whole segment removes from
    # virgin stock, so its volume cannot exceed the removal
    stack = SliceStack.from_stock(BOX, 1.0)
    s = seg(20, 50, 18, 60, 50, 18)
    rec = cwe_for_segment(stack, s)
    report = subtract_segment(stack, s)
    assert rec.engagement_volume <= report.removed_volume + 1e-6
