import math

import numpy as np
import pytest

from sketchnav.errors import GridMismatchError, OutOfBoundsError
from sketchnav.evaluator import (
    ConfusionCounts,
    RegionMask,
    Scenario,
    build_gt_region,
    confusion,
    evaluate_path,
    load_scenario,
    make_stage,
    metrics,
    pct_within_gt,
    polyline_region,
    rasterize_drawn,
    save_scenario,
    scenario_grid,
)
from sketchnav.geometry import Point2D, Pose2D, polyline_length
from sketchnav.simulator import GridGeometry


def segment_distance(p, a, b):
    """Scalar point-to-segment distance, independent of the vectorized path."""
    dx, dy = b.x - a.x, b.y - a.y
    seg2 = dx * dx + dy * dy
    if seg2 == 0:
        return p.distance_to(a)
    t = max(0.0, min(1.0, ((p.x - a.x) * dx + (p.y - a.y) * dy) / seg2))
    return math.hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy))


def polyline_distance(p, pts):
    return min(segment_distance(p, a, b) for a, b in zip(pts, pts[1:]))


def brute_force_mask(points, radius, geometry):
    cells = np.zeros((geometry.height, geometry.width), dtype=bool)
    for iy in range(geometry.height):
        for ix in range(geometry.width):
            center = geometry.cell_center(ix, iy)
            cells[iy, ix] = polyline_distance(center, points) <= radius
    return cells


def straight_scenario():
    return Scenario(
        name="straight",
        tape_centerline=(Point2D(0.5, 0.5), Point2D(2.5, 0.5)),
        start_pose=Pose2D(Point2D(0.5, 0.5), 0.0),
        tape_width=0.05,
        robot_radius=0.25,
    )


def test_gt_region_matches_brute_force_straight_corridor():
    scn = straight_scenario()
    geo = GridGeometry(resolution=0.05, width=60, height=20)
    mask = build_gt_region(scn, geo)
    expected = brute_force_mask(scn.tape_centerline, 0.275, geo)
    assert np.array_equal(mask.cells, expected)


def test_gt_region_l_shape_matches_brute_force():
    scn = Scenario(
        name="L",
        tape_centerline=(Point2D(0.5, 0.5), Point2D(1.5, 0.5), Point2D(1.5, 1.5)),
        start_pose=Pose2D(Point2D(0.5, 0.5), 0.0),
    )
    geo = GridGeometry(resolution=0.05, width=40, height=40)
    mask = build_gt_region(scn, geo)
    expected = brute_force_mask(scn.tape_centerline, scn.gt_half_width, geo)
    assert np.array_equal(mask.cells, expected)


def test_zero_dilation_keeps_only_cells_on_the_centerline():
    scn = Scenario(
        name="thin",
        tape_centerline=(Point2D(0.125, 0.125), Point2D(0.875, 0.125)),
        start_pose=Pose2D(Point2D(0.125, 0.125), 0.0),
        tape_width=0.0,
        robot_radius=0.0,
    )
    geo = GridGeometry(resolution=0.25, width=4, height=4)
    mask = build_gt_region(scn, geo)
    # radius zero: only cells whose center sits exactly on the segment (y = 0.125)
    assert np.array_equal(np.nonzero(mask.cells)[0], np.zeros(4, dtype=int))
    assert mask.count == 4


def test_gt_region_centerline_must_stay_in_grid():
    scn = Scenario(
        name="out",
        tape_centerline=(Point2D(0.5, 0.5), Point2D(99.0, 0.5)),
        start_pose=Pose2D(Point2D(0.5, 0.5), 0.0),
    )
    geo = GridGeometry(resolution=0.05, width=40, height=40)
    with pytest.raises(OutOfBoundsError):
        build_gt_region(scn, geo)


def test_drawn_equal_to_centerline_reproduces_gt_mask():
    scn = straight_scenario()
    geo = GridGeometry(resolution=0.05, width=60, height=20)
    gt = build_gt_region(scn, geo)
    drawn = rasterize_drawn(scn.tape_centerline, scn.gt_width, geo)
    assert np.array_equal(gt.cells, drawn.cells)


def test_drawn_far_away_is_disjoint():
    scn = straight_scenario()
    geo = GridGeometry(resolution=0.05, width=60, height=60)
    gt = build_gt_region(scn, geo)
    far = [Point2D(0.5, 2.5), Point2D(2.5, 2.5)]
    drawn = rasterize_drawn(far, scn.gt_width, geo)
    assert confusion(gt, drawn).tp == 0


def test_offset_drawn_overlap_matches_brute_force():
    scn = straight_scenario()
    geo = GridGeometry(resolution=0.05, width=60, height=30)
    offset = [Point2D(0.5, 0.6), Point2D(2.5, 0.6)]
    drawn = rasterize_drawn(offset, scn.gt_width, geo)
    assert np.array_equal(drawn.cells, brute_force_mask(offset, 0.275, geo))


def test_pct_within_gt_trivial_cases():
    scn = straight_scenario()
    geo = GridGeometry(resolution=0.05, width=60, height=60)
    gt = build_gt_region(scn, geo)
    assert pct_within_gt(scn.tape_centerline, gt) == 1.0
    outside = [Point2D(0.5, 2.5), Point2D(2.5, 2.5)]
    assert pct_within_gt(outside, gt) == 0.0


def test_pct_within_gt_half_in_half_out():
    scn = straight_scenario()
    geo = GridGeometry(resolution=0.05, width=60, height=60)
    gt = build_gt_region(scn, geo)
    # first half rides the centerline, second half jumps far outside the corridor
    drawn = [Point2D(0.5, 0.5), Point2D(1.5, 0.5), Point2D(1.5, 2.5)]
    got = pct_within_gt(drawn, gt)
    length = polyline_length(drawn)
    inside_len = 1.0 + 0.275  # the corridor extends gt_half_width past the turn
    assert got == pytest.approx(inside_len / length, abs=0.02)


def test_pct_within_gt_invariant_under_reversal():
    scn = straight_scenario()
    geo = GridGeometry(resolution=0.05, width=60, height=60)
    gt = build_gt_region(scn, geo)
    rng = np.random.default_rng(8)
    for _ in range(25):
        pts = [
            Point2D(0.5 + 2.0 * t, 0.5 + float(rng.normal(0, 0.15)))
            for t in np.linspace(0, 1, 7)
        ]
        fwd = pct_within_gt(pts, gt)
        rev = pct_within_gt(list(reversed(pts)), gt)
        assert fwd == pytest.approx(rev, abs=1e-12)


def test_confusion_hand_counted_quadrants():
    geo = GridGeometry(resolution=1.0, width=4, height=4)
    gt_cells = np.zeros((4, 4), dtype=bool)
    gt_cells[:, :2] = True     # left two columns
    drawn_cells = np.zeros((4, 4), dtype=bool)
    drawn_cells[2:, :] = True  # top two rows
    counts = confusion(RegionMask(geo, gt_cells), RegionMask(geo, drawn_cells))
    assert (counts.tp, counts.fp, counts.fn, counts.tn) == (4, 4, 4, 4)
    rep = metrics(counts)
    assert rep.accuracy == rep.precision == rep.recall == rep.specificity == rep.f1 == 0.5


def test_perfect_reproduction_metrics():
    geo = GridGeometry(resolution=1.0, width=8, height=8)
    cells = np.zeros((8, 8), dtype=bool)
    cells[2:5, 1:7] = True
    rep = metrics(confusion(RegionMask(geo, cells), RegionMask(geo, cells.copy())))
    assert rep.precision == 1.0 and rep.recall == 1.0 and rep.f1 == 1.0


def test_empty_drawn_mask_gives_undefined_precision():
    geo = GridGeometry(resolution=1.0, width=4, height=4)
    gt = np.zeros((4, 4), dtype=bool)
    gt[0, 0] = True
    rep = metrics(confusion(RegionMask(geo, gt), RegionMask(geo, np.zeros((4, 4), dtype=bool))))
    assert rep.precision is None
    assert rep.recall == 0.0
    assert rep.f1 is None


def test_confusion_requires_matching_geometry():
    a = RegionMask(GridGeometry(resolution=1.0, width=4, height=4), np.zeros((4, 4), dtype=bool))
    b = RegionMask(GridGeometry(resolution=0.5, width=4, height=4), np.zeros((4, 4), dtype=bool))
    with pytest.raises(GridMismatchError):
        confusion(a, b)


def test_counts_sum_to_total_on_random_masks():
    rng = np.random.default_rng(0)
    geo = GridGeometry(resolution=1.0, width=16, height=16)
    for _ in range(50):
        gt = RegionMask(geo, rng.random((16, 16)) < 0.3)
        drawn = RegionMask(geo, rng.random((16, 16)) < 0.3)
        assert confusion(gt, drawn).total == 256


def test_confusion_counts_validation():
    with pytest.raises(ValueError):
        ConfusionCounts(tp=-1, fp=0, fn=0, tn=0)


def test_stage_a_is_a_single_straight_segment():
    scn = make_stage("A")
    assert len(scn.tape_centerline) == 2
    assert polyline_length(scn.tape_centerline) == pytest.approx(4.0)


def test_stage_b_interior_turns_are_exactly_45_degrees():
    scn = make_stage("B")
    pts = scn.tape_centerline
    assert len(pts) >= 4
    for a, b, c in zip(pts, pts[1:], pts[2:]):
        h1 = math.atan2(b.y - a.y, b.x - a.x)
        h2 = math.atan2(c.y - b.y, c.x - b.x)
        assert abs(abs(h2 - h1) - math.pi / 4) < 1e-9


def test_practice_is_a_shorter_straight_run():
    practice = make_stage("practice")
    stage_a = make_stage("A")
    assert len(practice.tape_centerline) == 2
    assert polyline_length(practice.tape_centerline) < polyline_length(stage_a.tape_centerline)


def test_make_stage_rejects_unknown_names():
    with pytest.raises(ValueError):
        make_stage("C")


def test_scenario_grid_contains_whole_corridor():
    for stage in ("A", "B", "practice"):
        scn = make_stage(stage)
        grid = scenario_grid(scn)
        mask = build_gt_region(scn, grid)  # must not raise out-of-bounds
        assert mask.count > 0
        border = np.concatenate(
            [mask.cells[0, :], mask.cells[-1, :], mask.cells[:, 0], mask.cells[:, -1]]
        )
        assert not border.any()  # the corridor never touches the grid edge


def test_scenario_file_round_trip(tmp_path):
    scn = make_stage("B")
    file = tmp_path / "b.json"
    save_scenario(scn, file)
    loaded = load_scenario(file)
    assert loaded == scn


def test_evaluate_path_full_pipeline():
    scn = make_stage("A")
    grid = scenario_grid(scn)
    report, gt_mask, drawn_mask = evaluate_path(list(scn.tape_centerline), scn, grid)
    assert report.f1 == 1.0
    assert report.pct_within_gt == 1.0
    assert np.array_equal(gt_mask.cells, drawn_mask.cells)


def test_monotone_degradation_with_noise():
    scn = make_stage("A")
    grid = scenario_grid(scn)
    gt = build_gt_region(scn, grid)
    from sketchnav.geometry import resample_uniform

    base = resample_uniform(scn.tape_centerline, 0.2)
    rng = np.random.default_rng(123)
    medians = []
    for sigma in (0.0, 0.1, 0.4):
        scores = []
        for _ in range(20):
            noisy = [
                Point2D(p.x + float(rng.normal(0, sigma)), p.y + float(rng.normal(0, sigma)))
                for p in base
            ]
            drawn = rasterize_drawn(noisy, scn.gt_width, grid)
            rep = metrics(confusion(gt, drawn))
            scores.append(rep.f1 if rep.f1 is not None else 0.0)
        medians.append(float(np.median(scores)))
    assert medians[0] == 1.0
    assert medians[0] >= medians[1] >= medians[2]


def test_polyline_region_with_rotated_grid():
    geo = GridGeometry(
        resolution=0.1, width=30, height=30, origin=Pose2D(Point2D(-1.0, -0.5), 0.4)
    )
    pts = [Point2D(0.0, 0.5), Point2D(1.0, 0.5)]
    mask = polyline_region(pts, 0.2, geo)
    assert np.array_equal(mask.cells, brute_force_mask(pts, 0.2, geo))
