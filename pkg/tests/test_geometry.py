import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cape.geometry import (
    AgentBody,
    Obstacle,
    ObstacleMap,
    PathSchedule,
    Pose,
    Rect,
    TimedPath,
    Waypoint,
    clearance,
    normalize_angle,
    path_feasible,
    pose_at_tick,
    segment_clearance,
    segment_feasible,
)

EMPTY = ObstacleMap(100, 100)
ONE_BLOCK = ObstacleMap(100, 100, obstacles=(Obstacle("box", Rect(40, 40, 20, 20)),))


def test_pose_normalizes_theta():
    assert Pose(0, 0, 270).theta == -90
    assert Pose(0, 0, -180).theta == -180
    assert Pose(0, 0, 180).theta == -180
    assert Pose(0, 0, 0).theta == 0


def test_pose_rejects_nonfinite():
    with pytest.raises(ValueError):
        Pose(float("nan"), 0)


def test_map_rejects_duplicate_names():
    with pytest.raises(ValueError):
        ObstacleMap(100, 100, obstacles=(
            Obstacle("a", Rect(1, 1, 2, 2)), Obstacle("a", Rect(5, 5, 2, 2)),
        ))


def test_map_rejects_out_of_bounds_rect():
    with pytest.raises(ValueError):
        ObstacleMap(100, 100, obstacles=(Obstacle("a", Rect(95, 95, 10, 10)),))


def test_clearance_center_of_empty_map():
    assert clearance(EMPTY, (50, 50)) == 50


def test_clearance_inside_obstacle_is_zero():
    assert clearance(ONE_BLOCK, (50, 50)) == 0


def test_clearance_point_to_rect_by_hand():
    # (30, 50) is 10 left of the rect (40,40,20,20)
    assert clearance(ONE_BLOCK, (30, 50)) == pytest.approx(10)


def test_clearance_outside_map_is_zero():
    assert clearance(EMPTY, (-5, 50)) == 0
    assert clearance(EMPTY, (50, 120)) == 0


def test_clearance_diagonal_corner():
    d = clearance(ONE_BLOCK, (30, 30))
    assert d == pytest.approx(math.hypot(10, 10))


@given(
    px=st.floats(0, 100), py=st.floats(0, 100),
    qx=st.floats(0, 100), qy=st.floats(0, 100),
)
@settings(max_examples=200)
def test_clearance_is_lipschitz(px, py, qx, qy):
    cp = clearance(ONE_BLOCK, (px, py))
    cq = clearance(ONE_BLOCK, (qx, qy))
    assert abs(cp - cq) <= math.dist((px, py), (qx, qy)) + 1e-9


def test_segment_feasible_open_space():
    assert segment_feasible(EMPTY, (10, 10), (90, 90), radius=5)


def test_segment_crossing_obstacle_infeasible():
    assert not segment_feasible(ONE_BLOCK, (10, 50), (90, 50), radius=1)


def test_segment_near_miss_boundary_case():
    # Segment y=30 passes 10 above rect top (y=40). radius+margin=10 passes,
    # radius+margin slightly above 10 fails.
    assert segment_feasible(ONE_BLOCK, (10, 30), (90, 30), radius=10, margin=0)
    assert not segment_feasible(ONE_BLOCK, (10, 30), (90, 30), radius=10, margin=1e-9)


def test_segment_clearance_matches_sampling():
    a, b = (10, 20), (90, 70)
    exact = segment_clearance(ONE_BLOCK, a, b)
    sampled = min(
        clearance(ONE_BLOCK, (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
        for t in [i / 400 for i in range(401)]
    )
    assert exact == pytest.approx(sampled, abs=0.05)


def test_path_feasible_monotone_in_margin():
    path = TimedPath.from_points([(10, 10), (10, 90), (90, 90)])
    assert path_feasible(ONE_BLOCK, path, radius=5, margin=3)
    # Smaller margin can only stay feasible
    assert path_feasible(ONE_BLOCK, path, radius=5, margin=0)


def test_path_through_obstacle_infeasible():
    path = TimedPath.from_points([(10, 50), (90, 50)])
    assert not path_feasible(ONE_BLOCK, path, radius=2)


def test_pose_at_tick_start_and_single_waypoint():
    body = AgentBody(radius=5, speed=1)
    p = TimedPath.from_poses([Pose(3, 4, 10)])
    assert pose_at_tick(p, body, 0) == Pose(3, 4, 10)
    assert pose_at_tick(p, body, 100) == Pose(3, 4, 10)


def test_pose_at_tick_linear_interpolation():
    # 10 units apart, speed 2 -> 5 ticks; at t=3 agent is 60% along.
    body = AgentBody(radius=5, speed=2)
    p = TimedPath.from_poses([Pose(0, 0, 0), Pose(10, 0, 0)])
    pose = pose_at_tick(p, body, 3)
    assert pose.x == pytest.approx(6.0)
    assert pose.y == pytest.approx(0.0)


def test_pose_at_tick_respects_dwell():
    body = AgentBody(radius=5, speed=2)
    p = TimedPath(
        (Waypoint(Pose(0, 0), dwell=4), Waypoint(Pose(10, 0), dwell=0))
    )
    assert pose_at_tick(p, body, 4).x == 0
    assert pose_at_tick(p, body, 7).x == pytest.approx(6.0)
    assert pose_at_tick(p, body, 9).x == 10
    assert pose_at_tick(p, body, 500).x == 10


def test_pose_at_tick_theta_shortest_arc():
    body = AgentBody(radius=5, speed=5)
    p = TimedPath.from_poses([Pose(0, 0, 170), Pose(10, 0, -170)])
    # ceil(10/5)=2 ticks; midpoint crosses the wrap, not the long way
    mid = pose_at_tick(p, body, 1)
    assert mid.theta == pytest.approx(-180) or mid.theta == pytest.approx(180)


def test_progress_monotone_in_time():
    body = AgentBody(radius=5, speed=3)
    p = TimedPath(
        (Waypoint(Pose(0, 0), 2), Waypoint(Pose(10, 0), 1), Waypoint(Pose(10, 20), 0))
    )
    sched = PathSchedule.build(p, body)
    xs = [sched.pose_at(t) for t in range(sched.duration + 5)]
    dist_along = [0.0]
    for a, b in zip(xs, xs[1:]):
        dist_along.append(dist_along[-1] + math.dist(a.point, b.point))
    assert dist_along == sorted(dist_along)


def test_positions_until_matches_pose_at():
    body = AgentBody(radius=5, speed=3)
    p = TimedPath(
        (Waypoint(Pose(0, 0), 2), Waypoint(Pose(10, 5), 1), Waypoint(Pose(10, 25), 3))
    )
    sched = PathSchedule.build(p, body)
    arr = sched.positions_until(sched.duration + 4)
    for t in range(sched.duration + 5):
        pose = sched.pose_at(t)
        assert arr[t][0] == pytest.approx(pose.x)
        assert arr[t][1] == pytest.approx(pose.y)


def test_map_json_round_trip():
    m = ObstacleMap(
        200, 100,
        obstacles=(Obstacle("fence", Rect(10, 10, 30, 5)),),
        unreachable=(Rect(150, 50, 20, 20),),
    )
    assert ObstacleMap.from_json(m.to_json()) == m


def test_timed_path_json_round_trip():
    p = TimedPath((Waypoint(Pose(1, 2, 30), 4), Waypoint(Pose(5, 6, -90), 0)))
    assert TimedPath.from_json(p.to_json()) == p


@given(st.floats(-1e6, 1e6))
def test_normalize_angle_range(theta):
    v = normalize_angle(theta)
    assert -180 <= v < 180
