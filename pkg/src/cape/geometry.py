"""World representation and collision / clearance primitives.

Coordinate convention: +x is right, +y is down. Heading 0 faces +x and
positive angles turn clockwise (consistent with +y pointing down). All
geometry values are immutable; every operation here is a pure function.

Time is discrete ticks. An agent dwells at each waypoint for its dwell
count, then traverses the next segment at its speed; a segment of length L
takes ceil(L / speed) ticks with linear interpolation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

Point = Tuple[float, float]


def normalize_angle(theta: float) -> float:
    """Normalize an angle in degrees into [-180, 180)."""
    return (theta + 180.0) % 360.0 - 180.0


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError(f"non-finite pose ({self.x}, {self.y}, {self.theta})")
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    @property
    def point(self) -> Point:
        return (self.x, self.y)

    def heading_vector(self) -> Point:
        r = math.radians(self.theta)
        return (math.cos(r), math.sin(r))

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "theta": self.theta}

    @classmethod
    def from_json(cls, d: dict) -> "Pose":
        return cls(d["x"], d["y"], d.get("theta", 0.0))


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"rect must have positive extent, got {self}")

    def contains(self, p: Point) -> bool:
        return self.x <= p[0] <= self.x + self.w and self.y <= p[1] <= self.y + self.h

    @property
    def center(self) -> Point:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def distance_to(self, p: Point) -> float:
        dx = max(self.x - p[0], 0.0, p[0] - (self.x + self.w))
        dy = max(self.y - p[1], 0.0, p[1] - (self.y + self.h))
        return math.hypot(dx, dy)

    def corners(self) -> list[Point]:
        return [
            (self.x, self.y),
            (self.x + self.w, self.y),
            (self.x + self.w, self.y + self.h),
            (self.x, self.y + self.h),
        ]

    def edges(self) -> list[tuple[Point, Point]]:
        c = self.corners()
        return [(c[i], c[(i + 1) % 4]) for i in range(4)]

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}


@dataclass(frozen=True)
class Obstacle:
    name: str
    rect: Rect

    def to_json(self) -> dict:
        return {"name": self.name, **self.rect.to_json()}


@dataclass(frozen=True)
class ObstacleMap:
    width: float
    height: float
    obstacles: Tuple[Obstacle, ...] = ()
    unreachable: Tuple[Rect, ...] = ()

    def __post_init__(self):
        names = [o.name for o in self.obstacles]
        if len(set(names)) != len(names):
            raise ValueError("obstacle names must be unique")
        for r in self.all_rects():
            if r.x < 0 or r.y < 0 or r.x + r.w > self.width or r.y + r.h > self.height:
                raise ValueError(f"rect {r} outside map bounds {self.width}x{self.height}")

    def all_rects(self) -> list[Rect]:
        return [o.rect for o in self.obstacles] + list(self.unreachable)

    def obstacle_by_name(self, name: str) -> Obstacle | None:
        for o in self.obstacles:
            if o.name == name:
                return o
        return None

    def boundary_clearance(self, p: Point) -> float:
        d = min(p[0], p[1], self.width - p[0], self.height - p[1])
        return max(d, 0.0)

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "obstacles": [o.to_json() for o in self.obstacles],
            "unreachable": [r.to_json() for r in self.unreachable],
        }

    @classmethod
    def from_json(cls, d: dict) -> "ObstacleMap":
        return cls(
            width=float(d["width"]),
            height=float(d["height"]),
            obstacles=tuple(
                Obstacle(o["name"], Rect(o["x"], o["y"], o["w"], o["h"]))
                for o in d.get("obstacles", [])
            ),
            unreachable=tuple(
                Rect(r["x"], r["y"], r["w"], r["h"]) for r in d.get("unreachable", [])
            ),
        )

    @classmethod
    def load(cls, path) -> "ObstacleMap":
        with open(path) as f:
            return cls.from_json(json.load(f))


@dataclass(frozen=True)
class Waypoint:
    pose: Pose
    dwell: int = 0

    def __post_init__(self):
        if self.dwell < 0 or int(self.dwell) != self.dwell:
            raise ValueError(f"dwell must be a non-negative integer, got {self.dwell}")
        object.__setattr__(self, "dwell", int(self.dwell))

    def to_json(self) -> dict:
        return {"pose": self.pose.to_json(), "dwell": self.dwell}


@dataclass(frozen=True)
class TimedPath:
    waypoints: Tuple[Waypoint, ...]

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("TimedPath needs at least one waypoint")
        object.__setattr__(self, "waypoints", tuple(self.waypoints))

    def __len__(self) -> int:
        return len(self.waypoints)

    @classmethod
    def from_poses(cls, poses: Sequence[Pose], dwells: Sequence[int] | None = None) -> "TimedPath":
        if dwells is None:
            dwells = [0] * len(poses)
        return cls(tuple(Waypoint(p, d) for p, d in zip(poses, dwells)))

    @classmethod
    def from_points(cls, points: Sequence[Point], theta: float = 0.0) -> "TimedPath":
        """Build a dwell-free path from 2-D points, with headings along segments."""
        poses = []
        for i, (x, y) in enumerate(points):
            if i + 1 < len(points):
                nx, ny = points[i + 1]
                if (nx, ny) != (x, y):
                    theta = math.degrees(math.atan2(ny - y, nx - x))
            poses.append(Pose(x, y, theta))
        return cls.from_poses(poses)

    @property
    def start(self) -> Pose:
        return self.waypoints[0].pose

    @property
    def goal(self) -> Pose:
        return self.waypoints[-1].pose

    def points(self) -> list[Point]:
        return [w.pose.point for w in self.waypoints]

    def length(self) -> float:
        pts = self.points()
        return sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))

    def to_json(self) -> dict:
        return {"waypoints": [w.to_json() for w in self.waypoints]}

    @classmethod
    def from_json(cls, d: dict) -> "TimedPath":
        return cls(
            tuple(Waypoint(Pose.from_json(w["pose"]), w.get("dwell", 0)) for w in d["waypoints"])
        )


@dataclass(frozen=True)
class AgentBody:
    radius: float = 10.0
    speed: float = 1.0

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")
        if not (self.speed > 0 and math.isfinite(self.speed)):
            raise ValueError(f"speed must be positive and finite, got {self.speed}")

    def to_json(self) -> dict:
        return {"radius": self.radius, "speed": self.speed}

    @classmethod
    def from_json(cls, d: dict) -> "AgentBody":
        return cls(radius=d.get("radius", 10.0), speed=d.get("speed", 1.0))


# --- clearance primitives -------------------------------------------------


def clearance(obstacle_map: ObstacleMap, p: Point) -> float:
    """Distance from p to the nearest obstacle, unreachable rect, or boundary.

    Zero if p lies inside any of them (or outside the map).
    """
    d = obstacle_map.boundary_clearance(p)
    if p[0] < 0 or p[1] < 0 or p[0] > obstacle_map.width or p[1] > obstacle_map.height:
        return 0.0
    for r in obstacle_map.all_rects():
        d = min(d, r.distance_to(p))
        if d == 0.0:
            return 0.0
    return d


def _segment_segment_distance(p1: Point, p2: Point, q1: Point, q2: Point) -> float:
    """Minimum distance between two 2-D segments."""
    if _segments_intersect(p1, p2, q1, q2):
        return 0.0
    return min(
        _point_segment_distance(p1, q1, q2),
        _point_segment_distance(p2, q1, q2),
        _point_segment_distance(q1, p1, p2),
        _point_segment_distance(q2, p1, p2),
    )


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    vx, vy = b[0] - a[0], b[1] - a[1]
    wx, wy = p[0] - a[0], p[1] - a[1]
    vv = vx * vx + vy * vy
    if vv <= 0.0:
        return math.hypot(wx, wy)
    t = max(0.0, min(1.0, (wx * vx + wy * vy) / vv))
    return math.hypot(p[0] - (a[0] + t * vx), p[1] - (a[1] + t * vy))


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    # Collinear / touching cases.
    def on_seg(a, b, c):
        return (
            _orient(a, b, c) == 0
            and min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    return on_seg(q1, q2, p1) or on_seg(q1, q2, p2) or on_seg(p1, p2, q1) or on_seg(p1, p2, q2)


def _segment_rect_distance(a: Point, b: Point, r: Rect) -> float:
    if r.contains(a) or r.contains(b):
        return 0.0
    best = math.inf
    for e1, e2 in r.edges():
        d = _segment_segment_distance(a, b, e1, e2)
        if d == 0.0:
            return 0.0
        best = min(best, d)
    return best


def segment_clearance(obstacle_map: ObstacleMap, a: Point, b: Point) -> float:
    """Exact minimum clearance over all points of segment ab.

    Computed in closed form: segment-to-rect distances for every rect, and
    boundary clearance at the endpoints (the boundary clearance function is
    concave piecewise-linear, so its minimum along a segment is attained at
    an endpoint). No sampling is involved.
    """
    best = min(obstacle_map.boundary_clearance(a), obstacle_map.boundary_clearance(b))
    for p in (a, b):
        if p[0] < 0 or p[1] < 0 or p[0] > obstacle_map.width or p[1] > obstacle_map.height:
            return 0.0
    for r in obstacle_map.all_rects():
        best = min(best, _segment_rect_distance(a, b, r))
        if best == 0.0:
            return 0.0
    return best


def segment_feasible(
    obstacle_map: ObstacleMap, a: Point, b: Point, radius: float, margin: float = 0.0
) -> bool:
    """True iff every point on segment ab has clearance >= radius + margin."""
    return segment_clearance(obstacle_map, a, b) >= radius + margin


def path_feasible(
    obstacle_map: ObstacleMap, path: TimedPath, radius: float, margin: float = 0.0
) -> bool:
    """True iff every waypoint and every consecutive segment is feasible."""
    threshold = radius + margin
    pts = path.points()
    for p in pts:
        if clearance(obstacle_map, p) < threshold:
            return False
    for a, b in zip(pts, pts[1:]):
        if segment_clearance(obstacle_map, a, b) < threshold:
            return False
    return True


# --- time parameterization ------------------------------------------------


@dataclass(frozen=True)
class PathSchedule:
    """Precomputed tick timeline for a TimedPath under a given speed.

    arrive[i] / depart[i] delimit the dwell window at waypoint i;
    the segment to waypoint i+1 occupies [depart[i], arrive[i+1]].
    """

    path: TimedPath
    arrive: Tuple[int, ...]
    depart: Tuple[int, ...]

    @classmethod
    def build(cls, path: TimedPath, body: AgentBody) -> "PathSchedule":
        arrive = [0]
        depart = [path.waypoints[0].dwell]
        pts = path.points()
        for i in range(1, len(pts)):
            travel = math.ceil(math.dist(pts[i - 1], pts[i]) / body.speed)
            arrive.append(depart[-1] + travel)
            depart.append(arrive[-1] + path.waypoints[i].dwell)
        return cls(path, tuple(arrive), tuple(depart))

    @property
    def duration(self) -> int:
        """Tick at which the agent has finished its final dwell."""
        return self.depart[-1]

    def pose_at(self, t: int) -> Pose:
        if t < 0:
            raise ValueError("tick must be >= 0")
        wps = self.path.waypoints
        if t >= self.depart[-1]:
            return wps[-1].pose
        # Find the segment or dwell containing t.
        lo, hi = 0, len(wps) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.arrive[mid] <= t:
                lo = mid
            else:
                hi = mid - 1
        i = lo
        if t <= self.depart[i]:
            return wps[i].pose
        # In transit from waypoint i to i+1.
        a, b = wps[i].pose, wps[i + 1].pose
        span = self.arrive[i + 1] - self.depart[i]
        frac = (t - self.depart[i]) / span
        dtheta = normalize_angle(b.theta - a.theta)
        return Pose(
            a.x + frac * (b.x - a.x),
            a.y + frac * (b.y - a.y),
            normalize_angle(a.theta + frac * dtheta),
        )

    def positions_until(self, horizon: int) -> np.ndarray:
        """(horizon+1, 2) array of positions at ticks 0..horizon."""
        out = np.empty((horizon + 1, 2))
        wps = self.path.waypoints
        t = 0
        for i, wp in enumerate(wps):
            stop = min(self.depart[i], horizon)
            if t <= stop:
                out[t : stop + 1] = wp.pose.point
                t = stop + 1
            if t > horizon:
                return out
            if i + 1 < len(wps):
                a, b = wp.pose, wps[i + 1].pose
                span = self.arrive[i + 1] - self.depart[i]
                stop = min(self.arrive[i + 1] - 1, horizon)
                if span > 0 and t <= stop:
                    fr = (np.arange(t, stop + 1) - self.depart[i]) / span
                    out[t : stop + 1, 0] = a.x + fr * (b.x - a.x)
                    out[t : stop + 1, 1] = a.y + fr * (b.y - a.y)
                    t = stop + 1
                if t > horizon:
                    return out
        out[t:] = wps[-1].pose.point
        return out


def pose_at_tick(path: TimedPath, body: AgentBody, t: int) -> Pose:
    """Pose of an agent following `path` at discrete tick t (>= 0).

    The agent dwells at each waypoint, then moves along the segment at
    body.speed; after the final dwell the pose stays at the goal forever.
    """
    return PathSchedule.build(path, body).pose_at(t)


def path_duration(path: TimedPath, body: AgentBody) -> int:
    return PathSchedule.build(path, body).duration
