"""Homotopy-aware RRT planner.

Produces k candidate paths in distinct homotopy classes for the target
agent plus a single predicted path per other agent. All randomness flows
from explicit seeds, so identical inputs yield identical plans.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NoPathFound
from .geometry import (
    AgentBody,
    ObstacleMap,
    Point,
    Pose,
    TimedPath,
    clearance,
    segment_feasible,
)
from .homotopy import (
    HomotopySignature,
    h_signature,
    ray_anchors,
    reduce_word,
    segment_crossings,
)


@dataclass(frozen=True)
class PlannerConfig:
    k: int = 3
    goal_bias: float = 0.1
    budget: int = 20000
    restart_budget: int = 2500  # per-attempt slice of the shared budget
    step_size: Optional[float] = None  # None -> 2 * agent radius
    shortcut_rounds: int = 40
    margin: float = 0.0

    def resolved_step(self, body: AgentBody) -> float:
        return self.step_size if self.step_size is not None else 2.0 * body.radius


@dataclass(frozen=True)
class Candidate:
    path: TimedPath
    signature: HomotopySignature

    def to_json(self) -> dict:
        return {"path": self.path.to_json(), "signature": self.signature.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "Candidate":
        return cls(TimedPath.from_json(d["path"]), HomotopySignature.from_json(d["signature"]))


@dataclass(frozen=True)
class CandidateSet:
    candidates: Tuple[Candidate, ...]
    for_agent: str

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("CandidateSet must be non-empty")
        sigs = [c.signature.word for c in self.candidates]
        if len(set(sigs)) != len(sigs):
            raise ValueError("candidate signatures must be pairwise distinct")
        starts = {c.path.start.point for c in self.candidates}
        goals = {c.path.goal.point for c in self.candidates}
        if len(starts) != 1 or len(goals) != 1:
            raise ValueError("candidates must share start and goal")

    def __len__(self) -> int:
        return len(self.candidates)

    def to_json(self) -> dict:
        return {
            "for_agent": self.for_agent,
            "candidates": [c.to_json() for c in self.candidates],
        }

    @classmethod
    def from_json(cls, d: dict) -> "CandidateSet":
        return cls(tuple(Candidate.from_json(c) for c in d["candidates"]), d["for_agent"])


@dataclass(frozen=True)
class JointPlan:
    self_candidates: CandidateSet
    predicted_others: Dict[str, TimedPath] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "self_candidates": self.self_candidates.to_json(),
            "predicted_others": {k: v.to_json() for k, v in self.predicted_others.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> "JointPlan":
        return cls(
            CandidateSet.from_json(d["self_candidates"]),
            {k: TimedPath.from_json(v) for k, v in d.get("predicted_others", {}).items()},
        )


def _derived_rng(seed: int, attempt: int) -> random.Random:
    return random.Random(f"{seed}:{attempt}")


def shortcut_smooth(
    obstacle_map: ObstacleMap,
    points: List[Point],
    radius: float,
    margin: float,
    rng: random.Random,
    rounds: int = 40,
) -> List[Point]:
    """Replace waypoint subchains with single feasible segments.

    Seeded random shortcut attempts followed by a greedy string-pulling
    pass; deterministic for a given rng state.
    """
    pts = list(points)
    for _ in range(rounds):
        if len(pts) <= 2:
            break
        i = rng.randrange(0, len(pts) - 2)
        j = rng.randrange(i + 2, len(pts))
        if segment_feasible(obstacle_map, pts[i], pts[j], radius, margin):
            pts = pts[: i + 1] + pts[j:]
    out = [pts[0]]
    i = 0
    while i < len(pts) - 1:
        j = len(pts) - 1
        while j > i + 1 and not segment_feasible(obstacle_map, pts[i], pts[j], radius, margin):
            j -= 1
        out.append(pts[j])
        i = j
    return out


def _path_from_points(points: Sequence[Point], start: Pose, goal: Pose) -> TimedPath:
    """Dwell-free TimedPath through points, preserving start/goal headings."""
    poses: List[Pose] = []
    for i, (x, y) in enumerate(points):
        if i == 0:
            theta = start.theta
        elif i == len(points) - 1:
            theta = goal.theta
        else:
            nx, ny = points[i + 1]
            theta = math.degrees(math.atan2(ny - y, nx - x)) if (nx, ny) != (x, y) else 0.0
        poses.append(Pose(x, y, theta))
    return TimedPath.from_poses(poses)


class _RrtRun:
    """One seeded RRT search that avoids blocked homotopy classes.

    Each node carries the reduced crossing word of its root chain, so a goal
    connection that would land in a blocked class is rejected without
    extracting or smoothing. The rejected connector is then removed from
    nearest-neighbor consideration: otherwise its subtree permanently owns
    the goal region and a branch in another class can never finish.
    """

    def __init__(
        self,
        obstacle_map: ObstacleMap,
        start: Pose,
        goal: Pose,
        body: AgentBody,
        config: PlannerConfig,
        rng: random.Random,
        blocked: frozenset,
    ):
        self.map = obstacle_map
        self.start = start
        self.goal = goal
        self.body = body
        self.config = config
        self.rng = rng
        self.blocked = blocked
        self.step = config.resolved_step(body)
        self.threshold = body.radius + config.margin
        self.anchors = ray_anchors(obstacle_map)
        cap = config.budget + 2
        self.nodes = np.empty((cap, 2))
        self.parents = np.empty(cap, dtype=np.int64)
        self.nodes[0] = start.point
        self.parents[0] = -1
        self.words: List[Tuple[int, ...]] = [()]
        self.n = 1
        self.iterations = 0

    def _extract(self, idx: int) -> Optional[TimedPath]:
        chain: List[Point] = []
        while idx >= 0:
            chain.append(tuple(self.nodes[idx]))
            idx = self.parents[idx]
        chain.reverse()
        chain.append(self.goal.point)
        pts = shortcut_smooth(
            self.map, chain, self.body.radius, self.config.margin,
            self.rng, self.config.shortcut_rounds,
        )
        if h_signature(self.map, pts).word in self.blocked:
            return None
        return _path_from_points(pts, self.start, self.goal)

    def search(self, budget: int) -> Optional[TimedPath]:
        if self.start.point == self.goal.point:
            path = TimedPath.from_poses([self.start])
            return None if () in self.blocked else path
        if segment_feasible(self.map, self.start.point, self.goal.point,
                            self.body.radius, self.config.margin):
            sig = h_signature(self.map, [self.start.point, self.goal.point])
            if sig.word not in self.blocked:
                return TimedPath.from_poses([self.start, self.goal])
        gx, gy = self.goal.point
        while self.iterations < budget:
            self.iterations += 1
            if self.rng.random() < self.config.goal_bias:
                sx, sy = gx, gy
            else:
                sx = self.rng.uniform(0.0, self.map.width)
                sy = self.rng.uniform(0.0, self.map.height)
            d2 = np.square(self.nodes[: self.n, 0] - sx) + np.square(self.nodes[: self.n, 1] - sy)
            near = int(np.argmin(d2))
            nx, ny = self.nodes[near]
            dist = math.hypot(sx - nx, sy - ny)
            if dist <= 1e-9:
                continue
            scale = min(1.0, self.step / dist)
            px, py = nx + scale * (sx - nx), ny + scale * (sy - ny)
            if clearance(self.map, (px, py)) < self.threshold:
                continue
            if not segment_feasible(self.map, (nx, ny), (px, py),
                                    self.body.radius, self.config.margin):
                continue
            idx = self.n
            self.nodes[idx] = (px, py)
            self.parents[idx] = near
            self.words.append(reduce_word(
                self.words[near] + tuple(segment_crossings(self.anchors, (nx, ny), (px, py)))
            ))
            self.n += 1
            if math.hypot(gx - px, gy - py) <= self.step and segment_feasible(
                self.map, (px, py), (gx, gy), self.body.radius, self.config.margin
            ):
                word = reduce_word(
                    self.words[idx] + tuple(segment_crossings(self.anchors, (px, py), (gx, gy)))
                )
                if word not in self.blocked:
                    path = self._extract(idx)
                    if path is not None:
                        return path
                # blocked class (directly or after smoothing): retire the
                # connector so it cannot keep winning the goal region
                self.nodes[idx] = (math.inf, math.inf)
        return None


def rrt_plan(
    obstacle_map: ObstacleMap,
    start: Pose,
    goal: Pose,
    body: AgentBody,
    seed: int,
    config: PlannerConfig | None = None,
    blocked: frozenset = frozenset(),
    budget: int | None = None,
) -> TimedPath:
    """Feasible dwell-free path from start to goal; raises NoPathFound."""
    config = config or PlannerConfig()
    threshold = body.radius + config.margin
    if clearance(obstacle_map, start.point) < threshold:
        raise NoPathFound(f"start {start.point} has insufficient clearance")
    if clearance(obstacle_map, goal.point) < threshold:
        raise NoPathFound(f"goal {goal.point} has insufficient clearance")
    run = _RrtRun(obstacle_map, start, goal, body, config, _derived_rng(seed, 0), blocked)
    path = run.search(budget if budget is not None else config.budget)
    if path is None:
        raise NoPathFound(f"no path within {config.budget} iterations")
    return path


def _via_search(
    obstacle_map: ObstacleMap,
    start: Pose,
    goal: Pose,
    body: AgentBody,
    config: PlannerConfig,
    rng: random.Random,
    budget: int,
) -> Tuple[Optional[TimedPath], int]:
    """One detour attempt: plan through a random via point, then smooth.

    Homotopy classes beyond the first rarely fall out of a plain tree: the
    class that reaches the goal region first owns it under nearest-neighbor
    attachment, so alternatives come from forcing the route through a fresh
    waypoint instead. Returns (path or None, iterations spent).
    """
    threshold = body.radius + config.margin
    via: Optional[Point] = None
    for _ in range(20):
        p = (rng.uniform(0.0, obstacle_map.width), rng.uniform(0.0, obstacle_map.height))
        if clearance(obstacle_map, p) >= threshold:
            via = p
            break
    if via is None:
        return None, 1
    via_pose = Pose(via[0], via[1], 0.0)
    if segment_feasible(obstacle_map, start.point, via, body.radius, config.margin) and \
            segment_feasible(obstacle_map, via, goal.point, body.radius, config.margin):
        pts = [start.point, via, goal.point]
        used = 1
    else:
        leg_budget = max(min(budget // 2, 800), 1)
        first = _RrtRun(obstacle_map, start, via_pose, body, config, rng, frozenset())
        leg_a = first.search(leg_budget)
        used = max(first.iterations, 1)
        if leg_a is None:
            return None, used
        second = _RrtRun(obstacle_map, via_pose, goal, body, config, rng, frozenset())
        leg_b = second.search(leg_budget)
        used += max(second.iterations, 1)
        if leg_b is None:
            return None, used
        pts = list(leg_a.points()) + list(leg_b.points())[1:]
    # smooth only if it keeps the class: the detour is the whole point here,
    # and unconstrained shortcutting collapses back to the dominant corridor
    raw_sig = h_signature(obstacle_map, pts)
    smoothed = shortcut_smooth(
        obstacle_map, pts, body.radius, config.margin, rng, config.shortcut_rounds
    )
    if h_signature(obstacle_map, smoothed) == raw_sig:
        pts = smoothed
    return _path_from_points(pts, start, goal), used


def multi_candidate_plan(
    obstacle_map: ObstacleMap,
    start: Pose,
    goal: Pose,
    body: AgentBody,
    seed: int,
    config: PlannerConfig | None = None,
    for_agent: str = "robot",
) -> CandidateSet:
    """Up to k feasible paths with pairwise-distinct homotopy signatures.

    The first attempt is a plain seeded search; later attempts detour
    through random via points to reach classes the first tree cannot. The
    total iteration budget is shared across attempts, each capped at
    restart_budget so a stuck attempt cannot starve later ones. Returns
    fewer than k candidates without error if fewer classes are found; raises
    NoPathFound only if no path at all is found.
    """
    config = config or PlannerConfig()
    threshold = body.radius + config.margin
    if clearance(obstacle_map, start.point) < threshold or clearance(
        obstacle_map, goal.point
    ) < threshold:
        raise NoPathFound("start or goal has insufficient clearance")
    remaining = config.budget
    blocked: set = set()
    candidates: List[Candidate] = []
    attempt = 0
    while len(candidates) < config.k and remaining > 0:
        rng = _derived_rng(seed, attempt)
        slice_budget = min(remaining, config.restart_budget)
        if attempt == 0:
            run = _RrtRun(obstacle_map, start, goal, body, config, rng, frozenset(blocked))
            path = run.search(slice_budget)
            remaining -= max(run.iterations, 1)
        else:
            path, used = _via_search(obstacle_map, start, goal, body, config, rng, slice_budget)
            remaining -= used
        attempt += 1
        if path is None:
            continue
        sig = h_signature(obstacle_map, path.points())
        if sig.word in blocked:
            continue
        blocked.add(sig.word)
        candidates.append(Candidate(path, sig))
    if not candidates:
        raise NoPathFound(f"no path within {config.budget} iterations")
    return CandidateSet(tuple(candidates), for_agent)


@dataclass(frozen=True)
class AgentTask:
    agent_id: str
    start: Pose
    goal: Pose
    body: AgentBody


def joint_plan(
    obstacle_map: ObstacleMap,
    target: AgentTask,
    others: Sequence[AgentTask] = (),
    seed: int = 0,
    config: PlannerConfig | None = None,
    single_path: bool = False,
) -> JointPlan:
    """Candidate set for the target agent plus one predicted path per other.

    With single_path=True the candidate set contains exactly one path
    (ablation mode). NoPathFound carries the id of the failing agent.
    """
    config = config or PlannerConfig()
    if single_path:
        config = replace(config, k=1)
    try:
        cands = multi_candidate_plan(
            obstacle_map, target.start, target.goal, target.body,
            seed=seed, config=config, for_agent=target.agent_id,
        )
    except NoPathFound as e:
        raise NoPathFound(str(e), agent=target.agent_id) from e
    predicted: Dict[str, TimedPath] = {}
    for i, other in enumerate(others):
        try:
            predicted[other.agent_id] = rrt_plan(
                obstacle_map, other.start, other.goal, other.body,
                seed=seed * 7919 + i + 1, config=config,
            )
        except NoPathFound as e:
            raise NoPathFound(str(e), agent=other.agent_id) from e
    return JointPlan(cands, predicted)
