"""Synthetic maps, scenarios, and instruction/program training records.

Maps are 1000x1000 by default with rectangular obstacles sized 20-50,
sampled uniformly and rejection-tested for free-space connectivity at the
probe diameter. Records pair a templated instruction with its ground-truth
edit program; the ground truth comes from the same behavior resolvers the
scripted synthesizer uses, so the two stay consistent by construction.
"""

from __future__ import annotations

import json
import math
import os
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import behaviors
from .behaviors import ALL_BEHAVIORS, AMOUNTS, ROTATION_DEGREES, BehaviorContext
from .dsl import (
    EditProgram,
    InsertWaypoint,
    ModifyRotation,
    ModifyTranslation,
    SelectPath,
    Statement,
    Wait,
    print_program,
)
from .editverify import ACCEPTED, EditSession, apply_program
from .errors import GenerationFailed, NoPathFound
from .geometry import (
    AgentBody,
    Obstacle,
    ObstacleMap,
    PathSchedule,
    Pose,
    Rect,
    TimedPath,
    clearance,
    path_feasible,
)
from .planner import CandidateSet, PlannerConfig, multi_candidate_plan, rrt_plan

DEFAULT_OBSTACLE_COUNTS = {1: (2, 6), 2: (6, 10), 3: (12, 16)}


@dataclass(frozen=True)
class MapGenConfig:
    width: float = 1000.0
    height: float = 1000.0
    clutter_level: int = 1
    obstacle_counts: Dict[int, Tuple[int, int]] = field(
        default_factory=lambda: dict(DEFAULT_OBSTACLE_COUNTS)
    )
    size_range: Tuple[float, float] = (20.0, 50.0)
    structured_kind: str = "none"  # none | corridor | crossroad
    probe_radius: float = 10.0
    max_attempts: int = 50

    def __post_init__(self):
        if self.clutter_level not in self.obstacle_counts:
            raise ValueError(f"unknown clutter level {self.clutter_level}")
        lo, hi = self.size_range
        if not 0 < lo <= hi < min(self.width, self.height):
            raise ValueError(f"bad size range {self.size_range}")
        if self.structured_kind not in ("none", "corridor", "crossroad"):
            raise ValueError(f"unknown structured kind {self.structured_kind!r}")


def _connected(obstacle_map: ObstacleMap, probe_radius: float) -> bool:
    """Free space forms one component at probe resolution."""
    step = probe_radius
    nx = max(2, int(obstacle_map.width / step))
    ny = max(2, int(obstacle_map.height / step))
    free = {
        (i, j)
        for i in range(nx)
        for j in range(ny)
        if clearance(obstacle_map, ((i + 0.5) * step, (j + 0.5) * step)) >= probe_radius
    }
    if not free:
        return False
    stack = [next(iter(free))]
    seen = {stack[0]}
    while stack:
        i, j = stack.pop()
        for n in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if n in free and n not in seen:
                seen.add(n)
                stack.append(n)
    return seen == free


def _structured_obstacles(config: MapGenConfig, rng: random.Random) -> List[Obstacle]:
    w, h = config.width, config.height
    diameter = 2 * config.probe_radius
    passage = rng.uniform(2.5, 4.0) * diameter
    if config.structured_kind == "corridor":
        thickness = rng.uniform(20.0, 40.0)
        wx = w * rng.uniform(0.4, 0.6)
        gap0 = rng.uniform(passage, h - 2 * passage)
        return [
            Obstacle("wall_top", Rect(wx, 0, thickness, gap0)),
            Obstacle("wall_bottom", Rect(wx, gap0 + passage, thickness, h - gap0 - passage)),
        ]
    if config.structured_kind == "crossroad":
        cx = w * rng.uniform(0.45, 0.55)
        cy = h * rng.uniform(0.45, 0.55)
        x0, x1 = cx - passage / 2, cx + passage / 2
        y0, y1 = cy - passage / 2, cy + passage / 2
        return [
            Obstacle("block_nw", Rect(0, 0, x0, y0)),
            Obstacle("block_ne", Rect(x1, 0, w - x1, y0)),
            Obstacle("block_sw", Rect(0, y1, x0, h - y1)),
            Obstacle("block_se", Rect(x1, y1, w - x1, h - y1)),
        ]
    return []


def gen_map(config: MapGenConfig, seed: int) -> ObstacleMap:
    """Deterministic random map; raises GenerationFailed if the config is
    too dense to keep free space connected."""
    rng = random.Random(f"map:{seed}:{config.clutter_level}:{config.structured_kind}")
    lo, hi = config.obstacle_counts[config.clutter_level]
    size_lo, size_hi = config.size_range
    for _ in range(config.max_attempts):
        obstacles = _structured_obstacles(config, rng)
        count = rng.randint(lo, hi)
        for i in range(count):
            ow = rng.uniform(size_lo, size_hi)
            oh = rng.uniform(size_lo, size_hi)
            ox = rng.uniform(0.0, config.width - ow)
            oy = rng.uniform(0.0, config.height - oh)
            obstacles.append(Obstacle(f"box_{i}", Rect(ox, oy, ow, oh)))
        candidate = ObstacleMap(config.width, config.height, obstacles=tuple(obstacles))
        if _connected(candidate, config.probe_radius):
            return candidate
    raise GenerationFailed(
        f"no connected map after {config.max_attempts} attempts (config {config})"
    )


def sample_free_pose(
    obstacle_map: ObstacleMap, rng: random.Random, radius: float,
    margin: float = 0.0, attempts: int = 200,
) -> Pose:
    for _ in range(attempts):
        x = rng.uniform(radius, obstacle_map.width - radius)
        y = rng.uniform(radius, obstacle_map.height - radius)
        if clearance(obstacle_map, (x, y)) >= radius + margin:
            return Pose(x, y, rng.uniform(-180.0, 179.0))
    raise GenerationFailed("no free pose found")


@dataclass(frozen=True)
class DatasetRecord:
    obstacle_map: ObstacleMap
    clutter_level: int
    robot_start: Pose
    robot_goal: Pose
    human_start: Pose
    human_goal: Pose
    bodies: Dict[str, AgentBody]
    candidates: CandidateSet
    human_path: TimedPath
    behavior: str
    instruction: str
    gt_program: EditProgram

    def to_json(self) -> dict:
        return {
            "version": 1,
            "map": self.obstacle_map.to_json(),
            "clutter_level": self.clutter_level,
            "robot": {"start": self.robot_start.to_json(), "goal": self.robot_goal.to_json()},
            "human": {"start": self.human_start.to_json(), "goal": self.human_goal.to_json()},
            "bodies": {k: v.to_json() for k, v in sorted(self.bodies.items())},
            "candidates": self.candidates.to_json(),
            "human_path": self.human_path.to_json(),
            "behavior": self.behavior,
            "instruction": self.instruction,
            "gt_program": print_program(self.gt_program),
        }

    @classmethod
    def from_json(cls, d: dict) -> "DatasetRecord":
        from .dsl import parse

        return cls(
            obstacle_map=ObstacleMap.from_json(d["map"]),
            clutter_level=d["clutter_level"],
            robot_start=Pose.from_json(d["robot"]["start"]),
            robot_goal=Pose.from_json(d["robot"]["goal"]),
            human_start=Pose.from_json(d["human"]["start"]),
            human_goal=Pose.from_json(d["human"]["goal"]),
            bodies={k: AgentBody.from_json(v) for k, v in d["bodies"].items()},
            candidates=CandidateSet.from_json(d["candidates"]),
            human_path=TimedPath.from_json(d["human_path"]),
            behavior=d["behavior"],
            instruction=d["instruction"],
            gt_program=parse(d["gt_program"]),
        )

    def context(self) -> BehaviorContext:
        """The editing context the record's gt_program was resolved in."""
        return _context(
            self.obstacle_map, self.candidates, self.human_path,
            self.robot_start, self.human_start,
        )


ROBOT = "robot"
HUMAN = "human"
RECORD_BODY = AgentBody(radius=10.0, speed=10.0)


def _context(
    obstacle_map: ObstacleMap,
    candidates: CandidateSet,
    human_path: Optional[TimedPath],
    robot_start: Pose,
    human_start: Pose,
) -> BehaviorContext:
    others = {HUMAN: human_path} if human_path is not None else {}
    return BehaviorContext(
        obstacle_map=obstacle_map,
        target=ROBOT,
        candidates=candidates,
        others=others,
        bodies={ROBOT: RECORD_BODY, HUMAN: RECORD_BODY},
        speaker=HUMAN,
        agent_poses={ROBOT: robot_start, HUMAN: human_start},
    )


def _all_accepted(ctx: BehaviorContext, statements: Sequence[Statement]) -> bool:
    session = ctx.session()
    outcome = apply_program(session, EditProgram.from_statements(list(statements)))
    return all(v.status == ACCEPTED for v in outcome.line_results)


def _neutral_human(
    obstacle_map: ObstacleMap, rng: random.Random, seed: int,
) -> Optional[Tuple[Pose, Pose, TimedPath]]:
    """A human path sampled independently of the robot's candidates."""
    for attempt in range(8):
        try:
            start = sample_free_pose(obstacle_map, rng, RECORD_BODY.radius)
            goal = sample_free_pose(obstacle_map, rng, RECORD_BODY.radius)
            path = rrt_plan(
                obstacle_map, start, goal, RECORD_BODY,
                seed=seed * 131 + attempt, config=PlannerConfig(budget=4000),
            )
            return start, goal, path
        except (GenerationFailed, NoPathFound):
            continue
    return None


def _crossing_human(
    obstacle_map: ObstacleMap,
    candidates: CandidateSet,
    rng: random.Random,
    head_on: bool,
) -> Optional[Tuple[Pose, Pose, TimedPath]]:
    """A straight human path timed to meet candidate 0 mid-traversal.

    Perpendicular to the robot's heading at the meeting point for crossing
    conflicts; anti-parallel for blocking conflicts (head_on).
    """
    path = candidates.candidates[0].path
    sched = PathSchedule.build(path, RECORD_BODY)
    if sched.duration < 4:
        return None
    for _ in range(10):
        tick = rng.randint(2, max(2, sched.duration - 2))
        p = sched.pose_at(tick)
        nxt = sched.pose_at(tick + 1)
        hx, hy = nxt.x - p.x, nxt.y - p.y
        norm = math.hypot(hx, hy)
        if norm <= 1e-9:
            continue
        hx, hy = hx / norm, hy / norm
        # head_on: start ahead of the robot and drive back along its heading;
        # crossing: approach perpendicular, timed to meet at P.
        d = (hx, hy) if head_on else (hy, -hx)
        length = tick * RECORD_BODY.speed
        start = (p.x + d[0] * length, p.y + d[1] * length)
        goal = (p.x - d[0] * length * rng.uniform(0.6, 1.0),
                p.y - d[1] * length * rng.uniform(0.6, 1.0))
        if head_on:
            # pass straight through P, then veer off the robot's line so a
            # dwell can outlast the pass
            over = 4 * RECORD_BODY.radius
            mid = (p.x - hx * over, p.y - hy * over)
            off = 6 * RECORD_BODY.radius * rng.choice((-1.0, 1.0))
            goal = (goal[0] + hy * off, goal[1] - hx * off)
            points = [start, mid, goal]
        else:
            points = [start, goal]
        human = TimedPath.from_points(points)
        if not path_feasible(obstacle_map, human, RECORD_BODY.radius):
            continue
        return human.start, human.goal, human
    return None


def _behavior_options(
    behavior: str,
    ctx: BehaviorContext,
    rng: random.Random,
) -> List[Tuple[str, tuple]]:
    """Candidate (instruction, resolver slots) pairs for one behavior, in
    the order they should be tried. Empty if the scenario cannot host it."""
    if behavior == behaviors.MOVEMENT:
        combos = [
            (d, a, p)
            for d in ("forward", "backward", "left", "right")
            for a in sorted(AMOUNTS)
            for p in ("robot", "speaker")
        ]
        rng.shuffle(combos)
        return [(behaviors.render_movement(*c), c) for c in combos]
    if behavior == behaviors.ROTATION:
        combos = [
            (s, deg)
            for s in ("clockwise", "counterclockwise")
            for deg in ROTATION_DEGREES
        ]
        rng.shuffle(combos)
        return [(behaviors.render_rotation(*c), c) for c in combos]
    if behavior == behaviors.PATH_SELECTION:
        options = []
        for obstacle in ctx.obstacle_map.obstacles:
            for side in ("left", "right"):
                matches = [
                    i for i in range(len(ctx.candidates))
                    if behaviors.candidate_side(ctx, i, obstacle.name) == side
                ]
                if len(matches) == 1:
                    options.append((side, obstacle.name))
        rng.shuffle(options)
        return [(behaviors.render_path_selection(*c), c) for c in options]
    if behavior == behaviors.OBSTACLE_DISTANCE:
        if not ctx.obstacle_map.obstacles:
            return []
        path = ctx.candidates.candidates[0].path
        interior = [w.pose.point for w in path.waypoints[1:-1]] or [
            w.pose.point for w in path.waypoints
        ]
        nearest = sorted(
            ctx.obstacle_map.obstacles,
            key=lambda o: min(o.rect.distance_to(p) for p in interior),
        )[:2]
        combos = [
            (a, s, o.name)
            for o in nearest
            for a in sorted(AMOUNTS)
            for s in ("away from", "toward")
        ]
        rng.shuffle(combos)
        return [(behaviors.render_obstacle_distance(*c), c) for c in combos]
    if behavior == behaviors.WAIT:
        return [(behaviors.render_wait(), ())]
    if behavior == behaviors.BACKOUT:
        return [(behaviors.render_backout(), ())]
    raise ValueError(f"unknown behavior {behavior!r}")


def gen_records(
    obstacle_map: ObstacleMap,
    seed: int,
    behavior_set: Sequence[str] = ALL_BEHAVIORS,
    scenarios: int = 5,
    clutter_level: int = 1,
) -> List[DatasetRecord]:
    """Up to scenarios x behaviors records; infeasible combos are skipped."""
    rng = random.Random(f"records:{seed}")
    records: List[DatasetRecord] = []
    for scenario_idx in range(scenarios):
        candidates = None
        for attempt in range(8):
            try:
                robot_start = sample_free_pose(obstacle_map, rng, RECORD_BODY.radius)
                robot_goal = sample_free_pose(obstacle_map, rng, RECORD_BODY.radius)
                if math.dist(robot_start.point, robot_goal.point) < 0.3 * obstacle_map.width:
                    continue
                candidates = multi_candidate_plan(
                    obstacle_map, robot_start, robot_goal, RECORD_BODY,
                    seed=seed * 977 + scenario_idx * 8 + attempt,
                    config=PlannerConfig(budget=3000, restart_budget=1000),
                    for_agent=ROBOT,
                )
                break
            except (GenerationFailed, NoPathFound):
                continue
        if candidates is None:
            continue
        for behavior in behavior_set:
            record = _gen_one_record(
                obstacle_map, candidates, robot_start, robot_goal,
                behavior, rng, seed * 31 + scenario_idx, clutter_level,
            )
            if record is not None:
                records.append(record)
    return records


def _gen_one_record(
    obstacle_map: ObstacleMap,
    candidates: CandidateSet,
    robot_start: Pose,
    robot_goal: Pose,
    behavior: str,
    rng: random.Random,
    seed: int,
    clutter_level: int,
) -> Optional[DatasetRecord]:
    for attempt in range(8):
        if behavior in (behaviors.WAIT, behaviors.BACKOUT):
            human = _crossing_human(
                obstacle_map, candidates, rng, head_on=behavior == behaviors.BACKOUT
            )
        else:
            human = _neutral_human(obstacle_map, rng, seed + attempt)
        if human is None:
            continue
        human_start, human_goal, human_path = human
        ctx = _context(obstacle_map, candidates, human_path, robot_start, human_start)
        options = _behavior_options(behavior, ctx, rng)
        if not options:
            return None
        resolver = behaviors._RESOLVERS[behavior]
        chosen = None
        for instruction, args in options[:8]:
            statements = resolver(ctx, *args)
            if statements is not None and _all_accepted(ctx, statements):
                chosen = (instruction, statements)
                break
        if chosen is None:
            continue
        instruction, statements = chosen
        return DatasetRecord(
            obstacle_map=obstacle_map,
            clutter_level=clutter_level,
            robot_start=robot_start,
            robot_goal=robot_goal,
            human_start=human_start,
            human_goal=human_goal,
            bodies={ROBOT: RECORD_BODY, HUMAN: RECORD_BODY},
            candidates=candidates,
            human_path=human_path,
            behavior=behavior,
            instruction=instruction,
            gt_program=EditProgram.from_statements(statements),
        )
    return None


def gen_dataset(
    seed: int,
    map_count: int,
    behavior_set: Sequence[str] = ALL_BEHAVIORS,
    scenarios_per_map: int = 5,
    base_config: Optional[MapGenConfig] = None,
) -> List[DatasetRecord]:
    """Records over map_count maps cycling through clutter levels 1-3."""
    records: List[DatasetRecord] = []
    for i in range(map_count):
        clutter = (i % 3) + 1
        config = base_config or MapGenConfig()
        config = MapGenConfig(
            width=config.width, height=config.height, clutter_level=clutter,
            obstacle_counts=config.obstacle_counts, size_range=config.size_range,
            structured_kind=config.structured_kind, probe_radius=config.probe_radius,
        )
        obstacle_map = gen_map(config, seed=seed * 10007 + i)
        records.extend(
            gen_records(
                obstacle_map, seed=seed * 7717 + i, behavior_set=behavior_set,
                scenarios=scenarios_per_map, clutter_level=clutter,
            )
        )
    return records


def export_dataset(records: Sequence[DatasetRecord], out_dir: str) -> Dict[str, str]:
    """records.jsonl + manifest.json with deterministic bytes."""
    if not records:
        raise ValueError("no records to export")
    os.makedirs(out_dir, exist_ok=True)
    records_path = os.path.join(out_dir, "records.jsonl")
    with open(records_path, "w") as f:
        for r in records:
            f.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
    behavior_hist: Dict[str, int] = {}
    clutter_hist: Dict[str, int] = {}
    for r in records:
        behavior_hist[r.behavior] = behavior_hist.get(r.behavior, 0) + 1
        clutter_hist[str(r.clutter_level)] = clutter_hist.get(str(r.clutter_level), 0) + 1
    manifest = {
        "version": 1,
        "count": len(records),
        "behaviors": behavior_hist,
        "clutter_levels": clutter_hist,
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, sort_keys=True, indent=2)
        f.write("\n")
    return {"records": records_path, "manifest": manifest_path}


# --- random program generation (round-trip and fuzz corpora) -----------------

AGENT_POOL = ("robot", "human", "robot_1", "agent_2")


def random_statement(rng: random.Random, max_step: int = 8) -> Statement:
    agent = rng.choice(AGENT_POOL)
    step = rng.randint(0, max_step)
    kind = rng.randrange(5)
    if kind == 0:
        return SelectPath(rng.randint(0, 4), agent)
    if kind == 1:
        return ModifyTranslation(step, _random_float(rng), _random_float(rng), agent)
    if kind == 2:
        return ModifyRotation(step, _random_float(rng, 720.0), agent)
    if kind == 3:
        return Wait(step, rng.randint(0, 500), agent)
    theta = None if rng.random() < 0.5 else _random_float(rng, 180.0)
    return InsertWaypoint(step, _random_float(rng, 1000.0), _random_float(rng, 1000.0), theta, agent)


def _random_float(rng: random.Random, scale: float = 1000.0) -> float:
    v = rng.uniform(-scale, scale)
    return float(round(v, rng.choice((0, 1, 3, 6))))


def gen_programs(seed: int, count: int, max_len: int = 6) -> List[EditProgram]:
    rng = random.Random(f"programs:{seed}")
    return [
        EditProgram.from_statements(
            [random_statement(rng) for _ in range(rng.randint(0, max_len))]
        )
        for _ in range(count)
    ]
