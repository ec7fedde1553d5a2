"""Multi-agent cooperation episodes on shared maps.

Agents follow tick-discretized schedules. When two agents come within the
scenario's trigger distance (respecting a per-pair cooldown), the pair
exchanges an instruction: the speaker inspects the predicted conflict and
issues a wait or backout template, and the receiving agent runs one full
plan-synthesize-verify step to edit its own path. Episodes succeed when
every agent reaches its goal with zero collisions.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import behaviors
from .datagen import MapGenConfig, gen_map
from .errors import EmptyResultSet, NoPathFound, ScenarioInfeasible
from .geometry import (
    AgentBody,
    ObstacleMap,
    PathSchedule,
    Pose,
    TimedPath,
    Waypoint,
    clearance,
)
from .pipeline import AgentState, CapeConfig, CapeStepResult, Synthesizer, WorldState, cape_step, scripted_synthesize
from .planner import PlannerConfig, rrt_plan

CAPE = "cape"          # plans, receives instructions, edits its own path
SCRIPTED = "scripted"  # follows its initial path; can only speak


@dataclass(frozen=True)
class AgentSpec:
    agent_id: str
    start: Pose
    goal: Pose
    body: AgentBody
    policy: str = CAPE
    attach_to: Optional[str] = None  # rigid follower (joint carrying)
    attach_distance: float = 0.0

    def to_json(self) -> dict:
        return {
            "id": self.agent_id,
            "start": self.start.to_json(),
            "goal": self.goal.to_json(),
            "body": self.body.to_json(),
            "policy": self.policy,
            "attach_to": self.attach_to,
            "attach_distance": self.attach_distance,
        }

    @classmethod
    def from_json(cls, d: dict) -> "AgentSpec":
        return cls(
            agent_id=d["id"],
            start=Pose.from_json(d["start"]),
            goal=Pose.from_json(d["goal"]),
            body=AgentBody.from_json(d["body"]),
            policy=d.get("policy", CAPE),
            attach_to=d.get("attach_to"),
            attach_distance=d.get("attach_distance", 0.0),
        )


@dataclass(frozen=True)
class Scenario:
    obstacle_map: ObstacleMap
    agents: Tuple[AgentSpec, ...]
    trigger_distance: float
    cooldown: int = 3
    max_ticks: int = 600
    seed: int = 0
    archetype: str = "custom"
    margin: float = 0.0
    inter_agent_margin: float = 0.0

    def to_json(self) -> dict:
        return {
            "map": self.obstacle_map.to_json(),
            "agents": [a.to_json() for a in self.agents],
            "trigger_distance": self.trigger_distance,
            "cooldown": self.cooldown,
            "max_ticks": self.max_ticks,
            "seed": self.seed,
            "archetype": self.archetype,
            "margin": self.margin,
            "inter_agent_margin": self.inter_agent_margin,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Scenario":
        return cls(
            obstacle_map=ObstacleMap.from_json(d["map"]),
            agents=tuple(AgentSpec.from_json(a) for a in d["agents"]),
            trigger_distance=d["trigger_distance"],
            cooldown=d.get("cooldown", 3),
            max_ticks=d.get("max_ticks", 600),
            seed=d.get("seed", 0),
            archetype=d.get("archetype", "custom"),
            margin=d.get("margin", 0.0),
            inter_agent_margin=d.get("inter_agent_margin", 0.0),
        )


@dataclass(frozen=True)
class SimEvent:
    tick: int
    speaker: str
    receiver: str
    instruction: Optional[str]
    program_text: str = ""
    degraded: bool = False
    accepted_lines: int = 0
    rejected_lines: int = 0
    tokens: int = 0
    latency: float = 0.0

    def to_json(self) -> dict:
        return {
            "tick": self.tick,
            "speaker": self.speaker,
            "receiver": self.receiver,
            "instruction": self.instruction,
            "program_text": self.program_text,
            "degraded": self.degraded,
            "accepted_lines": self.accepted_lines,
            "rejected_lines": self.rejected_lines,
            "tokens": self.tokens,
            "latency": self.latency,
        }


@dataclass(frozen=True)
class EpisodeResult:
    success: bool
    ticks_taken: int
    optimal_ticks: int
    collision: Optional[dict]
    events: Tuple[SimEvent, ...]
    tokens_total: int = 0
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "ticks_taken": self.ticks_taken,
            "optimal_ticks": self.optimal_ticks,
            "collision": self.collision,
            "events": [e.to_json() for e in self.events],
            "tokens_total": self.tokens_total,
            "wall_time": self.wall_time,
        }


class _AgentRun:
    """Mutable per-agent episode state: committed path and its time offset."""

    def __init__(self, spec: AgentSpec, path: Optional[TimedPath]):
        self.spec = spec
        self.path = path
        self.schedule = PathSchedule.build(path, spec.body) if path is not None else None
        self.offset = 0

    def replace_path(self, path: TimedPath, tick: int) -> None:
        self.path = path
        self.schedule = PathSchedule.build(path, self.spec.body)
        self.offset = tick

    def pose_at(self, tick: int) -> Pose:
        return self.schedule.pose_at(max(0, tick - self.offset))

    def arrived(self, tick: int) -> bool:
        return tick - self.offset >= self.schedule.duration


def _attached_pose(anchor: _AgentRun, spec: AgentSpec, tick: int) -> Pose:
    """Rigid follower trails the anchor along its executed path, staying on
    the corridor the anchor has already cleared."""
    delay = math.ceil(spec.attach_distance / anchor.spec.body.speed)
    return anchor.pose_at(max(anchor.offset, tick - delay))


def _remaining_path(run: _AgentRun, tick: int) -> TimedPath:
    """The agent's committed motion from this tick on, as a fresh path.

    Starts at the current interpolated pose (with any unfinished dwell) and
    keeps all waypoints not yet departed.
    """
    tl = max(0, tick - run.offset)
    sched = run.schedule
    path = run.path
    if tl >= sched.duration:
        return TimedPath((Waypoint(path.waypoints[-1].pose),))
    current = sched.pose_at(tl)
    wps: List[Waypoint] = []
    for i, w in enumerate(path.waypoints):
        if sched.depart[i] <= tl:
            continue
        if sched.arrive[i] <= tl < sched.depart[i]:
            # mid-dwell at this waypoint: keep only the unfinished dwell
            wps.append(Waypoint(w.pose, sched.depart[i] - tl))
        else:
            wps.append(w)
    first = wps[0] if wps else Waypoint(path.waypoints[-1].pose)
    if (first.pose.x, first.pose.y) == (current.x, current.y):
        return TimedPath(tuple(wps))
    return TimedPath((Waypoint(current), *wps))


def _first_conflict(
    a: _AgentRun, b: _AgentRun, tick: int, threshold: float
) -> Optional[int]:
    """First global tick >= tick at which the two runs come within threshold."""
    horizon = max(
        a.schedule.duration + a.offset, b.schedule.duration + b.offset, tick
    ) - tick + 2
    pa = a.schedule.positions_until(tick - a.offset + horizon)[tick - a.offset:]
    pb = b.schedule.positions_until(tick - b.offset + horizon)[tick - b.offset:]
    n = min(pa.shape[0], pb.shape[0])
    d = np.hypot(pa[:n, 0] - pb[:n, 0], pa[:n, 1] - pb[:n, 1])
    bad = np.nonzero(d < threshold)[0]
    if bad.size:
        return tick + int(bad[0])
    return None


def _choose_instruction(
    speaker: _AgentRun, receiver: _AgentRun, tick: int, inter_agent_margin: float
) -> Optional[str]:
    """Wait for crossing conflicts, backout for blocking (anti-parallel)
    ones, nothing when no conflict is predicted."""
    threshold = speaker.spec.body.radius + receiver.spec.body.radius + inter_agent_margin
    t_star = _first_conflict(speaker, receiver, tick, threshold)
    if t_star is None:
        return None
    pa0, pa1 = speaker.pose_at(t_star), speaker.pose_at(t_star + 1)
    pb0, pb1 = receiver.pose_at(t_star), receiver.pose_at(t_star + 1)
    va = (pa1.x - pa0.x, pa1.y - pa0.y)
    vb = (pb1.x - pb0.x, pb1.y - pb0.y)
    na, nb = math.hypot(*va), math.hypot(*vb)
    if na > 1e-9 and nb > 1e-9:
        cos = (va[0] * vb[0] + va[1] * vb[1]) / (na * nb)
        if cos <= -0.5:
            return behaviors.render_backout()
    return behaviors.render_wait()


def _resolve_pair(a: AgentSpec, b: AgentSpec) -> Optional[Tuple[str, str]]:
    """(speaker, receiver) for an event between two agents; receivers must
    be editable (cape policy). Cape-to-cape pairs: smaller id speaks."""
    if a.policy == CAPE and b.policy == CAPE:
        lo, hi = sorted((a.agent_id, b.agent_id))
        return lo, hi
    if b.policy == CAPE:
        return a.agent_id, b.agent_id
    if a.policy == CAPE:
        return b.agent_id, a.agent_id
    return None


def run_episode(
    scenario: Scenario,
    synthesizer: Synthesizer = scripted_synthesize,
    cooperate: bool = True,
    single_path: bool = False,
    no_verify: bool = False,
    planner: Optional[PlannerConfig] = None,
) -> EpisodeResult:
    """One deterministic episode. cooperate=False keeps every agent on its
    initial plan (the planner-only baseline)."""
    pcfg = planner or PlannerConfig(budget=4000, restart_budget=1500)
    runs: Dict[str, _AgentRun] = {}
    for i, spec in enumerate(scenario.agents):
        if spec.attach_to is not None:
            runs[spec.agent_id] = _AgentRun(spec, None)
            continue
        try:
            path = rrt_plan(
                scenario.obstacle_map, spec.start, spec.goal, spec.body,
                seed=scenario.seed * 31 + i, config=replace(pcfg, margin=scenario.margin),
            )
        except NoPathFound as e:
            raise ScenarioInfeasible(f"agent {spec.agent_id}: {e}") from e
        runs[spec.agent_id] = _AgentRun(spec, path)
    movers = [r for r in runs.values() if r.spec.attach_to is None]
    optimal_ticks = max(r.schedule.duration for r in movers)

    events: List[SimEvent] = []
    tokens_total = 0
    wall_time = 0.0
    last_event: Dict[Tuple[str, str], int] = {}
    collision: Optional[dict] = None
    success = False
    tick = 0

    for tick in range(scenario.max_ticks + 1):
        poses = {r.spec.agent_id: r.pose_at(tick) for r in movers}
        for spec in scenario.agents:
            if spec.attach_to is not None:
                poses[spec.agent_id] = _attached_pose(runs[spec.attach_to], spec, tick)
        collision = _detect_collision(scenario, poses, tick)
        if collision is not None:
            break
        if all(r.arrived(tick) for r in movers):
            success = True
            break
        if tick == scenario.max_ticks:
            break

        for a, b in _proximal_pairs(scenario, poses):
            key = (a.agent_id, b.agent_id)
            if tick - last_event.get(key, -(10 ** 9)) <= scenario.cooldown:
                continue
            last_event[key] = tick
            pair = _resolve_pair(a, b)
            if pair is None:
                continue
            speaker_id, receiver_id = pair
            instruction = _choose_instruction(
                runs[speaker_id], runs[receiver_id], tick, scenario.inter_agent_margin
            )
            if instruction is None:
                continue
            if not cooperate:
                events.append(SimEvent(tick, speaker_id, receiver_id, instruction))
                continue
            event, result = _receiver_step(
                scenario, runs, poses, speaker_id, receiver_id,
                instruction, tick, synthesizer, single_path, no_verify, pcfg,
            )
            events.append(event)
            if result is not None:
                runs[receiver_id].replace_path(result.outcome.final_path, tick)
                tokens_total += result.response.token_count
                wall_time += result.response.latency

    return EpisodeResult(
        success=success,
        ticks_taken=tick,
        optimal_ticks=optimal_ticks,
        collision=collision,
        events=tuple(events),
        tokens_total=tokens_total,
        wall_time=wall_time,
    )


def _detect_collision(
    scenario: Scenario, poses: Dict[str, Pose], tick: int
) -> Optional[dict]:
    for spec in scenario.agents:
        p = poses[spec.agent_id]
        if clearance(scenario.obstacle_map, p.point) < spec.body.radius - 1e-9:
            return {"tick": tick, "kind": "static", "agent": spec.agent_id}
    for i, a in enumerate(scenario.agents):
        for b in scenario.agents[i + 1:]:
            if a.attach_to == b.agent_id or b.attach_to == a.agent_id:
                continue  # rigid pair is intentionally in contact
            pa, pb = poses[a.agent_id], poses[b.agent_id]
            if math.dist(pa.point, pb.point) < a.body.radius + b.body.radius:
                return {
                    "tick": tick, "kind": "agent",
                    "agents": sorted((a.agent_id, b.agent_id)),
                }
    return None


def _proximal_pairs(
    scenario: Scenario, poses: Dict[str, Pose]
) -> List[Tuple[AgentSpec, AgentSpec]]:
    pairs = []
    free = [a for a in scenario.agents if a.attach_to is None]
    for i, a in enumerate(free):
        for b in free[i + 1:]:
            d = math.dist(poses[a.agent_id].point, poses[b.agent_id].point)
            if d <= scenario.trigger_distance:
                pairs.append((a, b))
    return pairs


def _receiver_step(
    scenario: Scenario,
    runs: Dict[str, _AgentRun],
    poses: Dict[str, Pose],
    speaker_id: str,
    receiver_id: str,
    instruction: str,
    tick: int,
    synthesizer: Synthesizer,
    single_path: bool,
    no_verify: bool,
    pcfg: PlannerConfig,
) -> Tuple[SimEvent, Optional[CapeStepResult]]:
    receiver = runs[receiver_id]
    world = WorldState(
        scenario.obstacle_map,
        tuple(
            AgentState(r.spec.agent_id, poses[r.spec.agent_id], r.spec.goal, r.spec.body)
            for r in runs.values()
            if r.spec.attach_to is None
        ),
    )
    known = {
        r.spec.agent_id: _remaining_path(r, tick)
        for r in runs.values()
        if r.spec.attach_to is None and r.spec.agent_id != receiver_id
    }
    config = CapeConfig(
        margin=scenario.margin,
        inter_agent_margin=scenario.inter_agent_margin,
        single_path=single_path,
        no_verify=no_verify,
        seed=scenario.seed * 100003 + tick,
        planner=pcfg,
    )
    try:
        result = cape_step(
            world, receiver_id, instruction, synthesizer, config,
            speaker=speaker_id, known_others=known,
        )
    except NoPathFound:
        # replanning from the current pose failed; keep the committed path
        return SimEvent(tick, speaker_id, receiver_id, instruction, degraded=True), None
    accepted = sum(1 for v in result.outcome.line_results if v.status == "accepted")
    rejected = sum(1 for v in result.outcome.line_results if v.status == "rejected")
    event = SimEvent(
        tick=tick,
        speaker=speaker_id,
        receiver=receiver_id,
        instruction=instruction,
        program_text=result.response.program_text,
        degraded=result.degraded,
        accepted_lines=accepted,
        rejected_lines=rejected,
        tokens=result.response.token_count,
        latency=result.response.latency,
    )
    return event, result


# --- metrics ------------------------------------------------------------------


def compute_metrics(results: Sequence[EpisodeResult]) -> dict:
    """SR and SEL as percentages, plus token/latency means.

    SEL weights each success by optimal/actual duration (capped at 1), so
    SEL <= SR always.
    """
    if not results:
        raise EmptyResultSet("no episode results")
    n = len(results)
    sr = 100.0 * sum(1 for r in results if r.success) / n
    sel = 100.0 * sum(
        (r.optimal_ticks / max(r.ticks_taken, r.optimal_ticks, 1)) if r.success else 0.0
        for r in results
    ) / n
    return {
        "episodes": n,
        "sr": sr,
        "sel": sel,
        "mean_tokens": sum(r.tokens_total for r in results) / n,
        "mean_wall_time": sum(r.wall_time for r in results) / n,
    }


# --- scenario generators --------------------------------------------------------


def make_conflict_scenarios(
    count: int, seed: int, n_agents: int = 2
) -> List[Scenario]:
    """Timed crossing conflicts.

    2 agents: crossroad corridors, scripted human north-south against a
    cape robot west-east, both reaching the junction together. 3+ agents:
    open map, cape agents converging on the center from evenly spaced
    directions simultaneously.
    """
    scenarios = []
    for i in range(count):
        rng = random.Random(f"conflict:{seed}:{n_agents}:{i}")
        if n_agents == 2:
            scenarios.append(_crossroad_scenario(rng, seed * 1009 + i))
        else:
            scenarios.append(_converge_scenario(rng, seed * 1013 + i, n_agents))
    return scenarios


def _crossroad_scenario(rng: random.Random, seed: int) -> Scenario:
    body = AgentBody(radius=6.0, speed=4.0)
    config = MapGenConfig(
        width=400.0, height=400.0, structured_kind="crossroad",
        obstacle_counts={0: (0, 0)}, clutter_level=0, probe_radius=body.radius,
    )
    obstacle_map = gen_map(config, seed=seed)
    blocks = {o.name: o.rect for o in obstacle_map.obstacles}
    cx = blocks["block_nw"].x + blocks["block_nw"].w + (
        blocks["block_ne"].x - blocks["block_nw"].x - blocks["block_nw"].w
    ) / 2
    cy = blocks["block_nw"].y + blocks["block_nw"].h + (
        blocks["block_sw"].y - blocks["block_nw"].y - blocks["block_nw"].h
    ) / 2
    # equal distances to the junction, so both arrive together
    d = rng.uniform(120.0, 160.0)
    jitter = rng.uniform(-body.speed, body.speed)
    robot = AgentSpec(
        "robot", Pose(cx - d, cy, 0.0), Pose(cx + d + jitter, cy, 0.0), body, CAPE
    )
    human = AgentSpec(
        "human", Pose(cx, cy - d, 90.0), Pose(cx, cy + d + jitter, 90.0), body, SCRIPTED
    )
    return Scenario(
        obstacle_map=obstacle_map,
        agents=(robot, human),
        trigger_distance=80.0,
        cooldown=3,
        max_ticks=400,
        seed=seed,
        archetype="crossroad",
    )


def _converge_scenario(rng: random.Random, seed: int, n_agents: int) -> Scenario:
    body = AgentBody(radius=6.0, speed=4.0)
    obstacle_map = ObstacleMap(500.0, 500.0)
    cx = cy = 250.0
    d = rng.uniform(150.0, 190.0)
    base = rng.uniform(0.0, 360.0)
    agents = []
    for i in range(n_agents):
        angle = math.radians(base + 360.0 * i / n_agents)
        sx, sy = cx + d * math.cos(angle), cy + d * math.sin(angle)
        gx, gy = cx - d * math.cos(angle), cy - d * math.sin(angle)
        theta = math.degrees(math.atan2(gy - sy, gx - sx))
        agents.append(
            AgentSpec(f"agent_{i}", Pose(sx, sy, theta), Pose(gx, gy, theta), body, CAPE)
        )
    return Scenario(
        obstacle_map=obstacle_map,
        agents=tuple(agents),
        trigger_distance=80.0,
        cooldown=3,
        max_ticks=400,
        seed=seed,
        archetype="converge",
    )


def make_household_scenarios(count: int, seed: int) -> List[Scenario]:
    """Two rooms joined by a doorway narrower than 3 agent diameters; the
    robot crosses into the far room while a human walks across its exit
    path, timed to meet just past the door."""
    scenarios = []
    for i in range(count):
        rng = random.Random(f"household:{seed}:{i}")
        scenarios.append(_household_scenario(rng, seed * 1021 + i))
    return scenarios


def _household_scenario(rng: random.Random, seed: int) -> Scenario:
    from .geometry import Obstacle, Rect

    body = AgentBody(radius=1.2, speed=1.0)
    w = h = 60.0
    wall_x = rng.uniform(27.0, 33.0)
    thickness = 4.0
    door_width = rng.uniform(5.5, 7.0)  # < 3 agent diameters (7.2)
    door_y = rng.uniform(15.0, 40.0)
    obstacle_map = ObstacleMap(
        w, h,
        obstacles=(
            Obstacle("wall_upper", Rect(wall_x, 0.0, thickness, door_y)),
            Obstacle(
                "wall_lower",
                Rect(wall_x, door_y + door_width, thickness, h - door_y - door_width),
            ),
        ),
    )
    door_cy = door_y + door_width / 2
    # robot: room A (left), through the door, to room B (right); the human
    # comes the other way through the same door, ending off the robot's
    # line, so the two meet near the doorway whatever detours planning adds
    robot_start = Pose(rng.uniform(5.0, 12.0), door_cy + rng.uniform(-6.0, 6.0), 0.0)
    robot_goal = Pose(rng.uniform(48.0, 55.0), door_cy + rng.uniform(-6.0, 6.0), 0.0)
    robot_dist = math.dist(robot_start.point, (wall_x, door_cy))
    human_x = min(w - 5.0, wall_x + thickness + robot_dist + rng.uniform(-2.0, 2.0))
    hs = Pose(human_x, door_cy + rng.uniform(-3.0, 3.0), 180.0)
    side = 1.0 if rng.random() < 0.5 else -1.0
    hg_y = min(h - 5.0, max(5.0, door_cy + side * rng.uniform(12.0, 20.0)))
    hg = Pose(rng.uniform(5.0, 12.0), hg_y, 180.0)
    robot = AgentSpec("robot", robot_start, robot_goal, body, CAPE)
    human = AgentSpec("human", hs, hg, body, SCRIPTED)
    return Scenario(
        obstacle_map=obstacle_map,
        agents=(robot, human),
        trigger_distance=5.0,
        cooldown=3,
        max_ticks=300,
        seed=seed,
        archetype="household",
    )


def make_parking_scenarios(count: int, seed: int) -> List[Scenario]:
    """Open 1000x1000 lots with sparse clutter and a long trigger range."""
    scenarios = []
    for i in range(count):
        rng = random.Random(f"parking:{seed}:{i}")
        body = AgentBody(radius=20.0, speed=10.0)
        config = MapGenConfig(clutter_level=1, probe_radius=body.radius)
        obstacle_map = gen_map(config, seed=seed * 1031 + i)
        d = rng.uniform(300.0, 400.0)
        cx, cy = 500.0, 500.0
        robot = AgentSpec(
            "robot", Pose(cx - d, cy, 0.0), Pose(cx + d, cy, 0.0), body, CAPE
        )
        human = AgentSpec(
            "human", Pose(cx, cy - d, 90.0), Pose(cx, cy + d, 90.0), body, SCRIPTED
        )
        scenarios.append(
            Scenario(
                obstacle_map=obstacle_map,
                agents=(robot, human),
                trigger_distance=700.0,
                cooldown=3,
                max_ticks=400,
                seed=seed * 1031 + i,
                archetype="parking",
            )
        )
    return scenarios


def make_archetype_scenarios(archetype: str, count: int, seed: int) -> List[Scenario]:
    if archetype == "parking":
        return make_parking_scenarios(count, seed)
    if archetype == "household":
        return make_household_scenarios(count, seed)
    if archetype == "carry":
        return make_carry_scenarios(count, seed)
    raise ValueError(f"unknown archetype {archetype!r}")


def make_carry_scenarios(count: int, seed: int) -> List[Scenario]:
    """Joint-carry layouts: the human is rigidly attached behind the robot."""
    import os

    maps_dir = os.path.join(os.path.dirname(__file__), "maps")
    layouts = sorted(
        f for f in os.listdir(maps_dir) if f.startswith("carry_") and f.endswith(".json")
    )
    scenarios = []
    for i in range(count):
        rng = random.Random(f"carry:{seed}:{i}")
        obstacle_map = ObstacleMap.load(os.path.join(maps_dir, layouts[i % len(layouts)]))
        body = AgentBody(radius=12.0, speed=8.0)
        start = Pose(60.0, obstacle_map.height - 60.0 + rng.uniform(-10.0, 10.0), 0.0)
        goal = Pose(obstacle_map.width - 60.0, 60.0 + rng.uniform(-10.0, 10.0), 0.0)
        robot = AgentSpec("robot", start, goal, body, CAPE)
        human = AgentSpec(
            "human", start, goal, AgentBody(radius=12.0, speed=8.0), SCRIPTED,
            attach_to="robot", attach_distance=3 * body.radius,
        )
        scenarios.append(
            Scenario(
                obstacle_map=obstacle_map,
                agents=(robot, human),
                trigger_distance=0.0,
                cooldown=3,
                max_ticks=400,
                seed=seed * 1033 + i,
                archetype="carry",
            )
        )
    return scenarios


def run_suite(
    scenarios: Sequence[Scenario],
    synthesizer: Synthesizer = scripted_synthesize,
    cooperate: bool = True,
    single_path: bool = False,
    no_verify: bool = False,
    planner: Optional[PlannerConfig] = None,
) -> Tuple[List[EpisodeResult], dict]:
    results = [
        run_episode(
            s, synthesizer=synthesizer, cooperate=cooperate,
            single_path=single_path, no_verify=no_verify, planner=planner,
        )
        for s in scenarios
    ]
    return results, compute_metrics(results)
