"""Instruction templates shared by data generation and the scripted synthesizer.

Each behavior family knows how to render an instruction from slot values,
recognize that instruction again, and resolve it into DSL statements using
only the editing context (map, candidates, predicted paths, bodies). Data
generation renders instructions and keeps the resolved statements as ground
truth; the scripted synthesizer recognizes the instruction and runs the
same resolver, so the two stay structurally consistent by construction.

Behavior families (movement, rotation, path selection, obstacle distance,
wait, backout) follow the taxonomy used throughout the templates.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .dsl import (
    InsertWaypoint,
    ModifyRotation,
    ModifyTranslation,
    SelectPath,
    Statement,
    Wait,
)
from .editverify import EditSession, apply_line, find_agent_conflict
from .geometry import (
    AgentBody,
    ObstacleMap,
    PathSchedule,
    Pose,
    TimedPath,
    clearance,
    path_feasible,
)
from .planner import CandidateSet

MOVEMENT = "movement"
ROTATION = "rotation"
PATH_SELECTION = "path_selection"
OBSTACLE_DISTANCE = "obstacle_distance"
WAIT = "wait"
BACKOUT = "backout"

ALL_BEHAVIORS = (MOVEMENT, ROTATION, PATH_SELECTION, OBSTACLE_DISTANCE, WAIT, BACKOUT)

# Movement magnitudes as a fraction of the smaller map dimension.
AMOUNTS = {"a bit": 0.05, "more": 0.15}
ROTATION_DEGREES = (30, 45, 90)
WAIT_BUFFER = 2  # extra dwell ticks past the last conflicting tick
BACKOUT_MAX_STEPS = 20
WAIT_SEARCH_CAP = 400


@dataclass(frozen=True)
class BehaviorContext:
    """Everything a resolver may consult; identical in datagen and synthesis."""

    obstacle_map: ObstacleMap
    target: str
    candidates: CandidateSet
    others: Dict[str, TimedPath] = field(default_factory=dict)
    bodies: Dict[str, AgentBody] = field(default_factory=dict)
    margin: float = 0.0
    inter_agent_margin: float = 0.0
    speaker: Optional[str] = None
    agent_poses: Dict[str, Pose] = field(default_factory=dict)

    @property
    def target_body(self) -> AgentBody:
        return self.bodies[self.target]

    def session(self) -> EditSession:
        return EditSession(
            self.obstacle_map, self.target, self.candidates,
            others=self.others, bodies=self.bodies,
            margin=self.margin, inter_agent_margin=self.inter_agent_margin,
        )


def _left_of(h: Tuple[float, float]) -> Tuple[float, float]:
    # +y points down, so the left-hand side of a heading is its -90 deg turn.
    return (h[1], -h[0])


def _mid_step(path: TimedPath) -> Optional[int]:
    if len(path.waypoints) < 3:
        return None
    return max(1, min(len(path.waypoints) - 2, len(path.waypoints) // 2))


def _amount_value(word: str, obstacle_map: ObstacleMap) -> float:
    return AMOUNTS[word] * min(obstacle_map.width, obstacle_map.height)


# --- movement ---------------------------------------------------------------

_MOVEMENT_RE = re.compile(
    r"^(?:(from my perspective), )?move (forward|backward|left|right) (a bit|more)$"
)


def render_movement(direction: str, amount: str, perspective: str = "robot") -> str:
    prefix = "from my perspective, " if perspective == "speaker" else ""
    return f"{prefix}move {direction} {amount}"


def _ensure_interior(path: TimedPath, agent: str) -> Tuple[List[Statement], TimedPath, int]:
    """Statements creating an interior waypoint on a two-point path.

    Returns (prefix statements, path after prefix, interior step index).
    """
    step = _mid_step(path)
    if step is not None:
        return [], path, step
    a, b = path.waypoints[0].pose.point, path.waypoints[-1].pose.point
    insert = InsertWaypoint(0, (a[0] + b[0]) / 2, (a[1] + b[1]) / 2, None, agent)
    return [insert], apply_line(path, insert), 1


def resolve_movement(ctx: BehaviorContext, direction: str, amount: str,
                     perspective: str = "robot") -> Optional[List[Statement]]:
    path = ctx.candidates.candidates[0].path
    prefix, path, step = _ensure_interior(path, ctx.target)
    if perspective == "speaker":
        if ctx.speaker is None:
            return None
        sp = ctx.agent_poses.get(ctx.speaker)
        rp = ctx.agent_poses.get(ctx.target)
        if sp is None or rp is None:
            return None
        dx, dy = rp.x - sp.x, rp.y - sp.y
        norm = math.hypot(dx, dy)
        if norm <= 1e-9:
            return None
        h = (dx / norm, dy / norm)
    else:
        h = path.waypoints[step].pose.heading_vector()
    vectors = {
        "forward": h,
        "backward": (-h[0], -h[1]),
        "left": _left_of(h),
        "right": tuple(-c for c in _left_of(h)),
    }
    v = vectors[direction]
    d = _amount_value(amount, ctx.obstacle_map)
    return [
        SelectPath(0, ctx.target),
        *prefix,
        ModifyTranslation(step, d * v[0], d * v[1], ctx.target),
    ]


# --- rotation ---------------------------------------------------------------

_ROTATION_RE = re.compile(r"^rotate (clockwise|counterclockwise) by (\d+) degrees$")


def render_rotation(sense: str, degrees: int) -> str:
    return f"rotate {sense} by {degrees} degrees"


def resolve_rotation(ctx: BehaviorContext, sense: str, degrees: int) -> Optional[List[Statement]]:
    path = ctx.candidates.candidates[0].path
    prefix, path, step = _ensure_interior(path, ctx.target)
    dtheta = float(degrees) if sense == "clockwise" else -float(degrees)
    return [SelectPath(0, ctx.target), *prefix, ModifyRotation(step, dtheta, ctx.target)]


# --- path selection ---------------------------------------------------------

_PATH_SELECTION_RE = re.compile(r"^take the path to the (left|right) of the (\w+)$")


def render_path_selection(side: str, obstacle_name: str) -> str:
    return f"take the path to the {side} of the {obstacle_name}"


def candidate_side(ctx: BehaviorContext, candidate_index: int,
                   obstacle_name: str) -> Optional[str]:
    """Which side of the obstacle the candidate passes, by ray-crossing sign.

    Crossing the obstacle's upward ray left-to-right (+m) means passing it
    on the traveler's left; right-to-left (-m) on the right; no crossing
    means neither side is distinguished.
    """
    names = [o.name for o in ctx.obstacle_map.obstacles]
    if obstacle_name not in names:
        return None
    m = names.index(obstacle_name) + 1
    word = ctx.candidates.candidates[candidate_index].signature.word
    has_left = m in word
    has_right = -m in word
    if has_left and not has_right:
        return "left"
    if has_right and not has_left:
        return "right"
    return None


def resolve_path_selection(ctx: BehaviorContext, side: str,
                           obstacle_name: str) -> Optional[List[Statement]]:
    matches = [
        i for i in range(len(ctx.candidates))
        if candidate_side(ctx, i, obstacle_name) == side
    ]
    if len(matches) != 1:
        return None
    return [SelectPath(matches[0], ctx.target)]


# --- obstacle distance -------------------------------------------------------

_OBSTACLE_DISTANCE_RE = re.compile(
    r"^move (a bit|more) (away from|toward) the (\w+)$"
)


def render_obstacle_distance(amount: str, sense: str, obstacle_name: str) -> str:
    return f"move {amount} {sense} the {obstacle_name}"


def resolve_obstacle_distance(ctx: BehaviorContext, amount: str, sense: str,
                              obstacle_name: str) -> Optional[List[Statement]]:
    obstacle = ctx.obstacle_map.obstacle_by_name(obstacle_name)
    if obstacle is None:
        return None
    path = ctx.candidates.candidates[0].path
    prefix, path, _ = _ensure_interior(path, ctx.target)
    interior = range(1, len(path.waypoints) - 1)
    step = min(interior, key=lambda i: obstacle.rect.distance_to(path.waypoints[i].pose.point))
    p = path.waypoints[step].pose.point
    cx, cy = obstacle.rect.center
    dx, dy = p[0] - cx, p[1] - cy
    norm = math.hypot(dx, dy)
    if norm <= 1e-9:
        return None
    if sense == "toward":
        dx, dy = -dx, -dy
    d = _amount_value(amount, ctx.obstacle_map)
    return [
        SelectPath(0, ctx.target),
        *prefix,
        ModifyTranslation(step, d * dx / norm, d * dy / norm, ctx.target),
    ]


# --- wait ---------------------------------------------------------------------

WAIT_INSTRUCTION = "wait here, let me pass first"


def render_wait() -> str:
    return WAIT_INSTRUCTION


def _conflict_free(session: EditSession, path: TimedPath) -> bool:
    return find_agent_conflict(session, path) is None


def _dwell_probes(cap: int, start: int = 1) -> List[int]:
    """Small dwells exhaustively, then geometric growth up to cap."""
    probes = [d for d in range(start, 9) if d <= cap]
    v = 12
    while v < cap:
        probes.append(v)
        v = int(v * 1.5)
    if cap >= start and cap not in probes:
        probes.append(cap)
    return probes


def resolve_wait(ctx: BehaviorContext) -> Optional[List[Statement]]:
    """Smallest dwell (plus buffer) at the last waypoint reached before the
    first conflict that makes the whole path conflict-free."""
    if not ctx.others:
        return None
    session = ctx.session()
    path = ctx.candidates.candidates[0].path
    conflict = find_agent_conflict(session, path)
    if conflict is None:
        return None
    _, tick = conflict
    sched = PathSchedule.build(path, ctx.target_body)
    start_step = 0
    for i, a in enumerate(sched.arrive):
        if a <= tick:
            start_step = i
    for step in range(start_step, -1, -1):
        for dwell in _dwell_probes(WAIT_SEARCH_CAP):
            edited = apply_line(path, Wait(step, dwell, ctx.target))
            if _conflict_free(session, edited):
                final = apply_line(path, Wait(step, dwell + WAIT_BUFFER, ctx.target))
                if _conflict_free(session, final):
                    return [SelectPath(0, ctx.target), Wait(step, dwell + WAIT_BUFFER, ctx.target)]
    return None


# --- backout -------------------------------------------------------------------

BACKOUT_INSTRUCTION = "back out of the way, let me pass"


def render_backout() -> str:
    return BACKOUT_INSTRUCTION


def resolve_backout(ctx: BehaviorContext) -> Optional[List[Statement]]:
    """Retreat to a nearby clear point, dwell until others pass, then resume.

    Searches retreat directions (reverse, left, right of the current
    heading) and growing distances; first statically feasible, conflict-free
    combination wins.
    """
    if not ctx.others:
        return None
    session = ctx.session()
    path = ctx.candidates.candidates[0].path
    if find_agent_conflict(session, path) is None:
        return None
    body = ctx.target_body
    p0 = path.waypoints[0].pose
    # retreat relative to the direction of travel, not the stored theta
    nxt = path.waypoints[1].pose if len(path.waypoints) > 1 else None
    if nxt is not None and (nxt.x, nxt.y) != (p0.x, p0.y):
        norm = math.hypot(nxt.x - p0.x, nxt.y - p0.y)
        h = ((nxt.x - p0.x) / norm, (nxt.y - p0.y) / norm)
    else:
        h = p0.heading_vector()
    directions = [(-h[0], -h[1]), _left_of(h), tuple(-c for c in _left_of(h))]
    threshold = body.radius + ctx.margin
    for direction in directions:
        for j in range(1, BACKOUT_MAX_STEPS + 1):
            q = (p0.x + j * body.radius * direction[0], p0.y + j * body.radius * direction[1])
            if clearance(ctx.obstacle_map, q) < threshold:
                break  # this direction has hit a wall; try the next one
            insert = InsertWaypoint(0, q[0], q[1], None, ctx.target)
            detour = apply_line(path, insert)
            if not path_feasible(ctx.obstacle_map, detour, body.radius, ctx.margin):
                continue
            # lines commit one at a time, so the detour must already be
            # conflict-free before any dwell is added on top of it
            if not _conflict_free(session, detour):
                continue
            for dwell in _dwell_probes(WAIT_SEARCH_CAP, start=WAIT_BUFFER):
                candidate = apply_line(detour, Wait(1, dwell, ctx.target))
                if _conflict_free(session, candidate):
                    return [SelectPath(0, ctx.target), insert, Wait(1, dwell, ctx.target)]
            return [SelectPath(0, ctx.target), insert]
    return None


# --- dispatch ------------------------------------------------------------------


def match_instruction(text: str) -> Optional[Tuple[str, tuple]]:
    """(behavior, slots) recognized from instruction text, or None."""
    stripped = text.strip().lower().rstrip(".")
    m = _MOVEMENT_RE.match(stripped)
    if m:
        perspective = "speaker" if m.group(1) else "robot"
        return MOVEMENT, (m.group(2), m.group(3), perspective)
    m = _ROTATION_RE.match(stripped)
    if m:
        return ROTATION, (m.group(1), int(m.group(2)))
    m = _PATH_SELECTION_RE.match(stripped)
    if m:
        return PATH_SELECTION, (m.group(1), m.group(2))
    m = _OBSTACLE_DISTANCE_RE.match(stripped)
    if m:
        return OBSTACLE_DISTANCE, (m.group(1), m.group(2), m.group(3))
    if stripped == WAIT_INSTRUCTION:
        return WAIT, ()
    if stripped == BACKOUT_INSTRUCTION:
        return BACKOUT, ()
    return None


_RESOLVERS: Dict[str, Callable[..., Optional[List[Statement]]]] = {
    MOVEMENT: resolve_movement,
    ROTATION: resolve_rotation,
    PATH_SELECTION: resolve_path_selection,
    OBSTACLE_DISTANCE: resolve_obstacle_distance,
    WAIT: resolve_wait,
    BACKOUT: resolve_backout,
}


def resolve_instruction(ctx: BehaviorContext, text: str) -> Optional[List[Statement]]:
    """Statements for an in-grammar instruction, or None if unmatched or
    unresolvable in this context."""
    matched = match_instruction(text)
    if matched is None:
        return None
    behavior, slots = matched
    return _RESOLVERS[behavior](ctx, *slots)
