"""Apply an edit program to a candidate path with per-line verification.

Each line is tentatively applied; if verification is enabled the full
resulting path is checked against obstacles, unreachable regions, map
bounds, and other agents' predicted timed paths. A rejected line is
reverted, an accepted one commits; later step indices refer to the path
after previously committed edits. apply_program is total — all failures
surface as per-line verdicts, never exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .dsl import (
    EditProgram,
    InsertWaypoint,
    ModifyRotation,
    ModifyTranslation,
    SelectPath,
    Statement,
    Wait,
)
from .errors import IndexOutOfRange
from .geometry import (
    AgentBody,
    ObstacleMap,
    PathSchedule,
    Pose,
    TimedPath,
    Waypoint,
    clearance,
    normalize_angle,
    path_feasible,
    segment_clearance,
)
from .planner import CandidateSet

# Verdict statuses
ACCEPTED = "accepted"
REJECTED = "rejected"
IGNORED = "ignored"
INVALID = "invalid"

# Reject / ignore reasons
STATIC_COLLISION = "StaticCollision"
AGENT_CONFLICT = "AgentConflict"
ENDPOINT_MOVED = "EndpointMoved"
BAD_INDEX = "BadIndex"
INDEX_OUT_OF_RANGE = "IndexOutOfRange"
WRONG_AGENT = "WrongAgent"
EXTRA_SELECT_PATH = "ExtraSelectPath"
DEFAULTED_SELECTION = "DefaultedSelection"


@dataclass(frozen=True)
class Verdict:
    status: str
    reason: Optional[str] = None
    detail: Optional[dict] = None

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.detail:
            out["detail"] = self.detail
        return out


def accept() -> Verdict:
    return Verdict(ACCEPTED)


def reject(reason: str, **detail) -> Verdict:
    return Verdict(REJECTED, reason, detail or None)


def ignore(reason: str, **detail) -> Verdict:
    return Verdict(IGNORED, reason, detail or None)


class EditSession:
    """Immutable editing context for one target agent."""

    def __init__(
        self,
        obstacle_map: ObstacleMap,
        target: str,
        candidates: CandidateSet,
        others: Dict[str, TimedPath] | None = None,
        bodies: Dict[str, AgentBody] | None = None,
        margin: float = 0.0,
        inter_agent_margin: float = 0.0,
        verify_enabled: bool = True,
    ):
        self.map = obstacle_map
        self.target = target
        self.candidates = candidates
        self.others = dict(others or {})
        self.bodies = dict(bodies or {})
        if target not in self.bodies:
            raise ValueError(f"no body for target agent {target!r}")
        for oid in self.others:
            if oid not in self.bodies:
                raise ValueError(f"no body for agent {oid!r}")
        self.margin = margin
        self.inter_agent_margin = inter_agent_margin
        self.verify_enabled = verify_enabled
        self._other_schedules = {
            oid: PathSchedule.build(path, self.bodies[oid]) for oid, path in self.others.items()
        }
        self._other_positions: Dict[str, np.ndarray] = {}

    @property
    def target_body(self) -> AgentBody:
        return self.bodies[self.target]

    def other_positions(self, agent_id: str, horizon: int) -> np.ndarray:
        cached = self._other_positions.get(agent_id)
        if cached is None or cached.shape[0] < horizon + 1:
            cached = self._other_schedules[agent_id].positions_until(horizon)
            self._other_positions[agent_id] = cached
        return cached[: horizon + 1]


@dataclass(frozen=True)
class EditOutcome:
    final_path: TimedPath
    line_results: Tuple[Verdict, ...]
    selected_index: int
    defaulted_selection: bool = False

    def to_json(self) -> dict:
        return {
            "final_path": self.final_path.to_json(),
            "line_results": [v.to_json() for v in self.line_results],
            "selected_index": self.selected_index,
            "defaulted_selection": self.defaulted_selection,
        }


def apply_line(path: TimedPath, stmt: Statement) -> TimedPath:
    """Pure edit with no verification; raises IndexOutOfRange."""
    if isinstance(stmt, SelectPath):
        raise ValueError("SelectPath is handled by apply_program, not apply_line")
    wps = list(path.waypoints)
    if not 0 <= stmt.step < len(wps):
        raise IndexOutOfRange(stmt.step, len(wps))
    i = stmt.step
    if isinstance(stmt, ModifyTranslation):
        p = wps[i].pose
        wps[i] = Waypoint(Pose(p.x + stmt.dx, p.y + stmt.dy, p.theta), wps[i].dwell)
    elif isinstance(stmt, ModifyRotation):
        p = wps[i].pose
        wps[i] = Waypoint(Pose(p.x, p.y, normalize_angle(p.theta + stmt.dtheta)), wps[i].dwell)
    elif isinstance(stmt, Wait):
        wps[i] = Waypoint(wps[i].pose, wps[i].dwell + stmt.t)
    elif isinstance(stmt, InsertWaypoint):
        theta = stmt.theta
        if theta is None:
            theta = _default_insert_theta(wps, i)
        wps.insert(i + 1, Waypoint(Pose(stmt.x, stmt.y, theta)))
    else:
        raise TypeError(f"unknown statement {stmt!r}")
    return TimedPath(tuple(wps))


def _default_insert_theta(wps, i: int) -> float:
    """Heading of the segment the insert splits (falls back to prior heading)."""
    if i + 1 < len(wps):
        a, b = wps[i].pose, wps[i + 1].pose
    elif i > 0:
        a, b = wps[i - 1].pose, wps[i].pose
    else:
        return wps[i].pose.theta
    if (a.x, a.y) == (b.x, b.y):
        return a.theta
    return math.degrees(math.atan2(b.y - a.y, b.x - a.x))


def _static_violation(session: EditSession, path: TimedPath) -> Optional[dict]:
    """First clearance violation along the path, or None if feasible."""
    threshold = session.target_body.radius + session.margin
    pts = path.points()
    for idx, p in enumerate(pts):
        if clearance(session.map, p) < threshold:
            return {"at": "waypoint", "index": idx, "obstacle": _nearest_blocker(session.map, p)}
    for idx, (a, b) in enumerate(zip(pts, pts[1:])):
        if segment_clearance(session.map, a, b) < threshold:
            return {"at": "segment", "index": idx}
    return None


def _nearest_blocker(obstacle_map: ObstacleMap, p) -> str:
    best_name, best_d = "boundary", obstacle_map.boundary_clearance(p)
    for obs in obstacle_map.obstacles:
        d = obs.rect.distance_to(p)
        if d < best_d:
            best_name, best_d = obs.name, d
    for i, r in enumerate(obstacle_map.unreachable):
        d = r.distance_to(p)
        if d < best_d:
            best_name, best_d = f"unreachable[{i}]", d
    return best_name


def find_agent_conflict(
    session: EditSession, path: TimedPath
) -> Optional[tuple[str, int]]:
    """(other id, tick) of the first spatiotemporal conflict, else None."""
    sched = PathSchedule.build(path, session.target_body)
    durations = [sched.duration] + [s.duration for s in session._other_schedules.values()]
    horizon = max(durations) + 1
    own = sched.positions_until(horizon)
    r_t = session.target_body.radius
    for oid in session.others:
        other = session.other_positions(oid, horizon)
        threshold = r_t + session.bodies[oid].radius + session.inter_agent_margin
        d = np.hypot(own[:, 0] - other[:, 0], own[:, 1] - other[:, 1])
        bad = np.nonzero(d < threshold)[0]
        if bad.size:
            return oid, int(bad[0])
    return None


def check_line(session: EditSession, before: TimedPath, after: TimedPath) -> Verdict:
    """Accept iff `after` is statically feasible and conflict-free vs others."""
    violation = _static_violation(session, after)
    if violation is not None:
        return reject(STATIC_COLLISION, **violation)
    conflict = find_agent_conflict(session, after)
    if conflict is not None:
        oid, tick = conflict
        return reject(AGENT_CONFLICT, other=oid, tick=tick)
    return accept()


def _moves_endpoint(path: TimedPath, stmt: Statement) -> bool:
    last = len(path.waypoints) - 1
    if isinstance(stmt, ModifyTranslation):
        return stmt.step in (0, last)
    if isinstance(stmt, InsertWaypoint):
        return stmt.step >= last  # appending past the goal changes the endpoint
    return False


def apply_program(session: EditSession, program: EditProgram) -> EditOutcome:
    """Run the whole program against the session; total, never raises.

    The first SelectPath for the target is hoisted to the front; extra
    SelectPath lines are Ignored, a missing one defaults to candidate 0.
    Switching to a non-default candidate is itself verified: a selection
    that would collide or conflict is rejected and the default kept.
    Statements addressing other agents are Ignored. Remaining lines apply
    sequentially; with verification enabled a rejected line is reverted.
    """
    lines = program.lines
    verdicts: list[Optional[Verdict]] = [None] * len(lines)

    selected_index = 0
    defaulted = True
    select_seen = False
    for i, line in enumerate(lines):
        stmt = line.statement
        if stmt is None:
            verdicts[i] = Verdict(INVALID, detail={
                "line": line.error.line, "col": line.error.col, "message": line.error.message,
            })
            continue
        if isinstance(stmt, SelectPath):
            if stmt.agent != session.target:
                verdicts[i] = ignore(WRONG_AGENT, agent=stmt.agent)
            elif select_seen:
                verdicts[i] = ignore(EXTRA_SELECT_PATH)
            else:
                select_seen = True
                defaulted = False
                if not 0 <= stmt.path_index < len(session.candidates):
                    selected_index = 0
                    verdicts[i] = reject(
                        BAD_INDEX, index=stmt.path_index, count=len(session.candidates)
                    )
                elif stmt.path_index == 0 or not session.verify_enabled:
                    # candidate 0 is the incumbent default, so selecting it
                    # changes nothing and needs no safety check
                    selected_index = stmt.path_index
                    verdicts[i] = accept()
                else:
                    chosen = session.candidates.candidates[stmt.path_index].path
                    verdict = check_line(
                        session, session.candidates.candidates[0].path, chosen
                    )
                    verdicts[i] = verdict
                    selected_index = stmt.path_index if verdict.status == ACCEPTED else 0

    path = session.candidates.candidates[selected_index].path
    for i, line in enumerate(lines):
        if verdicts[i] is not None:
            continue
        stmt = line.statement
        if stmt.agent != session.target:
            verdicts[i] = ignore(WRONG_AGENT, agent=stmt.agent)
            continue
        try:
            edited = apply_line(path, stmt)
        except IndexOutOfRange as e:
            verdicts[i] = reject(INDEX_OUT_OF_RANGE, step=e.step, length=e.length)
            continue
        if not session.verify_enabled:
            path = edited
            verdicts[i] = accept()
            continue
        if _moves_endpoint(path, stmt):
            verdicts[i] = reject(ENDPOINT_MOVED)
            continue
        verdict = check_line(session, path, edited)
        verdicts[i] = verdict
        if verdict.status == ACCEPTED:
            path = edited

    return EditOutcome(
        final_path=path,
        line_results=tuple(verdicts),
        selected_index=selected_index,
        defaulted_selection=defaulted,
    )
