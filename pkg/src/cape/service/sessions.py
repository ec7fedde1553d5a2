"""Session state machine behind the HTTP API.

Each session owns one interactive episode: a scenario, per-agent committed
paths, a tick counter, and an event log. Commands (instruction, advance)
mutate state under the session lock in arrival order; replaying the logged
commands against the same scenario and seed reproduces the terminal state.
"""

from __future__ import annotations

import itertools
import math
import queue
import threading
from dataclasses import replace
from typing import Dict, List, Optional

from ..editverify import ACCEPTED, REJECTED
from ..errors import CapeError, NoPathFound, ScenarioInfeasible
from ..geometry import Pose, clearance
from ..pipeline import AgentState, CapeConfig, WorldState, cape_step, scripted_synthesize
from ..planner import PlannerConfig, rrt_plan
from ..sim import CAPE, Scenario, _AgentRun, _attached_pose, _remaining_path


class SessionNotFound(CapeError):
    pass


class SessionTerminal(CapeError):
    pass


class Session:
    def __init__(self, session_id: str, scenario: Scenario, seed: int,
                 config: Optional[CapeConfig] = None):
        self.id = session_id
        self.scenario = scenario
        self.seed = seed
        self.lock = threading.Lock()
        self.tick = 0
        self.terminal: Optional[str] = None  # None | "success" | "failure"
        self.collision: Optional[dict] = None
        self.events: List[dict] = []
        self.last_outcome: Optional[dict] = None
        self.listeners: List[queue.Queue] = []
        base = config or CapeConfig()
        pcfg = base.planner or PlannerConfig(budget=4000, restart_budget=1500)
        self.config = replace(
            base, seed=seed, planner=pcfg,
            margin=scenario.margin or base.margin,
            inter_agent_margin=scenario.inter_agent_margin or base.inter_agent_margin,
        )
        self.runs: Dict[str, _AgentRun] = {}
        for i, spec in enumerate(scenario.agents):
            if spec.attach_to is not None:
                self.runs[spec.agent_id] = _AgentRun(spec, None)
                continue
            try:
                path = rrt_plan(
                    scenario.obstacle_map, spec.start, spec.goal, spec.body,
                    seed=seed * 31 + i, config=replace(pcfg, margin=self.config.margin),
                )
            except NoPathFound as e:
                raise ScenarioInfeasible(f"agent {spec.agent_id}: {e}") from e
            self.runs[spec.agent_id] = _AgentRun(spec, path)
        self.target = next(
            (a.agent_id for a in scenario.agents if a.policy == CAPE and a.attach_to is None),
            None,
        )
        if self.target is None:
            raise ScenarioInfeasible("scenario has no editable agent")
        # candidates for the initial scene come from one planning step
        result = self._cape_step("")
        self.candidates = result.plan.self_candidates
        self.predicted = dict(result.plan.predicted_others)
        self.runs[self.target].replace_path(result.outcome.final_path, 0)

    # --- queries ------------------------------------------------------------

    def _movers(self) -> List[_AgentRun]:
        return [r for r in self.runs.values() if r.spec.attach_to is None]

    def poses(self) -> Dict[str, Pose]:
        poses = {r.spec.agent_id: r.pose_at(self.tick) for r in self._movers()}
        for spec in self.scenario.agents:
            if spec.attach_to is not None:
                poses[spec.agent_id] = _attached_pose(
                    self.runs[spec.attach_to], spec, self.tick
                )
        return poses

    def scene(self) -> dict:
        poses = self.poses()
        return {
            "version": 1,
            "session_id": self.id,
            "tick": self.tick,
            "terminal": self.terminal,
            "collision": self.collision,
            "map": self.scenario.obstacle_map.to_json(),
            "target": self.target,
            "agents": {
                spec.agent_id: {
                    "pose": poses[spec.agent_id].to_json(),
                    "goal": spec.goal.to_json(),
                    "body": spec.body.to_json(),
                    "policy": spec.policy,
                    "path": (
                        [list(p) for p in self.runs[spec.agent_id].path.points()]
                        if self.runs[spec.agent_id].path is not None
                        else []
                    ),
                }
                for spec in self.scenario.agents
            },
            "candidates": self.candidates.to_json(),
            "predicted_others": {k: v.to_json() for k, v in self.predicted.items()},
            "last_outcome": self.last_outcome,
        }

    # --- commands -----------------------------------------------------------

    def _cape_step(self, instruction: str):
        poses = self.poses()
        world = WorldState(
            self.scenario.obstacle_map,
            tuple(
                AgentState(r.spec.agent_id, poses[r.spec.agent_id], r.spec.goal, r.spec.body)
                for r in self._movers()
            ),
        )
        known = {
            r.spec.agent_id: _remaining_path(r, self.tick)
            for r in self._movers()
            if r.spec.agent_id != self.target
        }
        speaker = next(
            (a.agent_id for a in self.scenario.agents if a.agent_id != self.target),
            None,
        )
        return cape_step(
            world, self.target, instruction, scripted_synthesize,
            replace(self.config, seed=self.seed * 100003 + self.tick),
            speaker=speaker, known_others=known,
        )

    def submit_instruction(self, text: str) -> dict:
        if self.terminal is not None:
            raise SessionTerminal(f"session is terminal ({self.terminal})")
        if not text.strip():
            raise ValueError("instruction must be non-empty")
        result = self._cape_step(text)
        self.candidates = result.plan.self_candidates
        self.predicted = dict(result.plan.predicted_others)
        self.runs[self.target].replace_path(result.outcome.final_path, self.tick)
        payload = {
            "instruction": text,
            "program_text": result.response.program_text,
            "verdicts": [v.to_json() for v in result.outcome.line_results],
            "accepted_lines": sum(
                1 for v in result.outcome.line_results if v.status == ACCEPTED
            ),
            "rejected_lines": sum(
                1 for v in result.outcome.line_results if v.status == REJECTED
            ),
            "degraded": result.degraded,
            "tokens": result.response.token_count,
            "updated_path": [list(p) for p in result.outcome.final_path.points()],
            "selected_index": result.outcome.selected_index,
            "tick": self.tick,
        }
        self.last_outcome = payload
        self.events.append({"type": "instruction", "text": text, "tick": self.tick})
        self._push({"kind": "instruction", **payload})
        return payload

    def advance(self, ticks: int) -> dict:
        if self.terminal is not None:
            raise SessionTerminal(f"session is terminal ({self.terminal})")
        if ticks < 1:
            raise ValueError("ticks must be >= 1")
        self.events.append({"type": "advance", "ticks": ticks, "tick": self.tick})
        for _ in range(ticks):
            self.tick += 1
            poses = self.poses()
            hit = self._detect_collision(poses)
            if hit is not None:
                self.collision = hit
                self.terminal = "failure"
                break
            if all(r.arrived(self.tick) for r in self._movers()):
                self.terminal = "success"
                break
        poses = self.poses()
        delta = {
            "tick": self.tick,
            "poses": {k: v.to_json() for k, v in poses.items()},
            "collision": self.collision,
            "terminal": self.terminal,
        }
        self._push({"kind": "advance", **delta})
        return delta

    def _detect_collision(self, poses: Dict[str, Pose]) -> Optional[dict]:
        for spec in self.scenario.agents:
            p = poses[spec.agent_id]
            if clearance(self.scenario.obstacle_map, p.point) < spec.body.radius - 1e-9:
                return {"tick": self.tick, "kind": "static", "agent": spec.agent_id}
        agents = self.scenario.agents
        for i, a in enumerate(agents):
            for b in agents[i + 1:]:
                if a.attach_to == b.agent_id or b.attach_to == a.agent_id:
                    continue
                if math.dist(
                    poses[a.agent_id].point, poses[b.agent_id].point
                ) < a.body.radius + b.body.radius:
                    return {
                        "tick": self.tick, "kind": "agent",
                        "agents": sorted((a.agent_id, b.agent_id)),
                    }
        return None

    def _push(self, payload: dict) -> None:
        for q in list(self.listeners):
            q.put(payload)

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        self.listeners.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        if q in self.listeners:
            self.listeners.remove(q)


class SessionStore:
    def __init__(self):
        self._sessions: Dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)

    def create(self, scenario: Scenario, seed: int,
               config: Optional[CapeConfig] = None) -> Session:
        session = Session(f"s{next(self._counter)}", scenario, seed, config)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFound(session_id)
        return session


def replay_event_log(
    scenario: Scenario, seed: int, events: List[dict],
    config: Optional[CapeConfig] = None,
) -> dict:
    """Re-run a recorded command log; returns the terminal scene."""
    session = Session("replay", scenario, seed, config)
    for event in events:
        if event["type"] == "instruction":
            session.submit_instruction(event["text"])
        elif event["type"] == "advance":
            session.advance(event["ticks"])
        else:
            raise ValueError(f"unknown event type {event['type']!r}")
    return session.scene()
