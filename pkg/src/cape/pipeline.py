"""One full step of the plan-synthesize-verify loop.

cape_step plans candidates for the target agent, asks a pluggable
synthesizer for an edit program given the scene and an instruction, and
applies the program under per-line verification. Synthesizer failure of
any kind degrades to the unedited first candidate, so the agent is never
left without a path.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .behaviors import BehaviorContext, resolve_instruction
from .dsl import EditProgram, parse, print_program
from .editverify import EditOutcome, EditSession, apply_program
from .errors import TransportError
from .geometry import AgentBody, ObstacleMap, Pose, TimedPath
from .planner import AgentTask, CandidateSet, JointPlan, PlannerConfig, joint_plan
from .render import render_scene

PROMPTS_DIR = os.path.join(os.path.dirname(__file__), "prompts")


@dataclass(frozen=True)
class AgentState:
    agent_id: str
    pose: Pose
    goal: Pose
    body: AgentBody

    def to_json(self) -> dict:
        return {
            "id": self.agent_id,
            "pose": self.pose.to_json(),
            "goal": self.goal.to_json(),
            "body": self.body.to_json(),
        }


@dataclass(frozen=True)
class WorldState:
    obstacle_map: ObstacleMap
    agents: Tuple[AgentState, ...]

    def agent(self, agent_id: str) -> AgentState:
        for a in self.agents:
            if a.agent_id == agent_id:
                return a
        raise KeyError(agent_id)


@dataclass(frozen=True)
class CapeConfig:
    k: int = 3
    margin: float = 0.0
    inter_agent_margin: float = 0.0
    single_path: bool = False
    no_verify: bool = False
    seed: int = 0
    planner: Optional[PlannerConfig] = None
    render_map: bool = False

    def planner_config(self) -> PlannerConfig:
        base = self.planner or PlannerConfig()
        return replace(base, k=self.k, margin=self.margin)


@dataclass(frozen=True)
class SynthesizerRequest:
    scene: dict
    candidates: CandidateSet
    predicted_others: Dict[str, TimedPath]
    instruction: str
    target: str
    speaker: Optional[str] = None
    rendered_map: Optional[bytes] = None

    def scene_text(self) -> str:
        """Human-readable scene description for text-only synthesizers."""
        m = self.scene["map"]
        lines = [f"Map bounds: {m['width']} x {m['height']}. Right is +x, down is +y."]
        for o in m.get("obstacles", []):
            lines.append(
                f"Obstacle {o['name']}: rect x={o['x']} y={o['y']} w={o['w']} h={o['h']}"
            )
        for agent_id, a in sorted(self.scene.get("agents", {}).items()):
            p = a["pose"]
            lines.append(
                f"Agent {agent_id}: at ({p['x']:.1f}, {p['y']:.1f}) facing {p['theta']:.1f} deg, "
                f"radius {a['radius']}, speed {a['speed']}"
            )
        for i, cand in enumerate(self.candidates.candidates):
            pts = ", ".join(f"({x:.1f}, {y:.1f})" for x, y in cand.path.points())
            lines.append(f"Path {i}: {pts}")
        for oid, path in sorted(self.predicted_others.items()):
            pts = ", ".join(f"({x:.1f}, {y:.1f})" for x, y in path.points())
            lines.append(f"Predicted path of {oid}: {pts}")
        lines.append(f"Instruction to {self.target}: {self.instruction}")
        return "\n".join(lines)


@dataclass(frozen=True)
class SynthesizerResponse:
    program_text: str
    token_count: int = 0
    latency: float = 0.0

    def to_json(self) -> dict:
        return {
            "program_text": self.program_text,
            "token_count": self.token_count,
            "latency": self.latency,
        }


Synthesizer = Callable[[SynthesizerRequest], SynthesizerResponse]


def _behavior_context(request: SynthesizerRequest) -> BehaviorContext:
    scene_agents = request.scene.get("agents", {})
    scene_map = ObstacleMap.from_json(request.scene["map"])
    bodies = {
        aid: AgentBody(radius=a["radius"], speed=a["speed"])
        for aid, a in scene_agents.items()
    }
    poses = {aid: Pose.from_json(a["pose"]) for aid, a in scene_agents.items()}
    return BehaviorContext(
        obstacle_map=scene_map,
        target=request.target,
        candidates=request.candidates,
        others=dict(request.predicted_others),
        bodies=bodies,
        margin=request.scene.get("margin", 0.0),
        inter_agent_margin=request.scene.get("inter_agent_margin", 0.0),
        speaker=request.speaker,
        agent_poses=poses,
    )


def scripted_synthesize(request: SynthesizerRequest) -> SynthesizerResponse:
    """Rule-based inverse of the instruction templates; zero tokens, zero
    latency, deterministic. Out-of-grammar instructions yield an empty
    program."""
    statements = resolve_instruction(_behavior_context(request), request.instruction)
    if statements is None:
        return SynthesizerResponse("", token_count=0, latency=0.0)
    text = print_program(EditProgram.from_statements(statements))
    return SynthesizerResponse(text, token_count=0, latency=0.0)


def load_prompt(name: str) -> str:
    with open(os.path.join(PROMPTS_DIR, f"{name}.txt")) as f:
        return f.read()


class ExternalSynthesizer:
    """Chat-completion client for a generic LLM endpoint.

    endpoint_config keys: url, model, prompt (asset name, default
    "simworld"), timeout (seconds), auth_env (environment variable holding
    the bearer token, optional).
    """

    def __init__(self, endpoint_config: dict):
        self.config = dict(endpoint_config)
        if "url" not in self.config:
            raise ValueError("endpoint config requires a url")

    def __call__(self, request: SynthesizerRequest) -> SynthesizerResponse:
        return external_synthesize(request, self.config)


def external_synthesize(request: SynthesizerRequest, endpoint_config: dict) -> SynthesizerResponse:
    import httpx

    headers = {"Content-Type": "application/json"}
    auth_env = endpoint_config.get("auth_env")
    if auth_env:
        token = os.environ.get(auth_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
    payload = {
        "model": endpoint_config.get("model", ""),
        "messages": [
            {"role": "system", "content": load_prompt(endpoint_config.get("prompt", "simworld"))},
            {"role": "user", "content": request.scene_text()},
        ],
    }
    timeout = endpoint_config.get("timeout", 30.0)
    last_error: Optional[Exception] = None
    for _ in range(2):  # one retry on transport failure
        started = time.monotonic()
        try:
            resp = httpx.post(endpoint_config["url"], json=payload,
                              headers=headers, timeout=timeout)
            resp.raise_for_status()
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
            tokens = int(data.get("usage", {}).get("total_tokens", 0))
            return SynthesizerResponse(text, tokens, time.monotonic() - started)
        except Exception as e:  # transport, HTTP status, or malformed body
            last_error = e
    raise TransportError(f"synthesizer endpoint failed after retry: {last_error}")


@dataclass(frozen=True)
class CapeStepResult:
    outcome: EditOutcome
    response: SynthesizerResponse
    plan: JointPlan
    degraded: bool

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome.to_json(),
            "response": self.response.to_json(),
            "degraded": self.degraded,
        }


def build_request(
    world: WorldState,
    target: str,
    plan: JointPlan,
    instruction: str,
    config: CapeConfig,
    speaker: Optional[str] = None,
) -> SynthesizerRequest:
    scene = {
        "map": world.obstacle_map.to_json(),
        "agents": {
            a.agent_id: {
                "pose": a.pose.to_json(),
                "goal": a.goal.to_json(),
                "radius": a.body.radius,
                "speed": a.body.speed,
            }
            for a in world.agents
        },
        "margin": config.margin,
        "inter_agent_margin": config.inter_agent_margin,
    }
    rendered = None
    if config.render_map:
        rendered = render_scene(
            world.obstacle_map, plan.self_candidates, plan.predicted_others,
            {a.agent_id: a.pose for a in world.agents},
            {a.agent_id: a.body for a in world.agents},
        )
    return SynthesizerRequest(
        scene=scene,
        candidates=plan.self_candidates,
        predicted_others=dict(plan.predicted_others),
        instruction=instruction,
        target=target,
        speaker=speaker,
        rendered_map=rendered,
    )


def cape_step(
    world: WorldState,
    target: str,
    instruction: str,
    synthesizer: Synthesizer,
    config: CapeConfig = CapeConfig(),
    speaker: Optional[str] = None,
    known_others: Optional[Dict[str, TimedPath]] = None,
) -> CapeStepResult:
    """Plan, synthesize, verify. NoPathFound from the planner propagates;
    everything else degrades to candidate 0 with the flag set.

    known_others supplies committed paths for other agents, replacing the
    planner's fresh predictions for those agents."""
    known_others = known_others or {}
    ego = world.agent(target)
    others = [
        a for a in world.agents
        if a.agent_id != target and a.agent_id not in known_others
    ]
    plan = joint_plan(
        world.obstacle_map,
        AgentTask(ego.agent_id, ego.pose, ego.goal, ego.body),
        [AgentTask(a.agent_id, a.pose, a.goal, a.body) for a in others],
        seed=config.seed,
        config=config.planner_config(),
        single_path=config.single_path,
    )
    if known_others:
        plan = JointPlan(plan.self_candidates, {**plan.predicted_others, **known_others})
    request = build_request(world, target, plan, instruction, config, speaker)
    degraded = False
    try:
        response = synthesizer(request)
    except TransportError:
        response = SynthesizerResponse("", 0, 0.0)
        degraded = True
    program = parse(response.program_text)
    if not program.statements:
        degraded = True
        program = EditProgram()
    session = EditSession(
        world.obstacle_map, target, plan.self_candidates,
        others=plan.predicted_others,
        bodies={a.agent_id: a.body for a in world.agents},
        margin=config.margin,
        inter_agent_margin=config.inter_agent_margin,
        verify_enabled=not config.no_verify,
    )
    outcome = apply_program(session, program)
    return CapeStepResult(outcome=outcome, response=response, plan=plan, degraded=degraded)


@dataclass(frozen=True)
class GoalBelief:
    candidates: Tuple[Tuple[str, Tuple[float, float]], ...]
    chosen: str
    scores: Dict[str, float]


def infer_goal_heuristic(
    observed_trajectory: Sequence[Pose],
    candidate_goals: Sequence[Tuple[str, Tuple[float, float]]],
    instruction_text: Optional[str] = None,
) -> GoalBelief:
    """Score goals by recent-heading alignment plus overall approach.

    Recent heading is the displacement over the last up-to-5 poses; each
    goal scores its cosine similarity with that heading, plus the
    normalized distance decrease from the trajectory's first pose to its
    last, plus a keyword bonus when the instruction names the goal.
    """
    if not candidate_goals:
        raise ValueError("need at least one candidate goal")
    if not observed_trajectory:
        raise ValueError("need at least one observed pose")
    last = observed_trajectory[-1].point
    recent = observed_trajectory[-5:]
    hx, hy = last[0] - recent[0].point[0], last[1] - recent[0].point[1]
    hnorm = math.hypot(hx, hy)
    first = observed_trajectory[0].point
    scores: Dict[str, float] = {}
    for label, goal in candidate_goals:
        score = 0.0
        gx, gy = goal[0] - last[0], goal[1] - last[1]
        gnorm = math.hypot(gx, gy)
        if hnorm > 1e-9 and gnorm > 1e-9:
            score += (hx * gx + hy * gy) / (hnorm * gnorm)
        d_first = math.dist(first, goal)
        d_last = math.dist(last, goal)
        if d_first > 1e-9:
            score += (d_first - d_last) / d_first
        if instruction_text and label.lower() in instruction_text.lower():
            score += 0.5
        scores[label] = score
    best = max(scores.values())
    # deterministic tie-break: first candidate in list order wins
    chosen = next(label for label, _ in candidate_goals if scores[label] == best)
    return GoalBelief(tuple((l, tuple(g)) for l, g in candidate_goals), chosen, scores)
