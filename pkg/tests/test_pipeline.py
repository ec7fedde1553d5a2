import json

import httpx
import pytest

from cape.errors import TransportError
from cape.geometry import AgentBody, ObstacleMap, Pose
from cape.pipeline import (
    AgentState,
    CapeConfig,
    ExternalSynthesizer,
    SynthesizerResponse,
    WorldState,
    build_request,
    cape_step,
    external_synthesize,
    infer_goal_heuristic,
    scripted_synthesize,
)
from cape.planner import PlannerConfig, joint_plan, AgentTask

MAP = ObstacleMap(200.0, 200.0)
BODY = AgentBody(radius=5.0, speed=5.0)
CONFIG = CapeConfig(seed=7, planner=PlannerConfig(budget=2000, restart_budget=800))


def make_world(with_human=True):
    agents = [AgentState("robot", Pose(20, 100, 0), Pose(180, 100, 0), BODY)]
    if with_human:
        agents.append(AgentState("human", Pose(100, 180, -90), Pose(100, 20, -90), BODY))
    return WorldState(MAP, tuple(agents))


# --- cape_step ---------------------------------------------------------------


def test_cape_step_applies_in_grammar_instruction():
    result = cape_step(make_world(with_human=False), "robot", "move forward a bit",
                       scripted_synthesize, CONFIG)
    assert not result.degraded
    assert result.response.program_text
    assert all(v.status == "accepted" for v in result.outcome.line_results)
    base = result.plan.self_candidates.candidates[0].path
    assert result.outcome.final_path.points() != base.points()


def test_cape_step_degrades_on_garbage_instruction():
    result = cape_step(make_world(), "robot", "do something impossible",
                       scripted_synthesize, CONFIG, speaker="human")
    assert result.degraded
    base = result.plan.self_candidates.candidates[0].path
    assert result.outcome.final_path.points() == base.points()
    assert result.outcome.selected_index == 0
    assert result.outcome.defaulted_selection


def test_cape_step_degrades_on_transport_error():
    def failing(request):
        raise TransportError("endpoint down")

    result = cape_step(make_world(), "robot", "move forward a bit", failing, CONFIG)
    assert result.degraded
    base = result.plan.self_candidates.candidates[0].path
    assert result.outcome.final_path.points() == base.points()


def test_cape_step_synthesizer_exceptions_other_than_transport_propagate():
    def broken(request):
        raise RuntimeError("bug in synthesizer")

    with pytest.raises(RuntimeError):
        cape_step(make_world(), "robot", "move forward a bit", broken, CONFIG)


def test_cape_step_is_deterministic():
    a = cape_step(make_world(), "robot", "move forward a bit",
                  scripted_synthesize, CONFIG, speaker="human")
    b = cape_step(make_world(), "robot", "move forward a bit",
                  scripted_synthesize, CONFIG, speaker="human")
    assert a.response.program_text == b.response.program_text
    assert a.outcome.final_path.to_json() == b.outcome.final_path.to_json()
    assert json.dumps(a.plan.self_candidates.to_json(), sort_keys=True) == json.dumps(
        b.plan.self_candidates.to_json(), sort_keys=True
    )


def test_cape_step_no_verify_skips_rejection():
    def reckless(request):
        # drive the first editable waypoint off the map: rejected when
        # verifying, kept verbatim when not
        return SynthesizerResponse(
            'select_path(0, "robot")\nmodify_translation(1, 500, 0, "robot")'
        )

    verified = cape_step(make_world(), "robot", "x", reckless, CONFIG)
    assert any(v.status == "rejected" for v in verified.outcome.line_results)
    unverified = cape_step(make_world(), "robot", "x", reckless,
                           CapeConfig(seed=7, no_verify=True, planner=CONFIG.planner))
    assert all(v.status == "accepted" for v in unverified.outcome.line_results)


def test_cape_step_known_others_replace_predictions():
    from cape.geometry import TimedPath

    committed = TimedPath.from_points([(100, 150), (100, 120)])
    result = cape_step(make_world(), "robot", "move forward a bit",
                       scripted_synthesize, CONFIG,
                       known_others={"human": committed})
    assert result.plan.predicted_others["human"].points() == committed.points()


def test_cape_step_single_path_yields_one_candidate():
    result = cape_step(make_world(), "robot", "move forward a bit",
                       scripted_synthesize,
                       CapeConfig(seed=7, single_path=True, planner=CONFIG.planner))
    assert len(result.plan.self_candidates.candidates) == 1


# --- scripted synthesizer ------------------------------------------------------


def make_request(instruction):
    world = make_world()
    plan = joint_plan(
        MAP,
        AgentTask("robot", Pose(20, 100, 0), Pose(180, 100, 0), BODY),
        [AgentTask("human", Pose(100, 180, -90), Pose(100, 20, -90), BODY)],
        seed=7, config=CONFIG.planner_config(),
    )
    return build_request(world, "robot", plan, instruction, CONFIG, speaker="human")


def test_scripted_synthesize_round_trips_template():
    response = scripted_synthesize(make_request("rotate clockwise by 45 degrees"))
    assert "modify_rotation" in response.program_text
    assert response.token_count == 0


def test_scripted_synthesize_empty_on_out_of_grammar():
    response = scripted_synthesize(make_request("sing a song"))
    assert response.program_text == ""


def test_scene_text_mentions_agents_and_instruction():
    text = make_request("move forward a bit").scene_text()
    assert "Agent robot" in text
    assert "Agent human" in text
    assert "Instruction to robot: move forward a bit" in text
    assert "Path 0:" in text


# --- external synthesizer -------------------------------------------------------


class FakeResponse:
    def __init__(self, payload, status=200):
        self._payload = payload
        self.status_code = status

    def raise_for_status(self):
        if self.status_code >= 400:
            raise httpx.HTTPStatusError("boom", request=None, response=None)

    def json(self):
        return self._payload


def test_external_synthesize_parses_chat_completion(monkeypatch):
    seen = {}

    def fake_post(url, json=None, headers=None, timeout=None):
        seen["url"] = url
        seen["messages"] = json["messages"]
        return FakeResponse({
            "choices": [{"message": {"content": "SelectPath(0)"}}],
            "usage": {"total_tokens": 42},
        })

    monkeypatch.setattr(httpx, "post", fake_post)
    response = external_synthesize(
        make_request("move forward a bit"), {"url": "http://synth.test/v1"}
    )
    assert response.program_text == "SelectPath(0)"
    assert response.token_count == 42
    assert seen["url"] == "http://synth.test/v1"
    assert "Instruction to robot" in seen["messages"][1]["content"]


def test_external_synthesize_retries_then_raises(monkeypatch):
    calls = {"n": 0}

    def fake_post(url, json=None, headers=None, timeout=None):
        calls["n"] += 1
        raise httpx.ConnectError("refused")

    monkeypatch.setattr(httpx, "post", fake_post)
    with pytest.raises(TransportError):
        external_synthesize(make_request("x"), {"url": "http://synth.test/v1"})
    assert calls["n"] == 2


def test_external_synthesizer_requires_url():
    with pytest.raises(ValueError):
        ExternalSynthesizer({"model": "m"})


def test_external_synthesize_sends_bearer_token(monkeypatch):
    seen = {}

    def fake_post(url, json=None, headers=None, timeout=None):
        seen["headers"] = headers
        return FakeResponse({"choices": [{"message": {"content": ""}}]})

    monkeypatch.setattr(httpx, "post", fake_post)
    monkeypatch.setenv("SYNTH_TOKEN", "sekret")
    external_synthesize(
        make_request("x"), {"url": "http://synth.test/v1", "auth_env": "SYNTH_TOKEN"}
    )
    assert seen["headers"]["Authorization"] == "Bearer sekret"


# --- goal inference ---------------------------------------------------------------


def test_infer_goal_prefers_heading_alignment():
    trajectory = [Pose(0, 0, 0), Pose(10, 0, 0), Pose(20, 0, 0)]
    belief = infer_goal_heuristic(
        trajectory, [("door", (100.0, 0.0)), ("couch", (-100.0, 0.0))]
    )
    assert belief.chosen == "door"
    assert belief.scores["door"] > belief.scores["couch"]


def test_infer_goal_keyword_bonus_breaks_near_ties():
    trajectory = [Pose(0, 0, 0), Pose(10, 0, 0)]
    belief = infer_goal_heuristic(
        trajectory,
        [("door", (100.0, 10.0)), ("shelf", (100.0, -10.0))],
        instruction_text="head to the shelf",
    )
    assert belief.chosen == "shelf"


def test_infer_goal_rejects_empty_inputs():
    with pytest.raises(ValueError):
        infer_goal_heuristic([], [("a", (0.0, 0.0))])
    with pytest.raises(ValueError):
        infer_goal_heuristic([Pose(0, 0, 0)], [])
