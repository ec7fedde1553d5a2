import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from cape.behaviors import match_instruction
from cape.datagen import (
    DatasetRecord,
    MapGenConfig,
    export_dataset,
    gen_dataset,
    gen_map,
    gen_programs,
    gen_records,
    random_statement,
    sample_free_pose,
)
from cape.dsl import Statement, parse, print_program
from cape.editverify import ACCEPTED, apply_program
from cape.errors import GenerationFailed
from cape.geometry import clearance
from cape.pipeline import scripted_synthesize
from cape.datagen import _connected


# --- map generation ------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), clutter=st.integers(1, 3))
def test_gen_map_properties(seed, clutter):
    config = MapGenConfig(clutter_level=clutter)
    m = gen_map(config, seed)
    lo, hi = config.obstacle_counts[clutter]
    assert lo <= len(m.obstacles) <= hi
    for obs in m.obstacles:
        assert config.size_range[0] <= obs.rect.w <= config.size_range[1]
        assert config.size_range[0] <= obs.rect.h <= config.size_range[1]
        assert 0 <= obs.rect.x and obs.rect.x + obs.rect.w <= m.width
        assert 0 <= obs.rect.y and obs.rect.y + obs.rect.h <= m.height
    assert _connected(m, config.probe_radius)


def test_gen_map_deterministic():
    config = MapGenConfig(clutter_level=2)
    a = gen_map(config, 5)
    b = gen_map(config, 5)
    assert a.to_json() == b.to_json()
    c = gen_map(config, 6)
    assert a.to_json() != c.to_json()


def test_gen_map_corridor_passage_width():
    config = MapGenConfig(structured_kind="corridor", probe_radius=10.0)
    m = gen_map(config, 3)
    names = {o.name for o in m.obstacles}
    assert {"wall_top", "wall_bottom"} <= names
    top = m.obstacle_by_name("wall_top").rect
    bottom = m.obstacle_by_name("wall_bottom").rect
    passage = bottom.y - (top.y + top.h)
    diameter = 2 * config.probe_radius
    assert 2.5 * diameter <= passage <= 4.0 * diameter


def test_gen_map_rejects_unknown_clutter():
    with pytest.raises(ValueError):
        MapGenConfig(clutter_level=9)


def test_gen_map_infeasible_density_fails_cleanly():
    config = MapGenConfig(
        width=100.0, height=100.0,
        obstacle_counts={1: (40, 40)}, size_range=(30.0, 40.0),
        max_attempts=3,
    )
    with pytest.raises(GenerationFailed):
        gen_map(config, 0)


def test_sample_free_pose_respects_clearance():
    m = gen_map(MapGenConfig(clutter_level=3), 11)
    rng = random.Random(0)
    for _ in range(20):
        pose = sample_free_pose(m, rng, radius=10.0)
        assert clearance(m, pose.point) >= 10.0


# --- records -----------------------------------------------------------------------


@pytest.fixture(scope="module")
def records():
    return gen_dataset(seed=42, map_count=2, scenarios_per_map=2)


def test_records_cover_requested_behaviors(records):
    assert records
    behaviors = {r.behavior for r in records}
    assert behaviors <= {
        "movement", "rotation", "path_selection", "obstacle_distance", "wait", "backout",
    }
    assert len(behaviors) >= 4


def test_record_instruction_is_in_grammar(records):
    for r in records:
        matched = match_instruction(r.instruction)
        assert matched is not None
        assert matched[0] == r.behavior


def test_record_gt_program_applies_clean(records):
    for r in records:
        outcome = apply_program(r.context().session(), r.gt_program)
        assert all(v.status == ACCEPTED for v in outcome.line_results)


def test_record_obstacles_within_size_range(records):
    for r in records:
        for obs in r.obstacle_map.obstacles:
            assert 20.0 <= obs.rect.w <= 50.0
            assert 20.0 <= obs.rect.h <= 50.0


def test_record_json_round_trip(records):
    for r in records[:6]:
        again = DatasetRecord.from_json(r.to_json())
        assert again.to_json() == r.to_json()


def test_scripted_synthesizer_closes_the_loop(records):
    # the scripted synthesizer must reproduce gt_program from the record
    from cape.pipeline import SynthesizerRequest

    for r in records[:8]:
        ctx = r.context()
        request = SynthesizerRequest(
            scene={
                "map": r.obstacle_map.to_json(),
                "agents": {
                    aid: {
                        "pose": (r.robot_start if aid == "robot" else r.human_start).to_json(),
                        "goal": (r.robot_goal if aid == "robot" else r.human_goal).to_json(),
                        "radius": body.radius,
                        "speed": body.speed,
                    }
                    for aid, body in r.bodies.items()
                },
            },
            candidates=r.candidates,
            predicted_others={"human": r.human_path},
            instruction=r.instruction,
            target="robot",
            speaker="human",
        )
        response = scripted_synthesize(request)
        assert parse(response.program_text) == r.gt_program


def test_gen_records_deterministic():
    m = gen_map(MapGenConfig(clutter_level=1), 7)
    a = gen_records(m, seed=9, scenarios=1)
    b = gen_records(m, seed=9, scenarios=1)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]


# --- export ----------------------------------------------------------------------------


def test_export_dataset_deterministic_bytes(tmp_path, records):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    p1 = export_dataset(records, str(d1))
    p2 = export_dataset(records, str(d2))
    for key in ("records", "manifest"):
        with open(p1[key], "rb") as f1, open(p2[key], "rb") as f2:
            assert f1.read() == f2.read()


def test_export_manifest_totals(tmp_path, records):
    paths = export_dataset(records, str(tmp_path / "out"))
    with open(paths["manifest"]) as f:
        manifest = json.load(f)
    assert manifest["count"] == len(records)
    assert sum(manifest["behaviors"].values()) == len(records)
    assert sum(manifest["clutter_levels"].values()) == len(records)
    with open(paths["records"]) as f:
        lines = [json.loads(line) for line in f]
    assert len(lines) == len(records)
    for line in lines:
        DatasetRecord.from_json(line)


def test_export_empty_fails():
    with pytest.raises(ValueError):
        export_dataset([], "/tmp/nowhere")


# --- program fuzz corpus -------------------------------------------------------------------


def test_gen_programs_deterministic_and_parseable():
    a = gen_programs(seed=1, count=50)
    b = gen_programs(seed=1, count=50)
    assert a == b
    for program in a:
        assert parse(print_program(program)) == program


def test_random_statement_is_statement():
    rng = random.Random(3)
    for _ in range(100):
        assert isinstance(random_statement(rng), Statement)
