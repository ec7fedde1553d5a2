"""Operator entry point: plan, edit, verify, datagen, eval, serve.

Batch subcommands call the library directly; serve exposes the session
API over HTTP. All outputs are deterministic for fixed seeds and inputs
(sorted JSON keys, no timestamps), so reports are stable golden files.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from typing import Optional

import click

from .datagen import MapGenConfig, gen_dataset, export_dataset
from .dsl import parse, print_program
from .editverify import EditSession, apply_program
from .errors import CapeError
from .geometry import AgentBody, ObstacleMap, Pose, TimedPath
from .pipeline import ExternalSynthesizer, scripted_synthesize
from .planner import CandidateSet, PlannerConfig, multi_candidate_plan
from .sim import Scenario, compute_metrics, make_archetype_scenarios, make_conflict_scenarios, run_episode


def _write_json(path: str, payload) -> None:
    with open(path, "w") as f:
        json.dump(payload, f, sort_keys=True, indent=2)
        f.write("\n")


def _parse_pose(text: str) -> Pose:
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 2:
        return Pose(parts[0], parts[1], 0.0)
    if len(parts) == 3:
        return Pose(parts[0], parts[1], parts[2])
    raise click.BadParameter(f"expected x,y or x,y,theta, got {text!r}")


def _load_synthesizer(synth: str, endpoint_config: Optional[str]):
    if synth == "scripted":
        if endpoint_config:
            raise click.UsageError("--endpoint-config requires --synth external")
        return scripted_synthesize
    if not endpoint_config:
        raise click.UsageError("--synth external requires --endpoint-config")
    with open(endpoint_config) as f:
        return ExternalSynthesizer(json.load(f))


@click.group()
def main():
    """Homotopy-aware planning, path editing, and cooperation evaluation."""


@main.command("plan")
@click.option("--map", "map_path", required=True, type=click.Path(exists=True))
@click.option("--start", required=True, help="x,y[,theta]")
@click.option("--goal", required=True, help="x,y[,theta]")
@click.option("--seed", required=True, type=int)
@click.option("--k", default=3, type=int)
@click.option("--margin", default=0.0, type=float)
@click.option("--radius", default=10.0, type=float)
@click.option("--speed", default=10.0, type=float)
@click.option("--budget", default=8000, type=int)
@click.option("--agent", default="robot")
@click.option("--out", "out_path", default="-", help="output file or - for stdout")
def cmd_plan(map_path, start, goal, seed, k, margin, radius, speed, budget, agent, out_path):
    """Multi-candidate plan on a map file; writes a CandidateSet JSON."""
    obstacle_map = ObstacleMap.load(map_path)
    body = AgentBody(radius=radius, speed=speed)
    candidates = multi_candidate_plan(
        obstacle_map, _parse_pose(start), _parse_pose(goal), body,
        seed=seed, config=PlannerConfig(k=k, margin=margin, budget=budget),
        for_agent=agent,
    )
    payload = candidates.to_json()
    if out_path == "-":
        click.echo(json.dumps(payload, sort_keys=True, indent=2))
    else:
        _write_json(out_path, payload)


def _load_edit_session(session_path: str, no_verify: bool) -> EditSession:
    with open(session_path) as f:
        d = json.load(f)
    return EditSession(
        ObstacleMap.from_json(d["map"]),
        d["target"],
        CandidateSet.from_json(d["candidates"]),
        others={k: TimedPath.from_json(v) for k, v in d.get("others", {}).items()},
        bodies={k: AgentBody.from_json(v) for k, v in d["bodies"].items()},
        margin=d.get("margin", 0.0),
        inter_agent_margin=d.get("inter_agent_margin", 0.0),
        verify_enabled=not no_verify,
    )


@main.command("edit")
@click.option("--session", "session_path", required=True, type=click.Path(exists=True),
              help="JSON with map, target, candidates, bodies, others")
@click.option("--program", "program_path", required=True, type=click.Path(exists=True))
@click.option("--no-verify", is_flag=True, default=False)
@click.option("--out", "out_path", default="-")
def cmd_edit(session_path, program_path, no_verify, out_path):
    """Apply a DSL program file to an editing session; prints the outcome."""
    session = _load_edit_session(session_path, no_verify)
    with open(program_path) as f:
        program = parse(f.read())
    outcome = apply_program(session, program)
    payload = outcome.to_json()
    payload["program_text"] = print_program(program)
    if out_path == "-":
        click.echo(json.dumps(payload, sort_keys=True, indent=2))
    else:
        _write_json(out_path, payload)


@main.command("verify")
@click.option("--session", "session_path", required=True, type=click.Path(exists=True))
@click.option("--program", "program_path", required=True, type=click.Path(exists=True))
def cmd_verify(session_path, program_path):
    """Per-line verdicts for a DSL program, one line each; exit 1 if any
    line is rejected or invalid."""
    session = _load_edit_session(session_path, no_verify=False)
    with open(program_path) as f:
        program = parse(f.read())
    outcome = apply_program(session, program)
    bad = 0
    for v in outcome.line_results:
        line = f"{v.status}"
        if v.reason:
            line += f" {v.reason}"
        if v.detail:
            line += f" {json.dumps(v.detail, sort_keys=True)}"
        click.echo(line)
        if v.status != "accepted":
            bad += 1
    sys.exit(1 if bad else 0)


@main.command("datagen")
@click.option("--seed", required=True, type=int)
@click.option("--maps", "map_count", default=10, type=int)
@click.option("--scenarios-per-map", default=5, type=int)
@click.option("--behaviors", default=None, help="comma-separated subset")
@click.option("--out", "out_dir", required=True, type=click.Path())
def cmd_datagen(seed, map_count, scenarios_per_map, behaviors, out_dir):
    """Generate an instruction/program dataset (records.jsonl + manifest)."""
    from .behaviors import ALL_BEHAVIORS

    behavior_set = tuple(behaviors.split(",")) if behaviors else ALL_BEHAVIORS
    unknown = set(behavior_set) - set(ALL_BEHAVIORS)
    if unknown:
        raise click.BadParameter(f"unknown behaviors: {sorted(unknown)}")
    records = gen_dataset(
        seed=seed, map_count=map_count, behavior_set=behavior_set,
        scenarios_per_map=scenarios_per_map,
    )
    paths = export_dataset(records, out_dir)
    click.echo(json.dumps({"count": len(records), **paths}, sort_keys=True))


def _load_scenarios(scenario_dir, archetype, agents, count, seed):
    if scenario_dir and archetype:
        raise click.UsageError("--scenario-dir and --archetype are mutually exclusive")
    if scenario_dir:
        scenarios = []
        for name in sorted(os.listdir(scenario_dir)):
            if name.endswith(".json"):
                with open(os.path.join(scenario_dir, name)) as f:
                    scenarios.append(Scenario.from_json(json.load(f)))
        if not scenarios:
            raise click.UsageError(f"no scenario JSON files in {scenario_dir}")
        return scenarios
    if archetype == "conflict":
        return make_conflict_scenarios(count, seed, n_agents=agents)
    if archetype:
        return make_archetype_scenarios(archetype, count, seed)
    raise click.UsageError("provide --scenario-dir or --archetype")


@main.command("eval")
@click.option("--scenario-dir", default=None, type=click.Path(exists=True))
@click.option("--archetype", default=None,
              type=click.Choice(["conflict", "parking", "household", "carry"]))
@click.option("--agents", default=2, type=int, help="agent count for conflict scenarios")
@click.option("--count", default=10, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--synth", default="scripted", type=click.Choice(["scripted", "external"]))
@click.option("--endpoint-config", default=None, type=click.Path(exists=True))
@click.option("--single-path", is_flag=True, default=False)
@click.option("--no-verify", is_flag=True, default=False)
@click.option("--planner-only", is_flag=True, default=False,
              help="disable cooperation (baseline)")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "csv"]))
def cmd_eval(scenario_dir, archetype, agents, count, seed, synth, endpoint_config,
             single_path, no_verify, planner_only, out_dir, fmt):
    """Run episodes over a scenario set and write SR/SEL/time/token reports."""
    scenarios = _load_scenarios(scenario_dir, archetype, agents, count, seed)
    synthesizer = _load_synthesizer(synth, endpoint_config)
    results = [
        run_episode(
            s, synthesizer=synthesizer, cooperate=not planner_only,
            single_path=single_path, no_verify=no_verify,
        )
        for s in scenarios
    ]
    metrics = compute_metrics(results)
    os.makedirs(out_dir, exist_ok=True)
    config = {
        "archetype": archetype, "agents": agents, "count": len(scenarios),
        "seed": seed, "synth": synth, "single_path": single_path,
        "no_verify": no_verify, "planner_only": planner_only,
    }
    _write_json(os.path.join(out_dir, "report.json"),
                {"config": config, "metrics": metrics})
    with open(os.path.join(out_dir, "episodes.jsonl"), "w") as f:
        for r in results:
            f.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["SR", "SEL", "Time(s)", "Token"])
        writer.writerow([
            f"{metrics['sr']:.1f}", f"{metrics['sel']:.1f}",
            f"{metrics['mean_wall_time']:.3f}", f"{metrics['mean_tokens']:.1f}",
        ])
        with open(os.path.join(out_dir, "report.csv"), "w") as f:
            f.write(buf.getvalue())
    click.echo(json.dumps(metrics, sort_keys=True))


@main.command("serve")
@click.option("--port", default=8000, type=int)
@click.option("--host", default="127.0.0.1")
def cmd_serve(port, host):
    """Start the session HTTP API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


def _main():
    try:
        main(standalone_mode=True)
    except CapeError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    _main()
