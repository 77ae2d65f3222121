"""Command-line front end.

Batch subcommands (experiment, postures, layout, replay) drive the engine
in-process so runs are reproducible without a server; `serve` starts the
long-running demo service that the browser UI and headless protocol clients
connect to.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .adaptation import Band
from .errors import GauiError
from .experiment import (
    ExperimentPlan,
    postures_csv_text,
    run_experiment,
    run_postures,
    write_experiment_outputs,
)
from .geometry import DEFAULT_PROFILE, DisplayProfile
from .layout import Playlist, layout_for_band
from .session import replay_trace
from .simuser import GazeNoiseModel, PostureProfile, SearchModel


def _load_profile(path: str | None) -> DisplayProfile:
    if path is None:
        return DEFAULT_PROFILE
    return DisplayProfile.from_json(Path(path))


def _load_json(path: str | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text())


@click.group()
def main() -> None:
    """Distance-adaptive gaze-dwell engine: simulation harness and demo service."""


@main.command()
@click.option("--plan", "plan_path", type=click.Path(exists=True), help="Plan JSON (interfaces, bands, difficulties, reps, base_seed).")
@click.option("--profile", "profile_path", type=click.Path(exists=True), help="Display profile JSON.")
@click.option("--sim", "sim_path", type=click.Path(exists=True), help="Simulation parameters JSON ({noise: {...}, search: {...}}).")
@click.option("--out", "out_dir", type=click.Path(), default="results", show_default=True)
@click.option("--seed", type=int, default=None, help="Override the plan's base seed.")
def experiment(plan_path, profile_path, sim_path, out_dir, seed) -> None:
    """Run the factorial simulated-user experiment and write CSV/JSON outputs."""
    plan_doc = _load_json(plan_path)
    if seed is not None:
        plan_doc["base_seed"] = seed
    plan = ExperimentPlan.from_json(plan_doc)
    sim_doc = _load_json(sim_path)
    noise = GazeNoiseModel.from_json(sim_doc.get("noise", {}))
    search = SearchModel.from_json(sim_doc.get("search", {}))
    try:
        result = run_experiment(plan, noise, search, profile=_load_profile(profile_path))
        paths = write_experiment_outputs(result, Path(out_dir))
    except (OSError, GauiError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"{len(result.rows)} trials -> {paths['trials_csv']}")
    click.echo(f"summary -> {paths['summary_csv']}, {paths['summary_json']}")


@main.command()
@click.option("--profiles", "profiles_path", type=click.Path(exists=True), help="Posture profiles JSON (list of profile docs).")
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default="postures.csv", show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--duration-ms", type=int, default=120_000, show_default=True)
def postures(profiles_path, reps, out_path, seed, duration_ms) -> None:
    """Simulate adaptive posture sessions; report switch counts and distances."""
    profiles = None
    if profiles_path is not None:
        docs = json.loads(Path(profiles_path).read_text())
        profiles = {doc["name"]: PostureProfile.from_json(doc) for doc in docs}
    try:
        summaries = run_postures(profiles=profiles, reps=reps, base_seed=seed, duration_ms=duration_ms)
        Path(out_path).write_text(postures_csv_text(summaries))
    except (OSError, GauiError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for s in summaries:
        click.echo(
            f"{s.posture}: {s.switches_mean:.2f} switches (sd {s.switches_sd:.2f}), "
            f"median {s.median_cm:.1f} cm"
        )
    click.echo(f"-> {out_path}")


@main.command()
@click.option("--band", type=click.Choice([b.value for b in Band]), required=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True))
@click.option("--tracks", type=int, default=None, help="Playlist length (defaults to the built-in 30).")
def layout(band, profile_path, tracks) -> None:
    """Print the paginated layout for a size band as JSON."""
    playlist = Playlist()
    if tracks is not None:
        playlist = Playlist(tuple(f"Track{i + 1}" for i in range(tracks)))
    model = layout_for_band(Band(band), _load_profile(profile_path), playlist)
    click.echo(model.to_json_str())


@main.command()
@click.option("--trace", "trace_path", type=click.Path(exists=True), required=True)
def replay(trace_path) -> None:
    """Re-run a recorded gaze trace and print the session events."""
    try:
        record = replay_trace(Path(trace_path).read_text().splitlines())
    except (OSError, GauiError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(json.dumps({"config": record.config.to_json(), "outcome": record.outcome.value}))
    for event in record.events:
        click.echo(event.to_json_line())


@main.command()
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(), default="frontend", show_default=True,
              help="Static demo UI directory (index.html + dist/), mounted at / when present.")
def serve(port, host, ui_dir) -> None:
    """Serve the demo protocol (WebSocket /ws) and REST API."""
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=Path(ui_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
