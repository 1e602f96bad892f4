"""Command line entry points: validate airports, run scenarios, serve."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .airport import load_airport
from .errors import ParseError, ValidationError
from .gateway import Engine, create_app
from .simulator import (
    DEFAULT_MAX_TICKS,
    EventKind,
    events_to_jsonl,
    load_scenario,
    run_scenario,
)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc}", err=True)
        sys.exit(2)


def _load_model(path: str):
    try:
        return load_airport(_read(path))
    except ValidationError as exc:
        for violation in exc.violations:
            click.echo(violation, err=True)
        sys.exit(2)
    except ParseError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)


@click.group()
def main() -> None:
    """Detect conflicting runway clearances on the airport surface."""


@main.command()
@click.argument("airport")
def validate(airport: str) -> None:
    """Check an airport file; exit 2 with the violations if unsound."""
    model = _load_model(airport)
    click.echo(f"ok: {len(model.segments)} segments, {len(model.runways)} runways")


@main.command()
@click.argument("airport")
@click.argument("scenario")
@click.option("--max-ticks", default=DEFAULT_MAX_TICKS, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the event log here instead of stdout.")
def run(airport: str, scenario: str, max_ticks: int, out: str | None) -> None:
    """Run a scenario headless; exit 3 if any error events occurred."""
    model = _load_model(airport)
    try:
        commands = load_scenario(_read(scenario))
    except ParseError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    events = run_scenario(model, commands, max_ticks)
    log = events_to_jsonl(events)
    if out is None:
        click.echo(log, nl=False)
    else:
        Path(out).write_text(log)
    if any(e.kind is EventKind.ERROR for e in events):
        sys.exit(3)


@main.command()
@click.argument("airport")
@click.option("--port", default=8700, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--scenario", default=None, help="Scenario whose commands run as the session steps.")
def serve(airport: str, port: int, host: str, scenario: str | None) -> None:
    """Serve the airport over a WebSocket for console sessions."""
    import uvicorn

    model = _load_model(airport)
    commands = None
    if scenario is not None:
        try:
            commands = load_scenario(_read(scenario))
        except ParseError as exc:
            click.echo(str(exc), err=True)
            sys.exit(2)
    engine = Engine(model, commands)
    uvicorn.run(create_app(engine), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
