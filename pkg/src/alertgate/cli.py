"""Command line entry points: the long-running service and the simulator."""

from __future__ import annotations

import json
import sys
import threading
from pathlib import Path

import click

from .clock import SystemClock
from .config import load_config
from .gateway import Gateway
from .simulator import (
    assertions_passed,
    report_to_bytes,
    run_simulation,
    spec_from_files,
)
from .store import FileStore


@click.group()
def main() -> None:
    """User-aware alert and notification gateway."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--listen", default="127.0.0.1:8080", show_default=True)
@click.option(
    "--data-dir",
    type=click.Path(file_okay=False),
    default="./alertgate-data",
    show_default=True,
)
def serve(config_path: str | None, listen: str, data_dir: str) -> None:
    """Run the HTTP service over a durable store."""
    import uvicorn

    from .http_api import create_app

    cfg = load_config(config_path)
    Path(data_dir).mkdir(parents=True, exist_ok=True)
    store = FileStore(data_dir)
    gateway = Gateway(cfg, store)
    recovered = gateway.recover()
    click.echo(
        f"recovered {recovered['replayed']} records, "
        f"completed {recovered['completed']} interrupted steps"
    )
    clock = SystemClock()

    def tick_forever() -> None:
        while True:
            gateway.tick(clock.now())
            clock.sleep(1.0)

    threading.Thread(target=tick_forever, daemon=True).start()
    host, _, port = listen.rpartition(":")
    uvicorn.run(create_app(gateway, clock), host=host or "127.0.0.1", port=int(port))


@main.command()
@click.option("--workload", "workload_path", type=click.Path(exists=True), default=None)
@click.option("--users", "users_path", type=click.Path(exists=True), default=None)
@click.option(
    "--mode",
    type=click.Choice(["baseline", "learned"]),
    default="baseline",
    show_default=True,
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default="report.json", show_default=True)
@click.option("--scenario", "scenario_path", type=click.Path(exists=True), default=None)
def simulate(
    workload_path: str | None,
    users_path: str | None,
    mode: str,
    seed: int,
    out_path: str,
    scenario_path: str | None,
) -> None:
    """Run a deterministic simulation and write its report.

    Exits zero only when every assertion in the run passes.
    """
    try:
        spec = spec_from_files(workload_path, users_path, mode, seed, scenario_path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise click.ClickException(str(exc))
    report, _ = run_simulation(spec)
    Path(out_path).write_bytes(report_to_bytes(report))
    m = report["metrics"]
    click.echo(f"run: {report['name']} mode={report['mode']} seed={report['seed']}")
    click.echo(
        f"  events={report['counts']['events']}"
        f" alerts={report['counts']['alerts']}"
        f" notifications={report['counts']['notifications']}"
    )
    for key in sorted(m):
        click.echo(f"  {key}={m[key]}")
    for result in report["assertions"]:
        status = "PASS" if result["passed"] else "FAIL"
        click.echo(f"  [{status}] {result['kind']}: {result['detail']}")
    if not report["conservation"]["balanced"]:
        click.echo("  [FAIL] conservation: issued + digest members + suppressed != classified")
        sys.exit(1)
    sys.exit(0 if assertions_passed(report) else 1)


if __name__ == "__main__":
    main()
