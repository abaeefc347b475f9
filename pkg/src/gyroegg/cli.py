"""Command line front end: run scenarios, serve teleop, print reports."""

import asyncio
import math
import os
import sys
from dataclasses import replace

import click

from .scenario import load_scenario
from .sensor_power import (
    BatteryPack,
    LoadProfile,
    RegulatorChain,
    runtime_estimate,
)
from .transmission import (
    GearTrainSpec,
    bevel_gear_diameters,
    ideal_gear_ratio,
    select_tooth_counts,
)


@click.group()
def main():
    """Simulator and teleop stack for the gyro-driven rolling robot."""


@main.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory receiving run.jsonl and run.csv.")
def run(config_file, seed, out):
    """Run a scripted scenario and write its log."""
    from .harness import run_scenario

    config = load_scenario(config_file)
    if seed is not None:
        config = replace(config, seed=seed)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        config = replace(
            config,
            log_path=os.path.join(out, "run.jsonl"),
            csv_path=os.path.join(out, "run.csv"),
        )
    result = run_scenario(config)
    final = result.final_state
    click.echo(f"{result.reason}; {len(result.log.frames)} frames")
    click.echo(
        "final position [m]: "
        + " ".join(f"{v: .4f}" for v in final.position)
    )
    if config.log_path is not None:
        click.echo(f"log: {config.log_path}")
    sys.exit(result.exit_code)


@main.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--port", type=int, required=True)
def serve(config_file, port):
    """Serve a scenario live over WebSocket for cockpit clients."""
    from .teleop import serve_teleop

    config = load_scenario(config_file)
    click.echo(f"serving on port {port} for {config.duration_s:.0f} s")
    asyncio.run(serve_teleop(config, port))


@main.group()
def report():
    """Printable design tables."""


@report.command()
@click.option("--radius", type=float, default=GearTrainSpec().pitch_circle_radius_m,
              show_default=True, help="Gear-set pitch circle radius in m.")
def gears(radius):
    """Bevel-gear geometry and tooth selection table."""
    spec = GearTrainSpec()
    big_d, small_d = bevel_gear_diameters(radius)
    ideal = ideal_gear_ratio()
    searched = select_tooth_counts(ideal, max_teeth=spec.teeth_big)
    rows = [
        ("tan(pi/16)", math.tan(math.pi / 16.0)),
        ("tan(pi/8)", math.tan(math.pi / 8.0)),
        (f"big gear pitch diameter @ r={radius:g} [m]", big_d),
        (f"small gear pitch diameter @ r={radius:g} [m]", small_d),
        ("ideal ratio small/big", ideal),
        (f"chosen teeth {spec.teeth_big}:{spec.teeth_small}", spec.tooth_ratio),
        (f"search best {searched[0]}:{searched[1]}", searched[1] / searched[0]),
    ]
    for label, value in rows:
        click.echo(f"{label:42s} {value:.6f}")


@report.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
def power(config_file):
    """Runtime estimates for the configured rotor speed."""
    config = load_scenario(config_file)
    pack = BatteryPack()
    chain = RegulatorChain()
    speed = abs(config.initial.rotor_rate)
    click.echo(f"pack: {pack.nominal_energy_wh:.2f} Wh nominal, {pack.voltage:.1f} V full")
    for label, load in (
        ("spin motor only", LoadProfile.motor_only(speed)),
        ("full actuation", LoadProfile.full_actuation(speed)),
    ):
        minutes = runtime_estimate(pack, chain, load)
        shown = "unbounded" if math.isinf(minutes) else f"{minutes:6.1f} min"
        click.echo(f"{label:18s} {shown}")


if __name__ == "__main__":
    main()
