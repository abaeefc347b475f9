"""Drain the momentum reservoir on the bench and tabulate the decay.

The hull is pinned (shell inertia scaled way up, gravity off) so the
gimbal precesses the rotor axis into the drive axis without the shell
tumbling away under the reaction torque. Expected shape: the gauge
fraction falls monotonically and the usable reaction torque about the
drive axis collapses with it.
"""

import csv
import math
import sys
from dataclasses import replace

import click
import numpy as np

from gyroegg.control import DriveCommand, command_to_gimbal_targets, reservoir_gauge
from gyroegg.dynamics import (
    ActuationInput,
    RobotState,
    dynamics_step,
    gyroscopic_reaction,
    quat_to_matrix,
    rotor_momentum_world,
)
from gyroegg.params import BodyParams, named_params
from gyroegg.rotation import rot_x

DRIVE_AXIS = np.array([0.0, 1.0, 0.0])  # the rolling axis for heading +x
HULL_PIN_FACTOR = 1e6


@click.command()
@click.option("--params", "params_name", default="testsphere", show_default=True)
@click.option("--rpm", type=float, default=3000.0, show_default=True)
@click.option("--duration", type=float, default=8.0, show_default=True, help="Seconds of drive.")
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--csv-out", type=click.Path(dir_okay=False), default=None)
def main(params_name, rpm, duration, dt, csv_out):
    base = named_params(params_name)
    bench = replace(
        base,
        shell=BodyParams(base.shell.mass, base.shell.inertia_com * HULL_PIN_FACTOR),
        gravity=0.0,
    )
    state = RobotState.at_rest(rotor_rate=rpm * 2.0 * math.pi / 60.0)

    rows = []
    steps = int(round(duration / dt))
    for i in range(steps):
        t = i * dt
        command = DriveCommand(forward=1.0, turn=0.0, timestamp=t)
        alpha_rate, beta_rate = command_to_gimbal_targets(command, bench, state, now=t)
        if i % int(round(0.25 / dt)) == 0:
            gauge = reservoir_gauge(bench, state, DRIVE_AXIS)
            rotation = quat_to_matrix(state.orientation)
            gimbal_axis = alpha_rate * (rotation @ np.array([1.0, 0.0, 0.0]))
            gimbal_axis += beta_rate * (
                rotation @ rot_x(state.gimbal.alpha) @ np.array([0.0, 1.0, 0.0])
            )
            reaction = gyroscopic_reaction(rotor_momentum_world(bench, state), gimbal_axis)
            rows.append((t, gauge.fraction, float(reaction @ DRIVE_AXIS)))
        state = dynamics_step(
            bench, state, ActuationInput.rate_targets(alpha_rate, beta_rate), dt=dt, t=t
        )

    click.echo(f"{'t [s]':>8} {'fraction':>10} {'tau_drive [N m]':>16}")
    for t, fraction, tau in rows:
        click.echo(f"{t:8.2f} {fraction:10.4f} {tau:16.4f}")
    if csv_out is not None:
        with open(csv_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_s", "fraction", "tau_drive_nm"])
            writer.writerows(rows)
        click.echo(f"wrote {csv_out}", err=True)

    drained = rows[0][1] - rows[-1][1]
    if drained < 0.5:
        click.echo(f"warning: only drained {drained:.2f} of the reservoir", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
