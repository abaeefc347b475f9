"""Scripted slalom: alternate the turn command and watch the ground track.

Runs the resting test sphere through forward drive with the turn input
flipping sign every couple of seconds, writes the usual jsonl/csv logs
next to this script, and prints a coarse ground-track table plus the
total path length. Good smoke test that steering actually steers.
"""

import os

import numpy as np

from gyroegg.contact import GroundPlane
from gyroegg.control import DriveCommand
from gyroegg.harness import resting_state_on, run_scenario
from gyroegg.params import named_params
from gyroegg.scenario import ScenarioConfig
from gyroegg.sensor_power import DEFAULT_ROTOR_SPEED

SEGMENT_S = 2.0
SEGMENTS = 4
OUT_DIR = os.path.join(os.path.dirname(__file__), "out")


def slalom_script():
    commands = []
    for k in range(SEGMENTS):
        turn = 0.6 if k % 2 == 0 else -0.6
        t0 = k * SEGMENT_S
        # re-issue inside each segment so the command never goes stale
        for j in range(int(SEGMENT_S / 0.1)):
            commands.append(DriveCommand(forward=1.0, turn=turn, timestamp=t0 + 0.1 * j))
    return tuple(commands)


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    params = named_params("testsphere")
    config = ScenarioConfig(
        params_name="testsphere",
        initial=resting_state_on(params, GroundPlane(), rotor_rate=DEFAULT_ROTOR_SPEED),
        commands=slalom_script(),
        duration_s=SEGMENTS * SEGMENT_S,
        dt_s=1e-3,
        seed=4,
        log_path=os.path.join(OUT_DIR, "slalom.jsonl"),
        csv_path=os.path.join(OUT_DIR, "slalom.csv"),
    )
    result = run_scenario(config)

    track = np.array([f.position_m for f in result.log.frames])
    print(f"{'t [s]':>7} {'x [m]':>8} {'y [m]':>8}")
    for frame in result.log.frames[:: len(result.log.frames) // 16]:
        print(f"{frame.time_s:7.2f} {frame.position_m[0]:8.3f} {frame.position_m[1]:8.3f}")
    path = float(np.sum(np.linalg.norm(np.diff(track[:, :2], axis=0), axis=1)))
    print(f"\n{result.reason}; path length {path:.2f} m over {config.duration_s:.0f} s")
    print(f"logs in {OUT_DIR}/")


if __name__ == "__main__":
    main()
