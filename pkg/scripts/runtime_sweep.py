"""Battery runtime versus rotor speed, both load profiles side by side.

The spin motor dominates the budget, so runtime falls roughly with the
cube of rotor speed (drag torque grows quadratically). The table makes
the tradeoff visible when picking an operating point.
"""

from gyroegg.sensor_power import (
    BatteryPack,
    LoadProfile,
    RegulatorChain,
    runtime_estimate,
)
from gyroegg.transmission import RPM_TO_RAD_S

RPM_POINTS = (1000, 1500, 2000, 2500, 3000, 3500, 4000)


def main():
    pack = BatteryPack()
    chain = RegulatorChain()
    print(f"pack: {pack.nominal_energy_wh:.1f} Wh nominal")
    print(f"{'rpm':>6} {'motor only [min]':>18} {'full actuation [min]':>21}")
    for rpm in RPM_POINTS:
        speed = rpm * RPM_TO_RAD_S
        motor = runtime_estimate(pack, chain, LoadProfile.motor_only(speed))
        full = runtime_estimate(pack, chain, LoadProfile.full_actuation(speed))
        print(f"{rpm:6d} {motor:18.1f} {full:21.1f}")


if __name__ == "__main__":
    main()
