import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gyroegg.transmission import (
    Convention,
    GearTrainSpec,
    GimbalAngles,
    RotorDrive,
    ServoAngles,
    ServoModel,
    bevel_gear_diameters,
    gimbal_to_servo,
    gimbal_torques_for_servo_torques,
    ideal_gear_ratio,
    rotor_speed_control,
    select_tooth_counts,
    servo_rates_for_gimbal_rates,
    servo_step,
    servo_to_gimbal,
    wrap_angle,
)

# stay clear of the wrap seam at +/- pi so round trips are exact
servo_angle = st.floats(-3.0, 3.0, allow_nan=False)
servo_rate = st.floats(-20.0, 20.0, allow_nan=False)

SPEC_OUTER = GearTrainSpec()
SPEC_INNER = GearTrainSpec(convention=Convention.SUM_TO_INNER)


class TestAngleMap:
    def test_zero_maps_to_zero(self):
        g = servo_to_gimbal(ServoAngles(0.0, 0.0), SPEC_OUTER)
        assert g.alpha == 0.0 and g.beta == 0.0
        assert g.alpha_rate == 0.0 and g.beta_rate == 0.0

    def test_equal_servo_motion_is_pure_outer(self):
        g = servo_to_gimbal(ServoAngles(0.7, 0.7), SPEC_OUTER)
        assert g.alpha == pytest.approx(0.7, abs=1e-15)
        assert g.beta == 0.0

    def test_printed_matrix_example(self):
        g1, g2 = math.radians(60.0), math.radians(20.0)
        g = servo_to_gimbal(ServoAngles(g1, g2), SPEC_OUTER)
        assert g.alpha == pytest.approx(math.radians(40.0), abs=1e-12)
        assert g.beta == pytest.approx(math.radians(20.0), abs=1e-12)

    def test_conventions_swap_which_row_vanishes(self):
        # equal motions: outer-sum convention leaves beta at zero;
        # opposite motions: it leaves alpha at zero. The other
        # convention swaps the two cases.
        equal = ServoAngles(0.31, 0.31)
        opposite = ServoAngles(0.31, -0.31)
        for spec, zero_on_equal in ((SPEC_OUTER, "beta"), (SPEC_INNER, "alpha")):
            ge = servo_to_gimbal(equal, spec)
            go = servo_to_gimbal(opposite, spec)
            if zero_on_equal == "beta":
                assert abs(ge.beta) < 1e-15 and abs(ge.alpha) > 0.1
                assert abs(go.alpha) < 1e-15 and abs(go.beta) > 0.1
            else:
                assert abs(ge.alpha) < 1e-15 and abs(ge.beta) > 0.1
                assert abs(go.beta) < 1e-15 and abs(go.alpha) > 0.1

    def test_inner_drive_ratio_scales_only_beta(self):
        spec = GearTrainSpec(inner_drive_ratio=23.0 / 48.0)
        base = servo_to_gimbal(ServoAngles(0.4, -0.1), SPEC_OUTER)
        scaled = servo_to_gimbal(ServoAngles(0.4, -0.1), spec)
        assert scaled.alpha == base.alpha
        assert scaled.beta == pytest.approx(base.beta * 23.0 / 48.0, rel=1e-15)

    @settings(max_examples=300)
    @given(servo_angle, servo_angle, servo_rate, servo_rate)
    def test_round_trip_recovers_servos(self, g1, g2, r1, r2):
        for spec in (SPEC_OUTER, SPEC_INNER, GearTrainSpec(inner_drive_ratio=0.479167)):
            servos = ServoAngles(g1, g2, r1, r2)
            back = gimbal_to_servo(servo_to_gimbal(servos, spec), spec)
            assert abs(back.gamma_s1 - g1) < 1e-12
            assert abs(back.gamma_s2 - g2) < 1e-12
            assert abs(back.gamma_s1_rate - r1) < 1e-10
            assert abs(back.gamma_s2_rate - r2) < 1e-10

    def test_round_trip_ten_thousand_pairs(self):
        rng = np.random.default_rng(7)
        pairs = rng.uniform(-3.0, 3.0, size=(10_000, 2))
        for spec in (SPEC_OUTER, SPEC_INNER):
            worst = 0.0
            for g1, g2 in pairs:
                back = gimbal_to_servo(servo_to_gimbal(ServoAngles(g1, g2), spec), spec)
                worst = max(worst, abs(back.gamma_s1 - g1), abs(back.gamma_s2 - g2))
            assert worst < 1e-12

    def test_rate_map_matches_angle_map(self):
        # the linkage is linear, so rates transform exactly like angles
        g1, g2 = servo_rates_for_gimbal_rates(0.8, -0.3, SPEC_OUTER)
        g = servo_to_gimbal(ServoAngles(g1, g2), SPEC_OUTER)
        assert g.alpha == pytest.approx(0.8, abs=1e-14)
        assert g.beta == pytest.approx(-0.3, abs=1e-14)

    @settings(max_examples=100)
    @given(servo_rate, servo_rate, servo_rate, servo_rate)
    def test_torque_map_conserves_power(self, t1, t2, r1, r2):
        # servo-side power equals gimbal-side power for any rates
        for spec in (SPEC_OUTER, GearTrainSpec(inner_drive_ratio=0.5)):
            g = servo_to_gimbal(ServoAngles(0.0, 0.0, r1, r2), spec)
            ta, tb = gimbal_torques_for_servo_torques(t1, t2, spec)
            p_servo = t1 * r1 + t2 * r2
            p_gimbal = ta * g.alpha_rate + tb * g.beta_rate
            assert abs(p_servo - p_gimbal) < 1e-9 * (1.0 + abs(p_servo))


class TestWrap:
    def test_wrap_half_open_interval(self):
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(3.0 * math.pi) == pytest.approx(math.pi)
        assert wrap_angle(0.1 + 4.0 * math.pi) == pytest.approx(0.1, abs=1e-12)

    def test_dataclasses_wrap_on_construction(self):
        g = GimbalAngles(2.0 * math.pi + 0.25, -2.0 * math.pi - 0.25)
        assert g.alpha == pytest.approx(0.25, abs=1e-12)
        assert g.beta == pytest.approx(-0.25, abs=1e-12)


class TestBevelGeometry:
    def test_cone_tangents(self):
        big, small = bevel_gear_diameters(1.0)
        assert big / 2.0 == pytest.approx(0.414213, abs=1e-6)
        assert small / 2.0 == pytest.approx(0.198912, abs=1e-6)

    def test_frozen_diameters_unit_radius(self):
        big, small = bevel_gear_diameters(1.0)
        assert big == pytest.approx(0.8284271247461901, rel=1e-14)
        assert small == pytest.approx(0.397824734759316, rel=1e-14)

    def test_ideal_ratio(self):
        assert ideal_gear_ratio() == pytest.approx(0.480217, abs=1e-6)
        big, small = bevel_gear_diameters(0.08)
        assert small / big == pytest.approx(ideal_gear_ratio(), rel=1e-14)

    def test_chosen_teeth_sit_close_to_ideal(self):
        assert 23.0 / 48.0 == pytest.approx(0.479167, abs=1e-6)
        assert abs(23.0 / 48.0 - ideal_gear_ratio()) / ideal_gear_ratio() < 0.0025

    @settings(max_examples=100)
    @given(st.floats(1e-3, 10.0))
    def test_diameters_scale_linearly_with_radius(self, r):
        big1, small1 = bevel_gear_diameters(1.0)
        big, small = bevel_gear_diameters(r)
        assert big == pytest.approx(r * big1, rel=1e-14)
        assert small == pytest.approx(r * small1, rel=1e-14)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            bevel_gear_diameters(0.0)
        with pytest.raises(ValueError):
            bevel_gear_diameters(-0.1)


class TestToothSelection:
    def test_exact_half_picks_two_one(self):
        assert select_tooth_counts(0.5, 10) == (2, 1)

    def test_cone_ratio_minimizer(self):
        # brute-force oracle over all coprime pairs gives 12/25
        assert select_tooth_counts(ideal_gear_ratio(), 48) == (25, 12)
        assert select_tooth_counts(ideal_gear_ratio(), 100) == (25, 12)

    def test_never_worse_than_the_built_pair(self):
        built_err = abs(23.0 / 48.0 - ideal_gear_ratio())
        for max_teeth in (48, 60, 75, 100):
            big, small = select_tooth_counts(ideal_gear_ratio(), max_teeth)
            assert math.gcd(big, small) == 1
            assert abs(small / big - ideal_gear_ratio()) <= built_err

    @settings(max_examples=150)
    @given(st.floats(0.05, 0.95), st.integers(8, 60))
    def test_matches_exhaustive_search(self, ideal, max_teeth):
        big, small = select_tooth_counts(ideal, max_teeth)
        assert math.gcd(big, small) == 1
        assert 0 < small < big <= max_teeth
        best = min(
            abs(s / b - ideal)
            for b in range(2, max_teeth + 1)
            for s in range(1, b)
            if math.gcd(b, s) == 1
        )
        assert abs(small / big - ideal) == pytest.approx(best, abs=1e-15)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            select_tooth_counts(0.0, 48)
        with pytest.raises(ValueError):
            select_tooth_counts(1.0, 48)
        with pytest.raises(ValueError):
            select_tooth_counts(0.5, 7)


class TestGearTrainSpec:
    def test_default_matches_hardware(self):
        assert SPEC_OUTER.teeth_big == 48
        assert SPEC_OUTER.teeth_small == 23
        assert SPEC_OUTER.tooth_ratio == pytest.approx(0.479167, abs=1e-6)

    def test_rejects_shared_tooth_factor(self):
        with pytest.raises(ValueError):
            GearTrainSpec(teeth_big=48, teeth_small=24)

    def test_rejects_ratio_far_from_cone_geometry(self):
        with pytest.raises(ValueError):
            GearTrainSpec(teeth_big=48, teeth_small=31)


class TestServoModel:
    def test_holds_inside_deadband(self):
        model = ServoModel()
        angle, torque = servo_step(model, 0.5, 0.5 + 5e-5, dt=0.01)
        assert angle == 0.5
        assert torque == 0.0

    def test_rate_saturation(self):
        # a far target moves the servo exactly max_speed*dt at full torque
        model = ServoModel(max_speed=4.0, max_torque=8.0)
        angle, torque = servo_step(model, 0.0, 2.0, dt=0.125)
        assert angle == pytest.approx(0.5, rel=1e-12)
        assert torque == pytest.approx(8.0, rel=1e-12)

    def test_settles_within_five_time_constants(self):
        model = ServoModel(position_gain=20.0)
        angle = 0.0
        dt = 1e-3
        steps = int(round(5.0 / model.position_gain / dt))
        for _ in range(steps):
            angle, _ = servo_step(model, angle, 0.3, dt)
        assert abs(angle - 0.3) < 0.02 * 0.3

    @settings(max_examples=200)
    @given(
        st.floats(-3.0, 3.0),
        st.floats(-3.0, 3.0),
        st.floats(1e-4, 0.1),
    )
    def test_step_and_torque_never_exceed_limits(self, current, target, dt):
        model = ServoModel()
        angle, torque = servo_step(model, current, target, dt)
        assert abs(angle - current) <= model.max_speed * dt * (1.0 + 1e-12)
        assert abs(torque) <= model.max_torque * (1.0 + 1e-12)
        # motion is always toward the target
        if angle != current:
            assert math.copysign(1.0, angle - current) == math.copysign(1.0, target - current)

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            servo_step(ServoModel(), 0.0, 1.0, 0.0)


class TestRotorDrive:
    def test_zero_error_zero_torque(self):
        drive = RotorDrive(target_speed=314.0)
        assert rotor_speed_control(drive, 314.0) == 0.0

    def test_torque_sign_restores_speed(self):
        drive = RotorDrive(target_speed=314.0, speed_gain=0.5, max_torque=2.0)
        assert rotor_speed_control(drive, 313.0) == pytest.approx(0.5)
        assert rotor_speed_control(drive, 315.0) == pytest.approx(-0.5)

    def test_clamps_to_drive_limit(self):
        drive = RotorDrive(target_speed=314.0, speed_gain=0.5, max_torque=2.0)
        assert rotor_speed_control(drive, 0.0) == 2.0
        assert rotor_speed_control(drive, 1000.0) == -2.0

    def test_default_setpoint_is_3000_rpm(self):
        assert RotorDrive().target_speed == pytest.approx(3000.0 * 2.0 * math.pi / 60.0)
