import math

import numpy as np
import pytest

from pwt.omniwheg.config import RobotParams, WheelGeometry
from pwt.omniwheg.entity import BodyTwist, LateralDirection, WheelMode, WheelState
from pwt.omniwheg.errors import DomainError, ModeError
from pwt.omniwheg.geometry import wrap_phase
from pwt.omniwheg.kinematics import (
    align_iteratively,
    alignment_correction,
    analytic_displacement,
    apply_slip,
    common_frame,
    forward_mix,
    inverse_mix,
    is_aligned,
    max_alignment_displacement,
)

GEOMETRY = WheelGeometry()
PARAMS = RobotParams()
ONE_DEGREE = math.radians(1.0)


def test_alignment_at_half_pitch():
    command = alignment_correction(0.0, math.radians(45), GEOMETRY)
    assert command.delta_x == pytest.approx(0.0373, abs=1e-4)
    assert command.delta_theta_wheel == pytest.approx(math.radians(22.5))
    assert command.direction is LateralDirection.LEFT
    assert command.signed_dx == pytest.approx(command.delta_x)


def test_alignment_without_difference():
    command = alignment_correction(1.2, 1.2, GEOMETRY)
    assert command.delta_x == 0.0
    assert command.signed_dx == 0.0


def test_alignment_moves_right_for_negative_difference():
    command = alignment_correction(math.radians(30), 0.0, GEOMETRY)
    assert command.direction is LateralDirection.RIGHT
    assert command.delta_x == pytest.approx(0.095 * math.radians(15))
    assert command.signed_dx < 0


def test_alignment_uses_lobe_symmetry():
    # 100 度与 10 度相差一个叶片周期
    wide = alignment_correction(0.0, math.radians(100), GEOMETRY)
    narrow = alignment_correction(0.0, math.radians(10), GEOMETRY)
    assert wide.delta_x == pytest.approx(narrow.delta_x)


def test_commanded_displacement_bound():
    rng = np.random.default_rng(7)
    limit = max_alignment_displacement(GEOMETRY)
    assert limit == pytest.approx(0.0373, abs=1e-4)
    for left, right in rng.uniform(-10, 10, size=(10_000, 2)):
        command = alignment_correction(float(left), float(right), GEOMETRY)
        assert command.delta_x <= limit + 1e-12


def test_alignment_correction_properties():
    rng = np.random.default_rng(11)
    quarter = math.pi / 2
    pairs = rng.uniform(-10, 10, size=(2_000, 2))
    shifts = rng.integers(-3, 4, size=2_000)
    for (left, right), k in zip(pairs, shifts):
        left, right = float(left), float(right)
        expected = math.remainder(right - left, quarter)
        # 差值落在半周期边界附近时折算方向不唯一
        if abs(abs(expected) - quarter / 2) < 1e-9 or abs(expected) < 1e-9:
            continue
        command = alignment_correction(left, right, GEOMETRY)
        assert abs(command.delta_theta_wheel - expected / 2) <= 1e-12
        assert abs(command.delta_x - GEOMETRY.r_wheel * abs(expected) / 2) <= 1e-12

        shifted = alignment_correction(left, right + int(k) * quarter, GEOMETRY)
        assert abs(shifted.delta_theta_wheel - command.delta_theta_wheel) <= 1e-12
        assert abs(shifted.delta_x - command.delta_x) <= 1e-12
        assert shifted.direction is command.direction

        delta = command.delta_theta_wheel
        residual = wrap_phase((right - delta) - (left + delta), quarter)
        assert abs(residual) <= 1e-9


def test_iterative_alignment_with_slip():
    rng = np.random.default_rng(11)
    for left, right in rng.uniform(-math.pi, math.pi, size=(10_000, 2)):
        trace = align_iteratively(float(left), float(right), GEOMETRY, 0.08)
        assert trace.aligned
        assert abs(trace.residual) < ONE_DEGREE
        assert trace.total_commanded <= 0.045
        assert len(trace.commanded) <= 3


def test_iterative_alignment_without_slip_is_one_round():
    trace = align_iteratively(0.0, math.radians(40), GEOMETRY, 0.0)
    assert len(trace.commanded) == 1
    assert trace.residual == pytest.approx(0.0, abs=1e-12)


def test_iterative_alignment_gives_up_after_rounds():
    trace = align_iteratively(0.0, math.radians(45), GEOMETRY, 0.9)
    assert len(trace.commanded) == 3
    assert not trace.aligned


def test_achieved_never_exceeds_analytic():
    for degree in range(-45, 46):
        difference = math.radians(degree)
        analytic = analytic_displacement(difference, GEOMETRY)
        command = alignment_correction(0.0, difference, GEOMETRY)
        achieved = abs(apply_slip(command.signed_dx, 0.08))
        assert achieved <= analytic + 1e-15
        assert command.delta_x == pytest.approx(analytic, abs=1e-15)


def test_apply_slip_rejects_coefficient():
    assert apply_slip(0.04, 0.0) == 0.04
    with pytest.raises(DomainError):
        apply_slip(0.04, 1.0)
    with pytest.raises(DomainError):
        apply_slip(0.04, -0.1)


def test_is_aligned_tolerance():
    assert is_aligned(0.0, math.radians(0.5), GEOMETRY)
    assert not is_aligned(0.0, math.radians(1.5), GEOMETRY)
    assert is_aligned(0.0, math.pi / 2, GEOMETRY)


def test_mixer_roundtrip():
    rng = np.random.default_rng(3)
    for vx, vy, omega in rng.uniform(-2, 2, size=(100, 3)):
        twist = BodyTwist(float(vx), float(vy), float(omega))
        result = forward_mix(inverse_mix(twist, GEOMETRY, PARAMS), GEOMETRY, PARAMS)
        assert result.vx == pytest.approx(twist.vx, abs=1e-9)
        assert result.vy == pytest.approx(twist.vy, abs=1e-9)
        assert result.omega == pytest.approx(twist.omega, abs=1e-9)


def test_pure_lateral_sign_structure():
    speeds = inverse_mix(BodyTwist(vx=0.095), GEOMETRY, PARAMS)
    assert speeds.as_tuple() == pytest.approx((1.0, -1.0, 1.0, -1.0))


def test_pure_forward_rolls_all_wheels_forward():
    speeds = inverse_mix(BodyTwist(vy=0.095), GEOMETRY, PARAMS)
    assert common_frame(speeds).as_tuple() == pytest.approx((1.0, 1.0, 1.0, 1.0))


def test_yaw_turns_sides_oppositely():
    speeds = common_frame(inverse_mix(BodyTwist(omega=1.0), GEOMETRY, PARAMS))
    fl, fr, rl, rr = speeds
    assert fl == pytest.approx(rl)
    assert fr == pytest.approx(rr)
    assert fl == pytest.approx(-fr)


def test_mixer_needs_wheeled_mode():
    wheels = [WheelState(0.0)] * 3 + [
        WheelState(0.0, tilt=0.5, mode=WheelMode.TRANSFORMING)
    ]
    with pytest.raises(ModeError):
        inverse_mix(BodyTwist(vx=0.1), GEOMETRY, PARAMS, wheels)
    assert inverse_mix(BodyTwist(), GEOMETRY, PARAMS, [WheelState(0.0)] * 4).is_zero
