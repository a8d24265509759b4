import math

import pytest

from pwt.omniwheg.config import WheelGeometry
from pwt.omniwheg.entity import Direction, WheelMode, WheelState
from pwt.omniwheg.errors import DomainError
from pwt.omniwheg.geometry import (
    contact_length,
    effective_radius,
    hook_radius,
    lever_arm,
    lobe_pitch,
    lobe_tip_positions,
    servo_from_tilt,
    stance_height,
    tilt_from_servo,
    wrap_phase,
)

GEOMETRY = WheelGeometry()


def test_servo_tilt_end_points():
    assert tilt_from_servo(0.0, GEOMETRY) == 0.0
    assert tilt_from_servo(GEOMETRY.servo_max, GEOMETRY) == pytest.approx(
        GEOMETRY.tilt_max
    )


@pytest.mark.parametrize("servo", [0.0, 0.3, 0.9, math.pi / 2])
def test_servo_from_tilt_inverts(servo):
    tilt = tilt_from_servo(servo, GEOMETRY)
    assert servo_from_tilt(tilt, GEOMETRY) == pytest.approx(servo, abs=1e-12)


@pytest.mark.parametrize("servo", [-0.01, math.pi / 2 + 0.01, math.nan])
def test_servo_out_of_range(servo):
    with pytest.raises(DomainError):
        tilt_from_servo(servo, GEOMETRY)


def test_effective_radius_end_points():
    assert effective_radius(0.0, GEOMETRY) == pytest.approx(0.095)
    assert effective_radius(GEOMETRY.tilt_max, GEOMETRY) == pytest.approx(0.150)


def test_effective_radius_monotone():
    tilts = [GEOMETRY.tilt_max * k / 999 for k in range(1000)]
    radii = [effective_radius(tilt, GEOMETRY) for tilt in tilts]
    assert radii[0] == pytest.approx(GEOMETRY.r_wheel)
    assert radii[-1] == pytest.approx(GEOMETRY.r_leg)
    assert all(b - a >= -1e-12 for a, b in zip(radii, radii[1:]))


def test_effective_radius_rejects_tilt_beyond_max():
    with pytest.raises(DomainError):
        effective_radius(GEOMETRY.tilt_max + 0.1, GEOMETRY)


def test_lever_arm_largest_when_closed():
    assert lever_arm(0.0, GEOMETRY) == pytest.approx(0.065)
    assert lever_arm(GEOMETRY.tilt_max, GEOMETRY) == pytest.approx(0.0)
    assert lever_arm(GEOMETRY.tilt_max / 2, GEOMETRY) < lever_arm(0.0, GEOMETRY)


def test_stance_and_hook_reach():
    assert lobe_pitch(GEOMETRY) == pytest.approx(math.pi / 2)
    assert stance_height(GEOMETRY) == pytest.approx(0.12195, abs=1e-5)
    assert hook_radius(GEOMETRY, Direction.FORWARD) == pytest.approx(0.150)
    assert hook_radius(GEOMETRY, Direction.BACKWARD) == pytest.approx(0.130)
    assert contact_length(GEOMETRY, Direction.FORWARD) == pytest.approx(0.132)
    assert contact_length(GEOMETRY, Direction.BACKWARD) == pytest.approx(0.112)


@pytest.mark.parametrize(
    "angle, expected",
    [
        (0.0, 0.0),
        (math.pi / 4, math.pi / 4),
        (-math.pi / 4, math.pi / 4),
        (math.pi / 2, 0.0),
        (math.radians(50), math.radians(-40)),
        (-math.radians(100), math.radians(-10)),
    ],
)
def test_wrap_phase(angle, expected):
    assert wrap_phase(angle, math.pi / 2) == pytest.approx(expected, abs=1e-12)


def test_lobe_tips_closed_wheel():
    tips = lobe_tip_positions(WheelState(phase=0.0), GEOMETRY, (0.0, 0.095))
    assert len(tips) == 4
    s, z = tips[0]
    assert s == pytest.approx(0.0, abs=1e-12)
    assert z == pytest.approx(0.0, abs=1e-12)
    for s, z in tips:
        assert math.hypot(s, z - 0.095) == pytest.approx(0.095)


def test_lobe_tips_open_wheel_radius():
    state = WheelState(phase=0.3, tilt=GEOMETRY.tilt_max, mode=WheelMode.LEGGED)
    for s, z in lobe_tip_positions(state, GEOMETRY, (1.0, 2.0)):
        assert math.hypot(s - 1.0, z - 2.0) == pytest.approx(0.150)


@pytest.mark.parametrize("lobe_count", [2, 3, 4, 6])
@pytest.mark.parametrize("phase", [0.0, 0.4, -1.3, 2.9])
@pytest.mark.parametrize("mode", [WheelMode.WHEELED, WheelMode.LEGGED])
def test_lobe_tips_permute_under_one_pitch(lobe_count, phase, mode):
    geometry = WheelGeometry(lobe_count=lobe_count)
    tilt = 0.0 if mode is WheelMode.WHEELED else geometry.tilt_max / 2
    center = (0.3, 0.1)
    original = lobe_tip_positions(WheelState(phase, tilt, mode), geometry, center)
    shifted = lobe_tip_positions(
        WheelState(phase + 2 * math.pi / lobe_count, tilt, mode), geometry, center
    )
    for k, (s, z) in enumerate(shifted):
        s0, z0 = original[(k + 1) % lobe_count]
        assert abs(s - s0) <= 1e-12
        assert abs(z - z0) <= 1e-12
