"""
变形轮几何模型.

四连杆机构把舵机转角映射为叶片张角, 张角决定有效半径, 叶尖位置和舵机力臂.
舵机到张角的映射, 以及张角到半径和力臂的映射, 都按线性处理, 只约束两端点.
"""

import math

from pwt.omniwheg.config import WheelGeometry
from pwt.omniwheg.entity import Direction, Point, WheelState
from pwt.omniwheg.errors import DomainError

RANGE_TOLERANCE = 1e-12


def _check_range(name: str, value: float, low: float, high: float) -> float:
    if not math.isfinite(value) or not (
        low - RANGE_TOLERANCE <= value <= high + RANGE_TOLERANCE
    ):
        raise DomainError(f"{name}={value} outside [{low}, {high}]")
    return min(max(value, low), high)


def tilt_from_servo(servo_angle: float, geometry: WheelGeometry) -> float:
    """
    舵机转角换算为叶片张角.

    参数:
        servo_angle: 舵机转角, 范围 [0, servo_max].
        geometry: 轮子几何参数.

    返回:
        叶片张角, 范围 [0, tilt_max].

    异常:
        DomainError: 舵机转角超出标定范围.
    """

    servo_angle = _check_range("servo_angle", servo_angle, 0.0, geometry.servo_max)
    return servo_angle / geometry.servo_max * geometry.tilt_max


def servo_from_tilt(tilt: float, geometry: WheelGeometry) -> float:
    """tilt_from_servo 的反函数."""

    tilt = _check_range("tilt", tilt, 0.0, geometry.tilt_max)
    return tilt / geometry.tilt_max * geometry.servo_max


def effective_radius(tilt: float, geometry: WheelGeometry) -> float:
    """
    给定张角下轮子的有效半径.

    闭合时为 r_wheel, 完全张开时为 r_leg, 中间线性插值.

    异常:
        DomainError: 张角超出 [0, tilt_max].
    """

    tilt = _check_range("tilt", tilt, 0.0, geometry.tilt_max)
    ratio = tilt / geometry.tilt_max
    return geometry.r_wheel + (geometry.r_leg - geometry.r_wheel) * ratio


def lever_arm(tilt: float, geometry: WheelGeometry) -> float:
    """舵机力臂 L2, 闭合时最大 (l2_max), 完全张开时为 0."""

    tilt = _check_range("tilt", tilt, 0.0, geometry.tilt_max)
    return geometry.l2_max * (1.0 - tilt / geometry.tilt_max)


def lobe_pitch(geometry: WheelGeometry) -> float:
    """叶片对称周期 2π/N."""

    return 2 * math.pi / geometry.lobe_count


def stance_height(geometry: WheelGeometry) -> float:
    """张开的轮子站立在叶尖上时的轮心高度."""

    return geometry.r_contact * math.cos(math.pi / (2 * geometry.lobe_count))


def hook_radius(geometry: WheelGeometry, direction: Direction) -> float:
    """叶尖钩住台阶边缘时的有效半径, 后退方向按叶片曲率偏移缩短."""

    if direction is Direction.BACKWARD:
        return geometry.r_leg - geometry.asym_offset
    return geometry.r_leg


def contact_length(geometry: WheelGeometry, direction: Direction) -> float:
    """攀爬时轮心到接触点的距离."""

    if direction is Direction.BACKWARD:
        return geometry.r_contact - geometry.asym_offset
    return geometry.r_contact


def wrap_phase(angle: float, period: float) -> float:
    """
    把角度折算到 (-period/2, period/2].

    恰好落在 ±period/2 时取正值.
    """

    half = period / 2
    return half - (half - angle) % period


def lobe_tip_positions(
    state: WheelState, geometry: WheelGeometry, center: Point
) -> list[Point]:
    """
    计算各叶尖在矢状面 (s, z) 中的位置.

    第 k 个叶尖的方向角为 phase + 2πk/N - π/2, 即 phase 为 0 时第一个叶尖正对地面.

    参数:
        state: 轮子状态 (相位, 张角).
        geometry: 轮子几何参数.
        center: 轮心位置.

    返回:
        lobe_count 个叶尖位置.
    """

    radius = effective_radius(state.tilt, geometry)
    pitch = lobe_pitch(geometry)
    s, z = center
    tips = []
    for k in range(geometry.lobe_count):
        theta = state.phase + k * pitch - math.pi / 2
        tips.append((s + radius * math.cos(theta), z + radius * math.sin(theta)))
    return tips
