"""
准静态力矩分析: 驱动电机力矩, 舵机力矩, 电流到力矩的换算.
"""

import math

from pwt.omniwheg.config import RobotParams, WheelGeometry
from pwt.omniwheg.entity import FeasibilityReport
from pwt.omniwheg.errors import DomainError

ANGLE_TOLERANCE = 1e-12


def required_motor_torque(f_wheel: float, r_contact: float, alpha: float) -> float:
    """
    接触角 alpha 下驱动电机所需的最小力矩 f_wheel * r_contact * cos(alpha).

    参数:
        f_wheel: 单轮载荷 (N).
        r_contact: 轮心到接触点距离 (m).
        alpha: 接触角, 接触点到轮心连线与水平线的夹角, 范围 [0, π/2].

    返回:
        所需力矩 (N*m).

    异常:
        DomainError: alpha 超出 [0, π/2] 或 r_contact 不为正.
    """

    if r_contact <= 0:
        raise DomainError(f"r_contact={r_contact} must be positive")
    if not -ANGLE_TOLERANCE <= alpha <= math.pi / 2 + ANGLE_TOLERANCE:
        raise DomainError(f"alpha={alpha} outside [0, pi/2]")
    alpha = min(max(alpha, 0.0), math.pi / 2)
    return f_wheel * r_contact * math.cos(alpha)


def required_servo_torque(f_wheel: float, l2: float) -> float:
    """
    舵机所需力矩 f_wheel * l2.

    异常:
        DomainError: l2 为负.
    """

    if l2 < 0:
        raise DomainError(f"lever arm l2={l2} must not be negative")
    return f_wheel * l2


def torque_from_current(current: float, torque_constant: float) -> float:
    return current * torque_constant


def current_from_torque(torque: float, torque_constant: float) -> float:
    return torque / torque_constant


def rolling_torque(f_wheel: float, coefficient: float, r_wheel: float) -> float:
    """轮式模式在平地上保持滚动所需的力矩."""

    return f_wheel * coefficient * r_wheel


def feasibility_report(
    geometry: WheelGeometry, params: RobotParams
) -> FeasibilityReport:
    """
    最坏工况下的电机和舵机力矩需求, 以及与执行器上限的比较.

    电机取 alpha = 0, 舵机取完全闭合时的力臂 l2_max.
    """

    return FeasibilityReport(
        motor_required=required_motor_torque(params.f_wheel, geometry.r_contact, 0.0),
        servo_required=required_servo_torque(params.f_wheel, geometry.l2_max),
        motor_limit=params.motor_torque_limit,
        servo_limit=params.servo_torque_limit,
    )
