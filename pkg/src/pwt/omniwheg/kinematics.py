"""
麦克纳姆轮运动学.

约定:
    - 轮子顺序 (fl, fr, rl, rr).
    - vx 向左为正, vy 向前为正, omega 逆时针为正.
    - 轮速与相位都在电机坐标系中表示, 前轴电机镜像安装 (MOTOR_SIGNS).
      在该坐标系下纯横移时左轮为 +vx/r, 右轮为 -vx/r.
    - 相位差为 phase_right - phase_left, 修正时左轮 +delta, 右轮 -delta,
      对应机器人向左平移 r * delta.
"""

import math
from typing import Iterable

import numpy as np

from pwt.omniwheg import constants
from pwt.omniwheg.config import RobotParams, WheelGeometry
from pwt.omniwheg.entity import (
    AlignmentCommand,
    AlignmentTrace,
    BodyTwist,
    LateralDirection,
    WheelMode,
    WheelSpeeds,
    WheelState,
)
from pwt.omniwheg.errors import DomainError, ModeError
from pwt.omniwheg.geometry import lobe_pitch, wrap_phase

MOTOR_SIGNS = (-1.0, -1.0, 1.0, 1.0)


def yaw_lever(params: RobotParams) -> float:
    return (params.track_width + params.wheel_base) / 2


def mixing_matrix(geometry: WheelGeometry, params: RobotParams) -> np.ndarray:
    """车体速度 (vx, vy, omega) 到电机坐标系轮速的 4x3 矩阵."""

    k = yaw_lever(params)
    matrix = np.array(
        [
            [1.0, -1.0, k],
            [-1.0, -1.0, -k],
            [1.0, 1.0, -k],
            [-1.0, 1.0, k],
        ]
    )
    return matrix / geometry.r_wheel


def inverse_mix(
    twist: BodyTwist,
    geometry: WheelGeometry,
    params: RobotParams,
    wheels: Iterable[WheelState] | None = None,
) -> WheelSpeeds:
    """
    车体速度换算为四个电机的轮速.

    参数:
        twist: 车体速度.
        geometry: 轮子几何参数.
        params: 机器人参数.
        wheels: 当前轮子状态, 给出时要求全部处于轮式模式.

    返回:
        电机坐标系下的轮速 (rad/s).

    异常:
        ModeError: 有轮子不在轮式模式.
    """

    if wheels is not None:
        modes = {wheel.mode for wheel in wheels}
        if modes - {WheelMode.WHEELED}:
            raise ModeError(
                f"mecanum mixing needs all wheels Wheeled, got {sorted(modes)}"
            )
    vector = np.array([twist.vx, twist.vy, twist.omega], dtype=float)
    if not np.all(np.isfinite(vector)):
        raise DomainError(f"non-finite twist {twist}")
    return WheelSpeeds.from_sequence(mixing_matrix(geometry, params) @ vector)


def forward_mix(
    speeds: WheelSpeeds, geometry: WheelGeometry, params: RobotParams
) -> BodyTwist:
    """inverse_mix 的最小二乘逆 (伪逆)."""

    pseudo_inverse = np.linalg.pinv(mixing_matrix(geometry, params))
    vx, vy, omega = pseudo_inverse @ np.array(speeds.as_tuple(), dtype=float)
    return BodyTwist(float(vx), float(vy), float(omega))


def common_frame(speeds: WheelSpeeds) -> WheelSpeeds:
    """去掉电机安装方向, 正值表示向前滚动."""

    return WheelSpeeds.from_sequence(
        sign * value for sign, value in zip(MOTOR_SIGNS, speeds)
    )


def alignment_correction(
    phase_left: float, phase_right: float, geometry: WheelGeometry
) -> AlignmentCommand:
    """
    计算对齐左右轮相位所需的横移.

    相位差按叶片周期折算到 (-pitch/2, pitch/2], 两侧各承担一半.

    参数:
        phase_left: 左轮相位.
        phase_right: 右轮相位.
        geometry: 轮子几何参数.

    返回:
        每轮转角, 横移距离 (非负) 和方向.
    """

    difference = wrap_phase(phase_right - phase_left, lobe_pitch(geometry))
    delta = difference / 2
    direction = LateralDirection.LEFT if delta >= 0 else LateralDirection.RIGHT
    return AlignmentCommand(
        delta_theta_wheel=delta,
        delta_x=geometry.r_wheel * abs(delta),
        direction=direction,
    )


def apply_slip(commanded_dx: float, slip_coefficient: float) -> float:
    """
    打滑后实际达到的横移距离.

    异常:
        DomainError: 打滑系数不在 [0, 1).
    """

    if not 0 <= slip_coefficient < 1:
        raise DomainError(f"slip coefficient {slip_coefficient} outside [0, 1)")
    return commanded_dx * (1 - slip_coefficient)


def is_aligned(
    phase_left: float,
    phase_right: float,
    geometry: WheelGeometry,
    tolerance: float = constants.ALIGN_TOLERANCE,
) -> bool:
    return abs(wrap_phase(phase_right - phase_left, lobe_pitch(geometry))) < tolerance


def align_iteratively(
    phase_left: float,
    phase_right: float,
    geometry: WheelGeometry,
    slip: float,
    rounds: int = constants.ALIGN_MAX_ROUNDS,
    tolerance: float = constants.ALIGN_TOLERANCE,
) -> AlignmentTrace:
    """
    指令-测量-再指令的对齐循环.

    每轮按剩余相位差下发横移, 打滑使实际横移和实际相对转角都只有指令的 (1 - slip).
    剩余相位差小于 tolerance 或用完 rounds 轮后停止.
    """

    pitch = lobe_pitch(geometry)
    commanded: list[float] = []
    achieved: list[float] = []
    for _ in range(rounds):
        if is_aligned(phase_left, phase_right, geometry, tolerance):
            break
        command = alignment_correction(phase_left, phase_right, geometry)
        moved = apply_slip(command.signed_dx, slip)
        commanded.append(command.signed_dx)
        achieved.append(moved)
        turn = moved / geometry.r_wheel
        phase_left += turn
        phase_right -= turn
    residual = wrap_phase(phase_right - phase_left, pitch)
    return AlignmentTrace(
        commanded=tuple(commanded),
        achieved=tuple(achieved),
        residual=residual,
        aligned=abs(residual) < tolerance,
    )


def analytic_displacement(difference: float, geometry: WheelGeometry) -> float:
    """无打滑时对齐相位差 difference 所需的横移 r * |diff| / 2."""

    wrapped = wrap_phase(difference, lobe_pitch(geometry))
    return geometry.r_wheel * abs(wrapped) / 2


def max_alignment_displacement(geometry: WheelGeometry) -> float:
    """横移上限 r * π / (2N)."""

    return geometry.r_wheel * math.pi / (2 * geometry.lobe_count)
