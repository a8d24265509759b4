"""
准静态越障仿真: 闭环执行规划器动作, 记录每一步的电流和力矩遥测.
"""

import csv
import logging
from os import PathLike
from typing import Iterable

import numpy as np

from pwt.omniwheg import constants
from pwt.omniwheg.config import Scenario
from pwt.omniwheg.entity import (
    ActionKind,
    ClimbOutcome,
    ClimbPhase,
    Frame,
    Point,
    TelemetrySample,
)
from pwt.omniwheg.message import MSG_RUN_SUMMARY
from pwt.omniwheg.planner import rollout
from pwt.omniwheg.statics import current_from_torque, torque_from_current
from pwt.omniwheg.utils import format_number
from pwt.omniwheg.world import climbable, initial_state, pivot_step

__all__ = [
    "climbable",
    "initial_state",
    "pivot_step",
    "simulate",
    "telemetry_rows",
    "write_telemetry",
]

ALIGN_PHASES = (ClimbPhase.ALIGN_FRONT, ClimbPhase.ALIGN_REAR)


class _Recorder:
    """把帧换算为遥测样本: 电机只报告电流, 力矩由电流乘以力矩常数得到."""

    def __init__(self, scenario: Scenario) -> None:
        self.torque_constant = scenario.params.torque_constant
        self.period = scenario.run.dalpha / scenario.run.drive_rate
        self.samples: list[TelemetrySample] = []
        self.trajectory: list[Point] = []
        self.lateral = 0.0

    def __call__(self, frame: Frame, phase: ClimbPhase) -> None:
        fl, fr, rl, rr = (
            current_from_torque(torque, self.torque_constant)
            for torque in frame.torques
        )
        currents = (fl, fr, rl, rr)
        fl, fr, rl, rr = (
            torque_from_current(current, self.torque_constant) for current in currents
        )
        s, z = frame.state.front
        self.samples.append(
            TelemetrySample(
                t=len(self.samples) * self.period,
                currents=currents,
                torques=(fl, fr, rl, rr),
                s=s,
                z=z,
                phase=phase,
            )
        )
        self.trajectory.append((s, z))
        self.lateral += abs(frame.lateral)


def simulate(scenario: Scenario, logger: logging.Logger | None = None) -> ClimbOutcome:
    """
    按规划器的动作在准静态模型上仿真一次越障.

    参数:
        scenario: 场景, 同一场景 (含 seed) 得到完全相同的遥测.
        logger: 日志记录器, 默认为 OmniWheg.sim.

    返回:
        ClimbOutcome. 堵转, 倾覆, 接触点不可达或超出可攀爬范围时 success 为假并给出原因.
    """

    logger = logger or logging.getLogger(f"{constants.LOG_ROOT_NAME}.sim")
    recorder = _Recorder(scenario)
    result = rollout(scenario, recorder, logger.getChild("planner"))
    torques = np.abs(np.array([sample.torques for sample in recorder.samples]))
    front_z = result.state.front[1]
    floor = scenario.obstacle.height + scenario.geometry.r_wheel - 1e-6
    outcome = ClimbOutcome(
        success=result.phase is ClimbPhase.DONE and front_z >= floor,
        trajectory=recorder.trajectory,
        peak_torque=float(torques.max()),
        mean_torque=float(torques.mean()),
        total_lateral_displacement=recorder.lateral,
        failure_reason=result.failure_reason,
        limiting_factor=result.limiting_factor,
        max_align_displacement=_max_align_displacement(result.actions),
        telemetry=recorder.samples,
        actions=result.actions,
    )
    logger.info(
        MSG_RUN_SUMMARY,
        extra=dict(
            result="succeeded" if outcome.success else "failed",
            peak_torque=outcome.peak_torque,
            mean_torque=outcome.mean_torque,
            lateral=outcome.total_lateral_displacement,
        ),
    )
    return outcome


def _max_align_displacement(actions) -> float:
    """各对齐阶段内指令横向位移绝对值之和的最大值."""

    totals = {phase: 0.0 for phase in ALIGN_PHASES}
    for action in actions:
        if action.kind is ActionKind.LATERAL_MOVE and action.phase in totals:
            totals[action.phase] += abs(action.magnitude)
    return max(totals.values())


def telemetry_rows(samples: Iterable[TelemetrySample]) -> list[list[str]]:
    return [
        [
            format_number(sample.t),
            *(format_number(value) for value in sample.currents),
            *(format_number(value) for value in sample.torques),
            format_number(sample.s),
            format_number(sample.z),
            str(sample.phase),
        ]
        for sample in samples
    ]


def write_telemetry(
    samples: Iterable[TelemetrySample], path: str | PathLike[str]
) -> None:
    """
    写出遥测 CSV, 列为 t,i_fl,i_fr,i_rl,i_rr,tau_fl,tau_fr,tau_rl,tau_rr,s,z,phase.

    异常:
        FileNotFoundError, PermissionError: 读写文件错误
    """

    with open(path, "w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(constants.TELEMETRY_HEADER)
        writer.writerows(telemetry_rows(samples))
