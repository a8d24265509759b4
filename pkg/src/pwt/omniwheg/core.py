import csv
import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from logging import Logger
from os import PathLike
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd

from pwt.omniwheg import constants
from pwt.omniwheg.config import Obstacle, Scenario, WheelGeometry
from pwt.omniwheg.entity import (
    AlignmentPoint,
    ClimbOutcome,
    ClimbVerdict,
    Direction,
    FeasibilityReport,
    LogStats,
    MotorStats,
    SweepCell,
)
from pwt.omniwheg.errors import DataError, DomainError
from pwt.omniwheg.kinematics import align_iteratively, analytic_displacement
from pwt.omniwheg.message import (
    MSG_ALIGNMENT,
    MSG_ANALYSIS,
    MSG_ARTIFACT,
    MSG_FEASIBILITY,
    MSG_SCENARIO,
    MSG_SWEEP_CELL,
    MSG_SWEEP_FINISHED,
)
from pwt.omniwheg.planner import format_actions
from pwt.omniwheg.sim import simulate, write_telemetry
from pwt.omniwheg.statics import feasibility_report, torque_from_current
from pwt.omniwheg.utils import format_bool, format_number
from pwt.omniwheg.world import climbable

PathType = str | PathLike[str]


def _prepare(out_dir: PathType) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(data: Any, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        json.dump(data, file, ensure_ascii=False, indent=2)
        file.write("\n")


def _write_csv(
    header: Sequence[str], rows: Iterable[Sequence[str]], path: Path
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def summarize(scenario: Scenario, outcome: ClimbOutcome) -> dict[str, Any]:
    """单次仿真的摘要记录."""

    return dict(
        height=scenario.obstacle.height,
        direction=str(scenario.obstacle.direction),
        success=outcome.success,
        peak_torque=outcome.peak_torque,
        mean_torque=outcome.mean_torque,
        total_lateral_displacement=outcome.total_lateral_displacement,
        max_align_displacement=outcome.max_align_displacement,
        failure_reason=outcome.failure_reason,
        limiting_factor=outcome.limiting_factor,
        samples=len(outcome.telemetry),
        actions=len(outcome.actions),
    )


def run(scenario: Scenario, out_dir: PathType, logger: Logger) -> ClimbOutcome:
    """
    仿真一个场景并写出遥测, 动作列表和摘要.

    参数:
        scenario: 场景.
        out_dir: 输出目录, 不存在时创建.
        logger: 日志记录器.

    返回:
        仿真结果.

    异常:
        FileNotFoundError, PermissionError: 读写文件错误
    """

    path = _prepare(out_dir)
    logger.info(
        MSG_SCENARIO,
        extra=dict(
            height=scenario.obstacle.height, direction=scenario.obstacle.direction
        ),
    )
    outcome = simulate(scenario, logger.getChild("sim"))
    artifacts = (
        path / constants.TELEMETRY_FILE,
        path / constants.ACTIONS_FILE,
        path / constants.SUMMARY_FILE,
    )
    write_telemetry(outcome.telemetry, artifacts[0])
    with open(artifacts[1], "w", encoding="utf-8", newline="\n") as file:
        file.write(format_actions(outcome.actions))
    _write_json(summarize(scenario, outcome), artifacts[2])
    for artifact in artifacts:
        logger.debug(MSG_ARTIFACT, extra=dict(path=artifact))
    return outcome


def sweep(
    scenario: Scenario,
    heights: Iterable[float],
    directions: Iterable[Direction | str],
    out_dir: PathType,
    logger: Logger,
    workers: int = constants.SWEEP_WORKERS_DEFAULT,
) -> list[SweepCell]:
    """
    对高度和方向的组合逐格仿真, 写出每格的遥测和 sweep.csv.

    各格并发执行, 结果按高度升序排列, 同一高度 forward 在 backward 之前.

    参数:
        scenario: 基准场景, 每格只替换障碍物.
        heights: 障碍物高度 (m).
        directions: 攀爬方向.
        out_dir: 输出目录.
        logger: 日志记录器.
        workers: 并发线程数.

    返回:
        按确定顺序排列的结果.

    异常:
        DomainError: 高度或方向列表为空.
        pydantic.ValidationError: 高度超出范围或方向无效.
        FileNotFoundError, PermissionError: 读写文件错误
    """

    obstacles = sorted(
        {
            Obstacle.model_validate(dict(height=height, direction=direction))
            for height in heights
            for direction in directions
        },
        key=lambda o: (o.height, list(Direction).index(o.direction)),
    )
    if not obstacles:
        raise DomainError("sweep needs at least one height and one direction")
    path = _prepare(out_dir)

    def cell(obstacle: Obstacle) -> SweepCell:
        name = constants.SWEEP_TELEMETRY_FILE.format(
            height=format_number(obstacle.height), direction=obstacle.direction
        )
        outcome = simulate(scenario.model_copy(update=dict(obstacle=obstacle)))
        write_telemetry(outcome.telemetry, path / name)
        logger.info(
            MSG_SWEEP_CELL,
            extra=dict(
                height=obstacle.height,
                direction=obstacle.direction,
                result=_result_text(outcome),
            ),
        )
        return SweepCell(obstacle.height, obstacle.direction, outcome, name)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        cells = list(executor.map(cell, obstacles))

    rows = [
        (
            format_number(c.height),
            str(c.direction),
            format_bool(c.outcome.success),
            format_number(c.outcome.peak_torque),
            format_number(c.outcome.mean_torque),
            c.outcome.limiting_factor or c.outcome.failure_reason or "",
            c.telemetry,
        )
        for c in cells
    ]
    sweep_path = path / constants.SWEEP_FILE
    _write_csv(constants.SWEEP_HEADER, rows, sweep_path)
    logger.info(MSG_SWEEP_FINISHED, extra=dict(cells=len(cells), path=sweep_path))
    return cells


def _result_text(outcome: ClimbOutcome) -> str:
    if outcome.success:
        return "succeeded"
    return f"failed ({outcome.limiting_factor or outcome.failure_reason})"


def feasibility(
    scenario: Scenario, out_dir: PathType, logger: Logger
) -> tuple[FeasibilityReport, ClimbVerdict]:
    """
    最坏工况下的执行器力矩需求和当前障碍物的可攀爬判断, 写出 feasibility.csv.
    """

    report = feasibility_report(scenario.geometry, scenario.params)
    verdict = climbable(scenario.geometry, scenario.params, scenario.obstacle)
    hook_ok = verdict.limiting_factor != constants.REASON_HOOK_REACH
    rows = [
        (
            constants.REASON_HOOK_REACH,
            format_number(scenario.obstacle.height),
            format_number(verdict.hook_limit),
            format_bool(hook_ok),
        ),
        (
            constants.REASON_MOTOR_TORQUE,
            format_number(report.motor_required),
            format_number(report.motor_limit),
            format_bool(report.motor_ok),
        ),
        (
            constants.REASON_SERVO_TORQUE,
            format_number(report.servo_required),
            format_number(report.servo_limit),
            format_bool(report.servo_ok),
        ),
    ]
    path = _prepare(out_dir) / constants.FEASIBILITY_FILE
    _write_csv(constants.FEASIBILITY_HEADER, rows, path)
    logger.info(
        MSG_FEASIBILITY,
        extra=dict(
            motor_required=report.motor_required,
            motor_limit=report.motor_limit,
            motor="ok" if report.motor_ok else "exceeded",
            servo_required=report.servo_required,
            servo_limit=report.servo_limit,
            servo="ok" if report.servo_ok else "exceeded",
        ),
    )
    logger.debug(MSG_ARTIFACT, extra=dict(path=path))
    return report, verdict


def alignment_curve(geometry: WheelGeometry, slip: float) -> list[AlignmentPoint]:
    """相位差在 ±45° 内按 1° 取点, 比较解析横移与打滑后的实际横移."""

    points = []
    limit = constants.ALIGNMENT_RANGE_DEG
    for degree in range(-limit, limit + 1):
        difference = math.radians(degree)
        trace = align_iteratively(0.0, difference, geometry, slip)
        points.append(
            AlignmentPoint(
                difference=difference,
                analytic=analytic_displacement(difference, geometry),
                achieved=abs(trace.achieved[0]) if trace.achieved else 0.0,
                trace=trace,
            )
        )
    return points


def write_alignment(
    points: Iterable[AlignmentPoint],
    out_dir: PathType,
    logger: Logger,
    slip: float,
) -> Path:
    points = list(points)
    rows = [
        (
            format_number(math.degrees(p.difference)),
            format_number(p.analytic),
            format_number(p.achieved),
            format_number(p.trace.total_commanded),
            format_number(p.trace.total_achieved),
            str(len(p.trace.commanded)),
            format_number(math.degrees(p.trace.residual)),
            format_bool(p.trace.aligned),
        )
        for p in points
    ]
    path = _prepare(out_dir) / constants.ALIGNMENT_FILE
    _write_csv(constants.ALIGNMENT_HEADER, rows, path)
    worst = max((p.trace.total_commanded for p in points), default=0.0)
    logger.info(MSG_ALIGNMENT, extra=dict(slip=slip, worst=worst))
    logger.debug(MSG_ARTIFACT, extra=dict(path=path))
    return path


def load_log(path: PathType, torque_constant: float) -> pd.DataFrame:
    """
    读取电流日志, 为每个 i_<motor> 列追加 tau_<motor> 列.

    参数:
        path: CSV 文件, 至少包含 t 列和一个 i_<motor> 列.
        torque_constant: 力矩常数 (N*m/A).

    返回:
        数值列已转换为浮点数的 DataFrame.

    异常:
        DataError: 缺少列, 空文件, 数据中间的空行或非数值单元格,
            row 为文件中的行号 (表头为第 1 行), 末尾的空行忽略.
        FileNotFoundError, PermissionError: 读写文件错误
    """

    try:
        frame = pd.read_csv(
            path, dtype=str, skipinitialspace=True, skip_blank_lines=False
        )
    except pd.errors.EmptyDataError as ex:
        raise DataError(None, "empty log") from ex
    except pd.errors.ParserError as ex:
        raise DataError(None, f"malformed csv: {ex}") from ex
    frame.columns = [str(column).strip() for column in frame.columns]
    # 末尾的空行不是数据, 其余空行按行号报错
    filled = np.flatnonzero(frame.notna().any(axis=1).to_numpy())
    frame = frame.iloc[: filled[-1] + 1 if filled.size else 0]
    currents = [column for column in frame.columns if column.startswith("i_")]
    if "t" not in frame.columns or not currents:
        raise DataError(
            None, f"log needs columns t and i_<motor>, got {list(frame.columns)}"
        )
    numeric = frame[["t", *currents]].apply(pd.to_numeric, errors="coerce")
    invalid = numeric.isna()
    if invalid.to_numpy().any():
        index = invalid.any(axis=1).idxmax()
        column = invalid.loc[index].idxmax()
        value = frame.at[index, column]
        if frame.loc[index].isna().all():
            message = "blank line"
        elif pd.isna(value):
            message = f"empty cell in column {column}"
        else:
            message = f"non-numeric value {value!r} in column {column}"
        raise DataError(int(index) + 2, message)
    result = frame.copy()
    result[numeric.columns] = numeric
    for column in currents:
        result[f"tau_{column[2:]}"] = torque_from_current(
            numeric[column], torque_constant
        )
    return result


def _motor_stats(torques: pd.Series) -> MotorStats:
    if torques.empty:
        return MotorStats(peak=0.0, mean=0.0, samples=0)
    magnitude = torques.abs()
    return MotorStats(
        peak=float(magnitude.max()),
        mean=float(magnitude.mean()),
        samples=int(magnitude.size),
    )


def log_stats(frame: pd.DataFrame) -> LogStats:
    """每个电机的峰值和平均力矩, 并按电流方向分为 forward 和 reverse 两段统计."""

    motors = [column[2:] for column in frame.columns if column.startswith("i_")]
    segments: dict[str, dict[str, MotorStats]] = {"forward": {}, "reverse": {}}
    for motor in motors:
        current, torque = frame[f"i_{motor}"], frame[f"tau_{motor}"]
        segments["forward"][motor] = _motor_stats(torque[current > 0])
        segments["reverse"][motor] = _motor_stats(torque[current < 0])
    torques = frame[[f"tau_{motor}" for motor in motors]].abs().to_numpy()
    return LogStats(
        motors={motor: _motor_stats(frame[f"tau_{motor}"]) for motor in motors},
        segments=segments,
        peak_torque=float(torques.max()) if torques.size else 0.0,
        mean_torque=float(torques.mean()) if torques.size else 0.0,
        samples=len(frame),
    )


def analyze_log(path: PathType, torque_constant: float) -> LogStats:
    """
    由电流日志计算力矩统计.

    异常:
        DataError: 日志数据错误.
        FileNotFoundError, PermissionError: 读写文件错误
    """

    return log_stats(load_log(path, torque_constant))


def write_analysis(
    frame: pd.DataFrame, stats: LogStats, out_dir: PathType, logger: Logger
) -> tuple[Path, Path]:
    """写出追加了力矩列的日志 analysis.csv 和统计 analysis.json."""

    path = _prepare(out_dir)
    table = path / constants.ANALYSIS_FILE
    frame.to_csv(
        table,
        index=False,
        lineterminator="\n",
        float_format=f"%.{constants.CSV_DIGITS}g",
    )
    report = path / constants.ANALYSIS_STATS_FILE
    _write_json(dataclasses.asdict(stats), report)
    logger.info(
        MSG_ANALYSIS,
        extra=dict(
            samples=stats.samples,
            peak_torque=stats.peak_torque,
            mean_torque=stats.mean_torque,
        ),
    )
    for artifact in (table, report):
        logger.debug(MSG_ARTIFACT, extra=dict(path=artifact))
    return table, report
