"""
越障状态机.

流程: 摆正 -> 对齐领先轴 -> 变形 -> 攀爬 -> 复位 -> 对齐尾随轴 -> 变形 -> 攀爬 -> 复位.
"Front" 阶段作用于领先轴 (前进时为前轴, 后退时为后轴), "Rear" 阶段作用于尾随轴.
"""

import logging
from typing import Callable, Iterable

from pwt.omniwheg import constants
from pwt.omniwheg.config import Obstacle, RobotParams, Scenario, WheelGeometry
from pwt.omniwheg.entity import (
    Action,
    ActionKind,
    Axle,
    ClimbPhase,
    Frame,
    RobotState,
    Rollout,
    WheelMode,
    WheelSpeeds,
)
from pwt.omniwheg.errors import (
    DomainError,
    InfeasibleError,
    ModeError,
    OmniWhegError,
    StallError,
    TipOverError,
)
from pwt.omniwheg.kinematics import alignment_correction, is_aligned
from pwt.omniwheg.message import MSG_ACTION, MSG_ACTION_FAILED, MSG_CLIMB_FAILED
from pwt.omniwheg.utils import format_number
from pwt.omniwheg.world import (
    ZERO_TORQUES,
    advance,
    approach_position,
    climb_arc,
    climbable,
    initial_state,
    lead_axle,
    make_context,
    pass_distance,
    trail_axle,
)

FrameCallback = Callable[[Frame, ClimbPhase], None]

# 一次攀爬的动作数上限, 正常流程远小于此
MAX_ACTIONS = 64

ACTIONS_HEADER = ("kind", "axle", "magnitude", "unit", "phase", "detail")


def next_action(
    phase: ClimbPhase,
    robot: RobotState,
    obstacle: Obstacle,
    geometry: WheelGeometry,
    params: RobotParams,
) -> tuple[Action, ClimbPhase]:
    """
    根据当前阶段和机器人状态给出下一个动作及后继阶段.

    参数:
        phase: 当前阶段, 不能是 Done 或 Failed.
        robot: 机器人当前状态.
        obstacle: 障碍物.
        geometry: 轮子几何参数.
        params: 机器人参数.

    返回:
        (动作, 后继阶段). 超出可攀爬范围或对齐失败时后继阶段为 Failed, 动作为带原因的 Stop.

    异常:
        DomainError: phase 为终止阶段.
        ModeError: 变形前轮子未对齐或未静止.
    """

    if phase.terminal:
        raise DomainError(f"no action after terminal phase {phase}")
    direction = obstacle.direction
    lead, trail = lead_axle(direction), trail_axle(direction)
    match phase:
        case ClimbPhase.SQUARE_UP:
            return _square_up(robot, obstacle, geometry, params)
        case ClimbPhase.ALIGN_FRONT:
            return _align(phase, robot, lead, ClimbPhase.TRANSFORM_FRONT, geometry)
        case ClimbPhase.ALIGN_REAR:
            return _align(phase, robot, trail, ClimbPhase.TRANSFORM_REAR, geometry)
        case ClimbPhase.TRANSFORM_FRONT:
            return _transform(
                phase, robot, lead, ClimbPhase.CLIMB_FRONT, obstacle, geometry, params
            )
        case ClimbPhase.TRANSFORM_REAR:
            return _transform(
                phase, robot, trail, ClimbPhase.CLIMB_REAR, obstacle, geometry, params
            )
        case ClimbPhase.CLIMB_FRONT:
            arc = climb_arc(robot, lead, obstacle, geometry)
            return _drive(phase, lead, arc), ClimbPhase.RESET_FRONT
        case ClimbPhase.CLIMB_REAR:
            arc = climb_arc(robot, trail, obstacle, geometry)
            return _drive(phase, trail, arc), ClimbPhase.RESET_REAR
        case ClimbPhase.RESET_FRONT:
            if robot.modes(lead) != {WheelMode.WHEELED}:
                return _fold(phase, lead), phase
            target = approach_position(obstacle.height, geometry, direction)
            gap = target - robot.center(trail)[0]
            action = _drive(phase, Axle.BOTH, gap / geometry.r_wheel)
            return action, ClimbPhase.ALIGN_REAR
        case ClimbPhase.RESET_REAR:
            if robot.modes(trail) != {WheelMode.WHEELED}:
                return _fold(phase, trail), phase
            return Action(ActionKind.STOP, trail, phase=phase), ClimbPhase.DONE
    raise DomainError(f"unknown phase {phase}")


def _drive(phase: ClimbPhase, axle: Axle, arc: float) -> Action:
    return Action(ActionKind.DRIVE, axle, arc, "rad", phase)


def _fold(phase: ClimbPhase, axle: Axle) -> Action:
    return Action(
        ActionKind.TRANSFORM, axle, 0.0, "rad", phase, target=WheelMode.WHEELED
    )


def _square_up(
    robot: RobotState,
    obstacle: Obstacle,
    geometry: WheelGeometry,
    params: RobotParams,
) -> tuple[Action, ClimbPhase]:
    phase = ClimbPhase.SQUARE_UP
    if robot.heading != 0:
        return Action(ActionKind.ROTATE, Axle.BOTH, -robot.heading, "rad", phase), phase
    direction = obstacle.direction
    if obstacle.height <= 0:
        distance = pass_distance(robot, geometry, params, direction)
        return _drive(phase, Axle.BOTH, distance / geometry.r_wheel), ClimbPhase.DONE
    target = approach_position(obstacle.height, geometry, direction)
    gap = target - robot.center(lead_axle(direction))[0]
    return _drive(phase, Axle.BOTH, gap / geometry.r_wheel), ClimbPhase.ALIGN_FRONT


def _axle_phases(robot: RobotState, axle: Axle) -> tuple[float, float]:
    left, right = axle.wheels
    return robot.wheels[left].phase, robot.wheels[right].phase


def _align(
    phase: ClimbPhase,
    robot: RobotState,
    axle: Axle,
    successor: ClimbPhase,
    geometry: WheelGeometry,
) -> tuple[Action, ClimbPhase]:
    left, right = _axle_phases(robot, axle)
    if is_aligned(left, right, geometry):
        return Action(ActionKind.LATERAL_MOVE, axle, 0.0, "m", phase), successor
    if robot.align_rounds >= constants.ALIGN_MAX_ROUNDS:
        stop = Action(
            ActionKind.STOP, axle, phase=phase, reason=constants.REASON_ALIGNMENT
        )
        return stop, ClimbPhase.FAILED
    command = alignment_correction(left, right, geometry)
    return Action(ActionKind.LATERAL_MOVE, axle, command.signed_dx, "m", phase), phase


def _transform(
    phase: ClimbPhase,
    robot: RobotState,
    axle: Axle,
    successor: ClimbPhase,
    obstacle: Obstacle,
    geometry: WheelGeometry,
    params: RobotParams,
) -> tuple[Action, ClimbPhase]:
    verdict = climbable(geometry, params, obstacle)
    if not verdict.ok:
        reason = verdict.limiting_factor
        stop = Action(ActionKind.STOP, axle, phase=phase, reason=reason)
        return stop, ClimbPhase.FAILED
    if not is_aligned(*_axle_phases(robot, axle), geometry):
        raise ModeError(f"{axle} axle not phase aligned before transform")
    if not robot.speeds.is_zero:
        raise ModeError(f"{axle} axle wheels moving before transform")
    action = Action(
        ActionKind.TRANSFORM,
        axle,
        geometry.tilt_max,
        "rad",
        phase,
        target=WheelMode.LEGGED,
    )
    return action, successor


def rollout(
    scenario: Scenario,
    on_frame: FrameCallback | None = None,
    logger: logging.Logger | None = None,
) -> Rollout:
    """
    状态机与世界模型的闭环: 每个动作在模型上执行后, 按新状态决定下一个动作.

    参数:
        scenario: 场景.
        on_frame: 每产生一帧时的回调, 参数为帧和发出动作的阶段. 初始状态也作为一帧回调.
        logger: 日志记录器.

    返回:
        Rollout, 包含动作列表, 最终状态, 终止阶段和失败原因.
    """

    logger = logger or logging.getLogger(f"{constants.LOG_ROOT_NAME}.planner")
    context = make_context(scenario, logger)
    state = initial_state(scenario)
    phase = ClimbPhase.SQUARE_UP
    actions: list[Action] = []
    result = Rollout(actions, state, phase)
    if on_frame is not None:
        on_frame(Frame(state, ZERO_TORQUES, WheelSpeeds()), phase)
    while not phase.terminal:
        if len(actions) >= MAX_ACTIONS:
            raise OmniWhegError(f"no terminal phase after {MAX_ACTIONS} actions")
        action, successor = next_action(
            phase, state, scenario.obstacle, scenario.geometry, scenario.params
        )
        actions.append(action)
        logger.debug(
            MSG_ACTION,
            extra=dict(
                phase=phase,
                kind=action.kind,
                axle=action.axle,
                magnitude=action.magnitude,
                unit=action.unit,
                successor=successor,
            ),
        )
        try:
            for frame in advance(state, action, context):
                state = frame.state
                if on_frame is not None:
                    on_frame(frame, action.phase)
        except (StallError, TipOverError, DomainError) as ex:
            logger.debug(
                MSG_ACTION_FAILED,
                extra=dict(
                    phase=phase, kind=action.kind, axle=action.axle, exception=ex
                ),
            )
            reason, limiting = _failure(ex)
            actions.append(
                Action(ActionKind.STOP, action.axle, phase=phase, reason=reason)
            )
            result.failure_reason, result.limiting_factor = reason, limiting
            successor = ClimbPhase.FAILED
        else:
            if successor is ClimbPhase.FAILED:
                result.failure_reason = result.limiting_factor = action.reason
        phase = successor
    if phase is ClimbPhase.FAILED:
        logger.warning(
            MSG_CLIMB_FAILED,
            extra=dict(phase=actions[-1].phase, reason=result.failure_reason),
        )
    result.state = state
    result.phase = phase
    return result


def _failure(ex: Exception) -> tuple[str, str]:
    """把执行异常映射为 (失败原因, 限制因素)."""

    if isinstance(ex, StallError):
        if ex.actuator == "servo":
            return constants.REASON_STALL, constants.REASON_SERVO_TORQUE
        return constants.REASON_STALL, constants.REASON_MOTOR_TORQUE
    if isinstance(ex, TipOverError):
        return constants.REASON_TIP_OVER, constants.REASON_TIP_OVER
    return constants.REASON_CONTACT, constants.REASON_CONTACT


def plan_climb(scenario: Scenario) -> list[Action]:
    """
    生成完整的越障动作列表.

    同一场景多次规划得到相同的动作列表.

    异常:
        InfeasibleError: 障碍物不可攀爬, check 为未通过的检查项.
    """

    result = rollout(scenario)
    if result.phase is ClimbPhase.FAILED:
        check = result.limiting_factor or result.failure_reason or "unknown"
        raise InfeasibleError(check, f"height {scenario.obstacle.height} m")
    return result.actions


def format_actions(actions: Iterable[Action]) -> str:
    """每行一个动作: kind,axle,magnitude,unit,phase,detail."""

    lines = [
        ",".join(
            (
                str(action.kind),
                str(action.axle),
                format_number(action.magnitude),
                action.unit,
                str(action.phase),
                action.detail,
            )
        )
        for action in actions
    ]
    return "".join(f"{line}\n" for line in lines)
