"""
矢状面准静态世界模型.

坐标: s 沿行进方向指向台阶, 台阶边缘位于 s = 0, 边缘以后 (s >= 0) 地面高度为 h.
领先轴 (前进时为前轴, 后退时为后轴) 先到达台阶, 尾随轴始终在它后方 wheel_base 处.

攀爬一个轴分四段:
    1. 钩挂: 轮子原地转动, 直到一个叶尖指向台阶边缘.
    2. 收拢: 轮心沿直线靠向边缘, 直到与边缘的距离等于接触长度.
    3. 绕边缘转动: 以 dalpha 为步长调用 pivot_step, 直到接触角为 π/2.
    4. 落地: 轮心滑移到台面上的站立位置.
"""

import math
from dataclasses import replace
from logging import Logger
from typing import TYPE_CHECKING, Iterator

import numpy as np

from pwt.omniwheg import constants
from pwt.omniwheg.config import Obstacle, RobotParams, WheelGeometry
from pwt.omniwheg.entity import (
    Action,
    ActionKind,
    Axle,
    BodyTwist,
    ClimbVerdict,
    Context,
    Direction,
    Frame,
    Point,
    Quad,
    RobotState,
    WheelMode,
    WheelSpeeds,
    WheelState,
)
from pwt.omniwheg.errors import DomainError, ModeError, StallError, TipOverError
from pwt.omniwheg.geometry import (
    contact_length,
    effective_radius,
    hook_radius,
    lever_arm,
    lobe_pitch,
    lobe_tip_positions,
    stance_height,
    wrap_phase,
)
from pwt.omniwheg.kinematics import MOTOR_SIGNS, apply_slip, inverse_mix, yaw_lever
from pwt.omniwheg.statics import (
    required_motor_torque,
    required_servo_torque,
    rolling_torque,
)

if TYPE_CHECKING:
    from pwt.omniwheg.config import Scenario

TAU = 2 * math.pi
ZERO_TORQUES: Quad = (0.0, 0.0, 0.0, 0.0)


def direction_sign(direction: Direction) -> float:
    return 1.0 if direction is Direction.FORWARD else -1.0


def lead_axle(direction: Direction) -> Axle:
    return Axle.FRONT if direction is Direction.FORWARD else Axle.REAR


def trail_axle(direction: Direction) -> Axle:
    return Axle.REAR if direction is Direction.FORWARD else Axle.FRONT


def ground_height(s: float, obstacle: Obstacle) -> float:
    return obstacle.height if s >= -constants.POSITION_TOLERANCE else 0.0


def approach_position(
    height: float, geometry: WheelGeometry, direction: Direction
) -> float:
    """
    变形前轴心应停靠的 s 位置.

    张开后轴心位于站立高度, 与边缘的距离恰为接触长度; 做不到时贴住台阶立面 (-r_wheel).
    """

    reach = contact_length(geometry, direction) ** 2
    reach -= (height - stance_height(geometry)) ** 2
    offset = math.sqrt(reach) if reach > 0 else 0.0
    return -max(offset, geometry.r_wheel)


def pass_distance(
    state: RobotState,
    geometry: WheelGeometry,
    params: RobotParams,
    direction: Direction,
) -> float:
    """平地上行驶到尾随轴越过 s = 0 一个轮半径所需的距离."""

    lead_s = state.center(lead_axle(direction))[0]
    return params.wheel_base + geometry.r_wheel - lead_s


def climbable(
    geometry: WheelGeometry, params: RobotParams, obstacle: Obstacle
) -> ClimbVerdict:
    """
    判断障碍物是否在可攀爬范围内.

    依次检查: 叶尖能否钩住边缘 (h <= 站立高度 + 钩挂半径),
    最坏接触角下的电机力矩, 完全闭合时的舵机力矩.

    返回:
        ClimbVerdict, limiting_factor 为第一个未通过的检查.
    """

    hook_limit = stance_height(geometry) + hook_radius(geometry, obstacle.direction)
    load = params.f_wheel * params.weight_transfer
    motor = required_motor_torque(
        load, contact_length(geometry, obstacle.direction), 0.0
    )
    servo = required_servo_torque(params.f_wheel, geometry.l2_max)
    limiting: str | None = None
    if obstacle.height <= 0:
        limiting = None
    elif obstacle.height > hook_limit + constants.POSITION_TOLERANCE:
        limiting = constants.REASON_HOOK_REACH
    elif motor > params.motor_torque_limit:
        limiting = constants.REASON_MOTOR_TORQUE
    elif servo > params.servo_torque_limit:
        limiting = constants.REASON_SERVO_TORQUE
    return ClimbVerdict(
        ok=limiting is None,
        limiting_factor=limiting,
        hook_limit=hook_limit,
        motor_required=motor,
        servo_required=servo,
    )


def make_context(scenario: "Scenario", logger: Logger) -> Context:
    return Context(
        geometry=scenario.geometry,
        params=scenario.params,
        obstacle=scenario.obstacle,
        slip=scenario.run.slip,
        dalpha=scenario.run.dalpha,
        drive_rate=scenario.run.drive_rate,
        logger=logger,
    )


def initial_state(scenario: "Scenario") -> RobotState:
    """
    初始状态: 领先轴距台阶边缘 approach_distance, 全部轮子为轮式模式.

    randomize_phases 为真时, 按 seed 在每个轮子的相位偏置上叠加 ±半个叶片周期的均匀随机量.
    """

    run = scenario.run
    geometry = scenario.geometry
    phases = np.array(run.phase_offsets, dtype=float)
    if run.randomize_phases:
        half = lobe_pitch(geometry) / 2
        rng = np.random.default_rng(run.seed)
        phases = phases + rng.uniform(-half, half, size=4)
    wheels = tuple(WheelState(phase=float(p) % TAU) for p in phases)
    lead = (-run.approach_distance, geometry.r_wheel)
    trail = (lead[0] - scenario.params.wheel_base, geometry.r_wheel)
    if scenario.obstacle.direction is Direction.FORWARD:
        front, rear = lead, trail
    else:
        front, rear = trail, lead
    return RobotState(
        x=(front[0] + rear[0]) / 2,
        y=0.0,
        heading=wrap_phase(run.heading_error, TAU),
        front=front,
        rear=rear,
        wheels=wheels,  # type: ignore[arg-type]
    )


def pivot_step(
    state: RobotState,
    contact: Point,
    dalpha: float,
    geometry: WheelGeometry,
    params: RobotParams,
    axle: Axle = Axle.FRONT,
) -> tuple[RobotState, float]:
    """
    让指定轴的轮心绕接触点转过 dalpha.

    接触角 alpha 为接触点到轮心连线与水平线的夹角, 转动使 alpha 增大 (轮心越过接触点上方).
    另一轴随车体平移相同的 Δs.

    参数:
        state: 当前状态.
        contact: 接触点 (s, z).
        dalpha: 转角步长 (rad).
        geometry: 轮子几何参数.
        params: 机器人参数.
        axle: 绕接触点转动的轴.

    返回:
        (新状态, 所需力矩), 力矩为载荷乘以接触点到轮心的水平距离, 按转动后的位置计算.

    异常:
        ModeError: 该轴不在腿式模式.
        DomainError: 接触点超出有效半径.
        StallError: 所需力矩超过电机上限.
    """

    if state.modes(axle) != {WheelMode.LEGGED}:
        raise ModeError(f"pivot needs the {axle} axle Legged")
    s, z = state.center(axle)
    cs, cz = contact
    distance = math.hypot(s - cs, z - cz)
    reach = effective_radius(geometry.tilt_max, geometry)
    if distance > reach + constants.CONTACT_TOLERANCE:
        raise DomainError(
            f"contact at distance {distance:.6f} m beyond reach {reach:.6f} m"
        )
    alpha = math.atan2(z - cz, cs - s) + dalpha
    center = (cs - distance * math.cos(alpha), cz + distance * math.sin(alpha))
    torque = params.f_wheel * params.weight_transfer * abs(center[0] - cs)
    if torque > params.motor_torque_limit:
        raise StallError("motor", torque, params.motor_torque_limit)
    return _move_axle(state, axle, center), torque


def hook_rotation(
    state: RobotState,
    axle: Axle,
    edge: Point,
    geometry: WheelGeometry,
    direction: Direction,
) -> float:
    """
    轮子朝台阶方向 (矢状面内顺时针) 转动多少, 才有一个叶尖指向边缘.

    返回:
        [0, 2π/N) 内的转角.
    """

    index = axle.wheels[0]
    wheel = state.wheels[index]
    center = state.center(axle)
    sagittal = -direction_sign(direction) * MOTOR_SIGNS[index] * wheel.phase
    tips = lobe_tip_positions(replace(wheel, phase=sagittal), geometry, center)
    target = math.atan2(edge[1] - center[1], edge[0] - center[0])
    rotations = [
        (math.atan2(tz - center[1], ts - center[0]) - target) % TAU for ts, tz in tips
    ]
    return min(rotations) % lobe_pitch(geometry)


def climb_waypoints(
    center: Point, height: float, geometry: WheelGeometry, direction: Direction
) -> tuple[Point, float, Point]:
    """
    攀爬路径的关键点.

    返回:
        (收拢终点, 起始接触角, 落地点).
    """

    edge = (0.0, height)
    length = contact_length(geometry, direction)
    distance = math.hypot(center[0] - edge[0], center[1] - edge[1])
    if distance > length + constants.POSITION_TOLERANCE:
        ratio = length / distance
        reeled = (
            edge[0] + (center[0] - edge[0]) * ratio,
            edge[1] + (center[1] - edge[1]) * ratio,
        )
    else:
        reeled = center
    alpha = math.atan2(reeled[1] - edge[1], edge[0] - reeled[0])
    landing = (geometry.r_wheel, height + stance_height(geometry))
    return reeled, alpha, landing


def climb_arc(
    state: RobotState, axle: Axle, obstacle: Obstacle, geometry: WheelGeometry
) -> float:
    """攀爬一个轴时轮子的总转角 (rad)."""

    edge = (0.0, obstacle.height)
    center = state.center(axle)
    length = contact_length(geometry, obstacle.direction)
    reeled, alpha, landing = climb_waypoints(
        center, obstacle.height, geometry, obstacle.direction
    )
    radius = math.hypot(reeled[0] - edge[0], reeled[1] - edge[1])
    top = (edge[0], edge[1] + radius)
    arc = hook_rotation(state, axle, edge, geometry, obstacle.direction)
    arc += math.dist(center, reeled) / length
    arc += max(math.pi / 2 - alpha, 0.0)
    arc += math.dist(top, landing) / length
    return arc


def advance(state: RobotState, action: Action, context: Context) -> Iterator[Frame]:
    """
    在准静态模型上执行一个动作, 逐步产生帧.

    运动类动作的最后一帧轮速为零.

    异常:
        ModeError: 违反模式互锁 (运动中变形, 变形中行驶, 腿式模式下使用混合器).
        StallError: 电机或舵机力矩超限.
        TipOverError: 重心越出支撑区间.
        DomainError: 接触点不可达.
    """

    transforming = WheelMode.TRANSFORMING in state.modes()
    if action.kind is not ActionKind.TRANSFORM and transforming:
        raise ModeError(f"{action.kind} while wheels are Transforming")
    match action.kind:
        case ActionKind.ROTATE:
            yield from _rotate(state, action.magnitude, context)
        case ActionKind.LATERAL_MOVE:
            yield from _lateral_move(state, action.magnitude, context)
        case ActionKind.TRANSFORM:
            if action.target is None:
                raise ModeError("transform without target mode")
            yield from _transform(state, action.axle, action.target, context)
        case ActionKind.DRIVE if action.axle is Axle.BOTH:
            yield from _drive(state, action.magnitude, context)
        case ActionKind.DRIVE:
            yield from _climb(state, action.axle, context)
        case ActionKind.STOP:
            rest = replace(state, speeds=WheelSpeeds())
            yield Frame(rest, ZERO_TORQUES, WheelSpeeds())


def _move_axle(state: RobotState, axle: Axle, center: Point) -> RobotState:
    """移动一个轴到 center, 另一轴水平跟随."""

    ds = center[0] - state.center(axle)[0]
    if axle is Axle.FRONT:
        front, rear = center, (state.rear[0] + ds, state.rear[1])
    else:
        front, rear = (state.front[0] + ds, state.front[1]), center
    return replace(state, front=front, rear=rear, x=(front[0] + rear[0]) / 2)


def _translate(state: RobotState, ds: float) -> RobotState:
    front = (state.front[0] + ds, state.front[1])
    rear = (state.rear[0] + ds, state.rear[1])
    return replace(state, front=front, rear=rear, x=(front[0] + rear[0]) / 2)


def _turn(
    wheels: tuple[WheelState, ...], increments: Quad
) -> tuple[WheelState, WheelState, WheelState, WheelState]:
    fl, fr, rl, rr = (
        replace(wheel, phase=(wheel.phase + delta) % TAU)
        for wheel, delta in zip(wheels, increments)
    )
    return (fl, fr, rl, rr)


def _roll(axle: Axle, common_delta: float) -> Quad:
    """指定轴的轮子在公共坐标系下转过 common_delta, 换算为电机坐标系增量."""

    fl, fr, rl, rr = (
        MOTOR_SIGNS[i] * common_delta if i in axle.wheels else 0.0 for i in range(4)
    )
    return (fl, fr, rl, rr)


def _rates(increments: Quad, context: Context) -> WheelSpeeds:
    return WheelSpeeds.from_sequence(
        delta * context.drive_rate / context.dalpha for delta in increments
    )


def _rolling_torques(increments: Quad, context: Context) -> Quad:
    """按各轮公共坐标系转向给出滚动阻力矩."""

    params = context.params
    magnitude = rolling_torque(
        params.f_wheel, params.rolling_coefficient, context.geometry.r_wheel
    )
    fl, fr, rl, rr = (
        math.copysign(magnitude, sign * delta) if delta else 0.0
        for sign, delta in zip(MOTOR_SIGNS, increments)
    )
    return (fl, fr, rl, rr)


def _steps(amount: float, step: float) -> int:
    return max(1, math.ceil(abs(amount) / step - 1e-9))


def _check_support(state: RobotState, context: Context, pivot: Axle | None) -> None:
    """矢状面静态支撑检查, 重心须落在两轴接触点之间."""

    front_s, rear_s = state.front[0], state.rear[0]
    contacts = [
        0.0 if pivot is Axle.FRONT else front_s,
        0.0 if pivot is Axle.REAR else rear_s,
    ]
    forward = 1.0 if front_s >= rear_s else -1.0
    com = (front_s + rear_s) / 2 + context.params.com_offset * forward
    low, high = min(contacts), max(contacts)
    tolerance = constants.POSITION_TOLERANCE
    if not low - tolerance <= com <= high + tolerance:
        raise TipOverError(com, (low, high))


def _finish(frames: list[Frame]) -> Iterator[Frame]:
    """最后一帧轮速归零."""

    *head, last = frames
    yield from head
    yield replace(last, state=replace(last.state, speeds=WheelSpeeds()))


def _body_motion(
    state: RobotState,
    twist: BodyTwist,
    steps: int,
    context: Context,
) -> list[tuple[RobotState, Quad, WheelSpeeds]]:
    """把总位移 twist 均分为 steps 步, 用混合器换算每步的轮子转角."""

    per_step = BodyTwist(twist.vx / steps, twist.vy / steps, twist.omega / steps)
    speeds = inverse_mix(per_step, context.geometry, context.params, state.wheels)
    increments = speeds.as_tuple()
    rates = _rates(increments, context)
    torques = _rolling_torques(increments, context)
    results = []
    for _ in range(steps):
        state = replace(
            state, wheels=_turn(state.wheels, increments), speeds=rates
        )
        results.append((state, torques, rates))
    return results


def _drive(state: RobotState, arc: float, context: Context) -> Iterator[Frame]:
    geometry = context.geometry
    distance = arc * geometry.r_wheel
    steps = _steps(distance, geometry.r_wheel * context.dalpha)
    sign = direction_sign(context.obstacle.direction)
    frames = []
    ds = distance / steps
    for moved, torques, rates in _body_motion(
        state, BodyTwist(vy=sign * distance), steps, context
    ):
        state = _translate(moved, ds)
        _check_support(state, context, None)
        frames.append(Frame(state, torques, rates))
    yield from _finish(frames)


def _rotate(state: RobotState, angle: float, context: Context) -> Iterator[Frame]:
    geometry = context.geometry
    sweep = yaw_lever(context.params) * angle
    steps = _steps(sweep, geometry.r_wheel * context.dalpha)
    frames = []
    motion = _body_motion(state, BodyTwist(omega=angle), steps, context)
    for step, (moved, torques, rates) in enumerate(motion, start=1):
        turned = angle if step == steps else angle * step / steps
        heading = wrap_phase(state.heading + turned, TAU)
        frames.append(Frame(replace(moved, heading=heading), torques, rates))
    yield from _finish(frames)


def _lateral_move(state: RobotState, dx: float, context: Context) -> Iterator[Frame]:
    geometry = context.geometry
    achieved = apply_slip(dx, context.slip)
    steps = _steps(achieved, geometry.r_wheel * context.dalpha)
    frames = []
    y = state.y
    for moved, torques, rates in _body_motion(
        state, BodyTwist(vx=achieved), steps, context
    ):
        y += achieved / steps
        frames.append(Frame(replace(moved, y=y), torques, rates, achieved / steps))
    last = frames[-1]
    frames[-1] = replace(
        last, state=replace(last.state, align_rounds=state.align_rounds + 1)
    )
    yield from _finish(frames)


def _transform(
    state: RobotState, axle: Axle, target: WheelMode, context: Context
) -> Iterator[Frame]:
    geometry = context.geometry
    params = context.params
    if not state.speeds.is_zero:
        raise ModeError("transform requires all wheels at rest")
    if target is WheelMode.TRANSFORMING:
        raise ModeError("Transforming is not a transform target")
    start = max(state.wheels[i].tilt for i in axle.wheels)
    goal = geometry.tilt_max if target is WheelMode.LEGGED else 0.0
    steps = _steps(goal - start, context.dalpha)
    lift = stance_height(geometry) - geometry.r_wheel
    for step in range(1, steps + 1):
        last = step == steps
        tilt = goal if last else start + (goal - start) * step / steps
        servo = required_servo_torque(params.f_wheel, lever_arm(tilt, geometry))
        if servo > params.servo_torque_limit:
            raise StallError("servo", servo, params.servo_torque_limit)
        mode = target if last else WheelMode.TRANSFORMING
        wheels = list(state.wheels)
        for i in axle.wheels:
            wheels[i] = replace(wheels[i], tilt=tilt, mode=mode)
        for moved in (Axle.FRONT, Axle.REAR) if axle is Axle.BOTH else (axle,):
            s, _ = state.center(moved)
            z = ground_height(s, context.obstacle) + geometry.r_wheel
            z += lift * tilt / geometry.tilt_max
            if moved is Axle.FRONT:
                state = replace(state, front=(s, z))
            else:
                state = replace(state, rear=(s, z))
        state = replace(state, wheels=tuple(wheels))  # type: ignore[arg-type]
        if last:
            state = replace(state, align_rounds=0)
        yield Frame(state, ZERO_TORQUES, WheelSpeeds())


def _climb(state: RobotState, axle: Axle, context: Context) -> Iterator[Frame]:
    geometry = context.geometry
    params = context.params
    obstacle = context.obstacle
    direction = obstacle.direction
    if state.modes(axle) != {WheelMode.LEGGED}:
        raise ModeError(f"climbing needs the {axle} axle Legged")
    sign = direction_sign(direction)
    other = Axle.REAR if axle is Axle.FRONT else Axle.FRONT
    edge = (0.0, obstacle.height)
    length = contact_length(geometry, direction)
    load = params.f_wheel * params.weight_transfer
    rolling = rolling_torque(
        params.f_wheel, params.rolling_coefficient, geometry.r_wheel
    )
    max_step = effective_radius(geometry.tilt_max, geometry) * context.dalpha

    def frame(
        current: RobotState, turn: float, ds: float, lever: float | None
    ) -> Frame:
        """lever 为 None 时该轴只需滚动力矩, 否则以边缘为支点承载."""

        own = _roll(axle, sign * turn)
        carried = _roll(other, sign * ds / geometry.r_wheel)
        fl, fr, rl, rr = (a + b for a, b in zip(own, carried))
        increments = (fl, fr, rl, rr)
        rates = _rates(increments, context)
        current = replace(
            current, wheels=_turn(current.wheels, increments), speeds=rates
        )
        climbing = rolling if lever is None else load * lever
        if climbing > params.motor_torque_limit:
            raise StallError("motor", climbing, params.motor_torque_limit)
        _check_support(current, context, None if lever is None else axle)
        following = rolling if ds else 0.0
        fl, fr, rl, rr = (
            sign * (climbing if i in axle.wheels else following) for i in range(4)
        )
        return Frame(current, (fl, fr, rl, rr), rates)

    frames: list[Frame] = []
    center = state.center(axle)
    reeled, alpha, landing = climb_waypoints(
        center, obstacle.height, geometry, direction
    )

    # 钩挂
    rotation = hook_rotation(state, axle, edge, geometry, direction)
    if rotation > constants.POSITION_TOLERANCE:
        steps = _steps(rotation, context.dalpha)
        for _ in range(steps):
            result = frame(state, rotation / steps, 0.0, None)
            state = result.state
            frames.append(result)

    # 收拢
    for point in _glide(center, reeled, max_step):
        ds = point[0] - state.center(axle)[0]
        turn = math.dist(state.center(axle), point) / length
        moved = _move_axle(state, axle, point)
        result = frame(moved, turn, ds, abs(point[0] - edge[0]))
        state = result.state
        frames.append(result)

    # 绕边缘转动
    while alpha < math.pi / 2 - 1e-12:
        step = min(context.dalpha, math.pi / 2 - alpha)
        before = state.center(axle)[0]
        pivoted, torque = pivot_step(state, edge, step, geometry, params, axle)
        alpha += step
        ds = pivoted.center(axle)[0] - before
        result = frame(pivoted, step, ds, torque / load)
        state = result.state
        frames.append(result)

    # 落地
    for point in _glide(state.center(axle), landing, max_step):
        ds = point[0] - state.center(axle)[0]
        turn = math.dist(state.center(axle), point) / length
        result = frame(_move_axle(state, axle, point), turn, ds, None)
        state = result.state
        frames.append(result)

    if frames:
        yield from _finish(frames)
    else:
        yield Frame(state, ZERO_TORQUES, WheelSpeeds())


def _glide(start: Point, end: Point, max_step: float) -> list[Point]:
    """start 到 end 的直线插值点 (不含 start), 相邻点间距不超过 max_step."""

    length = math.dist(start, end)
    if length <= constants.POSITION_TOLERANCE:
        return []
    steps = _steps(length, max_step)
    return [
        (
            start[0] + (end[0] - start[0]) * k / steps,
            start[1] + (end[1] - start[1]) * k / steps,
        )
        for k in range(1, steps + 1)
    ]
