from dataclasses import dataclass, field
from enum import StrEnum
from logging import Logger
from typing import TYPE_CHECKING, Iterator, Mapping, Sequence

from pwt.omniwheg.errors import DomainError

if TYPE_CHECKING:
    from pwt.omniwheg.config import Obstacle, RobotParams, WheelGeometry

Point = tuple[float, float]
Quad = tuple[float, float, float, float]

WHEEL_NAMES = ("fl", "fr", "rl", "rr")


class Direction(StrEnum):
    FORWARD = "forward"
    BACKWARD = "backward"


class LateralDirection(StrEnum):
    LEFT = "left"
    RIGHT = "right"


class WheelMode(StrEnum):
    WHEELED = "Wheeled"
    TRANSFORMING = "Transforming"
    LEGGED = "Legged"


class Axle(StrEnum):
    FRONT = "front"
    REAR = "rear"
    BOTH = "both"

    @property
    def wheels(self) -> tuple[int, ...]:
        """轮子索引 (fl, fr, rl, rr 顺序), 左轮在前."""
        match self:
            case Axle.FRONT:
                return (0, 1)
            case Axle.REAR:
                return (2, 3)
        return (0, 1, 2, 3)


class ClimbPhase(StrEnum):
    SQUARE_UP = "SquareUp"
    ALIGN_FRONT = "AlignFront"
    TRANSFORM_FRONT = "TransformFront"
    CLIMB_FRONT = "ClimbFront"
    RESET_FRONT = "ResetFront"
    ALIGN_REAR = "AlignRear"
    TRANSFORM_REAR = "TransformRear"
    CLIMB_REAR = "ClimbRear"
    RESET_REAR = "ResetRear"
    DONE = "Done"
    FAILED = "Failed"

    @property
    def order(self) -> int:
        """阶段在攀爬流程中的序号, Failed 为 -1."""
        if self is ClimbPhase.FAILED:
            return -1
        return list(ClimbPhase).index(self)

    @property
    def terminal(self) -> bool:
        return self in (ClimbPhase.DONE, ClimbPhase.FAILED)


WORKING_PHASES = tuple(p for p in ClimbPhase if not p.terminal)


class ActionKind(StrEnum):
    LATERAL_MOVE = "LateralMove"
    ROTATE = "Rotate"
    TRANSFORM = "Transform"
    DRIVE = "Drive"
    STOP = "Stop"


@dataclass(frozen=True)
class WheelState:
    phase: float
    tilt: float = 0.0
    mode: WheelMode = WheelMode.WHEELED

    def __post_init__(self) -> None:
        if (self.mode is WheelMode.WHEELED) != (self.tilt == 0):
            raise DomainError(f"mode {self.mode} inconsistent with tilt {self.tilt}")


@dataclass(frozen=True)
class BodyTwist:
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0


@dataclass(frozen=True)
class WheelSpeeds:
    w_fl: float = 0.0
    w_fr: float = 0.0
    w_rl: float = 0.0
    w_rr: float = 0.0

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "WheelSpeeds":
        w_fl, w_fr, w_rl, w_rr = (float(v) for v in values)
        return cls(w_fl, w_fr, w_rl, w_rr)

    def as_tuple(self) -> Quad:
        return (self.w_fl, self.w_fr, self.w_rl, self.w_rr)

    def __iter__(self) -> Iterator[float]:
        return iter(self.as_tuple())

    @property
    def is_zero(self) -> bool:
        return not any(self.as_tuple())


@dataclass(frozen=True)
class AlignmentCommand:
    delta_theta_wheel: float
    delta_x: float
    direction: LateralDirection

    @property
    def signed_dx(self) -> float:
        """有符号横向位移, 向左为正."""
        if self.direction is LateralDirection.LEFT:
            return self.delta_x
        return -self.delta_x


@dataclass(frozen=True)
class AlignmentTrace:
    commanded: tuple[float, ...]
    achieved: tuple[float, ...]
    residual: float
    aligned: bool

    @property
    def total_commanded(self) -> float:
        return sum(abs(v) for v in self.commanded)

    @property
    def total_achieved(self) -> float:
        return sum(abs(v) for v in self.achieved)


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    axle: Axle
    magnitude: float = 0.0
    unit: str = ""
    phase: ClimbPhase = ClimbPhase.SQUARE_UP
    target: WheelMode | None = None
    reason: str | None = None

    @property
    def detail(self) -> str:
        if self.target is not None:
            return str(self.target)
        return self.reason or ""


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    heading: float
    front: Point
    rear: Point
    wheels: tuple[WheelState, WheelState, WheelState, WheelState]
    speeds: WheelSpeeds = WheelSpeeds()
    align_rounds: int = 0

    def center(self, axle: Axle) -> Point:
        return self.rear if axle is Axle.REAR else self.front

    def modes(self, axle: Axle = Axle.BOTH) -> set[WheelMode]:
        return {self.wheels[i].mode for i in axle.wheels}

    def phases(self) -> Quad:
        fl, fr, rl, rr = (w.phase for w in self.wheels)
        return (fl, fr, rl, rr)


@dataclass(frozen=True)
class Frame:
    """世界模型单步推进的结果."""

    state: RobotState
    torques: Quad
    speeds: WheelSpeeds
    lateral: float = 0.0


@dataclass(frozen=True)
class TelemetrySample:
    t: float
    currents: Quad
    torques: Quad
    s: float
    z: float
    phase: ClimbPhase


@dataclass(frozen=True)
class ClimbVerdict:
    ok: bool
    limiting_factor: str | None
    hook_limit: float
    motor_required: float
    servo_required: float


@dataclass(frozen=True)
class FeasibilityReport:
    motor_required: float
    servo_required: float
    motor_limit: float
    servo_limit: float

    @property
    def motor_ok(self) -> bool:
        return self.motor_required <= self.motor_limit

    @property
    def servo_ok(self) -> bool:
        return self.servo_required <= self.servo_limit

    @property
    def ok(self) -> bool:
        return self.motor_ok and self.servo_ok


@dataclass
class ClimbOutcome:
    success: bool
    trajectory: list[Point]
    peak_torque: float
    mean_torque: float
    total_lateral_displacement: float
    failure_reason: str | None = None
    limiting_factor: str | None = None
    max_align_displacement: float = 0.0
    telemetry: list[TelemetrySample] = field(default_factory=list, repr=False)
    actions: list[Action] = field(default_factory=list, repr=False)


@dataclass
class Rollout:
    """规划器与世界模型闭环运行的结果."""

    actions: list[Action]
    state: RobotState
    phase: ClimbPhase
    failure_reason: str | None = None
    limiting_factor: str | None = None


@dataclass(frozen=True)
class MotorStats:
    peak: float
    mean: float
    samples: int


@dataclass
class LogStats:
    motors: Mapping[str, MotorStats]
    segments: Mapping[str, Mapping[str, MotorStats]]
    peak_torque: float
    mean_torque: float
    samples: int


@dataclass
class Context:
    geometry: "WheelGeometry"
    params: "RobotParams"
    obstacle: "Obstacle"
    slip: float
    dalpha: float
    drive_rate: float
    logger: Logger = field(repr=False)


@dataclass(frozen=True)
class SweepCell:
    height: float
    direction: Direction
    outcome: ClimbOutcome
    telemetry: str


@dataclass(frozen=True)
class AlignmentPoint:
    """对齐曲线上的一个点, difference 为左右轮相位差 (rad)."""

    difference: float
    analytic: float
    achieved: float
    trace: AlignmentTrace
