import logging
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from pwt.omniwheg.config import Obstacle, RunConfig, Scenario
from pwt.omniwheg.entity import (
    WORKING_PHASES,
    Action,
    ActionKind,
    Axle,
    ClimbPhase,
    RobotState,
    WheelMode,
    WheelSpeeds,
    WheelState,
)
from pwt.omniwheg.errors import DomainError, InfeasibleError, ModeError
from pwt.omniwheg.planner import format_actions, next_action, plan_climb, rollout
from pwt.omniwheg.world import advance, initial_state, make_context

GOLDEN = Path(__file__).parent / "golden"
SCENARIO = Scenario()


def with_front_phases(state: RobotState, left: float, right: float) -> RobotState:
    wheels = (WheelState(left), WheelState(right), *state.wheels[2:])
    return replace(state, wheels=wheels)


def decide(phase: ClimbPhase, state: RobotState, scenario: Scenario = SCENARIO):
    return next_action(
        phase, state, scenario.obstacle, scenario.geometry, scenario.params
    )


def skeleton(actions: list[Action]) -> list[str]:
    return [f"{a.kind},{a.axle},{a.phase}" for a in actions]


def test_align_half_pitch_difference():
    state = with_front_phases(initial_state(SCENARIO), 0.0, math.radians(45))
    action, successor = decide(ClimbPhase.ALIGN_FRONT, state)
    assert action.kind is ActionKind.LATERAL_MOVE
    assert action.axle is Axle.FRONT
    assert action.magnitude == pytest.approx(0.0373, abs=1e-4)
    assert action.unit == "m"
    assert successor is ClimbPhase.ALIGN_FRONT


def test_align_without_difference():
    action, successor = decide(ClimbPhase.ALIGN_FRONT, initial_state(SCENARIO))
    assert action.kind is ActionKind.LATERAL_MOVE
    assert action.magnitude == 0.0
    assert successor is ClimbPhase.TRANSFORM_FRONT


def test_align_gives_up_after_three_rounds():
    state = with_front_phases(initial_state(SCENARIO), 0.0, 0.3)
    state = replace(state, align_rounds=3)
    action, successor = decide(ClimbPhase.ALIGN_FRONT, state)
    assert action.kind is ActionKind.STOP
    assert action.reason == "alignment"
    assert successor is ClimbPhase.FAILED


def test_square_up_corrects_heading():
    state = replace(initial_state(SCENARIO), heading=0.1)
    action, successor = decide(ClimbPhase.SQUARE_UP, state)
    assert action.kind is ActionKind.ROTATE
    assert action.magnitude == pytest.approx(-0.1)
    assert successor is ClimbPhase.SQUARE_UP


def test_transform_needs_alignment():
    state = with_front_phases(initial_state(SCENARIO), 0.0, 0.3)
    with pytest.raises(ModeError):
        decide(ClimbPhase.TRANSFORM_FRONT, state)


def test_transform_needs_rest():
    state = replace(initial_state(SCENARIO), speeds=WheelSpeeds(0.1, 0.1, 0.1, 0.1))
    with pytest.raises(ModeError):
        decide(ClimbPhase.TRANSFORM_FRONT, state)


def test_transform_opens_aligned_axle():
    action, successor = decide(ClimbPhase.TRANSFORM_FRONT, initial_state(SCENARIO))
    assert action.kind is ActionKind.TRANSFORM
    assert action.target is WheelMode.LEGGED
    assert action.magnitude == pytest.approx(SCENARIO.geometry.tilt_max)
    assert successor is ClimbPhase.CLIMB_FRONT


def test_transform_phase_rejects_high_obstacle():
    scenario = Scenario(obstacle=Obstacle(height=0.30))
    action, successor = decide(
        ClimbPhase.TRANSFORM_FRONT, initial_state(scenario), scenario
    )
    assert action.kind is ActionKind.STOP
    assert action.reason == "hook reach"
    assert successor is ClimbPhase.FAILED


@pytest.mark.parametrize("phase", [ClimbPhase.DONE, ClimbPhase.FAILED])
def test_no_action_after_terminal_phase(phase):
    with pytest.raises(DomainError):
        decide(phase, initial_state(SCENARIO))


def test_plan_matches_golden_sequence():
    expected = (GOLDEN / "plan_h020_forward.txt").read_text().splitlines()
    actions = plan_climb(SCENARIO)
    assert skeleton(actions) == expected
    phases = sorted({a.phase for a in actions}, key=lambda p: p.order)
    assert tuple(phases) == WORKING_PHASES


def test_flat_ground_plan_only_drives():
    actions = plan_climb(Scenario(obstacle=Obstacle(height=0.0)))
    assert [a.kind for a in actions] == [ActionKind.DRIVE]


def test_backward_plan_at_backward_limit():
    scenario = Scenario(obstacle=Obstacle(height=0.24, direction="backward"))
    actions = plan_climb(scenario)
    transforms = [a for a in actions if a.kind is ActionKind.TRANSFORM]
    assert [(a.axle, a.target) for a in transforms] == [
        (Axle.REAR, WheelMode.LEGGED),
        (Axle.REAR, WheelMode.WHEELED),
        (Axle.FRONT, WheelMode.LEGGED),
        (Axle.FRONT, WheelMode.WHEELED),
    ]


def test_infeasible_plan_names_check():
    with pytest.raises(InfeasibleError) as info:
        plan_climb(Scenario(obstacle=Obstacle(height=0.30)))
    assert info.value.check == "hook reach"


def test_planning_is_idempotent():
    scenario = Scenario(
        run=RunConfig(phase_offsets=(0.1, 0.5, -0.2, 0.3), heading_error=0.05)
    )
    assert plan_climb(scenario) == plan_climb(scenario)


def random_scenarios(count: int):
    rng = np.random.default_rng(2024)
    for _ in range(count):
        direction = "forward" if rng.random() < 0.5 else "backward"
        run = RunConfig(
            phase_offsets=tuple(float(v) for v in rng.uniform(-math.pi, math.pi, 4)),
            heading_error=float(rng.uniform(-0.3, 0.3)),
            slip=float(rng.uniform(0.0, 0.2)),
            dalpha=0.02,
        )
        obstacle = Obstacle(
            height=round(float(rng.uniform(0.05, 0.24)), 3), direction=direction
        )
        yield Scenario(obstacle=obstacle, run=run)


def test_random_plans_keep_order_and_interlocks():
    logger = logging.getLogger("OmniWheg.test")
    for scenario in random_scenarios(100):
        actions = plan_climb(scenario)
        orders = [a.phase.order for a in actions]
        assert orders == sorted(orders)
        transforms = [a for a in actions if a.kind is ActionKind.TRANSFORM]
        assert len(transforms) == 4
        for index, action in enumerate(actions):
            if action.target is WheelMode.LEGGED:
                previous = actions[index - 1]
                assert previous.kind is ActionKind.LATERAL_MOVE
                assert previous.axle is action.axle
        # 重放动作, 变形前轮速必须为零
        context = make_context(scenario, logger)
        state = initial_state(scenario)
        for action in actions:
            if action.kind is ActionKind.TRANSFORM:
                assert state.speeds.is_zero
            for frame in advance(state, action, context):
                state = frame.state


def test_rollout_records_failure():
    result = rollout(Scenario(obstacle=Obstacle(height=0.26, direction="backward")))
    assert result.phase is ClimbPhase.FAILED
    assert result.failure_reason == "hook reach"
    assert result.actions[-1].kind is ActionKind.STOP


def test_rollout_reports_motor_limit():
    scenario = Scenario.model_validate({"params": {"motor_torque_limit": 1.6}})
    result = rollout(scenario)
    assert result.phase is ClimbPhase.FAILED
    assert result.limiting_factor == "motor torque"


def test_format_actions():
    actions = [
        Action(ActionKind.LATERAL_MOVE, Axle.FRONT, 0.0373064727, "m"),
        Action(
            ActionKind.TRANSFORM,
            Axle.REAR,
            0.0,
            "rad",
            ClimbPhase.RESET_REAR,
            target=WheelMode.WHEELED,
        ),
        Action(ActionKind.STOP, Axle.REAR, phase=ClimbPhase.ALIGN_REAR, reason="x"),
    ]
    assert format_actions(actions) == (
        "LateralMove,front,0.0373064727,m,SquareUp,\n"
        "Transform,rear,0,rad,ResetRear,Wheeled\n"
        "Stop,rear,0,,AlignRear,x\n"
    )
    assert format_actions([]) == ""
