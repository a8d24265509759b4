import functools
import math

import pytest

from pwt.omniwheg import constants
from pwt.omniwheg.config import Obstacle, RunConfig, Scenario
from pwt.omniwheg.entity import ActionKind, ClimbPhase
from pwt.omniwheg.sim import simulate, telemetry_rows, write_telemetry


def scenario_at(height: float, direction: str = "forward", **run) -> Scenario:
    return Scenario(
        obstacle=Obstacle(height=height, direction=direction), run=RunConfig(**run)
    )


@pytest.mark.parametrize(
    "height, direction, success",
    [
        (0.12, "forward", True),
        (0.20, "forward", True),
        (0.26, "forward", True),
        (0.28, "forward", False),
        (0.20, "backward", True),
        (0.24, "backward", True),
        (0.26, "backward", False),
    ],
)
def test_success_matrix(height, direction, success):
    outcome = simulate(scenario_at(height, direction))
    assert outcome.success is success
    if not success:
        assert outcome.limiting_factor == "hook reach"
        assert outcome.actions[-1].kind is ActionKind.STOP


GRID_HEIGHTS = constants.SWEEP_HEIGHTS_DEFAULT + (0.28,)
GRID_DIRECTIONS = ("forward", "backward")
HIGHEST_CLIMB = {"forward": 0.26, "backward": 0.24}


@functools.cache
def grid_outcome(height: float, direction: str):
    return simulate(scenario_at(height, direction))


@pytest.mark.parametrize("direction", GRID_DIRECTIONS)
@pytest.mark.parametrize("height", GRID_HEIGHTS)
def test_sweep_grid(height, direction):
    outcome = grid_outcome(height, direction)
    assert outcome.success is (height <= HIGHEST_CLIMB[direction] + 1e-9)
    if not outcome.success:
        assert outcome.limiting_factor == constants.REASON_HOOK_REACH

    f_wheel = constants.PARAMS_F_WHEEL_DEFAULT
    torque_limit = f_wheel * constants.GEOMETRY_R_CONTACT_DEFAULT
    for sample in outcome.telemetry:
        assert max(abs(torque) for torque in sample.torques) <= torque_limit + 1e-9

    # 绕边缘转动时 s <= 0, 之后的落地滑移不计
    pivot = [
        sample.z
        for sample in outcome.telemetry
        if sample.phase is ClimbPhase.CLIMB_FRONT and sample.s <= 1e-9
    ]
    for before, after in zip(pivot, pivot[1:]):
        assert after - before >= -1e-12

    bound = constants.GEOMETRY_R_LEG_DEFAULT * RunConfig().dalpha + 1e-9
    for before, after in zip(outcome.trajectory, outcome.trajectory[1:]):
        assert math.dist(before, after) <= bound


@pytest.mark.parametrize("height", GRID_HEIGHTS)
def test_backward_success_implies_forward(height):
    if grid_outcome(height, "backward").success:
        assert grid_outcome(height, "forward").success


def test_forward_climb_costs_more_torque_on_average():
    forward = grid_outcome(0.24, "forward")
    backward = grid_outcome(0.24, "backward")
    assert forward.mean_torque > backward.mean_torque


def test_lands_on_top_surface():
    outcome = simulate(scenario_at(0.20))
    s, z = outcome.trajectory[-1]
    assert s > 0
    assert z == pytest.approx(0.20 + 0.095)


@pytest.mark.parametrize("height", [0.12, 0.20, 0.24, 0.26])
def test_forward_peak_torque_envelope(height):
    outcome = simulate(scenario_at(height))
    assert 1.2 <= outcome.peak_torque <= 1.7793 + 1e-3
    assert 0 < outcome.mean_torque < outcome.peak_torque


@pytest.mark.parametrize("height", [0.20, 0.24])
def test_backward_peak_torque(height):
    outcome = simulate(scenario_at(height, "backward"))
    assert outcome.success
    assert outcome.peak_torque == pytest.approx(13.48 * 0.112, abs=1e-3)


def test_torque_is_current_times_constant():
    outcome = simulate(scenario_at(0.20))
    for sample in outcome.telemetry:
        for current, torque in zip(sample.currents, sample.torques):
            assert torque == pytest.approx(current * 0.741, abs=1e-12)


def test_trajectory_is_continuous():
    scenario = scenario_at(0.20, phase_offsets=(0.0, 0.3, 0.0, -0.2))
    outcome = simulate(scenario)
    bound = 0.150 * scenario.run.dalpha + 1e-9
    for before, after in zip(outcome.trajectory, outcome.trajectory[1:]):
        assert math.dist(before, after) <= bound


def test_time_advances_per_step():
    scenario = scenario_at(0.20, drive_rate=2.0)
    outcome = simulate(scenario)
    period = scenario.run.dalpha / 2.0
    times = [sample.t for sample in outcome.telemetry]
    assert times[0] == 0.0
    assert times[-1] == pytest.approx((len(times) - 1) * period)


def test_phase_column_follows_climb():
    outcome = simulate(scenario_at(0.20))
    orders = [sample.phase.order for sample in outcome.telemetry]
    assert orders == sorted(orders)
    assert outcome.telemetry[-1].phase is ClimbPhase.RESET_REAR


def test_alignment_displacement_reported():
    scenario = scenario_at(0.20, phase_offsets=(0.0, math.radians(45), 0.0, 0.0))
    outcome = simulate(scenario)
    assert outcome.success
    assert outcome.max_align_displacement >= 0.0373
    assert outcome.total_lateral_displacement > 0


def test_simulation_is_deterministic():
    first = simulate(scenario_at(0.20, randomize_phases=True, seed=7))
    second = simulate(scenario_at(0.20, randomize_phases=True, seed=7))
    assert telemetry_rows(first.telemetry) == telemetry_rows(second.telemetry)
    assert first.actions == second.actions


def test_seed_changes_initial_phases():
    first = simulate(scenario_at(0.20, randomize_phases=True, seed=1))
    second = simulate(scenario_at(0.20, randomize_phases=True, seed=2))
    assert first.actions != second.actions


def test_flat_ground_only_rolls():
    outcome = simulate(scenario_at(0.0))
    assert outcome.success
    assert [a.kind for a in outcome.actions] == [ActionKind.DRIVE]
    assert outcome.total_lateral_displacement == 0.0
    assert outcome.peak_torque == pytest.approx(0.025612, abs=1e-6)


def test_write_telemetry(tmp_path):
    outcome = simulate(scenario_at(0.0))
    path = tmp_path / "telemetry.csv"
    write_telemetry(outcome.telemetry, path)
    lines = path.read_bytes().split(b"\n")
    assert lines[0] == b"t,i_fl,i_fr,i_rl,i_rr,tau_fl,tau_fr,tau_rl,tau_rr,s,z,phase"
    assert lines[1] == b"0,0,0,0,0,0,0,0,0,-0.3,0.095,SquareUp"
    assert lines[-1] == b""
    assert len(lines) == len(outcome.telemetry) + 2
