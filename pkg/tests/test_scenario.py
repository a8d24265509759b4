import math
from pathlib import Path

import pytest

from pwt.omniwheg.config import Scenario
from pwt.omniwheg.entity import Direction
from pwt.omniwheg.errors import ScenarioError
from pwt.omniwheg.scenario import load_scenario, parse_scenario, serialize_scenario

EXAMPLE = Path(__file__).parent.parent / "docs" / "example.scenario"


def test_empty_scenario_uses_defaults():
    assert parse_scenario("") == Scenario()
    assert parse_scenario("# comment only\n\n") == Scenario()


def test_values_and_comments():
    scenario = parse_scenario(
        "[obstacle]\n"
        "height = 0.16   # step\n"
        "direction = Backward\n"
        "\n"
        "[run]\n"
        "phase_offsets = 0.1, -0.2, 0, 0.3\n"
        "randomize_phases = true\n"
    )
    assert scenario.obstacle.height == 0.16
    assert scenario.obstacle.direction is Direction.BACKWARD
    assert scenario.run.phase_offsets == (0.1, -0.2, 0.0, 0.3)
    assert scenario.run.randomize_phases is True
    assert scenario.geometry == Scenario().geometry


def test_height_out_of_range_names_line():
    with pytest.raises(ScenarioError) as info:
        parse_scenario("[obstacle]\ndirection = forward\nheight = 0.45\n")
    assert info.value.line == 3
    assert "height" in str(info.value)


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("[obstacle]\nwidth = 0.2\n", 2, "unknown key 'width'"),
        ("[run]\nslip = 0.1\n[motors]\n", 3, "unknown section [motors]"),
        ("height = 0.2\n", 1, "outside of any section"),
        ("[run]\nslip = 0.1\n\nslip = 0.2\n", 4, "first on line 2"),
        ("[obstacle]\nheight 0.2\n", 2, "unexpected"),
        ("[run]\nslip = 1.5\n", 2, "run.slip"),
        ("[run]\nphase_offsets = 0, 1\n", 2, "phase_offsets"),
    ],
)
def test_errors_name_line(text, line, fragment):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    assert info.value.line == line
    assert fragment in str(info.value)
    assert str(info.value).startswith(f"line {line}: ")


def test_derived_wheel_load():
    scenario = parse_scenario("[params]\nmass_total = 8.0\n")
    assert scenario.params.f_wheel == pytest.approx(8.0 * 9.81 / 4)


def test_serialize_roundtrip():
    scenario = parse_scenario(
        "[geometry]\nr_leg = 0.16\n"
        "[obstacle]\nheight = 0.1\ndirection = backward\n"
        "[run]\nphase_offsets = 0.1, 0.2, 0.3, 0.4\nseed = 9\noutput = results\n"
    )
    text = serialize_scenario(scenario)
    assert "direction = backward\n" in text
    assert "phase_offsets = 0.1,0.2,0.3,0.4\n" in text
    assert parse_scenario(text) == scenario


def test_serialize_skips_unset_output():
    text = serialize_scenario(Scenario())
    assert "output" not in text
    assert text.startswith("[geometry]\n")
    assert parse_scenario(text) == Scenario()


def test_example_file_parses():
    scenario = load_scenario(EXAMPLE)
    assert scenario.obstacle.height == 0.20
    assert scenario.run.phase_offsets == (0.0, 0.3, 0.0, -0.2)
    assert scenario.run.dalpha == pytest.approx(math.radians(0.5))


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_scenario("does-not-exist.scenario")
