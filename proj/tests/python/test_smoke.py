import json
import os
import pathlib

import pytest

import corridor

FIXTURES = pathlib.Path(os.environ["CORRIDOR_FIXTURES"])


def read(name):
    return (FIXTURES / name).read_text()


def test_parse_validate_emit_round_trip():
    instance = corridor.parse(read("chain.lp"))
    assert corridor.validate(instance) == []
    assert instance.horizon == 5
    assert instance.junctions == ["j1", "j2"]
    assert len(instance.links) == 3
    assert instance.goal_links == ["link(j2,z,b)"]
    assert corridor.parse(corridor.emit(instance)) == instance


def test_simulate_reports_raw_counters():
    instance = corridor.parse(read("chain.lp"))
    result = corridor.simulate(instance)
    assert result["horizon"] == 5
    assert result["final_counters"]["link(j2,z,b)"] == 150000
    assert result["final_occupancies"]["link(a,x,j1)"] == 800000
    csv = corridor.trace_csv(instance)
    assert csv.startswith("time,link,")


def test_decision_points():
    instance = corridor.parse(read("single_junction.lp"))
    assert corridor.decision_points(instance, "j1") == [(1, 21), (2, 46)]
    with pytest.raises(ValueError):
        corridor.decision_points(instance, "j9")


def test_solve_and_replay_the_plan():
    instance = corridor.parse(read("fork.lp"))
    result = json.loads(corridor.solve(instance))
    assert result["status"] == "optimal"
    assert result["value"][0]["scaled"] == 900000
    assert [c["config"] for c in result["plan"]["junctions"]["j1"]] == [
        "j1_c2",
        "j1_c2",
    ]

    plan_json = json.dumps(result["plan"])
    replay = corridor.simulate(instance, plan_json)
    assert replay["final_counters"]["link(j1,side_out,d)"] == 900000

    report = corridor.check_plan(instance, plan_json)
    assert report["legal"] and report["feasible"]
    assert report["value"] == [900000]


def test_engines_and_modes_agree():
    instance = corridor.parse(read("fork.lp"))
    values = {
        engine: json.loads(corridor.solve(instance, engine=engine, beam_width=3))[
            "value"
        ][0]["scaled"]
        for engine in ("exhaustive", "bnb", "beam")
    }
    assert set(values.values()) == {900000}

    yes = json.loads(corridor.solve(instance, mode="decision", bound="9"))
    assert yes["status"] == "satisfied"
    no = json.loads(corridor.solve(instance, mode="decision", bound="9.00001"))
    assert no["status"] == "unsatisfiable"


def test_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        corridor.parse("link(a,x.\n")
    decimal_text = read("chain.lp").replace("50000", "0.5")
    with pytest.raises(ValueError):
        corridor.parse(decimal_text)  # fractional volumes need decimal_input
    assert corridor.parse(decimal_text, decimal_input=True).horizon == 5
    with pytest.raises(ValueError):
        corridor.solve(corridor.parse(read("fork.lp")), engine="magic")
