import json
from pathlib import Path

import pytest

import planner

DATA = Path(__file__).resolve().parents[2] / "data"


def test_tiny_optimum():
    problem = planner.load_problem(str(DATA / "tiny.json"))
    assert problem.origins == ["W1"]
    out = planner.solve(problem, lambda_=0.5, alpha=0.75)
    assert out["status"] == "optimal"
    assert out["objective"] == pytest.approx(136.0)
    assert out["violations"] == 0


def test_cvar_spot_values():
    costs, probs = [10, 20, 30, 40], [0.25] * 4
    assert planner.cvar(costs, probs, 0.75)[1] == pytest.approx(40)
    assert planner.cvar(costs, probs, 0.5)[1] == pytest.approx(35)
    value, weights = planner.cvar_dual(costs, probs, 0.5)
    assert value == pytest.approx(35)
    assert weights == pytest.approx([0, 0, 0.25, 0.25])


def test_bad_alpha_raises():
    problem = planner.load_problem(str(DATA / "tiny.json"))
    with pytest.raises(planner.PlannerError):
        planner.solve(problem, alpha=1.0)


def test_validation_codes(tmp_path):
    doc = json.loads((DATA / "tiny.json").read_text())
    doc["scenarios"][0]["probability"] = 0.9
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    codes = [code for code, _, _ in planner.validate(str(bad))]
    assert "PROB_SUM" in codes
    assert planner.validate(str(DATA / "tiny.json")) == []


def test_round_trip_and_metrics():
    problem = planner.load_problem(str(DATA / "capacity.json"))
    again = planner.parse_problem(problem.to_json())
    assert again.scenario_count == problem.scenario_count == 8
    row = planner.stochastic_values(problem)
    assert row["WS"] <= row["SS"] + 1e-9 <= row["EEV"] + 2e-9


def test_capacity_grid():
    rows = planner.capacity_grid(planner.load_problem(str(DATA / "capacity.json")))
    assert [r["capacity"] for r in rows] == [4, 5, 6, 7, 8, 9, 10]
    assert rows[-1]["unmet"] == 0
    assert "Generals" in planner.export_lp(planner.load_problem(str(DATA / "tiny.json")))
