"""End-to-end smoke tests for the compiled extension module."""

import json
import math

import pytest

import mrlop


def test_battery_projection_oracle():
    p = mrlop.PlantParams()
    p.finalize()
    assert mrlop.project_battery(0.5, 0.99, 0.5, p) == pytest.approx(11.84, rel=1e-9)
    assert mrlop.project_battery(-1.0, 0.5, 0.5, p) == pytest.approx(-400.0)
    assert mrlop.project_battery(-1.0, 0.0, 0.5, p) == 0.0
    assert mrlop.project_pump(2.0, p) == 0.0
    assert mrlop.project_pump(15.0, p) == 12.0
    assert mrlop.tank_energy_from_temp(80.0, p) == pytest.approx(955.5)
    assert mrlop.tank_temp_from_energy(955.5, p) == pytest.approx(80.0)


def test_terminal_cost_oracle():
    assert mrlop.terminal_cost(0.1, 72.0, 0.0, 70.0) == pytest.approx(510.0)
    assert mrlop.terminal_cost(0.0, 70.0, 0.0, 70.0) == 0.0


def test_pinball_and_quantile():
    assert mrlop.pinball_loss(1.0, 0.6, 0.95) == pytest.approx(0.38)
    assert mrlop.pinball_loss(0.6, 1.0, 0.95) == pytest.approx(0.02)
    assert mrlop.quantile([1.0, 2.0, 3.0, 4.0], 0.5) == pytest.approx(2.5)
    assert mrlop.quantile([1.0, 2.0, 3.0, 4.0], 0.25) == pytest.approx(1.75)


def test_simulate_dead_hour_is_free():
    x0 = mrlop.PlantState()
    x0.soc = 0.5
    x0.t_median = 70.0
    steps = 4
    result = mrlop.simulate(
        x0,
        [0.0] * (2 * steps),
        prices=[0.2] * steps,
        irradiance=[0.0] * steps,
        load=[0.0] * steps,
        dt_hours=0.5,
    )
    assert len(result["soc"]) == steps
    assert result["total_cost_usd"] == pytest.approx(0.0)
    assert result["soc"][-1] == pytest.approx(0.5)
    assert result["t_median_c"][-1] == pytest.approx(70.0)


def test_optimizer_spends_budget_and_improves():
    def sphere(x):
        return sum(v * v for v in x)

    result = mrlop.optimize(sphere, [-5.0] * 4, [5.0] * 4, pop_size=16, budget=600, seed=3)
    assert result["evals"] == 600
    history = result["history"]
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))
    assert result["best_cost"] < history[0]
    assert result["best_cost"] == pytest.approx(sphere(result["best"]))

    replay = mrlop.optimize(sphere, [-5.0] * 4, [5.0] * 4, pop_size=16, budget=600, seed=3)
    assert replay["best"] == result["best"]


def test_random_forest_degenerate_variance():
    X = [[0.0], [1.0], [2.0], [3.0]]
    y = [3.25, 3.25, 3.25, 3.25]
    rf = mrlop.RandomForest.fit(X, y, n_trees=20, seed=1)
    mean, std = rf.predict([1.5])
    assert mean == pytest.approx(3.25)
    assert std == pytest.approx(0.0)


def test_gradient_boosting_frozen_learning_rate():
    X = [[0.0], [1.0], [2.0], [3.0]]
    y = [1.0, 2.0, 3.0, 4.0]
    gb = mrlop.GradientBoosting.fit(X, y, loss="quantile", alpha=0.95,
                                    n_stages=10, learning_rate=0.0)
    # zero learning rate keeps the initial constant: the sample median
    assert gb.predict([0.0]) == pytest.approx(2.5)
    with pytest.raises(ValueError):
        mrlop.GradientBoosting.fit(X, y, loss="huber")


def test_synthetic_weather_shape():
    hours, ghi = mrlop.synth_weather(2, peak_ghi=1000.0)
    assert len(hours) == 48
    assert len(ghi) == 48
    assert ghi[12] == pytest.approx(1000.0)  # clear-sky noon
    assert ghi[0] == 0.0 and ghi[23] == 0.0
    assert sum(1 for g in ghi[:24] if g > 0.0) == 13
    assert hours[1] - hours[0] == pytest.approx(1.0)


def test_rule_plan_shape():
    prices = [0.10] * 24
    plan = mrlop.plan_day(prices)
    assert len(plan) == 96  # 48 half-hour steps, interleaved [u_pum, u_bat]
    pump = plan[0::2]
    bat = plan[1::2]
    assert max(pump) > 0.0  # active hours run the heat pump
    assert all(-1.0 <= b <= 1.0 for b in bat)


def test_detect_reset():
    a = [0.1, 0.2, 0.3]
    assert not mrlop.detect_reset(a, a)
    assert mrlop.detect_reset([0.1, 0.2, 0.31], a)
    with pytest.raises(ValueError):
        mrlop.detect_reset(a, [0.1, 0.2])  # length mismatch is a usage error


def test_run_single_round_trip():
    spec = {
        "strategies": ["RULE"],
        "seeds": [1],
        "horizon_days": 1,
        "data": {"weather_days": 4, "jitter_frac": 0.1, "weather_seed": 7},
    }
    log = json.loads(mrlop.run_single(json.dumps(spec), "RULE", 1))
    assert log["strategy"] == "RULE"
    assert log["seed"] == 1
    assert log["cycles_run"] == 1
    assert log["evals"]["total"] == 0
    assert len(log["trajectory"]) == 48
    assert math.isfinite(log["total_cost_usd"])
