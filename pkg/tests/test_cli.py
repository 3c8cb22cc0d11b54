import json
import os

import pytest

from coopetition.cli import (
    EXIT_MODEL,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_USAGE,
    main,
    parse_scenario_text,
    scenario_to_text,
)
from coopetition.scenario import renault_nissan_scenario

GOOD_SCENARIO = """
[actors]
a: Actor A
b: Actor B

[trust_params]
lambda_plus = 0.10
lambda_minus = 0.30
mu_r = 0.60
delta_r = 0.03
xi = 0.50
rho = 0.20
kappa = 1.00
discount = 0.95

[economy]
variant = power
beta_exponent = 0.75
theta = 1.0
gamma = 1.0
shares = 0.5 0.5
endowments = 0.0 0.0
baselines = 1.0 1.0

[initial]
trust = 0.5
reputation_damage = 0.0

[dependence]
a b = 0.4
b a = 0.6

[phases]
build 5 1.0 1.0
breach 2 -2.0 -2.0
mend 5 0.5 0.5
"""


class TestScenarioFormat:
    def test_parse_good_scenario(self):
        scenario = parse_scenario_text(GOOD_SCENARIO)
        assert scenario.actor_ids() == ("a", "b")
        assert scenario.total_duration == 12
        assert scenario.matrix.d("a", "b") == 0.4

    def test_round_trip_builtin(self):
        scenario = renault_nissan_scenario()
        text = scenario_to_text(scenario)
        reparsed = parse_scenario_text(text)
        assert reparsed == scenario

    def test_round_trip_custom(self):
        scenario = parse_scenario_text(GOOD_SCENARIO)
        assert parse_scenario_text(scenario_to_text(scenario)) == scenario

    def test_unknown_key_names_line(self):
        bad = GOOD_SCENARIO.replace("rho = 0.20", "rho = 0.20\nwhimsy = 3")
        with pytest.raises(Exception) as err:
            parse_scenario_text(bad)
        assert "whimsy" in str(err.value)
        assert "line" in str(err.value)

    def test_missing_field_named(self):
        bad = GOOD_SCENARIO.replace("kappa = 1.00\n", "")
        with pytest.raises(Exception, match="kappa"):
            parse_scenario_text(bad)


class TestSimulateCommand:
    def test_builtin_renault_nissan(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", "builtin:renault_nissan",
                     "--out", str(out)])
        assert code == EXIT_OK
        lines = (out / "trajectory.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 80 * 2
        assert (out / "utilities.csv").exists()
        assert (out / "resolved_scenario.scenario").exists()

    def test_resolved_scenario_round_trips(self, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--scenario", "builtin:renault_nissan",
                     "--out", str(out)]) == EXIT_OK
        text = (out / "resolved_scenario.scenario").read_text()
        assert parse_scenario_text(text) == renault_nissan_scenario()

    def test_scenario_file_and_overrides(self, tmp_path):
        path = tmp_path / "toy.scenario"
        path.write_text(GOOD_SCENARIO)
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", str(path), "--out", str(out),
                     "--set", "trust.lambda_plus=0.12", "--set", "econ.gamma=0.5"])
        assert code == EXIT_OK
        resolved = (out / "resolved_scenario.scenario").read_text()
        assert "lambda_plus = 0.12" in resolved
        assert "gamma = 0.5" in resolved

    def test_malformed_scenario_exits_3_with_line(self, tmp_path, capsys):
        path = tmp_path / "bad.scenario"
        path.write_text(GOOD_SCENARIO.replace("lambda_plus = 0.10",
                                              "lambda_plus = banana"))
        code = main(["simulate", "--scenario", str(path), "--out", str(tmp_path / "o")])
        assert code == EXIT_PARSE
        err = capsys.readouterr().err
        assert "line" in err and "banana" in err

    def test_invalid_override_value_exits_4(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", "builtin:renault_nissan",
                     "--out", str(out), "--set", "trust.lambda_plus=7.0"])
        assert code == EXIT_MODEL

    def test_unknown_override_exits_2(self, tmp_path):
        code = main(["simulate", "--scenario", "builtin:renault_nissan",
                     "--out", str(tmp_path / "o"), "--set", "nonsense.key=1"])
        assert code == EXIT_USAGE

    def test_usage_error_on_missing_args(self):
        assert main(["simulate"]) == EXIT_USAGE


class TestMetricsCommand:
    def test_writes_metrics_json(self, tmp_path):
        out = tmp_path / "m"
        code = main(["metrics", "--out", str(out),
                     "--set", "trust.lambda_plus=0.10"])
        assert code == EXIT_OK
        payload = json.loads((out / "metrics.json").read_text())
        assert payload["negativity_ratio"] == pytest.approx(3.0, abs=1e-9)
        assert (out / "resolved_config.json").exists()


class TestEquilibriumCommand:
    def test_small_grid_solve(self, tmp_path):
        out = tmp_path / "eq"
        code = main(["equilibrium", "--out", str(out),
                     "--set", "grid.trust_points=5", "--set", "grid.reputation_points=3",
                     "--set", "grid.action_max=2.0", "--set", "grid.action_step=0.5",
                     "--set", "econ.gamma=0.4"])
        assert code == EXIT_OK
        lines = (out / "policy.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + (5 * 3) ** 2
        assert (out / "value.csv").exists()
        resolved = json.loads((out / "resolved_config.json").read_text())
        assert resolved["grid"]["trust_points"] == 5


class TestValidateCommand:
    def test_builtin_validation(self, tmp_path, capsys):
        out = tmp_path / "v"
        code = main(["validate", "--scenario", "builtin:renault_nissan",
                     "--out", str(out)])
        assert code == EXIT_OK
        payload = json.loads((out / "validation.json").read_text())
        assert payload["total"] == 51
        assert payload["behavioral_score"] == 15
        stdout = capsys.readouterr().out
        assert "51/60" in stdout

    def test_file_scenario_derives_annotations(self, tmp_path):
        path = tmp_path / "toy.scenario"
        path.write_text(GOOD_SCENARIO)
        out = tmp_path / "v"
        code = main(["validate", "--scenario", str(path), "--out", str(out)])
        assert code == EXIT_OK
        payload = json.loads((out / "validation.json").read_text())
        assert 0 <= payload["total"] <= 60


class TestSweepCommand:
    def test_thread_hint_byte_identical(self, tmp_path):
        out1 = tmp_path / "s1"
        out2 = tmp_path / "s2"
        assert main(["sweep", "--grid", "default", "--out", str(out1),
                     "--threads", "1"]) == EXIT_OK
        assert main(["sweep", "--grid", "default", "--out", str(out2),
                     "--threads", "4"]) == EXIT_OK
        for name in ("sweep_outcomes.csv", "sweep_summary.json",
                     "sensitivity.csv", "pareto.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_outcome_rows(self, tmp_path):
        out = tmp_path / "s"
        assert main(["sweep", "--grid", "default", "--out", str(out)]) == EXIT_OK
        with open(out / "sweep_outcomes.csv") as handle:
            rows = sum(1 for _ in handle)
        assert rows == 1 + 78_125

    def test_unknown_grid_rejected(self, tmp_path):
        assert main(["sweep", "--grid", "exotic", "--out", str(tmp_path / "x")]) == \
            EXIT_USAGE
