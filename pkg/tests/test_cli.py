import json

import pytest

from molekom.cli import main
from molekom.config import DEFAULTS, ConfigValidationError, parse_config


def write_config(tmp_path, name="cfg.json", **overrides):
    path = tmp_path / name
    path.write_text(json.dumps(overrides))
    return path


def read_rows(path):
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    return comments, body[0].split(","), [l.split(",") for l in body[1:]]


SMOKE_CONFIGS = {
    "fig1a": dict(k=2, params={"n_points": 11}),
    "fig1b": dict(
        k=3,
        mc={"n_trials": 2000},
        params={"sigma2_values": [5, 10], "D_values": [1e-10]},
    ),
    "fig1c": dict(params={"sigma2_values": [5], "k_values": [2], "Q": 50}),
    "fig2a": dict(params={"budget": 12, "D_values": [1e-10]}),
    "fig2b": dict(params={"budget": 12, "sigma2_values": [5, 10]}),
    "validate-q": dict(params={"n_molecules": 3000}),
    "validate-moments": dict(k=2, mc={"n_trials": 20_000}),
    "custom": dict(k=3, mc={"n_trials": 5000}),
}


class TestList:
    def test_lists_exactly_the_registry(self, capsys):
        assert main(["list"]) == 0
        names = capsys.readouterr().out.split()
        assert names == [
            "fig1a", "fig1b", "fig1c", "fig2a", "fig2b",
            "validate-q", "validate-moments", "custom",
        ]
        assert len(names) == 8


class TestRun:
    @pytest.mark.parametrize("name", sorted(SMOKE_CONFIGS))
    def test_every_experiment_runs(self, name, tmp_path, capsys):
        cfg = write_config(
            tmp_path, experiment=name, out_dir=str(tmp_path / "out"), **SMOKE_CONFIGS[name]
        )
        assert main(["run", str(cfg)]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        produced = [p for p in out if not p.endswith(("PASS", "FAIL"))]
        assert produced, "experiment should report written files"

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="fig2a", params={"budget": 12, "D_values": [1e-10]})
        out_dir = tmp_path / "elsewhere"
        assert main(["run", str(cfg), "--seed", "7", "--out", str(out_dir)]) == 0
        csv_path = out_dir / "fig2a.csv"
        assert csv_path.exists()
        comments, _, _ = read_rows(csv_path)
        header = json.loads(comments[1].removeprefix("# config "))
        assert header["seed"] == 7

    def test_experiment_flag_without_config(self, tmp_path):
        assert main(["run", "--experiment", "fig2a", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "fig2a.csv").exists()

    def test_malformed_json_exits_2_without_output(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out_dir = tmp_path / "out"
        assert main(["run", str(bad), "--out", str(out_dir)]) == 2
        assert not out_dir.exists()
        assert "error" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == 2

    def test_unknown_key_exits_3(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="fig2a", distance_um=1.0)
        assert main(["run", str(cfg)]) == 3
        assert "unknown config keys" in capsys.readouterr().err

    def test_unknown_experiment_exits_3(self, tmp_path):
        cfg = write_config(tmp_path, experiment="fig9z")
        assert main(["run", str(cfg)]) == 3

    def test_bad_param_value_exits_3(self, tmp_path):
        cfg = write_config(tmp_path, experiment="custom", beta=1.5)
        assert main(["run", str(cfg)]) == 3

    def test_numerical_failure_exits_4(self, tmp_path, monkeypatch, capsys):
        from molekom.channel import QuadratureError
        from molekom import experiments

        def boom(scenario):
            raise QuadratureError("synthetic non-convergence")

        monkeypatch.setitem(experiments._RUNNERS, "custom", boom)
        cfg = write_config(tmp_path, experiment="custom")
        assert main(["run", str(cfg)]) == 4
        assert "numerical failure" in capsys.readouterr().err


class TestOutputContracts:
    def test_fig1b_schema(self, tmp_path):
        cfg = write_config(
            tmp_path, experiment="fig1b", out_dir=str(tmp_path),
            k=2, mc={"n_trials": 1000},
            params={"sigma2_values": [5], "D_values": [1e-10]},
        )
        assert main(["run", str(cfg)]) == 0
        comments, columns, rows = read_rows(tmp_path / "fig1b.csv")
        assert columns == ["sigma2_o", "D_tx", "D_rx", "Pe_analytic", "Pe_mc", "mc_stderr"]
        assert len(rows) == 1
        assert float(rows[0][3]) > 0

    def test_fig2a_schema_with_argmin(self, tmp_path):
        cfg = write_config(
            tmp_path, experiment="fig2a", out_dir=str(tmp_path),
            params={"budget": 12, "D_values": [1e-10]},
        )
        assert main(["run", str(cfg)]) == 0
        comments, columns, rows = read_rows(tmp_path / "fig2a.csv")
        assert columns == ["D_tx", "D_rx", "Q1", "Pe", "is_argmin"]
        assert len(rows) == 11
        assert sum(int(r[4]) for r in rows) == 1

    def test_header_carries_resolved_config(self, tmp_path):
        cfg = write_config(
            tmp_path, experiment="fig2b", out_dir=str(tmp_path), seed=321,
            params={"budget": 12, "sigma2_values": [5]},
        )
        assert main(["run", str(cfg)]) == 0
        comments, _, _ = read_rows(tmp_path / "fig2b.csv")
        header = json.loads(comments[1].removeprefix("# config "))
        assert header["seed"] == 321
        assert header["tau_ms"] == DEFAULTS["tau_ms"]
        assert header["params"]["budget"] == 12
        assert header["params"]["D_value"] == 1e-10  # default expanded
        assert header["mc"]["n_trials"] == DEFAULTS["mc"]["n_trials"]

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = write_config(
            tmp_path, experiment="fig1b",
            out_dir=str(tmp_path / "out"), seed=5, k=2, mc={"n_trials": 2000},
            params={"sigma2_values": [5, 10], "D_values": [1e-10]},
        )
        assert main(["run", str(cfg)]) == 0
        first = (tmp_path / "out" / "fig1b.csv").read_bytes()
        assert main(["run", str(cfg)]) == 0
        assert (tmp_path / "out" / "fig1b.csv").read_bytes() == first


class TestConfigParsing:
    def test_unit_conversion(self):
        s = parse_config({"d_um": 2.0, "tau_ms": 5.0})
        assert s.channel.d == pytest.approx(2e-6)
        assert s.channel.tau == pytest.approx(5e-3)
        assert s.mc.dt == pytest.approx(5e-3 * 0.001)

    def test_scalar_q_broadcasts(self):
        s = parse_config({"Q": 10, "k": 4})
        assert s.schedule.Q == (10, 10, 10, 10)

    def test_q_list_must_match_k(self):
        with pytest.raises(ConfigValidationError):
            parse_config({"Q": [1, 2], "k": 3})

    def test_defaults_resolve(self):
        s = parse_config({})
        assert s.experiment == "custom"
        assert s.channel.D_p == 5e-10
        assert s.noise.mu_o == 10.0
        assert s.schedule.k == 20
        assert s.resolved["index_origin"] == "slot-end"
