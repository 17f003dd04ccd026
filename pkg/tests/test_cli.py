"""Command-line interface and on-disk table formats."""

from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from tcxy import cli, datafmt
from tcxy.runner import RunConfig, run_trajectory


def read_csv_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = {name: np.array([float(r[k]) for r in body]) for k, name in enumerate(header)}
    return header, data


class TestRunVerb:
    def test_writes_both_formats(self, tmp_path):
        out = tmp_path / "traj"
        rc = cli.main([
            "run", "--preset", "psi_b", "--nbar", "4", "--lambda2", "0.3",
            "--points", "16", "--tau-max", "3", "--out", str(out),
            "--format", "both",
        ])
        assert rc == 0
        header, data = read_csv_columns(out.with_suffix(".csv"))
        assert header == ["tau", "inversion", "concurrence", "eof"]
        assert len(data["tau"]) == 16
        payload = json.loads(out.with_suffix(".json").read_text())
        assert sorted(payload) == ["columns", "metadata"]
        np.testing.assert_array_equal(payload["columns"]["tau"], data["tau"])
        assert payload["metadata"]["config"]["nbar"] == 4.0

    def test_csv_floats_round_trip_exactly(self, tmp_path):
        out = tmp_path / "traj"
        rc = cli.main([
            "run", "--preset", "psi_e", "--nbar", "6", "--lambda2", "0.4",
            "--points", "32", "--tau-max", "8", "--out", str(out),
            "--observables", "inversion,eof,norm",
        ])
        assert rc == 0
        _, data = read_csv_columns(out.with_suffix(".csv"))
        direct = run_trajectory(RunConfig(
            qubits="psi_e", nbar=6.0, lambda1=1.0, lambda2=0.4, points=32,
            tau_max=8.0, observables=("inversion", "eof", "norm"),
        ))
        np.testing.assert_array_equal(data["tau"], direct.taus)
        for name in ("inversion", "eof", "norm"):
            np.testing.assert_array_equal(data[name], direct.columns[name])

    def test_reruns_are_bit_identical(self, tmp_path):
        args = [
            "run", "--preset", "psi_s", "--nbar", "5", "--lambda2", "0.7",
            "--points", "24", "--tau-max", "6", "--format", "both",
        ]
        rc1 = cli.main(args + ["--out", str(tmp_path / "a")])
        rc2 = cli.main(args + ["--out", str(tmp_path / "b")])
        assert rc1 == rc2 == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_custom_state_matches_its_preset(self, tmp_path):
        shared = [
            "--nbar", "4", "--lambda2", "0.2", "--points", "12",
            "--tau-max", "4", "--format", "csv",
        ]
        s = 2.0**-0.5
        rc1 = cli.main(
            ["run", "--a", f"{s:.17g},0", "--b", "0,0", "--c", "0", "--d", f"{s:.17g},0"]
            + shared + ["--out", str(tmp_path / "custom")]
        )
        rc2 = cli.main(
            ["run", "--preset", "psi_b"] + shared + ["--out", str(tmp_path / "named")]
        )
        assert rc1 == rc2 == 0
        assert (tmp_path / "custom.csv").read_bytes() == (tmp_path / "named.csv").read_bytes()

    def test_partial_custom_state_is_rejected(self, tmp_path, capsys):
        rc = cli.main([
            "run", "--a", "1,0", "--b", "0,0", "--c", "0,0",
            "--out", str(tmp_path / "x"),
        ])
        assert rc == 2
        assert "--d" in capsys.readouterr().err

    def test_unnormalized_custom_state_is_rejected(self, tmp_path):
        rc = cli.main([
            "run", "--a", "1,0", "--b", "1,0", "--c", "0,0", "--d", "0,0",
            "--out", str(tmp_path / "x"),
        ])
        assert rc == 2

    def test_missing_output_path_is_rejected(self):
        assert cli.main(["run", "--preset", "psi_e", "--points", "8"]) == 2

    def test_malformed_amplitude_is_rejected(self, tmp_path):
        rc = cli.main([
            "run", "--a", "one,zero", "--b", "0", "--c", "0", "--d", "0",
            "--out", str(tmp_path / "x"),
        ])
        assert rc == 2


class TestConfigFile:
    def test_file_values_apply_and_flags_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "preset": "psi_b", "nbar": 9.0, "lambda2": 0.5,
            "points": 8, "tau_max": 2.0,
        }))
        out = tmp_path / "out"
        rc = cli.main([
            "run", "--config", str(cfg), "--nbar", "16",
            "--out", str(out), "--format", "json",
        ])
        assert rc == 0
        meta = json.loads(out.with_suffix(".json").read_text())["metadata"]["config"]
        assert meta["nbar"] == 16.0  # flag beats file
        assert meta["lambda2"] == 0.5  # file beats default

    def test_unknown_keys_are_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"nbarr": 9.0}))
        assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2


class TestSweepVerb:
    def test_long_format_table(self, tmp_path):
        out = tmp_path / "sweep"
        rc = cli.main([
            "sweep", "--axis", "lambda2", "--values", "0.1,0.3",
            "--preset", "psi_e", "--nbar", "4", "--points", "8",
            "--tau-max", "2", "--out", str(out), "--format", "both",
        ])
        assert rc == 0
        header, data = read_csv_columns(out.with_suffix(".csv"))
        assert header[0] == "lambda2"
        assert header[1] == "tau"
        assert len(data["tau"]) == 16  # two members, eight points each
        assert sorted(set(data["lambda2"])) == [0.1, 0.3]
        meta = json.loads(out.with_suffix(".json").read_text())["metadata"]
        assert meta["axis"] == "lambda2"
        assert meta["values"] == [0.1, 0.3]

    def test_failed_member_yields_exit_three_and_partial_output(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        rc = cli.main([
            "sweep", "--axis", "lambda2", "--values", "0.1,-1,0.3",
            "--preset", "psi_e", "--nbar", "4", "--points", "8",
            "--tau-max", "2", "--out", str(out),
        ])
        assert rc == 3
        assert "lambda2=-1" in capsys.readouterr().err
        _, data = read_csv_columns(out.with_suffix(".csv"))
        assert sorted(set(data["lambda2"])) == [0.1, 0.3]


class TestOtherVerbs:
    def test_quick_verification_passes(self, capsys):
        assert cli.main(["verify", "--quick"]) == 0
        assert "PASSED" in capsys.readouterr().out

    def test_figure_reproduction_writes_a_dataset(self, tmp_path):
        out = tmp_path / "f7"
        rc = cli.main(["repro", "fig7", "--points", "33", "--out", str(out)])
        assert rc == 0
        target = out / "fig7.csv"
        assert target.exists()
        with open(target, newline="") as fh:
            header = next(csv.reader(fh))
        assert "tau" in header

    def test_unknown_figure_is_rejected(self, tmp_path):
        assert cli.main(["repro", "fig99", "--outdir", str(tmp_path / "x")]) == 2

    def test_bench_runs_both_backends(self, capsys):
        assert cli.main(["bench", "--points", "32", "--nbar", "4"]) == 0
        captured = capsys.readouterr().out
        assert "python" in captured
        assert "cross-backend deviation" in captured or "only one backend" in captured

    def test_version_flag(self, capsys):
        assert cli.main(["--version"]) == 0
        import tcxy
        assert tcxy.__version__ in capsys.readouterr().out


class TestDataFormat:
    def test_float_formatting_round_trips(self, rng):
        values = np.concatenate([
            rng.uniform(-1, 1, 200),
            rng.uniform(-1e-30, 1e-30, 10),
            [0.0, 1.0, -1.0, np.pi, 1e308, 5e-324],
        ])
        for x in values:
            assert float(datafmt.format_float(float(x))) == float(x)

    def test_write_table_rejects_unknown_format(self, tmp_path):
        from tcxy.errors import ConfigError
        with pytest.raises(ConfigError):
            datafmt.write_table(tmp_path / "x", "xml", {}, ["a"], [np.array([1.0])])
