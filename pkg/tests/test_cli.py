import json
from pathlib import Path

import numpy as np
import pytest

from dimer_dpt.cli import EXIT_CONFIG, EXIT_OK, fmt_float, main


def write_config(tmp_path: Path, doc: dict, name: str = "run.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=1))
    return path


def read_data_lines(path: Path) -> list[str]:
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# columns:")
    return lines


class TestFloatFormat:
    def test_round_trip_exact(self, rng):
        for x in rng.normal(size=200):
            assert float(fmt_float(x)) == x
        assert float(fmt_float(np.pi)) == np.pi


class TestValidate:
    def test_valid_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"command": "spectrum", "params": {"J": 1.0, "gamma": 1.0}})
        assert main(["validate", "--config", str(cfg)]) == EXIT_OK
        assert "OK" in capsys.readouterr().out

    def test_negative_gamma_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"command": "spectrum", "params": {"J": 1.0, "gamma": -1.0}})
        assert main(["validate", "--config", str(cfg)]) == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "gamma" in err

    def test_unknown_key_suggestion(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"command": "spectrum", "params": {"J": 1.0, "gama": 1.0}})
        assert main(["validate", "--config", str(cfg)]) == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "gama" in err and "gamma" in err
        assert "line" in err

    def test_bad_json_reports_line(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "command": "spectrum",\n}\n')
        assert main(["validate", "--config", str(path)]) == EXIT_CONFIG
        assert "line" in capsys.readouterr().err

    def test_command_mismatch(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"command": "spectrum"})
        assert main(["trajectory", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG


class TestSpectrumCommand:
    def test_single_row(self, tmp_path):
        cfg = write_config(tmp_path, {"command": "spectrum", "params": {"J": 1.0, "gamma": 2.0}})
        assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        lines = read_data_lines(tmp_path / "spectrum.csv")
        assert lines[1].split(",")[:1] == ["gamma"]
        row = lines[2].split(",")
        assert row[-1] == "critical"

    def test_grid(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"command": "spectrum", "spectrum": {"gamma_min": 0.0, "gamma_max": 4.0, "n": 5}},
        )
        main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)])
        lines = read_data_lines(tmp_path / "spectrum.csv")
        assert len(lines) == 2 + 5


class TestFixedPointsCommand:
    def test_overdamped_six_records(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "command": "fixed-points",
                "params": {"J": 1.0, "gamma": 2.5},
                "fixed_points": {"flow": "angular"},
            },
        )
        assert main(["fixed-points", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        records = [json.loads(l) for l in (tmp_path / "fixed_points.ndjson").read_text().splitlines()]
        assert len(records) == 6
        required = {"nx", "ny", "nz", "w_re", "w_im", "class", "eig_re1", "eig_im1", "eig_re2", "eig_im2", "residual"}
        for rec in records:
            assert required <= set(rec)
            assert rec["residual"] <= 1e-8
        classes = sorted(r["class"] for r in records)
        assert classes == ["attractor", "attractor", "repeller", "repeller", "saddle", "saddle"]


class TestTrajectoryCommand:
    def test_angular_radial_csv(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "command": "trajectory",
                "params": {"J": 1.0, "gamma": 1.0},
                "trajectory": {"flow": "angular_radial", "t_final": 10.0, "n0": [0.0, 1.0, 0.0], "d0": 1.0},
            },
        )
        assert main(["trajectory", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        lines = read_data_lines(tmp_path / "trajectory.csv")
        assert lines[1] == "t,nx,ny,nz,d"
        last = [float(x) for x in lines[-1].split(",")]
        assert last[0] == pytest.approx(10.0)
        assert 0.0 <= last[4] <= 1.0


class TestSweepCommand:
    def test_manifest_carries_fidelity(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "command": "sweep",
                "params": {"J": 1.0},
                "schedule": {"kind": "linear_ramp", "h0": -20.0, "h1": 20.0, "T": 200.0},
            },
        )
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        manifest = json.loads((tmp_path / "sweep.manifest.json").read_text())
        assert manifest["results"]["final_fidelity"] >= 0.999
        lines = read_data_lines(tmp_path / "sweep.csv")
        assert lines[1] == "t,h,nx,ny,nz"


class TestFreeEnergyCommand:
    def test_csv_and_transition_flag(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "command": "free-energy",
                "params": {"J": 1.0},
                "free_energy": {"kind": "linear", "s_min": 0.0, "s_max": 2.5, "s_step": 0.02},
            },
        )
        assert main(["free-energy", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        lines = read_data_lines(tmp_path / "free_energy.csv")
        assert lines[1] == "s,phi,converged,estimator,transition"
        flagged = [l for l in lines[2:] if l.endswith(",kink")]
        assert len(flagged) >= 1
        s_at = float(flagged[0].split(",")[0])
        assert abs(s_at - 1.0) <= 0.02 + 1e-12
        manifest = json.loads((tmp_path / "free_energy.manifest.json").read_text())
        assert manifest["results"]["transitions"][0]["kind"] == "kink"


class TestEnsembleCommand:
    def test_ndjson_records(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "command": "ensemble",
                "params": {"J": 1.0, "gamma": 1.0},
                "noise": {"variance_rate": 2.0, "master_seed": 4},
                "ensemble": {"n_traj": 64, "dt": 0.002, "t_final": 2.0, "n_out": 11},
            },
        )
        assert main(["ensemble", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        records = [json.loads(l) for l in (tmp_path / "ensemble.ndjson").read_text().splitlines()]
        moments = [r for r in records if r["kind"] == "moment"]
        assert len(moments) == 11
        assert any(r["kind"] == "crossing" for r in records)
        hist = [r for r in records if r["kind"] == "fidelity_hist"][0]
        assert sum(hist["counts"]) == 64


class TestDeterminism:
    def _run_twice(self, tmp_path, workers_a, workers_b):
        doc = {
            "command": "ensemble",
            "params": {"J": 1.0, "gamma": 1.0},
            "noise": {"variance_rate": 2.0, "master_seed": 4},
            "ensemble": {"n_traj": 600, "dt": 0.002, "t_final": 1.0, "n_out": 6},
        }
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        cfg = write_config(tmp_path, doc)
        assert main(["ensemble", "--config", str(cfg), "--out", str(out_a), "--seed", "11", "--workers", str(workers_a)]) == EXIT_OK
        assert main(["ensemble", "--config", str(cfg), "--out", str(out_b), "--seed", "11", "--workers", str(workers_b)]) == EXIT_OK
        return (out_a / "ensemble.ndjson").read_bytes(), (out_b / "ensemble.ndjson").read_bytes()

    @pytest.mark.slow
    def test_rerun_identical(self, tmp_path):
        a, b = self._run_twice(tmp_path, 1, 1)
        assert a == b

    @pytest.mark.slow
    def test_worker_count_invariant(self, tmp_path):
        a, b = self._run_twice(tmp_path, 1, 4)
        assert a == b

    def test_free_energy_rerun_identical(self, tmp_path):
        doc = {
            "command": "free-energy",
            "params": {"J": 1.0},
            "free_energy": {"kind": "variance", "s_min": 2.2, "s_max": 2.6, "s_step": 0.1},
        }
        cfg = write_config(tmp_path, doc)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["free-energy", "--config", str(cfg), "--out", str(out_a)]) == EXIT_OK
        assert main(["free-energy", "--config", str(cfg), "--out", str(out_b)]) == EXIT_OK
        assert (out_a / "free_energy.csv").read_bytes() == (out_b / "free_energy.csv").read_bytes()


class TestCalibrateCommand:
    def test_writes_report(self, tmp_path):
        cfg = write_config(tmp_path, {"command": "calibrate", "calibrate": {"n_samples": 128}})
        assert main(["calibrate", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        doc = json.loads((tmp_path / "calibration.json").read_text())
        assert doc["kappa_over_s"]["linear"] == pytest.approx(0.5)


class TestFlowfieldCommand:
    def test_stereo_columns(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "command": "flowfield",
                "params": {"J": 1.0, "gamma": 2.5},
                "flowfield": {"flow": "angular", "chart": "stereo", "resolution": 5, "extent": 2.0},
            },
        )
        assert main(["flowfield", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        lines = read_data_lines(tmp_path / "flowfield.csv")
        assert lines[1] == "w_re,w_im,nx,ny,nz,vx,vy,vz,dw_re,dw_im"
        assert len(lines) == 2 + 25

    def test_yz_columns(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "command": "flowfield",
                "params": {"J": 1.0, "gamma": 3.0},
                "flowfield": {"flow": "lindblad", "chart": "yz", "resolution": 9},
            },
        )
        assert main(["flowfield", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        lines = read_data_lines(tmp_path / "flowfield.csv")
        assert lines[1] == "ny,nz,vx,vy,vz"


class TestShippedConfigs:
    def test_all_sample_configs_validate(self):
        import pathlib

        cfg_dir = pathlib.Path(__file__).resolve().parent.parent / "configs"
        paths = sorted(cfg_dir.glob("*.json"))
        assert len(paths) >= 8
        for path in paths:
            assert main(["validate", "--config", str(path)]) == EXIT_OK, path.name
