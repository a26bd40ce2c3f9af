import json

import pandas as pd
import pytest

from app import main
from cli.commands import EXIT_CHECK_FAILED, EXIT_FAILURE, EXIT_OK

SMALL = ["--K", "16", "--N", "4", "--seed", "3"]


def _write_config(path, **fields):
    data = {"lambda": 2.0, "K": 16, "N_list": [4, 8, 16], "M": 30, "sigma_w": 0.0, "methods": ["frame"]}
    data.update(fields)
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestCommands:

    def test_constants(self, capsys, spec):
        assert main(["constants", "--lambda", "2"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["lambda"] == 2.0
        assert out["c_phi"] == pytest.approx(spec.c_phi)

    def test_simulate_frame_with_dump(self, capsys, tmp_path):
        dump = tmp_path / "samples.csv"
        code = main(["simulate-frame", *SMALL, "--sigma-w", "0.5", "--dump-samples", str(dump)])
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["method"] == "frame"
        assert out["noise_model"]["sigma_w"] == 0.5
        assert list(pd.read_csv(dump).columns) == ["n", "t", "y"]

    def test_simulate_onebit_reuses_saved_signal(self, capsys, tmp_path):
        sig_path = tmp_path / "sig.json"
        assert main(["simulate-frame", *SMALL, "--save-signal", str(sig_path)]) == EXIT_OK
        capsys.readouterr()
        assert main(["simulate-onebit", "--N", "8", "--signal", str(sig_path), "--warm-start"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["method"] == "onebit"
        assert out["iterations"] >= 1

    def test_fixed_point_diagnostics(self, capsys, tmp_path):
        diag = tmp_path / "iters.csv"
        assert main(["fixed-point", *SMALL, "--exact", "--diagnostics", str(diag)]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["h"] == "exact"
        assert out["sup_error"] <= 1e-4
        assert len(pd.read_csv(diag)) == out["iterations"]


class TestSweepCommand:

    def test_check_failure_exit_code(self, capsys, tmp_path):
        cfg = _write_config(tmp_path / "cfg.json", output_dir=str(tmp_path / "out"))
        assert main(["sweep", "--config", cfg]) == EXIT_OK
        assert main(["sweep", "--config", cfg, "--check"]) == EXIT_CHECK_FAILED
        assert (tmp_path / "out" / "sweep.csv").exists()
        assert "frame slope: skipped" in capsys.readouterr().out

    def test_cli_overrides(self, tmp_path):
        cfg = _write_config(tmp_path / "cfg.json", output_dir=str(tmp_path / "ignored"))
        out_dir = tmp_path / "chosen"
        assert main(["sweep", "--config", cfg, "--output-dir", str(out_dir), "--trials", "31", "--workers", "2"]) == EXIT_OK
        with open(out_dir / "sweep.json", encoding="utf-8") as fh:
            assert json.load(fh)["config"]["trials"] == 31
        assert not (tmp_path / "ignored").exists()

    def test_runtime_failure(self, capsys, tmp_path):
        assert main(["sweep", "--config", str(tmp_path / "missing.json")]) == EXIT_FAILURE
        assert "error:" in capsys.readouterr().err

    def test_mismatched_signal_lambda(self, tmp_path):
        sig_path = tmp_path / "sig.json"
        assert main(["simulate-frame", *SMALL, "--save-signal", str(sig_path)]) == EXIT_OK
        assert main(["simulate-frame", "--lambda", "3", "--signal", str(sig_path)]) == EXIT_FAILURE

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            main(["plot"])
