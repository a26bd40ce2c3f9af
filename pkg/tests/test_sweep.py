import json
import os

import numpy as np
import pytest

from analytics.report import sweep_summary
from analytics.slope import fit_loglog_slope
from analytics.sweep import ConfigError, ExperimentConfig, SweepResult, check_acceptance, sweep
from config.config import CONFIGS_DIR


def _small(tmp_path, name, **overrides):
    data = {
        "lambda": 2.0,
        "K": 16,
        "sigma_w": 1.0,
        "N_list": [4, 8, 16],
        "M": 30,
        "seed": 42,
        "output_dir": str(tmp_path / name),
    }
    data.update(overrides)
    return ExperimentConfig.from_dict(data)


class TestSlopeFit:

    def test_exact_power_law(self):
        fit = fit_loglog_slope({"N": n, "D_hat": 3.0 / n} for n in (4, 8, 16, 32))
        assert fit["slope"] == pytest.approx(-1.0)
        assert fit["intercept"] == pytest.approx(np.log(3.0))
        assert fit["r2"] == pytest.approx(1.0)
        assert fit["ci"][0] == pytest.approx(-1.0)
        assert fit["ci"][1] == pytest.approx(-1.0)

    def test_noisy_law_inside_interval(self):
        rng = np.random.default_rng(1)
        rows = [{"N": n, "D_hat": 2.0 / n * np.exp(rng.normal(0, 0.05))} for n in (4, 8, 16, 32, 64, 128)]
        fit = fit_loglog_slope(rows)
        lo, hi = fit["ci"]
        assert lo < fit["slope"] < hi
        assert lo < -1.0 < hi

    def test_needs_three_positive_rows(self):
        with pytest.raises(ValueError):
            fit_loglog_slope([{"N": 4, "D_hat": 1.0}, {"N": 8, "D_hat": 0.5}])
        with pytest.raises(ValueError):
            fit_loglog_slope([{"N": 4, "D_hat": 1.0}, {"N": 8, "D_hat": 0.0}, {"N": 16, "D_hat": 0.2}])


class TestExperimentConfig:

    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.lam == 2.0
        assert cfg.N_list == (4, 8, 16, 32, 64, 128, 256)
        assert cfg.methods == ("frame", "onebit")

    def test_aliases(self, tmp_path):
        cfg = _small(tmp_path, "a", eval_grid_density=8)
        assert cfg.trials == 30
        assert cfg.grid_density == 8
        assert cfg.N_list == (4, 8, 16)

    @pytest.mark.parametrize("bad", [
        {"colour": "red"},
        {"N_list": [8, 4]},
        {"lambda": 1.0},
        {"methods": ["frame", "sigma-delta"]},
        {"M": 3},
        {"slope_band": [-0.8, -1.2]},
        {"signal_family": "chirp"},
        {"fit_N_min": 0},
    ])
    def test_rejects_invalid(self, tmp_path, bad):
        with pytest.raises(ConfigError):
            _small(tmp_path, "bad", **bad)

    def test_shipped_configs_load(self):
        for name in ("default.json", "precision_indifference.json"):
            cfg = ExperimentConfig.from_json(os.path.join(CONFIGS_DIR, name))
            assert cfg.N_list == (4, 8, 16, 32, 64, 128, 256)
            assert cfg.trials == 400

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json(tmp_path / "nope.json")

    def test_overrides_win(self, tmp_path):
        cfg = ExperimentConfig.from_json(os.path.join(CONFIGS_DIR, "default.json"), trials=50, workers=2)
        assert cfg.trials == 50
        assert cfg.workers == 2

    def test_echo_leaves_out_execution_details(self, tmp_path):
        echo = _small(tmp_path, "e").echo()
        assert echo["lambda"] == 2.0
        assert "output_dir" not in echo
        assert "workers" not in echo


class TestSweep:

    @pytest.fixture(scope="class")
    def result(self, tmp_path_factory):
        return sweep(_small(tmp_path_factory.mktemp("sweep"), "run"))

    def test_rows_for_every_method_and_N(self, result):
        assert [(r["method"], r["N"]) for r in result.rows] == [
            ("frame", 4), ("frame", 8), ("frame", 16),
            ("onebit", 4), ("onebit", 8), ("onebit", 16),
        ]
        assert all(r["status"] == "ok" for r in result.rows)

    def test_slopes_fitted(self, result):
        for method in ("frame", "onebit"):
            assert not result.slopes[method]["skipped"]
            assert result.slope(method) < 0

    def test_outputs_written(self, result):
        out = result.to_dict()
        assert set(out) >= {"rows", "slopes", "config", "noise_model", "kernel", "signal", "acceptance"}

    def test_summary_mentions_methods(self, result):
        text = sweep_summary(result)
        assert "frame slope" in text
        assert "onebit slope" in text

    def test_byte_identical_across_workers(self, tmp_path):
        one = _small(tmp_path, "one", workers=1)
        three = _small(tmp_path, "three", workers=3)
        sweep(one)
        sweep(three)
        for name in ("sweep.csv", "sweep.json"):
            with open(os.path.join(one.output_dir, name), "rb") as a, open(os.path.join(three.output_dir, name), "rb") as b:
                assert a.read() == b.read(), name

    def test_noiseless_frame_slope_skipped(self, tmp_path):
        result = sweep(_small(tmp_path, "floor", sigma_w=0.0, methods=["frame"]), persist=False)
        assert result.slopes["frame"]["skipped"]
        assert "floor" in result.slopes["frame"]["reason"]
        assert not result.acceptance["passed"]

    def test_failed_rows_keep_their_place(self, tmp_path):
        cfg = _small(tmp_path, "fail", methods=["onebit"], tol=1e-12, max_iters=1)
        result = sweep(cfg)
        assert [r["status"] for r in result.rows] == ["failed"] * 3
        assert all(np.isnan(r["D_hat"]) for r in result.rows)
        assert result.slopes["onebit"]["skipped"]
        assert "FAILED" in sweep_summary(result)

        with open(os.path.join(cfg.output_dir, "sweep.json"), encoding="utf-8") as fh:
            saved = json.load(fh)
        assert saved["rows"][0]["D_hat"] is None


class TestAcceptance:

    def _result(self, frame, onebit):
        rows = []
        for method, law in (("frame", frame), ("onebit", onebit)):
            for n in (4, 8, 16, 32):
                rows.append({"N": n, "method": method, "D_hat": law(n), "status": "ok"})
        slopes = {
            m: dict(fit_loglog_slope(r for r in rows if r["method"] == m), skipped=False)
            for m in ("frame", "onebit")
        }
        return SweepResult(rows=rows, slopes=slopes, config={}, noise={}, kernel={}, signal={})

    def test_parallel_laws_pass(self, tmp_path):
        cfg = _small(tmp_path, "acc", N_list=[4, 8, 16, 32])
        verdict = check_acceptance(self._result(lambda n: 1.0 / n, lambda n: 3.0 / n), cfg)
        assert verdict["passed"]
        spread = next(c for c in verdict["checks"] if c["name"] == "ratio_spread")
        assert spread["value"] == pytest.approx(1.0)

    def test_diverging_laws_fail(self, tmp_path):
        cfg = _small(tmp_path, "acc", N_list=[4, 8, 16, 32])
        verdict = check_acceptance(self._result(lambda n: 1.0 / n, lambda n: 3.0 / n ** 0.5), cfg)
        assert not verdict["passed"]
        failed = {c["name"] for c in verdict["checks"] if not c["passed"]}
        assert {"onebit_slope", "ratio_spread"} <= failed

    def test_fit_range_drops_saturated_rows(self, tmp_path):
        cfg = _small(tmp_path, "acc", N_list=[4, 8, 16, 32, 64], fit_N_min=16)
        rows = []
        for n in cfg.N_list:
            rows.append({"N": n, "method": "frame", "D_hat": 1.0 / n, "status": "ok"})
            rows.append({"N": n, "method": "onebit", "D_hat": min(4.0 / n, 0.3), "status": "ok"})
        slopes = {
            m: dict(fit_loglog_slope(r for r in rows if r["method"] == m and r["N"] >= 16), skipped=False)
            for m in ("frame", "onebit")
        }
        result = SweepResult(rows=rows, slopes=slopes, config={}, noise={}, kernel={}, signal={})

        verdict = check_acceptance(result, cfg)
        checks = {c["name"]: c for c in verdict["checks"]}
        assert verdict["passed"]
        assert checks["ratio_spread"]["value"] == pytest.approx(1.0)
        assert set(checks["ratio_spread"]["ratios"]) == {"16", "32", "64"}
        assert not checks["onebit_slope_all_N"]["gating"]
        assert checks["onebit_slope_all_N"]["value"] > -0.8
        assert checks["frame_slope_all_N"]["passed"]

    def test_full_range_checks_absent_without_cut(self, tmp_path):
        cfg = _small(tmp_path, "acc", N_list=[4, 8, 16, 32])
        verdict = check_acceptance(self._result(lambda n: 1.0 / n, lambda n: 3.0 / n), cfg)
        assert not any(c["name"].endswith("_all_N") for c in verdict["checks"])


@pytest.mark.slow
class TestPrecisionIndifference:
    """
    Headline configuration: frame and one-bit distortion share the 1/N law
    over the fitted range N >= 32. Below that the one-bit error is held
    down by the clip and the full-range slope is shallower.
    """

    @pytest.fixture(scope="class")
    def headline(self, tmp_path_factory):
        cfg = ExperimentConfig.from_json(
            os.path.join(CONFIGS_DIR, "precision_indifference.json"),
            trials=120, workers=4, output_dir=str(tmp_path_factory.mktemp("headline")),
        )
        return cfg, sweep(cfg)

    def test_every_row_measured(self, headline):
        cfg, result = headline
        for method in ("frame", "onebit"):
            assert [r["N"] for r in result.rows_for(method)] == list(cfg.N_list)

    def test_acceptance_passes(self, headline):
        _, result = headline
        checks = {c["name"]: c for c in result.acceptance["checks"]}
        assert result.acceptance["passed"], checks
        assert -1.2 <= result.slope("frame") <= -0.8
        assert -1.2 <= result.slope("onebit") <= -0.8
        assert checks["ratio_spread"]["value"] <= 2.5

    def test_onebit_distortion_above_frame(self, headline):
        _, result = headline
        checks = {c["name"]: c for c in result.acceptance["checks"]}
        assert checks["onebit_dominates_frame"]["value"]

    def test_full_range_onebit_slope_is_pre_asymptotic(self, headline):
        _, result = headline
        checks = {c["name"]: c for c in result.acceptance["checks"]}
        assert checks["frame_slope_all_N"]["passed"]
        full = checks["onebit_slope_all_N"]["value"]
        assert -0.8 < full < -0.6
        assert full > result.slope("onebit")
