"""
Monte Carlo behaviour of the frame estimator and of the one-bit
intermediate H_N at ten fixed window points.
"""

import math

import numpy as np
import pytest

from analytics.distortion import analysis_grid, pointwise_trials, theoretical_bounds
from dsp.bandlimited import zero_signal
from dsp.kernel import Grid, eval_phi, lattice_sum
from dsp.sampling import clean_samples, sample_onebit, sample_real
from estimation.frame import frame_estimate
from estimation.onebit import exact_h, onebit_interpolate

POINTS = Grid(8.0, 4.0, np.zeros(10))


def _square_weights(spec, N, sig, weights=None):
    """tau^2 sum_n w_n phi(t - n tau)^2 at POINTS."""
    tau = 1.0 / (spec.lam * N)
    n_lo, n_hi = sig.sample_range(tau)
    times = np.arange(n_lo, n_hi + 1) * tau
    sq = eval_phi(spec, POINTS.times[:, None] - times[None, :]) ** 2
    w = np.ones(times.size) if weights is None else weights
    return tau * tau * (sq @ w)


class TestFrameEstimator:

    def test_requires_real_samples(self, spec, signal, model):
        rec = sample_onebit(signal, model, 4, seed=1)
        with pytest.raises(ValueError):
            frame_estimate(rec, spec, POINTS)

    def test_grid_must_stay_inside_sampled_span(self, spec, signal, noisy_model):
        rec = sample_real(signal, noisy_model, 4, seed=1)
        with pytest.raises(ValueError):
            frame_estimate(rec, spec, Grid(-20.0, 1.0, np.zeros(5)))

    def test_noiseless_reconstruction(self, spec, signal, model):
        grid = analysis_grid(signal, 4)
        rec = sample_real(signal, model, 4, seed=1)
        est = frame_estimate(rec, spec, grid)
        inside = signal.in_window(grid.times)
        err = est.grid.values[inside] - signal.values(grid)[inside]
        assert np.max(np.abs(err)) <= 1e-5
        assert est.method == "frame"
        assert est.iterations == 0

    @pytest.mark.slow
    def test_mse_law(self, spec, signal, noisy_model):
        M = 2000
        truth = signal.values(POINTS)
        mse = {}
        for N in (8, 32):
            est = pointwise_trials(signal, noisy_model, N, "frame", M, seed=17, points=POINTS)
            mse[N] = np.mean((est - truth) ** 2, axis=0)

            bounds = theoretical_bounds(noisy_model, N)
            assert np.all(mse[N] <= bounds["frame_printed"])
            exact = noisy_model.sigma_w ** 2 * _square_weights(spec, N, signal)
            assert np.mean(mse[N] / exact) == pytest.approx(1.0, abs=0.06)
            # tau sum phi^2 equals the integral of phi^2 exactly
            np.testing.assert_allclose(exact, bounds["frame_tight"], rtol=1e-3)

        ratio = np.mean(mse[8]) / np.mean(mse[32])
        assert 3.2 <= ratio <= 4.8


class TestOneBitIntermediate:

    def test_requires_bits(self, spec, signal, noisy_model):
        rec = sample_real(signal, noisy_model, 4, seed=1)
        with pytest.raises(ValueError):
            onebit_interpolate(rec, spec, POINTS)

    def test_zero_signal_is_centred(self, spec, model):
        sig = zero_signal(spec, 16)
        M, N = 400, 16
        values = pointwise_trials(sig, model, N, "onebit", M, seed=3, points=POINTS)
        c2 = spec.c_phi_dprime / (4.0 * spec.lam ** 2)
        assert np.all(np.abs(values.mean(axis=0)) <= 4.0 * math.sqrt(c2 / N / M))

    def test_expectation_tracks_h(self, spec, signal, model):
        for N in (16, 64):
            tau = 1.0 / (spec.lam * N)
            n_lo, _ = signal.sample_range(tau)
            centred = model.cdf(clean_samples(signal, N)) - 0.5
            expected = tau * lattice_sum(spec, centred, n_lo * tau, tau, POINTS)

            grid = analysis_grid(signal, 8)
            h = exact_h(signal, model, spec, grid)
            h_at_points = np.interp(POINTS.times, h.times, h.values)
            assert np.all(np.abs(expected - h_at_points) <= theoretical_bounds(model, N)["hn_bias"])

    @pytest.mark.slow
    def test_variance_and_bias(self, spec, signal, model):
        M = 4000
        for N in (16, 64):
            values = pointwise_trials(signal, model, N, "onebit", M, seed=29, points=POINTS)
            var = values.var(axis=0, ddof=1)
            bounds = theoretical_bounds(model, N)
            assert np.all(var <= 1.1 * bounds["hn_variance"])

            F = model.cdf(clean_samples(signal, N))
            exact_var = _square_weights(spec, N, signal, F * (1.0 - F))
            np.testing.assert_allclose(var, exact_var, rtol=0.1)

            tau = 1.0 / (spec.lam * N)
            n_lo, _ = signal.sample_range(tau)
            expected = tau * lattice_sum(spec, F - 0.5, n_lo * tau, tau, POINTS)
            mean = values.mean(axis=0)
            assert np.all(np.abs(mean - expected) <= 4.5 * np.sqrt(exact_var / M))

            h = exact_h(signal, model, spec, analysis_grid(signal, 8))
            bias = mean - np.interp(POINTS.times, h.times, h.values)
            assert np.all(np.abs(bias) <= bounds["hn_bias"] + 4.5 * np.sqrt(exact_var / M))
