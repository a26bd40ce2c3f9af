import math
from dataclasses import replace

import numpy as np
import pytest

from dsp.noise import (
    GaussianNoise,
    InadmissibleNoiseError,
    build,
    cdf,
    difference_quotients,
    pdf,
    require_admissible,
    solve_min_sigma,
    window_width,
    with_total_sigma,
)


def _closed_form_sigma0(c_phi):
    k = 1.0 / (math.sqrt(2.0) * c_phi ** 2)
    return c_phi / math.sqrt(2.0 * math.log(1.0 / (1.0 - k)))


class TestDitherSizing:

    def test_min_sigma_closed_form(self, spec):
        assert solve_min_sigma(spec) == pytest.approx(_closed_form_sigma0(spec.c_phi), rel=1e-10)

    def test_window_opens_at_min_sigma(self, spec):
        sigma0 = solve_min_sigma(spec)
        assert window_width(spec, 0.99 * sigma0) < 0 < window_width(spec, 1.01 * sigma0)

    def test_dither_only_model(self, spec, model):
        sigma0 = solve_min_sigma(spec)
        assert model.sigma_w == 0.0
        assert model.sigma_tot == pytest.approx(1.1 * sigma0)
        assert model.sigma_d == pytest.approx(model.sigma_tot)

    def test_dither_tops_up_ambient_noise(self, noisy_model):
        assert noisy_model.sigma_w == 1.0
        assert noisy_model.sigma_d ** 2 + 1.0 == pytest.approx(noisy_model.sigma_tot ** 2)

    def test_loud_ambient_noise_needs_no_dither(self, spec):
        m = build(spec, 5.0)
        assert m.sigma_tot == 5.0
        assert m.sigma_d == 0.0
        assert m.admissible

    def test_rejects_bad_inputs(self, spec):
        with pytest.raises(ValueError):
            build(spec, -1.0)
        with pytest.raises(ValueError):
            build(spec, 0.0, sigma_floor_mult=0.9)


class TestAdmissibility:

    def test_mu_inside_window(self, model):
        lo, hi = model.mu_window
        assert lo < model.mu < hi
        assert model.mu * model.Delta < 1.0
        assert model.delta < model.Delta

    def test_small_sigma_inadmissible(self, spec):
        m = with_total_sigma(spec, 0.9 * solve_min_sigma(spec))
        assert not m.admissible
        with pytest.raises(InadmissibleNoiseError):
            require_admissible(m)

    @pytest.mark.parametrize("mult", [1.1, 2.0, 10.0])
    def test_contraction_factors_below_one(self, spec, mult):
        m = with_total_sigma(spec, mult * solve_min_sigma(spec))
        assert m.admissible
        assert 0 < m.alpha < 1
        assert m.beta < 1
        assert m.alpha == pytest.approx(spec.c_phi ** 2 * abs(1.0 - m.mu * m.delta))
        assert m.beta == pytest.approx(2.0 * m.alpha ** 2)

    def test_zero_sigma_has_no_distribution(self, spec):
        m = replace(with_total_sigma(spec, 1.0), sigma_tot=0.0)
        with pytest.raises(ValueError):
            m.distribution


class TestDistribution:

    def test_cdf_symmetry_and_pdf(self, model):
        x = np.linspace(-3.0, 3.0, 41)
        np.testing.assert_allclose(cdf(model, x) + cdf(model, -x), 1.0, atol=1e-15)
        np.testing.assert_allclose(pdf(model, x), pdf(model, -x), rtol=1e-14)
        assert float(cdf(model, 0.0)) == 0.5

    def test_delta_and_Delta(self, spec, model):
        s = model.sigma_tot
        assert model.Delta == pytest.approx(1.0 / (s * math.sqrt(2.0 * math.pi)))
        assert model.delta == pytest.approx(model.Delta * math.exp(-spec.c_phi ** 2 / (2.0 * s * s)))

    def test_ppf_inverts_cdf(self, model):
        x = np.linspace(-1.0, 1.0, 21)
        np.testing.assert_allclose(model.ppf(model.cdf(x)), x, atol=1e-12)

    def test_difference_quotients_within_density_range(self, model):
        q = difference_quotients(model, 5000, seed=4)
        assert q.size > 4900
        assert np.all(q >= model.delta - 1e-9)
        assert np.all(q <= model.Delta + 1e-9)

    def test_from_uniform(self):
        dist = GaussianNoise(2.0)
        assert dist.from_uniform(0.5) == 0.0
        assert dist.from_uniform(0.8413447460685429) == pytest.approx(2.0, rel=1e-9)

    def test_to_dict(self, model):
        data = model.to_dict()
        assert data["admissible"] is True
        assert data["mu_window"][0] < data["mu"] < data["mu_window"][1]
