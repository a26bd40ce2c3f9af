import numpy as np

from dsp.noise import NoiseModel


def constant_onebit_estimate(bits, model: NoiseModel) -> float:
    """
    F^{-1}(mean(bits)), clamped to +-1 once the mean leaves [F(-1), F(1)].
    """
    bits = np.asarray(bits)
    if bits.size == 0:
        raise ValueError("constant_onebit_estimate needs at least one bit")

    b_hat = float(np.mean(bits))
    lo, hi = float(model.cdf(-1.0)), float(model.cdf(1.0))
    if lo <= b_hat <= hi:
        return float(model.ppf(b_hat))
    return 1.0 if b_hat > 0.5 else -1.0


def constant_real_estimate(reals) -> float:
    """
    Sample mean of unquantized observations c + W; MSE sigma_w^2 / N.
    """
    reals = np.asarray(reals, dtype=float)
    if reals.size == 0:
        raise ValueError("constant_real_estimate needs at least one sample")
    return float(np.mean(reals))


def delta_method_constant(c: float, model: NoiseModel) -> float:
    """
    N * MSE of the one-bit constant estimator to first order:
    F(c) (1 - F(c)) / f(c)^2.
    """
    F = float(model.cdf(c))
    f = float(model.pdf(c))
    return F * (1.0 - F) / f ** 2
