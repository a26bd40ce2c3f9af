import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect
from scipy.stats import norm

from config.config import SIGMA_FLOOR_MULT, SIGMA_SEARCH_HI, SIGMA_SEARCH_LO
from dsp.kernel import KernelSpec
from utils.logger import log_info
from utils.validators import validate_floor_mult, validate_sigma_w


class NoiseModelError(RuntimeError):
    """No admissible noise level exists in the searched range."""


class InadmissibleNoiseError(ValueError):
    """The model's mu-window is empty: the dither is too small."""


# =========================================================
# DISTRIBUTIONS
# =========================================================

class NoiseDistribution(ABC):
    """
    Zero-mean, symmetric, unimodal noise law. Samples are produced from
    caller-owned uniforms so generation stays reproducible.
    """

    @abstractmethod
    def cdf(self, x):
        ...

    @abstractmethod
    def pdf(self, x):
        ...

    @abstractmethod
    def ppf(self, q):
        ...

    def from_uniform(self, u):
        return self.ppf(u)


@dataclass(frozen=True)
class GaussianNoise(NoiseDistribution):
    sigma: float

    def cdf(self, x):
        return norm.cdf(x, scale=self.sigma)

    def pdf(self, x):
        return norm.pdf(x, scale=self.sigma)

    def ppf(self, q):
        return norm.ppf(q, scale=self.sigma)


def _mu_window(dist: NoiseDistribution, c_phi: float):
    delta = float(dist.pdf(c_phi))
    Delta = float(dist.pdf(0.0))
    lo = (1.0 - 1.0 / (math.sqrt(2.0) * c_phi ** 2)) / delta
    hi = 1.0 / Delta
    return delta, Delta, lo, hi


# =========================================================
# MODEL
# =========================================================

@dataclass(frozen=True)
class NoiseModel:
    """
    Ambient noise W (std sigma_w) plus dither W_d (std sigma_d), seen by
    the one-bit path at total std sigma_tot.
    """
    sigma_w: float
    sigma_d: float
    sigma_tot: float
    delta: float
    Delta: float
    mu_window: tuple
    mu: float
    kernel: KernelSpec
    sigma_min: float

    @property
    def admissible(self) -> bool:
        lo, hi = self.mu_window
        return lo < hi

    @property
    def distribution(self) -> NoiseDistribution:
        if not (self.sigma_tot > 0):
            raise ValueError("noise model has sigma_tot = 0")
        return GaussianNoise(self.sigma_tot)

    @property
    def contraction(self) -> float:
        return abs(1.0 - self.mu * self.delta)

    @property
    def alpha(self) -> float:
        return self.kernel.c_phi ** 2 * self.contraction

    @property
    def beta(self) -> float:
        return 2.0 * self.kernel.c_phi ** 4 * self.contraction ** 2

    def cdf(self, x):
        return self.distribution.cdf(x)

    def pdf(self, x):
        return self.distribution.pdf(x)

    def ppf(self, q):
        return self.distribution.ppf(q)

    def to_dict(self) -> dict:
        return {
            "sigma_w": self.sigma_w,
            "sigma_d": self.sigma_d,
            "sigma_tot": self.sigma_tot,
            "sigma_min": self.sigma_min,
            "delta": self.delta,
            "Delta": self.Delta,
            "mu": self.mu,
            "mu_window": list(self.mu_window),
            "alpha": self.alpha,
            "beta": self.beta,
            "admissible": self.admissible,
        }


def cdf(model: NoiseModel, x):
    return model.cdf(x)


def pdf(model: NoiseModel, x):
    return model.pdf(x)


def require_admissible(model: NoiseModel):
    if not model.admissible:
        lo, hi = model.mu_window
        raise InadmissibleNoiseError(
            f"empty mu-window ({lo:.6g}, {hi:.6g}) at sigma_tot={model.sigma_tot:.6g}; "
            f"need sigma_tot > {model.sigma_min:.6g}"
        )


# =========================================================
# DITHER SIZING
# =========================================================

def window_width(kernel: KernelSpec, sigma: float, family=GaussianNoise) -> float:
    _, _, lo, hi = _mu_window(family(sigma), kernel.c_phi)
    return hi - lo


def solve_min_sigma(kernel: KernelSpec, family=GaussianNoise) -> float:
    """
    Smallest total std for which the mu-window is nonempty.

    The window is nonempty iff delta/Delta > 1 - 1/(sqrt(2) C_phi^2);
    for the Gaussian family delta/Delta grows monotonically in sigma.
    """
    target = 1.0 - 1.0 / (math.sqrt(2.0) * kernel.c_phi ** 2)

    def gap(sigma):
        dist = family(sigma)
        return float(dist.pdf(kernel.c_phi) / dist.pdf(0.0)) - target

    if gap(SIGMA_SEARCH_HI) <= 0:
        raise NoiseModelError(f"no admissible sigma up to {SIGMA_SEARCH_HI}")
    if gap(SIGMA_SEARCH_LO) > 0:
        return SIGMA_SEARCH_LO

    return float(bisect(gap, SIGMA_SEARCH_LO, SIGMA_SEARCH_HI, xtol=1e-14, rtol=1e-15, maxiter=500))


def build(kernel: KernelSpec, sigma_w: float, sigma_floor_mult: float = SIGMA_FLOOR_MULT) -> NoiseModel:
    """
    Size the dither: sigma_tot = max(sigma_w, mult * sigma_0) and
    sigma_d = sqrt((sigma_tot^2 - sigma_w^2)_+); mu is the window midpoint.
    """
    validate_sigma_w(sigma_w)
    validate_floor_mult(sigma_floor_mult)

    sigma_min = solve_min_sigma(kernel)
    sigma_tot = max(float(sigma_w), sigma_floor_mult * sigma_min)
    sigma_d = math.sqrt(max(sigma_tot ** 2 - sigma_w ** 2, 0.0))

    delta, Delta, lo, hi = _mu_window(GaussianNoise(sigma_tot), kernel.c_phi)
    model = NoiseModel(
        sigma_w=float(sigma_w),
        sigma_d=sigma_d,
        sigma_tot=sigma_tot,
        delta=delta,
        Delta=Delta,
        mu_window=(lo, hi),
        mu=0.5 * (lo + hi),
        kernel=kernel,
        sigma_min=sigma_min,
    )
    log_info(
        f"Noise model: sigma_w={model.sigma_w:.6g} sigma_d={model.sigma_d:.6g} "
        f"sigma_tot={model.sigma_tot:.6g} sigma_0={sigma_min:.6g} mu={model.mu:.6g} "
        f"alpha={model.alpha:.6g} beta={model.beta:.6g}"
    )
    return model


def with_total_sigma(kernel: KernelSpec, sigma_tot: float, sigma_w: float = 0.0) -> NoiseModel:
    """
    Model at a prescribed total std, admissible or not.
    """
    validate_sigma_w(sigma_w)
    if sigma_tot < sigma_w:
        raise ValueError("sigma_tot must be >= sigma_w")

    delta, Delta, lo, hi = _mu_window(GaussianNoise(sigma_tot), kernel.c_phi)
    return NoiseModel(
        sigma_w=float(sigma_w),
        sigma_d=math.sqrt(max(sigma_tot ** 2 - sigma_w ** 2, 0.0)),
        sigma_tot=float(sigma_tot),
        delta=delta,
        Delta=Delta,
        mu_window=(lo, hi),
        mu=0.5 * (lo + hi),
        kernel=kernel,
        sigma_min=solve_min_sigma(kernel),
    )


def difference_quotients(model: NoiseModel, count: int, seed: int) -> np.ndarray:
    """
    (F(x) - F(y)) / (x - y) on `count` random pairs in [-C_phi, C_phi].
    """
    rng = np.random.default_rng(seed)
    c = model.kernel.c_phi
    x = rng.uniform(-c, c, count)
    y = rng.uniform(-c, c, count)
    keep = np.abs(x - y) > 1e-9
    x, y = x[keep], y[keep]
    return (model.cdf(x) - model.cdf(y)) / (x - y)
