import math
from dataclasses import dataclass

import numpy as np

from config.config import (
    GENERATOR_BANDWIDTH,
    GENERATOR_POWER,
    GUARD_INTERVALS,
    PAD_INTERVALS,
    SUP_POINTS_PER_NYQUIST,
    TONE_FREQUENCY,
)
from dsp.kernel import Grid, KernelSpec, compute_constants, convolve_with_phi, default_step, lattice_sum
from utils.helpers import dense_maximum
from utils.logger import log_info
from utils.validators import validate_amplitude, validate_draw_count, validate_oversampling

_COEFF_TOL = 1e-12


# =========================================================
# TYPES
# =========================================================

@dataclass(frozen=True, eq=False)
class BandlimitedSignal:
    """
    g(t) = (1/lambda) * sum_k coeffs[k] * phi(d (t - k / (lambda d)))

    with dilation d = 1: a bounded signal reproduced by phi. Coefficients
    are the signal's own values on the lattice k / (lambda d).
    `window` is the part of the support where evaluation is trusted.
    """
    spec: KernelSpec
    coeffs: np.ndarray
    window: tuple
    seed: int | None = None
    dilation: float = 1.0
    bound: float = 1.0
    family: str = "random"

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size < 2:
            raise ValueError("a signal needs at least two coefficients")
        if np.any(np.abs(coeffs) > self.bound * (1.0 + _COEFF_TOL)):
            raise ValueError(f"coefficients exceed the dynamic range bound {self.bound}")

        lo, hi = (float(w) for w in self.window)
        if not (self.support[0] <= lo < hi <= self.support[1] + 1e-9):
            raise ValueError(f"window [{lo}, {hi}] must lie inside the support {self.support}")

        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "window", (lo, hi))

    @property
    def coeff_step(self) -> float:
        return 1.0 / (self.spec.lam * self.dilation)

    @property
    def support(self) -> tuple:
        return 0.0, (len(self.coeffs) - 1) / (self.spec.lam * self.dilation)

    @property
    def guard(self) -> float:
        return GUARD_INTERVALS / self.spec.lam

    def values(self, t):
        """
        Unchecked evaluation anywhere on the line (array or Grid in,
        array out; scalar in, float out).
        """
        out = lattice_sum(self.spec, self.coeffs, 0.0, self.coeff_step, t, self.dilation) / self.spec.lam
        if np.ndim(t) == 0 and not isinstance(t, Grid):
            return float(out[0])
        return out

    def in_window(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        lo, hi = self.window
        return (t >= lo - 1e-12) & (t <= hi + 1e-12)

    def sample_range(self, tau: float) -> tuple:
        """
        Inclusive index range n_lo..n_hi of the lattice n * tau covering
        the support plus guard margins.
        """
        lo = self.support[0] - self.guard
        hi = self.support[1] + self.guard
        return int(math.floor(lo / tau)), int(math.ceil(hi / tau))

    def window_grid(self, step: float) -> Grid:
        lo, hi = self.window
        return Grid.aligned(lo, hi, step)

    def to_dict(self) -> dict:
        return {
            "lambda": self.spec.lam,
            "coeffs": self.coeffs.tolist(),
            "window": list(self.window),
            "seed": self.seed,
            "dilation": self.dilation,
            "bound": self.bound,
            "family": self.family,
        }


@dataclass(frozen=True, eq=False)
class BoundedBLSignal(BandlimitedSignal):
    """
    Member of the enlarged class: |m| <= C_phi and m reproduced by the
    dilate psi(t) = phi(lambda t). Stored with dilation = lambda.
    """


# =========================================================
# CONSTRUCTION
# =========================================================

def _generator_samples(spec: KernelSpec, draws: np.ndarray, dilation: float) -> np.ndarray:
    """
    Samples on k / (lambda d) of sum_j draws[j] * kappa(t - t_j), where
    kappa = sinc(rho d t / p)^p has its spectrum inside [-rho d pi, rho d pi]
    and the draws sit 1/d apart after PAD_INTERVALS of padding.
    """
    pad = PAD_INTERVALS / dilation
    draw_times = pad + np.arange(draws.size) / dilation
    length = (draws.size - 1) / dilation + 2.0 * pad
    count = int(math.floor(length * spec.lam * dilation + 1e-9)) + 1
    coeff_times = np.arange(count) / (spec.lam * dilation)

    x = GENERATOR_BANDWIDTH * dilation * (coeff_times[:, None] - draw_times[None, :]) / GENERATOR_POWER
    return (np.sinc(x) ** GENERATOR_POWER) @ draws


def measured_sup(sig: BandlimitedSignal, lo: float | None = None, hi: float | None = None) -> float:
    """
    sup |g| on [lo, hi] (default: the window) from a dense scan plus a
    bounded refinement around the scan maximum.
    """
    w_lo, w_hi = sig.window
    lo = w_lo if lo is None else lo
    hi = w_hi if hi is None else hi
    step = sig.coeff_step / SUP_POINTS_PER_NYQUIST
    _, value = dense_maximum(lambda ts: np.abs(sig.values(ts)), lo, hi, step)
    return value


def _assemble(spec, draws, amplitude, seed, dilation, bound, family, cls):
    raw = _generator_samples(spec, draws, dilation)
    support_hi = (raw.size - 1) / (spec.lam * dilation)
    guard = GUARD_INTERVALS / spec.lam
    window = (guard, support_hi - guard)

    # unbounded probe only for measuring the sup before rescaling
    probe = cls(spec, raw, window, seed, dilation, np.inf, family)
    peak = max(measured_sup(probe, 0.0, support_hi), float(np.max(np.abs(raw))))

    coeffs = raw * (amplitude / peak) if peak > 0 else raw
    sig = cls(spec, coeffs, window, seed, dilation, bound, family)
    log_info(
        f"Synthesized {family} signal: lambda={spec.lam} draws={draws.size} "
        f"coeffs={coeffs.size} amplitude={amplitude} seed={seed}"
    )
    return sig


def synth_random(spec: KernelSpec, K: int, amplitude: float, seed: int) -> BandlimitedSignal:
    """
    Random member of the bounded class: K i.i.d. uniform draws one Nyquist
    interval apart, smoothed into a signal strictly inside the flat part
    of the kernel spectrum, then rescaled so its measured sup equals
    `amplitude`. Same seed, same coefficients.
    """
    validate_draw_count(K)
    validate_amplitude(amplitude)
    draws = np.random.default_rng(seed).uniform(-1.0, 1.0, int(K))
    return _assemble(spec, draws, amplitude, seed, 1.0, 1.0, "random", BandlimitedSignal)


def synth_tone(spec: KernelSpec, K: int, amplitude: float, frequency: float = TONE_FREQUENCY) -> BandlimitedSignal:
    """
    Deterministic tone-like signal, draws[j] = cos(2 pi f j).
    """
    validate_draw_count(K)
    validate_amplitude(amplitude)
    draws = np.cos(2.0 * np.pi * frequency * np.arange(int(K)))
    return _assemble(spec, draws, amplitude, None, 1.0, 1.0, "tone", BandlimitedSignal)


def synth_bounded(spec: KernelSpec, K: int, amplitude: float, seed: int) -> BoundedBLSignal:
    """
    Random member of the enlarged class with sup = amplitude <= C_phi.
    """
    validate_draw_count(K)
    validate_amplitude(amplitude, upper=spec.c_phi)
    draws = np.random.default_rng(seed).uniform(-1.0, 1.0, int(K))
    return _assemble(spec, draws, amplitude, seed, spec.lam, spec.c_phi, "bounded", BoundedBLSignal)


def zero_signal(spec: KernelSpec, K: int) -> BandlimitedSignal:
    validate_draw_count(K)
    draws = np.zeros(int(K))
    return _assemble(spec, draws, 1.0, None, 1.0, 1.0, "zero", BandlimitedSignal)


def signal_from_dict(data: dict) -> BandlimitedSignal:
    spec = compute_constants(float(data["lambda"]))
    dilation = float(data.get("dilation", 1.0))
    cls = BoundedBLSignal if dilation != 1.0 else BandlimitedSignal
    bound = data.get("bound")
    return cls(
        spec,
        np.asarray(data["coeffs"], dtype=float),
        tuple(data["window"]),
        data.get("seed"),
        dilation,
        float(bound) if bound is not None else (spec.c_phi if dilation != 1.0 else 1.0),
        data.get("family", "random"),
    )


# =========================================================
# EVALUATION
# =========================================================

def evaluate(sig: BandlimitedSignal, t):
    """
    g(t) for t inside the window; anything outside is rejected.
    """
    if not np.all(sig.in_window(t)):
        lo, hi = sig.window
        raise ValueError(f"t outside the signal window [{lo}, {hi}]")
    return sig.values(t)


def frame_expand_check(sig: BandlimitedSignal, N: int, points_per_interval: int = SUP_POINTS_PER_NYQUIST) -> float:
    """
    sup over a dense window grid of |tau * sum_n g(n tau) phi(t - n tau) - g(t)|
    with noiseless samples at tau = 1/(lambda N).
    """
    validate_oversampling(N)
    tau = 1.0 / (sig.spec.lam * N)
    n_lo, n_hi = sig.sample_range(tau)
    samples = sig.values(np.arange(n_lo, n_hi + 1) * tau)

    lo, hi = sig.window
    ts = np.linspace(lo, hi, int(math.ceil((hi - lo) / sig.coeff_step * points_per_interval)) + 1)
    rebuilt = tau * sig.dilation * lattice_sum(sig.spec, samples, n_lo * tau, tau, ts, sig.dilation)
    return float(np.max(np.abs(rebuilt - sig.values(ts))))


def membership_error(sig: BandlimitedSignal, step: float | None = None) -> tuple:
    """
    (sup over the window of |g - g * kernel|, eps_quad) with the kernel
    phi for the bounded class and psi for the enlarged one.
    """
    step = default_step(sig.spec) if step is None else step
    grid = Grid.aligned(*sig.support, step)
    grid = grid.with_values(sig.values(grid))
    smoothed, eps_quad = convolve_with_phi(sig.spec, grid, dilation=sig.dilation)

    inside = sig.in_window(grid.times)
    deviation = np.abs(grid.values - smoothed.values)[inside]
    return float(np.max(deviation)), eps_quad


def max_slope(sig: BandlimitedSignal, points_per_interval: int = SUP_POINTS_PER_NYQUIST) -> float:
    """
    Largest finite-difference slope of g over a dense window grid.
    """
    lo, hi = sig.window
    ts = np.linspace(lo, hi, int(math.ceil((hi - lo) / sig.coeff_step * points_per_interval)) + 1)
    vals = sig.values(ts)
    return float(np.max(np.abs(np.diff(vals)) / np.diff(ts)))
