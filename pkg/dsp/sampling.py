from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from config.config import DITHER_STREAM, NOISE_STREAM
from dsp.bandlimited import BandlimitedSignal
from dsp.noise import GaussianNoise, NoiseModel, require_admissible
from dsp.rng import counter_uniforms
from utils.validators import validate_oversampling


# =========================================================
# TYPES
# =========================================================

@dataclass(frozen=True, eq=False)
class SampleRecord:
    """
    One sampling session on the lattice n * tau, n = n_lo .. n_hi, with
    tau = 1/(lambda N). Carries the real stream, the one-bit stream, or both.
    """
    N: int
    tau: float
    n_lo: int
    n_hi: int
    seed: int
    reals: np.ndarray | None = None
    bits: np.ndarray | None = None

    def __post_init__(self):
        for name in ("reals", "bits"):
            stream = getattr(self, name)
            if stream is None:
                continue
            if len(stream) != self.count:
                raise ValueError(f"{name} has {len(stream)} entries, expected {self.count}")
            stream = np.array(stream, dtype=np.uint8 if name == "bits" else float)
            stream.flags.writeable = False
            object.__setattr__(self, name, stream)

        if self.bits is not None and np.any(self.bits > 1):
            raise ValueError("bits must take values in {0, 1}")

    @property
    def count(self) -> int:
        return self.n_hi - self.n_lo + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_lo, self.n_hi + 1)

    @property
    def times(self) -> np.ndarray:
        return self.indices * self.tau

    @property
    def t_first(self) -> float:
        return self.n_lo * self.tau


# =========================================================
# NOISE STREAMS
# =========================================================

def _noise(sigma: float, seed: int, stream: int, start: int, count: int) -> np.ndarray:
    if sigma == 0:
        return np.zeros(count)
    return GaussianNoise(sigma).from_uniform(counter_uniforms(seed, stream, start, count))


@lru_cache(maxsize=32)
def clean_samples(sig: BandlimitedSignal, N: int) -> np.ndarray:
    """
    Noiseless g(n tau) over the sampling range; cached per (signal, N).
    """
    tau = 1.0 / (sig.spec.lam * N)
    n_lo, n_hi = sig.sample_range(tau)
    values = sig.values(np.arange(n_lo, n_hi + 1) * tau)
    values.flags.writeable = False
    return values


# =========================================================
# SAMPLERS
# =========================================================

def sample_real(sig: BandlimitedSignal, model: NoiseModel, N: int, seed: int) -> SampleRecord:
    """
    Y(n tau) = g(n tau) + W(n tau); no dither on this path.
    """
    validate_oversampling(N)
    tau = 1.0 / (sig.spec.lam * N)
    n_lo, n_hi = sig.sample_range(tau)
    clean = clean_samples(sig, int(N))

    reals = clean + _noise(model.sigma_w, seed, NOISE_STREAM, n_lo, clean.size)
    return SampleRecord(int(N), tau, n_lo, n_hi, seed, reals=reals)


def sample_onebit(sig: BandlimitedSignal, model: NoiseModel, N: int, seed: int) -> SampleRecord:
    """
    X(n tau) = 1(g(n tau) + W(n tau) + W_d(n tau) >= 0).

    W is the same stream sample_real draws for this seed; W_d is independent.
    """
    validate_oversampling(N)
    require_admissible(model)
    tau = 1.0 / (sig.spec.lam * N)
    n_lo, n_hi = sig.sample_range(tau)
    clean = clean_samples(sig, int(N))

    noisy = (
        clean
        + _noise(model.sigma_w, seed, NOISE_STREAM, n_lo, clean.size)
        + _noise(model.sigma_d, seed, DITHER_STREAM, n_lo, clean.size)
    )
    return SampleRecord(int(N), tau, n_lo, n_hi, seed, bits=(noisy >= 0).astype(np.uint8))


def sample_real_constant(c: float, model: NoiseModel, count: int, seed: int, start: int = 0) -> np.ndarray:
    """
    Noisy observations c + W of a constant signal at indices
    start .. start + count - 1.
    """
    return c + _noise(model.sigma_w, seed, NOISE_STREAM, start, int(count))


def sample_onebit_constant(c: float, model: NoiseModel, count: int, seed: int, start: int = 0) -> np.ndarray:
    require_admissible(model)
    noisy = (
        c
        + _noise(model.sigma_w, seed, NOISE_STREAM, start, int(count))
        + _noise(model.sigma_d, seed, DITHER_STREAM, start, int(count))
    )
    return (noisy >= 0).astype(np.uint8)
