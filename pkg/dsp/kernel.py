import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.signal import upfirdn

from config.config import (
    C_PHI_DPRIME_SCAN_POINTS,
    C_PHI_PRIME_CELL_SAMPLES,
    C_PHI_PRIME_RADIUS,
    C_PHI_QUAD_NODES,
    C_PHI_QUAD_RADIUS,
    CONV_POINTS_PER_NYQUIST,
    PHI_PRIME_SERIES_THRESHOLD,
    PHI_SERIES_THRESHOLD,
    TRUNCATION_TOL,
)
from utils.helpers import dense_maximum, refine_maximum
from utils.logger import log_info
from utils.validators import validate_lambda

# chunk size (matrix entries) for direct kernel sums
_DIRECT_CHUNK = 2_000_000


class GeometryMismatchError(ValueError):
    """Two grids that must share t0, step and count do not."""


# =========================================================
# TYPES
# =========================================================

@dataclass(frozen=True)
class KernelSpec:
    """
    Stable interpolation kernel

        phi(t) = sin((pi + a) t) sin(a t) / (pi a t^2),   a = (lambda - 1) / 2

    with its cached stability constants. Build it with compute_constants().
    """
    lam: float
    a: float
    c_phi: float
    c_phi_prime: float
    c_phi_dprime: float
    truncation_radius: float
    phi_integral: float

    @property
    def upper_freq(self) -> float:
        return math.pi + self.a

    @property
    def phi0(self) -> float:
        return 1.0 + self.a / math.pi

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "a": self.a,
            "c_phi": self.c_phi,
            "c_phi_prime": self.c_phi_prime,
            "c_phi_dprime": self.c_phi_dprime,
            "truncation_radius": self.truncation_radius,
        }


@dataclass(frozen=True, eq=False)
class Grid:
    """
    Uniform sample grid t0, t0 + step, ..., carrying one value per point.
    Values are copied and frozen on construction.
    """
    t0: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("Grid needs a 1-D array with at least two values")
        if not (self.step > 0):
            raise ValueError(f"Grid step must be > 0, got {self.step}")

        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "step", float(self.step))

    @classmethod
    def aligned(cls, t_lo: float, t_hi: float, step: float, fill: float = 0.0) -> "Grid":
        """
        Grid on integer multiples of `step` covering [t_lo, t_hi].
        """
        first = math.ceil(t_lo / step - 1e-9)
        last = math.floor(t_hi / step + 1e-9)
        count = last - first + 1
        if count < 2:
            raise ValueError(f"[{t_lo}, {t_hi}] holds fewer than two points at step {step}")
        return cls(first * step, step, np.full(count, fill, dtype=float))

    @property
    def count(self) -> int:
        return int(self.values.size)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(self.count)

    @property
    def t_end(self) -> float:
        return self.t0 + self.step * (self.count - 1)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values) -> "Grid":
        return Grid(self.t0, self.step, values)

    def same_geometry(self, other: "Grid") -> bool:
        return (
            self.count == other.count
            and math.isclose(self.step, other.step, rel_tol=1e-12)
            and abs(self.t0 - other.t0) <= 1e-9 * max(1.0, abs(self.t0))
        )

    def require_same_geometry(self, other: "Grid"):
        if not self.same_geometry(other):
            raise GeometryMismatchError(
                f"grid geometry mismatch: (t0={self.t0}, step={self.step}, count={self.count}) "
                f"vs (t0={other.t0}, step={other.step}, count={other.count})"
            )


# =========================================================
# KERNEL EVALUATION
# =========================================================

def _series_coeffs(lam: float):
    a = 0.5 * (lam - 1.0)
    A = math.pi + a
    c2 = (A * A + a * a) / 6.0
    c4 = (A ** 4 + a ** 4) / 120.0 + (A * a) ** 2 / 36.0
    return a, A, c2, c4


def _phi(lam: float, t) -> np.ndarray:
    a, A, c2, c4 = _series_coeffs(lam)
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < PHI_SERIES_THRESHOLD
    safe = np.where(small, 1.0, t)

    out = np.sin(A * safe) * np.sin(a * safe) / (math.pi * a * safe * safe)
    t2 = t * t
    return np.where(small, (A / math.pi) * (1.0 - c2 * t2 + c4 * t2 * t2), out)


def _phi_prime(lam: float, t) -> np.ndarray:
    a, A, c2, c4 = _series_coeffs(lam)
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < PHI_PRIME_SERIES_THRESHOLD
    safe = np.where(small, 1.0, t)

    s_big, c_big = np.sin(A * safe), np.cos(A * safe)
    s_small, c_small = np.sin(a * safe), np.cos(a * safe)
    denom = math.pi * a * safe * safe
    out = (A * c_big * s_small + a * s_big * c_small) / denom - 2.0 * s_big * s_small / (denom * safe)
    series = (A / math.pi) * (-2.0 * c2 * t + 4.0 * c4 * t * t * t)
    return np.where(small, series, out)


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return value


def eval_phi(spec: KernelSpec, t):
    """
    phi(t); scalars in, float out; arrays in, arrays out.
    """
    return _scalar_or_array(_phi(spec.lam, t), t)


def eval_psi(spec: KernelSpec, t):
    """
    The dilate psi(t) = phi(lambda t).
    """
    return _scalar_or_array(_phi(spec.lam, spec.lam * np.asarray(t, dtype=float)), t)


def eval_phi_derivative(spec: KernelSpec, t):
    return _scalar_or_array(_phi_prime(spec.lam, t), t)


# =========================================================
# STABILITY CONSTANTS
# =========================================================

def _integrals(lam: float, radius: float, nodes: int):
    """
    (integral of |phi|, signed integral of phi) over the real line.

    Gauss-Legendre on every interval between consecutive zeros of
    sin((pi + a) t) and sin(a t) up to `radius`; beyond it |phi| is
    replaced by its oscillation average 4 / (pi^3 a t^2).
    """
    a = 0.5 * (lam - 1.0)
    A = math.pi + a
    zeros = np.concatenate([
        np.arange(1, math.floor(radius * A / math.pi) + 1) * (math.pi / A),
        np.arange(1, math.floor(radius * a / math.pi) + 1) * (math.pi / a),
    ])
    breaks = np.unique(np.concatenate([[0.0], zeros[zeros < radius], [radius]]))

    x, w = leggauss(nodes)
    half = 0.5 * (breaks[1:] - breaks[:-1])
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    vals = _phi(lam, mid[:, None] + half[:, None] * x[None, :])

    signed = 2.0 * float(np.sum((vals @ w) * half))
    absolute = 2.0 * float(np.sum((np.abs(vals) @ w) * half))
    tail = 2.0 * 4.0 / (math.pi ** 3 * a * radius)
    return absolute + tail, signed


def _derivative_cell_sum(lam: float, radius: float, samples: int) -> float:
    """
    Sum over k of max |phi'| on [k/lambda, (k+1)/lambda].

    |phi'| is even, so cells k and -k-1 mirror each other. Each cell is
    scanned at `samples` points and refined around its best one; the
    cells past `radius` are replaced by an analytic upper bound.
    """
    a = 0.5 * (lam - 1.0)
    A = math.pi + a
    cells = int(math.ceil(radius * lam))
    offsets = np.linspace(0.0, 1.0 / lam, samples)
    pts = (np.arange(cells) / lam)[:, None] + offsets[None, :]
    vals = np.abs(_phi_prime(lam, pts))
    best = np.argmax(vals, axis=1)

    def abs_prime(t):
        return abs(float(_phi_prime(lam, t)))

    total = 0.0
    for k in range(cells):
        i = int(best[k])
        lo = pts[k, max(i - 1, 0)]
        hi = pts[k, min(i + 1, samples - 1)]
        _, peak = refine_maximum(abs_prime, lo, hi)
        total += max(peak, float(vals[k, i]))

    # |phi'(t)| <= (A + a)/(pi a t^2) + 2/(pi a |t|^3)
    end = cells / lam
    first_cell = (A + a) / (math.pi * a * end ** 2) + 2.0 / (math.pi * a * end ** 3)
    rest = lam * ((A + a) / (math.pi * a * end) + 1.0 / (math.pi * a * end ** 2))
    return 2.0 * (total + first_cell + rest)


def _square_sum_sup(lam: float, scan_points: int) -> float:
    """
    sup_t sum_k phi(t - k/lambda)^2, scanning one period.
    """
    a = 0.5 * (lam - 1.0)
    # two-sided tail of the sum past R is below 2 lambda / (3 (pi a)^2 R^3)
    reach = (2.0 * lam / (3.0 * (math.pi * a) ** 2 * TRUNCATION_TOL)) ** (1.0 / 3.0)
    kmax = int(math.ceil(lam * reach))
    shifts = np.arange(-kmax, kmax + 1) / lam

    def periodic_sum(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        acc = np.zeros(ts.size)
        pieces = max(1, shifts.size * ts.size // _DIRECT_CHUNK + 1)
        for chunk in np.array_split(shifts, pieces):
            acc += np.sum(_phi(lam, ts[:, None] - chunk[None, :]) ** 2, axis=1)
        return acc

    period = 1.0 / lam
    _, value = dense_maximum(periodic_sum, 0.0, period, period / scan_points)
    return value


def truncation_radius(lam: float, tol: float = TRUNCATION_TOL) -> float:
    """
    R with 2 / (pi a R) = tol: the integral of the 1/(pi a t^2)
    envelope beyond +-R stays below tol.
    """
    a = 0.5 * (lam - 1.0)
    return 2.0 / (math.pi * a * tol)


@lru_cache(maxsize=16)
def _constants(lam: float) -> KernelSpec:
    a = 0.5 * (lam - 1.0)
    c_phi, integral = _integrals(lam, C_PHI_QUAD_RADIUS, C_PHI_QUAD_NODES)
    c_prime = _derivative_cell_sum(lam, C_PHI_PRIME_RADIUS, C_PHI_PRIME_CELL_SAMPLES)
    c_dprime = _square_sum_sup(lam, C_PHI_DPRIME_SCAN_POINTS)

    spec = KernelSpec(
        lam=lam,
        a=a,
        c_phi=c_phi,
        c_phi_prime=c_prime,
        c_phi_dprime=c_dprime,
        truncation_radius=truncation_radius(lam),
        phi_integral=integral,
    )
    log_info(
        f"Kernel constants lambda={lam}: C_phi={c_phi:.10f} C'_phi={c_prime:.10f} "
        f"C''_phi={c_dprime:.10f} integral={integral:.12f} R={spec.truncation_radius:.4e}"
    )
    return spec


def compute_constants(lam: float) -> KernelSpec:
    """
    KernelSpec for `lam` with C_phi, C'_phi and C''_phi filled in.
    Results are cached per lambda.
    """
    validate_lambda(lam)
    return _constants(float(lam))


def default_step(spec: KernelSpec) -> float:
    return 1.0 / (CONV_POINTS_PER_NYQUIST * spec.lam)


# =========================================================
# CONVOLUTION ENGINE
# =========================================================

@lru_cache(maxsize=64)
def _taps(spec: KernelSpec, step: float, half_width: int, dilation: float) -> np.ndarray:
    j = np.arange(-half_width, half_width + 1)
    taps = _phi(spec.lam, dilation * step * j)
    taps.flags.writeable = False
    return taps


def convolve_with_phi(spec: KernelSpec, p: Grid, dilation: float = 1.0, absolute: bool = False):
    """
    Trapezoid approximation of (p * phi)(t) on the grid of `p`.

    `p` is taken as zero off its grid. With dilation d the kernel is the
    unit-mass dilate d phi(d t) (d = lambda gives the psi reproduction).
    `absolute` convolves with |phi| instead.

    Returns (grid, eps_quad) where
        ||out||_inf <= C_phi ||p||_inf + eps_quad
    holds for the discrete operator.
    """
    if p is None or p.count < 2:
        raise ValueError("convolve_with_phi needs a non-empty grid")

    reach = spec.truncation_radius / dilation
    half = int(min(p.count - 1, math.floor(reach / p.step)))
    taps = dilation * _taps(spec, p.step, half, float(dilation))
    if absolute:
        taps = np.abs(taps)

    full = np.convolve(p.values, taps)
    out = p.step * full[half: half + p.count]

    mass = p.step * float(np.sum(np.abs(taps)))
    eps_quad = p.sup_norm() * max(0.0, mass - spec.c_phi)
    return p.with_values(out), eps_quad


def _lattice_on_grid(spec, weights, t_first, step, grid, dilation, reach):
    ratio = grid.step / step
    r = int(round(ratio))
    if r < 1 or abs(ratio - r) > 1e-9 * ratio:
        return None

    offset = (grid.t0 - t_first) / step
    o = int(round(offset))
    if abs(offset - o) > 1e-6:
        return None

    L = weights.size
    G = grid.count
    span = max(abs(o + (G - 1) * r), abs(o - (L - 1)))
    half = int(min(span, math.floor(reach / step)))
    taps = _taps(spec, step, half, float(dilation))

    # output i needs y[o + half + i r] of the full convolution; pad so that
    # index lands on the decimation phase
    k0 = o + half
    z = (-k0) % r
    x = np.concatenate([np.zeros(z), weights]) if z else weights
    decimated = upfirdn(taps, x, up=1, down=r)

    idx = (k0 + z) // r + np.arange(G)
    out = np.zeros(G)
    valid = (idx >= 0) & (idx < decimated.size)
    out[valid] = decimated[idx[valid]]
    return out


def _lattice_direct(spec, weights, t_first, step, ts, dilation, reach):
    pos = t_first + step * np.arange(weights.size)
    out = np.empty(ts.size)
    rows = max(1, _DIRECT_CHUNK // max(1, weights.size))

    for start in range(0, ts.size, rows):
        diff = ts[start:start + rows, None] - pos[None, :]
        vals = _phi(spec.lam, dilation * diff)
        vals[np.abs(diff) > reach] = 0.0
        out[start:start + rows] = vals @ weights
    return out


def lattice_sum(spec: KernelSpec, weights, t_first: float, step: float, times, dilation: float = 1.0) -> np.ndarray:
    """
    sum_n weights[n] * phi(dilation * (t - t_first - n * step)) at `times`.

    `times` is an array or a Grid. A Grid whose step is an integer
    multiple of `step` and whose points sit on the lattice goes through a
    polyphase filter; everything else is summed directly.
    Terms farther than the truncation radius are dropped.
    """
    weights = np.asarray(weights, dtype=float)
    reach = spec.truncation_radius / dilation

    if isinstance(times, Grid):
        fast = _lattice_on_grid(spec, weights, t_first, step, times, dilation, reach)
        if fast is not None:
            return fast
        ts = times.times
    else:
        ts = np.atleast_1d(np.asarray(times, dtype=float))

    return _lattice_direct(spec, weights, t_first, step, ts, dilation, reach)
