import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial

import numpy as np

from config.config import DEFAULT_GRID_DENSITY, MAX_FAILED_FRACTION, NOISY_TOL_SCALE
from dsp.bandlimited import BandlimitedSignal
from dsp.kernel import Grid
from dsp.noise import NoiseModel, require_admissible
from dsp.sampling import sample_onebit, sample_real
from estimation.frame import frame_estimate
from estimation.onebit import ConvergenceError, fixed_point_solve, onebit_interpolate
from utils.helpers import derive_seed
from utils.logger import log_info, log_warning
from utils.validators import validate_method, validate_oversampling, validate_trials


class MeasurementError(RuntimeError):
    """Too many Monte Carlo trials failed for the estimate to stand."""


@dataclass(frozen=True)
class DistortionEstimate:
    N: int
    method: str
    D_hat: float
    stderr: float
    mean_iters: float
    trials: int
    failed_trials: int

    def to_row(self) -> dict:
        return asdict(self)


# =========================================================
# GRIDS & TOLERANCES
# =========================================================

def analysis_grid(sig: BandlimitedSignal, density: int = DEFAULT_GRID_DENSITY) -> Grid:
    """
    Grid with `density` points per Nyquist interval over the support plus
    guard margins, on integer multiples of its step.
    """
    step = 1.0 / (density * sig.spec.lam)
    lo, hi = sig.support
    return Grid.aligned(lo - sig.guard, hi + sig.guard, step)


def noisy_tol(N: int) -> float:
    return NOISY_TOL_SCALE / math.sqrt(N)


# =========================================================
# THEORETICAL BOUNDS
# =========================================================

def theoretical_bounds(model: NoiseModel, N: int) -> dict:
    """
    Distortion bounds at oversampling N.

    frame_printed   C''_phi lambda^2 sigma_w^2 / N
    frame_tight     C''_phi sigma_w^2 / (lambda^2 N)   (unit-mass kernel weights)
    hn_variance     C_2 / N,  C_2 = C''_phi / (4 lambda^2)
    hn_bias         C_3 / N
    onebit          2 C_phi^2 mu^2 (C_2/N + C_3^2/N^2) / (1 - beta)
    """
    spec = model.kernel
    lam = spec.lam
    c2 = spec.c_phi_dprime / (4.0 * lam ** 2)
    c3 = (
        model.Delta * 2.0 * math.pi ** 2 * spec.c_phi / lam
        + abs(float(model.cdf(1.0)) - 0.5) * spec.c_phi_prime / lam ** 2
    )
    hn_mse = c2 / N + c3 ** 2 / N ** 2
    onebit = (
        2.0 * spec.c_phi ** 2 * model.mu ** 2 * hn_mse / (1.0 - model.beta)
        if model.beta < 1 else math.inf
    )
    return {
        "C2": c2,
        "C3": c3,
        "frame_printed": spec.c_phi_dprime * lam ** 2 * model.sigma_w ** 2 / N,
        "frame_tight": spec.c_phi_dprime * model.sigma_w ** 2 / (lam ** 2 * N),
        "hn_variance": c2 / N,
        "hn_bias": c3 / N,
        "onebit": onebit,
    }


# =========================================================
# MONTE CARLO
# =========================================================

def _run_trial(sig, model, N, method, grid, inside, truth, tol, max_iters, trial_seed):
    spec = sig.spec
    if method == "frame":
        rec = sample_real(sig, model, N, trial_seed)
        est = frame_estimate(rec, spec, grid)
    else:
        rec = sample_onebit(sig, model, N, trial_seed)
        h = onebit_interpolate(rec, spec, grid)
        try:
            est = fixed_point_solve(h.grid, model, spec, tol, max_iters)
        except ConvergenceError:
            return None

    err = est.grid.values[inside] - truth
    return err * err, est.iterations


def measure_distortion(sig: BandlimitedSignal, model: NoiseModel, N: int, method: str, M: int, seed: int,
                       grid_density: int = DEFAULT_GRID_DENSITY, tol: float | None = None,
                       max_iters: int | None = None, workers: int = 1) -> DistortionEstimate:
    """
    Monte Carlo estimate of sup_t E|G(t) - g(t)|^2 over the window.

    Trial i uses the child seed (seed, N, i). Trials may run on a thread
    pool; the reduction always follows trial order, so the result does
    not depend on `workers`. D_hat is the max over window grid points of
    the trial-mean squared error; stderr is its jackknife standard error.
    """
    validate_method(method)
    validate_trials(M)
    validate_oversampling(N)
    if method == "onebit":
        require_admissible(model)

    grid = analysis_grid(sig, grid_density)
    inside = sig.in_window(grid.times)
    truth = sig.values(grid)[inside]
    tol = noisy_tol(N) if tol is None else tol

    run = partial(_run_trial, sig, model, int(N), method, grid, inside, truth, tol, max_iters)
    seeds = [derive_seed(seed, N, i) for i in range(M)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, seeds))
    else:
        outcomes = [run(s) for s in seeds]

    done = [o for o in outcomes if o is not None]
    failed = M - len(done)
    if failed:
        log_warning(f"{failed}/{M} {method} trials failed at N={N}")
    if failed > MAX_FAILED_FRACTION * M:
        raise MeasurementError(f"{failed} of {M} {method} trials failed at N={N}")

    errs = np.stack([o[0] for o in done])
    m = errs.shape[0]
    totals = errs.sum(axis=0)
    D_hat = float(np.max(totals) / m)

    leave_one_out = np.max((totals[None, :] - errs) / (m - 1), axis=1)
    stderr = float(np.sqrt((m - 1) / m * np.sum((leave_one_out - leave_one_out.mean()) ** 2)))
    mean_iters = float(np.mean([o[1] for o in done]))

    log_info(
        f"Distortion {method} N={N}: D_hat={D_hat:.6e} stderr={stderr:.3e} "
        f"mean_iters={mean_iters:.2f} trials={m}"
    )
    return DistortionEstimate(int(N), method, D_hat, stderr, mean_iters, int(M), int(failed))


def pointwise_trials(sig: BandlimitedSignal, model: NoiseModel, N: int, method: str, M: int, seed: int,
                     points: Grid, workers: int = 1) -> np.ndarray:
    """
    (M, points.count) array: frame estimates, or H_N values for method
    "onebit", at the points of a (possibly coarse) window grid.
    """
    validate_method(method)
    validate_oversampling(N)
    if not np.all(sig.in_window(points.times)):
        raise ValueError("pointwise_trials needs points inside the signal window")

    def one(i):
        s = derive_seed(seed, N, i)
        if method == "frame":
            return frame_estimate(sample_real(sig, model, N, s), sig.spec, points).grid.values
        return onebit_interpolate(sample_onebit(sig, model, N, s), sig.spec, points).grid.values

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(M)))
    else:
        rows = [one(i) for i in range(M)]
    return np.stack(rows)
