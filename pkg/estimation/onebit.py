import math
from dataclasses import dataclass

import numpy as np

from config.config import EXACT_TOL, MAX_ITERS_CAP, MAX_ITERS_MARGIN
from dsp.bandlimited import BandlimitedSignal
from dsp.kernel import Grid, KernelSpec, convolve_with_phi, lattice_sum
from dsp.noise import NoiseModel, require_admissible
from dsp.sampling import SampleRecord
from estimation.frame import Reconstruction, require_grid_covered
from utils.helpers import sup_norm
from utils.logger import log_warning
from utils.validators import validate_tolerance


class ConvergenceError(RuntimeError):
    """
    The fixed-point iteration hit its iteration limit above tolerance.
    """

    def __init__(self, iterations: int, last_residual: float, predicted_bound: float, residual_history: tuple):
        self.iterations = iterations
        self.last_residual = last_residual
        self.predicted_bound = predicted_bound
        self.residual_history = residual_history
        super().__init__(
            f"no convergence after {iterations} iterations: last residual {last_residual:.3e}, "
            f"contraction bound on the remaining error {predicted_bound:.3e}"
        )


@dataclass(frozen=True, eq=False)
class OneBitIntermediate:
    """
    H_N on a grid; its target is (F(g) - 1/2) * phi.
    """
    grid: Grid
    N: int


# =========================================================
# INTERPOLATION
# =========================================================

def onebit_interpolate(rec: SampleRecord, spec: KernelSpec, grid: Grid) -> OneBitIntermediate:
    """
    H_N(t) = tau * sum_n (X(n tau) - 1/2) phi(t - n tau)
    """
    if rec.bits is None:
        raise ValueError("onebit_interpolate needs a record with one-bit samples")
    require_grid_covered(rec, grid)

    centred = rec.bits.astype(float) - 0.5
    values = rec.tau * lattice_sum(spec, centred, rec.t_first, rec.tau, grid)
    return OneBitIntermediate(grid.with_values(values), rec.N)


def exact_h(sig: BandlimitedSignal, model: NoiseModel, spec: KernelSpec, grid: Grid) -> Grid:
    """
    h = (F(g) - 1/2) * phi by grid quadrature; the noiseless limit of H_N.
    """
    g = sig.values(grid)
    h, _ = convolve_with_phi(spec, grid.with_values(model.cdf(g) - 0.5))
    return h


# =========================================================
# CONTRACTION MAP
# =========================================================

def clip(x):
    """
    x where |x| <= 1, sgn(x) elsewhere.
    """
    out = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    return float(out) if np.ndim(x) == 0 else out


def apply_T(h_grid: Grid, m: Grid, model: NoiseModel, spec: KernelSpec) -> Grid:
    """
    T[m] = Clip[mu h + (m - mu (F(m) - 1/2)) * phi] * phi
    """
    h_grid.require_same_geometry(m)
    require_admissible(model)

    affine = m.values - model.mu * (model.cdf(m.values) - 0.5)
    smoothed, _ = convolve_with_phi(spec, m.with_values(affine))
    inner = model.mu * h_grid.values + smoothed.values
    out, _ = convolve_with_phi(spec, m.with_values(clip(inner)))
    return out


def default_max_iters(alpha: float, tol: float, first_residual: float) -> int:
    """
    Iterations the contraction bound needs to push the error below tol,
    plus a margin.
    """
    if not (0 < alpha < 1) or first_residual <= tol * (1.0 - alpha):
        return MAX_ITERS_MARGIN
    needed = math.ceil(math.log(tol * (1.0 - alpha) / first_residual) / math.log(alpha))
    return min(needed + MAX_ITERS_MARGIN, MAX_ITERS_CAP)


def predicted_residuals(residual_history, alpha: float) -> np.ndarray:
    """
    Geometric envelope alpha^(k-1) * ||G_1 - G_0|| for each recorded step.
    """
    history = np.asarray(residual_history, dtype=float)
    if history.size == 0:
        return history
    return history[0] * alpha ** np.arange(history.size)


def fixed_point_solve(h_grid: Grid, model: NoiseModel, spec: KernelSpec, tol: float = EXACT_TOL,
                      max_iters: int | None = None, initial: Grid | None = None) -> Reconstruction:
    """
    Iterate G_{k+1} = T[G_k] from G_0 = 0 (or `initial`) until the sup
    change between iterates is <= tol.

    max_iters defaults to the count predicted by the contraction factor,
    fixed after the first step. Hitting the limit raises ConvergenceError.
    """
    validate_tolerance(tol)
    require_admissible(model)
    if max_iters is not None and max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")

    if initial is None:
        current = h_grid.with_values(np.zeros(h_grid.count))
    else:
        h_grid.require_same_geometry(initial)
        current = initial

    alpha = model.alpha
    limit = max_iters
    history = []

    while True:
        step = apply_T(h_grid, current, model, spec)
        residual = sup_norm(step.values - current.values)
        history.append(residual)
        current = step

        if limit is None:
            limit = default_max_iters(alpha, tol, history[0])

        if residual <= tol:
            return Reconstruction(current, "onebit-fixedpoint", len(history), tuple(history), True)

        if len(history) >= limit:
            bound = alpha ** len(history) * history[0] / (1.0 - alpha)
            log_warning(
                f"Fixed point not reached: iterations={len(history)} residual={residual:.3e} "
                f"tol={tol:.3e} bound={bound:.3e}"
            )
            raise ConvergenceError(len(history), residual, bound, tuple(history))
