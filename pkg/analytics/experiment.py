import numpy as np

from config.config import DEFAULT_GRID_DENSITY, EXACT_TOL
from analytics.distortion import analysis_grid, noisy_tol, theoretical_bounds
from analytics.slope import fit_loglog_slope
from dsp.bandlimited import BandlimitedSignal, synth_bounded
from dsp.kernel import Grid, KernelSpec, convolve_with_phi
from dsp.noise import NoiseModel
from dsp.sampling import sample_onebit, sample_onebit_constant, sample_real, sample_real_constant
from estimation.constant import constant_onebit_estimate, constant_real_estimate, delta_method_constant
from estimation.frame import frame_estimate
from estimation.onebit import apply_T, exact_h, fixed_point_solve, onebit_interpolate
from utils.helpers import derive_seed, sup_norm
from utils.logger import log_info


# ---- SINGLE RUNS ----

def _window_errors(sig: BandlimitedSignal, grid: Grid, estimate: np.ndarray) -> dict:
    inside = sig.in_window(grid.times)
    err = estimate[inside] - sig.values(grid)[inside]
    return {"sup_error": sup_norm(err), "mean_sq_error": float(np.mean(err * err))}


def simulate_frame(sig: BandlimitedSignal, model: NoiseModel, N: int, seed: int,
                   grid_density: int = DEFAULT_GRID_DENSITY):
    """
    One frame reconstruction. Returns (summary, record, reconstruction).
    """
    grid = analysis_grid(sig, grid_density)
    rec = sample_real(sig, model, N, seed)
    est = frame_estimate(rec, sig.spec, grid)

    summary = {"method": "frame", "N": int(N), "seed": seed, "samples": rec.count}
    summary.update(_window_errors(sig, grid, est.grid.values))
    summary["bound_frame_tight"] = theoretical_bounds(model, N)["frame_tight"]
    return summary, rec, est


def simulate_onebit(sig: BandlimitedSignal, model: NoiseModel, N: int, seed: int,
                    grid_density: int = DEFAULT_GRID_DENSITY, tol: float | None = None,
                    max_iters: int | None = None, warm_start: bool = False):
    """
    One-bit sampling, H_N, then the fixed-point solve.
    Returns (summary, record, reconstruction).
    """
    spec = sig.spec
    grid = analysis_grid(sig, grid_density)
    rec = sample_onebit(sig, model, N, seed)
    h = onebit_interpolate(rec, spec, grid)

    initial = None
    if warm_start:
        initial = frame_estimate(sample_real(sig, model, N, seed), spec, grid).grid
    recon = fixed_point_solve(h.grid, model, spec, noisy_tol(N) if tol is None else tol, max_iters, initial)

    summary = {
        "method": "onebit",
        "N": int(N),
        "seed": seed,
        "samples": rec.count,
        "ones_fraction": float(np.mean(rec.bits)),
        "iterations": recon.iterations,
        "final_residual": recon.residual_history[-1],
    }
    summary.update(_window_errors(sig, grid, recon.grid.values))
    summary["bound_onebit"] = theoretical_bounds(model, N)["onebit"]
    return summary, rec, recon


def run_fixed_point(sig: BandlimitedSignal, model: NoiseModel, N: int | None = None, seed: int = 0,
                    grid_density: int = DEFAULT_GRID_DENSITY, tol: float | None = None,
                    max_iters: int | None = None):
    """
    Fixed-point solve with exact h (N is None) or with H_N from one
    sampling run. Returns (summary, reconstruction).
    """
    spec = sig.spec
    grid = analysis_grid(sig, grid_density)
    if N is None:
        h_grid = exact_h(sig, model, spec, grid)
        tol = EXACT_TOL if tol is None else tol
    else:
        h_grid = onebit_interpolate(sample_onebit(sig, model, N, seed), spec, grid).grid
        tol = noisy_tol(N) if tol is None else tol

    recon = fixed_point_solve(h_grid, model, spec, tol, max_iters)
    history = np.asarray(recon.residual_history)
    ratios = history[1:] / history[:-1] if history.size > 1 else np.empty(0)

    summary = {
        "h": "exact" if N is None else "onebit",
        "N": N,
        "iterations": recon.iterations,
        "alpha": model.alpha,
        "max_residual_ratio": float(np.max(ratios[1:])) if ratios.size > 1 else None,
    }
    summary.update(_window_errors(sig, grid, recon.grid.values))
    log_info(f"Fixed point ({summary['h']}): iterations={recon.iterations} sup_error={summary['sup_error']:.3e}")
    return summary, recon


# ---- CONTRACTION & STABILITY ----

def contraction_ratios(spec: KernelSpec, model: NoiseModel, pairs: int, K: int, seed: int,
                       grid_density: int = 8, h_grid: Grid | None = None) -> np.ndarray:
    """
    ||T[m1] - T[m2]|| / ||m1 - m2|| for random pairs of the enlarged class.
    """
    ratios = []
    for i in range(pairs):
        m1 = synth_bounded(spec, K, 0.95 * spec.c_phi, derive_seed(seed, i, 1))
        m2 = synth_bounded(spec, K, 0.95 * spec.c_phi, derive_seed(seed, i, 2))
        grid = analysis_grid(m1, grid_density)
        g1 = grid.with_values(m1.values(grid))
        g2 = grid.with_values(m2.values(grid))
        h = grid if h_grid is None else h_grid

        t1 = apply_T(h, g1, model, spec)
        t2 = apply_T(h, g2, model, spec)
        ratios.append(sup_norm(t1.values - t2.values) / sup_norm(g1.values - g2.values))
    return np.array(ratios)


def second_moment_check(spec: KernelSpec, trials: int, seed: int, span: float = 40.0, step: float | None = None):
    """
    Monte Carlo of E[(|P| * |phi|)^2] against C_phi^2 sup E[P^2] for a
    bounded random grid process P (i.i.d. uniform on [-1, 1]).
    Returns (lhs, rhs) taken over the inner half of the grid.
    """
    step = 1.0 / (8.0 * spec.lam) if step is None else step
    count = int(span / step) + 1
    rng = np.random.default_rng(seed)

    squares = np.zeros(count)
    p_squares = np.zeros(count)
    for _ in range(trials):
        p = Grid(0.0, step, rng.uniform(-1.0, 1.0, count))
        out, _ = convolve_with_phi(spec, p.with_values(np.abs(p.values)), absolute=True)
        squares += out.values ** 2
        p_squares += p.values ** 2

    inner = slice(count // 4, 3 * count // 4)
    lhs = float(np.max(squares[inner] / trials))
    rhs = spec.c_phi ** 2 * float(np.max(p_squares / trials))
    return lhs, rhs


# ---- CONSTANT SIGNAL ----

def constant_mse_study(model: NoiseModel, c: float, N_list, trials: int, seed: int,
                       chunk_samples: int = 1_000_000) -> dict:
    """
    MSE of the one-bit constant estimator F^{-1}(mean bits) and of the
    unquantized sample mean across N, with log-log slope fits and the
    delta-method prediction F(c)(1-F(c))/(f(c)^2 N).

    Trial i at oversampling N reads indices i*N .. (i+1)*N - 1 of the
    (seed, N) stream, so chunking never changes the result.
    """
    rows = []
    for N in N_list:
        stream_seed = derive_seed(seed, N)
        per_chunk = max(1, chunk_samples // N)
        onebit, real = [], []

        for first in range(0, trials, per_chunk):
            count = min(per_chunk, trials - first)
            bits = sample_onebit_constant(c, model, N * count, stream_seed, start=first * N).reshape(count, N)
            reals = sample_real_constant(c, model, N * count, stream_seed, start=first * N).reshape(count, N)
            onebit.extend(constant_onebit_estimate(b, model) for b in bits)
            real.extend(constant_real_estimate(r) for r in reals)

        rows.append({
            "N": int(N),
            "mse_onebit": float(np.mean((np.array(onebit) - c) ** 2)),
            "mse_real": float(np.mean((np.array(real) - c) ** 2)),
            "delta_method": delta_method_constant(c, model) / N,
        })

    result = {"c": c, "rows": rows}
    if len(rows) < 3:
        return result

    result["onebit_fit"] = fit_loglog_slope({"N": r["N"], "D_hat": r["mse_onebit"]} for r in rows)
    if all(r["mse_real"] > 0 for r in rows):
        result["real_fit"] = fit_loglog_slope({"N": r["N"], "D_hat": r["mse_real"]} for r in rows)
    log_info(f"Constant study c={c}: onebit slope={result['onebit_fit']['slope']:.3f}")
    return result
