from dataclasses import dataclass, field

from dsp.kernel import Grid, KernelSpec, lattice_sum
from dsp.sampling import SampleRecord


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """
    Estimate of g on a grid plus the iteration trail that produced it.
    The frame estimator runs no iterations.
    """
    grid: Grid
    method: str
    iterations: int = 0
    residual_history: tuple = field(default_factory=tuple)
    converged: bool = True


def require_grid_covered(rec: SampleRecord, grid: Grid):
    lo, hi = rec.times[0], rec.times[-1]
    if grid.t0 < lo - 1e-9 or grid.t_end > hi + 1e-9:
        raise ValueError(
            f"grid [{grid.t0}, {grid.t_end}] leaves the sampled span [{lo}, {hi}]"
        )


def frame_estimate(rec: SampleRecord, spec: KernelSpec, grid: Grid) -> Reconstruction:
    """
    G_fr(t) = tau * sum_n Y(n tau) phi(t - n tau)
    """
    if rec.reals is None:
        raise ValueError("frame_estimate needs a record with real-valued samples")
    require_grid_covered(rec, grid)

    values = rec.tau * lattice_sum(spec, rec.reals, rec.t_first, rec.tau, grid)
    return Reconstruction(grid.with_values(values), "frame")
