import math

import numpy as np
from scipy.optimize import minimize_scalar


# -------------------------------------------------
# NORMS
# -------------------------------------------------

def sup_norm(values) -> float:
    """
    Max absolute value of an array; 0.0 for an empty one.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


# -------------------------------------------------
# MAXIMUM REFINEMENT
# -------------------------------------------------

def refine_maximum(func, lo: float, hi: float, xatol: float = 1e-10):
    """
    Maximize a scalar function on [lo, hi] with bounded Brent search.
    Returns (argmax, max).
    """
    if hi <= lo:
        return lo, float(func(lo))

    res = minimize_scalar(
        lambda x: -float(func(x)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": xatol},
    )
    return float(res.x), float(-res.fun)


def dense_maximum(func, lo: float, hi: float, step: float, xatol: float = 1e-10):
    """
    Maximum of a vectorized function on [lo, hi]: scan a uniform grid,
    then refine between the neighbours of the best grid point.
    The result never drops below the best grid value.
    """
    count = max(2, int(math.ceil((hi - lo) / step)) + 1)
    ts = np.linspace(lo, hi, count)
    vals = np.asarray(func(ts), dtype=float)
    best = int(np.argmax(vals))

    left = ts[max(best - 1, 0)]
    right = ts[min(best + 1, count - 1)]
    x, value = refine_maximum(lambda x: float(np.asarray(func(np.array([x])))[0]), left, right, xatol)

    if value < vals[best]:
        return float(ts[best]), float(vals[best])
    return x, value


# -------------------------------------------------
# SEEDS
# -------------------------------------------------

def derive_seed(seed: int, *keys: int) -> int:
    """
    Independent 63-bit child seed for (seed, *keys).
    Same inputs always give the same child.
    """
    ss = np.random.SeedSequence([int(seed), *[int(k) for k in keys]])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


# -------------------------------------------------
# JSON NORMALIZER
# -------------------------------------------------

def to_jsonable(obj):
    """
    Convert numpy scalars/arrays, tuples and non-finite floats into plain
    JSON values (NaN and inf become None).
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}

    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]

    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]

    if isinstance(obj, (np.integer,)):
        return int(obj)

    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None

    if isinstance(obj, np.bool_):
        return bool(obj)

    return obj
