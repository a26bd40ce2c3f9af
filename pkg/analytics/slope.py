import numpy as np
from scipy.stats import linregress
from scipy.stats import t as student_t


def fit_loglog_slope(rows) -> dict:
    """
    Ordinary least squares of ln D_hat on ln N.

    rows: iterable of mappings with "N" and "D_hat".
    Returns slope, intercept, r2, the 95% slope interval and its stderr.
    """
    rows = list(rows)
    if len(rows) < 3:
        raise ValueError(f"need at least 3 rows to fit a slope, got {len(rows)}")

    N = np.array([float(r["N"]) for r in rows])
    D = np.array([float(r["D_hat"]) for r in rows])
    if np.any(~np.isfinite(D)) or np.any(D <= 0):
        raise ValueError("every D_hat must be a positive finite number")

    fit = linregress(np.log(N), np.log(D))
    half = float(student_t.ppf(0.975, len(rows) - 2)) * float(fit.stderr)

    return {
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "r2": float(fit.rvalue) ** 2,
        "ci": (float(fit.slope) - half, float(fit.slope) + half),
        "stderr": float(fit.stderr),
    }
