import math

from config.config import MIN_NYQUIST_DRAWS, MIN_TRIALS

METHODS = ("frame", "onebit")


def validate_lambda(lam):
    if not math.isfinite(lam) or lam <= 1:
        raise ValueError(f"lambda must be > 1, got {lam}")


def validate_amplitude(amplitude, upper=1.0):
    if not (0 < amplitude <= upper):
        raise ValueError(f"amplitude must lie in (0, {upper}], got {amplitude}")


def validate_draw_count(K):
    if int(K) != K or K < MIN_NYQUIST_DRAWS:
        raise ValueError(f"K must be an integer >= {MIN_NYQUIST_DRAWS}, got {K}")


def validate_oversampling(N):
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")


def validate_sigma_w(sigma_w):
    if not math.isfinite(sigma_w) or sigma_w < 0:
        raise ValueError(f"sigma_w must be >= 0, got {sigma_w}")


def validate_floor_mult(mult):
    if mult < 1:
        raise ValueError(f"sigma_floor_mult must be >= 1, got {mult}")


def validate_method(method):
    if method not in METHODS:
        raise ValueError(f"Unknown method '{method}', expected one of {METHODS}")


def validate_trials(M):
    if int(M) != M or M < MIN_TRIALS:
        raise ValueError(f"trials must be an integer >= {MIN_TRIALS}, got {M}")


def validate_tolerance(tol):
    if tol is None or not (tol > 0):
        raise ValueError(f"tolerance must be > 0, got {tol}")


def validate_n_list(n_list):
    if len(n_list) == 0:
        raise ValueError("N_list is empty")

    for n in n_list:
        validate_oversampling(n)

    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError(f"N_list must be strictly increasing, got {list(n_list)}")
