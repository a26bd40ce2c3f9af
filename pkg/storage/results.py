import json
import os

import pandas as pd

from config.config import CSV_FLOAT_FORMAT, SWEEP_CSV, SWEEP_JSON
from dsp.bandlimited import BandlimitedSignal, signal_from_dict
from dsp.sampling import SampleRecord
from estimation.frame import Reconstruction
from estimation.onebit import predicted_residuals
from utils.helpers import to_jsonable
from utils.logger import log_info

SWEEP_COLUMNS = ["N", "method", "D_hat", "stderr", "mean_iters"]


# ================= JSON =================
def dump_json(payload) -> str:
    """
    Canonical text for a result payload: sorted keys, fixed indent,
    trailing newline, non-finite numbers as null.
    """
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n"


def save_json(payload, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_json(payload))
    return path


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# ================= SWEEP RESULTS =================
def save_sweep(result, output_dir):
    """
    Write sweep.csv (one row per N and method) and sweep.json
    (full echo). Returns (csv_path, json_path).
    """
    os.makedirs(output_dir, exist_ok=True)
    csv_path = os.path.join(output_dir, SWEEP_CSV)
    json_path = os.path.join(output_dir, SWEEP_JSON)

    df = pd.DataFrame(result.rows, columns=SWEEP_COLUMNS)
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        df.to_csv(fh, index=False, float_format=CSV_FLOAT_FORMAT)

    save_json(result.to_dict(), json_path)
    log_info(f"Sweep saved: {csv_path} {json_path}")
    return csv_path, json_path


def load_sweep_rows(csv_path) -> pd.DataFrame:
    """
    Returns the sweep table as a DataFrame with SWEEP_COLUMNS.
    """
    df = pd.read_csv(csv_path)
    missing = [c for c in SWEEP_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"{csv_path} is missing columns {missing}")
    return df


# ================= SAMPLE DUMP =================
def save_samples(rec: SampleRecord, path):
    """
    CSV with n, t, y (real stream) or n, t, bit (one-bit stream).
    """
    if rec.reals is not None:
        df = pd.DataFrame({"n": rec.indices, "t": rec.times, "y": rec.reals})
    elif rec.bits is not None:
        df = pd.DataFrame({"n": rec.indices, "t": rec.times, "bit": rec.bits})
    else:
        raise ValueError("record carries no samples")

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        df.to_csv(fh, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


# ================= ITERATION DIAGNOSTICS =================
def save_iterations(recon: Reconstruction, alpha: float, path):
    """
    CSV with iter, residual_sup, predicted_bound per fixed-point step.
    """
    history = list(recon.residual_history)
    df = pd.DataFrame({
        "iter": range(1, len(history) + 1),
        "residual_sup": history,
        "predicted_bound": predicted_residuals(history, alpha),
    })

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        df.to_csv(fh, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


# ================= SIGNALS =================
def save_signal(sig: BandlimitedSignal, path):
    return save_json(sig.to_dict(), path)


def load_signal(path) -> BandlimitedSignal:
    return signal_from_dict(load_json(path))
