import argparse
import sys

from config.config import (
    APP_TITLE,
    DEFAULT_AMPLITUDE,
    DEFAULT_GRID_DENSITY,
    DEFAULT_K,
    DEFAULT_LAMBDA,
    DEFAULT_SEED,
    DEFAULT_SIGMA_W,
    SIGMA_FLOOR_MULT,
)
from cli.commands import (
    EXIT_FAILURE,
    run_constants,
    run_fixed_point,
    run_simulate_frame,
    run_simulate_onebit,
    run_sweep,
)
from utils.logger import log_error, log_info


# ================= PARSER =================
def _add_signal_args(parser):
    parser.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    parser.add_argument("--K", type=int, default=DEFAULT_K, help="Nyquist-rate random draws")
    parser.add_argument("--amplitude", type=float, default=DEFAULT_AMPLITUDE)
    parser.add_argument("--sigma-w", dest="sigma_w", type=float, default=DEFAULT_SIGMA_W)
    parser.add_argument("--sigma-floor-mult", dest="sigma_floor_mult", type=float, default=SIGMA_FLOOR_MULT)
    parser.add_argument("--N", type=int, default=16, help="oversampling factor")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--grid-density", dest="grid_density", type=int, default=DEFAULT_GRID_DENSITY)
    parser.add_argument("--signal", help="load the signal from a JSON file instead of synthesizing it")
    parser.add_argument("--save-signal", dest="save_signal", help="write the signal JSON here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="app.py",
        description=f"{APP_TITLE}: O(1/N) reconstruction from real and one-bit samples",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            "examples:\n"
            "  python app.py constants --lambda 2\n"
            "  python app.py fixed-point --exact --diagnostics results/iters.csv\n"
            "  python app.py sweep --config configs/precision_indifference.json --check\n"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print kernel constants as JSON")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.set_defaults(handler=run_constants)

    p = sub.add_parser("simulate-frame", help="one frame reconstruction from noisy samples")
    _add_signal_args(p)
    p.add_argument("--dump-samples", dest="dump_samples", help="CSV with n,t,y")
    p.set_defaults(handler=run_simulate_frame)

    p = sub.add_parser("simulate-onebit", help="one reconstruction from one-bit samples")
    _add_signal_args(p)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--warm-start", dest="warm_start", action="store_true",
                   help="start the iteration from the frame estimate instead of zero")
    p.add_argument("--dump-samples", dest="dump_samples", help="CSV with n,t,bit")
    p.set_defaults(handler=run_simulate_onebit)

    p = sub.add_parser("fixed-point", help="single fixed-point solve with diagnostics")
    _add_signal_args(p)
    p.add_argument("--exact", action="store_true", help="use exact h = (F(g) - 1/2) * phi")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--diagnostics", help="CSV with iter,residual_sup,predicted_bound")
    p.set_defaults(handler=run_fixed_point)

    p = sub.add_parser("sweep", help="distortion sweep over N for both methods")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--check", action="store_true", help="exit 2 when acceptance bands are violated")
    p.add_argument("--workers", type=int)
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=run_sweep)

    return parser


# ================= MAIN =================
def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log_info(f"Command: {args.command}")
    try:
        return args.handler(args)
    except Exception as exc:
        log_error(f"{args.command} failed: {type(exc).__name__}: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
