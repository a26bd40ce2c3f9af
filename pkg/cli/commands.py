import sys

from analytics import experiment
from analytics.report import sweep_summary
from analytics.sweep import ExperimentConfig, sweep
from dsp.bandlimited import synth_random
from dsp.kernel import compute_constants
from dsp.noise import build
from storage.results import dump_json, load_signal, save_iterations, save_samples, save_signal

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CHECK_FAILED = 2


# ================= SHARED =================
def _signal_and_model(args):
    spec = compute_constants(args.lam)
    if args.signal:
        sig = load_signal(args.signal)
        if sig.spec.lam != spec.lam:
            raise ValueError(f"signal file has lambda={sig.spec.lam}, command asked for {spec.lam}")
    else:
        sig = synth_random(spec, args.K, args.amplitude, args.seed)

    if args.save_signal:
        save_signal(sig, args.save_signal)

    model = build(spec, args.sigma_w, args.sigma_floor_mult)
    return sig, model


def _emit(payload):
    sys.stdout.write(dump_json(payload))


# ================= CONSTANTS =================
def run_constants(args) -> int:
    _emit(compute_constants(args.lam).to_dict())
    return EXIT_OK


# ================= SIMULATE =================
def run_simulate_frame(args) -> int:
    sig, model = _signal_and_model(args)
    summary, rec, _ = experiment.simulate_frame(sig, model, args.N, args.seed, args.grid_density)

    if args.dump_samples:
        save_samples(rec, args.dump_samples)

    summary["noise_model"] = model.to_dict()
    _emit(summary)
    return EXIT_OK


def run_simulate_onebit(args) -> int:
    sig, model = _signal_and_model(args)
    summary, rec, _ = experiment.simulate_onebit(
        sig, model, args.N, args.seed, args.grid_density,
        tol=args.tol, max_iters=args.max_iters, warm_start=args.warm_start,
    )

    if args.dump_samples:
        save_samples(rec, args.dump_samples)

    summary["noise_model"] = model.to_dict()
    _emit(summary)
    return EXIT_OK


# ================= FIXED POINT =================
def run_fixed_point(args) -> int:
    sig, model = _signal_and_model(args)
    summary, recon = experiment.run_fixed_point(
        sig, model, None if args.exact else args.N, args.seed, args.grid_density,
        tol=args.tol, max_iters=args.max_iters,
    )

    if args.diagnostics:
        save_iterations(recon, model.alpha, args.diagnostics)

    summary["noise_model"] = model.to_dict()
    _emit(summary)
    return EXIT_OK


# ================= SWEEP =================
def run_sweep(args) -> int:
    overrides = {
        key: value
        for key, value in {
            "workers": args.workers,
            "output_dir": args.output_dir,
            "trials": args.trials,
            "seed": args.seed,
        }.items()
        if value is not None
    }
    if args.config:
        config = ExperimentConfig.from_json(args.config, **overrides)
    else:
        config = ExperimentConfig.from_dict({}, **overrides)

    result = sweep(config)
    print(sweep_summary(result))

    if args.check and not result.acceptance["passed"]:
        return EXIT_CHECK_FAILED
    return EXIT_OK
