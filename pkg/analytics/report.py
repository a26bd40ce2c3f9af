def _fmt(value, spec=".4g"):
    if value is None:
        return "n/a"
    return format(value, spec)


def sweep_summary(result) -> str:
    """
    Plain-text digest of a SweepResult for the terminal.
    """
    noise = result.noise
    lines = [
        f"lambda={result.config['lambda']}  K={result.config['K']}  trials={result.config['trials']}",
        f"sigma_w={_fmt(noise['sigma_w'])}  sigma_d={_fmt(noise['sigma_d'])}  "
        f"sigma_tot={_fmt(noise['sigma_tot'])}  alpha={_fmt(noise['alpha'])}  beta={_fmt(noise['beta'])}",
        "",
        f"{'method':<8} {'N':>5} {'D_hat':>12} {'stderr':>10} {'iters':>7} {'bound':>12}",
    ]

    for row in result.rows:
        if row["status"] != "ok":
            lines.append(f"{row['method']:<8} {row['N']:>5}  FAILED  {row['note']}")
            continue
        lines.append(
            f"{row['method']:<8} {row['N']:>5} {row['D_hat']:>12.4e} {row['stderr']:>10.2e} "
            f"{row['mean_iters']:>7.1f} {row['bound']:>12.4e}"
        )

    lines.append("")
    if result.config.get("fit_N_min", 1) > 1:
        lines.append(f"fit range: N >= {result.config['fit_N_min']}")
    for method, fit in result.slopes.items():
        if fit.get("skipped"):
            lines.append(f"{method} slope: skipped ({fit['reason']})")
        else:
            lo, hi = fit["ci"]
            lines.append(f"{method} slope: {fit['slope']:.3f}  [{lo:.3f}, {hi:.3f}]  r2={fit['r2']:.4f}")

    for check in result.acceptance.get("checks", []):
        mark = "PASS" if check["passed"] else "FAIL"
        tag = "" if check["gating"] else " (informational)"
        lines.append(f"{mark} {check['name']}: {_fmt(check['value']) if not isinstance(check['value'], bool) else check['value']}{tag}")

    return "\n".join(lines)
