"""Command-line front end.

Every subcommand validates its parameters, dispatches to the library,
writes CSV/JSON artifacts into an output directory, and prints a JSON
summary (echoing the resolved configuration) to stdout.  Exit codes:
0 success, 2 validation error (bad subcommand, parameter, or output
path), 1 runtime error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import bounds, repro, scaling, schedules, serialize, toy, tuning

OUTDIR_ENV = "SCHEDBOUND_OUTDIR"


def _add_common(p: argparse.ArgumentParser, name: str):
    p.add_argument("--outdir", default=None, help=f"output directory (default: ${OUTDIR_ENV} or '.')")
    p.add_argument("--name", default=name, help="base name for output files")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="data file format")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: cpu count)")


def _add_bound_params(p: argparse.ArgumentParser):
    p.add_argument("--D", type=float, default=1.0, help="initial distance to the comparator")
    p.add_argument("--G", type=float, default=1.0, help="gradient norm scale")
    p.add_argument("--grad-alpha", type=float, default=0.0, help="gradient norm exponent (G_t = G * t**alpha, alpha <= 0)")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="schedbound",
        description="Suboptimality bounds, tuning, and transfer for SGD learning-rate schedules.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="materialize a schedule to CSV/JSON")
    p.add_argument("--schedule", required=True, help="schedule spec, e.g. wsd:T=4000,c=0.2")
    _add_common(p, "schedule")

    p = sub.add_parser("bound", help="bound curve for a schedule")
    p.add_argument("--schedule", required=True)
    _add_bound_params(p)
    p.add_argument("--gamma", default="star", help="base learning rate, a float or 'star'")
    p.add_argument("--stride", type=int, default=None, help="horizon stride (default max(1, T//2000))")
    _add_common(p, "bound")

    p = sub.add_parser("sweep-gamma", help="bound vs base learning rate")
    p.add_argument("--schedule", required=True)
    _add_bound_params(p)
    p.add_argument("--gamma-min", type=float, default=None)
    p.add_argument("--gamma-max", type=float, default=None)
    p.add_argument("--points", type=int, default=tuning.GAMMA_GRID_POINTS)
    _add_common(p, "sweep_gamma")

    p = sub.add_parser("sweep-cooldown", help="bound vs cooldown fraction")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--shape", default="linear", help="cooldown shape: linear or 1-sqrt")
    p.add_argument("--base", choices=("constant", "inv-sqrt"), default="constant")
    _add_bound_params(p)
    p.add_argument("--gamma", default="star", help="'star' tunes gamma per fraction; a float fixes it")
    p.add_argument("--c-min", type=float, default=0.02)
    p.add_argument("--c-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=50)
    _add_common(p, "sweep_cooldown")

    p = sub.add_parser("transfer-horizon", help="extend a tuned run to a longer horizon")
    p.add_argument("--mode", choices=("rho", "cooldown"), required=True)
    p.add_argument("--T1", type=int, required=True)
    p.add_argument("--T2", type=int, required=True)
    p.add_argument("--c", type=float, default=0.2, help="cooldown fraction of the short run")
    p.add_argument("--shape", default="linear")
    p.add_argument("--base", choices=("constant", "inv-sqrt"), default="constant")
    _add_bound_params(p)
    _add_common(p, "transfer_horizon")

    p = sub.add_parser("transfer-lr", help="tuned-gamma ratio across cooldown fractions")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--shape", default="linear")
    _add_bound_params(p)
    p.add_argument("--c-min", type=float, default=0.02)
    p.add_argument("--c-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=50)
    _add_common(p, "transfer_lr")

    p = sub.add_parser("toy-run", help="subgradient descent on the toy problem")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--schedule", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--x-start", default=None, help="comma-separated start point (default: problem's)")
    p.add_argument("--record-iterates", action="store_true")
    _add_common(p, "toy_run")

    p = sub.add_parser("toy-compare", help="wsd vs constant vs cosine on one instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--T", type=int, default=400)
    _add_common(p, "toy_compare")

    p = sub.add_parser("scaling-law", help="price a loss delta in tokens or parameters")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--N", type=float, required=True, help="parameter count")
    p.add_argument("--D", type=float, required=True, help="token count")
    p.add_argument("--solve", choices=("tokens", "params"), required=True)
    p.add_argument("--E", type=float, default=None)
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--B", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--loss-scale", type=float, default=1.0)
    _add_common(p, "scaling_law")

    p = sub.add_parser("fit", help="fit a parametric model to (x, y) CSV data")
    p.add_argument("--model", choices=("hgamma", "invsqrt", "poly6"), required=True)
    p.add_argument("--input", required=True, help="CSV file with header and two columns (x, y)")
    _add_common(p, "fit")

    p = sub.add_parser("repro", help="reproduce a named experiment with pinned defaults")
    p.add_argument("target", help="target id, 'all', or 'list'")
    _add_common(p, "repro")

    return top


def _resolve_outdir(args) -> str:
    outdir = args.outdir or os.environ.get(OUTDIR_ENV) or "."
    try:
        os.makedirs(outdir, exist_ok=True)
    except OSError as exc:
        raise ValueError(f"output directory {outdir!r} is not writable: {exc}") from None
    if not os.access(outdir, os.W_OK):
        raise ValueError(f"output directory {outdir!r} is not writable")
    return outdir


def _resolve_threads(args) -> int:
    if args.threads is None:
        return os.cpu_count() or 1
    if args.threads < 1:
        raise ValueError(f"--threads must be >= 1, got {args.threads}")
    return args.threads


def _gamma_arg(raw: str) -> float | None:
    if raw == "star":
        return None
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"--gamma must be a float or 'star', got {raw!r}") from None
    if not value > 0.0:
        raise ValueError(f"--gamma must be positive, got {value}")
    return value


def _grad_norms(args) -> bounds.GradNormModel:
    return bounds.GradNormModel(G=args.G, alpha=args.grad_alpha)


def _emit(outdir: str, name: str, fmt: str, header, rows, summary: dict, extra_files=()) -> dict:
    if fmt == "json":
        data_path = serialize.write_text(
            os.path.join(outdir, f"{name}.json"),
            serialize.json_text([dict(zip(header, row)) for row in rows]),
        )
    else:
        data_path = serialize.write_text(os.path.join(outdir, f"{name}.csv"), serialize.csv_text(header, rows))
    summary = dict(summary)
    summary["files"] = [data_path, *extra_files]
    summary_path = serialize.write_text(os.path.join(outdir, f"{name}_summary.json"), serialize.json_text(summary))
    summary["summary_file"] = summary_path
    return summary


def _echo(args, **extra) -> dict:
    skip = {"outdir", "name", "format", "threads"}
    config = {k: v for k, v in sorted(vars(args).items()) if k not in skip and not callable(v)}
    config.update(extra)
    return config


def _cmd_schedule(args, outdir, threads) -> dict:
    sched = schedules.parse_spec(args.schedule)
    rows = zip(range(1, sched.horizon + 1), sched.values)
    return _emit(outdir, args.name, args.format, ["t", "eta"], rows,
                 {"config": _echo(args), "horizon": sched.horizon})


def _cmd_bound(args, outdir, threads) -> dict:
    sched = schedules.parse_spec(args.schedule)
    grad = _grad_norms(args)
    gamma = _gamma_arg(args.gamma)
    gamma_star = bounds.optimal_gamma(sched, grad, args.D)
    spec = bounds.BoundSpec(sched, grad, args.D, gamma_star if gamma is None else gamma)
    curve = bounds.bound_curve(spec, stride=args.stride, threads=threads)
    rows = zip(curve.t, curve.values, curve.dist_terms, curve.noise_terms)
    summary = {
        "config": _echo(args),
        "gamma_used": spec.gamma,
        "gamma_star": gamma_star,
        "omega_final": curve.value_final,
        "T1_final": curve.dist_final,
        "T2_final": curve.noise_final,
        "tuned_bound_final": 2.0 * math.sqrt(curve.dist_final * curve.noise_final),
    }
    return _emit(outdir, args.name, args.format, ["t", "omega", "T1", "T2"], rows, summary)


def _cmd_sweep_gamma(args, outdir, threads) -> dict:
    sched = schedules.parse_spec(args.schedule)
    grad = _grad_norms(args)
    grid = None
    if (args.gamma_min is None) != (args.gamma_max is None):
        raise ValueError("--gamma-min and --gamma-max must be given together")
    if args.gamma_min is not None:
        if not 0.0 < args.gamma_min < args.gamma_max:
            raise ValueError("need 0 < --gamma-min < --gamma-max")
        if args.points < 1:
            raise ValueError(f"--points must be >= 1, got {args.points}")
        grid = np.logspace(math.log10(args.gamma_min), math.log10(args.gamma_max), args.points)
    sweep = tuning.sweep_gamma(sched, grad, args.D, gamma_grid=grid)
    summary = {
        "config": _echo(args),
        "argmin_gamma": sweep.argmin_value,
        "argmin_omega": sweep.argmin_objective,
        "gamma_star": bounds.optimal_gamma(sched, grad, args.D),
    }
    return _emit(outdir, args.name, args.format, ["gamma", "omega"], zip(sweep.grid, sweep.objective), summary)


def _cmd_sweep_cooldown(args, outdir, threads) -> dict:
    shape = schedules.CooldownShape.parse(args.shape)
    grad = _grad_norms(args)
    gamma = _gamma_arg(args.gamma)
    if not 0.0 < args.c_min <= args.c_max <= 1.0:
        raise ValueError("need 0 < --c-min <= --c-max <= 1")
    if args.points < 1:
        raise ValueError(f"--points must be >= 1, got {args.points}")
    grid = np.logspace(math.log10(args.c_min), math.log10(args.c_max), args.points)
    sweep = tuning.sweep_cooldown(args.T, grid, shape, grad, args.D, gamma=gamma, base=args.base, threads=threads)
    rows = zip(sweep.grid, sweep.objective, sweep.aux["gamma"])
    summary = {
        "config": _echo(args),
        "argmin_c": sweep.argmin_value,
        "argmin_omega": sweep.argmin_objective,
        "gamma_at_argmin": float(sweep.aux["gamma"][int(np.argmin(sweep.objective))]),
    }
    return _emit(outdir, args.name, args.format, ["c", "omega", "gamma"], rows, summary)


def _cmd_transfer_horizon(args, outdir, threads) -> dict:
    shape = schedules.CooldownShape.parse(args.shape)
    grad = _grad_norms(args)
    if args.mode == "rho":
        res = tuning.transfer_horizon_rho(args.T1, args.T2, args.c, shape, grad, args.D)
        param = "rho"
    else:
        res = tuning.transfer_horizon_cooldown(args.T1, args.T2, args.c, shape, args.base, grad, args.D)
        param = "c"
    rows = zip(res.diagnostics.grid, res.diagnostics.objective, res.diagnostics.aux["mismatch"])
    summary = {
        "config": _echo(args),
        param: res.value,
        "feasible": res.feasible,
        "target_gamma": res.target_gamma,
        "achieved_gamma": res.achieved_gamma,
    }
    return _emit(outdir, args.name, args.format, [param, "abs_gamma_mismatch", "gamma_mismatch"], rows, summary)


def _cmd_transfer_lr(args, outdir, threads) -> dict:
    shape = schedules.CooldownShape.parse(args.shape)
    grad = _grad_norms(args)
    if not 0.0 < args.c_min <= args.c_max <= 1.0:
        raise ValueError("need 0 < --c-min <= --c-max <= 1")
    grid = np.logspace(math.log10(args.c_min), math.log10(args.c_max), args.points)
    curve = tuning.lr_transfer_curve(args.T, grid, shape, grad, args.D)
    fit = tuning.fit_polynomial(curve, degree=6)
    summary = {
        "config": _echo(args),
        "poly6_coefficients": [float(x) for x in fit.coefficients],
        "poly6_residual_norm": fit.residual_norm,
    }
    return _emit(outdir, args.name, args.format, ["c", "log_ratio"], curve, summary)


def _cmd_toy_run(args, outdir, threads) -> dict:
    sched = schedules.parse_spec(args.schedule)
    problem = toy.generate_problem(args.m, args.d, args.seed)
    x_start = None
    if args.x_start is not None:
        try:
            x_start = np.array([float(v) for v in args.x_start.split(",")])
        except ValueError:
            raise ValueError(f"--x-start must be comma-separated floats, got {args.x_start!r}") from None
    rec = toy.run_sgd(problem, sched, args.gamma, x_start=x_start, record_iterates=args.record_iterates)
    rows = zip(range(1, sched.horizon + 1), sched.values, rec.losses)
    summary = {
        "config": _echo(args),
        "final_loss": float(rec.losses[-1]),
        "min_loss": float(np.min(rec.losses)),
    }
    extra_files = []
    if args.record_iterates:
        header = ["t"] + [f"x{i + 1}" for i in range(problem.d)]
        it_rows = ([t + 1, *rec.iterates[t]] for t in range(sched.horizon))
        extra_files.append(serialize.write_text(
            os.path.join(outdir, f"{args.name}_iterates.csv"), serialize.csv_text(header, it_rows)
        ))
    return _emit(outdir, args.name, args.format, ["t", "eta", "loss"], rows, summary, extra_files)


def _cmd_toy_compare(args, outdir, threads) -> dict:
    runs = toy.comparison_runs(seed=args.seed, T=args.T, threads=threads)
    summary: dict = {"config": _echo(args)}
    files = []
    for name in ("wsd", "constant", "cosine"):
        rec = runs[name]
        rows = zip(range(1, args.T + 1), rec.schedule_used.values, rec.losses)
        if args.format == "json":
            path = serialize.write_text(
                os.path.join(outdir, f"{args.name}_{name}.json"),
                serialize.json_text([{"t": t, "eta": e, "loss": l} for t, e, l in rows]),
            )
        else:
            path = serialize.write_text(
                os.path.join(outdir, f"{args.name}_{name}.csv"), serialize.csv_text(["t", "eta", "loss"], rows)
            )
        files.append(path)
        summary[f"final_loss_{name}"] = float(rec.losses[-1])
    summary["files"] = files
    path = serialize.write_text(os.path.join(outdir, f"{args.name}_summary.json"), serialize.json_text(summary))
    summary["summary_file"] = path
    return summary


def _cmd_scaling_law(args, outdir, threads) -> dict:
    defaults = scaling.ScalingLaw()
    law = scaling.ScalingLaw(
        E=defaults.E if args.E is None else args.E,
        A=defaults.A if args.A is None else args.A,
        B=defaults.B if args.B is None else args.B,
        alpha=defaults.alpha if args.alpha is None else args.alpha,
        beta=defaults.beta if args.beta is None else args.beta,
        loss_scale=args.loss_scale,
    )
    if args.solve == "tokens":
        result = scaling.tokens_for_delta(law, args.N, args.D, args.delta)
    else:
        result = scaling.params_for_delta(law, args.N, args.D, args.delta)
    summary = {
        "config": _echo(args, E=law.E, A=law.A, B=law.B, alpha=law.alpha, beta=law.beta),
        "loss_before": scaling.loss(law, args.N, args.D),
        "result": result,
        "solve": args.solve,
    }
    path = serialize.write_text(os.path.join(outdir, f"{args.name}_summary.json"), serialize.json_text(summary))
    summary["summary_file"] = path
    return summary


def _read_xy_csv(path: str) -> list[tuple[float, float]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ValueError(f"cannot read input file {path!r}: {exc}") from None
    if len(lines) < 2:
        raise ValueError(f"input file {path!r} needs a header and at least one data row")
    points = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) < 2:
            raise ValueError(f"input row {ln!r} needs two columns (x, y)")
        try:
            points.append((float(cells[0]), float(cells[1])))
        except ValueError:
            raise ValueError(f"input row {ln!r} has non-numeric cells") from None
    return points


def _cmd_fit(args, outdir, threads) -> dict:
    points = _read_xy_csv(args.input)
    if args.model == "hgamma":
        fit = tuning.fit_inv_gamma_linear(points)
        extra = {"gamma_min": tuning.minimizer(fit)}
    elif args.model == "invsqrt":
        fit = tuning.fit_inv_sqrt(points)
        extra = {"free_prefactor": fit.free_prefactor, "free_exponent": fit.free_exponent}
    else:
        fit = tuning.fit_polynomial(points, degree=6)
        extra = {}
    xs = np.array([p[0] for p in points])
    rows = zip(xs, [p[1] for p in points], fit.predict(xs))
    summary = {
        "config": _echo(args),
        "model_kind": fit.model_kind,
        "coefficients": [float(c) for c in fit.coefficients],
        "residual_norm": fit.residual_norm,
        **extra,
    }
    return _emit(outdir, args.name, args.format, ["x", "y", "fitted"], rows, summary)


def _cmd_repro(args, outdir, threads) -> dict:
    if args.target == "list":
        return {"targets": sorted(repro.TARGETS)}
    summary = repro.run_target(args.target, outdir, args.format, threads)
    summary = {"config": _echo(args), **summary}
    path = serialize.write_text(os.path.join(outdir, f"{args.name}_{args.target}_summary.json"), serialize.json_text(summary))
    summary["summary_file"] = path
    return summary


_HANDLERS = {
    "schedule": _cmd_schedule,
    "bound": _cmd_bound,
    "sweep-gamma": _cmd_sweep_gamma,
    "sweep-cooldown": _cmd_sweep_cooldown,
    "transfer-horizon": _cmd_transfer_horizon,
    "transfer-lr": _cmd_transfer_lr,
    "toy-run": _cmd_toy_run,
    "toy-compare": _cmd_toy_compare,
    "scaling-law": _cmd_scaling_law,
    "fit": _cmd_fit,
    "repro": _cmd_repro,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags/subcommands and 0 on --help
        return int(exc.code or 0)
    try:
        outdir = _resolve_outdir(args)
        threads = _resolve_threads(args)
        summary = _HANDLERS[args.command](args, outdir, threads)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 1
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(serialize.json_text(summary))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
