"""Pinned, deterministic experiment reproductions behind `schedbound repro`.

Each target writes CSV data plus a JSON summary of its headline numbers
into the output directory.  Inputs are hard-wired; repeated invocations
produce byte-identical files.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import bounds, scaling, schedules, serialize, toy, tuning


def _write(outdir: str, name: str, header, rows, fmt: str = "csv") -> str:
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        return serialize.write_text(os.path.join(outdir, f"{name}.json"), serialize.json_text(payload))
    return serialize.write_text(os.path.join(outdir, f"{name}.csv"), serialize.csv_text(header, rows))


def gamma_star_scaling(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """gamma* vs horizon for wsd(c=0.2) and cosine, with 1/sqrt(T) fits."""
    Ts = [200 * 2**k for k in range(7)]
    wsd_pts = [(T, bounds.optimal_gamma(schedules.wsd(T, 0.2))) for T in Ts]
    cos_pts = [(T, bounds.optimal_gamma(schedules.cosine(T))) for T in Ts]
    fit_w = tuning.fit_inv_sqrt(wsd_pts)
    fit_c = tuning.fit_inv_sqrt(cos_pts)
    rows = [(T, gw, gc) for (T, gw), (_, gc) in zip(wsd_pts, cos_pts)]
    files = [_write(outdir, "gamma_star_scaling", ["T", "gamma_star_wsd", "gamma_star_cosine"], rows, fmt)]
    return {
        "files": files,
        "a_wsd": float(fit_w.coefficients[0]),
        "a_cosine": float(fit_c.coefficients[0]),
        "free_exponent_wsd": fit_w.free_exponent,
        "free_exponent_cosine": fit_c.free_exponent,
        "ratio_cosine_over_wsd": float(fit_c.coefficients[0] / fit_w.coefficients[0]),
    }


def rho_transfer(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Continuation factor keeping gamma* fixed when doubling/quadrupling T."""
    T1, c = 4000, 0.2
    out: dict = {"files": [], "T1": T1, "c": c}
    for mult in (2, 4):
        res = tuning.transfer_horizon_rho(T1, mult * T1, c)
        rows = zip(res.diagnostics.grid, res.diagnostics.objective, res.diagnostics.aux["mismatch"])
        out["files"].append(
            _write(outdir, f"rho_transfer_{mult}x", ["rho", "abs_gamma_mismatch", "gamma_mismatch"], rows, fmt)
        )
        out[f"rho_{mult}x"] = res.value
        out[f"feasible_{mult}x"] = res.feasible
    return out


def cooldown_transfer(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Cooldown fraction keeping gamma* fixed on a doubled horizon."""
    T1, c = 4000, 0.2
    out: dict = {"files": [], "T1": T1, "c_short": c}
    for base, tag in (("constant", "wsd"), ("inv-sqrt", "inv_sqrt")):
        res = tuning.transfer_horizon_cooldown(T1, 2 * T1, c, base=base)
        rows = zip(res.diagnostics.grid, res.diagnostics.objective, res.diagnostics.aux["mismatch"])
        out["files"].append(
            _write(outdir, f"cooldown_transfer_{tag}", ["c", "abs_gamma_mismatch", "gamma_mismatch"], rows, fmt)
        )
        out[f"c_long_{tag}"] = res.value
        out[f"feasible_{tag}"] = res.feasible
    return out


def lr_transfer(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """ln(gamma*(1)/gamma*(c)) across cooldown fractions, both shapes."""
    T = 10_000
    lin = tuning.lr_transfer_curve(T, shape=schedules.CooldownShape.LINEAR)
    sqr = tuning.lr_transfer_curve(T, shape=schedules.CooldownShape.ONE_MINUS_SQRT)
    rows = [(c, v, w) for (c, v), (_, w) in zip(lin, sqr)]
    files = [_write(outdir, "lr_transfer", ["c", "log_ratio_linear", "log_ratio_one_minus_sqrt"], rows, fmt)]
    fit = tuning.fit_polynomial(lin, degree=6)
    at_02 = math.log(
        bounds.optimal_gamma(schedules.wsd(T, 1.0)) / bounds.optimal_gamma(schedules.wsd(T, 0.2))
    )
    return {
        "files": files,
        "T": T,
        "log_ratio_linear_at_c_0.2": at_02,
        "poly6_coefficients_linear": [float(x) for x in fit.coefficients],
        "poly6_residual_norm": fit.residual_norm,
    }


def cooldown_sweep(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Bound vs cooldown fraction, per-c-tuned and at a fixed gamma."""
    out: dict = {"files": []}
    for T in (400, 4000):
        tuned = tuning.sweep_cooldown(T, threads=threads)
        g_fix = 0.5 * bounds.optimal_gamma(schedules.wsd(T, 1.0))
        fixed = tuning.sweep_cooldown(T, gamma=g_fix, threads=threads)
        rows = zip(tuned.grid, tuned.objective, tuned.aux["gamma"], fixed.objective)
        out["files"].append(
            _write(outdir, f"cooldown_sweep_T{T}", ["c", "omega_tuned", "gamma_tuned", "omega_fixed_gamma"], rows, fmt)
        )
        out[f"T{T}"] = {
            "argmin_c_tuned": tuned.argmin_value,
            "argmin_c_fixed_gamma": fixed.argmin_value,
            "fixed_gamma": g_fix,
        }
    return out


def gradnorm_shapes(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Cooldown drop of the bound under shrinking gradient-norm models."""
    T, c = 400, 0.2
    T0 = schedules.cooldown_start(T, c)
    sched = schedules.wsd(T, c)
    alphas = (0.0, -0.5, -1.0)
    curves = []
    out: dict = {"files": [], "T": T, "c": c, "T0": T0}
    for alpha in alphas:
        g = bounds.GradNormModel(alpha=alpha)
        spec = bounds.BoundSpec(sched, g, gamma=bounds.optimal_gamma(sched, g))
        curve = bounds.bound_curve(spec, stride=1, threads=threads)
        curves.append(curve)
        out[f"drop_ratio_alpha_{alpha:g}"] = float(curve.values[T0 - 1] / curve.values[T - 1])
    rows = zip(curves[0].t, *[c.values for c in curves])
    header = ["t"] + [f"omega_alpha_{a:g}" for a in alphas]
    out["files"].append(_write(outdir, "gradnorm_shapes", header, rows, fmt))
    return out


def min_ablation(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Last-iterate bound vs the best-iterate ablation along the run."""
    T, c = 400, 0.2
    T0 = schedules.cooldown_start(T, c)
    sched = schedules.wsd(T, c)
    spec = bounds.BoundSpec(sched, gamma=bounds.optimal_gamma(sched))
    last = bounds.bound_curve(spec, stride=1, threads=threads)
    best = bounds.best_iterate_curve(spec, stride=1, threads=threads)
    rows = zip(last.t, last.values, best.values)
    files = [_write(outdir, "min_ablation", ["t", "omega_last_iterate", "omega_best_iterate"], rows, fmt)]
    return {
        "files": files,
        "T": T,
        "c": c,
        "T0": T0,
        "gamma": spec.gamma,
        "drop_ratio_last_iterate": float(last.values[T0 - 1] / last.values[T - 1]),
        "drop_ratio_best_iterate": float(best.values[T0 - 1] / best.values[T - 1]),
    }


def toy_runs(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """The three-schedule subgradient-descent comparison, seed 0."""
    T, seed = 400, 0
    runs = toy.comparison_runs(seed=seed, T=T, threads=threads)
    T0 = schedules.cooldown_start(T, 0.2)
    out: dict = {"files": [], "seed": seed, "T": T, "T0": T0}
    for name in ("wsd", "constant", "cosine"):
        rec = runs[name]
        rows = zip(range(1, T + 1), rec.schedule_used.values, rec.losses)
        out["files"].append(_write(outdir, f"toy_{name}", ["t", "eta", "loss"], rows, fmt))
        out[f"final_loss_{name}"] = float(rec.losses[-1])
    w = runs["wsd"].losses
    out["wsd_cooldown_drop_ratio"] = float(w[T0 - 1] / w[T - 1])
    out["wsd_pre_window_ratio"] = float(w[2 * T0 - T - 1] / w[T0 - 1])
    return out


def schedule_comparison(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Tuned bound for the standard schedule zoo at one horizon."""
    T = 400
    zoo = [
        ("constant", schedules.constant(T)),
        ("cosine", schedules.cosine(T)),
        ("cosine_final_0.1", schedules.cosine(T, 0.1)),
        ("wsd_c0.2", schedules.wsd(T, 0.2)),
        ("wsd_c0.2_1-sqrt", schedules.wsd(T, 0.2, schedules.CooldownShape.ONE_MINUS_SQRT)),
        ("linear_decay", schedules.linear_decay(T)),
        ("one_minus_sqrt", schedules.one_minus_sqrt(T)),
        ("inv_sqrt", schedules.inv_sqrt(T)),
        ("inv_sqrt_cooldown_0.2", schedules.with_cooldown(schedules.inv_sqrt(T), 0.2)),
        ("poly_alpha_1", schedules.polynomial_decay(T, 1.0)),
    ]
    rows = []
    best_name, best_val = None, math.inf
    for name, sched in zoo:
        dist, noise = bounds.bound_terms(sched)
        gs = math.sqrt(dist / noise)
        val = 2.0 * math.sqrt(dist * noise)
        rows.append((name, gs, val))
        if val < best_val:
            best_name, best_val = name, val
    files = [_write(outdir, "schedule_comparison", ["schedule", "gamma_star", "tuned_bound"], rows, fmt)]
    return {"files": files, "T": T, "best_schedule": best_name, "best_tuned_bound": best_val}


def cosine_cycles(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Cosine warm restarts: shorter cycles only hurt the bound."""
    T, final = 400, 0.1
    g_full = bounds.optimal_gamma(schedules.cosine(T, final, 1.0))
    rows = []
    for cycle in (0.125, 0.25, 0.5, 1.0):
        sched = schedules.cosine(T, final, cycle)
        tuned = bounds.tuned_bound(sched)
        fixed = bounds.bound_value(bounds.BoundSpec(sched, gamma=g_full))
        rows.append((cycle, tuned, fixed))
    files = [_write(outdir, "cosine_cycles", ["cycle", "omega_tuned", "omega_at_full_cycle_gamma"], rows, fmt)]
    return {
        "files": files,
        "T": T,
        "final_fraction": final,
        "full_cycle_gamma": g_full,
        "best_cycle_tuned": float(min(rows, key=lambda r: r[1])[0]),
        "best_cycle_fixed_gamma": float(min(rows, key=lambda r: r[2])[0]),
    }


def closed_form_constants(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Headline harmonic-number constants at T = 1e5."""
    T = 10**5
    T0 = int(0.8 * T)
    h = bounds.harmonic(T - 1)
    gap = bounds.harmonic(T + T0 - 2) - bounds.harmonic(T - T0 + 1)
    vals = {
        "harmonic_T_minus_1": h,
        "wsd_log_gap_doubled": 2.0 * gap,
        "linear_decay_factor": 2.0 + (h - 2.0 / 3.0) / (T + 1.0),
        "constant_bound_sqrtT": bounds.constant_bound_exact(T) * math.sqrt(T),
        "wsd_bound_sqrtT": bounds.wsd_bound_exact(T, T0) * math.sqrt(T),
        "linear_decay_bound_sqrtT": bounds.linear_decay_bound_exact(T) * math.sqrt(T),
    }
    files = [_write(outdir, "closed_form_constants", ["name", "value"], sorted(vals.items()), fmt)]
    return {"files": files, "T": T, "T0": T0, **vals}


def scaling_law_cases(outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Loss-delta pricing for the four documented cases, delta = 0.01."""
    law = scaling.ScalingLaw()
    delta = 0.01
    cases = [
        ("tokens", 124e6, 10.24e9),
        ("tokens", 124e6, 20.48e9),
        ("params", 124e6, 10.24e9),
        ("params", 210e6, 10.24e9),
    ]
    rows = []
    out: dict = {"files": [], "delta": delta}
    for mode, N, D in cases:
        if mode == "tokens":
            result = scaling.tokens_for_delta(law, N, D, delta)
            rows.append((mode, N, D, delta, result))
            out[f"tokens_from_{D / 1e9:.2f}B"] = result
        else:
            result = scaling.params_for_delta(law, N, D, delta)
            rows.append((mode, N, D, delta, result))
            out[f"params_from_{N / 1e6:.0f}M"] = result
    out["files"] = [_write(outdir, "scaling_law_cases", ["mode", "N", "D", "delta", "result"], rows, fmt)]
    return out


TARGETS = {
    "fig4": gamma_star_scaling,
    "gamma-star-scaling": gamma_star_scaling,
    "rho-transfer": rho_transfer,
    "cooldown-transfer": cooldown_transfer,
    "lr-transfer": lr_transfer,
    "cooldown-sweep": cooldown_sweep,
    "gradnorm-shapes": gradnorm_shapes,
    "min-ablation": min_ablation,
    "toy": toy_runs,
    "schedule-comparison": schedule_comparison,
    "cosine-cycles": cosine_cycles,
    "closed-form-constants": closed_form_constants,
    "scaling-law-cases": scaling_law_cases,
}

# primary names only (fig4 is a legacy alias for gamma-star-scaling)
TARGET_NAMES = [name for name in TARGETS if name != "fig4"]


def run_target(target: str, outdir: str, fmt: str = "csv", threads: int = 1) -> dict:
    """Run one repro target (or 'all') and return its summary dict."""
    if target == "all":
        return {name: TARGETS[name](outdir, fmt, threads) for name in TARGET_NAMES}
    if target not in TARGETS:
        known = ", ".join(["all"] + sorted(TARGETS))
        raise ValueError(f"unknown repro target {target!r}; known targets: {known}")
    return TARGETS[target](outdir, fmt, threads)
