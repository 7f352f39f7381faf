"""Tuning base learning rates and cooldown fractions from the bound.

Everything here treats the last-iterate bound as the objective: sweeps
evaluate it over parameter grids, transfers match the bound-optimal
gamma of one run configuration to another, and the fit helpers recover
the simple parametric forms those curves follow.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds
from .bounds import GradNormModel
from .schedules import CooldownShape, Schedule, inv_sqrt, with_cooldown, wsd

DEFAULT_COOLDOWN_GRID = np.logspace(math.log10(0.02), 0.0, 50)
GAMMA_GRID_POINTS = 61
GAMMA_GRID_DECADES = 3.0


@dataclass(frozen=True)
class SweepResult:
    """Objective evaluated on an ascending parameter grid.

    argmin ties break toward the smallest parameter value (first grid
    hit).  aux carries optional per-point extras such as the tuned
    gamma used at each cooldown fraction.
    """

    grid: np.ndarray
    objective: np.ndarray
    argmin_value: float
    argmin_objective: float
    aux: dict | None = None


@dataclass(frozen=True)
class TransferResult:
    """Outcome of matching a reference tuned gamma on a new configuration.

    value is the matched parameter (rho or cooldown fraction).  feasible
    is False when no grid point brackets the target, in which case value
    is the grid point coming closest.
    """

    value: float
    feasible: bool
    target_gamma: float
    achieved_gamma: float
    diagnostics: SweepResult


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of a named parametric model.

    coefficients are ordered as documented per model kind; for
    inv-sqrt fits the unconstrained power-law diagnostic (prefactor,
    exponent) is reported alongside the constrained 1/sqrt(T) fit.
    """

    coefficients: np.ndarray
    residual_norm: float
    model_kind: str
    free_prefactor: float | None = None
    free_exponent: float | None = None

    def predict(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.model_kind == "inv-gamma-linear":
            a, b, c = self.coefficients
            return a / x + b * x + c
        if self.model_kind == "inv-sqrt":
            return self.coefficients[0] / np.sqrt(x)
        if self.model_kind.startswith("polynomial-degree-"):
            return np.polynomial.polynomial.polyval(x, self.coefficients)
        raise ValueError(f"unknown fit model {self.model_kind!r}")


def _pmap(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))


def _sweep(grid: np.ndarray, objective: np.ndarray, aux: dict | None = None) -> SweepResult:
    idx = int(np.argmin(objective))  # first minimum = smallest parameter on ties
    return SweepResult(
        grid=np.asarray(grid, dtype=np.float64),
        objective=np.asarray(objective, dtype=np.float64),
        argmin_value=float(grid[idx]),
        argmin_objective=float(objective[idx]),
        aux=aux,
    )


def default_gamma_grid(center: float) -> np.ndarray:
    """Log grid of 61 points spanning 3 decades centered at center."""
    if not center > 0.0:
        raise ValueError(f"gamma grid center must be positive, got {center}")
    half = GAMMA_GRID_DECADES / 2.0
    return center * np.logspace(-half, half, GAMMA_GRID_POINTS)


def sweep_gamma(
    schedule: Schedule,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    gamma_grid: np.ndarray | None = None,
    t: int | None = None,
) -> SweepResult:
    """Bound at horizon t as a function of gamma on a log grid.

    The grid defaults to default_gamma_grid around the analytically
    optimal gamma, so the sweep minimum lands within one grid step of it.
    """
    dist, noise = bounds.bound_terms(schedule, grad_norms, D, t)
    if gamma_grid is None:
        gamma_grid = default_gamma_grid(math.sqrt(dist / noise))
    grid = np.asarray(gamma_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1 or not np.all(grid > 0.0):
        raise ValueError("gamma grid must be a non-empty 1-d array of positive values")
    return _sweep(grid, dist / grid + grid * noise)


def _cooldown_family(T: int, shape: CooldownShape, base: str):
    """Schedule builder c -> flat-or-1/sqrt base with a cooldown tail."""
    if base == "constant":
        return lambda c: wsd(T, c, shape)
    if base == "inv-sqrt":
        root = inv_sqrt(T)
        return lambda c: with_cooldown(root, c, shape)
    raise ValueError(f"unknown base schedule family {base!r} (use constant or inv-sqrt)")


def sweep_cooldown(
    T: int,
    c_grid: np.ndarray | None = None,
    shape: CooldownShape = CooldownShape.LINEAR,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    gamma: float | None = None,
    base: str = "constant",
    threads: int = 1,
) -> SweepResult:
    """Bound at horizon T as a function of the cooldown fraction.

    gamma = None evaluates each fraction at its own optimal gamma (the
    tuned bound); a fixed gamma evaluates every fraction at that value,
    which is how a single already-tuned run responds to cooldown changes.
    """
    if c_grid is None:
        c_grid = DEFAULT_COOLDOWN_GRID
    grid = np.asarray(c_grid, dtype=np.float64)
    build = _cooldown_family(T, shape, base)

    def at(c: float):
        dist, noise = bounds.bound_terms(build(float(c)), grad_norms, D)
        g = math.sqrt(dist / noise) if gamma is None else float(gamma)
        return dist / g + g * noise, g

    pairs = _pmap(at, grid, threads)
    objective = np.array([p[0] for p in pairs])
    gammas = np.array([p[1] for p in pairs])
    return _sweep(grid, objective, aux={"gamma": gammas})


def _refine(g, lo, hi, g_lo, rel_tol: float):
    """Bisect a sign change of g on [lo, hi]; g_lo is the sign at lo."""
    while hi - lo > rel_tol * 0.5 * (lo + hi):
        mid = 0.5 * (lo + hi)
        if (g(mid) > 0.0) == (g_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _match_gamma(g, grid: np.ndarray, rel_tol: float) -> tuple[float, bool, np.ndarray]:
    """Root of the mismatch g bracketed on the grid, bisection-refined.

    Requires a unique sign change between adjacent grid points; with
    none the target is unreachable (returns the closest grid point,
    flagged infeasible), with several the crossing is ambiguous and the
    grid argmin of |g| is returned unrefined.
    """
    vals = np.array([g(x) for x in grid])
    sign_change = np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0]
    if sign_change.size == 0:
        root_hits = np.nonzero(vals == 0.0)[0]
        if root_hits.size:
            return float(grid[root_hits[0]]), True, vals
        return float(grid[int(np.argmin(np.abs(vals)))]), False, vals
    if sign_change.size > 1:
        return float(grid[int(np.argmin(np.abs(vals)))]), True, vals
    i = int(sign_change[0])
    root = _refine(g, float(grid[i]), float(grid[i + 1]), float(vals[i]), rel_tol)
    return float(root), True, vals


def transfer_horizon_rho(
    T_short: int,
    T_long: int,
    c: float = 0.2,
    shape: CooldownShape = CooldownShape.LINEAR,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    rho_grid: np.ndarray | None = None,
    rel_tol: float = 1e-4,
) -> TransferResult:
    """Continuation factor rho that keeps the tuned gamma unchanged.

    Extending a flat run from T_short to T_long at reduced rate rho
    (see schedules.extended) lowers the bound-optimal gamma; this finds
    the rho whose extended schedule has the same optimal gamma as the
    original wsd(T_short, c) plan, so the already-tuned base learning
    rate stays optimal for the longer run.
    """
    if T_long < T_short:
        raise ValueError(f"extended horizon {T_long} must be >= base horizon {T_short}")
    target = bounds.optimal_gamma(wsd(T_short, c, shape), grad_norms, D)
    if T_long == T_short:
        grid = np.array([1.0])
        zero = np.array([0.0])
        return TransferResult(1.0, True, target, target, _sweep(grid, zero, aux={"mismatch": zero}))
    from .schedules import extended

    def gamma_at(rho: float) -> float:
        return bounds.optimal_gamma(extended(T_short, c, T_long, float(rho), c, shape), grad_norms, D)

    def mismatch(rho: float) -> float:
        return gamma_at(rho) - target

    if rho_grid is None:
        rho_grid = np.linspace(0.02, 1.0, 50)
    grid = np.asarray(rho_grid, dtype=np.float64)
    value, feasible, vals = _match_gamma(mismatch, grid, rel_tol)
    diag = _sweep(grid, np.abs(vals), aux={"mismatch": vals})
    return TransferResult(value, feasible, target, gamma_at(value), diag)


def transfer_horizon_cooldown(
    T_short: int,
    T_long: int,
    c_short: float = 0.2,
    shape: CooldownShape = CooldownShape.LINEAR,
    base: str = "constant",
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    c_grid: np.ndarray | None = None,
    rel_tol: float = 1e-4,
) -> TransferResult:
    """Cooldown fraction for a longer run that keeps the tuned gamma unchanged.

    Finds c_long with optimal_gamma(family(T_long, c_long)) equal to
    optimal_gamma(family(T_short, c_short)), where the family is a flat
    (base="constant") or 1/sqrt(t) (base="inv-sqrt") schedule with a
    cooldown tail.  feasible is False when even c_long = 1 cannot reach
    the target.
    """
    if T_long < T_short:
        raise ValueError(f"extended horizon {T_long} must be >= base horizon {T_short}")
    build_short = _cooldown_family(T_short, shape, base)
    build_long = _cooldown_family(T_long, shape, base)
    target = bounds.optimal_gamma(build_short(c_short), grad_norms, D)
    if T_long == T_short:
        grid = np.array([float(c_short)])
        zero = np.array([0.0])
        return TransferResult(float(c_short), True, target, target, _sweep(grid, zero, aux={"mismatch": zero}))

    def gamma_at(c: float) -> float:
        return bounds.optimal_gamma(build_long(float(c)), grad_norms, D)

    def mismatch(c: float) -> float:
        return gamma_at(c) - target

    if c_grid is None:
        c_grid = DEFAULT_COOLDOWN_GRID
    grid = np.asarray(c_grid, dtype=np.float64)
    value, feasible, vals = _match_gamma(mismatch, grid, rel_tol)
    diag = _sweep(grid, np.abs(vals), aux={"mismatch": vals})
    return TransferResult(value, feasible, target, gamma_at(value), diag)


def lr_transfer_curve(
    T: int,
    c_grid: np.ndarray | None = None,
    shape: CooldownShape = CooldownShape.LINEAR,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
) -> list[tuple[float, float]]:
    """How much larger the tuned gamma gets as the cooldown shortens.

    Returns (c, ln(gamma*(c=1) / gamma*(c))) pairs for the given shape
    family at horizon T.  The reference c = 1 is the full-decay member
    of the same shape family.  The ratio is scale-free: it does not
    depend on D or the gradient-norm scale.
    """
    if c_grid is None:
        c_grid = DEFAULT_COOLDOWN_GRID
    build = _cooldown_family(T, shape, "constant")
    reference = bounds.optimal_gamma(build(1.0), grad_norms, D)
    out = []
    for c in np.asarray(c_grid, dtype=np.float64):
        out.append((float(c), math.log(reference / bounds.optimal_gamma(build(float(c)), grad_norms, D))))
    return out


# --- parametric fits ------------------------------------------------------


def _lstsq_columns(columns: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least squares via scaled normal equations.

    Columns are L2-normalized before forming the Gram matrix, which
    keeps the degree-6 polynomial fits well conditioned on [0, 1] grids.
    """
    X = np.asarray(columns, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] < X.shape[1]:
        raise ValueError(f"need at least {X.shape[1]} points, got {X.shape[0]}")
    scale = np.sqrt(np.sum(X * X, axis=0))
    if np.any(scale == 0.0):
        raise ValueError("fit is degenerate: a model column is identically zero")
    Xs = X / scale
    gram = Xs.T @ Xs
    try:
        w = np.linalg.solve(gram, Xs.T @ y)
    except np.linalg.LinAlgError:
        raise ValueError("fit is degenerate: model columns are collinear") from None
    coef = w / scale
    return coef, float(np.linalg.norm(X @ coef - y))


def _split_points(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise ValueError("points must be a non-empty sequence of (x, y) pairs")
    return arr[:, 0], arr[:, 1]


def fit_inv_gamma_linear(points) -> FitResult:
    """Fit y = A/x + B*x + C; coefficients ordered [A, B, C].

    The shape the bound takes as a function of gamma, so the fitted
    minimizer sqrt(A/B) estimates the optimal gamma from sweep data.
    """
    x, y = _split_points(points)
    if np.any(x <= 0.0):
        raise ValueError("gamma values must be positive")
    coef, resid = _lstsq_columns(np.column_stack([1.0 / x, x, np.ones_like(x)]), y)
    return FitResult(coef, resid, "inv-gamma-linear")


def minimizer(fit: FitResult) -> float | None:
    """Minimizer of a fitted inv-gamma-linear model, or None if non-physical.

    sqrt(A/B) requires A > 0 and B > 0; fits violating that have no
    interior minimum and get flagged by returning None.
    """
    if fit.model_kind != "inv-gamma-linear":
        raise ValueError(f"minimizer needs an inv-gamma-linear fit, got {fit.model_kind!r}")
    a, b = float(fit.coefficients[0]), float(fit.coefficients[1])
    if a <= 0.0 or b <= 0.0:
        return None
    return math.sqrt(a / b)


def fit_inv_sqrt(points) -> FitResult:
    """Fit y = a / sqrt(x); coefficients = [a].

    Also reports the unconstrained log-log power-law fit y = b * x**p as
    (free_prefactor, free_exponent) so the 1/sqrt assumption can be
    checked; the diagnostic needs strictly positive data and is omitted
    (None) otherwise.
    """
    x, y = _split_points(points)
    if np.any(x <= 0.0):
        raise ValueError("x values must be positive")
    coef, resid = _lstsq_columns((1.0 / np.sqrt(x))[:, None], y)
    prefactor = exponent = None
    if np.all(y > 0.0) and x.size >= 2:
        logs, logy = np.log(x), np.log(y)
        w, _ = _lstsq_columns(np.column_stack([np.ones_like(logs), logs]), logy)
        prefactor, exponent = float(math.exp(w[0])), float(w[1])
    return FitResult(coef, resid, "inv-sqrt", prefactor, exponent)


def fit_polynomial(points, degree: int = 6) -> FitResult:
    """Fit a polynomial of the given degree; coefficients ascending in power."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    x, y = _split_points(points)
    coef, resid = _lstsq_columns(np.vander(x, degree + 1, increasing=True), y)
    return FitResult(coef, resid, f"polynomial-degree-{degree}")
