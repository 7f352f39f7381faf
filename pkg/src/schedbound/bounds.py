"""Suboptimality bounds for the last iterate of (sub)gradient descent.

For a convex objective with initial distance D to a minimizer, per-step
gradient-norm bounds G_t, base learning rate gamma and schedule eta,
the expected suboptimality of the final iterate after t steps is at most

    dist_term / gamma + gamma * noise_term

with

    dist_term  = D^2 / (2 * sum_s eta_s)
    noise_term = (sum_s eta_s^2 G_s^2) / (2 * sum_s eta_s)
               + 1/2 * sum_{k=1}^{t-1} [ eta_k / sum_{s=k+1}^t eta_s ]
                     * [ (sum_{s=k}^t eta_s^2 G_s^2) / (sum_{s=k}^t eta_s) ]

(all sums over s run from the indicated start to t).  Everything in this
module evaluates, optimizes, or specializes that expression.  The bound
is exactly minimized over gamma at gamma = sqrt(dist_term / noise_term),
where it equals 2 * sqrt(dist_term * noise_term).

Evaluation uses prefix sums, so one horizon costs O(t) and a curve over
all horizons with stride s costs O(T^2 / s).  Accumulation switches to
extended-precision (long double) arithmetic for horizons >= 100000 to
keep the many small cooldown terms from losing digits.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .schedules import Schedule

LONG_HORIZON = 100_000  # switch point for extended-precision accumulators


def harmonic(n: int) -> float:
    """n-th harmonic number H_n = sum_{k=1}^n 1/k, with H_0 = 0.

    Exactly rounded via math.fsum.
    """
    if n < 0:
        raise ValueError(f"harmonic number needs n >= 0, got {n}")
    return math.fsum(1.0 / k for k in range(1, int(n) + 1))


def harmonic_numbers(n: int) -> np.ndarray:
    """Array [H_0, H_1, ..., H_n] via cumulative summation."""
    if n < 0:
        raise ValueError(f"harmonic numbers need n >= 0, got {n}")
    out = np.zeros(n + 1)
    if n:
        out[1:] = np.cumsum(1.0 / np.arange(1, n + 1, dtype=np.float64))
    return out


@dataclass(frozen=True)
class GradNormModel:
    """Per-step bound on E ||g_t||^2 via G_t = G * t ** alpha.

    alpha = 0 models a constant bound G; alpha < 0 models gradient norms
    that shrink as optimization proceeds.  Growing norms (alpha > 0) are
    rejected.
    """

    G: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if not self.G > 0.0:
            raise ValueError(f"gradient norm scale must be positive, got {self.G}")
        if self.alpha > 0.0:
            raise ValueError(f"gradient norm exponent must be <= 0, got {self.alpha}")

    def values(self, T: int) -> np.ndarray:
        """G_t for t = 1..T."""
        if self.alpha == 0.0:
            return np.full(T, float(self.G))
        return self.G * np.arange(1, T + 1, dtype=np.float64) ** self.alpha


@dataclass(frozen=True)
class BoundSpec:
    """Everything needed to evaluate the bound for one configured run."""

    schedule: Schedule
    grad_norms: GradNormModel = GradNormModel()
    D: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.D > 0.0:
            raise ValueError(f"initial distance D must be positive, got {self.D}")
        if not self.gamma > 0.0:
            raise ValueError(f"base learning rate gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class MirrorSpec:
    """Mirror-descent variant: Bregman initialization and dual-norm noise.

    bregman_init is E B(x*, x_1) for the mirror map's Bregman divergence,
    mu its strong-convexity modulus w.r.t. the chosen norm, and
    dual_grad_norms bounds E ||g_t||_*^2 in the dual norm.
    """

    bregman_init: float
    mu: float = 1.0
    dual_grad_norms: GradNormModel = field(default_factory=GradNormModel)

    def __post_init__(self):
        if not self.bregman_init > 0.0:
            raise ValueError(f"initial Bregman divergence must be positive, got {self.bregman_init}")
        if not self.mu > 0.0:
            raise ValueError(f"strong-convexity modulus must be positive, got {self.mu}")


@dataclass(frozen=True)
class BoundCurve:
    """Bound evaluated along a grid of horizons for a fixed gamma."""

    t: np.ndarray
    values: np.ndarray
    dist_terms: np.ndarray
    noise_terms: np.ndarray
    gamma: float

    @property
    def dist_final(self) -> float:
        return float(self.dist_terms[-1])

    @property
    def noise_final(self) -> float:
        return float(self.noise_terms[-1])

    @property
    def value_final(self) -> float:
        return float(self.values[-1])

    @property
    def optimal_gamma(self) -> float:
        """The gamma that would minimize the bound at the final horizon."""
        return math.sqrt(self.dist_final / self.noise_final)


def _accum_dtype(T: int):
    return np.longdouble if T >= LONG_HORIZON else np.float64


def _prefix_sums(eta: np.ndarray, gvals: np.ndarray):
    """(S, Q) with a leading zero: S[k] = sum_{s<=k} eta_s, Q[k] = sum_{s<=k} eta_s^2 G_s^2."""
    dtype = _accum_dtype(eta.size)
    e = eta.astype(dtype)
    g = gvals.astype(dtype)
    q = e * e * g * g
    S = np.zeros(e.size + 1, dtype=dtype)
    Q = np.zeros(e.size + 1, dtype=dtype)
    np.cumsum(e, out=S[1:])
    np.cumsum(q, out=Q[1:])
    return e, S, Q


def _noise_at(e: np.ndarray, S: np.ndarray, Q: np.ndarray, t: int, cross_terms: bool) -> float:
    total = Q[t] / (2.0 * S[t])
    if cross_terms and t >= 2:
        tail_after = S[t] - S[1:t]  # sum_{s=k+1}^t eta_s for k = 1..t-1
        tail_incl = S[t] - S[: t - 1]  # sum_{s=k}^t eta_s
        q_tail = Q[t] - Q[: t - 1]  # sum_{s=k}^t eta_s^2 G_s^2
        total += 0.5 * np.sum(e[: t - 1] * q_tail / (tail_after * tail_incl))
    return float(total)


def _resolve_t(schedule: Schedule, t: int | None) -> int:
    T = schedule.horizon
    if t is None:
        return T
    if not 1 <= t <= T:
        raise ValueError(f"horizon {t} outside 1..{T}")
    return int(t)


def _terms(schedule, grad_norms, D, t, cross_terms):
    t = _resolve_t(schedule, t)
    eta = schedule.values[:t]
    gvals = grad_norms.values(t)
    e, S, Q = _prefix_sums(eta, gvals)
    dist = float(D) ** 2 / (2.0 * float(S[t]))
    noise = _noise_at(e, S, Q, t, cross_terms)
    return dist, noise


def bound_terms(
    schedule: Schedule,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    t: int | None = None,
) -> tuple[float, float]:
    """(dist_term, noise_term) of the last-iterate bound at horizon t.

    The bound for base learning rate gamma is
    dist_term / gamma + gamma * noise_term.
    """
    return _terms(schedule, grad_norms, D, t, cross_terms=True)


def bound_value(spec: BoundSpec, t: int | None = None) -> float:
    """Last-iterate bound at horizon t for the gamma in spec."""
    dist, noise = bound_terms(spec.schedule, spec.grad_norms, spec.D, t)
    return dist / spec.gamma + spec.gamma * noise


def optimal_gamma(
    schedule: Schedule,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    t: int | None = None,
) -> float:
    """gamma minimizing the last-iterate bound at horizon t."""
    dist, noise = bound_terms(schedule, grad_norms, D, t)
    return math.sqrt(dist / noise)


def tuned_bound(
    schedule: Schedule,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    t: int | None = None,
) -> float:
    """Last-iterate bound at the optimal gamma: 2 * sqrt(dist * noise)."""
    dist, noise = bound_terms(schedule, grad_norms, D, t)
    return 2.0 * math.sqrt(dist * noise)


def best_iterate_terms(
    schedule: Schedule,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    t: int | None = None,
) -> tuple[float, float]:
    """(dist_term, noise_term) of the classical best-iterate bound.

    Bounds min over the first t iterates instead of the last one; the
    noise term drops the cross-horizon coupling and keeps only
    (sum eta_s^2 G_s^2) / (2 sum eta_s).  Used as the ablation baseline
    that shows no benefit from a cooldown.
    """
    return _terms(schedule, grad_norms, D, t, cross_terms=False)


def best_iterate_bound(spec: BoundSpec, t: int | None = None) -> float:
    """Best-iterate bound at horizon t for the gamma in spec."""
    dist, noise = best_iterate_terms(spec.schedule, spec.grad_norms, spec.D, t)
    return dist / spec.gamma + spec.gamma * noise


def best_iterate_optimal_gamma(
    schedule: Schedule,
    grad_norms: GradNormModel = GradNormModel(),
    D: float = 1.0,
    t: int | None = None,
) -> float:
    """gamma minimizing the best-iterate bound: D / sqrt(sum eta_s^2 G_s^2)."""
    dist, noise = best_iterate_terms(schedule, grad_norms, D, t)
    return math.sqrt(dist / noise)


def default_stride(T: int) -> int:
    return max(1, T // 2000)


def _curve(spec: BoundSpec, stride: int | None, cross_terms: bool, threads: int) -> BoundCurve:
    T = spec.schedule.horizon
    if stride is None:
        stride = default_stride(T)
    stride = int(stride)
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    ts = list(range(1, T + 1, stride))
    if ts[-1] != T:
        ts.append(T)
    eta = spec.schedule.values
    gvals = spec.grad_norms.values(T)
    e, S, Q = _prefix_sums(eta, gvals)
    Dsq = float(spec.D) ** 2

    def eval_range(sub):
        out = np.empty((len(sub), 2))
        for i, t in enumerate(sub):
            out[i, 0] = Dsq / (2.0 * float(S[t]))
            out[i, 1] = _noise_at(e, S, Q, t, cross_terms)
        return out

    if threads > 1 and len(ts) > 1:
        chunks = np.array_split(np.asarray(ts), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(eval_range, [c.tolist() for c in chunks if c.size]))
        terms = np.vstack(parts)
    else:
        terms = eval_range(ts)

    dist = terms[:, 0]
    noise = terms[:, 1]
    return BoundCurve(
        t=np.asarray(ts, dtype=np.int64),
        values=dist / spec.gamma + spec.gamma * noise,
        dist_terms=dist,
        noise_terms=noise,
        gamma=spec.gamma,
    )


def bound_curve(spec: BoundSpec, stride: int | None = None, threads: int = 1) -> BoundCurve:
    """Last-iterate bound at horizons {1, 1+stride, ...} plus T.

    Default stride is max(1, T // 2000).  With threads > 1 the horizons
    are evaluated in parallel chunks; results are ordered and identical
    to the single-threaded ones.
    """
    return _curve(spec, stride, cross_terms=True, threads=threads)


def best_iterate_curve(spec: BoundSpec, stride: int | None = None, threads: int = 1) -> BoundCurve:
    """Best-iterate bound along the same horizon grid as bound_curve."""
    return _curve(spec, stride, cross_terms=False, threads=threads)


def mirror_bound(
    mirror: MirrorSpec,
    schedule: Schedule,
    t: int | None = None,
    gamma: float = 1.0,
) -> float:
    """Last-iterate bound for mirror descent with step sizes gamma * eta_t.

    Value is

        bregman_init / S_t + (1 / mu) * noise_term(gamma * eta)

    where S_t sums the actual steps gamma * eta_s and noise_term is the
    same expression as in the Euclidean bound, evaluated on the actual
    steps and the dual gradient-norm bounds.  gamma is homogeneous in
    that expression (degree -1 in the first term, +1 in the rest), so it
    is factored out analytically rather than multiplied into the
    accumulators; this keeps the Euclidean specialization
    (bregman_init = D^2/2, mu = 1) equal to bound_value to rounding
    error.
    """
    if not gamma > 0.0:
        raise ValueError(f"base learning rate gamma must be positive, got {gamma}")
    t = _resolve_t(schedule, t)
    eta = schedule.values[:t]
    gvals = mirror.dual_grad_norms.values(t)
    e, S, Q = _prefix_sums(eta, gvals)
    return mirror.bregman_init / (gamma * float(S[t])) + gamma * _noise_at(e, S, Q, t, cross_terms=True) / mirror.mu


# --- closed forms for specific schedules ---------------------------------


def constant_bound_exact(T: int, D: float = 1.0, G: float = 1.0) -> float:
    """Tuned bound for the constant schedule: D*G*sqrt((1 + H_{T-1}) / T).

    Agrees with 2*sqrt(dist*noise) to rounding error; the harmonic term
    means a flat schedule loses a log factor over decaying ones.
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    return D * G * math.sqrt((1.0 + harmonic(T - 1)) / T)


def wsd_bound_exact(T: int, T0: int, D: float = 1.0, G: float = 1.0) -> float:
    """Closed-form tuned bound for flat-then-linear-cooldown schedules.

    T0 is the first cooldown step; requires T - T0 >= 2 so the cooldown
    spans at least two steps.  For T0 >= 2 it upper-bounds the
    numerically tuned bound and tracks it within a few percent.  On the
    T0 = 1 boundary (no flat phase, i.e. pure linear decay) the formula
    undershoots the numeric value by a relative O(1/T); use
    linear_decay_bound_exact for that schedule.
    """
    T = int(T)
    T0 = int(T0)
    if T0 < 1:
        raise ValueError(f"cooldown start must be >= 1, got {T0}")
    if T - T0 < 2:
        raise ValueError(f"cooldown must span at least 2 steps, got T - T0 = {T - T0}")
    n = T - T0
    L1 = 2.0 / 3.0 + (T + 2.0 * T0) / (3.0 * (T + T0))
    L2 = harmonic(T + T0 - 2) - harmonic(T - T0 + 1)
    L3 = n * (T0 - 1.0) / (3.0 * (n + 2.0) * (T + T0))
    L4 = 1.0 / n**2 + harmonic(n - 1) / (n + 1.0)
    return D * G * math.sqrt(4.0 / (T + T0) * (L1 + L2 - L3 + L4))


def linear_decay_bound_exact(T: int, D: float = 1.0, G: float = 1.0) -> float:
    """Closed-form tuned bound for linear decay: (2 + (H_{T-1} - 2/3)/(T+1)) * D*G/sqrt(T).

    Approaches 2*D*G/sqrt(T) as T grows; an upper bound for finite T.
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    return (2.0 + (harmonic(T - 1) - 2.0 / 3.0) / (T + 1.0)) * D * G / math.sqrt(T)


def polynomial_bound_approx(T: int, alpha: float, D: float = 1.0, G: float = 1.0) -> float:
    """Leading-order tuned bound for eta_t = (T+1-t)^alpha: D*G*(alpha+1)/sqrt(alpha*T).

    Minimized over alpha at alpha = 1, where it reads 2*D*G/sqrt(T).
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    alpha = float(alpha)
    if alpha <= 0.0:
        raise ValueError(f"decay exponent must be positive, got {alpha}")
    return D * G * (alpha + 1.0) / math.sqrt(alpha * T)
