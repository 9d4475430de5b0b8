"""Path realizations of xi, the exponential functional and its inverse.

Two path types are provided.  :class:`SkeletonPath` stores the exact
jump/drift skeleton of a finite-activity model, so every integral below is
evaluated in closed form.  :class:`GridPath` stores xi on a uniform grid and
treats it as the step function ``xi(s) = values[k]`` on ``[k h, (k+1) h)``;
the exponential functional is then the left-endpoint Riemann sum, which is
again integrated exactly segment by segment.

Internally both reduce to a list of *segments*: knot times ``t_k``, levels
``x_k = xi(t_k)`` and a common drift ``b`` with ``xi(s) = x_k + b (s - t_k)``
on ``[t_k, t_{k+1})``.  All cumulative integrals are stored as logarithms so
that paths reaching xi ~ 1e3 or beyond never overflow.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import ExponentOverflow, NoConvergence, OutOfRange, TableTooLarge, WrongFamily
from .models import Family, LevyModel, sample_increments
from .rng import RandomStream

EXPONENT_CAP = 700.0
MAX_TABLE = 1 << 22
HAT_I_MAX_POINTS = 1 << 20

_DEFAULT_STEP = {
    Family.BROWNIAN_DRIFT: 0.002,
    Family.STABLE_SUBORDINATOR: 0.01,
    Family.STABLE_SUBORDINATOR_DRIFT: 0.01,
}


def default_step(model: LevyModel) -> float:
    """Grid step used for infinite-activity models."""
    return _DEFAULT_STEP.get(model.family, 0.01)


def _log_g(b, u):
    """log of int_0^u exp(b s) ds, elementwise; -inf at u == 0."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        if b == 0.0:
            return np.log(u)
        return np.log(np.expm1(b * u) / b)


# -- path types ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SkeletonPath:
    """Exact finite-activity path: ``xi_t = drift t + sum of jumps up to t``."""

    drift: float
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    horizon: float
    model: LevyModel | None = None

    def __post_init__(self):
        jt = np.asarray(self.jump_times, dtype=float)
        js = np.asarray(self.jump_sizes, dtype=float)
        if jt.shape != js.shape:
            raise ValueError("jump_times and jump_sizes differ in length")
        if jt.size and (np.any(np.diff(jt) <= 0) or jt[0] <= 0 or jt[-1] > self.horizon):
            raise ValueError("jump_times must be strictly increasing in (0, horizon]")
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "jump_sizes", js)

    def segments(self):
        t = np.concatenate(([0.0], self.jump_times))
        x = self.drift * t + np.concatenate(([0.0], np.cumsum(self.jump_sizes)))
        return t, x, self.drift

    def value(self, t):
        """xi at `t` (jumps at time t are included)."""
        t = np.asarray(t, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.jump_sizes)))
        k = np.searchsorted(self.jump_times, t, side="right")
        return self.drift * t + cum[k]


@dataclass(frozen=True, eq=False)
class GridPath:
    """xi sampled at ``k * step``; ``values[0] == 0``."""

    step: float
    values: np.ndarray
    model: LevyModel | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0 or v[0] != 0.0:
            raise ValueError("values must be a nonempty 1-d array starting at 0")
        object.__setattr__(self, "values", v)

    @property
    def horizon(self) -> float:
        return self.step * (self.values.size - 1)

    def segments(self):
        t = self.step * np.arange(self.values.size)
        return t, self.values, 0.0

    def value(self, t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.floor(t / self.step + 1e-9).astype(np.int64), 0, self.values.size - 1)
        return self.values[k]


def simulate_skeleton(model: LevyModel, horizon: float, rng: RandomStream) -> SkeletonPath:
    """Exact skeleton on ``[0, horizon]``: Poisson count, uniform order statistics, iid sizes."""
    if not model.finite_activity:
        raise WrongFamily(f"{model.label()} has infinite activity; use simulate_grid")
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    times, sizes = _skeleton_jumps(model, 0.0, horizon, rng)
    return SkeletonPath(model.drift, times, sizes, float(horizon), model)


def _skeleton_jumps(model, t0, t1, rng):
    if model.family == Family.DETERMINISTIC_DRIFT or model.rate == 0.0 or t1 <= t0:
        return np.empty(0), np.empty(0)
    n = rng.poisson(model.rate * (t1 - t0))
    times = np.sort(t0 + (t1 - t0) * (1.0 - rng.random(n)))
    sizes = model.jump.sample(rng, n)
    return times, sizes


def simulate_grid(
    model: LevyModel, horizon: float, step: float, rng: RandomStream, max_points: int = MAX_TABLE
) -> GridPath:
    """Grid path built from exact increments over `step`."""
    if not step > 0:
        raise ValueError("step must be positive")
    n = int(round(horizon / step))
    if abs(n * step - horizon) > 1e-9 * max(1.0, horizon):
        n = int(math.ceil(horizon / step))
    if n + 1 > max_points:
        raise TableTooLarge(f"{n + 1} grid points exceed the cap of {max_points}")
    inc = sample_increments(model, step, rng, n) if n else np.empty(0)
    return GridPath(step, np.concatenate(([0.0], np.cumsum(inc))), model)


def extend_path(path, rng: RandomStream, horizon: float):
    """Return a copy of `path` continued up to `horizon` with fresh randomness."""
    model = path.model
    if model is None:
        raise OutOfRange("path has no model attached and cannot be extended")
    if horizon <= path.horizon:
        return path
    if isinstance(path, SkeletonPath):
        times, sizes = _skeleton_jumps(model, path.horizon, horizon, rng)
        return SkeletonPath(
            path.drift,
            np.concatenate((path.jump_times, times)),
            np.concatenate((path.jump_sizes, sizes)),
            float(horizon),
            model,
        )
    n_new = int(math.ceil((horizon - path.horizon) / path.step - 1e-9))
    if path.values.size + n_new > MAX_TABLE:
        raise TableTooLarge(f"{path.values.size + n_new} grid points exceed the cap of {MAX_TABLE}")
    inc = sample_increments(model, path.step, rng, n_new)
    return GridPath(path.step, np.concatenate((path.values, path.values[-1] + np.cumsum(inc))), model)


def simulate_path(model: LevyModel, horizon: float, rng: RandomStream, step: float | None = None):
    """Skeleton for finite-activity models, grid otherwise."""
    if model.finite_activity:
        return simulate_skeleton(model, horizon, rng)
    return simulate_grid(model, horizon, step or default_step(model), rng)


# -- exponential functional --------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExpFunctional:
    """Cumulative table of ``I(t) = int_0^t exp(xi_s) ds`` at the path knots.

    ``log_I[k] = log I(t_k)`` for every knot and ``log_I[-1] = log I(horizon)``.
    """

    path: object
    t: np.ndarray
    x: np.ndarray
    drift: float
    log_I: np.ndarray
    exact: bool

    @property
    def horizon(self) -> float:
        return self.path.horizon

    @property
    def log_total(self) -> float:
        return float(self.log_I[-1])

    def _segment(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.horizon * (1 + 1e-12)):
            raise OutOfRange(f"t outside [0, {self.horizon}]")
        k = np.searchsorted(self.t, t, side="right") - 1
        return t, k

    def xi(self, t):
        t, k = self._segment(t)
        return self.x[k] + self.drift * (t - self.t[k])

    def log_value(self, t):
        """log I(t)."""
        t, k = self._segment(t)
        part = self.x[k] + _log_g(self.drift, t - self.t[k])
        return np.logaddexp(self.log_I[k], part)

    def value(self, t):
        """I(t) in linear scale."""
        lv = self.log_value(t)
        if np.any(lv > EXPONENT_CAP):
            raise ExponentOverflow(f"I(t) exceeds exp({EXPONENT_CAP:g}); use log_value")
        return np.exp(lv)

    def log_tau(self, log_s):
        """tau evaluated at ``exp(log_s)``."""
        log_s = np.asarray(log_s, dtype=float)
        if np.any(log_s > self.log_total + 1e-12 * max(1.0, abs(self.log_total))):
            raise OutOfRange("argument exceeds I(horizon); extend the path")
        n = self.t.size
        k = np.clip(np.searchsorted(self.log_I, log_s, side="right") - 1, 0, n - 1)
        lik = self.log_I[k]
        with np.errstate(divide="ignore", invalid="ignore"):
            log_r = np.where(np.isneginf(lik), log_s, log_s + np.log(-np.expm1(lik - log_s)))
            y = log_r - self.x[k]
            if self.drift == 0.0:
                u = np.exp(y)
            else:
                u = np.log1p(self.drift * np.exp(y)) / self.drift
        u = np.nan_to_num(u, nan=0.0)
        t_next = np.append(self.t[1:], self.horizon)[k]
        out = np.minimum(self.t[k] + np.maximum(u, 0.0), t_next)
        return np.where(np.isneginf(log_s), 0.0, out)


def exp_functional(path) -> ExpFunctional:
    """Build the cumulative table of the exponential functional of `path`."""
    t, x, b = path.segments()
    ends = np.append(t[1:], path.horizon)
    contrib = x + _log_g(b, ends - t)
    log_I = np.concatenate(([-np.inf], np.logaddexp.accumulate(contrib)))
    return ExpFunctional(path, t, x, b, log_I, exact=isinstance(path, SkeletonPath))


def tau(expf: ExpFunctional, s):
    """Inverse of the exponential functional: I(tau(s)) = s."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("s must be nonnegative")
    with np.errstate(divide="ignore"):
        out = expf.log_tau(np.log(s))
    return float(out) if out.ndim == 0 else out


# -- segment streams and the dual exponential functional -------------------


def draw_segments(model: LevyModel, rng: RandomStream, n: int, step: float | None = None):
    """Next `n` segments ``(dt, jumps, drift)`` of a fresh path of `model`.

    Finite-activity models yield exponential inter-jump times with the drift
    kept inside each segment; other models yield grid steps whose increment
    is carried as the jump at the end of the step.
    """
    if model.finite_activity:
        if model.family == Family.DETERMINISTIC_DRIFT or model.rate == 0.0:
            return np.full(1, np.inf), np.zeros(1), model.drift
        dt = rng.standard_exponential(n) / model.rate
        return dt, model.jump.sample(rng, n), model.drift
    h = step or default_step(model)
    return np.full(n, h), sample_increments(model, h, rng, n), 0.0


def _first_block(model: LevyModel, step: float | None, horizon: float | None = None) -> int:
    if horizon is None:
        horizon = 16.0 / model.drift_proxy
    if model.finite_activity:
        return max(16, int(math.ceil(model.rate * horizon)))
    return max(16, int(math.ceil(horizon / (step or default_step(model)))))


def sample_hat_I(
    model: LevyModel,
    rel_tol: float,
    rng: RandomStream,
    step: float | None = None,
    max_points: int = HAT_I_MAX_POINTS,
) -> float:
    """One draw of ``int_0^inf exp(-xi_s) ds``.

    The integral is accumulated segment by segment and stopped once
    ``xi_S >= log(1/rel_tol) + log(1 + partial integral)``; since the
    remainder equals ``exp(-xi_S)`` times an independent copy of the
    integral, this bounds the relative truncation error by ``rel_tol`` in
    expectation.  Blocks double in length, capped at `max_points` segments.

    On grids the sum is ``sum_{j>=1} h exp(-xi_{jh})``, the exact stationary
    law of the grid recursion ``V <- exp(-dxi) (V + h)`` used downstream.
    """
    return math.exp(sample_log_hat_I(model, rel_tol, rng, step, max_points))


def sample_log_hat_I(
    model: LevyModel,
    rel_tol: float,
    rng: RandomStream,
    step: float | None = None,
    max_points: int = HAT_I_MAX_POINTS,
) -> float:
    """Logarithm of one draw of the dual functional (see :func:`sample_hat_I`).

    The sum is accumulated in log space, so draws far below the smallest
    positive double (a huge first jump) remain representable.
    """
    if not (0.0 < rel_tol <= 0.1):
        raise ValueError("rel_tol must lie in (0, 0.1]")
    log_inv_tol = math.log(1.0 / rel_tol)
    x = 0.0
    ls = -math.inf
    used = 0
    # first block sized to the typical stopping time, then growth by 25%
    n = _first_block(model, step, (log_inv_tol + 2.0) / model.drift_proxy)
    jump_first = not model.finite_activity
    while used < max_points:
        n = min(n, max_points - used)
        dt, jumps, b = draw_segments(model, rng, n, step)
        ls, x, k, done = kernels.hat_i_accumulate(dt, jumps, b, jump_first, x, ls, log_inv_tol, 0.0)
        used += k
        if done:
            return float(ls)
        n = max(16, used // 4)
    raise NoConvergence(f"integral not converged after {max_points} segments ({model.label()})")


# -- two-sided stationary construction --------------------------------------


@dataclass(frozen=True, eq=False)
class StationaryScene:
    """A draw of the dual functional plus an independent forward path.

    ``tilde_I(t) = hat_I + I(t)`` for ``t >= 0``; the stationary GOU process
    is ``V(t) = exp(-xi_t) tilde_I(t)``, the additive functional is
    ``A(t) = log tilde_I(t) - log hat_I`` and ``T`` is its inverse.
    """

    log_hat_I: float
    forward: ExpFunctional

    def __post_init__(self):
        if not math.isfinite(self.log_hat_I):
            raise ValueError("hat_I must be positive and finite")

    @classmethod
    def from_value(cls, hat_I: float, forward: ExpFunctional) -> "StationaryScene":
        if not hat_I > 0:
            raise ValueError("hat_I must be positive")
        return cls(math.log(hat_I), forward)

    @property
    def hat_I(self) -> float:
        return math.exp(self.log_hat_I)

    @property
    def horizon(self) -> float:
        return self.forward.horizon

    @property
    def A_max(self) -> float:
        return float(np.logaddexp(self.log_hat_I, self.forward.log_total) - self.log_hat_I)

    def log_tilde_I(self, t):
        return np.logaddexp(self.log_hat_I, self.forward.log_value(t))

    def tilde_I(self, t):
        return np.exp(self.log_tilde_I(t))

    def V(self, t):
        return np.exp(self.log_tilde_I(t) - self.forward.xi(t))

    def A(self, t):
        return self.log_tilde_I(t) - self.log_hat_I

    def T(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("T is represented for t >= 0 only")
        if np.any(t > self.A_max):
            raise OutOfRange(f"T({float(np.max(t)):g}) needs a longer forward path (A_max={self.A_max:g})")
        with np.errstate(divide="ignore"):
            # log(hat_I * (e^t - 1)), stable for large t
            log_s = self.log_hat_I + t + np.log(-np.expm1(-t))
        return self.forward.log_tau(log_s)


def make_scene(model: LevyModel, hat_I_draw: float, forward_path) -> StationaryScene:
    """Stationary scene from an Î draw and an independent forward path of `model`."""
    if getattr(forward_path, "model", None) not in (None, model):
        raise ValueError("forward path was simulated from a different model")
    return StationaryScene.from_value(float(hat_I_draw), exp_functional(forward_path))


def A_functional(scene: StationaryScene, t):
    """``A(t) = log tilde_I(t) - log tilde_I(0)``."""
    out = scene.A(t)
    return float(out) if np.ndim(out) == 0 else out


def T_change(scene: StationaryScene, t):
    """Inverse of the additive functional (``t >= 0``)."""
    out = scene.T(t)
    return float(out) if np.ndim(out) == 0 else out


def build_scene(
    model: LevyModel,
    rng: RandomStream,
    *,
    A_max: float = 0.0,
    horizon: float = 1.0,
    step: float | None = None,
    rel_tol: float = 1e-8,
    max_extensions: int = 40,
) -> StationaryScene:
    """Draw Î, then a forward path long enough that T is defined on ``[0, A_max]``."""
    log_hat = sample_log_hat_I(model, rel_tol, rng, step)
    path = simulate_path(model, horizon, rng, step)
    scene = StationaryScene(log_hat, exp_functional(path))
    for _ in range(max_extensions):
        if scene.A_max >= A_max:
            return scene
        path = extend_path(path, rng, 2.0 * path.horizon if path.horizon > 0 else 1.0)
        scene = StationaryScene(log_hat, exp_functional(path))
    if scene.A_max >= A_max:
        return scene
    raise OutOfRange(f"A_max={A_max:g} not reached after {max_extensions} path extensions")


def export_path_csv(expf: ExpFunctional, file, times=None, v0: float = 0.0) -> None:
    """Write columns ``t, xi, I, V`` (V started from `v0`) to `file`."""
    ts = expf.t if times is None else np.asarray(times, dtype=float)
    xi = expf.xi(ts)
    log_I = expf.log_value(ts)
    with np.errstate(divide="ignore"):
        log_V = np.logaddexp(log_I, math.log(v0) if v0 > 0 else -np.inf) - xi
    close = False
    if isinstance(file, (str, bytes)) or hasattr(file, "__fspath__"):
        file = open(file, "w", newline="", encoding="utf-8")
        close = True
    try:
        w = csv.writer(file)
        w.writerow(["t", "xi", "I", "V"])
        for row in zip(ts, xi, np.exp(log_I), np.exp(log_V)):
            w.writerow([repr(float(v)) for v in row])
    finally:
        if close:
            file.close()
