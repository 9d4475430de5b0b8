"""Lamperti process X, its OU-type transform U, the GOU process V and the
stationary version of U, evaluated pathwise on simulated functionals.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModel, DomainRestricted, OutOfRange
from .models import Family, LevyModel
from .paths import ExpFunctional, StationaryScene, exp_functional, extend_path
from .rng import RandomStream
from .scan import track_from_path


def _ensure_range(expf: ExpFunctional, log_s: float, rng: RandomStream | None, max_doublings: int = 40):
    """Return a functional whose range covers exp(log_s), extending the path if allowed."""
    for _ in range(max_doublings):
        if log_s <= expf.log_total:
            return expf
        if rng is None:
            raise OutOfRange("evaluation point beyond the simulated functional; pass rng to extend")
        path = expf.path
        expf = exp_functional(extend_path(path, rng, max(2.0 * path.horizon, 1.0)))
    if log_s <= expf.log_total:
        return expf
    raise OutOfRange("functional range not reached after repeated extension")


def eval_X(expf: ExpFunctional, t, x0: float, rng: RandomStream | None = None):
    """Lamperti process from `x0`: ``x0 exp(xi_{tau(t/x0)})``.

    With `rng` the backing path is extended on demand (horizon doubling);
    without it an out-of-range `t` raises :class:`OutOfRange`.
    """
    if not x0 > 0:
        raise ValueError("x0 must be positive")
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        log_s = np.log(t) - math.log(x0)
    expf = _ensure_range(expf, float(np.max(log_s)), rng)
    out = x0 * np.exp(expf.xi(expf.log_tau(log_s)))
    return float(out) if out.ndim == 0 else out


def eval_U(expf: ExpFunctional, t, u0: float, rng: RandomStream | None = None):
    """OU-type process ``U(t) = exp(-t) X(exp(t) - 1)`` started from `u0`."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    with np.errstate(divide="ignore"):
        log_s = np.log(np.expm1(t)) - math.log(u0)
    expf = _ensure_range(expf, float(np.max(log_s)), rng)
    out = u0 * np.exp(expf.xi(expf.log_tau(log_s)) - t)
    return float(out) if out.ndim == 0 else out


def eval_V(expf: ExpFunctional, t, v0: float):
    """Generalized OU process ``exp(-xi_t) (I(t) + v0)``."""
    if v0 < 0:
        raise ValueError("v0 must be nonnegative")
    with np.errstate(divide="ignore"):
        lv0 = math.log(v0) if v0 > 0 else -math.inf
    out = np.exp(np.logaddexp(expf.log_value(t), lv0) - expf.xi(t))
    return float(out) if np.ndim(out) == 0 else out


def eval_U_stationary(scene: StationaryScene, t):
    """``exp(xi_{T(t)}) / (hat_I e^t)``, which equals ``1 / V(T(t))``."""
    t = np.asarray(t, dtype=float)
    out = np.exp(scene.forward.xi(scene.T(t)) - scene.log_hat_I - t)
    return float(out) if out.ndim == 0 else out


def eval_X_selfsimilar(scene: StationaryScene, t):
    """``t * U_stationary(log t)`` for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 1.0):
        raise DomainRestricted("self-similar version is represented for t >= 1 only")
    out = t * eval_U_stationary(scene, np.log(t))
    return float(out) if out.ndim == 0 else out


def patie_identity_check(expf: ExpFunctional, t, x0: float):
    """Compare U from `x0` with ``1 / V(T_V(t))`` where ``V(0) = 1/x0``.

    The left side goes through the inverse exponential functional; the right
    side scans the GOU recursion along the same path and inverts its own
    additive functional.  Returns ``(lhs, rhs, abs_diff)``.
    """
    t = np.asarray(t, dtype=float)
    lhs = np.asarray(eval_U(expf, t, x0))
    track = track_from_path(expf.path, 1.0 / x0)
    rhs = np.exp(-track.log_V_at_A(t))
    diff = np.abs(lhs - rhs)
    if t.ndim == 0:
        return float(lhs), float(rhs), float(diff)
    return lhs, rhs, diff


class SupportCase(str, enum.Enum):
    SUBORDINATOR_WITH_DRIFT = "subordinator-with-drift"
    NO_POSITIVE_JUMPS = "finite-variation-no-positive-jumps"
    FULL = "full-half-line"


@dataclass(frozen=True)
class SupportInterval:
    lower: float
    upper: float
    case: SupportCase

    def interior_contains(self, v: float) -> bool:
        return self.lower < v < self.upper

    def contains(self, v, rel: float = 0.0) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        lo = self.lower * (1.0 - rel)
        hi = self.upper * (1.0 + rel)
        return (v >= lo) & (v <= hi)


def support_interval(model: LevyModel) -> SupportInterval:
    """Support of the stationary law of V (the law of the dual functional)."""
    if model.is_pure_drift:
        raise DegenerateModel("the support is a single point for a pure drift")
    b = model.drift
    f = model.family
    if f == Family.COMPOUND_POISSON_DRIFT:
        if model.jump.nonnegative and b > 0:
            return SupportInterval(0.0, 1.0 / b, SupportCase.SUBORDINATOR_WITH_DRIFT)
        if model.jump.nonpositive and b > 0:
            return SupportInterval(1.0 / b, math.inf, SupportCase.NO_POSITIVE_JUMPS)
    if f == Family.STABLE_SUBORDINATOR_DRIFT and b > 0:
        return SupportInterval(0.0, 1.0 / b, SupportCase.SUBORDINATOR_WITH_DRIFT)
    return SupportInterval(0.0, math.inf, SupportCase.FULL)


class ProcessKind(str, enum.Enum):
    X = "X"
    U = "U"
    V = "V"
    U_STATIONARY = "U-stationary"


@dataclass(frozen=True, eq=False)
class ProcessRealization:
    """A process of the given kind viewed through one simulated path."""

    kind: ProcessKind
    start: float
    backing: object

    def __call__(self, t):
        k = ProcessKind(self.kind)
        if k is ProcessKind.X:
            return eval_X(self.backing, t, self.start)
        if k is ProcessKind.U:
            return eval_U(self.backing, t, self.start)
        if k is ProcessKind.V:
            return eval_V(self.backing, t, self.start)
        return eval_U_stationary(self.backing, t)

    def write_csv(self, file, times) -> None:
        """Trajectory ``t, value`` as UTF-8 CSV."""
        times = np.asarray(times, dtype=float)
        values = np.atleast_1d(self(times))
        w = csv.writer(file)
        w.writerow(["t", "value"])
        for t, v in zip(times, values):
            w.writerow([repr(float(t)), repr(float(v))])
