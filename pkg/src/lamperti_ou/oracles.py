"""Reference values: moments of the dual exponential functional, the
invariant measure of U as a reweighting of its law, Mittag-Leffler moments
and the power-law normalizers of the Darling-Kac regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .models import LevyModel, MeanClass, laplace_exponent, sample_positive_stable
from .rng import RandomStream

INFINITE = math.inf


def moment_oracle(model: LevyModel, n: int) -> float:
    """``E[hat_I**n] = n! / prod_{k=1..n} phi(k)`` for subordinators."""
    if not (1 <= n <= 20):
        raise ValueError("n must lie in 1..20")
    out = 1.0
    for k in range(1, n + 1):
        out *= k / laplace_exponent(model, float(k))
    return out


def mean_inverse_hat_I(model: LevyModel) -> float:
    """``E[1/hat_I]``: the mean of xi_1, or ``inf`` when xi_1 is not integrable."""
    if model.mean_class is MeanClass.INFINITE_MEAN:
        return INFINITE
    return model.mean


@dataclass(frozen=True)
class NuFunctional:
    """``<nu, f> = E[(1/hat_I) f(1/hat_I)]`` estimated from draws of hat_I.

    `log_sampler` maps ``(n, rng)`` to n draws of ``log hat_I``.  Test
    functions exposing ``log_f`` (the log of f as a function of ``log x``)
    are weighted in log space, which stays finite for draws of hat_I below
    the double range.
    """

    log_sampler: Callable[[int, RandomStream], np.ndarray]

    @staticmethod
    def weights(log_hat_I: np.ndarray, f) -> np.ndarray:
        lx = -np.asarray(log_hat_I, dtype=float)
        log_f = getattr(f, "log_f", None)
        if log_f is not None:
            with np.errstate(divide="ignore"):
                return np.exp(lx + log_f(lx))
        x = np.exp(lx)
        return x * f(x)


def nu_integral(nu: NuFunctional, f, n_draws: int, rng: RandomStream) -> tuple[float, float]:
    """Monte Carlo ``(estimate, standard error)`` of ``<nu, f>``."""
    w = nu.weights(nu.log_sampler(n_draws, rng), f)
    se = float(np.std(w, ddof=1) / math.sqrt(w.size)) if w.size > 1 else math.inf
    return float(np.mean(w)), se


def ml_moment(alpha: float, n: int) -> float:
    """``n! / Gamma(1 + n alpha)``, the n-th moment of ``sigma**-alpha``."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    if not (0 <= n <= 10):
        raise ValueError("n must lie in 0..10")
    return math.factorial(n) / math.gamma(1.0 + n * alpha)


def ml_sample(alpha: float, rng: RandomStream, size=None):
    """Mittag-Leffler(alpha) draws as ``sigma**-alpha`` with sigma positive alpha-stable."""
    s = sample_positive_stable(alpha, rng, size)
    return s ** (-alpha)


@dataclass(frozen=True)
class Normalizers:
    """``a(t) = t**alpha / c`` and its inverse ``b(t) = (c t)**(1/alpha)``.

    With ``E exp(-lam xi_1) = exp(-c lam**alpha)``, ``xi_t / b(t)`` is a
    standard positive alpha-stable variable and ``T(t) / a(t)`` tends to
    ``sigma**-alpha``.  The default ``c = 1`` gives ``a(t) = t**alpha``.
    """

    alpha: float
    scale: float = 1.0

    def a(self, t):
        return np.asarray(t, dtype=float) ** self.alpha / self.scale

    def b(self, t):
        return (self.scale * np.asarray(t, dtype=float)) ** (1.0 / self.alpha)
