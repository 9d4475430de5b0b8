"""Named verification experiments.

Every experiment takes a model, its own parameters and a master seed, and
returns an :class:`ExperimentReport` whose verdict is computed from the
reported statistics.  Replicate ``i`` uses ``stream(seed, i)``; reference
samples use disjoint stream ranges (see :mod:`lamperti_ou.replicates`), so a
report does not depend on the thread count.

V-space test functions are :class:`Integrand` objects (bounded functions of
the GOU value).  Test functions for the invariant measure of U are
:class:`NuTest` objects; each maps to the V-space integrand
``h(v) = f(1/v) / v``, so that ``int_0^t f(U(s)) ds`` equals
``int_0^{T(t)} h(V(s)) ds`` along the same path.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import integrate

from .errors import InvalidTarget
from .models import LevyModel, MeanClass
from .oracles import NuFunctional, Normalizers, mean_inverse_hat_I, ml_moment, ml_sample, moment_oracle
from .paths import (
    GridPath,
    SkeletonPath,
    StationaryScene,
    build_scene,
    exp_functional,
    sample_log_hat_I,
    simulate_path,
)
from .processes import _ensure_range, patie_identity_check, support_interval
from .replicates import ML_OFFSET, REFERENCE_OFFSET, log_hat_I_draws, run_replicates
from .rng import stream
from .scan import Integrand, simulate_track
from .stats import KS_ALPHA, ExperimentReport, covariance_with_se, ks_statistic, ks_two_sample, mean_within

# -- test functions -----------------------------------------------------------


class NuTest:
    """Test functions for the invariant measure of U.

    ``inv``: ``1/x``; ``exp_inv``: ``exp(-1/x) / x``; ``window_inv``:
    ``1{lo < x < hi} / x``.
    """

    __slots__ = ("kind", "lo", "hi")

    def __init__(self, kind: str, lo: float = 0.0, hi: float = math.inf):
        if kind not in ("inv", "exp_inv", "window_inv"):
            raise ValueError(f"unknown test function {kind!r}")
        if kind == "window_inv" and not 0.0 <= lo < hi:
            raise ValueError("window needs 0 <= lo < hi")
        self.kind, self.lo, self.hi = kind, float(lo), float(hi)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "inv":
            return 1.0 / x
        if self.kind == "exp_inv":
            return np.exp(-1.0 / x) / x
        return ((x > self.lo) & (x < self.hi)) / x

    def log_f(self, lx):
        """log f as a function of ``log x``."""
        lx = np.asarray(lx, dtype=float)
        if self.kind == "inv":
            return -lx
        if self.kind == "exp_inv":
            return -np.exp(-lx) - lx
        with np.errstate(divide="ignore"):
            inside = (lx > math.log(self.lo) if self.lo > 0 else True) & (lx < math.log(self.hi))
        return np.where(inside, -lx, -np.inf)

    def v_integrand(self) -> Integrand:
        if self.kind == "inv":
            return Integrand.const(1.0)
        if self.kind == "exp_inv":
            return Integrand.exp_neg()
        return Integrand.window(1.0 / self.hi, 1.0 / self.lo if self.lo > 0 else math.inf)

    def __eq__(self, other):
        return isinstance(other, NuTest) and (self.kind, self.lo, self.hi) == (other.kind, other.lo, other.hi)

    def __hash__(self):
        return hash((self.kind, self.lo, self.hi))

    def __repr__(self):
        if self.kind == "window_inv":
            return f"window_inv({self.lo:g},{self.hi:g})"
        return self.kind


_CALL = re.compile(r"^\s*(\w+)\s*(?:\(\s*([^)]*)\))?\s*$")


def _parse_call(text: str) -> tuple[str, list[float]]:
    m = _CALL.match(text)
    if not m:
        raise ValueError(f"cannot parse function {text!r}")
    args = [float(a) for a in m.group(2).split(",")] if m.group(2) else []
    return m.group(1), args


def parse_integrand(text: str) -> Integrand:
    """``one``, ``const(c)``, ``exp`` or ``window(lo,hi)``."""
    name, args = _parse_call(text)
    if name == "one" and not args:
        return Integrand.const(1.0)
    if name == "const" and len(args) == 1:
        return Integrand.const(args[0])
    if name == "exp" and not args:
        return Integrand.exp_neg()
    if name == "window" and len(args) == 2:
        return Integrand.window(*args)
    raise ValueError(f"unknown V-space function {text!r}")


def parse_nu_test(text: str) -> NuTest:
    """``inv``, ``exp_inv`` or ``window_inv(lo,hi)``."""
    name, args = _parse_call(text)
    if name in ("inv", "exp_inv") and not args:
        return NuTest(name)
    if name == "window_inv" and len(args) == 2:
        return NuTest(name, *args)
    raise ValueError(f"unknown test function {text!r}")


# -- shared plumbing ------------------------------------------------------------


@dataclass
class RunOptions:
    """Execution knobs shared by all experiments (none changes the statistics
    except `step` and `rel_tol`)."""

    threads: int = 1
    step: float | None = None
    rel_tol: float = 1e-8
    budget_s: float | None = None
    _start: float = field(default_factory=time.monotonic, repr=False)

    @property
    def deadline(self) -> float | None:
        return None if not self.budget_s else self._start + self.budget_s

    def replicates(self, fn, n, seed, offset=0):
        return run_replicates(fn, n, seed, threads=self.threads, offset=offset, deadline=self.deadline)

    def log_hat_I(self, model, n, seed, offset=REFERENCE_OFFSET):
        return log_hat_I_draws(model, n, seed, rel_tol=self.rel_tol, step=self.step, threads=self.threads, offset=offset)

    def echo(self) -> dict[str, Any]:
        return {"step": self.step, "rel_tol": self.rel_tol, "budget_s": self.budget_s}


def _report(name, model, params, stats, thresholds, checks, seed, t0, opts, notes=()):
    params = dict(params)
    params.update(opts.echo())
    return ExperimentReport(
        name=name,
        model=model.label(),
        params=params,
        stats=stats,
        thresholds=thresholds,
        checks={k: bool(v) for k, v in checks.items()},
        seed=seed,
        runtime_s=time.monotonic() - t0,
        notes=list(notes),
    )


def _budget_note(n_done, n_asked):
    if n_done < n_asked:
        return [f"time budget reached: {n_done} of {n_asked} replicates completed"]
    return []


def _not_applicable(name, model, params, reason, seed, t0, opts):
    return _report(
        name, model, params, [{"name": "applicability", "applicable": False, "reason": reason}], {},
        {"applicable": False}, seed, t0, opts, [f"not applicable: {reason}"],
    )


# -- stationarity, mixing, ergodic averages --------------------------------------


def exp_stationarity(
    model: LevyModel, t_list=(1.0, 5.0), n_reps: int = 10_000, seed: int = 0, opts: RunOptions | None = None
) -> ExperimentReport:
    """KS test of V(t) started from an independent draw of hat_I against fresh draws."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    t_list = np.asarray(sorted(t_list), dtype=float)
    if t_list.size == 0 or np.any(t_list <= 0):
        raise ValueError("t_list must be nonempty and positive")
    if n_reps < 10_000:
        raise ValueError("stationarity needs n_reps >= 10**4")

    def one(i, rng):
        lh = sample_log_hat_I(model, opts.rel_tol, rng, opts.step)
        track = simulate_track(model, rng, log_v0=lh, until_time=float(t_list[-1]), step=opts.step)
        return track.log_V_at(t_list)

    lv = np.array(opts.replicates(one, n_reps, seed))
    ref = opts.log_hat_I(model, n_reps, seed)
    stats, checks = [], {}
    for j, t in enumerate(t_list):
        d, p = ks_two_sample(lv[:, j], ref)
        stats.append({"name": f"t={t:g}", "t": t, "n": lv.shape[0], "n_ref": ref.size, "ks_statistic": d, "p_value": p})
        checks[f"p_value > {KS_ALPHA:g} at t={t:g}"] = p > KS_ALPHA
    params = {"t_list": list(t_list), "n_reps": n_reps}
    return _report("stationarity", model, params, stats, {"ks_alpha": KS_ALPHA}, checks, seed, t0, opts,
                   _budget_note(lv.shape[0], n_reps))


def exp_mixing(
    model: LevyModel,
    f: Integrand | None = None,
    g: Integrand | None = None,
    t_list=(0.0, 1.0, 20.0),
    n_reps: int = 10_000,
    seed: int = 0,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """Covariance of f(V(0)) and g(V(t)) in the stationary regime, with 3 SE intervals."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    f = f or Integrand.exp_neg()
    g = g or Integrand.exp_neg()
    t_list = np.asarray(sorted(t_list), dtype=float)
    if t_list.size == 0 or np.any(t_list < 0):
        raise ValueError("t_list must be nonempty and nonnegative")

    def one(i, rng):
        lh = sample_log_hat_I(model, opts.rel_tol, rng, opts.step)
        track = simulate_track(model, rng, log_v0=lh, until_time=float(t_list[-1]), step=opts.step)
        return np.concatenate(([lh], track.log_V_at(t_list)))

    lv = np.array(opts.replicates(one, n_reps, seed))
    x = f(np.exp(lv[:, 0]))
    stats = []
    for j, t in enumerate(t_list):
        cov, se = covariance_with_se(x, g(np.exp(lv[:, j + 1])))
        stats.append({"name": f"t={t:g}", "t": t, "n": lv.shape[0], "covariance": cov, "std_err": se})
    last = stats[-1]
    checks = {f"|cov| <= 3 SE at t={t_list[-1]:g}": abs(last["covariance"]) <= 3.0 * last["std_err"]}
    params = {"f": repr(f), "g": repr(g), "t_list": list(t_list), "n_reps": n_reps}
    return _report("mixing", model, params, stats, {"n_se": 3.0}, checks, seed, t0, opts,
                   _budget_note(lv.shape[0], n_reps))


def exp_birkhoff(
    model: LevyModel,
    f: Integrand | None = None,
    horizon: float = 1e4,
    seed: int = 0,
    n_oracle: int = 20_000,
    tol: float = 0.05,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """Time average of f(V) over one long stationary scene against E f(hat_I)."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    f = f or Integrand.exp_neg()
    rng = stream(seed, 0)
    lh = sample_log_hat_I(model, opts.rel_tol, rng, opts.step)
    track = simulate_track(model, rng, log_v0=lh, until_time=horizon, step=opts.step)
    avg = float(track.occupation(f, horizon)) / horizon
    vals = f(np.exp(opts.log_hat_I(model, n_oracle, seed)))
    oracle = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size))
    stats = [{"name": "time_average", "horizon": horizon, "value": avg, "segments": track.t.size},
             {"name": "oracle", "value": oracle, "std_err": se, "n": vals.size}]
    checks = {f"|avg - oracle| <= {tol:g} |oracle|": abs(avg - oracle) <= tol * abs(oracle)}
    params = {"f": repr(f), "horizon": horizon, "n_oracle": n_oracle}
    return _report("birkhoff", model, params, stats, {"rel_tol": tol}, checks, seed, t0, opts)


def exp_hopf_ratio(
    model: LevyModel,
    f: NuTest | None = None,
    g: NuTest | None = None,
    horizon: float = 1e3,
    start: float = 1.0,
    seed: int = 0,
    n_oracle: int = 20_000,
    tol: float = 0.10,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """``int_0^t f(U) / int_0^t g(U)`` for U started at `start` against the nu-ratio."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    f = f or NuTest("exp_inv")
    g = g or NuTest("inv")
    if not start > 0:
        raise ValueError("start must be positive")
    rng = stream(seed, 0)
    track = simulate_track(model, rng, 1.0 / start, until_A=horizon, step=opts.step)
    T = float(track.time_at_A(horizon))
    num = float(track.occupation(f.v_integrand(), T))
    den = float(track.occupation(g.v_integrand(), T))
    ratio = num / den
    lh = opts.log_hat_I(model, n_oracle, seed)
    wf = NuFunctional.weights(lh, f)
    wg = NuFunctional.weights(lh, g)
    oracle = float(np.mean(wf) / np.mean(wg))
    stats = [
        {"name": "ratio", "horizon": horizon, "numerator": num, "denominator": den, "value": ratio, "T": T},
        {"name": "oracle", "nu_f": float(np.mean(wf)), "nu_g": float(np.mean(wg)), "value": oracle, "n": lh.size},
    ]
    checks = {f"|ratio - oracle| <= {tol:g} |oracle|": abs(ratio - oracle) <= tol * abs(oracle)}
    params = {"f": repr(f), "g": repr(g), "horizon": horizon, "start": start, "n_oracle": n_oracle}
    return _report("hopf-ratio", model, params, stats, {"rel_tol": tol}, checks, seed, t0, opts)


# -- Darling-Kac regime and its negative control ------------------------------------


def _T_over(model, levels, n_reps, seed, opts):
    levels = np.asarray(levels, dtype=float)

    def one(i, rng):
        lh = sample_log_hat_I(model, opts.rel_tol, rng, opts.step)
        track = simulate_track(model, rng, log_v0=lh, until_A=float(levels[-1]), step=opts.step)
        return track.time_at_A(levels)

    return np.array(opts.replicates(one, n_reps, seed))


def exp_darling_kac(
    model: LevyModel,
    t_list=(10.0, 100.0, 1000.0),
    n_reps: int = 10_000,
    seed: int = 0,
    n_ml: int = 1_000_000,
    tol1: float = 0.10,
    tol2: float = 0.15,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """``T(t) / a(t)`` against the Mittag-Leffler law for stable drivers."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    t_list = np.asarray(sorted(t_list), dtype=float)
    params = {"t_list": list(t_list), "n_reps": n_reps, "n_ml": n_ml}
    if not model.is_stable:
        return _not_applicable("darling-kac", model, params, "driver is not a stable subordinator", seed, t0, opts)
    alpha = model.alpha
    norm = Normalizers(alpha, model.scale)
    T = _T_over(model, t_list, n_reps, seed, opts)
    r = T / norm.a(t_list)[None, :]
    ml = ml_sample(alpha, stream(seed, ML_OFFSET), n_ml)
    m1, m2 = ml_moment(alpha, 1), ml_moment(alpha, 2)
    stats = []
    for j, t in enumerate(t_list):
        x = r[:, j]
        stats.append({
            "name": f"t={t:g}", "t": t, "n": x.size,
            "mean": float(np.mean(x)), "mean_se": float(np.std(x, ddof=1) / math.sqrt(x.size)),
            "second_moment": float(np.mean(x * x)),
            "ks_distance_ml": ks_statistic(x, ml),
        })
    ks = [s["ks_distance_ml"] for s in stats]
    n = r.shape[0]
    stats.append({"name": "oracle", "ml_moment_1": m1, "ml_moment_2": m2,
                  "ks_decreasing": bool(all(b < a for a, b in zip(ks, ks[1:]))),
                  # typical KS distance between samples of these sizes drawn from one law
                  "ks_noise_level": 0.87 / math.sqrt(n * n_ml / (n + n_ml))})
    last = stats[len(t_list) - 1]
    checks = {
        f"|mean - {m1:.6g}| <= {tol1:g} * {m1:.6g}": abs(last["mean"] - m1) <= tol1 * m1,
        f"|second moment - {m2:.6g}| <= {tol2:g} * {m2:.6g}": abs(last["second_moment"] - m2) <= tol2 * m2,
    }
    return _report("darling-kac", model, params, stats, {"tol_mean": tol1, "tol_second": tol2}, checks, seed, t0,
                   opts, _budget_note(r.shape[0], n_reps))


def exp_negative_control(
    model: LevyModel,
    t_list=(10.0, 1000.0),
    n_reps: int = 10_000,
    seed: int = 0,
    max_ratio: float = 0.2,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """For finite-mean drivers T(t)/t concentrates: its variance shrinks with t."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    t_list = np.asarray(sorted(t_list), dtype=float)
    params = {"t_list": list(t_list), "n_reps": n_reps}
    if model.mean_class is not MeanClass.FINITE_MEAN_POSITIVE:
        return _not_applicable("negative-control", model, params, "xi_1 is not integrable", seed, t0, opts)
    r = _T_over(model, t_list, n_reps, seed, opts) / t_list[None, :]
    stats = []
    for j, t in enumerate(t_list):
        x = r[:, j]
        stats.append({"name": f"t={t:g}", "t": t, "n": x.size, "mean": float(np.mean(x)),
                      "variance": float(np.var(x, ddof=1))})
    v0, v1 = stats[0]["variance"], stats[len(t_list) - 1]["variance"]
    # both variances at rounding level (pure drift): nothing left to shrink
    ratio = v1 / v0 if v0 > 1e-24 else 0.0
    stats.append({"name": "variance_ratio", "value": ratio})
    checks = {f"variance ratio < {max_ratio:g}": ratio < max_ratio}
    return _report("negative-control", model, params, stats, {"max_ratio": max_ratio}, checks, seed, t0, opts,
                   _budget_note(r.shape[0], n_reps))


# -- recurrence -------------------------------------------------------------------


def exp_recurrence(
    model: LevyModel,
    x: float = 1.0,
    epsilon: float = 0.25,
    horizon: float = 200.0,
    n_reps: int = 1000,
    seed: int = 0,
    start: float | None = None,
    n_horizons: int = 4,
    min_fraction: float = 0.95,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """Fraction of U paths from `start` that enter ``(x - eps, x + eps)`` by each horizon.

    Horizons are ``horizon / 2**k`` for ``k = n_horizons - 1, ..., 0``.
    """
    opts = opts or RunOptions()
    t0 = time.monotonic()
    if not (x > 0 and epsilon > 0):
        raise ValueError("x and epsilon must be positive")
    support = support_interval(model)
    if not support.interior_contains(1.0 / x):
        raise InvalidTarget(f"1/x = {1.0 / x:g} is outside the interior of [{support.lower:g}, {support.upper:g}]")
    start = 4.0 * x if start is None else float(start)
    lo = 1.0 / (x + epsilon)
    hi = 1.0 / (x - epsilon) if x > epsilon else math.inf

    def one(i, rng):
        track = simulate_track(model, rng, 1.0 / start, until_A=horizon, step=opts.step)
        return track.first_entry(lo, hi)[1]

    hits = np.array(opts.replicates(one, n_reps, seed))
    horizons = horizon / 2.0 ** np.arange(n_horizons - 1, -1, -1)
    fr = [float(np.mean(hits <= h)) for h in horizons]
    stats = [{"name": f"horizon={h:g}", "horizon": h, "n": hits.size, "fraction": p} for h, p in zip(horizons, fr)]
    checks = {
        "fraction nondecreasing in horizon": all(b >= a for a, b in zip(fr, fr[1:])),
        f"fraction >= {min_fraction:g} at horizon {horizon:g}": fr[-1] >= min_fraction,
    }
    params = {"x": x, "epsilon": epsilon, "horizon": horizon, "n_reps": n_reps, "start": start,
              "n_horizons": n_horizons}
    return _report("recurrence", model, params, stats, {"min_fraction": min_fraction}, checks, seed, t0, opts,
                   _budget_note(hits.size, n_reps))


# -- identities of the stationary law ---------------------------------------------


def exp_invariant_mass(
    model: LevyModel, n: int = 100_000, seed: int = 0, rel: float = 0.01, opts: RunOptions | None = None
) -> ExperimentReport:
    """Monte Carlo ``E[1/hat_I]`` against ``E[xi_1]``."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    params = {"n": n}
    target = mean_inverse_hat_I(model)
    if math.isinf(target):
        return _not_applicable("invariant-mass", model, params, "E[xi_1] is infinite", seed, t0, opts)
    w = np.exp(-opts.log_hat_I(model, n, seed))
    est, se = float(np.mean(w)), float(np.std(w, ddof=1) / math.sqrt(w.size))
    stats = [{"name": "mean_inverse", "value": est, "std_err": se, "n": w.size, "oracle": target}]
    checks = {"within max(1%, 3 SE)": mean_within(est, target, se, rel)}
    return _report("invariant-mass", model, params, stats, {"rel": rel, "n_se": 3.0}, checks, seed, t0, opts)


def exp_moments(
    model: LevyModel, orders=(1, 2), n: int = 100_000, seed: int = 0, rel: float = 0.01,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """Empirical ``E[hat_I**k]`` against the moment recursion."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    params = {"orders": list(orders), "n": n}
    if not model.is_subordinator:
        return _not_applicable("moments", model, params, "moment recursion needs a subordinator", seed, t0, opts)
    h = np.exp(opts.log_hat_I(model, n, seed))
    stats, checks = [], {}
    for k in orders:
        x = h ** k
        est, se = float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(x.size))
        target = moment_oracle(model, int(k))
        stats.append({"name": f"order={k}", "order": k, "value": est, "std_err": se, "oracle": target, "n": x.size})
        checks[f"order {k} within max(1%, 3 SE)"] = mean_within(est, target, se, rel)
    return _report("moments", model, params, stats, {"rel": rel, "n_se": 3.0}, checks, seed, t0, opts)


NU_IDENTITY_FLOOR = 1e-12


def exp_nu_identity(
    model: LevyModel, n: int = 20_000, seed: int = 0, opts: RunOptions | None = None
) -> ExperimentReport:
    """``<nu, 1/x> = 1``.

    The weight ``(1/hat_I) * hat_I`` equals one draw by draw, so the spread
    is pure rounding; the tolerance is ``max(3 SE, 1e-12)``.
    """
    opts = opts or RunOptions()
    t0 = time.monotonic()
    w = NuFunctional.weights(opts.log_hat_I(model, n, seed), NuTest("inv"))
    est, se = float(np.mean(w)), float(np.std(w, ddof=1) / math.sqrt(w.size))
    stats = [{"name": "nu_inv", "value": est, "std_err": se, "n": w.size}]
    checks = {"|<nu,1/x> - 1| <= max(3 SE, 1e-12)": abs(est - 1.0) <= max(3.0 * se, NU_IDENTITY_FLOOR)}
    return _report("nu-identity", model, {"n": n}, stats, {"n_se": 3.0, "floor": NU_IDENTITY_FLOOR}, checks, seed,
                   t0, opts)


def exp_support(
    model: LevyModel, n: int = 100_000, seed: int = 0, opts: RunOptions | None = None
) -> ExperimentReport:
    """Empirical range of stationary draws against the support interval.

    Truncating the integral at relative accuracy `rel_tol` can only lower a
    draw, so the lower bound is checked with a slack of ``10 * rel_tol``;
    the upper bound is checked without slack.
    """
    opts = opts or RunOptions()
    t0 = time.monotonic()
    support = support_interval(model)
    lh = opts.log_hat_I(model, n, seed)
    h = np.exp(lh)
    lo_slack = 10.0 * opts.rel_tol
    stats = [{"name": "range", "case": support.case.value, "lower": support.lower, "upper": support.upper,
              "min": float(h.min()), "max": float(h.max()), "log_min": float(lh.min()), "n": h.size}]
    checks = {
        "all draws positive and finite": bool(np.all(np.isfinite(lh))),
        "min >= lower": float(h.min()) >= support.lower * (1.0 - lo_slack),
        "max <= upper": float(h.max()) <= support.upper,
    }
    return _report("support", model, {"n": n}, stats, {"lower_slack": lo_slack}, checks, seed, t0, opts)


# -- pathwise identities ---------------------------------------------------------


def exp_patie(
    model: LevyModel,
    n_paths: int = 1000,
    t_list=(0.5, 1.0, 2.0),
    x0: float = 1.0,
    seed: int = 0,
    tol: float = 1e-9,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """``max |U(t) - 1/V(T_V(t))|`` over paths, with ``V(0) = 1/x0``."""
    opts = opts or RunOptions()
    t0 = time.monotonic()
    t_list = np.asarray(t_list, dtype=float)
    need = math.log(math.expm1(float(t_list.max())) / x0)

    def one(i, rng):
        expf = exp_functional(simulate_path(model, 1.0, rng, opts.step))
        expf = _ensure_range(expf, need, rng)
        return patie_identity_check(expf, t_list, x0)[2]

    d = np.array(opts.replicates(one, n_paths, seed))
    stats = [{"name": "max_abs_diff", "value": float(d.max()), "n_paths": d.shape[0], "t_list": list(t_list)}]
    checks = {f"max diff < {tol:g}": float(d.max()) < tol}
    params = {"n_paths": n_paths, "t_list": list(t_list), "x0": x0}
    return _report("patie", model, params, stats, {"tol": tol}, checks, seed, t0, opts)


def grid_A_tolerance(scene: StationaryScene, t: float) -> float:
    """First-order bound ``20 step (1 + max |xi|)`` over ``[0, t]``."""
    path = scene.forward.path
    k = int(math.floor(t / path.step + 1e-9)) + 1
    return 20.0 * path.step * (1.0 + float(np.max(np.abs(path.values[: k + 1]))))


def quadrature_A(scene: StationaryScene, t: float) -> float:
    """``int_0^t ds / V(s)`` by numerical quadrature of the scene's V.

    Skeletons: adaptive Gauss-Kronrod between consecutive knots.  Grids:
    left-endpoint Riemann sum on the grid.
    """
    path = scene.forward.path
    if isinstance(path, GridPath):
        h = path.step
        n = int(math.floor(t / h + 1e-9))
        s = h * np.arange(n)
        total = float(np.sum(h / scene.V(s)))
        rest = t - n * h
        return total + rest / float(scene.V(n * h))
    knots = np.asarray(path.segments()[0], dtype=float)
    edges = np.concatenate((knots[knots < t], [t]))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        # V is smooth inside each segment; quad never evaluates the endpoints
        val, _ = integrate.quad(lambda s: 1.0 / float(scene.V(s)), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
    return total


def exp_additive_functional(
    model: LevyModel,
    t: float = 5.0,
    n_paths: int = 20,
    seed: int = 0,
    tol: float = 1e-9,
    opts: RunOptions | None = None,
) -> ExperimentReport:
    """Closed-form ``A(t) = log tilde_I(t) - log hat_I`` against quadrature of ``1/V``."""
    opts = opts or RunOptions()
    t0 = time.monotonic()

    def one(i, rng):
        scene = build_scene(model, rng, A_max=0.0, horizon=t, step=opts.step, rel_tol=opts.rel_tol)
        closed = float(scene.A(t))
        quad = quadrature_A(scene, t)
        bound = grid_A_tolerance(scene, t) if isinstance(scene.forward.path, GridPath) else tol
        return abs(closed - quad), bound

    res = np.array(opts.replicates(one, n_paths, seed))
    grid = not model.finite_activity
    stats = [{"name": "max_abs_diff", "value": float(res[:, 0].max()), "n_paths": res.shape[0], "t": t,
              "bound": float(res[:, 1].min()), "grid": grid}]
    checks = {"every path within its bound": bool(np.all(res[:, 0] <= res[:, 1]))}
    thresholds = {"grid_bound": "20 step (1 + max|xi|)"} if grid else {"tol": tol}
    return _report("additive-functional", model, {"t": t, "n_paths": n_paths}, stats, thresholds, checks, seed, t0,
                   opts)


def reversed_path(path, t: float):
    """The path ``s -> xi_t - xi_{(t-s)-}`` on ``[0, t]``."""
    if isinstance(path, GridPath):
        n = int(math.floor(t / path.step + 1e-9))
        inc = np.diff(path.values[: n + 1])[::-1]
        return GridPath(path.step, np.concatenate(([0.0], np.cumsum(inc))), path.model)
    if not isinstance(path, SkeletonPath):
        raise TypeError("unsupported path type")
    keep = path.jump_times <= t
    return SkeletonPath(path.drift, (t - path.jump_times[keep])[::-1], path.jump_sizes[keep][::-1], t, path.model)


def exp_duality(
    model: LevyModel, t: float = 2.0, n_reps: int = 10_000, seed: int = 0, opts: RunOptions | None = None
) -> ExperimentReport:
    """KS test of I(t) against the same integral on time-reversed independent paths."""
    opts = opts or RunOptions()
    t0 = time.monotonic()

    def one(i, rng):
        a = exp_functional(simulate_path(model, t, rng, opts.step)).log_value(t)
        p = simulate_path(model, t, rng, opts.step)
        rev = exp_functional(reversed_path(p, t))
        # int_0^t exp(xi_t - xi_{(t-s)-}) ds
        b = rev.log_value(t)
        return float(a), float(b)

    res = np.array(opts.replicates(one, n_reps, seed))
    d, p = ks_two_sample(res[:, 0], res[:, 1])
    stats = [{"name": "ks", "t": t, "n": res.shape[0], "ks_statistic": d, "p_value": p}]
    checks = {f"p_value > {KS_ALPHA:g}": p > KS_ALPHA}
    return _report("duality", model, {"t": t, "n_reps": n_reps}, stats, {"ks_alpha": KS_ALPHA}, checks, seed, t0,
                   opts)


# -- registry ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    fn: Callable[..., ExperimentReport]
    defaults: dict[str, Any]
    parsers: dict[str, Callable[[str], Any]] = field(default_factory=dict)


EXPERIMENTS: dict[str, ExperimentSpec] = {
    "stationarity": ExperimentSpec(exp_stationarity, {"t_list": (1.0, 5.0), "n_reps": 10_000}),
    "mixing": ExperimentSpec(
        exp_mixing, {"f": "exp", "g": "exp", "t_list": (0.0, 1.0, 20.0), "n_reps": 10_000},
        {"f": parse_integrand, "g": parse_integrand},
    ),
    "birkhoff": ExperimentSpec(
        exp_birkhoff, {"f": "exp", "horizon": 1e4, "n_oracle": 20_000, "tol": 0.05}, {"f": parse_integrand}
    ),
    "hopf-ratio": ExperimentSpec(
        exp_hopf_ratio,
        {"f": "exp_inv", "g": "inv", "horizon": 1e3, "start": 1.0, "n_oracle": 20_000, "tol": 0.10},
        {"f": parse_nu_test, "g": parse_nu_test},
    ),
    "darling-kac": ExperimentSpec(
        exp_darling_kac, {"t_list": (10.0, 100.0, 1000.0), "n_reps": 10_000, "n_ml": 1_000_000, "tol1": 0.10,
                          "tol2": 0.15}
    ),
    "negative-control": ExperimentSpec(
        exp_negative_control, {"t_list": (10.0, 1000.0), "n_reps": 10_000, "max_ratio": 0.2}
    ),
    "recurrence": ExperimentSpec(
        exp_recurrence,
        {"x": 1.0, "epsilon": 0.25, "horizon": 200.0, "n_reps": 1000, "start": 4.0, "n_horizons": 4,
         "min_fraction": 0.95},
    ),
    "invariant-mass": ExperimentSpec(exp_invariant_mass, {"n": 100_000, "rel": 0.01}),
    "moments": ExperimentSpec(exp_moments, {"orders": (1, 2), "n": 100_000, "rel": 0.01}),
    "nu-identity": ExperimentSpec(exp_nu_identity, {"n": 20_000}),
    "support": ExperimentSpec(exp_support, {"n": 100_000}),
    "patie": ExperimentSpec(exp_patie, {"n_paths": 1000, "t_list": (0.5, 1.0, 2.0), "x0": 1.0, "tol": 1e-9}),
    "additive-functional": ExperimentSpec(exp_additive_functional, {"t": 5.0, "n_paths": 20, "tol": 1e-9}),
    "duality": ExperimentSpec(exp_duality, {"t": 2.0, "n_reps": 10_000}),
}

REPLICATE_KEYS = ("n_reps", "n", "n_paths")


def run_experiment(name: str, model: LevyModel, params: dict[str, Any], seed: int,
                   opts: RunOptions | None = None) -> ExperimentReport:
    """Run a registered experiment; `params` are already typed (see the config module)."""
    try:
        spec = EXPERIMENTS[name]
    except KeyError:
        raise ValueError(f"unknown experiment {name!r}; known: {', '.join(sorted(EXPERIMENTS))}") from None
    kwargs = {}
    for k, v in params.items():
        if k not in spec.defaults:
            raise ValueError(f"experiment {name!r} has no parameter {k!r}")
        kwargs[k] = spec.parsers[k](v) if k in spec.parsers and isinstance(v, str) else v
    return spec.fn(model, seed=seed, opts=opts, **kwargs)


__all__ = [
    "EXPERIMENTS", "ExperimentSpec", "NuTest", "RunOptions", "exp_additive_functional",
    "exp_birkhoff", "exp_darling_kac", "exp_duality", "exp_hopf_ratio", "exp_invariant_mass", "exp_mixing",
    "exp_moments", "exp_negative_control", "exp_nu_identity", "exp_patie", "exp_recurrence",
    "exp_stationarity", "exp_support", "grid_A_tolerance", "parse_integrand", "parse_nu_test",
    "quadrature_A", "reversed_path", "run_experiment",
]
