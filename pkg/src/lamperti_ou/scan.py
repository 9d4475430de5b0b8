"""Generalized OU tracks: V, A and T along one forward path.

A :class:`GOUTrack` records, at the start of every segment of a forward
path, the time, ``log V`` and the additive functional ``A``.  Between knots
V solves ``dV = (1 - b V) ds`` exactly, so every query below (T at given
A-levels, V at given times, occupation integrals, first entry into a window)
is answered in closed form per segment.  The scan itself is the hot loop and
runs in the selected kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels as _active_kernels
from .errors import NoConvergence, OutOfRange
from .models import LevyModel
from .paths import _first_block, draw_segments
from .rng import RandomStream

MAX_SEGMENTS = 1 << 24
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class Integrand:
    """Bounded test functions of v, closed under the segment integrals below.

    ``kind`` is ``"const"`` (value `p0`), ``"exp"`` (``exp(-v)``) or
    ``"window"`` (indicator of ``lo < v < hi``).
    """

    __slots__ = ("kind", "p0", "p1")

    def __init__(self, kind: str, p0: float = 1.0, p1: float = math.inf):
        if kind not in ("const", "exp", "window"):
            raise ValueError(f"unknown integrand {kind!r}")
        self.kind, self.p0, self.p1 = kind, float(p0), float(p1)

    @classmethod
    def const(cls, c: float = 1.0):
        return cls("const", c)

    @classmethod
    def exp_neg(cls):
        return cls("exp")

    @classmethod
    def window(cls, lo: float, hi: float):
        if not lo < hi:
            raise ValueError("window needs lo < hi")
        return cls("window", lo, hi)

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind == "const":
            return np.full_like(v, self.p0)
        if self.kind == "exp":
            return np.exp(-v)
        return ((v > self.p0) & (v < self.p1)).astype(float)

    def __repr__(self):
        if self.kind == "const":
            return f"const({self.p0:g})"
        if self.kind == "exp":
            return "exp(-v)"
        return f"window({self.p0:g},{self.p1:g})"


def _log_ell(b, u):
    # log int_0^u exp(-b s) ds
    with np.errstate(divide="ignore", over="ignore"):
        if b == 0.0:
            return np.log(u)
        return np.log(-np.expm1(-b * u) / b)


def _log_g(b, u):
    with np.errstate(divide="ignore", over="ignore"):
        if b == 0.0:
            return np.log(u)
        return np.log(np.expm1(b * u) / b)


@dataclass(eq=False)
class GOUTrack:
    """V started at ``exp(lv[0])`` along a forward path with drift `b`."""

    b: float
    t: np.ndarray
    dt: np.ndarray
    jumps: np.ndarray
    lv: np.ndarray
    a: np.ndarray
    t_end: float
    a_end: float
    lv_end: float
    grid_step: float = 0.0

    # -- pointwise values ---------------------------------------------------

    def _log_v_after(self, k, u):
        """log V at ``t_k + u`` (``0 <= u <= dt_k``, before the jump)."""
        lv = self.lv[k]
        out = np.logaddexp(lv - self.b * u, _log_ell(self.b, u))
        if self.b != 0.0:
            # V started at the fixed point 1/b stays there exactly
            out = np.where(lv == math.log(1.0 / self.b) if self.b > 0 else False, lv, out)
        return out

    def _a_after(self, k, u):
        with np.errstate(divide="ignore"):
            return self.a[k] + np.logaddexp(0.0, _log_g(self.b, u) - self.lv[k])

    def log_V_at(self, times):
        """log V at V-times; on grid tracks, times within 1e-9 of a grid point
        read the lattice value (after that point's increment)."""
        times = np.asarray(times, dtype=float)
        if np.any(times < 0) or np.any(times > self.t_end * (1.0 + 1e-12)):
            raise OutOfRange("time outside the simulated track")
        k = np.searchsorted(self.t, times, side="right") - 1
        out = self._log_v_after(k, times - self.t[k])
        if self.grid_step > 0.0:
            h = self.grid_step
            kq = np.rint(times / h)
            snap = np.abs(times - kq * h) <= 1e-9 * np.maximum(1.0, times)
            kq = kq.astype(np.int64)
            n = self.t.size
            lattice = np.where(kq < n, self.lv[np.minimum(kq, n - 1)], self.lv_end)
            out = np.where(snap, lattice, out)
        return out

    def V_at(self, times):
        return np.exp(self.log_V_at(times))

    def A_at(self, times):
        times = np.asarray(times, dtype=float)
        k = np.searchsorted(self.t, times, side="right") - 1
        return self._a_after(k, times - self.t[k])

    def time_at_A(self, levels):
        """T: the V-time at which A first reaches each level."""
        k, u = self._locate_A(levels)
        return self.t[k] + u

    def log_V_at_A(self, levels):
        """log V(T(a)), evaluated from the segment offset so that no precision
        is lost to ``T - t_k`` when V is tiny after a large jump."""
        k, u = self._locate_A(levels)
        return self._log_v_after(k, u)

    def _locate_A(self, levels):
        levels = np.asarray(levels, dtype=float)
        if np.any(levels > self.a_end):
            raise OutOfRange("A level beyond the simulated track")
        k = np.searchsorted(self.a, levels, side="right") - 1
        k = np.maximum(k, 0)
        delta = levels - self.a[k]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            # y = log(V_k (e^delta - 1)), the integral of exp(xi) still needed
            y = self.lv[k] + delta + np.log(-np.expm1(-delta))
            if self.b == 0.0:
                u = np.exp(y)
            elif self.b > 0.0:
                u = np.logaddexp(0.0, y + math.log(self.b)) / self.b
            else:
                u = np.log1p(self.b * np.exp(y)) / self.b
        u = np.where(delta <= 0.0, 0.0, u)
        return k, np.minimum(u, self.dt[k])

    # -- integrals ------------------------------------------------------------

    def _segment_integral(self, f: Integrand, k, u):
        """int_0^u f(V(t_k + s)) ds for arrays of segment indices and lengths."""
        u = np.asarray(u, dtype=float)
        if f.kind == "const":
            return f.p0 * u
        v0 = np.exp(self.lv[k])
        b = self.b
        if f.kind == "exp":
            if b == 0.0:
                return np.exp(-v0) * -np.expm1(-u)
            return self._gl_exp(v0, u)
        lo, hi = f.p0, f.p1
        v1 = np.exp(self._log_v_after(k, u))
        increasing = v1 >= v0
        t_lo = self._inverse_time(v0, lo, u)
        t_hi = self._inverse_time(v0, hi, u)
        # increasing: inside between reaching lo and reaching hi; decreasing: reverse
        t_in = np.where(increasing, np.where(v0 > lo, 0.0, t_lo), np.where(v0 < hi, 0.0, t_hi))
        t_out = np.where(increasing, np.where(v0 >= hi, 0.0, t_hi), np.where(v0 <= lo, 0.0, t_lo))
        return np.maximum(0.0, t_out - t_in)

    def _inverse_time(self, v0, level, u):
        """Time in ``[0, u]`` at which the monotone segment reaches `level` (u if never)."""
        b = self.b
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if b == 0.0:
                s = level - v0
            else:
                c = 1.0 / b
                s = -np.log((level - c) / (v0 - c)) / b
        s = np.where(np.isfinite(s) & (s >= 0.0), s, u)
        return np.minimum(s, u)

    def _gl_exp(self, v0, u):
        b = self.b
        c = 1.0 / b
        u = np.broadcast_to(u, np.shape(v0)).astype(float)
        active = np.minimum(u, 40.0 / abs(b)) if b > 0 else u
        n_pieces = np.clip(np.ceil(np.abs(b) * active / 0.5), 1, 400).astype(np.int64)
        out = np.zeros_like(active)
        for idx in np.ndindex(active.shape):
            p = n_pieces[idx]
            edges = np.linspace(0.0, active[idx], p + 1)
            mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
            half = 0.5 * (edges[1:] - edges[:-1])[:, None]
            s = mid + half * _GL_X[None, :]
            v = c + (v0[idx] - c) * np.exp(-b * s)
            out[idx] = float(np.sum(half * _GL_W[None, :] * np.exp(-v)))
        tail = u - active
        return out + np.where(tail > 0, math.exp(-c) * tail, 0.0)

    def occupation(self, f: Integrand, t_end):
        """``int_0^t f(V(s)) ds`` for each entry of `t_end` (V-time)."""
        t_end = np.asarray(t_end, dtype=float)
        if np.any(t_end > self.t_end) or np.any(t_end < 0):
            raise OutOfRange("occupation horizon outside the simulated track")
        if f.kind == "const":
            return f.p0 * t_end
        n = self.t.size
        full_len = np.minimum(self.dt, self.t_end - self.t)
        per_seg = self._segment_integral(f, np.arange(n), full_len)
        cum = np.concatenate(([0.0], np.cumsum(per_seg)))
        k = np.searchsorted(self.t, t_end, side="right") - 1
        k = np.clip(k, 0, n - 1)
        part = self._segment_integral(f, k, t_end - self.t[k])
        return cum[k] + part

    def occupation_until_A(self, f: Integrand, levels):
        """``int_0^{T(a)} f(V(s)) ds`` for each A-level ``a``."""
        return self.occupation(f, self.time_at_A(levels))

    def first_entry(self, lo: float, hi: float):
        """(V-time, A) of the first visit of V to the open window (lo, hi); inf if none."""
        v0 = np.exp(self.lv)
        u = np.minimum(self.dt, self.t_end - self.t)
        v1 = np.exp(self._log_v_after(np.arange(self.t.size), u))
        inside = (v0 > lo) & (v0 < hi)
        up = (v1 > v0) & (v0 <= lo) & (v1 > lo)
        down = (v1 < v0) & (v0 >= hi) & (v1 < hi)
        hit = inside | up | down
        if not hit.any():
            return math.inf, math.inf
        k = int(np.argmax(hit))
        if inside[k]:
            s = 0.0
        else:
            level = lo if up[k] else hi
            s = float(self._inverse_time(v0[k : k + 1], level, u[k : k + 1])[0])
        return float(self.t[k] + s), float(self._a_after(np.array([k]), np.array([s]))[0])


def _concat_track(b, parts, t_end, a_end, lv_end):
    t, dt, jumps, lv, a = (np.concatenate([p[i] for p in parts]) for i in range(5))
    return GOUTrack(b, t, dt, jumps, lv, a, t_end, a_end, lv_end)


def scan_segments(dt, jumps, b, v0: float, t0: float = 0.0, kernels=None) -> GOUTrack:
    """Track of V from `v0` along explicit segments (used for given paths)."""
    kernels = kernels or _active_kernels
    dt = np.ascontiguousarray(dt, dtype=float)
    jumps = np.ascontiguousarray(jumps, dtype=float)
    with np.errstate(divide="ignore"):
        lv0 = math.log(v0) if v0 > 0 else -math.inf
    lv, a, lv_end, a_end = kernels.gou_scan(dt, jumps, float(b), lv0, 0.0)
    t = t0 + np.concatenate(([0.0], np.cumsum(dt)[:-1]))
    return GOUTrack(float(b), t, dt, jumps, lv, a, float(t0 + dt.sum()), float(a_end), float(lv_end))


def track_from_path(path, v0: float, kernels=None) -> GOUTrack:
    """Track of V from `v0` along a simulated path (jumps at knots, drift between)."""
    t, x, b = path.segments()
    ends = np.append(t[1:], path.horizon)
    dt = ends - t
    jumps = np.append(x[1:] - (x[:-1] + b * dt[:-1]), 0.0)
    track = scan_segments(dt, jumps, b, v0, kernels=kernels)
    track.t = t.astype(float)
    step = getattr(path, "step", None)
    if step is not None:
        track.grid_step = float(step)
    return track


def simulate_track(
    model: LevyModel,
    rng: RandomStream,
    v0: float | None = None,
    *,
    log_v0: float | None = None,
    until_time: float = 0.0,
    until_A: float = 0.0,
    step: float | None = None,
    max_segments: int = MAX_SEGMENTS,
    kernels=None,
) -> GOUTrack:
    """Simulate V on a fresh forward path until both targets are covered.

    The start is given either as `v0` or, for values outside the double
    range, as `log_v0`.
    """
    kernels = kernels or _active_kernels
    if (v0 is None) == (log_v0 is None):
        raise ValueError("give exactly one of v0 and log_v0")
    if log_v0 is not None:
        lv = float(log_v0)
    else:
        with np.errstate(divide="ignore"):
            lv = math.log(v0) if v0 > 0 else -math.inf
    a = 0.0
    t0 = 0.0
    used = 0
    n = _first_block(model, step)
    parts = []
    b = 0.0
    grid = not model.finite_activity
    while True:
        dt, jumps, b = draw_segments(model, rng, n, step)
        lv_k, a_k, lv, a = kernels.gou_scan(dt, jumps, b, lv, a)
        if grid:
            t_k = (used + np.arange(dt.size)) * dt[0]
            t1 = (used + dt.size) * dt[0]
        else:
            cs = np.cumsum(dt)
            t_k = t0 + np.concatenate(([0.0], cs[:-1]))
            t1 = t0 + cs[-1]
        parts.append((t_k, dt, jumps, lv_k, a_k))
        used += dt.size
        t0 = t1
        if t0 >= until_time and a >= until_A:
            track = _concat_track(b, parts, float(t0), float(a), float(lv))
            if grid:
                track.grid_step = float(dt[0])
            return track
        if used >= max_segments:
            raise NoConvergence(f"track targets not reached after {used} segments")
        n = min(2 * n, max_segments - used)
