"""Vectorized numpy twins of the numba kernels.

The generalized OU recursion ``V <- exp(-J) (V exp(-b d) + ell)`` is affine,
so it is solved in closed form with ``np.logaddexp.accumulate``.  To bound
round-off the block is cut into pieces at large log-multipliers.
"""

import numpy as np

_PIECE = 4096
_BIG = 40.0


def hat_i_accumulate(dt, jumps, b, jump_first, x, ls, log_inv_tol, threshold):
    n = dt.shape[0]
    if n == 0:
        return ls, x, 0, False
    drift = b * np.where(np.isinf(dt), 0.0, dt) if b != 0.0 else np.zeros(n)
    with np.errstate(over="ignore", divide="ignore"):
        if b == 0.0:
            lell = np.log(dt)
        else:
            lell = np.where(np.isinf(dt), -np.log(b) if b > 0 else np.nan, np.log(-np.expm1(-b * dt) / b))
    after = np.cumsum(drift + jumps)
    if jump_first:
        level = x + np.cumsum(jumps) + np.concatenate(([0.0], np.cumsum(drift)[:-1]))
    else:
        level = x + np.concatenate(([0.0], after[:-1]))
    end = x + after
    if b > 0.0:
        end = np.where(np.isinf(dt), np.inf, end)
    terms = lell - level
    terms[0] = np.logaddexp(ls, terms[0])
    acc = np.logaddexp.accumulate(terms)
    stop = end >= np.maximum(log_inv_tol + np.logaddexp(0.0, acc), threshold)
    if stop.any():
        k = int(np.argmax(stop))
        return float(acc[k]), float(end[k]), k + 1, True
    return float(acc[-1]), float(end[-1]), n, False


def _softplus(y):
    return np.logaddexp(0.0, y)


def gou_scan(dt, jumps, b, lv, a):
    n = dt.shape[0]
    lv_out = np.empty(n)
    a_out = np.empty(n)
    if n == 0:
        return lv_out, a_out, lv, a
    with np.errstate(divide="ignore"):
        if b == 0.0:
            lg = np.log(dt)
            lell = lg
        else:
            lg = np.log(np.expm1(b * dt) / b)
            lell = np.log(-np.expm1(-b * dt) / b)
    m = -jumps - b * dt
    cuts = np.flatnonzero(np.abs(m) > _BIG) + 1
    bounds = np.union1d(np.arange(0, n, _PIECE), cuts)
    bounds = np.append(bounds[bounds < n], n)
    for i0, i1 in zip(bounds[:-1], bounds[1:]):
        mm = m[i0:i1]
        cm = np.concatenate(([0.0], np.cumsum(mm)))
        # lv_k = W_k + cm_k with W_{k+1} = logaddexp(W_k, lg_k - cm_k)
        terms = np.empty(i1 - i0 + 1)
        terms[0] = lv
        terms[1:] = lg[i0:i1] - cm[:-1]
        w = np.logaddexp.accumulate(terms)
        lv_seg = w[:-1] + cm[:-1]
        lv_seg[0] = lv
        inc = _softplus(lg[i0:i1] - lv_seg)
        inc[~np.isfinite(lg[i0:i1])] = 0.0
        lv_out[i0:i1] = lv_seg
        a_out[i0:i1] = a + np.concatenate(([0.0], np.cumsum(inc)[:-1]))
        a = a_out[i1 - 1] + inc[-1]
        last = i1 - 1
        lv = np.logaddexp(lv_seg[-1] - b * dt[last], lell[last]) - jumps[last]
    return lv_out, a_out, float(lv), float(a)
