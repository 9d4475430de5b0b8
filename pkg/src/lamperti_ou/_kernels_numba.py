"""Scalar-loop kernels compiled with numba.

Both kernels walk a stream of segments.  Segment ``k`` has length
``dt[k]``, during which xi moves with constant drift ``b``; the jump
``jumps[k]`` is added at the end of the segment (or at its start when
``jump_first`` is set, see :func:`hat_i_accumulate`).
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _softplus(y):
    # log(1 + exp(y)) without overflow
    if y > 0.0:
        return y + math.log1p(math.exp(-y))
    return math.log1p(math.exp(y))


@njit(cache=True, nogil=True)
def _logaddexp(x, y):
    if x == -np.inf:
        return y
    if y == -np.inf:
        return x
    if x > y:
        return x + math.log1p(math.exp(y - x))
    return y + math.log1p(math.exp(x - y))


@njit(cache=True, nogil=True)
def hat_i_accumulate(dt, jumps, b, jump_first, x, ls, log_inv_tol, threshold):
    # ls is the log of the partial integral; internally the sum is carried
    # as s_m * exp(off) so each step costs a single exp
    n = dt.shape[0]
    if ls == -np.inf:
        s_m = 0.0
        off = 0.0
    else:
        s_m = 1.0
        off = ls
    prev_d = np.nan
    lell = 0.0
    for k in range(n):
        d = dt[k]
        if jump_first:
            x += jumps[k]
        if d != prev_d:
            if b == 0.0:
                lell = math.log(d)
            elif math.isinf(d):
                lell = -math.log(b)
            else:
                lell = math.log(-math.expm1(-b * d) / b)
            prev_d = d
        e = lell - x - off
        if s_m == 0.0:
            off = lell - x
            s_m = 1.0
        elif e > 600.0:
            s_m = s_m * math.exp(-e) + 1.0
            off = lell - x
        else:
            s_m += math.exp(e)
        x += b * d
        if not jump_first:
            x += jumps[k]
        if x >= log_inv_tol and x >= threshold:
            ls = off + math.log(s_m)
            if x >= max(log_inv_tol + _softplus(ls), threshold):
                return ls, x, k + 1, True
    if s_m == 0.0:
        return -np.inf, x, n, False
    return off + math.log(s_m), x, n, False


@njit(cache=True, nogil=True)
def gou_scan(dt, jumps, b, lv, a):
    n = dt.shape[0]
    lv_out = np.empty(n)
    a_out = np.empty(n)
    for k in range(n):
        lv_out[k] = lv
        a_out[k] = a
        d = dt[k]
        if d > 0.0:
            if b == 0.0:
                lg = math.log(d)
                a += _softplus(lg - lv)
                lv = _logaddexp(lv, lg)
            else:
                lg = math.log(math.expm1(b * d) / b)
                a += _softplus(lg - lv)
                lv = _logaddexp(lv - b * d, math.log(-math.expm1(-b * d) / b))
        lv -= jumps[k]
    return lv_out, a_out, lv, a
