"""numba kernels. Arithmetic order mirrors ``numpy_impl`` operation for operation."""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _neumaier(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


@njit(cache=True)
def compensated_sum(re, im):
    sr = 0.0
    cr = 0.0
    si = 0.0
    ci = 0.0
    for k in range(re.shape[0]):
        sr, cr = _neumaier(sr, cr, re[k])
        si, ci = _neumaier(si, ci, im[k])
    return sr + cr, si + ci


@njit(cache=True, parallel=True)
def bilinear_sections(mi, ni, cre, cim, xre, xim, yre, yim):
    n_samples = xre.shape[0]
    n_terms = mi.shape[0]
    out_re = np.empty(n_samples)
    out_im = np.empty(n_samples)
    for s in prange(n_samples):
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for t in range(n_terms):
            m = mi[t]
            n = ni[t]
            pr = xre[s, m] * yre[s, n] - xim[s, m] * yim[s, n]
            pi = xre[s, m] * yim[s, n] + xim[s, m] * yre[s, n]
            tr = cre[t] * pr - cim[t] * pi
            ti = cre[t] * pi + cim[t] * pr
            sr, cr = _neumaier(sr, cr, tr)
            si, ci = _neumaier(si, ci, ti)
        out_re[s] = sr + cr
        out_im[s] = si + ci
    return out_re, out_im


@njit(cache=True)
def partial_sum_table(tre, tim):
    rows, cols = tre.shape
    row_re = np.zeros((rows, cols + 1))
    row_im = np.zeros((rows, cols + 1))
    for m in range(rows):
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for n in range(cols):
            sr, cr = _neumaier(sr, cr, tre[m, n])
            si, ci = _neumaier(si, ci, tim[m, n])
            row_re[m, n + 1] = sr + cr
            row_im[m, n + 1] = si + ci
    out_re = np.zeros((rows + 1, cols + 1))
    out_im = np.zeros((rows + 1, cols + 1))
    for n in range(cols + 1):
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for m in range(rows):
            sr, cr = _neumaier(sr, cr, row_re[m, n])
            si, ci = _neumaier(si, ci, row_im[m, n])
            out_re[m + 1, n] = sr + cr
            out_im[m + 1, n] = si + ci
    return out_re, out_im


@njit(cache=True)
def cauchy_violations_2d(sre, sim):
    last_m = sre.shape[0] - 1
    last_n = sre.shape[1] - 1
    worst = np.zeros((last_m + 1, last_n + 1))
    arg_p = np.zeros((last_m + 1, last_n + 1), dtype=np.int64)
    arg_q = np.zeros((last_m + 1, last_n + 1), dtype=np.int64)
    for m in range(1, last_m):
        for n in range(1, last_n):
            best = -1.0
            bp = 0
            bq = 0
            for p in range(m + 1, last_m + 1):
                for q in range(n + 1, last_n + 1):
                    d = math.hypot(sre[p, q] - sre[m, n], sim[p, q] - sim[m, n])
                    if d > best:
                        best = d
                        bp = p
                        bq = q
            worst[m, n] = best
            arg_p[m, n] = bp
            arg_q[m, n] = bq
    return worst, arg_p, arg_q


@njit(cache=True)
def cauchy_violations_1d(rre, rim):
    n_series, width = rre.shape
    last = width - 1
    worst = np.zeros((n_series, width))
    arg_q = np.zeros((n_series, width), dtype=np.int64)
    for r in range(n_series):
        for n in range(1, last):
            best = -1.0
            bq = 0
            for q in range(n + 1, last + 1):
                d = math.hypot(rre[r, q] - rre[r, n], rim[r, q] - rim[r, n])
                if d > best:
                    best = d
                    bq = q
            worst[r, n] = best
            arg_q[r, n] = bq
    return worst, arg_q


@njit(cache=True)
def _phase_modulus(a, lin, rest, theta):
    w = complex(math.cos(theta), math.sin(theta))
    return abs(a * w * w + lin * w + rest)


@njit(cache=True)
def _golden(a, lin, rest, lo, hi, iterations):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc = _phase_modulus(a, lin, rest, c)
    fd = _phase_modulus(a, lin, rest, d)
    for _ in range(iterations):
        if fc >= fd:
            hi = d
            d = c
            fd = fc
            c = hi - inv_phi * (hi - lo)
            fc = _phase_modulus(a, lin, rest, c)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + inv_phi * (hi - lo)
            fd = _phase_modulus(a, lin, rest, d)
    if fc >= fd:
        return c, fc
    return d, fd


@njit(cache=True)
def _form_value(mat, z):
    width = z.shape[0]
    v = 0j
    for m in range(width):
        acc = 0j
        for n in range(width):
            acc += mat[m, n] * z[n]
        v += z[m] * acc
    return v


@njit(cache=True, parallel=True)
def coordinate_ascent(mat, z0, n_grid, sweeps, golden_iterations, tol):
    n_starts, width = z0.shape
    z = z0.copy()
    moduli = np.zeros(n_starts)
    max_seen = np.zeros(n_starts)
    iterations = np.zeros(n_starts, dtype=np.int64)
    step = 2.0 * math.pi / n_grid
    for r in prange(n_starts):
        v = _form_value(mat, z[r])
        cur = abs(v)
        seen = cur
        for _ in range(sweeps):
            before = cur
            for p in range(width):
                a = mat[p, p]
                zp = z[r, p]
                lin = 0j
                for j in range(width):
                    lin += (mat[p, j] + mat[j, p]) * z[r, j]
                lin -= 2.0 * a * zp
                rest = v - a * zp * zp - lin * zp
                g_best = -1.0
                g_theta = 0.0
                for k in range(n_grid):
                    f = _phase_modulus(a, lin, rest, k * step)
                    if f > g_best:
                        g_best = f
                        g_theta = k * step
                theta, fval = _golden(a, lin, rest, g_theta - step, g_theta + step, golden_iterations)
                if g_best > fval:
                    theta = g_theta
                    fval = g_best
                if fval > seen:
                    seen = fval
                iterations[r] += 1
                if fval > cur:
                    w = complex(math.cos(theta), math.sin(theta))
                    z[r, p] = w
                    v = rest + a * w * w + lin * w
                    cur = abs(v)
            v = _form_value(mat, z[r])
            cur = abs(v)
            if cur - before <= tol * max(1.0, cur):
                break
        moduli[r] = cur
        max_seen[r] = max(seen, cur)
    return z, moduli, max_seen, iterations
