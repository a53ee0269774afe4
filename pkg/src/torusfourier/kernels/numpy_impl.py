"""Pure-numpy kernels, vectorized across the independent axis.

Each function loops over the *sequential* axis in Python (the order that the
compensated accumulators depend on) and performs the same floating-point
operations as the numba version on whole vectors at once.
"""

from __future__ import annotations

import numpy as np


def _neumaier(s, c, x):
    t = s + x
    c = c + np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
    return t, c


def compensated_sum(re, im):
    re = np.asarray(re, dtype=np.float64)
    im = np.asarray(im, dtype=np.float64)
    sr = cr = si = ci = np.float64(0.0)
    for k in range(re.shape[0]):
        sr, cr = _neumaier(sr, cr, re[k])
        si, ci = _neumaier(si, ci, im[k])
    return float(sr + cr), float(si + ci)


def bilinear_sections(mi, ni, cre, cim, xre, xim, yre, yim):
    n_samples = xre.shape[0]
    sr = np.zeros(n_samples)
    cr = np.zeros(n_samples)
    si = np.zeros(n_samples)
    ci = np.zeros(n_samples)
    for t in range(mi.shape[0]):
        m = mi[t]
        n = ni[t]
        pr = xre[:, m] * yre[:, n] - xim[:, m] * yim[:, n]
        pi = xre[:, m] * yim[:, n] + xim[:, m] * yre[:, n]
        tr = cre[t] * pr - cim[t] * pi
        ti = cre[t] * pi + cim[t] * pr
        sr, cr = _neumaier(sr, cr, tr)
        si, ci = _neumaier(si, ci, ti)
    return sr + cr, si + ci


def partial_sum_table(tre, tim):
    rows, cols = tre.shape
    row_re = np.zeros((rows, cols + 1))
    row_im = np.zeros((rows, cols + 1))
    sr = np.zeros(rows)
    cr = np.zeros(rows)
    si = np.zeros(rows)
    ci = np.zeros(rows)
    for n in range(cols):
        sr, cr = _neumaier(sr, cr, tre[:, n])
        si, ci = _neumaier(si, ci, tim[:, n])
        row_re[:, n + 1] = sr + cr
        row_im[:, n + 1] = si + ci
    out_re = np.zeros((rows + 1, cols + 1))
    out_im = np.zeros((rows + 1, cols + 1))
    sr = np.zeros(cols + 1)
    cr = np.zeros(cols + 1)
    si = np.zeros(cols + 1)
    ci = np.zeros(cols + 1)
    for m in range(rows):
        sr, cr = _neumaier(sr, cr, row_re[m])
        si, ci = _neumaier(si, ci, row_im[m])
        out_re[m + 1] = sr + cr
        out_im[m + 1] = si + ci
    return out_re, out_im


def cauchy_violations_2d(sre, sim):
    last_m = sre.shape[0] - 1
    last_n = sre.shape[1] - 1
    worst = np.zeros((last_m + 1, last_n + 1))
    arg_p = np.zeros((last_m + 1, last_n + 1), dtype=np.int64)
    arg_q = np.zeros((last_m + 1, last_n + 1), dtype=np.int64)
    for m in range(1, last_m):
        for n in range(1, last_n):
            d = np.hypot(sre[m + 1:, n + 1:] - sre[m, n], sim[m + 1:, n + 1:] - sim[m, n])
            flat = int(np.argmax(d))
            p, q = divmod(flat, d.shape[1])
            worst[m, n] = d[p, q]
            arg_p[m, n] = m + 1 + p
            arg_q[m, n] = n + 1 + q
    return worst, arg_p, arg_q


def cauchy_violations_1d(rre, rim):
    n_series, width = rre.shape
    last = width - 1
    worst = np.zeros((n_series, width))
    arg_q = np.zeros((n_series, width), dtype=np.int64)
    for n in range(1, last):
        d = np.hypot(rre[:, n + 1:] - rre[:, n:n + 1], rim[:, n + 1:] - rim[:, n:n + 1])
        best = np.argmax(d, axis=1)
        worst[:, n] = d[np.arange(n_series), best]
        arg_q[:, n] = n + 1 + best
    return worst, arg_q


def _phase_modulus(a, lin, rest, theta):
    w = np.cos(theta) + 1j * np.sin(theta)
    return np.abs(a * w * w + lin * w + rest)


def _golden(a, lin, rest, lo, hi, iterations):
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc = _phase_modulus(a, lin, rest, c)
    fd = _phase_modulus(a, lin, rest, d)
    for _ in range(iterations):
        left = fc >= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = np.where(left, hi - inv_phi * (hi - lo), d)
        new_d = np.where(left, c, lo + inv_phi * (hi - lo))
        new_fc = np.where(left, _phase_modulus(a, lin, rest, new_c), fd)
        new_fd = np.where(left, fc, _phase_modulus(a, lin, rest, new_d))
        c, d, fc, fd = new_c, new_d, new_fc, new_fd
    return np.where(fc >= fd, c, d), np.where(fc >= fd, fc, fd)


def _form_values(mat, z):
    return np.einsum("rm,rm->r", z, z @ mat.T)


def coordinate_ascent(mat, z0, n_grid, sweeps, golden_iterations, tol):
    """All starts advance in lockstep; a start stops updating once it converges."""
    z = np.array(z0, dtype=np.complex128)
    n_starts, width = z.shape
    sym = mat + mat.T
    step = 2.0 * np.pi / n_grid
    grid = np.arange(n_grid) * step
    w_grid = np.cos(grid) + 1j * np.sin(grid)
    v = _form_values(mat, z)
    cur = np.abs(v)
    seen = cur.copy()
    iterations = np.zeros(n_starts, dtype=np.int64)
    active = np.ones(n_starts, dtype=bool)
    rows = np.arange(n_starts)
    for _ in range(sweeps):
        if not active.any():
            break
        before = cur.copy()
        for p in range(width):
            a = mat[p, p]
            zp = z[:, p]
            lin = z @ sym[p] - 2.0 * a * zp
            rest = v - a * zp * zp - lin * zp
            vals = np.abs(a * w_grid[None, :] ** 2 + lin[:, None] * w_grid[None, :] + rest[:, None])
            g = np.argmax(vals, axis=1)
            g_best = vals[rows, g]
            g_theta = grid[g]
            theta, fval = _golden(a, lin, rest, g_theta - step, g_theta + step, golden_iterations)
            use_grid = g_best > fval
            theta = np.where(use_grid, g_theta, theta)
            fval = np.where(use_grid, g_best, fval)
            seen = np.where(active, np.maximum(seen, fval), seen)
            iterations += active
            accept = active & (fval > cur)
            w = np.cos(theta) + 1j * np.sin(theta)
            z[:, p] = np.where(accept, w, zp)
            v = np.where(accept, rest + a * w * w + lin * w, v)
            cur = np.abs(v)
        v = _form_values(mat, z)
        cur = np.abs(v)
        active &= ~(cur - before <= tol * np.maximum(1.0, cur))
    return z, cur, np.maximum(seen, cur), iterations
