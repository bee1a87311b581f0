# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""

import numpy as np

from libc.math cimport exp, fabs, sqrt

cdef double SQRT2 = sqrt(2.0)
cdef double KINETIC_MINUS = 1.0 / 16.0 + 8.0
cdef double HALF_KINETIC_PLUS = 1.0 / 8.0

N_CONDITIONS = 10


cdef inline void _fan_row(const double[:] p, double[:] o, double kin) noexcept nogil:
    cdef double nm = p[0], npl = p[1], r = p[2], a = p[3], b = p[4]
    cdef double g = p[5], d = p[6], c = p[7]
    cdef double r2 = r * r
    cdef double lhs, rhs, f1, f2, off

    lhs = nm * (1.0 - r); rhs = 2.0 * SQRT2 - r * b
    o[0] = lhs - rhs; o[10] = fabs(lhs) + fabs(rhs)
    lhs = nm * (-0.25 - r * a); rhs = -1.0 / SQRT2 - r * d
    o[1] = lhs - rhs; o[11] = fabs(lhs) + fabs(rhs)
    lhs = nm * (2.0 * SQRT2 - r * b); rhs = 8.0 + r * g + 1.0 - r2 - r * c / 2.0
    o[2] = lhs - rhs; o[12] = fabs(lhs) + fabs(rhs)
    lhs = npl * (r - 4.0); rhs = r * b
    o[3] = lhs - rhs; o[13] = fabs(lhs) + fabs(rhs)
    lhs = npl * (r * a + 1.0); rhs = r * d
    o[4] = lhs - rhs; o[14] = fabs(lhs) + fabs(rhs)
    lhs = npl * (r * b); rhs = -r * g + r2 - 16.0 + r * c / 2.0
    o[5] = lhs - rhs; o[15] = fabs(lhs) + fabs(rhs)

    o[6] = c - (a * a + b * b)
    o[16] = fabs(c) + a * a + b * b

    f1 = c / 2.0 - a * a + g
    f2 = c / 2.0 - b * b - g
    off = (d - a * b) * (d - a * b)
    o[7] = f1 * f2 - off
    o[17] = fabs(f1 * f2) + off

    lhs = nm * (1.0 - r2) + nm * (kin / 2.0 - r * c / 2.0)
    rhs = 2.0 * 2.0 * SQRT2 - 2.0 * r2 * b + SQRT2 * kin - r * b * c / 2.0
    o[8] = rhs - lhs; o[18] = fabs(lhs) + fabs(rhs)

    lhs = npl * (r2 - 16.0) + npl * (r * c / 2.0 - HALF_KINETIC_PLUS)
    rhs = 2.0 * r2 * b + r * b * c / 2.0
    o[9] = rhs - lhs; o[19] = fabs(lhs) + fabs(rhs)


def fan_conditions(params, printed=False):
    cdef double[:, ::1] p = np.ascontiguousarray(params, dtype=np.float64).reshape(-1, 8)
    cdef Py_ssize_t m = p.shape[0], i
    out_arr = np.empty((m, 20))
    cdef double[:, ::1] out = out_arr
    cdef double kin = KINETIC_MINUS * KINETIC_MINUS if printed else KINETIC_MINUS
    with nogil:
        for i in range(m):
            _fan_row(p[i], out[i], kin)
    return out_arr


def det_factored(a, b):
    cdef double[:, ::1] x = np.ascontiguousarray(a, dtype=np.float64).reshape(-1, 3)
    cdef double[:, ::1] y = np.ascontiguousarray(b, dtype=np.float64).reshape(-1, 3)
    cdef Py_ssize_t m = x.shape[0], i
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    cdef double r, rt, du2, dsq
    with nogil:
        for i in range(m):
            r = x[i, 0]
            rt = y[i, 0]
            du2 = (x[i, 1] - y[i, 1]) ** 2 + (x[i, 2] - y[i, 2]) ** 2
            dsq = r * r - rt * rt
            out[i] = dsq * (-r * rt * du2 + dsq * (r - rt))
    return out_arr


cdef inline double _bump(double s) noexcept nogil:
    if fabs(s) >= 1.0:
        return 0.0
    return exp(1.0 - 1.0 / (1.0 - s * s))


cdef inline double _dbump(double s) noexcept nogil:
    cdef double den
    if fabs(s) >= 1.0:
        return 0.0
    den = 1.0 - s * s
    return exp(1.0 - 1.0 / den) * (-2.0 * s / (den * den))


def bump(s):
    s = np.asarray(s, dtype=np.float64)
    flat = np.ascontiguousarray(s).reshape(-1)
    cdef double[::1] v = flat
    out_arr = np.empty(flat.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        out[i] = _bump(v[i])
    return out_arr.reshape(s.shape)


def dbump(s):
    s = np.asarray(s, dtype=np.float64)
    flat = np.ascontiguousarray(s).reshape(-1)
    cdef double[::1] v = flat
    out_arr = np.empty(flat.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        out[i] = _dbump(v[i])
    return out_arr.reshape(s.shape)


def sector_weak_integrals(speeds, values, bumps, int n_t, gl_nodes, gl_weights):
    cdef double[::1] sp = np.ascontiguousarray(speeds, dtype=np.float64).reshape(-1)
    cdef double[:, :, ::1] val = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[:, ::1] bm = np.ascontiguousarray(bumps, dtype=np.float64).reshape(-1, 4)
    cdef double[::1] gx = np.ascontiguousarray(gl_nodes, dtype=np.float64)
    cdef double[::1] gw = np.ascontiguousarray(gl_weights, dtype=np.float64)
    cdef Py_ssize_t nb = bm.shape[0], nsec = val.shape[0], nrow = val.shape[1]
    cdef Py_ssize_t ng = gx.shape[0], nsp = sp.shape[0]
    out_arr = np.zeros((nb, nrow))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t ib, it, j, k, r
    cdef double ct, rt, cx, rx, lo, hi, st, t, ft, dft, wt, e0, e1, half, mid
    cdef double x, sx, a, dd, w

    with nogil:
        for ib in range(nb):
            ct = bm[ib, 0]; rt = bm[ib, 1]; cx = bm[ib, 2]; rx = bm[ib, 3]
            lo = cx - rx
            hi = cx + rx
            wt = 2.0 * rt / n_t
            for it in range(n_t):
                st = 2.0 * (it + 0.5) / n_t - 1.0
                t = ct + rt * st
                ft = _bump(st) * wt
                dft = _dbump(st) / rt * wt
                e0 = lo
                for j in range(nsec):
                    if j < nsp:
                        e1 = sp[j] * t
                        if e1 < lo:
                            e1 = lo
                        elif e1 > hi:
                            e1 = hi
                    else:
                        e1 = hi
                    if e1 > e0:
                        half = 0.5 * (e1 - e0)
                        mid = 0.5 * (e1 + e0)
                        a = 0.0
                        dd = 0.0
                        for k in range(ng):
                            x = mid + half * gx[k]
                            sx = (x - cx) / rx
                            w = half * gw[k]
                            a = a + w * _bump(sx)
                            dd = dd + w * _dbump(sx)
                        dd = dd / rx
                        for r in range(nrow):
                            out[ib, r] += dft * a * val[j, r, 0] + ft * dd * val[j, r, 1]
                    e0 = e1
    return out_arr
