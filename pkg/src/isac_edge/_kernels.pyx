# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
from libc.math cimport cos, sin, nextafter, INFINITY, NAN


cdef inline double _point(double lo, double hi, long k, long n) noexcept nogil:
    if n == 0:
        return lo
    return lo + (hi - lo) * k / n


def beam_grid_search(double complex gu1, double complex gu2, double complex hu1,
                     double complex hu2, double hnorm2, double power, double noise,
                     double sens_floor, double pw_lo, double pw_hi, long n_pw,
                     double th_lo, double th_hi, long n_th,
                     double ph_lo, double ph_hi, long n_ph):
    cdef long i, k, j
    cdef double th, ph, c, s, cp, sp, re, im, gain_g, gain_h, p, sinr, lower
    cdef double best = -INFINITY, best_pw = NAN, best_th = NAN, best_ph = NAN
    with nogil:
        for i in range(n_th + 1):
            th = _point(th_lo, th_hi, i, n_th)
            c = cos(th)
            s = sin(th)
            for k in range(n_ph + 1):
                ph = _point(ph_lo, ph_hi, k, n_ph)
                cp = cos(ph)
                sp = sin(ph)
                re = c * gu1.real + s * (cp * gu2.real - sp * gu2.imag)
                im = c * gu1.imag + s * (cp * gu2.imag + sp * gu2.real)
                gain_g = re * re + im * im
                re = c * hu1.real + s * (cp * hu2.real - sp * hu2.imag)
                im = c * hu1.imag + s * (cp * hu2.imag + sp * hu2.real)
                gain_h = re * re + im * im
                if gain_g <= 0.0:
                    if sens_floor > 0.0:
                        continue
                    lower = pw_lo
                else:
                    lower = sens_floor / gain_g
                    while lower * gain_g < sens_floor:
                        lower = nextafter(lower, INFINITY)
                    if lower < pw_lo:
                        lower = pw_lo
                if lower > pw_hi:
                    continue
                for j in range(n_pw + 1):
                    p = _point(lower, pw_hi, j, n_pw)
                    if p * gain_g >= sens_floor:
                        sinr = (power - p) * hnorm2 / (noise + p * gain_h)
                        if sinr > best:
                            best = sinr
                            best_pw = p
                            best_th = th
                            best_ph = ph
    return best, best_pw, best_th, best_ph


cdef void _descend(const double[:, ::1] table, int level, int m, long remaining,
                   double cur, long[::1] k, long[::1] best_k, double* best) noexcept nogil:
    cdef long j
    cdef double v, w
    cdef int q
    if level == m - 2:
        for j in range(remaining + 1):
            v = table[level, j]
            w = table[level + 1, remaining - j]
            if w > v:
                v = w
            if cur > v:
                v = cur
            if v < best[0]:
                best[0] = v
                k[level] = j
                k[level + 1] = remaining - j
                for q in range(m):
                    best_k[q] = k[q]
        return
    for j in range(remaining + 1):
        v = table[level, j]
        if cur > v:
            v = cur
        if v >= best[0]:
            continue
        k[level] = j
        _descend(table, level + 1, m, remaining - j, v, k, best_k, best)


def simplex_minmax(table, long n):
    cdef const double[:, ::1] tab = np.ascontiguousarray(table, dtype=np.float64)
    cdef int m = tab.shape[0]
    if m == 1:
        return float(tab[0, n]), np.array([n], dtype=np.int64)
    k_arr = np.zeros(m, dtype=np.int64)
    best_arr = np.zeros(m, dtype=np.int64)
    cdef long[::1] k = k_arr
    cdef long[::1] best_k = best_arr
    cdef double best = INFINITY
    with nogil:
        _descend(tab, 0, m, n, -INFINITY, k, best_k, &best)
    return best, best_arr
