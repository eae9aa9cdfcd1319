"""Pure numpy implementations of the brute-force search kernels.

Semantics (grid points, iteration order, tie-breaking) match ``_kernels.pyx``
exactly so either backend can serve the oracles.
"""
from __future__ import annotations

import numpy as np


def _grid(lo: float, hi: float, n: int) -> np.ndarray:
    if n == 0:
        return np.array([lo])
    return lo + (hi - lo) * np.arange(n + 1) / n


def _proj_gain(c, s, cp, sp, u1: complex, u2: complex) -> np.ndarray:
    re = c * u1.real + s * (cp * u2.real - sp * u2.imag)
    im = c * u1.imag + s * (cp * u2.imag + sp * u2.real)
    return re * re + im * im


def beam_grid_search(gu1, gu2, hu1, hu2, hnorm2, power, noise, sens_floor,
                     pw_lo, pw_hi, n_pw, th_lo, th_hi, n_th, ph_lo, ph_hi, n_ph):
    """Best comm SINR over a (theta, phi, P_w) grid of radar beams.

    The radar beam is sqrt(P_w) * (cos(theta) u1 + sin(theta) e^{i phi} u2); the
    data beam takes the remaining power along h. For each direction the P_w
    grid spans [max(pw_lo, P_min), pw_hi], P_min being the least power meeting
    the sensing floor in that direction. ``gu*``/``hu*`` are the
    projections g^H u and h^H u. Returns ``(best, pw, theta, phi)`` with
    ``best = -inf`` when no grid point meets the sensing floor.
    """
    th = _grid(th_lo, th_hi, n_th)
    ph = _grid(ph_lo, ph_hi, n_ph)
    c, s = np.cos(th)[:, None], np.sin(th)[:, None]
    cp, sp = np.cos(ph)[None, :], np.sin(ph)[None, :]
    gain_g = _proj_gain(c, s, cp, sp, complex(gu1), complex(gu2))
    gain_h = _proj_gain(c, s, cp, sp, complex(hu1), complex(hu2))
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = np.where(gain_g > 0, sens_floor / gain_g, np.where(sens_floor > 0, np.inf, pw_lo))
        short = np.isfinite(lower) & (lower * gain_g < sens_floor)
        while np.any(short):
            lower = np.where(short, np.nextafter(lower, np.inf), lower)
            short = np.isfinite(lower) & (lower * gain_g < sens_floor)
    lower = np.maximum(lower, pw_lo)
    usable = lower <= pw_hi
    lower = np.where(usable, lower, pw_lo)[:, :, None]
    if n_pw == 0:
        p = lower
    else:
        p = lower + (pw_hi - lower) * np.arange(n_pw + 1) / n_pw
    sinr = (power - p) * hnorm2 / (noise + p * gain_h[:, :, None])
    ok = usable[:, :, None] & (p * gain_g[:, :, None] >= sens_floor)
    sinr = np.where(ok, sinr, -np.inf)
    flat = int(np.argmax(sinr))
    best = float(sinr.reshape(-1)[flat])
    if best == -np.inf:
        return best, float("nan"), float("nan"), float("nan")
    i, k, j = np.unravel_index(flat, sinr.shape)
    return best, float(p[i, k, j]), float(th[i]), float(ph[k])


def simplex_minmax(table: np.ndarray, n: int):
    """Minimise max_m table[m, k_m] over integer k with sum(k) == n.

    ``table[m, k]`` must be nonincreasing in ``k``. Returns ``(best, k)``; ties
    resolve to the lexicographically first composition.
    """
    table = np.ascontiguousarray(table, dtype=float)
    m = table.shape[0]
    if m == 1:
        return float(table[0, n]), np.array([n], dtype=np.int64)

    best = [np.inf, None]
    k = np.zeros(m, dtype=np.int64)

    def descend(level: int, remaining: int, cur: float) -> None:
        if level == m - 2:
            j = np.arange(remaining + 1)
            vals = np.maximum(np.maximum(table[level, j], table[level + 1, remaining - j]), cur)
            idx = int(np.argmin(vals))
            if vals[idx] < best[0]:
                k[level], k[level + 1] = idx, remaining - idx
                best[0], best[1] = float(vals[idx]), k.copy()
            return
        for j in range(remaining + 1):
            v = max(cur, table[level, j])
            if v >= best[0]:
                continue
            k[level] = j
            descend(level + 1, remaining - j, v)

    descend(0, n, -np.inf)
    return best[0], best[1]
