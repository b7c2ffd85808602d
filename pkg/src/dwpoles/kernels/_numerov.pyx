# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Numerov marcher (same contract as numerov_py)."""
import numpy as np

from .numerov_py import segment_steps


def numerov(widths, heights, double energy, double h):
    ws = [float(w) for w in widths if w > 0.0]
    vs = [float(v) for w, v in zip(widths, heights) if w > 0.0]
    counts = segment_steps(ws, h)
    cdef Py_ssize_t total = sum(counts) + 1
    x_arr = np.empty(total)
    psi_arr = np.empty(total)
    cdef double[::1] x = x_arr
    cdef double[::1] psi = psi_arr
    cdef Py_ssize_t k = 0, j, n, seg
    cdef double w, v, hs, u, ts, a, dpsi = 1.0, x0 = 0.0
    cdef double tc1, g, y, diff, comp, t
    x[0] = 0.0
    psi[0] = 0.0
    for seg in range(len(ws)):
        w = ws[seg]
        v = vs[seg]
        n = counts[seg]
        hs = w / n
        u = hs * hs * 2.0 * (energy - v)
        tc1 = -u / 2.0 + u * u / 24.0 - u * u * u / 720.0
        ts = 1.0 - u / 6.0 + u * u / 120.0 - u * u * u / 5040.0
        a = 1.0 + u / 12.0
        g = u / a
        psi[k + 1] = psi[k] * (1.0 + tc1) + hs * dpsi * ts
        x[k + 1] = x0 + hs
        y = a * psi[k + 1]
        diff = y - a * psi[k]
        comp = 0.0
        for j in range(2, n + 1):
            diff -= g * y
            t = y + (diff - comp)
            comp = (t - y) - (diff - comp)
            y = t
            psi[k + j] = y / a
            x[k + j] = x0 + hs * j
        dpsi = (diff / a + psi[k + n] * tc1) / (hs * ts)
        k += n
        x0 += w
        x[k] = x0
    return x_arr, psi_arr, dpsi
