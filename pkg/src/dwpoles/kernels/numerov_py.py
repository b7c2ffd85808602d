"""Pure-Python Numerov marcher for piecewise-constant potentials.

Deliberately shares nothing with the transfer-matrix code: within each
segment the Numerov three-point recurrence is used, and at every edge the
march restarts from a Taylor-polynomial estimate of psi'. Reference for the
compiled ``_numerov.pyx``.
"""
import math

import numpy as np


def segment_steps(widths, h):
    """Even node counts per segment so that nodes land on every edge."""
    counts = []
    for w in widths:
        n = max(2, math.ceil(w / h - 1e-9))
        counts.append(n + (n % 2))
    return counts


def numerov(widths, heights, energy, h):
    """Integrate ``-psi''/2 + V psi = E psi`` from a hard wall at x = 0.

    Returns ``(x, psi, dpsi_end)``: the node positions, the real solution
    with ``psi(0) = 0``, ``psi'(0) = 1``, and the estimated ``psi'`` at the
    last node.
    """
    pairs = [(float(w), float(v)) for w, v in zip(widths, heights) if w > 0.0]
    widths = [w for w, _ in pairs]
    heights = [v for _, v in pairs]
    counts = segment_steps(widths, h)
    total = sum(counts) + 1
    x = np.empty(total)
    psi = np.empty(total)
    x[0] = 0.0
    psi[0] = 0.0
    dpsi = 1.0
    k = 0
    x0 = 0.0
    for w, v, n in zip(widths, heights, counts):
        hs = w / n
        u = hs * hs * 2.0 * (energy - v)
        tc1 = -u / 2.0 + u * u / 24.0 - u ** 3 / 720.0  # Taylor cos - 1
        ts = 1.0 - u / 6.0 + u * u / 120.0 - u ** 3 / 5040.0
        a = 1.0 + u / 12.0
        g = u / a
        psi[k + 1] = psi[k] * (1.0 + tc1) + hs * dpsi * ts
        # summed form in y = a*psi: diff_j = y_{j+1} - y_j, diff_j = diff_{j-1} - g*y_j;
        # y accumulated with Kahan compensation (roundoff O(eps/h), not O(eps/h^2))
        y = a * psi[k + 1]
        diff = y - a * psi[k]
        comp = 0.0
        for j in range(2, n + 1):
            diff -= g * y
            t = y + (diff - comp)
            comp = (t - y) - (diff - comp)
            y = t
            psi[k + j] = y / a
        x[k + 1:k + n + 1] = x0 + hs * np.arange(1, n + 1)
        # psi(x_n - h) = psi_n (1 + tc1) - h psi'_n ts, using the last difference
        dpsi = (diff / a + psi[k + n] * tc1) / (hs * ts)
        k += n
        x0 += w
        x[k] = x0
    return x, psi, dpsi
