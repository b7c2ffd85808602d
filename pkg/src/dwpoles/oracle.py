"""Brute-force verifiers that share no code with the exact propagation.

Numerov integration on a uniform grid per segment (nodes on every edge),
phase extraction from two exterior samples, Simpson quadrature of the grid
solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import simpson

from . import kernels
from .potential import PotentialSpec


@dataclass(frozen=True)
class GridSolution:
    h: float
    x: np.ndarray
    psi: np.ndarray
    # exterior fit psi = amplitude * sin(k x + phase)
    phase: float
    amplitude: float


def numerov_solve(spec: PotentialSpec, E: float, h: float,
                  breakpoints: Tuple[float, ...] = ()) -> GridSolution:
    """Numerov solution out to a quarter wavelength beyond the outer edge.

    *breakpoints* inside the potential become extra grid nodes.
    """
    if E <= 0:
        raise ValueError("oracle needs real E > 0")
    k = math.sqrt(2.0 * E)
    vmax = max([abs(E - v) for v in spec.heights] + [E])
    if h * math.sqrt(2.0 * vmax) >= 0.5:
        raise ValueError(f"step h={h} too large: need h*K < 0.5 in every segment")

    cuts = sorted({0.0, *spec.edges, *(b for b in breakpoints if 0 < b < spec.extent)})
    heights = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        heights.append(next(s.height for s in spec.segments if s.left_edge <= mid <= s.right_edge))
    widths = list(np.diff(cuts))
    quarter = 0.5 * math.pi / k
    widths.append(quarter)
    heights.append(0.0)

    x, psi, _ = kernels.numerov(widths, heights, E, h)
    # exterior nodes at the outer edge and a quarter wavelength further
    i_a = int(np.argmin(np.abs(x - spec.extent)))
    xa, xb = x[i_a], x[-1]
    pa, pb = psi[i_a], psi[-1]
    phase = math.atan2(pb * math.sin(k * xa) - pa * math.sin(k * xb),
                       pa * math.cos(k * xb) - pb * math.cos(k * xa)) % math.pi
    dk = k * (xb - xa)
    amp = math.sqrt(pa * pa + pb * pb - 2 * pa * pb * math.cos(dk)) / abs(math.sin(dk))
    return GridSolution(h, x, psi, phase, amp)


def numerov_phase_shift(spec: PotentialSpec, E: float, h: float = 1e-4) -> float:
    """Phase shift modulo pi, in ``[0, pi)``; error O(h^4)."""
    phase = numerov_solve(spec, E, h).phase
    return 0.0 if math.pi - phase < 1e-15 else phase


def _grid_occupation(spec, E, a, b, h):
    sol = numerov_solve(spec, E, h, breakpoints=(a, b))
    x, psi = sol.x, sol.psi / sol.amplitude
    total = 0.0
    # Simpson segment by segment, so each piece has uniform spacing
    cuts = sorted({0.0, *spec.edges, a, b})
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if lo < a or hi > b:
            continue
        i0 = int(np.argmin(np.abs(x - lo)))
        i1 = int(np.argmin(np.abs(x - hi)))
        # the breakpoint node appears once; keep the run strictly inside
        total += simpson(psi[i0:i1 + 1] ** 2, x=x[i0:i1 + 1])
    return total


def quadrature_occupation(spec: PotentialSpec, E: float, interval: Tuple[float, float],
                          tolerance: float = 1e-8, h: float = 2e-3) -> float:
    """Occupation on *interval* from the Numerov grid, halving the step until
    two successive Simpson estimates agree to *tolerance* (relative)."""
    a, b = (float(v) for v in interval)
    if not 0 <= a <= b <= spec.extent:
        raise ValueError(f"need 0 <= a <= b <= {spec.extent}, got ({a}, {b})")
    if a == b:
        return 0.0
    prev = _grid_occupation(spec, E, a, b, h)
    for _ in range(12):
        h /= 2.0
        cur = _grid_occupation(spec, E, a, b, h)
        if abs(cur - prev) <= tolerance * max(abs(cur), 1e-300):
            # Richardson step for the O(h^4) scheme
            return cur + (cur - prev) / 15.0
        prev = cur
    raise RuntimeError("quadrature occupation did not reach the requested tolerance")


__all__ = ["GridSolution", "numerov_phase_shift", "numerov_solve", "quadrature_occupation"]
