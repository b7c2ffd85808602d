"""Exact scattering solution on a piecewise-constant potential.

The regular solution (psi(0) = 0, psi'(0) = 1) is carried across each
segment with the entire transfer map, so every quantity here is analytic in
the complex energy except through the exterior momentum ``k = sqrt(2E)``,
taken on the principal branch.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import integrate

from . import kernels
from .kernels.transfer_py import entire_cs
from .potential import PotentialSpec, segment_at


def _clean(E):
    # -0.0 imaginary parts would flip sqrt onto the wrong side of the cut
    return np.asarray(E, dtype=complex) + 0.0


def momentum(E, V: float = 0.0):
    """``sqrt(2(E - V))`` on the principal branch (Re K >= 0)."""
    K = np.sqrt(2.0 * (_clean(E) - V) + 0.0j)
    return K[()] if K.ndim == 0 else K


@dataclass(frozen=True)
class BoundaryState:
    psi: complex
    dpsi: complex

    def __post_init__(self):
        if self.psi == 0 and self.dpsi == 0:
            raise ValueError("psi and psi' cannot vanish together")


def _edge(spec: PotentialSpec, E, derivative=False):
    return kernels.transfer(spec.widths, spec.heights, _clean(np.atleast_1d(E)),
                            0.0, 1.0, derivative)


def propagate(spec: PotentialSpec, E: complex) -> BoundaryState:
    """``(psi, psi')`` of the regular solution at the outer edge."""
    out = _edge(spec, E)
    return BoundaryState(complex(out[0, 0]), complex(out[1, 0]))


def _scalar_or_array(values, like):
    return values[0] if np.ndim(like) == 0 else values


def pole_function(spec: PotentialSpec, E):
    """``W(E) = psi'(x4) - i k psi(x4)``: vanishes exactly at S-matrix poles.

    Zero means a purely outgoing exterior wave; in the fourth quadrant the
    principal branch gives Im k < 0, i.e. the resonance sheet.
    """
    psi, dpsi = _edge(spec, E)
    k = momentum(np.atleast_1d(E))
    return _scalar_or_array(dpsi - 1j * k * psi, E)


def pole_function_derivative(spec: PotentialSpec, E):
    """Return ``(W, dW/dE)``, the derivative carried exactly through the
    transfer map."""
    psi, dpsi, psi_e, dpsi_e = _edge(spec, E, derivative=True)
    k = momentum(np.atleast_1d(E))
    W = dpsi - 1j * k * psi
    dW = dpsi_e - 1j * psi / k - 1j * k * psi_e
    return _scalar_or_array(W, E), _scalar_or_array(dW, E)


def s_matrix(spec: PotentialSpec, E):
    """``S(E) = exp(-2ik x4) (psi' + ik psi) / (psi' - ik psi)``.

    Equals ``(1 + i tan d)/(1 - i tan d)`` on the real axis. Returns
    ``inf`` (complex) where the denominator vanishes exactly.
    """
    E = _clean(E)
    if np.any(E == 0):
        raise ValueError("E = 0 is the branch point of the exterior momentum")
    psi, dpsi = _edge(spec, E)
    k = momentum(np.atleast_1d(E))
    num = dpsi + 1j * k * psi
    den = dpsi - 1j * k * psi
    with np.errstate(divide="ignore", invalid="ignore"):
        S = np.where(den == 0, complex(np.inf, np.inf),
                     np.exp(-2j * k * spec.extent) * num / np.where(den == 0, 1, den))
    return _scalar_or_array(S, E)


def _check_real_positive(E):
    E = np.asarray(E, dtype=float)
    if np.any(E <= 0):
        raise ValueError("phase shift needs real E > 0")
    return E


def phase_shift(spec: PotentialSpec, E):
    """Phase shift modulo pi, in ``[0, pi)``, for real E > 0."""
    Er = _check_real_positive(E)
    psi, dpsi = _edge(spec, np.atleast_1d(Er).astype(complex))
    k = np.sqrt(2.0 * np.atleast_1d(Er))
    delta = np.mod(np.arctan2(k * psi.real, dpsi.real) - k * spec.extent, np.pi)
    # values within rounding of pi fold back to 0
    delta = np.where(np.pi - delta < 1e-15, 0.0, delta)
    return _scalar_or_array(delta, E)


def phase_shift_grid(spec: PotentialSpec, energies: Sequence[float]) -> np.ndarray:
    """Phase shift on an energy grid, unwrapped to be continuous; starts in
    ``[0, pi)``."""
    delta = np.atleast_1d(phase_shift(spec, np.asarray(energies, dtype=float)))
    return np.unwrap(2.0 * delta) / 2.0


def recursion_phase_shift(spec: PotentialSpec, E: float) -> complex:
    """Phase shift from chaining the arctangent matching relation.

    ``delta_{i+1} = -K_{i+1} x_{i+1} + atan(K_{i+1}/K_i tan(K_i x_{i+1} + delta_i))``
    with ``delta_0 = 0``. Principal-branch atan throughout, so the result is
    only meaningful modulo pi and only for real E; kept as an independent
    check of :func:`phase_shift`.
    """
    E = float(_check_real_positive(E))
    heights = list(spec.heights) + [0.0]
    edges = list(spec.edges[1:])
    delta = 0.0 + 0.0j
    K_prev = momentum(E, heights[0])
    for i, x in enumerate(edges):
        K_next = momentum(E, heights[i + 1])
        delta = -K_next * x + cmath.atan(K_next / K_prev * cmath.tan(K_prev * x + delta))
        K_prev = K_next
    return delta


def pole_condition(spec: PotentialSpec, E):
    """``abs(1 - i tan delta(E))`` via the S-matrix: ``2 / |1 + S|``."""
    S = s_matrix(spec, E)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.abs(2.0 / (1.0 + S))


# --- wavefunctions -----------------------------------------------------------

def edge_states(spec: PotentialSpec, E: complex) -> np.ndarray:
    """``(psi, psi')`` at every edge, shape ``(nseg + 1, 2)``."""
    states = np.empty((len(spec.segments) + 1, 2), dtype=complex)
    states[0] = 0.0, 1.0
    for i, seg in enumerate(spec.segments):
        out = kernels.transfer([seg.width], [seg.height], _clean([E]),
                               states[i, 0], states[i, 1])
        states[i + 1] = out[0, 0], out[1, 0]
    return states


def _advance(psi0, dpsi0, E, V, t):
    q = 2.0 * (E - V)
    c, S, _ = entire_cs(q * t * t)
    s = t * S
    return psi0 * c + dpsi0 * s, -q * s * psi0 + dpsi0 * c


def wavefunction(spec: PotentialSpec, E: complex, xs, derivative=False):
    """Regular solution at positions *xs* (``psi(0) = 0``, ``psi'(0) = 1``).

    With *derivative* set returns ``(psi, psi')``.
    """
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0):
        raise ValueError("wavefunction is defined on x >= 0")
    E = complex(_clean(E))
    states = edge_states(spec, E)
    edges = spec.edges
    heights = np.append(spec.heights, spec.exterior_potential)
    flat = np.atleast_1d(xs).ravel()
    # right-closed segments: x on an edge belongs to the segment on its left
    idx = np.clip(np.searchsorted(edges, flat, side="left") - 1, 0, len(edges) - 1)
    t = flat - edges[idx]
    psi, dpsi = _advance(states[idx, 0], states[idx, 1], E, heights[idx], t)
    psi = psi.reshape(xs.shape)
    dpsi = dpsi.reshape(xs.shape)
    return (psi, dpsi) if derivative else psi


@dataclass(frozen=True)
class WaveSolution:
    """Per-segment form ``psi = A_i sin(K_i x + delta_i)``.

    Arrays include one trailing entry for the exterior; the exterior phase
    is the phase shift ``delta(E)``.
    """

    energy: complex
    momenta: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray
    left_edges: np.ndarray

    @property
    def phase_shift(self) -> complex:
        return complex(self.phases[-1])

    def evaluate(self, x: float, segment: int) -> complex:
        """psi at *x* using segment *segment*'s own formula (may be any x)."""
        return complex(self.amplitudes[segment] *
                       np.sin(self.momenta[segment] * x + self.phases[segment]))

    def evaluate_derivative(self, x: float, segment: int) -> complex:
        K = self.momenta[segment]
        return complex(self.amplitudes[segment] * K * np.cos(K * x + self.phases[segment]))


def solve(spec: PotentialSpec, E: complex) -> WaveSolution:
    """Amplitudes and phases of the regular solution in every segment.

    Undefined where some ``K_i`` vanishes (E equal to a segment height): the
    solution there is linear, not a sine.
    """
    E = complex(_clean(E))
    states = edge_states(spec, E)
    heights = np.append(spec.heights, spec.exterior_potential)
    lefts = spec.edges
    K = np.array([momentum(E, v) for v in heights])
    if np.any(K == 0):
        raise ValueError("a segment momentum vanishes; sine form undefined")
    psi, dpsi = states[:, 0], states[:, 1]
    A = np.sqrt(psi ** 2 + (dpsi / K) ** 2)
    A = np.where(A == 0, 1.0, A)
    # exp(i theta) = (psi'/K + i psi)/A with theta = K x_left + delta
    theta = -1j * np.log((dpsi / K + 1j * psi) / A)
    phases = theta - K * lefts
    # hard wall: psi = psi'(0) sin(K x) / K exactly; the principal root above
    # can carry the opposite sign with theta = pi
    phases[0] = 0.0
    A[0] = dpsi[0] / K[0]
    return WaveSolution(E, K, A, phases, lefts)


# --- occupation probabilities --------------------------------------------------

def exterior_amplitude(spec: PotentialSpec, E: float) -> float:
    """Amplitude A of the regular solution's exterior form A sin(kx + delta)."""
    psi, dpsi = (v.real for v in _edge(spec, [complex(E)])[:, 0])
    k = math.sqrt(2.0 * E)
    return math.hypot(psi, dpsi / k)


def _closed_sin2(p, q, K, w):
    """Integral over [0, w] of (p cos Kt + (q/K) sin Kt)^2 for real K > 0."""
    b = q / K
    s2 = math.sin(2.0 * K * w) / (4.0 * K)
    return (p * p * (w / 2.0 + s2) + b * b * (w / 2.0 - s2)
            + 2.0 * p * b * math.sin(K * w) ** 2 / (2.0 * K))


def occupation(spec: PotentialSpec, E: float, interval: Tuple[float, float],
               method: str = "auto") -> float:
    """``P = int_a^b |psi|^2 dx`` for real E > 0 with unit exterior amplitude.

    *method* ``"auto"`` uses the closed form wherever the local momentum is
    real and quadrature elsewhere; ``"quad"`` forces quadrature everywhere.
    """
    a, b = (float(v) for v in interval)
    E = float(_check_real_positive(E))
    if not 0 <= a <= b <= spec.extent:
        raise ValueError(f"need 0 <= a <= b <= {spec.extent}, got ({a}, {b})")
    if method not in ("auto", "quad"):
        raise ValueError(f"unknown method {method!r}")
    if a == b:
        return 0.0
    states = edge_states(spec, E).real
    total = 0.0
    for i, seg in enumerate(spec.segments):
        lo, hi = max(a, seg.left_edge), min(b, seg.right_edge)
        if hi <= lo:
            continue
        p0, q0 = states[i]
        if lo > seg.left_edge:
            p0, q0 = (v.real for v in _advance(p0, q0, E, seg.height, lo - seg.left_edge))
        w = hi - lo
        K2 = 2.0 * (E - seg.height)
        if method == "auto" and K2 > 0 and math.sqrt(K2) * w > 1e-3:
            total += _closed_sin2(p0, q0, math.sqrt(K2), w)
        else:
            def integrand(t, p0=p0, q0=q0, v=seg.height):
                return _advance(p0, q0, E, v, t)[0].real ** 2
            total += integrate.quad(integrand, 0.0, w, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return total / exterior_amplitude(spec, E) ** 2


def well_intervals(spec: PotentialSpec) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """``([0, x1], [x2, x3])``: inner and outer well of a double-well spec."""
    s = spec.segments
    if len(s) != 4:
        raise ValueError("well intervals need a four-segment double well")
    return (0.0, s[0].right_edge), (s[2].left_edge, s[2].right_edge)


def occupation_curves(spec: PotentialSpec, energies) -> Tuple[np.ndarray, np.ndarray]:
    """P1(E) over the inner well and P2(E) over the outer well."""
    inner, outer = well_intervals(spec)
    P1 = np.array([occupation(spec, E, inner) for E in energies])
    P2 = np.array([occupation(spec, E, outer) for E in energies])
    return P1, P2


__all__ = [
    "BoundaryState", "WaveSolution", "edge_states", "exterior_amplitude", "momentum",
    "occupation", "occupation_curves", "phase_shift", "phase_shift_grid",
    "pole_condition", "pole_function", "pole_function_derivative", "propagate",
    "recursion_phase_shift", "s_matrix", "segment_at", "solve", "wavefunction",
    "well_intervals",
]
