"""Complex zeros of the pole function: Newton refinement, grid seeding and
argument-principle counting."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage, optimize

from .potential import PotentialSpec
from .scattering import pole_function, pole_function_derivative

log = logging.getLogger(__name__)

DEDUPE_DISTANCE = 1e-9
PAIR_DISTANCE = 1e-3
MULTIPLICITY_RADIUS = 1e-6


class ConvergenceError(RuntimeError):
    """Newton (and its simplex fallback) did not converge."""

    def __init__(self, message, last_iterate):
        super().__init__(message)
        self.last_iterate = last_iterate


class ContourError(ValueError):
    """A zero of W lies on, or too close to, the contour."""


class PoleCountMismatch(RuntimeError):
    """Roots found disagree with the argument-principle count."""

    def __init__(self, message, found, expected):
        super().__init__(message)
        self.found = found
        self.expected = expected


@dataclass(frozen=True)
class Pole:
    energy: complex
    order: int = 1
    residual: float = 0.0

    @property
    def e_r(self) -> float:
        return self.energy.real

    @property
    def gamma(self) -> float:
        return -2.0 * self.energy.imag

    def __repr__(self):
        return (f"Pole({self.energy.real:.10g}{self.energy.imag:+.10g}j, "
                f"order={self.order}, residual={self.residual:.2e})")


@dataclass(frozen=True)
class SearchRegion:
    """Rectangle ``re_range x im_range`` below the real axis."""
    re_range: Tuple[float, float] = (1.0, 4.0)
    im_range: Tuple[float, float] = (-1.0, 0.0)
    density: float = 40.0

    def __post_init__(self):
        lo, hi = self.re_range
        ilo, ihi = self.im_range
        if not 0 < lo < hi:
            raise ValueError(f"need 0 < E_min < E_max, got {self.re_range}")
        if not ilo < ihi <= 0:
            raise ValueError(f"need im_min < im_max <= 0, got {self.im_range}")
        if self.density <= 0:
            raise ValueError("grid density must be positive")

    @property
    def rectangle(self) -> "Rectangle":
        return Rectangle(self.re_range[0], self.re_range[1], self.im_range[0], self.im_range[1])

    def contains(self, E: complex) -> bool:
        return (self.re_range[0] < E.real < self.re_range[1]
                and self.im_range[0] < E.imag < self.im_range[1])


# --- contours ------------------------------------------------------------------

@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __call__(self, t):
        """Counter-clockwise boundary point at parameter ``t`` in [0, 1)."""
        t = np.asarray(t, dtype=float)
        w, h = self.re_max - self.re_min, self.im_max - self.im_min
        s = (t % 1.0) * 2 * (w + h)
        z0 = complex(self.re_min, self.im_min)
        return np.select(
            [s < w, s < w + h, s < 2 * w + h],
            [z0 + s, complex(self.re_max, self.im_min) + 1j * (s - w),
             complex(self.re_max, self.im_max) - (s - w - h)],
            complex(self.re_min, self.im_max) - 1j * (s - 2 * w - h),
        )

    @property
    def corners(self):
        # parameters of the four corners, so that sampling hits them exactly
        w, h = self.re_max - self.re_min, self.im_max - self.im_min
        p = 2 * (w + h)
        return [0.0, w / p, (w + h) / p, (2 * w + h) / p]

    def contains(self, E):
        return self.re_min < E.real < self.re_max and self.im_min < E.imag < self.im_max


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __call__(self, t):
        return self.center + self.radius * np.exp(2j * np.pi * np.asarray(t, dtype=float))

    @property
    def corners(self):
        return [0.0, 0.25, 0.5, 0.75]

    def contains(self, E):
        return abs(E - self.center) < self.radius


Contour = Union[Rectangle, Circle]


def _phase_step(w0, w1):
    return float(np.angle(w1 / w0))


def winding_count(spec: PotentialSpec, contour: Contour, *, fn: Optional[Callable] = None,
                  initial: int = 64, max_dphase: float = 0.3, max_depth: int = 40,
                  zero_threshold: float = 1e-12) -> int:
    """Number of zeros of W inside *contour*, counted with multiplicity.

    Tracks the phase of W along the boundary, bisecting any piece whose phase
    increment exceeds *max_dphase* or whose halves disagree with the whole.
    Raises :class:`ContourError` when a zero sits on (or numerically at) the
    contour.
    """
    f = fn or (lambda E: pole_function(spec, E))
    knots = sorted(set(np.linspace(0.0, 1.0, initial, endpoint=False)) | set(contour.corners))
    ts = np.array(knots + [1.0])
    values = np.atleast_1d(f(contour(ts)))
    scale = np.median(np.abs(values))
    if not np.all(np.isfinite(values)):
        raise ContourError("W is not finite on the contour")

    total = 0.0
    stack = [(ts[i], ts[i + 1], values[i], values[i + 1], 0) for i in range(len(ts) - 1)][::-1]
    while stack:
        t0, t1, w0, w1, depth = stack.pop()
        if min(abs(w0), abs(w1)) < zero_threshold * scale:
            raise ContourError(f"|W| vanishes on the contour near {complex(contour(t0))}")
        tm = 0.5 * (t0 + t1)
        wm = complex(np.atleast_1d(f(contour(np.array([tm]))))[0])
        whole = _phase_step(w0, w1)
        halves = _phase_step(w0, wm) + _phase_step(wm, w1)
        if abs(whole) <= max_dphase and abs(halves - whole) < 1e-9:
            total += whole
            continue
        if depth >= max_depth:
            raise ContourError(
                f"phase of W unresolved near {complex(contour(t0))}: zero on or too near the contour")
        stack.append((tm, t1, wm, w1, depth + 1))
        stack.append((t0, tm, w0, wm, depth + 1))

    n = total / (2 * np.pi)
    count = int(round(n))
    if abs(n - count) >= 0.25:
        raise ContourError(f"winding number {n} not near an integer")
    return count


# --- refinement ----------------------------------------------------------------

def local_scale(spec: PotentialSpec, E: complex, radius: float = 1e-2) -> float:
    """Mean |W| on a small ring around E; the yardstick for a small |W|."""
    ring = E + radius * np.exp(0.5j * np.pi * np.arange(4))
    return float(np.mean(np.abs(pole_function(spec, ring))))


def _deflated(spec, roots):
    roots = list(roots)

    def fdf(E):
        W, dW = pole_function_derivative(spec, E)
        W, dW = complex(W), complex(dW)
        # d/dE of W / prod(E - r) via the logarithmic derivative
        g = W
        logd = 0.0
        for r in roots:
            if E == r:
                return complex(math.inf), dW
            g /= (E - r)
            logd += 1.0 / (E - r)
        return g, (dW / W - logd) * g if W != 0 else dW
    return fdf


def _newton(fdf, guess, maxiter, tol_step, tol_f):
    E = complex(guess)
    best = (math.inf, E)
    stall = 0
    for it in range(maxiter):
        g, dg = fdf(E)
        ag = abs(g)
        if ag < best[0]:
            best = (ag, E)
            stall = 0
        else:
            stall += 1
        if not (np.isfinite(ag) and np.isfinite(abs(dg))) or dg == 0:
            return None, best[1], it
        step = g / dg
        # damp steps longer than 0.25 to stay in the basin
        if abs(step) > 0.25:
            step *= 0.25 / abs(step)
        E = E - step
        if E.real <= 0:
            return None, best[1], it
        if abs(step) < tol_step * (1 + abs(E)):
            return E, E, it
        if ag <= tol_f and stall >= 3:
            return best[1], best[1], it  # noise floor reached
    return None, best[1], maxiter


def refine(spec: PotentialSpec, guess: complex, *, deflate: Sequence[complex] = (),
           maxiter: int = 100, tol_step: float = 1e-12, rel_tol: float = 1e-10) -> Pole:
    """Newton on W from *guess*, with a Nelder-Mead fallback on |W|^2.

    With *deflate* the iteration runs on ``W(E) / prod(E - r)`` so the
    listed roots repel it.
    """
    guess = complex(guess)
    fdf = _deflated(spec, deflate)
    tol_f = rel_tol * local_scale(spec, guess)
    root, last, _ = _newton(fdf, guess, maxiter, tol_step, tol_f)
    if root is None:
        log.debug("newton failed from %s; trying simplex", guess)

        def obj(xy):
            g, _ = fdf(complex(xy[0], xy[1]))
            return abs(g) ** 2

        res = optimize.minimize(obj, [last.real, last.imag], method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-30, "maxiter": 2000})
        root, last, _ = _newton(fdf, complex(*res.x), maxiter, tol_step, tol_f)
    if root is None:
        raise ConvergenceError(f"no convergence from {guess}", last)
    W = complex(pole_function(spec, root))
    scale = local_scale(spec, root)
    if not abs(W) <= rel_tol * scale:
        raise ConvergenceError(
            f"|W|={abs(W):.3e} not below {rel_tol:g} x local scale {scale:.3e} at {root}", root)
    return Pole(root, 1, abs(W))


# --- region search -------------------------------------------------------------

def grid_seeds(spec: PotentialSpec, region: SearchRegion, density: Optional[float] = None,
               fn: Optional[Callable] = None) -> List[complex]:
    """Local minima of |W| on a uniform grid over *region*."""
    density = density or region.density
    (a, b), (c, d) = region.re_range, region.im_range
    nx = max(3, int(math.ceil((b - a) * density)) + 1)
    ny = max(3, int(math.ceil((d - c) * density)) + 1)
    re = np.linspace(a, b, nx)
    im = np.linspace(c, d, ny)
    Z = re[None, :] + 1j * im[:, None]
    f = fn or (lambda E: pole_function(spec, E))
    A = np.abs(f(Z.ravel())).reshape(Z.shape)
    mins = (A == ndimage.minimum_filter(A, size=3, mode="nearest")) & np.isfinite(A)
    return [complex(z) for z in Z[mins]]


def _dedupe(poles: List[Pole]) -> List[Pole]:
    out: List[Pole] = []
    for p in sorted(poles, key=lambda p: (p.energy.real, p.energy.imag)):
        if all(abs(p.energy - q.energy) >= DEDUPE_DISTANCE for q in out):
            out.append(p)
    return out


def _refine_many(spec, seeds, deflate=(), threads=None):
    def one(seed):
        try:
            return refine(spec, seed, deflate=deflate)
        except ConvergenceError as exc:
            log.debug("seed %s skipped: %s", seed, exc)
            return None
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    return [p for p in results if p is not None]


def classify_order(spec: PotentialSpec, E: complex) -> int:
    """Multiplicity from the winding count of a radius-1e-6 circle."""
    return winding_count(spec, Circle(E, MULTIPLICITY_RADIUS))


def find_poles(spec: PotentialSpec, region: SearchRegion = SearchRegion(), *,
               density: Optional[float] = None, threads: Optional[int] = None) -> List[Pole]:
    """All S-matrix poles strictly inside *region*, sorted by real part.

    The total order always equals the argument-principle count of the region
    boundary; otherwise :class:`PoleCountMismatch` is raised.
    """
    expected = winding_count(spec, region.rectangle)
    if expected == 0:
        return []
    seeds = grid_seeds(spec, region, density)
    poles = [p for p in _refine_many(spec, seeds, threads=threads) if region.contains(p.energy)]
    poles = _dedupe(poles)

    # hunt for roots hidden behind found ones (close pairs, double roots)
    for _ in range(3):
        if len(poles) >= expected:
            break
        known = [p.energy for p in poles]
        # start just beside each known root, where a hidden partner would sit
        nudged = [r + PAIR_DISTANCE * (0.1 - 0.1j) for r in known]
        extra = _refine_many(spec, seeds + nudged, deflate=known, threads=threads)
        extra = [p for p in extra if region.contains(p.energy)]
        if not _dedupe(poles + extra)[len(poles):]:
            break
        poles = _dedupe(poles + extra)

    poles = _merge_multiple(spec, poles)
    if sum(p.order for p in poles) < expected:
        # a deflated run that keeps landing on a known root means a multiple root
        poles = [Pole(p.energy, _safe_order(spec, p.energy), p.residual) for p in poles]
    total = sum(p.order for p in poles)
    if total != expected:
        raise PoleCountMismatch(
            f"found {total} roots (with multiplicity), contour count is {expected}",
            poles, expected)
    return sorted(poles, key=lambda p: p.energy.real)


def _safe_order(spec, E):
    try:
        return max(1, classify_order(spec, E))
    except ContourError:
        return 1


def _merge_multiple(spec, poles):
    """Collapse clusters that a tiny circle counts as one multiple root."""
    out: List[Pole] = []
    used = set()
    for i, p in enumerate(poles):
        if i in used:
            continue
        cluster = [j for j in range(i + 1, len(poles))
                   if j not in used and abs(poles[j].energy - p.energy) < PAIR_DISTANCE]
        if cluster:
            centre = np.mean([poles[j].energy for j in [i] + cluster])
            try:
                n = classify_order(spec, complex(centre))
            except ContourError:
                n = 1
            if n == len(cluster) + 1 and n > 1:
                used.update(cluster)
                out.append(Pole(complex(centre), n, abs(complex(pole_function(spec, centre)))))
                continue
        out.append(p)
    return out


__all__ = [
    "Circle", "ContourError", "ConvergenceError", "Pole", "PoleCountMismatch", "Rectangle",
    "SearchRegion", "classify_order", "find_poles", "grid_seeds", "local_scale", "refine",
    "winding_count",
]
