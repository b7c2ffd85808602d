"""Pole trajectories under parameter sweeps, regime classification and the
double-pole (coalescence) search."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .poles import (Circle, ContourError, ConvergenceError, Pole, Rectangle, SearchRegion,
                    find_poles, refine, winding_count)
from .potential import SWEEP_PARAMETERS, DoubleWellParams, build_double_well
from .scattering import pole_function, pole_function_derivative

log = logging.getLogger(__name__)

JUMP_THRESHOLD = 0.1
COLLISION_DISTANCE = 1e-9

RESONANT_TUNNELING = "resonant_tunneling"
LEVEL_REPULSION = "level_repulsion"


class TrackingError(RuntimeError):
    """A trajectory could not be continued even at the minimum step."""

    def __init__(self, message, value, predictions, winding=None):
        super().__init__(message)
        self.value = value
        self.predictions = predictions
        self.winding = winding


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    initial_step: float = 0.01
    min_step: float = 1e-6

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if not self.min_step > 0 or not self.initial_step > 0:
            raise ValueError("steps must be positive")
        if self.min_step > self.initial_step:
            raise ValueError("min_step exceeds initial_step")

    @property
    def direction(self) -> float:
        return math.copysign(1.0, self.stop - self.start)

    def nominal_values(self) -> np.ndarray:
        """Grid ``start, start +- step, ...`` ending exactly at ``stop``."""
        span = abs(self.stop - self.start)
        n = int(math.ceil(span / self.initial_step - 1e-9))
        if n == 0:
            return np.array([self.start])
        values = self.start + self.direction * np.minimum(np.arange(n + 1) * self.initial_step, span)
        # strip accumulated rounding so grid values print as typed (2 - 19*0.1 -> 0.1)
        values = np.round(values, 12)
        values[-1] = self.stop
        return values


@dataclass
class Trajectory:
    label: str
    values: List[float] = field(default_factory=list)
    poles: List[Pole] = field(default_factory=list)
    flags: List[Tuple[float, str]] = field(default_factory=list)

    def append(self, value: float, pole: Pole) -> None:
        self.values.append(float(value))
        self.poles.append(pole)

    @property
    def energies(self) -> np.ndarray:
        return np.array([p.energy for p in self.poles])

    def at(self, value: float, tol: float = 1e-12) -> Pole:
        for v, p in zip(self.values, self.poles):
            if abs(v - value) <= tol * max(1.0, abs(value)):
                return p
        raise KeyError(value)

    def restricted(self, values: Sequence[float]) -> "Trajectory":
        """Copy holding only the points at *values*."""
        out = Trajectory(self.label, flags=list(self.flags))
        for v in values:
            out.append(v, self.at(v))
        return out


@dataclass(frozen=True)
class TransitionReport:
    transition_parameter_value: float
    regime_before: str
    regime_after: str
    min_pole_gap: float
    # growth rates of |dE_r| and |dGamma| moving away from the transition
    slopes_before: Tuple[float, float] = (0.0, 0.0)
    slopes_after: Tuple[float, float] = (0.0, 0.0)


def _spec(params, parameter, value):
    return build_double_well(params.with_param(parameter, value))


def _correct(spec, predictions, deflate_pairs=False):
    """Refine each prediction; on a collision recover both via deflation."""
    poles = []
    for z in predictions:
        poles.append(refine(spec, z))
    collided = False
    for i in range(len(poles)):
        for j in range(i):
            if abs(poles[i].energy - poles[j].energy) < COLLISION_DISTANCE:
                collided = True
                if deflate_pairs:
                    poles[i] = refine(spec, predictions[i], deflate=[poles[j].energy])
    return poles, collided


def _predict(hist_v, hist_z, value):
    if len(hist_v) < 2:
        return hist_z[-1]
    v0, v1 = hist_v[-2], hist_v[-1]
    z0, z1 = hist_z[-2], hist_z[-1]
    return z1 + (z1 - z0) * (value - v1) / (v1 - v0)


def _acceptable(predictions, poles, jump):
    """Reject corrections that move too far or land nearer another track."""
    for i, (z, p) in enumerate(zip(predictions, poles)):
        move = abs(p.energy - z)
        if move > jump:
            return False
        others = [abs(z - predictions[j]) for j in range(len(predictions)) if j != i]
        if others and move > 0.5 * min(others):
            return False
    return True


def track(params: DoubleWellParams, sweep: SweepSpec, seeds: Sequence[Pole], *,
          jump_threshold: float = JUMP_THRESHOLD,
          labels: Optional[Sequence[str]] = None) -> List[Trajectory]:
    """Predictor-corrector continuation of *seeds* from ``sweep.start`` to
    ``sweep.stop``.

    Every nominal grid value appears in each trajectory; extra points are
    inserted wherever the step had to be halved. Identity follows
    connectivity only.
    """
    labels = list(labels) if labels else [f"pole{i}" for i in range(len(seeds))]
    trajs = [Trajectory(lab) for lab in labels]
    for t, s in zip(trajs, seeds):
        t.append(sweep.start, s)
    nominal = sweep.nominal_values()
    v_cur = float(nominal[0])
    for target in nominal[1:]:
        step = abs(target - v_cur)
        while abs(target - v_cur) > 1e-14:
            v_next = v_cur + sweep.direction * min(step, abs(target - v_cur))
            if abs(v_next - target) < 1e-12:
                v_next = float(target)
            preds = [_predict(t.values, list(t.energies), v_next) for t in trajs]
            spec = _spec(params, sweep.parameter, v_next)
            at_floor = step <= sweep.min_step * (1 + 1e-9)
            try:
                poles, collided = _correct(spec, preds, deflate_pairs=at_floor)
            except ConvergenceError:
                poles, collided = None, False
            ok = (poles is not None and _acceptable(preds, poles, jump_threshold)
                  and (not collided or at_floor))
            if ok and collided:
                for t in trajs:
                    t.flags.append((v_next, "near-degeneracy"))
            if ok:
                for t, p in zip(trajs, poles):
                    t.append(v_next, p)
                v_cur = v_next
                step = min(2 * step, abs(target - v_cur)) if abs(target - v_cur) > 0 else step
                continue
            if at_floor:
                raise TrackingError(
                    f"cannot continue {sweep.parameter} past {v_cur} at min step "
                    f"{sweep.min_step}; contour: {_diagnose(spec, preds)}", v_next, preds,
                    _diagnose(spec, preds))
            step = max(step / 2, sweep.min_step)
    return trajs


def _diagnose(spec, preds):
    lo = min(z.real for z in preds) - 0.2
    hi = max(z.real for z in preds) + 0.2
    ilo = min(z.imag for z in preds) - 0.2
    try:
        return winding_count(spec, Rectangle(max(lo, 1e-3), hi, ilo, 0.0))
    except ContourError as exc:
        return f"contour failed: {exc}"


def pole_gap(trajectories: Sequence[Trajectory]) -> Tuple[np.ndarray, np.ndarray]:
    """Parameter values and complex-plane distance between two trajectories."""
    a, b = trajectories
    if a.values != b.values:
        raise ValueError("trajectories must share a parameter grid")
    return np.array(a.values), np.abs(a.energies - b.energies)


def _window_slope(x, y):
    if len(x) < 2:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def classify_regimes(trajectories: Sequence[Trajectory], window: int = 5) -> Optional[TransitionReport]:
    """Locate the resonant-tunneling / level-repulsion boundary.

    The transition sits at the smallest complex-plane gap between the two
    poles. On each side, if the spread of real parts grows away from the
    transition faster than the spread of widths, that side is level
    repulsion; otherwise resonant tunneling. Returns ``None`` when the gap
    has no interior minimum.
    """
    if len(trajectories) != 2:
        raise ValueError(f"need exactly two trajectories, got {len(trajectories)}")
    values, gap = pole_gap(trajectories)
    i = int(np.argmin(gap))
    if i == 0 or i == len(gap) - 1:
        return None
    a, b = trajectories
    dE = np.abs(a.energies.real - b.energies.real)
    dG = np.abs(np.array([p.gamma for p in a.poles]) - np.array([p.gamma for p in b.poles]))
    dist = np.abs(values - values[i])

    def side(sl):
        gE = _window_slope(dist[sl], dE[sl])
        gG = _window_slope(dist[sl], dG[sl])
        return (LEVEL_REPULSION if gE > gG else RESONANT_TUNNELING), (gE, gG)

    before, s_before = side(slice(max(0, i - window + 1), i + 1))
    after, s_after = side(slice(i, min(len(values), i + window)))
    if before == after:
        return None
    return TransitionReport(float(values[i]), before, after, float(gap[i]), s_before, s_after)


# --- double pole ------------------------------------------------------------------

@dataclass
class DoublePoleResult:
    converged: bool
    p1: float
    p2: float
    energy: complex
    parameters: Tuple[str, str] = ("D", "V")
    winding: Optional[int] = None
    residual: Tuple[float, float] = (math.nan, math.nan)
    min_gap: float = math.nan
    iterations: int = 0
    message: str = ""

    def to_dict(self) -> Dict:
        return {
            "converged": self.converged,
            self.parameters[0]: self.p1,
            self.parameters[1]: self.p2,
            "E_r": self.energy.real,
            "E_i": self.energy.imag,
            "Gamma": -2.0 * self.energy.imag,
            "winding": self.winding,
            "residual_W": self.residual[0],
            "residual_dW": self.residual[1],
            "min_gap": self.min_gap,
            "iterations": self.iterations,
            "message": self.message,
        }


def _connectivity(params, p1, p2, p2_value, p1_range, seeds, step):
    """Track the two seeds across *p1_range* at fixed p2.

    Returns ``(sign, trajectories)``; *sign* is +1 when the narrower seed
    ends at the higher real part.
    """
    base = params.with_param(p2, p2_value)
    hi, lo = p1_range[1], p1_range[0]
    spec = _spec(base, p1, hi)
    start = [refine(spec, s.energy) for s in seeds]
    sweep = SweepSpec(p1, hi, lo, step, step * 1e-4)
    trajs = track(base, sweep, start)
    narrow = int(np.argmin([p.gamma for p in start]))
    end = [t.poles[-1].energy.real for t in trajs]
    sign = 1 if end[narrow] > end[1 - narrow] else -1
    return sign, trajs


def _closest_pair(poles):
    best = None
    for i in range(len(poles)):
        for j in range(i):
            d = abs(poles[i].energy - poles[j].energy)
            if best is None or d < best[0]:
                best = (d, [poles[j], poles[i]])
    return None if best is None else best[1]


def find_double_pole(params: DoubleWellParams, box: Tuple[Tuple[float, float], Tuple[float, float]] = ((0.9, 1.3), (1.02, 1.05)),
                     *, parameters: Tuple[str, str] = ("D", "V"),
                     region: SearchRegion = SearchRegion(), seeds: Optional[Sequence[Pole]] = None,
                     sweep_step: float = 0.005, bisections: int = 6,
                     maxiter: int = 50) -> DoublePoleResult:
    """Coalescence point of two poles inside *box* = (p1 range, p2 range).

    The start-side pair (largest p1, both ends of the p2 range) must show
    swapped connectivity; bisection in p2 then narrows the swap and Newton on
    ``W = dW/dE = 0`` in (Re E, Im E, p1, p2) finishes.
    """
    p1, p2 = parameters
    (a1, b1), (a2, b2) = box
    fail = DoublePoleResult(False, math.nan, math.nan, complex(math.nan, math.nan), parameters)

    if seeds is None:
        try:
            found = find_poles(_spec(params.with_param(p2, 0.5 * (a2 + b2)), p1, b1), region)
        except Exception as exc:  # noqa: BLE001 - report any search failure
            fail.message = f"pole search at the box edge failed: {exc}"
            return fail
        pair = _closest_pair(found)
        if pair is None:
            fail.message = f"fewer than two poles in {region} at {p1}={b1}"
            return fail
        seeds = pair

    best = {"gap": math.inf}

    def probe(v):
        s, trajs = _connectivity(params, p1, p2, v, (a1, b1), seeds, sweep_step)
        vals, gap = pole_gap(trajs)
        i = int(np.argmin(gap))
        if gap[i] < best["gap"]:
            mid = 0.5 * (trajs[0].energies[i] + trajs[1].energies[i])
            best.update(gap=float(gap[i]), p1=float(vals[i]), p2=v, E=complex(mid))
        return s

    try:
        s_lo, s_hi = probe(a2), probe(b2)
    except (TrackingError, ConvergenceError) as exc:
        fail.message = f"tracking failed: {exc}"
        return fail
    if s_lo == s_hi:
        fail.min_gap = best["gap"]
        fail.message = "no connectivity swap across the box: no double pole bracketed"
        return fail
    lo, hi = a2, b2
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        try:
            s_mid = probe(mid)
        except (TrackingError, ConvergenceError):
            break
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid

    result = solve_double_pole(params, parameters, best["E"], best["p1"], best["p2"], maxiter=maxiter)
    result.min_gap = best["gap"]
    if result.converged and not (a1 <= result.p1 <= b1 and a2 <= result.p2 <= b2):
        result.converged = False
        result.message = "Newton converged outside the search box"
    if result.converged:
        spec = _spec(params.with_param(p2, result.p2), p1, result.p1)
        try:
            result.winding = winding_count(spec, Circle(result.energy, 1e-6))
        except ContourError as exc:
            result.winding = None
            result.message = f"winding check failed: {exc}"
        if result.winding != 2:
            result.converged = False
            result.message = result.message or f"winding count {result.winding}, expected 2"
    return result


def _double_pole_residual(params, parameters, x):
    E = complex(x[0], x[1])
    base = params.with_param(parameters[0], x[2]).with_param(parameters[1], x[3])
    W, dW = pole_function_derivative(build_double_well(base), E)
    return np.array([W.real, W.imag, dW.real, dW.imag]), complex(W), complex(dW)


def solve_double_pole(params: DoubleWellParams, parameters: Tuple[str, str], E0: complex,
                      p1_0: float, p2_0: float, *, maxiter: int = 50,
                      fd_step: float = 1e-6, tol: float = 1e-13) -> DoublePoleResult:
    """Newton on the four real equations ``W = 0``, ``dW/dE = 0``.

    The Jacobian is by central differences in all four unknowns.
    """
    x = np.array([E0.real, E0.imag, p1_0, p2_0], dtype=float)
    F, W, dW = _double_pole_residual(params, parameters, x)
    it = 0
    for it in range(1, maxiter + 1):
        J = np.empty((4, 4))
        for j in range(4):
            e = np.zeros(4)
            e[j] = fd_step
            J[:, j] = (_double_pole_residual(params, parameters, x + e)[0]
                       - _double_pole_residual(params, parameters, x - e)[0]) / (2 * fd_step)
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        # backtracking on the residual norm
        lam = 1.0
        norm0 = np.linalg.norm(F)
        while lam > 1e-4:
            xn = x + lam * dx
            try:
                Fn, Wn, dWn = _double_pole_residual(params, parameters, xn)
            except ValueError:
                lam /= 2
                continue
            if np.linalg.norm(Fn) < norm0 or lam * np.linalg.norm(dx) < tol:
                break
            lam /= 2
        x, F, W, dW = xn, Fn, Wn, dWn
        if lam * np.linalg.norm(dx) < tol * (1 + np.linalg.norm(x)):
            break
    converged = bool(np.linalg.norm(F) < 1e-9)
    return DoublePoleResult(converged, float(x[2]), float(x[3]), complex(x[0], x[1]), parameters,
                            residual=(abs(W), abs(dW)), iterations=it,
                            message="" if converged else "Newton did not reach the residual tolerance")


def split_roots(params: DoubleWellParams, result: DoublePoleResult, delta: float,
                which: str = "p2") -> Tuple[complex, complex]:
    """The two simple roots near E* after shifting one parameter by *delta*.

    Starting guesses come from ``W ~ W_p delta + W_EE (E - E*)^2 / 2``.
    """
    p1, p2 = result.parameters
    base = params.with_param(p1, result.p1).with_param(p2, result.p2)
    name = p2 if which == "p2" else p1
    v0 = base.get(name)
    E0 = result.energy
    h = 1e-6
    Wp = (pole_function(_spec(base, name, v0 + h), E0) - pole_function(_spec(base, name, v0 - h), E0)) / (2 * h)
    spec0 = build_double_well(base)
    dWp = pole_function_derivative(spec0, E0 + h)[1]
    dWm = pole_function_derivative(spec0, E0 - h)[1]
    Wee = (dWp - dWm) / (2 * h)
    r = np.sqrt(-2.0 * Wp * delta / Wee)
    spec = _spec(base, name, v0 + delta)
    a = refine(spec, E0 + r).energy
    try:
        b = refine(spec, E0 - r, deflate=[a]).energy
    except ConvergenceError:
        b = refine(spec, E0 - r).energy
    return a, b


def unfolding_exponent(params: DoubleWellParams, result: DoublePoleResult,
                       deltas: Sequence[float] = (1e-3, 5e-4, 2.5e-4, 1.25e-4),
                       which: str = "p2") -> Tuple[float, List[Tuple[float, float]]]:
    """Fit ``separation ~ |delta|^p`` over +-deltas; returns ``(p, samples)``."""
    samples = []
    for d in deltas:
        for sgn in (1.0, -1.0):
            a, b = split_roots(params, result, sgn * d, which)
            samples.append((d, abs(a - b)))
    x = np.log([s[0] for s in samples])
    y = np.log([s[1] for s in samples])
    return float(np.polyfit(x, y, 1)[0]), samples


__all__ = [
    "DoublePoleResult", "LEVEL_REPULSION", "RESONANT_TUNNELING", "SweepSpec", "Trajectory",
    "TrackingError", "TransitionReport", "classify_regimes", "find_double_pole", "pole_gap",
    "solve_double_pole", "split_roots", "track", "unfolding_exponent",
]
