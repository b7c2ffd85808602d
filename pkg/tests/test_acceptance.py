"""Exit criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import time

import numpy as np
import pytest

from dwpoles.continuation import SweepSpec, classify_regimes, find_double_pole, track, unfolding_exponent
from dwpoles.oracle import numerov_phase_shift
from dwpoles.poles import Circle, SearchRegion, find_poles, winding_count
from dwpoles.potential import DEFAULT_PARAMS, build_double_well
from dwpoles.scattering import (occupation, phase_shift, recursion_phase_shift, s_matrix, solve,
                                well_intervals)

from conftest import ACCEPTANCE_RESULTS, random_spec, wrap_pi


def record(n, title, checks):
    ok = all(v for v, _ in checks.values())
    detail = "; ".join(f"{k}={'ok' if v else 'FAIL'} ({d})" for k, (v, d) in checks.items())
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} :: {detail}"
    ACCEPTANCE_RESULTS.append(line)
    print(line)
    return ok


def seeds_at(params):
    return find_poles(build_double_well(params))


def test_criterion_1_pole_doublet():
    t0 = time.perf_counter()
    poles = find_poles(build_double_well(DEFAULT_PARAMS))
    elapsed = time.perf_counter() - t0
    targets = [2.49 - 0.00394j, 2.43 - 0.309j]
    checks = {"count": (len(poles) == 2, f"{len(poles)} poles")}
    for i, target in enumerate(targets, 1):
        p = min(poles, key=lambda q: abs(q.energy - target)) if poles else None
        if p is None:
            checks[f"E{i}"] = (False, "missing")
            continue
        half = -target.imag
        ok = (abs(p.e_r - target.real) <= 0.005
              and abs(-p.energy.imag - half) <= max(1e-5, 0.005 * half))
        checks[f"E{i}"] = (ok, f"{p.energy:.6f}")
    checks["runtime"] = (elapsed < 5, f"{elapsed:.2f}s < 5s")
    assert record(1, "pole doublet", checks)


def test_criterion_2_transition():
    t0 = time.perf_counter()
    trajs = track(DEFAULT_PARAMS, SweepSpec("D", 2.0, 0.0, 0.01), seeds_at(DEFAULT_PARAMS))
    report = classify_regimes(trajs)
    elapsed = time.perf_counter() - t0
    if report is None:
        assert record(2, "transition location", {"transition": (False, "none found")})
    a, b = trajs
    values = np.array(a.values)
    dE = np.abs(a.energies.real - b.energies.real)
    dG = np.abs(np.array([p.gamma for p in a.poles]) - [p.gamma for p in b.poles])
    D0 = report.transition_parameter_value
    above, below = values > D0, values < D0
    # along decreasing D: |dGamma| shrinks toward D0 from above, |dE_r| grows below it
    slope_g = np.polyfit(values[above], dG[above], 1)[0]
    slope_e = np.polyfit(values[below], dE[below], 1)[0]
    checks = {
        "location": (abs(D0 - 1.1) <= 0.05, f"D={D0}"),
        "widths converge for D>1.1": (slope_g > 0, f"d|dGamma|/dD={slope_g:.3f}"),
        "real parts repel for D<1.1": (slope_e < 0, f"d|dE_r|/dD={slope_e:.3f}"),
        "regimes": (report.regime_before == "resonant_tunneling" and report.regime_after == "level_repulsion",
                    f"{report.regime_before} -> {report.regime_after}"),
        "runtime": (elapsed < 60, f"{elapsed:.2f}s < 60s"),
    }
    assert record(2, "transition location", checks)


def test_criterion_3_identity_swap():
    def endpoints(params):
        trajs = track(params, SweepSpec("D", 2.0, 0.2, 0.01), seeds_at(params))
        narrow = int(np.argmin([t.poles[0].gamma for t in trajs]))
        return trajs[narrow].at(0.2).energy, trajs[1 - narrow].at(0.2).energy, trajs[narrow].poles[0].gamma

    n103, _, g103 = endpoints(DEFAULT_PARAMS.with_param("V", 1.03))
    n104, b104, g104 = endpoints(DEFAULT_PARAMS)
    d_other, d_own = abs(n103 - b104), abs(n103 - n104)
    checks = {
        "narrow seeds": (abs(g103 - 0.008) < 0.002 and abs(g104 - 0.008) < 0.002,
                         f"Gamma {g103:.4f}, {g104:.4f}"),
        "swap": (d_other < d_own, f"|n103-b104|={d_other:.4f} < |n103-n104|={d_own:.4f}"),
    }
    assert record(3, "identity swap", checks)


def test_criterion_4_double_pole():
    t0 = time.perf_counter()
    r = find_double_pole(DEFAULT_PARAMS, ((0.9, 1.3), (1.02, 1.05)))
    checks = {"converged": (r.converged, r.message or f"D*={r.p1:.6f} V*={r.p2:.6f} E*={r.energy:.6f}")}
    if r.converged:
        spec = build_double_well(DEFAULT_PARAMS.with_param("D", r.p1).with_param("V", r.p2))
        w = winding_count(spec, Circle(r.energy, 1e-6))
        checks["in box"] = (0.9 <= r.p1 <= 1.3 and 1.02 <= r.p2 <= 1.05, f"({r.p1:.4f}, {r.p2:.4f})")
        checks["winding"] = (w == 2, f"{w}")
        # +-delta for delta from 1e-3 down by halving
        exponent, _ = unfolding_exponent(DEFAULT_PARAMS, r)
        checks["unfolding"] = (abs(exponent - 0.5) <= 0.05, f"exponent {exponent:.4f}")
    elapsed = time.perf_counter() - t0
    checks["runtime"] = (elapsed < 120, f"{elapsed:.2f}s < 120s")
    assert record(4, "double pole", checks)


def _occupancy(D):
    params = DEFAULT_PARAMS.with_param("D", D)
    spec = build_double_well(params)
    inner, outer = well_intervals(spec)
    E = np.linspace(1.5, 3.5, 2000)
    P1 = np.array([occupation(spec, e, inner) for e in E])
    P2 = np.array([occupation(spec, e, outer) for e in E])
    poles = find_poles(spec, SearchRegion((1.0, 4.5), (-1.0, 0.0)))
    lo = min(p.e_r for p in poles) - max(p.gamma for p in poles) / 2
    hi = max(p.e_r for p in poles) + max(p.gamma for p in poles) / 2
    window = (E >= lo) & (E <= hi)
    steps = abs(int(np.argmax(P1)) - int(np.argmax(P2)))
    r = np.corrcoef(P1[window], P2[window])[0, 1]
    return steps, r, (lo, hi)


def test_criterion_5_occupancy():
    s15, r15, w15 = _occupancy(1.5)
    s05, r05, w05 = _occupancy(0.5)
    checks = {
        "D=1.5 maxima apart": (s15 > 5, f"{s15} steps"),
        "D=0.5 maxima coincide": (s05 <= 5, f"{s05} steps"),
        "D=1.5 corr<0": (r15 < 0, f"r={r15:.3f} on [{w15[0]:.3f}, {w15[1]:.3f}]"),
        "D=0.5 corr>0": (r05 > 0, f"r={r05:.3f} on [{w05[0]:.3f}, {w05[1]:.3f}]"),
    }
    assert record(5, "occupancy regimes", checks)


def test_criterion_6_properties():
    rng = np.random.default_rng(20261014)
    t0 = time.perf_counter()
    checks = {}

    worst = 0.0
    for _ in range(200):
        spec = random_spec(rng)
        worst = max(worst, abs(abs(s_matrix(spec, rng.uniform(0.1, 10))) - 1))
    checks["unitarity"] = (worst < 1e-10, f"max dev {worst:.1e}")

    worst = 0.0
    for _ in range(200):
        spec = random_spec(rng)
        E = rng.uniform(0.1, 10)
        worst = max(worst, abs(float(wrap_pi(phase_shift(spec, E) - recursion_phase_shift(spec, E).real))))
    checks["recursion"] = (worst < 1e-10, f"max dev {worst:.1e}")

    worst = 0.0
    for _ in range(50):
        spec = random_spec(rng)
        E = rng.uniform(0.1, 10)
        worst = max(worst, abs(float(wrap_pi(phase_shift(spec, E) - numerov_phase_shift(spec, E, 1e-4)))))
    checks["numerov"] = (worst < 1e-8, f"max dev {worst:.1e}")

    bad = []
    for _ in range(20):
        params = DEFAULT_PARAMS.with_param("D", rng.uniform(0.2, 2.0)).with_param("V", rng.uniform(1.0, 1.06))
        re = np.sort(rng.uniform(1.0, 4.5, 2))
        im = np.sort(rng.uniform(-1.0, 0.0, 2))
        region = SearchRegion(tuple(re), (im[0], im[1]))
        spec = build_double_well(params)
        n = winding_count(spec, region.rectangle)
        total = sum(p.order for p in find_poles(spec, region))
        if n != total:
            bad.append((region, n, total))
    checks["winding"] = (not bad, f"{20 - len(bad)}/20 regions")

    worst = 0.0
    for _ in range(100):
        spec = random_spec(rng)
        E = complex(rng.uniform(0.1, 10), rng.uniform(-1, 0))
        sol = solve(spec, E)
        for i, x in enumerate(spec.edges[1:]):
            for f in (sol.evaluate, sol.evaluate_derivative):
                left, right = f(x, i), f(x, i + 1)
                worst = max(worst, abs(left - right) / max(abs(left), abs(right)))
    checks["continuity"] = (worst < 1e-12, f"max rel {worst:.1e}")

    worst = 0.0
    for V in (1.03, 1.04):
        params = DEFAULT_PARAMS.with_param("V", V)
        down = track(params, SweepSpec("D", 2.0, 1.4, 0.01), seeds_at(params))
        up = track(params.with_param("D", 1.4), SweepSpec("D", 1.4, 2.0, 0.01), [t.poles[-1] for t in down])
        for a, b in zip(down, up):
            for v in SweepSpec("D", 2.0, 1.4, 0.01).nominal_values():
                worst = max(worst, abs(a.at(v).energy - b.at(v).energy))
    checks["reversibility"] = (worst < 1e-8, f"max dev {worst:.1e}")

    elapsed = time.perf_counter() - t0
    checks["runtime"] = (elapsed < 120, f"{elapsed:.2f}s < 120s")
    assert record(6, "property suites", checks)
