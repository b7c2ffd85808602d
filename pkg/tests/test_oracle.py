import math

import numpy as np
import pytest

from dwpoles.oracle import numerov_phase_shift, numerov_solve, quadrature_occupation
from dwpoles.potential import PotentialSpec
from dwpoles.scattering import occupation, phase_shift

from conftest import wrap_pi


def square_well_phase(V, a, E):
    k, K = math.sqrt(2 * E), np.sqrt(complex(2 * (E - V)))
    return (np.arctan((k / K) * np.tan(K * a)).real - k * a) % math.pi


@pytest.mark.parametrize("V,a,E", [(-1.0, 1.0, 0.7), (-3.0, 2.0, 1.5), (0.5, 1.2, 2.2), (2.0, 0.8, 3.0)])
def test_square_well_closed_form(V, a, E):
    spec = PotentialSpec.from_widths([a], [V])
    assert abs(wrap_pi(numerov_phase_shift(spec, E) - square_well_phase(V, a, E))) < 1e-10


def test_free_space_zero():
    spec = PotentialSpec.from_widths([1.5, 0.5], [0.0, 0.0])
    assert abs(wrap_pi(numerov_phase_shift(spec, 2.0))) < 1e-12


def test_fourth_order(default_spec):
    exact = phase_shift(default_spec, 2.3)
    errs = [abs(wrap_pi(numerov_phase_shift(default_spec, 2.3, h) - exact)) for h in (1.6e-2, 8e-3, 4e-3)]
    for coarse, fine in zip(errs, errs[1:]):
        assert coarse / fine == pytest.approx(16, rel=0.15)


def test_step_too_large(default_spec):
    with pytest.raises(ValueError):
        numerov_solve(default_spec, 2.0, 0.3)
    with pytest.raises(ValueError):
        numerov_solve(default_spec, -1.0, 1e-3)


def test_grid_contains_edges(default_spec):
    sol = numerov_solve(default_spec, 2.0, 1e-3)
    for e in default_spec.edges:
        assert np.min(np.abs(sol.x - e)) < 1e-12
    assert sol.psi[0] == 0


@pytest.mark.parametrize("interval", [(0, 1), (3, 4), (1, 3)])
@pytest.mark.parametrize("E", [1.8, 2.4913, 3.2])
def test_quadrature_matches_closed_form(default_spec, interval, E):
    assert quadrature_occupation(default_spec, E, interval) == pytest.approx(
        occupation(default_spec, E, interval), rel=1e-8)


def test_quadrature_empty_and_invalid(default_spec):
    assert quadrature_occupation(default_spec, 2.0, (1.0, 1.0)) == 0.0
    with pytest.raises(ValueError):
        quadrature_occupation(default_spec, 2.0, (1.0, 9.0))
