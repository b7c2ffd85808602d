import numpy as np
from hypothesis import assume, given, settings, strategies as st

from dwpoles.potential import PotentialSpec
from dwpoles.scattering import (phase_shift, pole_function, recursion_phase_shift, s_matrix, solve,
                                wavefunction)

from conftest import wrap_pi

heights = st.floats(-2.0, 5.0)
widths = st.floats(0.1, 1.5)
layers = st.lists(st.tuples(widths, heights), min_size=1, max_size=5)
real_energy = st.floats(0.1, 10.0)


def make(ls):
    return PotentialSpec.from_widths([w for w, _ in ls], [v for _, v in ls])


def off_threshold(ls, E):
    # the sine form and the tangent recursion are singular where E equals a height
    assume(all(abs(E - v) > 1e-6 for _, v in ls))


@given(layers, real_energy)
def test_unitarity(ls, E):
    assert abs(abs(s_matrix(make(ls), E)) - 1) < 1e-10


@given(layers, real_energy)
def test_recursion_agrees(ls, E):
    off_threshold(ls, E)
    spec = make(ls)
    assert abs(wrap_pi(phase_shift(spec, E) - recursion_phase_shift(spec, E).real)) < 1e-10


@given(layers, real_energy)
def test_s_is_exp_two_i_delta(ls, E):
    spec = make(ls)
    assert abs(s_matrix(spec, E) - np.exp(2j * phase_shift(spec, E))) < 1e-10


@given(layers, real_energy, st.floats(-1.0, 0.0))
def test_schwarz_reflection(ls, er, ei):
    # the regular solution is entire in E with real coefficients
    spec = make(ls)
    E = complex(er, ei)
    xs = np.linspace(0, spec.extent, 7)
    a, b = wavefunction(spec, E, xs), wavefunction(spec, E.conjugate(), xs)
    assert np.all(np.abs(np.conj(a) - b) <= 1e-12 * (1 + np.abs(b)))


@given(layers, real_energy)
def test_no_real_axis_zeros(ls, E):
    assert abs(pole_function(make(ls), E)) > 0


@settings(max_examples=50)
@given(layers, real_energy, st.floats(-1.0, 0.0))
def test_edge_continuity(ls, er, ei):
    off_threshold(ls, er)
    spec = make(ls)
    sol = solve(spec, complex(er, ei))
    for i, x in enumerate(spec.edges[1:]):
        for f in (sol.evaluate, sol.evaluate_derivative):
            left, right = f(x, i), f(x, i + 1)
            assert abs(left - right) <= 1e-12 * max(abs(left), abs(right))
