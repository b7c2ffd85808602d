import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwpoles.potential import (DEFAULT_PARAMS, DoubleWellParams, PotentialSpec, Segment,
                               build_double_well, params_from_spec, segment_at)


def test_default_geometry(default_spec):
    edges = [(s.left_edge, s.right_edge) for s in default_spec.segments]
    assert edges == [(0.0, 1.0), (1.0, 3.0), (3.0, 4.0), (4.0, 4.3)]
    assert list(default_spec.heights) == [0.0, 4.0, 1.04, 4.0]
    assert default_spec.exterior_potential == 0.0


def test_zero_thickness_barrier_drops_segment():
    spec = build_double_well(DoubleWellParams(inner_barrier_thickness=0.0))
    assert len(spec.segments) == 3
    assert list(spec.heights) == [0.0, 1.04, 4.0]
    assert spec.extent == pytest.approx(2.3)


def test_all_zero_heights_is_free_space():
    spec = build_double_well(DoubleWellParams(v1=0, v2=0, v3=0, v4=0))
    assert np.all(spec.heights == 0)


@pytest.mark.parametrize("kwargs", [
    {"x1": 0.0}, {"outer_well_width": -1.0}, {"outer_barrier_width": 0.0},
    {"inner_barrier_thickness": -0.1},
])
def test_rejects_bad_widths(kwargs):
    with pytest.raises(ValueError):
        DoubleWellParams(**kwargs)


def test_segment_invariants():
    with pytest.raises(ValueError):
        Segment(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        PotentialSpec((Segment(0.5, 1.0, 0.0),))
    with pytest.raises(ValueError):
        PotentialSpec((Segment(0.0, 1.0, 0.0), Segment(1.5, 2.0, 1.0)))


def test_segment_at(default_spec):
    assert segment_at(default_spec, 0.5) == (0, 0.0)
    assert segment_at(default_spec, 10.0) == (None, 0.0)
    assert segment_at(default_spec, 1.0) == (0, 0.0)  # right-closed
    assert segment_at(default_spec, 1.0 + 1e-12) == (1, 4.0)
    assert segment_at(default_spec, 0.0) == (0, 0.0)
    assert segment_at(default_spec, 4.3) == (3, 4.0)
    with pytest.raises(ValueError):
        segment_at(default_spec, -0.1)


widths = st.floats(min_value=1e-3, max_value=10.0, allow_nan=False)
heights = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


@given(v=st.lists(heights, min_size=4, max_size=4), x1=widths,
       D=st.floats(min_value=1e-3, max_value=10.0), wo=widths, wb=widths)
def test_round_trip_and_extent(v, x1, D, wo, wb):
    p = DoubleWellParams(*v, x1=x1, inner_barrier_thickness=D,
                         outer_well_width=wo, outer_barrier_width=wb)
    spec = build_double_well(p)
    assert params_from_spec(spec) == p
    assert spec.extent == pytest.approx(x1 + D + wo + wb, rel=1e-14)


def test_config_schema():
    cfg = {"v": [0, 4, 1.03, 4], "x1": 1, "D": 1.5, "w_outer": 1, "w_barrier": 0.3}
    p = DoubleWellParams.from_json(json.dumps(cfg))
    assert p.V == 1.03 and p.D == 1.5
    assert DoubleWellParams.from_config(p.to_config()) == p
    assert DoubleWellParams.from_config({}) == DEFAULT_PARAMS
    with pytest.raises(ValueError):
        DoubleWellParams.from_config({"v": [1, 2]})
    with pytest.raises(ValueError):
        DoubleWellParams.from_config({"depth": 1})


def test_with_param():
    p = DEFAULT_PARAMS.with_param("D", 1.1).with_param("V", 1.03)
    assert (p.D, p.V) == (1.1, 1.03)
    assert DEFAULT_PARAMS.with_param("inner_barrier_height", 5).v2 == 5
    with pytest.raises(ValueError):
        DEFAULT_PARAMS.with_param("x9", 1.0)
