import csv
import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricmirror import corpus
from toricmirror.tropical import (
    CutoffFamily,
    FloatFaceFan,
    SamplingError,
    TropicalData,
    cyl_section_check,
    cylindrized_gradient,
    fltz_membership,
    mollified_gradient,
    mollified_section_check,
    mollifier_grid,
    star_check,
    _sample_shell,
)

TRI = corpus.load("triangle")
TRI_DATA = TropicalData(TRI)


def test_weights():
    assert TRI_DATA.weights((0, 0)) == (1, -1)
    assert TRI_DATA.weights((1, 0)) == (0, 1)
    assert len(TRI_DATA.monomials) == 4 and (0, 0) in TRI_DATA.monomials


def test_origin_lies_in_bounded_component():
    value, arg = TRI_DATA.trop_max((0, 0))
    assert value == 1 and arg == [(0, 0)]
    assert TRI_DATA.component_of((0, 0)) == (0, 0)


def test_unique_argmax_deep_in_vertex_region():
    assert TRI_DATA.component_of((20.0, -10.0)) == (1, 0)
    assert TRI_DATA.on_amoeba((3.0, 1.0)) is False and TRI_DATA.on_amoeba((1.0, 1.0))
    assert TRI_DATA.on_amoeba((1.0, 0.0))


fractions = st.fractions(min_value=-3, max_value=3, max_denominator=20)


@given(fractions, fractions)
def test_component_matches_exact_membership(a, b):
    # exact oracle: x is in the open bounded region iff <v, x> < 1 at every vertex v
    x = (a, b)
    inside = all(v[0] * a + v[1] * b < 1 for v in TRI.vertices)
    comp = TRI_DATA.component_of([float(a), float(b)])
    if inside and max(v[0] * a + v[1] * b for v in TRI.vertices) < 1 - Fraction(1, 10**6):
        assert comp == (0, 0)
    elif not inside:
        assert comp != (0, 0)


def test_cutoff_family():
    c = CutoffFamily()
    vals = c(np.array([0.0, 0.1, 0.2, 0.3, 1.0]))
    assert vals[0] == 0 and vals[1] == 0 and vals[3] == 1 and vals[4] == 1 and 0 < vals[2] < 1
    with pytest.raises(ValueError):
        CutoffFamily(0.3, 0.1)


def test_h_at_origin():
    h = TRI_DATA.h_c0(np.zeros((1, 2)))[0]
    assert h <= len(TRI_DATA.nonzero) / TRI_DATA.t and h < 1


@settings(max_examples=50)
@given(st.floats(0, 2 * np.pi), st.floats(1.05, 1.5))
def test_h_monotone_in_t_outside(angle, scale):
    d = np.array([[np.cos(angle), np.sin(angle)]])
    x = d * TRI_DATA.ray_exit(d)[0] * scale
    lo, hi = TropicalData(TRI, t=100), TropicalData(TRI, t=400)
    assert hi.h_c0(x)[0] >= lo.h_c0(x)[0] - 1e-12


def test_star_check_projective_plane():
    rep = star_check(TRI_DATA, epsilon=0.05, sample_count=1000)
    assert rep.ok and rep.samples > 0 and rep.witness is None


def test_star_check_small_t_reports():
    try:
        rep = star_check(TropicalData(TRI, t=1.01), sample_count=200)
    except SamplingError:
        return
    assert rep.check == "star" and "min_radial_derivative" in rep.details


def test_star_check_rank3():
    rep = star_check(TropicalData(corpus.load("octahedron")), sample_count=300)
    assert rep.ok


def test_fltz_examples():
    fan = FloatFaceFan(TRI)
    assert fltz_membership(fan, (0, 0), (0.3, 0.7))[0]
    assert fltz_membership(fan, (0.2, 0.3), (0, 0))[0]
    ok, gens = fltz_membership(fan, (2.0, 0.0), (0.5, 0.0))
    assert not ok and gens == [[1, 0]]
    assert fltz_membership(fan, (2.0, 0.0), (0.0, 0.5))[0]


def test_mollified_zero_function():
    rep = mollified_section_check(TRI, {v: 0 for v in TRI.vertices}, sample_count=200)
    assert rep.ok and rep.max_deviation == 0


def test_mollified_linear_function_is_constant():
    m = np.array([2.0, -1.0])
    fan = FloatFaceFan(TRI)
    pieces = fan.pieces({v: Fraction(2 * v[0] - v[1]) for v in TRI.vertices})
    nodes, w = mollifier_grid(2, 0.05)
    us = _sample_shell(np.random.default_rng(0), 50, 2, 0.5, 2.0)
    assert np.allclose(mollified_gradient(fan, pieces, us, nodes, w), m)


def test_mollified_anticanonical():
    rep = mollified_section_check(TRI, sample_count=500)
    assert rep.ok and rep.details["star_checks"] > 0


def test_mollified_rejects_fractional():
    with pytest.raises(ValueError):
        mollified_section_check(TRI, {v: Fraction(1, 2) for v in TRI.vertices}, sample_count=10)


def test_cyl_refuses_zero_offset():
    with pytest.raises(ValueError):
        cyl_section_check(TRI, a=0)


def test_cyl_bound_holds():
    rep = cyl_section_check(TRI, a=0.01, sample_count=500)
    assert rep.ok and rep.details["integral_values"] == 0 and rep.max_deviation <= rep.details["min_slack"] + rep.max_deviation


@settings(max_examples=30)
@given(st.floats(0, 2 * np.pi), st.floats(1.0, 3.0))
def test_cyl_gradient_scale_invariant(angle, r):
    fan = FloatFaceFan(TRI)
    pieces = -0.01 * fan.canonical_pieces()
    nodes, w = mollifier_grid(2, 0.05)
    u = np.array([[np.cos(angle), np.sin(angle)]]) * r
    g1 = cylindrized_gradient(fan, pieces, u, nodes, w)
    g2 = cylindrized_gradient(fan, pieces, 2 * u, nodes, w)
    assert np.allclose(g1, g2, atol=1e-12)


def test_report_exports():
    rep = cyl_section_check(TRI, sample_count=20)
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["u0", "u1", "dG0", "dG1"] and len(rows) == 21
    assert rep.to_json()["check"] == "cylindrized-section"
