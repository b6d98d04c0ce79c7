from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricmirror import corpus
from toricmirror.fan import dual_fan, induced_fan
from toricmirror.linalg import group_index, rank
from toricmirror.mirror import (
    analyze,
    component_count,
    connectedness_condition,
    forbidden_characteristics,
    kappa_shift,
    obstruction_kernel,
    span_rank,
)
from toricmirror.polytope import LatticePolytope, codim_ge2_points, lattice_points, polar_dual

SQUARE_P = [(1, 1), (1, -1), (-1, 1), (-1, -1)]


def test_forbidden_primes_square():
    sk = induced_fan(SQUARE_P, {p: 1 for p in SQUARE_P})
    forb = forbidden_characteristics(sk, SQUARE_P)
    assert set(forb) == {2}
    assert any("index 2" in s for s in forb[2])


def test_forbidden_primes_projective_plane_empty():
    P = [(1, 0), (0, 1), (-1, -1)]
    assert forbidden_characteristics(induced_fan(P, {p: 1 for p in P}), P) == {}


def test_forbidden_rejects_non_simplicial():
    cube = corpus.load("cube")
    verts = list(cube.vertices)
    with pytest.raises(ValueError):
        forbidden_characteristics(induced_fan(verts, {p: 1 for p in verts}), verts)


def test_connectedness_examples():
    # the square as the polytope carrying P: its polar has unit edges
    sq = corpus.load("square")
    assert connectedness_condition(polar_dual(sq), sq).ok
    cube = corpus.load("cube")
    assert connectedness_condition(polar_dual(cube), cube).ok


def test_connectedness_violation_reports_edges():
    res = connectedness_condition(corpus.load("square"), corpus.load("diamond"))
    assert not res.ok and len(res.violations) == 4


def test_connectedness_rank3_corpus_scan():
    # no bundled rank-3 polytope has an edge and dual edge both with interior points
    for name in corpus.names():
        d = corpus.load(name)
        if d.rank == 3:
            assert connectedness_condition(d, polar_dual(d)).ok


def test_component_counts():
    # facet-interior point of the polar: dual face is a vertex
    tri = corpus.load("triangle")
    dual = polar_dual(tri)
    assert component_count((1, 0), dual, tri) == 0
    # vertex of the small triangle whose dual edge carries two interior points
    big = corpus.load("triangle-dual")
    small = polar_dual(big)
    assert sorted(component_count(p, small, big) for p in small.vertices) == [2, 2, 2]
    # rank 4: vertex of the tesseract is dual to a 3-dimensional facet
    cross = corpus.load("cross4")
    tess = polar_dual(cross)
    assert component_count(tess.vertices[0], tess, cross) == 1


def test_component_count_errors():
    tri = corpus.load("triangle")
    with pytest.raises(ValueError):
        component_count((0, 0), polar_dual(tri), tri)
    with pytest.raises(ValueError):
        component_count((5, 5), polar_dual(tri), tri)


def test_kappa_shift_rank1():
    shifted, lam = kappa_shift({(1,): 1, (-1,): 1}, (1,))
    assert shifted == {(-1,): 2, (1,): 0} and lam == (-1,)


def test_kappa_shift_square():
    shifted, lam = kappa_shift({p: 1 for p in SQUARE_P}, (1, 1))
    assert lam == (Fraction(-1, 2), Fraction(-1, 2))
    assert [shifted[q] for q in [(1, 1), (1, -1), (-1, 1), (-1, -1)]] == [0, 1, 1, 2]


@given(st.lists(st.integers(1, 9), min_size=4, max_size=4), st.sampled_from(SQUARE_P))
def test_kappa_shift_property(hs, p):
    kappa = {q: Fraction(h, 3) for q, h in zip(SQUARE_P, hs)}
    try:
        shifted, lam = kappa_shift(kappa, p)
    except ValueError:
        return
    assert shifted[p] == 0 and all(v > 0 for q, v in shifted.items() if q != p)
    for q in SQUARE_P:
        assert shifted[q] - kappa[q] == sum(a * b for a, b in zip(lam, q))


def test_obstruction_kernel_examples():
    assert obstruction_kernel(SQUARE_P, 2)[1] == 0
    assert obstruction_kernel([(1, 0)], 2)[1] == 0
    # over GF(2) the square's P spans a line; Lambda^2 of the plane still contracts nontrivially
    assert obstruction_kernel(SQUARE_P, 2, prime=2)[1] == 0


@pytest.mark.parametrize("name", [n for n in corpus.names() if corpus.load(n).rank >= 2])
def test_obstruction_kernel_matches_rank_formula(name):
    d = corpus.load(name)
    P = list(codim_ge2_points(polar_dual(d, strict=True)))
    n = d.rank
    assert obstruction_kernel(P, n)[1] == 0
    for q in (2, 3, 5):
        assert obstruction_kernel(P, n, q)[1] == comb(n - span_rank(P, q), 2)


def test_analyze_report():
    rep = analyze(corpus.load("triangle-dual"))
    j = rep.to_json()
    assert j["mpcp"]["ok"] and j["connectedness"]["ok"] is False
    assert [e["divisor"] for e in j["monomial_divisor"]] == ["D_(-1,-1)", "D_(0,1)", "D_(1,0)"]


@given(st.lists(st.integers(1, 9), min_size=4, max_size=4), st.sampled_from(SQUARE_P))
def test_kappa_shift_keeps_subdivision(hs, p):
    kappa = {q: Fraction(h, 3) for q, h in zip(SQUARE_P, hs)}
    try:
        shifted, _ = kappa_shift(kappa, p)
        after = induced_fan(SQUARE_P, shifted)
    except ValueError:
        return
    before = induced_fan(SQUARE_P, kappa)
    assert {c.generators for c in before.maximal} == {c.generators for c in after.maximal}


UNIMODULAR = [
    [[1, 0], [0, 1]],
    [[1, 1], [0, 1]],
    [[0, -1], [1, 0]],
    [[2, 1], [1, 1]],
    [[1, -2], [1, -1]],
]


def _component_sum(delta):
    dual = polar_dual(delta, strict=True)
    total = 0
    for p in lattice_points(dual):
        if any(p):
            try:
                total += component_count(p, dual, delta)
            except ValueError:
                continue
    return total


@pytest.mark.parametrize("name", ["triangle", "triangle-dual", "square", "hexagon", "diamond"])
@pytest.mark.parametrize("g", UNIMODULAR)
def test_component_sum_invariant(name, g):
    delta = corpus.load(name)
    moved = LatticePolytope.from_points(
        [tuple(sum(g[i][j] * v[j] for j in range(2)) for i in range(2)) for v in delta.vertices]
    )
    assert _component_sum(moved) == _component_sum(delta)
