import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricmirror import corpus
from toricmirror.fan import (
    Cone,
    SupportFunction,
    dual_fan,
    eval_support,
    face_fan,
    fan_from_json,
    from_cones,
    heights_from_json,
    heights_to_json,
    induced_fan,
    moment_polytope,
    mpcp_check,
    mpcs_check,
    psi_kappa,
    regularity_flags,
    sample_generic_heights,
)
from toricmirror.polytope import LatticePolytope, codim_ge2_points, polar_dual

SQUARE_P = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
E = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
OCT = corpus.load("octahedron")
CUBE = corpus.load("cube")


def octant_fan():
    return face_fan(OCT)


def test_dual_fan_of_octahedron():
    sigma = dual_fan(OCT)
    assert set(sigma.rays) == set(CUBE.vertices)
    assert len(sigma.maximal) == 6 and all(len(c.generators) == 4 for c in sigma.maximal)
    mirror = dual_fan(CUBE)
    assert set(mirror.rays) == set(OCT.vertices) and len(mirror.maximal) == 8


def test_dual_fan_of_triangle_dual_is_projective_plane():
    sigma = dual_fan(corpus.load("triangle-dual"))
    assert set(sigma.rays) == {(1, 0), (0, 1), (-1, -1)}
    assert regularity_flags(sigma) == (True, True)


def test_segment_fan():
    f = dual_fan(corpus.load("segment"))
    assert f.rays == [(-1,), (1,)]


def test_regularity_flags():
    assert regularity_flags(octant_fan()) == (True, True)
    f = from_cones(2, [[(1, 0), (1, 2)], [(1, 2), (-1, 0)], [(-1, 0), (0, -1)], [(0, -1), (1, 0)]])
    assert regularity_flags(f) == (True, False)
    assert regularity_flags(dual_fan(OCT)) == (False, False)


def test_induced_fan_square():
    sk = induced_fan(SQUARE_P, {p: 1 for p in SQUARE_P})
    assert len(sk.maximal) == 4
    forms = {tuple(c.sorted_generators()): sk.forms[c] for c in sk.maximal}
    assert forms[((1, -1), (1, 1))] == (1, 0)
    assert forms[((-1, -1), (-1, 1))] == (-1, 0)
    for x in [(3, 1), (-2, 5), (0, -4), (7, 7)]:
        assert psi_kappa(SQUARE_P, {p: 1 for p in SQUARE_P}, x) == max(abs(x[0]), abs(x[1]))


def test_induced_fan_quadrants():
    P = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    sk = induced_fan(P, {p: 1 for p in P})
    assert {frozenset(c.generators) for c in sk.maximal} == {
        frozenset({(1, 0), (0, 1)}),
        frozenset({(0, 1), (-1, 0)}),
        frozenset({(-1, 0), (0, -1)}),
        frozenset({(0, -1), (1, 0)}),
    }


@given(st.fractions(min_value=Fraction(1, 10), max_value=10))
def test_induced_fan_homogeneous(c):
    k1 = {p: 1 for p in SQUARE_P}
    a, b = induced_fan(SQUARE_P, k1), induced_fan(SQUARE_P, {p: c for p in SQUARE_P})
    assert [x.generators for x in a.maximal] == [x.generators for x in b.maximal]
    for x, y in zip(a.maximal, b.maximal):
        assert tuple(c * v for v in a.forms[x]) == b.forms[y]


def test_mpcp_square():
    dual = LatticePolytope.from_points(SQUARE_P)
    sigma = dual_fan(polar_dual(dual))
    sk = induced_fan(SQUARE_P, {p: 1 for p in SQUARE_P})
    assert mpcp_check(sigma, sk, SQUARE_P).ok
    assert mpcs_check(sigma, sk).ok


def test_mpcp_cube_vertices_only_fails():
    P = codim_ge2_points(CUBE)
    verts = list(CUBE.vertices)
    sk = induced_fan(verts, {p: 1 for p in verts})
    res = mpcp_check(dual_fan(OCT), sk, P)
    assert not res.ok and "rays" in {c for c, _ in res.failures}


def test_heights_domain_must_be_P():
    with pytest.raises(ValueError):
        induced_fan(SQUARE_P, {p: 1 for p in SQUARE_P[:3]})


def test_mpcs_rank3_non_unimodular_wall_fails():
    # the 2-cone spanned by e1 and (1,2,0) has multiplicity 2 inside the wall cone(e1, e2)
    v = (1, 2, 0)
    cones = [[E[0], v, E[2]], [v, E[1], E[2]], [E[0], v, (0, 0, -1)], [v, E[1], (0, 0, -1)]]
    for sx in (1, -1):
        for sy in (1, -1):
            if (sx, sy) != (1, 1):
                for sz in (1, -1):
                    cones.append([(sx, 0, 0), (0, sy, 0), (0, 0, sz)])
    sk = from_cones(3, cones)
    assert not mpcs_check(octant_fan(), sk).ok


def test_mpcs_rank4_interior_cone_exempt():
    cross = corpus.load("cross4")
    sigma = face_fan(cross)
    e = [tuple(int(i == j) for j in range(4)) for i in range(4)]
    v = (1, 1, 1, 2)
    cones = []
    for c in sigma.maximal:
        gens = c.sorted_generators()
        if set(gens) == set(e):
            for drop in range(4):
                cones.append([g for k, g in enumerate(e) if k != drop] + [v])
        else:
            cones.append(gens)
    sk = from_cones(4, cones)
    assert not all(c.is_unimodular() for c in sk.maximal)
    assert mpcs_check(sigma, sk).ok


@pytest.mark.parametrize("name", ["triangle", "diamond", "hexagon", "octahedron"])
def test_mpcs_rank_le_3_generic(name):
    delta = corpus.load(name)
    P = codim_ge2_points(polar_dual(delta, strict=True))
    sk = induced_fan(P, sample_generic_heights(P, random.Random(1)))
    assert mpcp_check(dual_fan(delta), sk, P).ok
    assert mpcs_check(dual_fan(delta), sk).ok


def test_eval_support():
    f = octant_fan()
    F = SupportFunction.anticanonical(f)
    assert eval_support(F, f, (2, 3, 0)) == -5
    assert eval_support(F, f, (0, 0, 0)) == 0
    F3 = SupportFunction.anticanonical(f, 3)
    assert all(eval_support(F3, f, r) == -3 for r in f.rays)


@given(st.tuples(*[st.integers(-5, 5)] * 3), st.integers(1, 4))
def test_support_function_homogeneous(x, c):
    f = octant_fan()
    F = SupportFunction.anticanonical(f)
    assert eval_support(F, f, tuple(c * v for v in x)) == c * eval_support(F, f, x)
    assert eval_support(F, f, x) == -sum(abs(v) for v in x)


def test_moment_polytope():
    f = octant_fan()
    assert moment_polytope(f, {r: 1 for r in f.rays}).vertices == CUBE.vertices
    for name in ("triangle", "hexagon", "octahedron"):
        delta = corpus.load(name)
        sigma = dual_fan(delta)
        assert moment_polytope(sigma, {r: 1 for r in sigma.rays}).vertices == delta.vertices


def test_json_round_trips():
    sk = induced_fan(SQUARE_P, {p: Fraction(3, 2) for p in SQUARE_P})
    back = fan_from_json(sk.to_json())
    assert [c.generators for c in back.maximal] == [c.generators for c in sk.maximal]
    assert back.forms == sk.forms
    k = {p: Fraction(i + 1, 3) for i, p in enumerate(SQUARE_P)}
    assert heights_from_json(heights_to_json(k)) == k
    assert heights_to_json(k)["heights"][0]["value"] == "1/3" or "/" in str(heights_to_json(k))


def test_cone_helpers():
    c = Cone.spanned_by([(2, 0), (1, 2)])
    assert c.generators == frozenset({(1, 0), (1, 2)}) and c.multiplicity() == 2 and not c.is_unimodular()
