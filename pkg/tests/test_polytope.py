from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricmirror import corpus
from toricmirror.polytope import (
    LatticePolytope,
    carrier_face,
    codim_ge2_points,
    face_lattice,
    is_reflexive,
    lattice_points,
    polar_dual,
    polygon_normal_form,
    reflexive_polygon_census,
)


def poly(*pts):
    return LatticePolytope.from_points(pts)


TRI = poly((1, 0), (0, 1), (-1, -1))
TRI_DUAL = poly((2, -1), (-1, 2), (-1, -1))
SQUARE = poly((1, 1), (1, -1), (-1, 1), (-1, -1))
CUBE = LatticePolytope.from_points([(a, b, c) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)])
OCT = poly((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def test_polar_dual_examples():
    assert polar_dual(poly((1, 0), (-1, 0), (0, 1), (0, -1))).vertices == SQUARE.vertices
    seg = LatticePolytope.from_points([(-1,), (1,)])
    assert polar_dual(seg).vertices == seg.vertices
    assert polar_dual(TRI).vertices == TRI_DUAL.vertices
    assert polar_dual(OCT).vertices == CUBE.vertices


def test_polar_dual_rational():
    big = poly((2, 0), (0, 2), (-2, -2))
    assert not is_reflexive(big)
    assert not polar_dual(big).is_lattice
    assert all(Fraction(x).denominator in (1, 2) for v in polar_dual(big).vertices for x in v)


def test_reflexive_examples():
    assert is_reflexive(TRI) and is_reflexive(OCT)


def test_lattice_points():
    assert set(lattice_points(TRI)) == {(0, 0), (1, 0), (0, 1), (-1, -1)}
    pts = lattice_points(TRI_DUAL)
    assert len(pts) == 10
    assert sum(1 for p in pts if pts.carriers[p].dim < 2) == 9
    assert len(lattice_points(CUBE)) == 27


def test_face_lattice_interior_counts():
    faces = face_lattice(TRI_DUAL)
    edge = next(f for f in faces if f.dim == 1 and {TRI_DUAL.vertices[i] for i in f.vertices} == {(2, -1), (-1, 2)})
    assert edge.interior_points == 2
    assert all(f.interior_points == 1 for f in faces if f.dim == 0)
    assert next(f for f in faces if f.dim == 2).interior_points == 1


def test_codim_ge2_points():
    assert set(codim_ge2_points(SQUARE)) == set(SQUARE.vertices)
    assert len(codim_ge2_points(CUBE)) == 20
    assert len(codim_ge2_points(LatticePolytope.from_points([(-1,), (1,)]))) == 0


def test_carrier_face():
    assert carrier_face((0, 0), TRI_DUAL).dim == 2
    f = carrier_face((1, 0), TRI_DUAL)
    assert f.dim == 1 and {TRI_DUAL.vertices[i] for i in f.vertices} == {(2, -1), (-1, 2)}
    g = carrier_face((1, 1), SQUARE)
    assert g.dim == 0 and {SQUARE.vertices[i] for i in g.vertices} == {(1, 1)}


@pytest.mark.parametrize("name", corpus.names())
def test_corpus_involution(name):
    d = corpus.load(name)
    assert is_reflexive(d)
    assert polar_dual(polar_dual(d, strict=True), strict=True).vertices == d.vertices


@pytest.mark.parametrize("name", corpus.names())
def test_face_lattice_euler(name):
    # Euler relation sum (-1)^i f_i = 1 - (-1)^n over proper nonempty faces
    d = corpus.load(name)
    f = [0] * d.rank
    for face in d.faces:
        if 0 <= face.dim < d.rank:
            f[face.dim] += 1
    assert sum((-1) ** i * c for i, c in enumerate(f)) == 1 - (-1) ** d.rank


def test_census_sixteen():
    census = reflexive_polygon_census(3)
    assert len(census) == 16
    assert sum(len(lattice_points(p)) - 1 for p in census) == sum(
        len(lattice_points(polar_dual(p))) - 1 for p in census
    )  # boundary counts pair up as 12 under duality


unimodular = st.sampled_from([((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (0, 1)), ((1, 0), (-1, 1)), ((2, 1), (1, 1))])


@given(st.lists(unimodular, min_size=1, max_size=3))
def test_normal_form_invariant(mats):
    verts = list(TRI_DUAL.vertices)
    for a, b in mats:
        verts = [(a[0] * x + b[0] * y, a[1] * x + b[1] * y) for x, y in verts]
    image = LatticePolytope.from_points(verts)
    assert _nf(image) == _nf(TRI_DUAL)


def _nf(p):
    import math

    cx = sum(v[0] for v in p.vertices) / len(p.vertices)
    cy = sum(v[1] for v in p.vertices) / len(p.vertices)
    ccw = sorted(p.vertices, key=lambda v: math.atan2(v[1] - cy, v[0] - cx))
    return polygon_normal_form(ccw)


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=3, max_size=8))
def test_lattice_points_contained(pts):
    try:
        p = LatticePolytope.from_points(pts)
    except ValueError:
        return
    if p.rank != 2 or len(p.vertices) < 3:
        return
    for q in lattice_points(p):
        assert p.contains(q)


def test_json_round_trip(tmp_path):
    path = tmp_path / "p.json"
    TRI_DUAL.save(path)
    assert LatticePolytope.load(path) == TRI_DUAL
    with pytest.raises(ValueError):
        LatticePolytope.from_json({"rank": 2, "vertices": [[0, 0], [1, 0], [0, 1], [1, 1], [0, 0]][:3] + [[1, 2, 3]]})
