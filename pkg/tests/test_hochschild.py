import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricmirror import corpus
from toricmirror.hochschild import (
    AInfinityStructure,
    CategoryError,
    Cochain,
    FormalDiffeomorphism,
    GradedCategory,
    NotAInfinity,
    boundary_category,
    check_ainfinity,
    functor_defect,
    gerstenhaber_bracket,
    gerstenhaber_product,
    graded_hh_rank,
    hochschild_differential,
    mu_cd,
    obstruction_cocycle,
    point_category,
    product_at_slow,
    projective_line_category,
    pushforward_structure,
    random_cochain,
    random_diffeomorphism,
    selftest,
    solve_coboundary,
    sphere_category,
    trivial_structure,
)

P1 = projective_line_category()
S1 = sphere_category(1)
S2 = sphere_category(2)
BT = boundary_category(corpus.load("triangle"), [0])


def identity_cochain(cat: GradedCategory) -> Cochain:
    return Cochain(cat, 1, {(x, ((y, i),)): {i: 1} for (x, y), ms in cat.homs.items() for i in range(len(ms))})


def test_length_zero_insertion():
    psi = Cochain(S2, 2, {(0, ()): {1: 1}})
    phi = Cochain(S2, 1, {(0, ((0, 1),)): {1: 5}})
    assert gerstenhaber_product(phi, psi).table == {(0, ()): {1: 5}}


def test_zero_arguments():
    phi = random_cochain(P1, 2, [1, 2], random.Random(0), 0.8)
    assert gerstenhaber_product(phi, Cochain.zero(P1, 1)).is_zero()
    assert gerstenhaber_product(Cochain.zero(P1, 3), phi).is_zero()


def test_mu_cd_associator_vanishes():
    for cat in (P1, S1, S2, BT):
        assert check_ainfinity(mu_cd(cat), 4)
        m = mu_cd(cat)
        assert gerstenhaber_bracket(m, m).is_zero()


def test_differential_of_identity_hand_expansion():
    # all degrees vanish: d(phi)(a1, a2) = a2.phi(a1) + phi(a2).a1 - phi(a2.a1), which is a2.a1 for phi = id
    d = hochschild_differential(mu_cd(P1), identity_cochain(P1))
    expect = {k: v for k, v in mu_cd(P1).table.items()}
    assert d.table == expect


def test_differential_of_weight_derivation_vanishes():
    # scaling each arrow by its auxiliary weight is a derivation
    table = {}
    for (x, y), ms in P1.homs.items():
        for i, m in enumerate(ms):
            if sum(m.aux):
                table[(x, ((y, i),))] = {i: sum(m.aux)}
    phi = Cochain(P1, 1, table)
    assert hochschild_differential(mu_cd(P1), phi).is_zero()


def test_bracket_even_degree_doubles():
    rng = random.Random(3)
    phi = random_cochain(S2, 2, [1, 2], rng, 0.9)
    assert gerstenhaber_bracket(phi, phi) == gerstenhaber_product(phi, phi).scale(2)


def test_non_ainfinity_rejected():
    rng = random.Random(1)
    bad = mu_cd(S1) + random_cochain(S1, 2, [3], rng, 1.0)
    assert not check_ainfinity(bad, 4)
    with pytest.raises(NotAInfinity):
        hochschild_differential(bad, random_cochain(S1, 1, [1], rng, 1.0))
    assert check_ainfinity(Cochain.zero(S1, 2), 4)


def test_pushforward_identity_gauge():
    mu = trivial_structure(S1, 4)
    pushed = pushforward_structure(FormalDiffeomorphism.identity(S1), mu)
    assert pushed.cochain == mu.cochain


@pytest.mark.parametrize("seed", range(5))
def test_pushforward_leading_order(seed):
    rng = random.Random(seed)
    F = random_diffeomorphism(S1, [2], rng, 0.9)
    mu = trivial_structure(S1, 4)
    pushed = pushforward_structure(F, mu)
    assert not functor_defect(F, mu, pushed, 4)
    diff = pushed.component(3) - mu.component(3)
    assert diff == gerstenhaber_bracket(mu_cd(S1), F.higher.component(2), 3).component(3).scale(-1)


@pytest.mark.parametrize("seed", range(3))
def test_pushforward_composes(seed):
    rng = random.Random(seed)
    cap = 4
    F = random_diffeomorphism(BT, [2, 3], rng, 0.5)
    G = random_diffeomorphism(BT, [2, 3], rng, 0.5)
    mu = trivial_structure(BT, cap)
    lhs = pushforward_structure(F.compose(G, cap), mu)
    rhs = pushforward_structure(F, pushforward_structure(G, mu))
    assert lhs.cochain == rhs.cochain


def test_curved_functor_rejected():
    with pytest.raises(CategoryError):
        FormalDiffeomorphism(S1, Cochain(S1, 1, {(0, ()): {1: 1}}))


def test_obstruction_equal_structures():
    mu = trivial_structure(S1, 4)
    res = obstruction_cocycle(mu, mu, 3, solve_primitive=True)
    assert res.cocycle.is_zero() and res.is_cocycle


@pytest.mark.parametrize("seed", range(10))
def test_obstruction_of_gauge_is_coboundary(seed):
    rng = random.Random(seed)
    cat = [S1, BT][seed % 2]
    F = random_diffeomorphism(cat, [2], rng, 0.7)
    mu = trivial_structure(cat, 4)
    res = obstruction_cocycle(mu, pushforward_structure(F, mu), 3, solve_primitive=True)
    assert res.is_cocycle and res.is_coboundary
    assert gerstenhaber_bracket(mu_cd(cat), res.primitive).component(3) == res.cocycle


def test_obstruction_guards():
    mu = trivial_structure(S1, 4)
    bad = AInfinityStructure(S1, mu_cd(S1) + random_cochain(S1, 2, [3], random.Random(2), 1.0), 4)
    with pytest.raises(ValueError):
        obstruction_cocycle(mu, bad, 3)
    with pytest.raises(ValueError):
        obstruction_cocycle(mu, mu, 2)


def test_hh_rank_point_category():
    pt = point_category()
    assert graded_hh_rank(pt, (0, 0), 2).rank == 1
    assert graded_hh_rank(pt, (1, 0), 2).rank == 0


def test_hh_rank_empty_slice():
    r = graded_hh_rank(S2, (0, 5), 2)
    assert r.rank == 0 and r.dims == (0, 0, 0)


def test_hh_rank_boundary_slice():
    cat = boundary_category(corpus.load("triangle"), [0, 1])
    r = graded_hh_rank(cat, (1, -2), 4)
    assert r.rank == 0 and r.exact and "does not prove" in r.caveat
    with pytest.raises(ValueError):
        graded_hh_rank(cat, (2, -2), 4)


def test_boundary_category_shapes():
    cat = boundary_category(corpus.load("triangle"), [0, 1])
    assert not cat.check()
    assert len(cat.hom(0, 1)) == 9 and len(cat.hom(1, 0)) == 9
    assert [m.degree for m in cat.hom(0, 0)] == [0, 1]


def test_category_json_round_trip(tmp_path):
    path = tmp_path / "cat.json"
    P1.save(path)
    back = GradedCategory.load(path)
    assert back.to_json() == P1.to_json()


CATS = [P1, S1, S2, BT]


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.sampled_from(range(len(CATS))), st.integers(0, 3), st.integers(0, 3))
def test_fast_product_matches_slow(seed, ci, d1, d2):
    cat = CATS[ci]
    rng = random.Random(seed)
    phi = random_cochain(cat, d1, [1, 2, 3], rng, 0.5)
    psi = random_cochain(cat, d2, [0, 1, 2], rng, 0.5)
    fast = gerstenhaber_product(phi, psi)
    for s in range(4):
        for key in cat.tuple_list(s):
            assert product_at_slow(phi, psi, key) == fast.at(key)


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from(range(len(CATS))), st.integers(0, 3), st.integers(0, 3))
def test_bracket_graded_antisymmetry(seed, ci, d1, d2):
    cat = CATS[ci]
    rng = random.Random(seed)
    a = random_cochain(cat, d1, [1, 2], rng, 0.5)
    b = random_cochain(cat, d2, [1, 2], rng, 0.5)
    sign = (-1) ** ((d1 - 1) * (d2 - 1))
    assert gerstenhaber_bracket(a, b) == gerstenhaber_bracket(b, a).scale(-sign)


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from(range(len(CATS))), st.integers(-1, 3))
def test_d_squared(seed, ci, deg):
    cat = CATS[ci]
    phi = random_cochain(cat, deg, [1, 2], random.Random(seed), 0.5)
    base = mu_cd(cat)
    assert gerstenhaber_bracket(base, gerstenhaber_bracket(base, phi, 4), 4).is_zero()


def test_selftest_small():
    rep = selftest(trials=20, seed=7, product_trials=100)
    assert rep.ok, rep.failures
    assert set(rep.counts) == {"d_squared", "jacobi", "bidegree", "pushforward", "fast_vs_slow"}
