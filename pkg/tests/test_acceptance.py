"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line with its wall time; the lines are printed
in the pytest terminal summary and when this file is run as a script.
"""

import random
import time
from contextlib import contextmanager

import pytest

from toricmirror import corpus
from toricmirror.cech import BOUNDARY, ToricSpace, cech_cohomology, concentration_and_serre
from toricmirror.coordring import (
    cone_position,
    find_witness_points,
    graded_basis,
    nontriviality_certificate,
    roots,
    witness_predicates,
)
from toricmirror.fan import dual_fan, induced_fan, mpcp_check, mpcs_check, sample_generic_heights
from toricmirror.hochschild import boundary_category, graded_hh_rank, selftest
from toricmirror.linalg import group_index, primes_up_to
from toricmirror.logcoh import mdeg_injectivity_check
from toricmirror.mirror import forbidden_characteristics, obstruction_kernel
from toricmirror.polytope import codim_ge2_points, polar_dual, reflexive_polygon_census
from toricmirror.tropical import TropicalData, cyl_section_check, star_check

RESULTS: list[str] = []


@contextmanager
def criterion(number: int, title: str, limit: float):
    start = time.perf_counter()
    info: dict = {"detail": ""}
    try:
        yield info
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        RESULTS.append(f"FAIL {number:2d} {title} ({elapsed:.1f}s): {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}")
        raise
    elapsed = time.perf_counter() - start
    if elapsed >= limit:
        RESULTS.append(f"FAIL {number:2d} {title} ({elapsed:.1f}s, limit {limit:.0f}s)")
        pytest.fail(f"criterion {number} took {elapsed:.1f}s, limit {limit}s")
    RESULTS.append(f"PASS {number:2d} {title} ({elapsed:.1f}s){': ' + info['detail'] if info['detail'] else ''}")


def _pair(name):
    delta = corpus.load(name)
    return delta, polar_dual(delta, strict=True)


def test_01_duality_involution():
    with criterion(1, "duality involution on the corpus", 1.0) as info:
        names = corpus.names()
        for name in names:
            delta = corpus.load(name)
            assert set(polar_dual(polar_dual(delta)).vertices) == set(delta.vertices), name
        info["detail"] = f"{len(names)} polytopes"


def test_02_polygon_census():
    with criterion(2, "reflexive polygon census in [-3,3]^2", 60.0) as info:
        found = reflexive_polygon_census(3)
        info["detail"] = f"{len(found)} classes"
        assert len(found) == 16


def test_03_mpcp_implies_mpcs():
    with criterion(3, "MPCP implies MPCS for generic heights, rank <= 4", 120.0) as info:
        rng = random.Random(2024)
        checked = 0
        for name in corpus.names():
            delta, dual = _pair(name)
            if delta.rank > 4:
                continue
            P = list(codim_ge2_points(dual))
            if not P:
                continue
            sigma = dual_fan(delta)
            for _ in range(50):
                sk = induced_fan(P, sample_generic_heights(P, rng))
                if mpcp_check(sigma, sk, P).ok:
                    checked += 1
                    assert mpcs_check(sigma, sk).ok, name
        info["detail"] = f"{checked} MPCP refinements"
        assert checked


def test_04_square_characteristic():
    with criterion(4, "forbidden primes of the square", 1.0) as info:
        P = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        forb = forbidden_characteristics(induced_fan(P, {p: 1 for p in P}), P)
        info["detail"] = f"{sorted(forb)}"
        assert set(forb) == {2}


def test_05_boundary_cech_ranks():
    with criterion(5, "boundary Čech ranks and graded basis agreement", 30.0):
        plane = ToricSpace.of(corpus.load("triangle"))
        assert cech_cohomology(plane, 0, BOUNDARY).ranks == [1, 1]
        cube3 = ToricSpace.of(corpus.load("octahedron"))
        assert cech_cohomology(cube3, 0, BOUNDARY).ranks == [1, 0, 1]
        for space in (plane, cube3):
            rep = concentration_and_serre(space, [0, 1, 2, 3])
            assert rep.concentration, rep.failures
        for name in corpus.SMOOTH_FACE_FAN:
            delta, dual = _pair(name)
            if delta.rank < 2:
                continue
            space = ToricSpace.of(delta)
            for k in range(5):
                assert cech_cohomology(space, k, BOUNDARY).ranks[0] == len(graded_basis(k, dual)), (name, k)


def test_06_serre_symmetry():
    with criterion(6, "Serre symmetry on every smooth corpus instance", 30.0) as info:
        for name in corpus.SMOOTH_FACE_FAN:
            rep = concentration_and_serre(ToricSpace.of(corpus.load(name)), [0, 1, 2, 3])
            assert rep.serre, (name, rep.failures)
        info["detail"] = f"{len(corpus.SMOOTH_FACE_FAN)} instances"


def test_07_deformation_nontriviality():
    with criterion(7, "witness points and root gauge", 30.0) as info:
        count = 0
        for name in ("square", "cube"):
            dual = corpus.load(name)
            for p in codim_ge2_points(dual):
                w = find_witness_points(p, dual, 6)
                preds = witness_predicates(w.first, w.second, p, dual)
                assert all(preds.values()) and len(preds) == 6
                s = w.first + w.second
                assert cone_position(w.first, dual) == "boundary" and cone_position(w.second, dual) == "boundary"
                assert cone_position(w.first.shift(p), dual) == "outside"
                assert cone_position(w.second.shift(p), dual) == "outside"
                assert cone_position(s, dual) == "interior" and cone_position(s.shift(p), dual) == "boundary"
                cert = nontriviality_certificate(p, dual, 0, gauge=False)
                assert cert.contradiction_monomial == s.shift(p)
                count += 1
            root = roots(dual)[0]
            assert nontriviality_certificate(root, dual, 4).gauge_verdict == "feasible"
        info["detail"] = f"{count} points"


def test_08_obstruction_kernel():
    with criterion(8, "obstruction kernel over Q and GF(q), q <= 97", 10.0) as info:
        mismatches = []
        for name in corpus.names():
            delta, dual = _pair(name)
            P = list(codim_ge2_points(dual))
            n = delta.rank
            assert obstruction_kernel(P, n)[1] == 0, name
            if not P:
                continue
            index = group_index(P, n)
            for q in primes_up_to(97):
                divides = isinstance(index, int) and index % q == 0
                nonzero = obstruction_kernel(P, n, q)[1] > 0
                if nonzero != divides:
                    mismatches.append(f"{name} q={q} index={index} kernel {'nonzero' if nonzero else 'zero'}")
        info["detail"] = "no mismatches"
        assert not mismatches, f"{len(mismatches)} mismatches, first: {mismatches[0]}"


def test_09_mdeg_injectivity():
    with criterion(9, "M*-degree injectivity up to |v| = 4", 30.0) as info:
        rng = random.Random(9)
        count = 0
        for name in corpus.names():
            delta, dual = _pair(name)
            P = list(codim_ge2_points(dual))
            if not P:
                continue
            sk = induced_fan(P, sample_generic_heights(P, rng))
            assert mdeg_injectivity_check(sk, 4, dual_fan(delta)), name
            count += 1
        info["detail"] = f"{count} pairs"


def test_10_hochschild_selftest():
    with criterion(10, "Hochschild self-test and truncated HH ranks", 120.0) as info:
        rep = selftest(trials=1000, seed=0, length_cap=4, product_trials=10_000)
        assert rep.ok, rep.failures
        assert all(rep.counts[k] >= 1000 for k in ("d_squared", "jacobi", "bidegree", "pushforward"))
        assert rep.counts["fast_vs_slow"] >= 10_000
        cat = boundary_category(corpus.load("triangle"), [0, 1])
        d = 1
        slices = [(0, -d), (1, -d), (0, -2 * d), (1, -2 * d), (2, -2 * d)]
        for b in slices:
            r = graded_hh_rank(cat, b, 5)
            assert r.rank == 0 and "does not prove" in r.caveat, b
        info["detail"] = f"spot-check only; slices {slices} vanish at length cap 5"


def test_11_tropical_sampling():
    with criterion(11, "tropical star and cylindrized-section sampling", 120.0) as info:
        names = ["triangle", "square", "hexagon", "octahedron", "cube"]
        worst = 0.0
        for name in names:
            delta = corpus.load(name)
            rep = star_check(TropicalData(delta, t=100), epsilon=0.05, sample_count=10_000)
            assert rep.ok, (name, rep.witness)
            cyl = cyl_section_check(delta, a=0.01, delta_radius=0.05, sample_count=1_000)
            assert cyl.ok and cyl.details["integral_values"] == 0, (name, cyl.details)
            assert cyl.max_deviation <= cyl.bound, (name, cyl.max_deviation, cyl.bound)
            worst = max(worst, cyl.max_deviation / cyl.bound)
        info["detail"] = f"worst deviation/bound ratio {worst:.3f}"


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
