"""Combinatorics of the log cohomology of the mirror pair.

A strata vector ``v`` assigns a nonnegative multiplicity to each point of P.
It contributes when its support is the generator set of a cone of the refined
fan whose smallest containing coarse cone is not maximal (so the stratum is
positive-dimensional). Each contributing vector sits in bidegree
``(deg + 2|v|, sum v_p p)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .fan import Cone, Fan, dual_fan
from .linalg import solve
from .mirror import component_count, connectedness_condition
from .polytope import LatticePolytope, codim_ge2_points, polar_dual

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class StrataVector:
    v: tuple[tuple[IntVec, int], ...]
    contributing: bool

    @classmethod
    def of(cls, mapping: Mapping[IntVec, int], contributing: bool) -> "StrataVector":
        if any(c < 0 for c in mapping.values()):
            raise ValueError("multiplicities must be nonnegative")
        return cls(tuple(sorted((tuple(p), int(c)) for p, c in mapping.items() if c)), contributing)

    @property
    def support(self) -> frozenset[IntVec]:
        return frozenset(p for p, _ in self.v)

    @property
    def size(self) -> int:
        return sum(c for _, c in self.v)

    def as_dict(self) -> dict[IntVec, int]:
        return dict(self.v)

    def to_json(self) -> dict:
        return {"v": [{"point": list(p), "multiplicity": c} for p, c in self.v], "contributing": self.contributing}


def _cone_index(sigma_kappa: Fan) -> dict[frozenset[IntVec], Cone]:
    return {c.generators: c for c in sigma_kappa.cones}


def _stratum_nonempty(sigma: Fan, cone: Cone) -> bool:
    if cone.dim == 0:
        return True
    x = [sum(g[i] for g in cone.generators) for i in range(sigma.rank)]
    return sigma.minimal_cone(x).dim < sigma.rank


def is_contributing(v: Mapping[IntVec, int], sigma: Fan, sigma_kappa: Fan) -> bool:
    supp = frozenset(tuple(p) for p, c in v.items() if c)
    cone = _cone_index(sigma_kappa).get(supp)
    return cone is not None and _stratum_nonempty(sigma, cone)


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    """Tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def contributing_vectors(sigma: Fan, sigma_kappa: Fan, bound: int) -> list[StrataVector]:
    """Every contributing strata vector with |v| <= bound, in canonical order."""
    out = []
    for cone in sigma_kappa.cones:
        if cone.dim > bound or not _stratum_nonempty(sigma, cone):
            continue
        gens = cone.sorted_generators()
        for total in range(len(gens), bound + 1):
            for comp in _compositions(total, len(gens)):
                out.append(StrataVector.of(dict(zip(gens, comp)), True))
    out.sort(key=lambda s: (s.size, s.v))
    return out


def log_bidegree(v: StrataVector | Mapping[IntVec, int], alpha_degree: int, rank: int | None = None) -> tuple[int, IntVec]:
    items = v.as_dict() if isinstance(v, StrataVector) else dict(v)
    if rank is None:
        if not items:
            raise ValueError("rank is needed for the zero vector")
        rank = len(next(iter(items)))
    size = sum(items.values())
    mdeg = tuple(sum(c * p[i] for p, c in items.items()) for i in range(rank))
    return alpha_degree + 2 * size, mdeg


def _require_simplicial(sigma_kappa: Fan) -> None:
    if not all(c.is_simplicial for c in sigma_kappa.maximal):
        raise ValueError("refined fan is not simplicial")


def mdeg_injectivity_check(sigma_kappa: Fan, bound: int, sigma: Fan | None = None) -> bool:
    """Pairwise comparison of M*-degrees of contributing vectors with |v| <= bound.

    Without the coarse fan every cone-supported vector is compared, which is
    a superset of the contributing ones.
    """
    _require_simplicial(sigma_kappa)
    if sigma is None:
        vecs = []
        for cone in sigma_kappa.cones:
            gens = cone.sorted_generators()
            for total in range(len(gens), bound + 1):
                for comp in _compositions(total, len(gens)):
                    vecs.append(StrataVector.of(dict(zip(gens, comp)), True))
    else:
        vecs = contributing_vectors(sigma, sigma_kappa, bound)
    seen: dict[IntVec, StrataVector] = {}
    for s in vecs:
        _, m = log_bidegree(s, 0, sigma_kappa.rank)
        if m in seen and seen[m] != s:
            return False
        seen[m] = s
    return True


def recover_vector(mdeg: Sequence[int], sigma_kappa: Fan) -> dict[IntVec, Fraction] | None:
    """Coefficients of ``mdeg`` on the generators of its smallest refined cone.

    Returns None when the coefficients are not positive integers.
    """
    if not any(mdeg):
        return {}
    cone = sigma_kappa.minimal_cone(mdeg)
    gens = cone.sorted_generators()
    sol = solve([[g[i] for g in gens] for i in range(sigma_kappa.rank)], list(mdeg))
    if sol is None or any(c <= 0 or c.denominator != 1 for c in sol):
        return None
    return dict(zip(gens, sol))


def in_relative_interior(mdeg: Sequence[int], cone: Cone, sigma_kappa: Fan) -> bool:
    return sigma_kappa.minimal_cone(mdeg).generators == cone.generators


@dataclass
class LowDegreeTable:
    rows: list[dict]
    min_offgrid_zdegree: int | None
    clause_iii: bool

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "clause_iii": {"ok": self.clause_iii, "min_z_degree_off_grid": self.min_offgrid_zdegree},
        }


def contributions_at(q: Sequence[int], sigma: Fan, sigma_kappa: Fan, bound: int) -> list[StrataVector]:
    q = tuple(q)
    return [s for s in contributing_vectors(sigma, sigma_kappa, bound) if log_bidegree(s, 0, sigma.rank)[1] == q]


def hlog_low_degree_table(delta: LatticePolytope, sigma_kappa: Fan, bound: int = 3) -> LowDegreeTable:
    """Ranks pinned down in M*-gradings 0 and p in P, plus the off-grid vanishing check."""
    dual = polar_dual(delta, strict=True)
    conn = connectedness_condition(delta, dual)
    if not conn:
        raise ValueError(f"connectedness condition fails: {conn.violations}")
    sigma = dual_fan(delta)
    P = list(codim_ge2_points(dual))
    n = delta.rank
    rows: list[dict] = [{"grading": [0] * n, "rank": "not computed"}]
    for p in sorted(P):
        rows.append({"grading": list(p), "bidegree": [2, list(p)], "rank": component_count(p, dual, delta)})
    grid = {tuple(p) for p in P} | {tuple([0] * n)}
    low = None
    for s in contributing_vectors(sigma, sigma_kappa, bound):
        z, m = log_bidegree(s, 0, n)
        if m not in grid:
            low = z if low is None else min(low, z)
    return LowDegreeTable(rows, low, low is None or low >= 4)
