"""Hypothesis checks for a mirror pair: characteristic, connectedness,
divisor component counts, height shifts and the total obstruction kernel."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

from .fan import CheckResult, Fan, IntVec, dual_fan, induced_fan, mpcp_check, mpcs_check
from .linalg import INFINITE, TwoForm, det, group_index, is_prime, rank, rank_mod_p, wedge_contract
from .lp import linprog
from .polytope import (
    LatticePointSet,
    LatticePolytope,
    _dot,
    carrier_face,
    codim_ge2_points,
    dual_face,
    face_lattice,
    polar_dual,
)


def prime_factors(n: int) -> set[int]:
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def forbidden_characteristics(sigma_kappa: Fan, P: LatticePointSet | Sequence[IntVec]) -> dict[int, list[str]]:
    """Primes dividing a maximal-cone determinant or |Z^n / <P>|, each with its sources."""
    out: dict[int, list[str]] = {}
    for c in sigma_kappa.maximal:
        if len(c.generators) != sigma_kappa.rank:
            raise ValueError(f"cone {c.sorted_generators()} is not simplicial")
        vol = abs(det(c.sorted_generators()))
        for q in sorted(prime_factors(vol)):
            out.setdefault(q, []).append(f"volume {vol} of cone {c.sorted_generators()}")
    idx = group_index(list(P), sigma_kappa.rank)
    if idx == INFINITE:
        raise ValueError("P does not span the lattice")
    for q in sorted(prime_factors(idx)):
        out.setdefault(q, []).append(f"index {idx} of the sublattice generated by P")
    return dict(sorted(out.items()))


@dataclass
class ConnectednessResult:
    ok: bool
    violations: list[dict] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def connectedness_condition(delta: LatticePolytope, dual: LatticePolytope) -> ConnectednessResult:
    """Every edge of ``delta`` has no interior points, or its dual face has none.

    The edges quantified over are the faces S*_p of ``delta`` that appear in
    the component count, so that the condition rules out divisors with
    several components.
    """
    bad = []
    for e in delta.faces:
        if e.dim != 1 or e.dim == delta.rank:
            continue
        s = dual_face(e, delta, dual)
        if e.interior_points and s.interior_points:
            bad.append(
                {
                    "edge": [list(delta.vertices[i]) for i in sorted(e.vertices)],
                    "edge_interior": e.interior_points,
                    "dual_face_interior": s.interior_points,
                }
            )
    return ConnectednessResult(not bad, bad)


def component_count(p: Sequence[int], delta_dual: LatticePolytope, delta: LatticePolytope | None = None) -> int:
    """Number of connected components of the divisor attached to ``p``."""
    p = tuple(p)
    if not any(p):
        raise ValueError("the origin has no divisor")
    if not delta_dual.contains(p):
        raise ValueError(f"{p} is not a lattice point of the polytope")
    delta = delta or polar_dual(delta_dual, strict=True)
    s = dual_face(carrier_face(p, delta_dual), delta_dual, delta)
    if s.dim == 0:
        return 0
    if s.dim == 1:
        return s.interior_points
    return 1


def kappa_shift(
    kappa: Mapping[IntVec, Fraction | int], p: Sequence[int]
) -> tuple[dict[IntVec, Fraction], tuple[Fraction, ...]]:
    """Add a linear functional so that the height at ``p`` vanishes and all others stay positive.

    Maximises the smallest shifted height over q != p by exact LP and returns
    ``(shifted heights, functional)``.
    """
    p = tuple(p)
    if p not in kappa:
        raise ValueError(f"{p} is not in the domain of the heights")
    n = len(p)
    others = [q for q in sorted(kappa) if q != p]
    # variables: lambda (free, n entries), t (free); minimise -t
    c = [0] * n + [-1]
    a_ub = [[-qi for qi in q] + [1] for q in others]
    b_ub = [Fraction(kappa[q]) for q in others]
    a_eq = [list(p) + [0]]
    b_eq = [-Fraction(kappa[p])]
    free = list(range(n + 1))
    res = linprog(c, a_ub, b_ub, a_eq, b_eq, free=free)
    if res.status == "infeasible":
        raise ValueError("no functional vanishes at p")
    if res.status == "unbounded":
        # only possible when no other point constrains t; pick the zero-height solution
        raise ValueError("height shift is unbounded; P must span")
    lam = tuple(res.x[:n])
    if res.x[n] <= 0:
        raise ValueError(f"heights are not strictly convex at {p}")
    shifted = {q: Fraction(kappa[q]) + _dot(lam, q) for q in sorted(kappa)}
    return shifted, lam


def obstruction_matrix(P: Sequence[IntVec], n: int, prime: int | None = None) -> list[list[int]]:
    """Matrix of alpha -> (alpha(p, .))_p on the basis e_i ^ e_j, i < j (columns)."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    cols = []
    for i, j in pairs:
        form = TwoForm.wedge(n, i, j, prime)
        col = []
        for p in P:
            col.extend(wedge_contract(form, list(p)))
        cols.append(col)
    rows = len(P) * n
    return [[cols[k][r] for k in range(len(pairs))] for r in range(rows)]


def obstruction_kernel(P: LatticePointSet | Sequence[IntVec], n: int, prime: int | None = None) -> tuple[list[list[int]], int]:
    """The contraction map and its kernel dimension over Q or GF(prime)."""
    pts = [tuple(p) for p in P]
    if prime is not None and not is_prime(prime):
        raise ValueError(f"{prime} is not prime")
    m = obstruction_matrix(pts, n, prime)
    dim_source = comb(n, 2)
    if not m or dim_source == 0:
        return m, dim_source
    r = rank(m) if prime is None else rank_mod_p(m, prime)
    return m, dim_source - r


def span_rank(P: Sequence[IntVec], prime: int | None = None) -> int:
    rows = [list(p) for p in P]
    if not rows:
        return 0
    return rank(rows) if prime is None else rank_mod_p(rows, prime)


@dataclass
class HypothesisReport:
    mpcp: CheckResult
    mpcs: CheckResult | None
    connectedness: ConnectednessResult
    forbidden_primes: dict[int, list[str]] | None
    component_counts: dict[IntVec, int]
    monomial_divisor: list[tuple[IntVec, str]]
    group_index: int | str

    def to_json(self) -> dict:
        return {
            "mpcp": self.mpcp.to_json(),
            "mpcs": None if self.mpcs is None else self.mpcs.to_json(),
            "connectedness": {"ok": self.connectedness.ok, "violations": self.connectedness.violations},
            "forbidden_primes": None
            if self.forbidden_primes is None
            else {str(q): src for q, src in self.forbidden_primes.items()},
            "component_counts": [{"point": list(p), "components": c} for p, c in self.component_counts.items()],
            "monomial_divisor": [{"point": list(p), "divisor": d} for p, d in self.monomial_divisor],
            "group_index": self.group_index,
        }


def divisor_label(p: Sequence[int]) -> str:
    return "D_(" + ",".join(str(c) for c in p) + ")"


def analyze(delta: LatticePolytope, kappa: Mapping[IntVec, Fraction | int] | None = None) -> HypothesisReport:
    """All hypothesis checks for the pair (delta, polar dual) and heights on P."""
    dual = polar_dual(delta, strict=True)
    P = codim_ge2_points(dual)
    if kappa is None:
        kappa = {p: Fraction(1) for p in P}
    sigma = dual_fan(delta)
    sk = induced_fan(P, kappa)
    mp = mpcp_check(sigma, sk, P)
    ms = mpcs_check(sigma, sk) if mp.ok else None
    forb = forbidden_characteristics(sk, P) if all(c.is_simplicial for c in sk.maximal) and len(P) else None
    counts = {}
    for p, face in lattice_points_nonzero(dual):
        counts[p] = component_count(p, dual, delta)
    return HypothesisReport(
        mpcp=mp,
        mpcs=ms,
        connectedness=connectedness_condition(delta, dual),
        forbidden_primes=forb,
        component_counts=counts,
        monomial_divisor=[(p, divisor_label(p)) for p in P],
        group_index=group_index(list(P), delta.rank) if len(P) else INFINITE,
    )


def lattice_points_nonzero(poly: LatticePolytope):
    from .polytope import lattice_points

    pts = lattice_points(poly)
    return [(p, pts.carriers[p]) for p in pts if any(p)]
