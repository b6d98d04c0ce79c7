"""Fans: face fans of polytopes, regular refinements from heights, and the
projective-simplicial (MPCP) and partial-smoothness (MPCS) decisions."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .linalg import det, primitive_part, rank, smith_normal_form, solve
from .lp import linprog
from .polytope import LatticePointSet, LatticePolytope, _dot, is_reflexive, polar_dual

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class Cone:
    """A pointed rational cone, stored by its primitive extremal ray generators."""

    generators: frozenset[IntVec]
    dim: int

    @classmethod
    def spanned_by(cls, gens: Iterable[Sequence[int]]) -> "Cone":
        prim = frozenset(primitive_part(g) for g in gens)
        d = rank([list(g) for g in prim]) if prim else 0
        return cls(prim, d)

    @property
    def is_simplicial(self) -> bool:
        return len(self.generators) == self.dim

    def sorted_generators(self) -> list[IntVec]:
        return sorted(self.generators)

    def is_unimodular(self) -> bool:
        """Simplicial with generators extending to a lattice basis."""
        if not self.is_simplicial:
            return False
        if self.dim == 0:
            return True
        diag, _, _ = smith_normal_form(self.sorted_generators())
        return all(d == 1 for d in diag)

    def multiplicity(self) -> int:
        """Lattice index of the generators inside their span (0 if not simplicial)."""
        if not self.is_simplicial:
            return 0
        if self.dim == 0:
            return 1
        diag, _, _ = smith_normal_form(self.sorted_generators())
        out = 1
        for d in diag:
            out *= d
        return out


@dataclass
class Fan:
    """A fan given by its maximal cones.

    ``forms`` optionally holds, per maximal cone, the linear form certifying
    the convex piecewise-linear function whose domains of linearity are the
    cones. ``polytope`` is set when the fan is the face fan of a polytope with
    the origin in its interior, which gives fast exact cone location.
    """

    rank: int
    maximal: list[Cone]
    forms: dict[Cone, tuple[Fraction, ...]] | None = None
    polytope: LatticePolytope | None = None
    cones: list[Cone] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.cones:
            self.cones = _face_closure(self)
        self.cones.sort(key=lambda c: (c.dim, c.sorted_generators()))
        self.maximal.sort(key=lambda c: c.sorted_generators())

    @cached_property
    def rays(self) -> list[IntVec]:
        return sorted({g for c in self.maximal for g in c.generators})

    # -- cone location ---------------------------------------------------

    def minimal_cone(self, x: Sequence[Fraction | int]) -> Cone:
        """The smallest cone of the fan containing ``x``."""
        if not any(x):
            return Cone(frozenset(), 0)
        if self.polytope is not None:
            return _face_fan_cone(self.polytope, x)
        best = None
        for c in self.cones:
            if c.dim and (best is None or c.dim < best.dim) and cone_contains(c, x):
                best = c
        if best is None:
            raise ValueError(f"{tuple(x)} is outside the support of the fan")
        return best

    def maximal_cone_containing(self, x: Sequence[Fraction | int]) -> Cone:
        small = self.minimal_cone(x)
        for c in self.maximal:
            if small.generators <= c.generators:
                return c
        raise ValueError(f"{tuple(x)} is outside the support of the fan")

    def to_json(self) -> dict:
        out: dict = {"rank": self.rank, "cones": [[list(g) for g in c.sorted_generators()] for c in self.maximal]}
        if self.forms is not None:
            out["forms"] = [[_fmt(v) for v in self.forms[c]] for c in self.maximal]
        return out


def _fmt(v: Fraction | int) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def cone_contains(c: Cone, x: Sequence[Fraction | int]) -> bool:
    gens = c.sorted_generators()
    n = len(x)
    res = linprog([0] * len(gens), a_eq=[[g[i] for g in gens] for i in range(n)], b_eq=list(x))
    return res.status == "optimal"


def _tight_facets(poly: LatticePolytope, x: Sequence[Fraction | int]) -> list[int]:
    """Facets hit by the ray through ``x`` (origin interior to ``poly``)."""
    best = None
    ids: list[int] = []
    for k, (a, b, _) in enumerate(poly.facets):
        r = Fraction(_dot(a, x)) / b
        if best is None or r > best:
            best, ids = r, [k]
        elif r == best:
            ids.append(k)
    return ids


def _face_fan_cone(poly: LatticePolytope, x: Sequence[Fraction | int]) -> Cone:
    ids = _tight_facets(poly, x)
    verts = frozenset.intersection(*[poly.facets[k][2] for k in ids])
    return _cone_over(poly, verts)


def _cone_over(poly: LatticePolytope, verts: Iterable[int]) -> Cone:
    # cones are memoised on the polytope; face fans ask for the same ones repeatedly
    cache = poly.__dict__.setdefault("_cone_cache", {})
    key = frozenset(verts)
    if key not in cache:
        rays = poly.__dict__.get("_ray_cache")
        if rays is None:
            rays = poly.__dict__["_ray_cache"] = [_primitive_ray(v) for v in poly.vertices]
        prim = frozenset(rays[i] for i in key)
        cache[key] = Cone(prim, rank([list(g) for g in prim]) if prim else 0)
    return cache[key]


def _primitive_ray(v: Sequence[Fraction | int]) -> IntVec:
    den = 1
    for c in v:
        den = den * Fraction(c).denominator // _gcd(den, Fraction(c).denominator)
    return primitive_part([int(Fraction(c) * den) for c in v])


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _face_closure(f: Fan) -> list[Cone]:
    if f.polytope is not None:
        poly = f.polytope
        out = {Cone(frozenset(), 0)}
        for face in poly.faces:
            if face.dim < poly.rank:
                out.add(_cone_over(poly, face.vertices))
        return list(out)
    out = {Cone(frozenset(), 0)}
    for c in f.maximal:
        out |= _cone_faces(c)
    return list(out)


def _cone_faces(c: Cone) -> set[Cone]:
    """All faces of a cone, found from supporting hyperplanes through generators."""
    gens = c.sorted_generators()
    faces = {c, Cone(frozenset(), 0)}
    if c.dim <= 1:
        return faces
    facets = []
    from itertools import combinations

    for subset in combinations(gens, c.dim - 1):
        if rank([list(g) for g in subset]) != c.dim - 1:
            continue
        # normal inside span(c): solve for functional vanishing on subset
        on = [g for g in gens if rank([list(h) for h in subset] + [list(g)]) == c.dim - 1]
        others = [g for g in gens if g not in on]
        if not others:
            continue
        # check the hyperplane supports the cone via LP-free sign test on a functional
        basis = list(subset)
        funcs = _functionals_vanishing(basis, len(gens[0]))
        for u in funcs:
            vals = [_dot(u, g) for g in others]
            if all(v > 0 for v in vals) or all(v < 0 for v in vals):
                facets.append(frozenset(on))
                break
    facets = set(facets)
    frontier = set(facets)
    found = set(facets)
    while frontier:
        nxt = set()
        for s in frontier:
            for t in facets:
                u = s & t
                if u and u not in found:
                    nxt.add(u)
        found |= nxt
        frontier = nxt
    for s in found:
        faces.add(Cone.spanned_by(s))
    return faces


def _functionals_vanishing(basis: list[IntVec], n: int) -> list[tuple[Fraction, ...]]:
    from .linalg import nullspace

    ns = nullspace([list(b) for b in basis], n)
    # a combination generic enough to separate: try each null vector and their sum
    out = [tuple(v) for v in ns]
    if len(ns) > 1:
        out.append(tuple(sum(col) for col in zip(*ns)))
    return out


# ----------------------------------------------------------------------------
# constructions


def dual_fan(delta: LatticePolytope) -> Fan:
    """The fan whose cones are cones over faces of the polar dual of ``delta``."""
    if not is_reflexive(delta):
        raise ValueError("dual_fan requires a reflexive polytope")
    return face_fan(polar_dual(delta))


def face_fan(poly: LatticePolytope) -> Fan:
    """Cones over the proper faces of a polytope with the origin interior."""
    if not poly.origin_interior():
        raise ValueError("origin must be interior for a face fan")
    maximal = [_cone_over(poly, members) for _, _, members in poly.facets]
    return Fan(poly.rank, maximal, polytope=poly)


def from_cones(rank_: int, cones: Iterable[Iterable[Sequence[int]]]) -> Fan:
    """A fan from explicit maximal cones (no consistency check beyond face closure)."""
    return Fan(rank_, [Cone.spanned_by(c) for c in cones])


HeightVector = Mapping[IntVec, Fraction]


def _check_heights(P: LatticePointSet | Sequence[IntVec], kappa: HeightVector) -> list[IntVec]:
    pts = list(P)
    if set(map(tuple, kappa)) != set(pts):
        raise ValueError("heights must be given on exactly the points of P")
    for p in pts:
        if Fraction(kappa[p]) <= 0:
            raise ValueError(f"height at {p} must be positive")
    return pts


def sample_generic_heights(
    P: LatticePointSet | Sequence[IntVec], rng: random.Random, scale: Fraction = Fraction(1, 50)
) -> dict[IntVec, Fraction]:
    """Heights 1 + scale * (x^T Q x + jitter) with Q random positive definite.

    The quadratic part is strictly convex, so every point tends to become a
    ray; the rational jitter breaks ties so that the refinement is simplicial.
    """
    pts = [tuple(p) for p in P]
    n = len(pts[0]) if pts else 0
    a = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
    q = [[sum(a[k][i] * a[k][j] for k in range(n)) + (i == j) for j in range(n)] for i in range(n)]
    out = {}
    for p in pts:
        quad = sum(q[i][j] * p[i] * p[j] for i in range(n) for j in range(n))
        jitter = Fraction(rng.randint(0, 10**6), 10**8)
        out[p] = 1 + scale * Fraction(quad) / (1 + max(map(sum, q))) * Fraction(1, 4) + scale * jitter
    return out


def induced_fan(P: LatticePointSet | Sequence[IntVec], kappa: HeightVector) -> Fan:
    """The fan of domains of linearity of the largest convex function below the heights.

    Maximal cones are cones over the facets of conv{p / kappa_p}; each carries
    the form ``m`` with ``<m, p> = kappa_p`` on the cone and ``<= kappa_q``
    everywhere else.
    """
    pts = _check_heights(P, kappa)
    if not pts or rank([list(p) for p in pts]) < len(pts[0]):
        raise ValueError("points do not span the ambient space")
    scaled = [tuple(Fraction(c) / Fraction(kappa[p]) for c in p) for p in pts]
    hull = LatticePolytope.from_points(scaled)
    if not hull.origin_interior():
        raise ValueError("points do not positively span the ambient space")
    maximal = []
    forms = {}
    for a, b, members in hull.facets:
        cone = _cone_over(hull, members)
        maximal.append(cone)
        forms[cone] = tuple(Fraction(x) / b for x in a)
    return Fan(hull.rank, maximal, forms=forms, polytope=hull)


def psi_kappa(P: Sequence[IntVec], kappa: HeightVector, x: Sequence[Fraction | int]) -> Fraction:
    """min { sum t_i kappa_i : sum t_i p_i = x, t >= 0 } by exact simplex."""
    pts = list(P)
    n = len(x)
    res = linprog(
        [Fraction(kappa[p]) for p in pts],
        a_eq=[[p[i] for p in pts] for i in range(n)],
        b_eq=[Fraction(v) for v in x],
    )
    if res.status != "optimal":
        raise ValueError(f"{tuple(x)} is not in the cone generated by P")
    return res.value


def regularity_flags(f: Fan) -> tuple[bool, bool]:
    simplicial = all(len(c.generators) == f.rank for c in f.maximal)
    smooth = simplicial and all(abs(det(c.sorted_generators())) == 1 for c in f.maximal)
    return simplicial, smooth


@dataclass
class CheckResult:
    """Verdict plus every failing clause, in the order the clauses are checked."""

    ok: bool
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def clause(self) -> str | None:
        return self.failures[0][0] if self.failures else None

    @property
    def detail(self) -> str:
        return "; ".join(f"{c}: {d}" for c, d in self.failures)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "failures": [{"clause": c, "detail": d} for c, d in self.failures]}


def mpcp_check(sigma: Fan, sigma_kappa: Fan, P: LatticePointSet | Sequence[IntVec]) -> CheckResult:
    """Refinement, simpliciality, rays exactly P, strict convexity across walls."""
    failures: list[tuple[str, str]] = []
    for c in sigma_kappa.maximal:
        x = [sum(g[i] for g in c.generators) for i in range(sigma.rank)]
        host = sigma.minimal_cone(x)
        if not all(_in_cone(sigma, host, g) for g in c.generators):
            failures.append(("refinement", f"cone {c.sorted_generators()} is not inside a cone of the coarse fan"))
            break
    for c in sigma_kappa.maximal:
        if len(c.generators) != sigma_kappa.rank:
            failures.append(("simplicial", f"cone {c.sorted_generators()} has {len(c.generators)} generators"))
            break
    rays = set(sigma_kappa.rays)
    pts = set(map(tuple, P))
    if rays != pts:
        missing = sorted(pts - rays)
        extra = sorted(rays - pts)
        failures.append(("rays", f"points of P that are not rays: {missing}; rays outside P: {extra}"))
    if sigma_kappa.forms is None:
        failures.append(("projective", "no convexity certificate stored"))
    else:
        for i, c in enumerate(sigma_kappa.maximal):
            clash = next(
                (
                    d
                    for d in sigma_kappa.maximal[i + 1 :]
                    if len(c.generators & d.generators) == sigma_kappa.rank - 1
                    and sigma_kappa.forms[c] == sigma_kappa.forms[d]
                ),
                None,
            )
            if clash is not None:
                failures.append(("projective", f"cones {c.sorted_generators()} and {clash.sorted_generators()} share a form"))
                break
    return CheckResult(not failures, failures)


def _in_cone(f: Fan, host: Cone, g: Sequence[int]) -> bool:
    if f.polytope is not None:
        return f.minimal_cone(g).generators <= host.generators
    return cone_contains(host, g)


def is_maximal_cone(f: Fan, c: Cone) -> bool:
    return c.dim == f.rank


def mpcs_check(sigma: Fan, sigma_kappa: Fan) -> CheckResult:
    """Unimodularity of every refined cone whose minimal coarse cone is not maximal."""
    for tau in sigma_kappa.cones:
        if tau.dim == 0:
            continue
        x = [sum(g[i] for g in tau.generators) for i in range(sigma.rank)]
        host = sigma.minimal_cone(x)
        if host.dim == sigma.rank:
            continue
        if not tau.is_unimodular():
            detail = (
                f"cone {tau.sorted_generators()} (multiplicity {tau.multiplicity()}) "
                f"lies in the non-maximal cone {host.sorted_generators()}"
            )
            return CheckResult(False, [("smooth-away-from-fixed-points", detail)])
    return CheckResult(True)


# ----------------------------------------------------------------------------
# support functions


@dataclass(frozen=True)
class SupportFunction:
    """Values on primitive ray generators; linear on each cone."""

    values: Mapping[IntVec, Fraction]

    @classmethod
    def anticanonical(cls, f: Fan, k: int | Fraction = 1) -> "SupportFunction":
        return cls({r: Fraction(-k) for r in f.rays})

    def scaled(self, c: Fraction | int) -> "SupportFunction":
        return SupportFunction({r: Fraction(c) * v for r, v in self.values.items()})

    def form_on(self, f: Fan, cone: Cone) -> tuple[Fraction, ...]:
        gens = cone.sorted_generators()
        m = solve([list(g) for g in gens], [Fraction(self.values[g]) for g in gens])
        if m is None:
            raise ValueError(f"values are not linear on cone {gens}")
        return tuple(m)


def eval_support(F: SupportFunction, f: Fan, x: Sequence[Fraction | int]) -> Fraction:
    """Value at ``x`` of the cone-wise linear extension of ``F``."""
    if not any(x):
        return Fraction(0)
    cone = f.maximal_cone_containing(x)
    m = F.form_on(f, cone)
    return Fraction(_dot(m, x))


def moment_polytope(f: Fan, kappa: Mapping[IntVec, Fraction | int]) -> LatticePolytope:
    """{m : <v, m> >= -kappa_v for every ray v}, as a vertex list."""
    for r in f.rays:
        if Fraction(kappa[r]) <= 0:
            raise ValueError("heights must be positive on every ray")
    scaled = LatticePolytope.from_points([tuple(Fraction(c) / Fraction(kappa[r]) for c in r) for r in f.rays])
    if not scaled.origin_interior():
        raise ValueError("region is unbounded")
    return polar_dual(scaled)


# ----------------------------------------------------------------------------
# file formats


def heights_to_json(kappa: HeightVector) -> dict:
    return {"heights": [{"point": list(p), "value": _fmt(v)} for p, v in sorted(kappa.items())]}


def heights_from_json(data: dict) -> dict[IntVec, Fraction]:
    out = {}
    for entry in data["heights"]:
        out[tuple(int(c) for c in entry["point"])] = Fraction(entry["value"])
    return out


def load_heights(path: str | Path) -> dict[IntVec, Fraction]:
    return heights_from_json(json.loads(Path(path).read_text()))


def fan_from_json(data: dict) -> Fan:
    cones = [Cone.spanned_by(c) for c in data["cones"]]
    forms = None
    if "forms" in data:
        forms = {c: tuple(Fraction(v) for v in form) for c, form in zip(cones, data["forms"])}
    return Fan(data["rank"], cones, forms=forms)
