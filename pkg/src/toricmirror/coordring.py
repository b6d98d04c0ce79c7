"""The graded coordinate ring over the cone on a reflexive polytope, its
boundary quotient, and the first-order deformation along a lattice point.

Monomials are indexed by ``ConePoint(j, n)``: height ``j`` and character
``n``. The deformation parameter ``eps`` squares to zero and has degree
``(0, -p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

from .linalg import SparseSystem, smith_normal_form
from .polytope import LatticePolytope, _dot, carrier_face, codim_ge2_points, lattice_points

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"


@dataclass(frozen=True, order=True)
class ConePoint:
    height: int
    character: tuple[int, ...]

    def __add__(self, other: "ConePoint") -> "ConePoint":
        return ConePoint(self.height + other.height, tuple(a + b for a, b in zip(self.character, other.character)))

    def shift(self, p: Sequence[int]) -> "ConePoint":
        """Add (0, p)."""
        return ConePoint(self.height, tuple(a + b for a, b in zip(self.character, p)))

    def to_json(self) -> list:
        return [self.height, list(self.character)]


def cone_position(pt: ConePoint, dual: LatticePolytope) -> str:
    """Interior, boundary or outside of the cone over {1} x dual."""
    j, n = pt.height, pt.character
    if j < 0:
        raise ValueError("negative height")
    if j == 0:
        return BOUNDARY if not any(n) else OUTSIDE
    tight = False
    for a, b, _ in dual.facets:
        v = _dot(a, n) - b * j
        if v < 0:
            return OUTSIDE
        if v == 0:
            tight = True
    return BOUNDARY if tight else INTERIOR


def in_cone(pt: ConePoint, dual: LatticePolytope) -> bool:
    return cone_position(pt, dual) != OUTSIDE


def on_boundary(pt: ConePoint, dual: LatticePolytope) -> bool:
    return cone_position(pt, dual) == BOUNDARY


def graded_basis(j: int, dual: LatticePolytope, character: Sequence[int] | None = None) -> list[ConePoint]:
    """Boundary lattice points of the cone at height ``j``."""
    if j < 0:
        raise ValueError("negative height")
    if j == 0:
        pts = [ConePoint(0, tuple(0 for _ in range(dual.rank)))]
    else:
        scaled = LatticePolytope(dual.rank, tuple(tuple(j * x for x in v) for v in dual.vertices))
        pts = [ConePoint(j, p) for p in lattice_points(scaled) if on_boundary(ConePoint(j, p), dual)]
    if character is not None:
        pts = [c for c in pts if c.character == tuple(character)]
    return sorted(pts)


# ----------------------------------------------------------------------------
# coefficients: dual numbers over Q or GF(q)


@dataclass(frozen=True)
class DualNumberBase:
    """k[eps]/(eps^2) with k = Q (``prime=None``) or GF(prime); eps has degree (0, -p)."""

    direction: tuple[int, ...]
    prime: int | None = None

    def norm(self, v: int | Fraction) -> int | Fraction:
        return v % self.prime if self.prime is not None else Fraction(v)

    def coeff(self, a: int | Fraction, b: int | Fraction = 0) -> tuple:
        return (self.norm(a), self.norm(b))

    def mul(self, x: tuple, y: tuple) -> tuple:
        return (self.norm(x[0] * y[0]), self.norm(x[0] * y[1] + x[1] * y[0]))

    def add(self, x: tuple, y: tuple) -> tuple:
        return (self.norm(x[0] + y[0]), self.norm(x[1] + y[1]))

    @property
    def eps_degree(self) -> ConePoint:
        return ConePoint(0, tuple(-c for c in self.direction))


@dataclass
class RingElement:
    """Finite sum of boundary monomials with dual-number coefficients."""

    base: DualNumberBase
    terms: dict[ConePoint, tuple] = field(default_factory=dict)

    @classmethod
    def monomial(cls, base: DualNumberBase, pt: ConePoint, a: int | Fraction = 1, b: int | Fraction = 0) -> "RingElement":
        el = cls(base)
        el._accumulate(pt, base.coeff(a, b))
        return el

    @classmethod
    def zero(cls, base: DualNumberBase) -> "RingElement":
        return cls(base)

    def _accumulate(self, pt: ConePoint, c: tuple) -> None:
        cur = self.terms.get(pt, (0, 0))
        new = self.base.add(cur, c)
        if new[0] == 0 and new[1] == 0:
            self.terms.pop(pt, None)
        else:
            self.terms[pt] = new

    def __add__(self, other: "RingElement") -> "RingElement":
        _same_base(self, other)
        out = RingElement(self.base, dict(self.terms))
        for pt, c in other.terms.items():
            out._accumulate(pt, c)
        return out

    def scale(self, c: tuple) -> "RingElement":
        out = RingElement(self.base)
        for pt, v in self.terms.items():
            out._accumulate(pt, self.base.mul(c, v))
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RingElement) and self.base == other.base and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def eps_part(self) -> dict[ConePoint, int | Fraction]:
        return {pt: c[1] for pt, c in self.terms.items() if c[1]}

    def to_json(self) -> list:
        return [{"point": pt.to_json(), "coeff": [str(c[0]), str(c[1])]} for pt, c in sorted(self.terms.items())]


def _same_base(a: RingElement, b: RingElement) -> None:
    if a.base != b.base:
        raise ValueError("ring elements live over different bases")


def delta_z(pt: ConePoint, dual: LatticePolytope, base: DualNumberBase) -> RingElement:
    """The monomial at ``pt`` when it lies on the boundary of the cone, else zero."""
    if on_boundary(pt, dual):
        return RingElement.monomial(base, pt)
    return RingElement.zero(base)


def _bilinear(a: RingElement, b: RingElement, rule) -> RingElement:
    _same_base(a, b)
    out = RingElement(a.base)
    for pa, ca in a.terms.items():
        for pb, cb in b.terms.items():
            c = a.base.mul(ca, cb)
            for pt, e in rule(pa, pb):
                out._accumulate(pt, a.base.mul(c, e))
    return out


def mult_eps(a: RingElement, b: RingElement, dual: LatticePolytope) -> RingElement:
    """Product given termwise by z^x z^y = dz^(x+y) + eps dz^(x+y+(0,p)), with dz the boundary truncation.

    This is the displayed formula taken literally; see :func:`mult_quotient`
    for the product of the actual quotient ring.
    """
    p = a.base.direction

    def rule(x: ConePoint, y: ConePoint):
        s = x + y
        if on_boundary(s, dual):
            yield s, (1, 0)
        t = s.shift(p)
        if on_boundary(t, dual):
            yield t, (0, 1)

    return _bilinear(a, b, rule)


def mult_quotient(a: RingElement, b: RingElement, dual: LatticePolytope) -> RingElement:
    """Product in (S tensor k[eps]) / (z^(1,0) - eps z^(1,p)) on the boundary monomial basis.

    An interior exponent s rewrites as eps z^(s+(0,p)), which survives only
    when s + (0,p) is a boundary point.
    """
    p = a.base.direction

    def rule(x: ConePoint, y: ConePoint):
        s = x + y
        if on_boundary(s, dual):
            yield s, (1, 0)
            return
        t = s.shift(p)
        if on_boundary(t, dual):
            yield t, (0, 1)

    return _bilinear(a, b, rule)


def degree(pt: ConePoint) -> ConePoint:
    return pt


# ----------------------------------------------------------------------------
# witness points


@dataclass
class WitnessPair:
    first: ConePoint
    second: ConePoint
    strategy: str
    predicates: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.predicates.values())

    def to_json(self) -> dict:
        return {
            "first": self.first.to_json(),
            "second": self.second.to_json(),
            "strategy": self.strategy,
            "predicates": self.predicates,
        }


def witness_predicates(n1: ConePoint, n2: ConePoint, p: Sequence[int], dual: LatticePolytope) -> dict[str, bool]:
    """The six membership conditions, each checked independently."""
    s = n1 + n2
    return {
        "first on boundary": on_boundary(n1, dual),
        "second on boundary": on_boundary(n2, dual),
        "first shifted outside cone": not in_cone(n1.shift(p), dual),
        "second shifted outside cone": not in_cone(n2.shift(p), dual),
        "sum off boundary": not on_boundary(s, dual),
        "shifted sum on boundary": on_boundary(s.shift(p), dual),
    }


class WitnessNotFound(Exception):
    pass


def _check_in_P(p: tuple[int, ...], dual: LatticePolytope) -> None:
    if not dual.contains(p) or not any(p):
        raise ValueError(f"{p} is not a nonzero lattice point of the polytope")
    if carrier_face(p, dual).dim > dual.rank - 2:
        raise ValueError(f"{p} does not lie on a face of codimension at least two")


def _dual_pair(m1: Sequence[int], m2: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Integer w1, w2 with <m_i, w_j> = delta_ij, or None if (m1, m2) is not part of a basis."""
    diag, left, right = smith_normal_form([list(m1), list(m2)])
    if diag != [1, 1]:
        return None
    # left @ M @ right = D with D = [I | 0]; so M @ (right[:, :2]) @ ... solve M w = e_j
    n = len(m1)
    # w_j = right @ (D^+ left e_j): D^+ maps R^2 -> R^n padding zeros
    cols = []
    for j in range(2):
        y = [left[0][j], left[1][j]] + [0] * (n - 2)
        cols.append(tuple(sum(right[r][k] * y[k] for k in range(n)) for r in range(n)))
    return cols[0], cols[1]


def _recipe(p: tuple[int, ...], dual: LatticePolytope, height_bound: int) -> tuple[ConePoint, ConePoint] | None:
    g = carrier_face(p, dual)
    codim2 = [f for f in dual.faces if f.dim == dual.rank - 2 and g.vertices <= f.vertices]
    codim2.sort(key=lambda f: sorted(f.vertices))
    face = codim2[0]
    verts = [dual.vertices[i] for i in sorted(face.vertices)]
    q = tuple(Fraction(sum(v[k] for v in verts), len(verts)) for k in range(dual.rank))
    normals = [(a, b) for a, b, members in dual.facets if face.vertices <= members]
    if len(normals) != 2:
        return None
    (m1, _), (m2, _) = normals
    pair = _dual_pair(m1, m2)
    if pair is None:
        return None
    w1, w2 = pair
    r = tuple(-pi - a - b for pi, a, b in zip(p, w1, w2))
    v1 = tuple(a + c for a, c in zip(w1, r))
    v2 = w2
    k = math.lcm(*[x.denominator for x in q])
    K = k
    while K <= height_bound:
        n1 = ConePoint(K, tuple(int(K * qi) + vi for qi, vi in zip(q, v1)))
        n2 = ConePoint(K, tuple(int(K * qi) + vi for qi, vi in zip(q, v2)))
        if all(witness_predicates(n1, n2, p, dual).values()):
            return n1, n2
        K += k
    return None


def _search(p: tuple[int, ...], dual: LatticePolytope, height_bound: int) -> tuple[ConePoint, ConePoint] | None:
    layers = {j: [c for c in graded_basis(j, dual) if not in_cone(c.shift(p), dual)] for j in range(1, height_bound + 1)}
    for total in range(2, 2 * height_bound + 1):
        for j1 in range(1, total):
            j2 = total - j1
            if j2 < j1 or j2 > height_bound:
                continue
            for n1 in layers[j1]:
                for n2 in layers[j2]:
                    s = n1 + n2
                    if not on_boundary(s, dual) and on_boundary(s.shift(p), dual):
                        return n1, n2
    return None


def find_witness_points(
    p: Sequence[int], dual: LatticePolytope, height_bound: int, strategy: str = "auto"
) -> WitnessPair:
    """Boundary points whose product certifies that the deformation along ``p`` is nontrivial.

    ``strategy`` is ``"recipe"`` (construction through a codimension-two
    face), ``"search"`` (exhaustive up to ``height_bound``) or ``"auto"``
    (recipe, then search).
    """
    p = tuple(p)
    _check_in_P(p, dual)
    found = None
    used = strategy
    if strategy in ("recipe", "auto"):
        found = _recipe(p, dual, height_bound)
        used = "recipe"
    if found is None and strategy in ("search", "auto"):
        found = _search(p, dual, height_bound)
        used = "search"
    if found is None:
        raise WitnessNotFound(f"no witness pair for {p} up to height {height_bound}")
    preds = witness_predicates(found[0], found[1], p, dual)
    if not all(preds.values()):
        raise AssertionError(f"witness pair failed re-verification: {preds}")
    return WitnessPair(found[0], found[1], used, preds)


# ----------------------------------------------------------------------------
# gauge system


@dataclass
class NontrivialityCertificate:
    direction: tuple[int, ...]
    witnesses: WitnessPair | None
    product: RingElement | None
    contradiction_monomial: ConePoint | None
    gauge_verdict: str  # "infeasible", "feasible", "inconclusive" or "not run"
    degree_bound: int
    equations: int = 0
    unknowns: int = 0
    gauge: dict | None = None

    def to_json(self) -> dict:
        return {
            "direction": list(self.direction),
            "witnesses": None if self.witnesses is None else self.witnesses.to_json(),
            "product": None if self.product is None else self.product.to_json(),
            "contradiction_monomial": None if self.contradiction_monomial is None else self.contradiction_monomial.to_json(),
            "gauge_verdict": self.gauge_verdict,
            "degree_bound": self.degree_bound,
            "equations": self.equations,
            "unknowns": self.unknowns,
        }


def gauge_system(
    p: Sequence[int], dual: LatticePolytope, degree_bound: int, per_object: bool = True, prime: int | None = None
) -> tuple[SparseSystem, int]:
    """Linear conditions for a graded isomorphism F(z) = z + eps a z^(+(0,p)) trivialising the deformation.

    Unknowns are ``a(i, x)`` for objects ``0 <= i`` and monomials ``x`` with
    ``i + height(x) <= degree_bound``; with ``per_object=False`` the ansatz
    uses a single ``a(x)`` for all objects (a solution of that smaller system
    also solves the full one). The ring product used is the quotient product.
    """
    p = tuple(p)
    layers = {j: graded_basis(j, dual) for j in range(degree_bound + 1)}

    def var(i: int, x: ConePoint):
        return (i, x) if per_object else (0, x)

    def alive(x: ConePoint) -> bool:
        return on_boundary(x.shift(p), dual)

    system = SparseSystem(prime)
    unknowns = set()
    objects = range(degree_bound + 1) if per_object else range(1)
    for i in objects:
        for ja in range(degree_bound + 1):
            for jb in range(degree_bound + 1 - ja):
                if per_object and i + ja + jb > degree_bound:
                    continue
                for a in layers[ja]:
                    for b in layers[jb]:
                        s = a + b
                        if not on_boundary(s.shift(p), dual):
                            continue
                        coeffs: dict = {}
                        if alive(a):
                            coeffs[var(i, a)] = coeffs.get(var(i, a), 0) + 1
                        if alive(b):
                            k = var(i + ja, b)
                            coeffs[k] = coeffs.get(k, 0) + 1
                        if on_boundary(s, dual):
                            k = var(i, s)
                            coeffs[k] = coeffs.get(k, 0) - 1
                            rhs = 0
                        else:
                            rhs = 1
                        unknowns.update(coeffs)
                        system.add(coeffs, rhs, label=(i, a, b))
    return system, len(unknowns)


def nontriviality_certificate(
    p: Sequence[int], dual: LatticePolytope, degree_bound: int, witness_bound: int = 6, gauge: bool = True
) -> NontrivialityCertificate:
    """Witness pair, the product identity, and optionally the brute-force gauge verdict."""
    p = tuple(p)
    base = DualNumberBase(p)
    witnesses = None
    product_ = None
    monomial = None
    in_P = dual.contains(p) and any(p) and carrier_face(p, dual).dim <= dual.rank - 2
    if in_P:
        witnesses = find_witness_points(p, dual, witness_bound)
        product_ = mult_eps(
            RingElement.monomial(base, witnesses.first), RingElement.monomial(base, witnesses.second), dual
        )
        monomial = (witnesses.first + witnesses.second).shift(p)
        expected = RingElement.monomial(base, monomial, 0, 1)
        if product_ != expected:
            raise AssertionError("witness product does not reduce to the eps monomial")
    if not gauge:
        return NontrivialityCertificate(p, witnesses, product_, monomial, "not run", degree_bound)
    if degree_bound <= 0:
        return NontrivialityCertificate(p, witnesses, product_, monomial, "inconclusive", degree_bound)
    system, unknowns = gauge_system(p, dual, degree_bound, per_object=in_P)
    if not system.consistent:
        verdict = "infeasible"
        sol = None
    elif in_P:
        verdict = "inconclusive"
        sol = None
    else:
        verdict = "feasible"
        sol = system.solution()
    return NontrivialityCertificate(
        p, witnesses, product_, monomial, verdict, degree_bound, system.equations, unknowns, sol
    )


def roots(dual: LatticePolytope) -> list[tuple[int, ...]]:
    """Nonzero lattice points in the relative interior of facets."""
    pts = lattice_points(dual)
    return [q for q in pts if any(q) and pts.carriers[q].dim == dual.rank - 1]
