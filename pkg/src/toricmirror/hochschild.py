"""Hochschild cochains of graded linear categories and the Gerstenhaber calculus.

Conventions. A composable tuple ``a_1, ..., a_s`` has ``a_k`` in
``hom(X_{k-1}, X_k)`` and is keyed as ``(X_0, ((X_1, i_1), ..., (X_s, i_s)))``
with ``i_k`` a basis index. A cochain value is a sparse vector over the basis
of ``hom(X_0, X_s)``. A length-``s`` component with output degree
``sum |a_k| + t`` has cohomological degree ``t`` and Hochschild degree
``t + s``. The Koszul parity of a prefix is ``sum_{k<=j} |a_k| - j``.

Composition in the graded category is written ``g . f`` for
``f: X -> Y`` and ``g: Y -> Z``; its trivial A-infinity structure has
``mu^2(f, g) = (-1)^|f| g . f`` and nothing else.
"""

from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from pathlib import Path
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .polytope import LatticePolytope, _dot, polar_dual

Obj = Hashable
Key = tuple  # (X0, ((X1, i1), ..., (Xs, is)))
Vec = dict[int, int | Fraction]
Table = dict[Key, Vec]

TRUNCATION_CAVEAT = (
    "rank of a finite slice of the reduced complex over a finite full subcategory; "
    "corroborates the vanishing statement for the full complex but does not prove it"
)


@dataclass(frozen=True)
class Morphism:
    degree: int
    aux: tuple[int, ...] = ()
    label: str = ""


class CategoryError(ValueError):
    pass


class GradedCategory:
    """A finite graded linear category given by bases and composition constants.

    ``compose[(X, Y, Z)][(g, f)]`` is the sparse vector ``g . f`` in
    ``hom(X, Z)`` for basis indices ``f`` of ``hom(X, Y)`` and ``g`` of ``hom(Y, Z)``.
    ``units[X]`` is the basis index of the identity of ``X`` when present.
    """

    def __init__(
        self,
        objects: Sequence[Obj],
        homs: Mapping[tuple[Obj, Obj], Sequence[Morphism]],
        compose: Mapping[tuple[Obj, Obj, Obj], Mapping[tuple[int, int], Vec]],
        units: Mapping[Obj, int] | None = None,
        name: str = "",
    ) -> None:
        self.objects = list(objects)
        self.homs = {k: list(v) for k, v in homs.items() if v}
        self.compose = {k: {kk: dict(vv) for kk, vv in v.items()} for k, v in compose.items()}
        self.units = dict(units or {})
        self.name = name
        self._targets = {x: [y for y in self.objects if (x, y) in self.homs] for x in self.objects}
        self._in_degree: dict[Key, int] = {}
        self._tuple_lists: dict[int, list[Key]] = {}

    def hom(self, x: Obj, y: Obj) -> list[Morphism]:
        return self.homs.get((x, y), [])

    def degree(self, x: Obj, y: Obj, i: int) -> int:
        return self.homs[(x, y)][i].degree

    def aux(self, x: Obj, y: Obj, i: int) -> tuple[int, ...]:
        return self.homs[(x, y)][i].aux

    def comp(self, x: Obj, y: Obj, z: Obj, g: int, f: int) -> Vec:
        return self.compose.get((x, y, z), {}).get((g, f), {})

    @property
    def degrees(self) -> set[int]:
        return {m.degree for ms in self.homs.values() for m in ms}

    def is_unit(self, x: Obj, y: Obj, i: int) -> bool:
        return x == y and self.units.get(x) == i

    # -- tuples ----------------------------------------------------------

    def tuples(self, s: int, reduced: bool = False, start: Obj | None = None) -> Iterator[Key]:
        """Composable basis tuples of length ``s``, in a fixed order."""
        starts = self.objects if start is None else [start]
        for x0 in starts:
            yield from self._extend(x0, x0, (), s, reduced)

    def _extend(self, x0: Obj, cur: Obj, steps: tuple, s: int, reduced: bool) -> Iterator[Key]:
        if len(steps) == s:
            yield (x0, steps)
            return
        for y in self._targets[cur]:
            for i in range(len(self.homs[(cur, y)])):
                if reduced and self.is_unit(cur, y, i):
                    continue
                yield from self._extend(x0, y, steps + ((y, i),), s, reduced)

    def tuple_list(self, s: int) -> list[Key]:
        """``list(self.tuples(s))``, memoised."""
        if s not in self._tuple_lists:
            self._tuple_lists[s] = list(self.tuples(s))
        return self._tuple_lists[s]

    def in_degree(self, key: Key) -> int:
        """Total degree of the inputs of a tuple, memoised."""
        d = self._in_degree.get(key)
        if d is None:
            d = self._in_degree[key] = sum(self.key_degrees(key))
        return d

    def key_objects(self, key: Key) -> list[Obj]:
        return [key[0]] + [y for y, _ in key[1]]

    def key_degrees(self, key: Key) -> list[int]:
        objs = self.key_objects(key)
        return [self.degree(objs[k], objs[k + 1], i) for k, (_, i) in enumerate(key[1])]

    def key_aux(self, key: Key) -> tuple[int, ...] | None:
        objs = self.key_objects(key)
        total = None
        for k, (_, i) in enumerate(key[1]):
            a = self.aux(objs[k], objs[k + 1], i)
            total = a if total is None else tuple(p + q for p, q in zip(total, a))
        return total

    def key_ends(self, key: Key) -> tuple[Obj, Obj]:
        return key[0], (key[1][-1][0] if key[1] else key[0])

    # -- validation ------------------------------------------------------

    def check(self) -> list[str]:
        """Grading and associativity defects of ``(-1)^|f| g . f``; empty when valid."""
        bad = []
        for (x, y, z), table in self.compose.items():
            for (g, f), out in table.items():
                for h, c in out.items():
                    if not c:
                        continue
                    if self.degree(x, z, h) != self.degree(y, z, g) + self.degree(x, y, f):
                        bad.append(f"degree of {g}.{f} on {x}->{y}->{z}")
                    ax, ay = self.aux(x, z, h), tuple(p + q for p, q in zip(self.aux(y, z, g), self.aux(x, y, f)))
                    if ax != ay:
                        bad.append(f"auxiliary degree of {g}.{f} on {x}->{y}->{z}")
        for x, u in self.units.items():
            for y in self._targets[x]:
                for i in range(len(self.homs[(x, y)])):
                    if self.comp(x, x, y, i, u) != {i: 1}:
                        bad.append(f"unit of {x} fails on the right")
            for w in self.objects:
                for i in range(len(self.hom(w, x))):
                    if self.comp(w, x, x, u, i) != {i: 1}:
                        bad.append(f"unit of {x} fails on the left")
        for key in self.tuples(3):
            if mu_cd_assoc_defect(self, key):
                bad.append(f"associativity fails on {key}")
        return bad

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        idx = {x: k for k, x in enumerate(self.objects)}
        morphisms = []
        for (x, y), ms in sorted(self.homs.items(), key=lambda kv: (idx[kv[0][0]], idx[kv[0][1]])):
            for i, m in enumerate(ms):
                morphisms.append(
                    {"source": idx[x], "target": idx[y], "index": i, "degree": m.degree, "aux": list(m.aux), "label": m.label}
                )
        comps = []
        for (x, y, z), table in sorted(self.compose.items(), key=lambda kv: tuple(idx[o] for o in kv[0])):
            for (g, f), out in sorted(table.items()):
                out = {h: c for h, c in out.items() if c}
                if out:
                    comps.append(
                        {
                            "objects": [idx[x], idx[y], idx[z]],
                            "g": g,
                            "f": f,
                            "out": [[h, str(c)] for h, c in sorted(out.items())],
                        }
                    )
        return {
            "name": self.name,
            "objects": [str(x) for x in self.objects],
            "morphisms": morphisms,
            "compositions": comps,
            "units": {str(idx[x]): u for x, u in self.units.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "GradedCategory":
        objs = list(range(len(data["objects"])))
        homs: dict[tuple[int, int], list[Morphism]] = defaultdict(list)
        for m in sorted(data["morphisms"], key=lambda m: (m["source"], m["target"], m["index"])):
            lst = homs[(m["source"], m["target"])]
            if m["index"] != len(lst):
                raise CategoryError("morphism indices must be contiguous from 0")
            lst.append(Morphism(m["degree"], tuple(m.get("aux", ())), m.get("label", "")))
        comp: dict = defaultdict(dict)
        for c in data["compositions"]:
            x, y, z = c["objects"]
            comp[(x, y, z)][(c["g"], c["f"])] = {h: _num(v) for h, v in c["out"]}
        units = {int(k): v for k, v in data.get("units", {}).items()}
        return cls(objs, homs, comp, units, data.get("name", ""))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "GradedCategory":
        return cls.from_json(json.loads(Path(path).read_text()))


def _num(v: str | int) -> int | Fraction:
    f = Fraction(v)
    return int(f) if f.denominator == 1 else f


def mu_cd_assoc_defect(cat: GradedCategory, key: Key) -> Vec:
    """(h . g) . f - h . (g . f) on a composable triple."""
    x0, ((x1, f), (x2, g), (x3, h)) = key
    out: dict = defaultdict(int)
    for gf, c in cat.comp(x0, x1, x2, g, f).items():
        for r, d in cat.comp(x0, x2, x3, h, gf).items():
            out[r] += c * d
    for hg, c in cat.comp(x1, x2, x3, h, g).items():
        for r, d in cat.comp(x0, x1, x3, hg, f).items():
            out[r] -= c * d
    return {r: v for r, v in out.items() if v}


# ----------------------------------------------------------------------------
# cochains


def _clean(vec: Mapping[int, int | Fraction]) -> Vec:
    return {k: v for k, v in vec.items() if v}


@dataclass
class Cochain:
    """A finite Hochschild cochain of a single Hochschild degree."""

    category: GradedCategory
    degree: int
    table: Table = field(default_factory=dict)
    aux: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        self.table = {k: _clean(v) for k, v in self.table.items()}
        self.table = {k: v for k, v in self.table.items() if v}
        for key, vec in self.table.items():
            self._check_entry(key, vec)

    def _check_entry(self, key: Key, vec: Vec) -> None:
        cat = self.category
        x0, xs = cat.key_ends(key)
        s = len(key[1])
        ins = cat.in_degree(key)
        for h in vec:
            if h >= len(cat.hom(x0, xs)):
                raise CategoryError(f"output index {h} out of range on {key}")
            t = cat.degree(x0, xs, h) - ins
            if t + s != self.degree:
                raise CategoryError(f"entry on {key} has Hochschild degree {t + s}, expected {self.degree}")
            if self.aux is not None and s:
                got = tuple(a - b for a, b in zip(cat.aux(x0, xs, h), cat.key_aux(key)))
                if got != self.aux:
                    raise CategoryError(f"entry on {key} has auxiliary degree {got}, expected {self.aux}")

    @classmethod
    def _trusted(cls, cat: GradedCategory, degree: int, table: Table, aux: tuple[int, ...] | None = None) -> "Cochain":
        """Build from a table produced by an operation that preserves degrees; skips validation."""
        obj = cls.__new__(cls)
        obj.category, obj.degree, obj.aux = cat, degree, aux
        obj.table = {k: v for k, v in ((k, _clean(v)) for k, v in table.items()) if v}
        return obj

    @classmethod
    def zero(cls, cat: GradedCategory, degree: int) -> "Cochain":
        return cls(cat, degree, {})

    def lengths(self) -> set[int]:
        return {len(k[1]) for k in self.table}

    def component(self, s: int) -> "Cochain":
        return Cochain._trusted(self.category, self.degree, {k: v for k, v in self.table.items() if len(k[1]) == s}, self.aux)

    def truncate(self, cap: int) -> "Cochain":
        return Cochain._trusted(self.category, self.degree, {k: v for k, v in self.table.items() if len(k[1]) <= cap}, self.aux)

    def bidegrees(self) -> set[tuple[int, int]]:
        """(length, cohomological degree) of every nonzero term."""
        return {(len(k[1]), self.degree - len(k[1])) for k in self.table}

    def at(self, key: Key) -> Vec:
        return self.table.get(key, {})

    def is_zero(self) -> bool:
        return not self.table

    def _combine(self, other: "Cochain", sign: int) -> "Cochain":
        if other.category is not self.category:
            raise CategoryError("cochains over different categories")
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise CategoryError("adding cochains of different Hochschild degree")
        deg = self.degree if not self.is_zero() else other.degree
        out: dict = {k: dict(v) for k, v in self.table.items()}
        for k, v in other.table.items():
            tgt = out.setdefault(k, {})
            for h, c in v.items():
                tgt[h] = tgt.get(h, 0) + sign * c
        return Cochain._trusted(self.category, deg, out)

    def __add__(self, other: "Cochain") -> "Cochain":
        return self._combine(other, 1)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self._combine(other, -1)

    def scale(self, c: int | Fraction) -> "Cochain":
        return Cochain._trusted(self.category, self.degree, {k: {h: c * v for h, v in vec.items()} for k, vec in self.table.items()}, self.aux)

    def __neg__(self) -> "Cochain":
        return self.scale(-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self - other).is_zero() if self.category is other.category else False

    def to_json(self) -> dict:
        idx = {x: k for k, x in enumerate(self.category.objects)}
        rows = []
        for key in sorted(self.table, key=lambda k: _key_sort(k, idx)):
            rows.append(
                {
                    "start": idx[key[0]],
                    "inputs": [[idx[y], i] for y, i in key[1]],
                    "out": [[h, str(c)] for h, c in sorted(self.table[key].items())],
                }
            )
        return {"degree": self.degree, "entries": rows}


def _key_sort(key: Key, idx: Mapping[Obj, int]) -> tuple:
    return (len(key[1]), idx[key[0]], tuple((idx[y], i) for y, i in key[1]))


# ----------------------------------------------------------------------------
# Gerstenhaber calculus


def _same_category(phi: Cochain, psi: Cochain) -> GradedCategory:
    if phi.category is not psi.category:
        raise CategoryError("cochains over different categories")
    return phi.category


def gerstenhaber_product(phi: Cochain, psi: Cochain, length_cap: int | None = None) -> Cochain:
    """phi o psi: insert psi into every slot of phi with sign (-1)^((|psi|-1) eps_j).

    Terms of length above ``length_cap`` are dropped when a cap is given.
    """
    cat = _same_category(phi, psi)
    by_ends: dict[tuple[Obj, Obj], list[tuple[Key, Vec]]] = defaultdict(list)
    for key, vec in psi.table.items():
        by_ends[cat.key_ends(key)].append((key, vec))
    odd_psi = (psi.degree - 1) % 2
    out: dict[Key, dict] = defaultdict(lambda: defaultdict(int))
    for pkey, pvec in phi.table.items():
        x0, steps = pkey
        s_phi = len(steps)
        prev = x0
        parity = 0
        for j, (y, idx) in enumerate(steps):
            for qkey, qvec in by_ends.get((prev, y), ()):
                c = qvec.get(idx)
                if c:
                    new_len = s_phi - 1 + len(qkey[1])
                    if length_cap is None or new_len <= length_cap:
                        nkey = (x0, steps[:j] + qkey[1] + steps[j + 1 :])
                        sc = -c if (odd_psi and parity) else c
                        tgt = out[nkey]
                        for h, v in pvec.items():
                            tgt[h] += sc * v
            parity ^= (cat.degree(prev, y, idx) - 1) & 1
            prev = y
    return Cochain._trusted(cat, phi.degree + psi.degree - 1, {k: dict(v) for k, v in out.items()})


def product_at_slow(phi: Cochain, psi: Cochain, key: Key) -> Vec:
    """(phi o psi)(a_1, ..., a_s) evaluated term by term from the defining sum."""
    cat = _same_category(phi, psi)
    objs = cat.key_objects(key)
    steps = key[1]
    s = len(steps)
    degs = cat.key_degrees(key)
    out: dict[int, int | Fraction] = defaultdict(int)
    for j in range(s + 1):
        eps = sum(degs[:j]) - j
        sign = (-1) ** ((psi.degree - 1) * eps)
        for k in range(j, s + 1):
            inner = psi.at((objs[j], tuple(steps[j:k])))
            for b, cb in inner.items():
                outer = (objs[0], tuple(steps[:j]) + ((objs[k], b),) + tuple(steps[k:]))
                for h, v in phi.at(outer).items():
                    out[h] += sign * cb * v
    return _clean(out)


def gerstenhaber_bracket(phi: Cochain, psi: Cochain, length_cap: int | None = None) -> Cochain:
    sign = (-1) ** ((phi.degree - 1) * (psi.degree - 1))
    a = gerstenhaber_product(phi, psi, length_cap)
    b = gerstenhaber_product(psi, phi, length_cap)
    return a - b.scale(sign) if not b.is_zero() else a


# ----------------------------------------------------------------------------
# A-infinity structures


class NotAInfinity(ValueError):
    pass


@dataclass
class AInfinityStructure:
    """Components ``mu^s`` for ``s <= length_cap``; lengths above the cap are unknown."""

    category: GradedCategory
    cochain: Cochain
    length_cap: int

    def __post_init__(self) -> None:
        if self.cochain.degree != 2 and not self.cochain.is_zero():
            raise CategoryError("an A-infinity structure has Hochschild degree 2")
        if any(s > self.length_cap for s in self.cochain.lengths()):
            raise CategoryError("structure has components above its length cap")

    def component(self, s: int) -> Cochain:
        return self.cochain.component(s)

    @property
    def admissible(self) -> bool:
        base = mu_cd(self.category)
        low = self.cochain.truncate(2)
        return low == base


def mu_cd(cat: GradedCategory) -> Cochain:
    """The trivial structure: mu^2(f, g) = (-1)^|f| g . f, all else zero."""
    table: Table = {}
    for (x, y, z), comp in cat.compose.items():
        for (g, f), vec in comp.items():
            sign = -1 if cat.degree(x, y, f) % 2 else 1
            key = (x, ((y, f), (z, g)))
            table[key] = {h: sign * c for h, c in vec.items()}
    return Cochain(cat, 2, table)


def trivial_structure(cat: GradedCategory, length_cap: int = 2) -> AInfinityStructure:
    return AInfinityStructure(cat, mu_cd(cat), length_cap)


def check_ainfinity(mu: AInfinityStructure | Cochain, length_cap: int) -> bool:
    """mu^0 = 0 and (mu o mu) vanishes on every tuple of length <= length_cap."""
    c = mu.cochain if isinstance(mu, AInfinityStructure) else mu
    if c.component(0).table:
        return False
    return gerstenhaber_product(c, c, length_cap).is_zero()


def hochschild_differential(
    mu: AInfinityStructure | Cochain, phi: Cochain, length_cap: int | None = None, verify: bool = True
) -> Cochain:
    """d_mu(phi) = [mu, phi]; a structure failing the A-infinity test is rejected."""
    c = mu.cochain if isinstance(mu, AInfinityStructure) else mu
    if verify:
        cap = mu.length_cap if isinstance(mu, AInfinityStructure) else 2 * max(c.lengths() | {1})
        if not check_ainfinity(c, cap):
            raise NotAInfinity("mu o mu does not vanish")
    return gerstenhaber_bracket(c, phi, length_cap)


# ----------------------------------------------------------------------------
# formal diffeomorphisms


@dataclass
class FormalDiffeomorphism:
    """A pre-functor that is the identity on objects with F^1 = id.

    ``higher`` holds the components F^s for s >= 2 as a Hochschild-degree-1 cochain.
    """

    category: GradedCategory
    higher: Cochain

    def __post_init__(self) -> None:
        if self.higher.is_zero():
            self.higher = Cochain(self.category, 1)
        if self.higher.degree != 1:
            raise CategoryError("a formal diffeomorphism has Hochschild degree 1")
        if 0 in self.higher.lengths():
            raise CategoryError("F^0 must vanish (curved input)")
        if 1 in self.higher.lengths():
            raise CategoryError("F^1 is fixed to the identity")

    @classmethod
    def identity(cls, cat: GradedCategory) -> "FormalDiffeomorphism":
        return cls(cat, Cochain(cat, 1))

    def full(self) -> Cochain:
        """F as a cochain including the identity component."""
        cat = self.category
        ident: Table = {}
        for (x, y), ms in cat.homs.items():
            for i in range(len(ms)):
                ident[(x, ((y, i),))] = {i: 1}
        return Cochain(cat, 1, ident) + self.higher

    def apply(self, key: Key) -> Vec:
        if len(key[1]) == 1:
            return {key[1][0][1]: 1}
        return self.higher.at(key)

    def max_length(self) -> int:
        return max(self.higher.lengths() | {1})

    def compose(self, inner: "FormalDiffeomorphism", length_cap: int) -> "FormalDiffeomorphism":
        """(self o inner)^s = sum F^k(G(block_1), ..., G(block_k)), no signs."""
        cat = self.category
        table: Table = {}
        for s in range(2, length_cap + 1):
            for key in cat.tuples(s):
                vec = _apply_blocks(cat, key, self.apply, inner.apply, s)
                if vec:
                    table[key] = vec
        return FormalDiffeomorphism(cat, Cochain(cat, 1, table))


def _compositions(s: int) -> Iterator[tuple[int, ...]]:
    if s == 0:
        yield ()
        return
    for first in range(1, s + 1):
        for rest in _compositions(s - first):
            yield (first,) + rest


def _apply_blocks(
    cat: GradedCategory,
    key: Key,
    outer: Callable[[Key], Vec],
    inner: Callable[[Key], Vec],
    max_blocks: int,
    skip_all_singletons: bool = False,
) -> Vec:
    """sum over block decompositions of outer(inner(block_1), ..., inner(block_k))."""
    objs = cat.key_objects(key)
    steps = key[1]
    s = len(steps)
    out: dict[int, int | Fraction] = defaultdict(int)
    for comp in _compositions(s):
        if len(comp) > max_blocks or (skip_all_singletons and len(comp) == s):
            continue
        cuts = [0]
        for c in comp:
            cuts.append(cuts[-1] + c)
        vecs = []
        for a, b in zip(cuts, cuts[1:]):
            v = inner((objs[a], tuple(steps[a:b])))
            if not v:
                break
            vecs.append((objs[b], v))
        else:
            for choice in iproduct(*[list(v.items()) for _, v in vecs]):
                coef = 1
                nsteps = []
                for (y, _), (idx, c) in zip(vecs, choice):
                    coef *= c
                    nsteps.append((y, idx))
                for h, c in outer((objs[0], tuple(nsteps))).items():
                    out[h] += coef * c
    return _clean(out)


def pushforward_structure(F: FormalDiffeomorphism, mu: AInfinityStructure, length_cap: int | None = None) -> AInfinityStructure:
    """The unique structure making F a strict isomorphism, solved length by length.

    At length s the functor equation reads
    ``mu~^s(a) = (F o mu)(a) - sum_{k<s} mu~^k(F(block_1), ..., F(block_k))``.
    """
    cat = F.category
    if F.category is not mu.category:
        raise CategoryError("functor and structure over different categories")
    cap = mu.length_cap if length_cap is None else length_cap
    if cap > mu.length_cap:
        raise CategoryError("cannot push forward beyond the structure's length cap")
    if mu.cochain.component(0).table:
        raise CategoryError("curved structures are not supported")
    f_mu = gerstenhaber_product(F.full(), mu.cochain, cap)
    new: Table = {}

    def mu_new(key: Key) -> Vec:
        return new.get(key, {})

    for s in range(1, cap + 1):
        for key in cat.tuples(s):
            vec: dict = defaultdict(int)
            for h, c in f_mu.at(key).items():
                vec[h] += c
            if s > 1:
                for h, c in _apply_blocks(cat, key, mu_new, F.apply, s - 1).items():
                    vec[h] -= c
            vec = _clean(vec)
            if vec:
                new[key] = vec
    return AInfinityStructure(cat, Cochain(cat, 2, new), cap)


def functor_defect(F: FormalDiffeomorphism, mu: AInfinityStructure, mu_new: AInfinityStructure, length_cap: int) -> list[Key]:
    """Tuples of length <= cap where the functor equation fails."""
    cat = F.category
    f_mu = gerstenhaber_product(F.full(), mu.cochain, length_cap)
    bad = []
    for s in range(1, length_cap + 1):
        for key in cat.tuples(s):
            lhs = _apply_blocks(cat, key, mu_new.cochain.at, F.apply, s)
            if _clean({h: lhs.get(h, 0) - f_mu.at(key).get(h, 0) for h in set(lhs) | set(f_mu.at(key))}):
                bad.append(key)
    return bad


# ----------------------------------------------------------------------------
# obstruction classes


@dataclass
class ObstructionResult:
    length: int
    cocycle: Cochain
    is_cocycle: bool
    primitive: Cochain | None = None

    @property
    def is_coboundary(self) -> bool | None:
        return None if self.primitive is None and not self.is_cocycle else self.primitive is not None

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "is_cocycle": self.is_cocycle,
            "is_coboundary": self.primitive is not None,
            "nonzero_entries": len(self.cocycle.table),
        }


def obstruction_cocycle(
    mu: AInfinityStructure, mu_tilde: AInfinityStructure, s: int, solve_primitive: bool = False
) -> ObstructionResult:
    """c = mu~^s - mu^s for admissible structures agreeing below length s."""
    cat = mu.category
    if s < 3:
        raise ValueError("obstructions start at length 3")
    cap = min(mu.length_cap, mu_tilde.length_cap)
    if cap < s + 1:
        raise ValueError(f"structures must be known up to length {s + 1}")
    for m in (mu, mu_tilde):
        if not m.admissible:
            raise ValueError("structure is not admissible")
        if not check_ainfinity(m, cap):
            raise ValueError("structure fails the A-infinity equation below its cap")
    for k in range(s):
        if mu.component(k) != mu_tilde.component(k):
            raise ValueError(f"structures differ at length {k} < {s}")
    c = mu_tilde.component(s) - mu.component(s)
    base = mu_cd(cat)
    dc = gerstenhaber_bracket(base, c)
    res = ObstructionResult(s, c, dc.is_zero())
    if solve_primitive and res.is_cocycle:
        res.primitive = solve_coboundary(c, s - 1)
    return res


def _basis(cat: GradedCategory, s: int, hdeg: int, reduced: bool, aux: tuple[int, ...] | None) -> list[tuple[Key, int]]:
    out = []
    for key in cat.tuples(s, reduced):
        x0, xs = cat.key_ends(key)
        ins = sum(cat.key_degrees(key))
        kaux = cat.key_aux(key) if s else None
        for h, m in enumerate(cat.hom(x0, xs)):
            if m.degree - ins + s != hdeg:
                continue
            if aux is not None and s and tuple(a - b for a, b in zip(m.aux, kaux)) != aux:
                continue
            out.append((key, h))
    return out


def solve_coboundary(c: Cochain, length: int) -> Cochain | None:
    """Some x of the given length with [mu_CD, x] = c, or None when none exists."""
    from .linalg import SparseSystem

    cat = c.category
    base = mu_cd(cat)
    cols = _basis(cat, length, c.degree - 1, False, None)
    images = []
    for key, h in cols:
        e = Cochain(cat, c.degree - 1, {key: {h: 1}})
        images.append(gerstenhaber_bracket(base, e).table)
    rows: dict[tuple[Key, int], dict[int, int]] = defaultdict(dict)
    for j, img in enumerate(images):
        for key, vec in img.items():
            for h, v in vec.items():
                rows[(key, h)][j] = v
    targets = {(key, h): v for key, vec in c.table.items() for h, v in vec.items()}
    system = SparseSystem()
    for r in sorted(set(rows) | set(targets), key=lambda kh: repr(kh)):
        system.add(rows.get(r, {}), Fraction(targets.get(r, 0)), label=repr(r))
    if not system.consistent:
        return None
    sol = system.solution()
    table: Table = defaultdict(dict)
    for j, (key, h) in enumerate(cols):
        v = sol.get(j, 0)
        if v:
            table[key][h] = v
    return Cochain(cat, c.degree - 1, dict(table))


# ----------------------------------------------------------------------------
# truncated Hochschild cohomology


def _sparse_rank_mod_p(vectors: Iterable[Mapping[int, int]], p: int) -> int:
    pivots: dict[int, dict[int, int]] = {}
    for v in vectors:
        row = {k: x % p for k, x in v.items() if x % p}
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                inv = pow(row[lead], p - 2, p)
                pivots[lead] = {k: x * inv % p for k, x in row.items()}
                break
            f = row[lead]
            for k, x in piv.items():
                nv = (row.get(k, 0) - f * x) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return len(pivots)


@dataclass
class HHRank:
    bidegree: tuple[int, int]
    aux: tuple[int, ...] | None
    rank: int
    dims: tuple[int, int, int]
    lengths: tuple[int, int, int]
    exact: bool
    caveat: str = TRUNCATION_CAVEAT

    def to_json(self) -> dict:
        return {
            "hochschild_degree": self.bidegree[0],
            "cohomological_degree": self.bidegree[1],
            "aux_degree": list(self.aux) if self.aux is not None else None,
            "rank": self.rank,
            "cochain_dims": list(self.dims),
            "lengths": list(self.lengths),
            "exact": self.exact,
            "caveat": self.caveat,
        }


def graded_hh_rank(
    cat: GradedCategory,
    bidegree: tuple[int, int],
    length_cap: int,
    aux: tuple[int, ...] | None = None,
    prime: int = 2_147_483_647,
) -> HHRank:
    """Rank of H^j of the reduced complex of mu_CD in cohomological degree t.

    A reduced cochain of Hochschild degree j and cohomological degree t has
    length j - t, so the slice needs lengths up to j + 1 - t. The rank is
    computed over GF(prime); a zero answer therefore holds over Q as well,
    and a positive answer is an upper bound (``exact`` is False).
    """
    j, t = bidegree
    lengths = (j - 1 - t, j - t, j + 1 - t)
    if lengths[2] > length_cap:
        raise ValueError(f"slice needs cochains of length {lengths[2]} beyond the cap {length_cap}")
    base = mu_cd(cat)

    def basis(s: int, hdeg: int) -> list[tuple[Key, int]]:
        return _basis(cat, s, hdeg, True, aux) if s >= 0 else []

    prev, cur = basis(lengths[0], j - 1), basis(lengths[1], j)
    index: dict[tuple[Key, int], int] = {}

    def images(cols: list[tuple[Key, int]], hdeg: int) -> Iterator[dict[int, int]]:
        for key, h in cols:
            e = Cochain(cat, hdeg, {key: {h: 1}})
            img = gerstenhaber_bracket(base, e).table
            vec = {}
            for k2, v2 in img.items():
                for h2, c in v2.items():
                    r = index.setdefault((k2, h2), len(index))
                    vec[r] = c
            yield vec

    r_in = _sparse_rank_mod_p(images(prev, j - 1), prime)
    index.clear()
    r_out = _sparse_rank_mod_p(images(cur, j), prime)
    rank = len(cur) - r_in - r_out
    return HHRank((j, t), aux, rank, (len(prev), len(cur), len(index)), lengths, rank == 0)


# ----------------------------------------------------------------------------
# test categories


def point_category() -> GradedCategory:
    """One object whose endomorphisms are the ground field."""
    return GradedCategory([0], {(0, 0): [Morphism(0, (), "1")]}, {(0, 0, 0): {(0, 0): {0: 1}}}, {0: 0}, "point")


def sphere_category(d: int) -> GradedCategory:
    """One object with endomorphisms H^*(S^d): the unit and a class of degree d squaring to 0."""
    if d <= 0:
        raise ValueError("d must be positive")
    homs = {(0, 0): [Morphism(0, (), "1"), Morphism(d, (), "w")]}
    comp = {(0, 0, 0): {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}}
    return GradedCategory([0], homs, comp, {0: 0}, f"sphere-{d}")


def projective_line_category() -> GradedCategory:
    """O and O(1) on the projective line: two arrows x, y of degree 0 from O to O(1)."""
    homs = {
        (0, 0): [Morphism(0, (0, 0), "1")],
        (1, 1): [Morphism(0, (0, 0), "1")],
        (0, 1): [Morphism(0, (1, 0), "x"), Morphism(0, (0, 1), "y")],
    }
    comp = {
        (0, 0, 0): {(0, 0): {0: 1}},
        (1, 1, 1): {(0, 0): {0: 1}},
        (0, 0, 1): {(0, 0): {0: 1}, (1, 0): {1: 1}},
        (0, 1, 1): {(0, 0): {0: 1}, (0, 1): {1: 1}},
    }
    return GradedCategory([0, 1], homs, comp, {0: 0, 1: 0}, "projective-line")


def boundary_category(delta: LatticePolytope, twists: Sequence[int]) -> GradedCategory:
    """Line bundles O(i) on the toric boundary attached to ``delta``, with homs H^0 and H^d.

    Hom(O(i), O(j)) is H^0(O(j - i)) in degree 0 (boundary points of
    (j - i) times the dual polytope) for j >= i and H^d(O(j - i)) in degree
    d = rank - 1 for j <= i (characters u with -u such a boundary point).
    Degree-0 classes multiply as boundary monomials, vanishing unless the
    exponents share a facet; degree-0 classes act on degree-d classes by the
    transpose of that multiplication under the trace pairing; degree-d classes
    multiply to zero. The auxiliary grading is the character.
    """
    from .coordring import graded_basis

    dual = polar_dual(delta, strict=True)
    d = delta.rank - 1
    objs = list(twists)
    n = delta.rank
    zero = tuple([0] * n)

    def faces_of(x: Sequence[int], k: int) -> frozenset:
        return frozenset(i for i, v in enumerate(delta.vertices) if _dot(v, x) == -k)

    homs: dict = {}
    for a in objs:
        for b in objs:
            ms = []
            k = b - a
            if k >= 0:
                for cp in graded_basis(k, dual):
                    ms.append(Morphism(0, cp.character, f"z{list(cp.character)}"))
            if k <= 0:
                for cp in graded_basis(-k, dual):
                    u = tuple(-c for c in cp.character)
                    ms.append(Morphism(d, u, f"h{list(u)}"))
            homs[(a, b)] = ms
    lookup = {(a, b): {(m.degree, m.aux): i for i, m in enumerate(ms)} for (a, b), ms in homs.items()}

    def product(a: int, b: int, c: int, g: Morphism, f: Morphism) -> tuple[int, tuple] | None:
        if f.degree and g.degree:
            return None
        if not f.degree and not g.degree:
            if faces_of(f.aux, b - a) & faces_of(g.aux, c - b):
                return 0, tuple(p + q for p, q in zip(f.aux, g.aux))
            return None
        m, mt = (f, b - a) if f.degree == 0 else (g, c - b)
        h = g if f.degree == 0 else f
        target = c - a
        if target > 0:
            return None
        # membership of u in the target basis is settled by the lookup below
        u = tuple(p + q for p, q in zip(h.aux, m.aux))
        neg = tuple(-x for x in u)
        if not (faces_of(neg, -target) & faces_of(m.aux, mt)):
            return None
        return d, u

    comp: dict = defaultdict(dict)
    for a in objs:
        for b in objs:
            for c in objs:
                for fi, f in enumerate(homs[(a, b)]):
                    for gi, g in enumerate(homs[(b, c)]):
                        r = product(a, b, c, g, f)
                        if r is None:
                            continue
                        h = lookup[(a, c)].get(r)
                        if h is not None:
                            comp[(a, b, c)][(gi, fi)] = {h: 1}
    units = {a: lookup[(a, a)][(0, zero)] for a in objs}
    return GradedCategory(objs, homs, comp, units, f"boundary{list(twists)}")


def boundary_dimension(cat: GradedCategory) -> int:
    return max(cat.degrees)


# ----------------------------------------------------------------------------
# random inputs for property checks


def random_cochain(
    cat: GradedCategory, degree: int, lengths: Sequence[int], rng: random.Random, density: float = 0.5, coeff: int = 3
) -> Cochain:
    table: Table = {}
    for s in lengths:
        for key in cat.tuple_list(s):
            x0, xs = cat.key_ends(key)
            ins = cat.in_degree(key)
            vec = {}
            for h, m in enumerate(cat.hom(x0, xs)):
                if m.degree - ins + s == degree and rng.random() < density:
                    c = rng.randint(-coeff, coeff)
                    if c:
                        vec[h] = c
            if vec:
                table[key] = vec
    return Cochain._trusted(cat, degree, table)


def random_diffeomorphism(cat: GradedCategory, lengths: Sequence[int], rng: random.Random, density: float = 0.5) -> FormalDiffeomorphism:
    return FormalDiffeomorphism(cat, random_cochain(cat, 1, [s for s in lengths if s >= 2], rng, density))


# ----------------------------------------------------------------------------
# randomized self-test


@dataclass
class SelfTestReport:
    counts: dict[str, int]
    failures: dict[str, list[str]]
    seed: int
    length_cap: int
    categories: list[str]

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "seed": self.seed,
            "length_cap": self.length_cap,
            "categories": self.categories,
            "assertions": dict(sorted(self.counts.items())),
            "failures": {k: v[:5] for k, v in sorted(self.failures.items())},
        }


def default_test_categories() -> list[GradedCategory]:
    from .corpus import load

    tri = load("triangle")
    return [
        sphere_category(1),
        sphere_category(2),
        projective_line_category(),
        boundary_category(tri, [0]),
        boundary_category(tri, [0, 1]),
    ]


def _admits_gauge(cat: GradedCategory, max_tuples: int = 2000) -> bool:
    """Whether random length-2 degree-1 cochains can be nonzero and pushforward stays cheap."""
    degs = set(cat.degrees)
    odd = any((a - b) % 2 for a in degs for b in degs) or any(d % 2 for d in degs)
    count = 0
    for _ in cat.tuples(4):
        count += 1
        if count > max_tuples:
            return False
    return odd


def _random_degree(rng: random.Random) -> int:
    return rng.randint(-1, 3)


def selftest(
    trials: int = 100,
    seed: int = 0,
    length_cap: int = 4,
    product_trials: int | None = None,
    categories: Sequence[GradedCategory] | None = None,
) -> SelfTestReport:
    """Randomised identities of the Gerstenhaber calculus and of pushforwards.

    Each trial draws a category and random cochains and records one
    assertion per family: d^2 = 0, the graded Jacobi identity, bidegree
    bookkeeping of the product, and that the first obstruction of a random
    pushforward is a coboundary of the expected cochain. Fast and slow
    product evaluators are compared on ``product_trials`` tuples.
    """
    rng = random.Random(seed)
    cats = list(categories) if categories is not None else default_test_categories()
    counts: dict[str, int] = defaultdict(int)
    failures: dict[str, list[str]] = defaultdict(list)
    cap = length_cap

    def note(name: str, ok: bool, info: str) -> None:
        counts[name] += 1
        if not ok:
            failures[name].append(info)

    def rand(cat: GradedCategory, deg: int, lo: int = 1, hi: int = 2) -> Cochain:
        # redraw a few times so that most assertions see a nonzero input
        density = min(0.4, 40 / max(1, len(cat.tuple_list(hi))))
        for _ in range(5):
            c = random_cochain(cat, deg, list(range(lo, hi + 1)), rng, density=density)
            if not c.is_zero():
                break
        return c

    gauge_cats = [c for c in cats if _admits_gauge(c)]

    for trial in range(trials):
        cat = cats[trial % len(cats)]
        tag = f"{cat.name} trial {trial}"
        base = mu_cd(cat)

        phi = rand(cat, _random_degree(rng))
        dphi = gerstenhaber_bracket(base, phi, cap)
        note("d_squared", gerstenhaber_bracket(base, dphi, cap).is_zero(), tag)

        a, b, c = (rand(cat, _random_degree(rng)) for _ in range(3))
        lhs = gerstenhaber_bracket(a, gerstenhaber_bracket(b, c, cap), cap)
        sign = (-1) ** ((a.degree - 1) * (b.degree - 1))
        rhs = gerstenhaber_bracket(gerstenhaber_bracket(a, b, cap), c, cap) + gerstenhaber_bracket(
            b, gerstenhaber_bracket(a, c, cap), cap
        ).scale(sign)
        note("jacobi", (lhs - rhs).is_zero(), tag)

        s1, s2 = rng.randint(0, 3), rng.randint(1, 3)
        p = random_cochain(cat, _random_degree(rng), [s1], rng, 0.6)
        q = random_cochain(cat, _random_degree(rng), [s2], rng, 0.6)
        expect = {(s1 + s2 - 1, (p.degree - s1) + (q.degree - s2))}
        got = gerstenhaber_product(p, q).bidegrees()
        note("bidegree", got <= expect, f"{tag}: {got} vs {expect}")

        gcat = gauge_cats[trial % len(gauge_cats)] if gauge_cats else cat
        base_g = mu_cd(gcat)
        F = random_diffeomorphism(gcat, [2], rng, 0.6)
        mu = trivial_structure(gcat, 4)
        pushed = pushforward_structure(F, mu, 4)
        ok = pushed.admissible and check_ainfinity(pushed, 4) and not functor_defect(F, mu, pushed, 4)
        res = obstruction_cocycle(mu, pushed, 3, solve_primitive=True)
        expected = -gerstenhaber_bracket(base_g, F.higher.component(2), 3).component(3)
        ok = ok and res.is_cocycle and res.primitive is not None and res.cocycle == expected
        note("pushforward", ok, f"{gcat.name} trial {trial}")

    n_products = trials * 10 if product_trials is None else product_trials
    for k in range(n_products):
        cat = cats[k % len(cats)]
        phi = rand(cat, _random_degree(rng), 1, 3)
        psi = rand(cat, _random_degree(rng), 0, 2)
        fast = gerstenhaber_product(phi, psi)
        if fast.table and rng.random() < 0.5:
            keys = sorted(fast.table, key=repr)
        else:
            keys = list(cat.tuples(rng.randint(0, 3)))
        key = keys[rng.randrange(len(keys))]
        slow = product_at_slow(phi, psi, key)
        note("fast_vs_slow", slow == fast.at(key), f"{cat.name} product {k} at {key}")

    return SelfTestReport(dict(counts), {k: v for k, v in failures.items() if v}, seed, cap, [c.name for c in cats])
