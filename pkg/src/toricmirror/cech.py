"""Čech cohomology of O(k F) on a smooth complete toric variety and on its
toric boundary, one character at a time.

The variety is built from the face fan of a reflexive polytope (its rays are
the polytope's vertices); characters live in the dual lattice. A character
``u`` gives the monomial ``z^u``, which is a section of ``O(k F)`` over the
chart of a cone ``tau`` iff ``<u, v> >= -k`` for every ray ``v`` of ``tau``.
On the boundary the chart ring is the semigroup ring modulo the product of
the ray coordinates, so ``z^u`` additionally needs some ray of ``tau`` with
``<u, v> = -k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .fan import Fan, face_fan, regularity_flags
from .linalg import det, rank, rank_mod_p, solve
from .polytope import LatticePolytope, _dot

AMBIENT = "ambient"
BOUNDARY = "boundary"


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


@dataclass
class ToricSpace:
    """The smooth complete toric variety of a face fan, with its chart data."""

    fan: Fan
    rays: list[tuple[int, ...]] = field(init=False)
    cones: list[frozenset[int]] = field(init=False)
    star: dict[int, list[int]] = field(init=False)

    def __post_init__(self) -> None:
        simplicial, smooth = regularity_flags(self.fan)
        if not smooth:
            raise ValueError("Čech model needs a smooth complete fan")
        self.rays = list(self.fan.rays)
        index = {r: i for i, r in enumerate(self.rays)}
        self.cones = [frozenset(index[g] for g in c.generators) for c in self.fan.maximal]
        self.star = {i: [c for c, s in enumerate(self.cones) if i in s] for i in range(len(self.rays))}
        self._cache: dict[tuple, list[int]] = {}

    @classmethod
    def of(cls, delta: LatticePolytope) -> "ToricSpace":
        """The variety whose fan is the face fan of ``delta``."""
        return cls(face_fan(delta))

    @property
    def rank(self) -> int:
        return self.fan.rank

    @property
    def boundary_dim(self) -> int:
        return self.rank - 1

    def pattern(self, u: Sequence[int], k: int) -> tuple[int, ...]:
        return tuple(_sign(_dot(u, v) + k) for v in self.rays)

    def common_face(self, cells: Iterable[int]) -> frozenset[int]:
        out = None
        for c in cells:
            out = self.cones[c] if out is None else out & self.cones[c]
        return out if out is not None else frozenset()

    # -- occupancy -------------------------------------------------------

    def occupancy(self, u: Sequence[int], k: int, cells: Iterable[int], space: str) -> bool:
        cells = list(cells)
        if not cells:
            raise ValueError("overlap must be nonempty")
        return _occupied(self.pattern(u, k), self.common_face(cells), space)

    def _cells(self, pattern: tuple[int, ...], space: str) -> dict[int, list[tuple[int, ...]]]:
        """Occupied Čech cells, grouped by degree."""
        m = len(self.cones)
        bad = {i for i, s in enumerate(pattern) if s < 0}
        found: set[tuple[int, ...]] = set()
        if space == AMBIENT:
            for size in range(1, m + 1):
                for sub in combinations(range(m), size):
                    if not (self.common_face(sub) & bad):
                        found.add(sub)
        else:
            zeros = [i for i, s in enumerate(pattern) if s == 0]
            for v in zeros:
                st = self.star[v]
                for size in range(1, len(st) + 1):
                    for sub in combinations(st, size):
                        if sub in found:
                            continue
                        if not (self.common_face(sub) & bad):
                            found.add(sub)
        out: dict[int, list[tuple[int, ...]]] = {}
        for sub in sorted(found):
            out.setdefault(len(sub) - 1, []).append(sub)
        return out

    def character_cohomology(self, u: Sequence[int], k: int, space: str, prime: int | None = None) -> list[int]:
        """Ranks h^0..h^(top) of the complex for the character ``u``."""
        return self.pattern_cohomology(self.pattern(u, k), space, prime)

    def pattern_cohomology(self, pattern: tuple[int, ...], space: str, prime: int | None = None) -> list[int]:
        key = (pattern, space, prime)
        if key in self._cache:
            return self._cache[key]
        top = self.rank if space == AMBIENT else self.boundary_dim
        cells = self._cells(pattern, space)
        dims = [len(cells.get(q, [])) for q in range(len(self.cones))]
        ranks = []
        for q in range(len(self.cones) - 1):
            src = cells.get(q, [])
            dst = cells.get(q + 1, [])
            if not src or not dst:
                ranks.append(0)
                continue
            pos = {c: i for i, c in enumerate(src)}
            mat = np.zeros((len(dst), len(src)), dtype=np.int64)
            for r, c in enumerate(dst):
                for j in range(len(c)):
                    face = c[:j] + c[j + 1 :]
                    if face in pos:
                        mat[r, pos[face]] = -1 if j % 2 else 1
            ranks.append(rank(mat) if prime is None else rank_mod_p(mat, prime))
        h = []
        for q in range(len(dims)):
            r_out = ranks[q] if q < len(ranks) else 0
            r_in = ranks[q - 1] if q >= 1 else 0
            h.append(dims[q] - r_out - r_in)
        if any(h[q] for q in range(top + 1, len(h))):
            raise AssertionError("cohomology above the dimension of the space")
        h = h[: top + 1] + [0] * max(0, top + 1 - len(h))
        self._cache[key] = h
        return h

    def euler_from_cells(self, pattern: tuple[int, ...], space: str) -> int:
        cells = self._cells(pattern, space)
        return sum((-1) ** q * len(v) for q, v in cells.items())

    # -- character range -------------------------------------------------

    def character_box(self, k: int, margin: int = 2) -> tuple[list[tuple[int, ...]], list[int], list[int]]:
        """Characters in a box around every vertex of the hyperplane arrangement <u, v> = -k."""
        n = self.rank
        verts = [tuple(0 for _ in range(n))]
        for sub in combinations(self.rays, n):
            if det([list(v) for v in sub]) == 0:
                continue
            sol = solve([list(v) for v in sub], [-k] * n)
            verts.append(tuple(sol))
        lo = [int(min(v[i] for v in verts)) - margin for i in range(n)]
        hi = [int(max(v[i] for v in verts)) + 1 + margin for i in range(n)]
        return [tuple(c) for c in product(*[range(a, b + 1) for a, b in zip(lo, hi)])], lo, hi


def _occupied(pattern: tuple[int, ...], face: frozenset[int], space: str) -> bool:
    if any(pattern[i] < 0 for i in face):
        return False
    if space == AMBIENT:
        return True
    return any(pattern[i] == 0 for i in face)


def section_occupancy(space_: ToricSpace, u: Sequence[int], k: int, overlap: Iterable[int], space: str) -> bool:
    """Whether z^u is a nonzero section of O(kF) over the intersection of the listed charts."""
    return space_.occupancy(u, k, overlap, space)


@dataclass
class CohomologyTable:
    twist: int
    space: str
    ranks: list[int]
    per_character: dict[tuple[int, ...], list[int]]

    def to_json(self, with_characters: bool = False) -> dict:
        out = {"twist": self.twist, "space": self.space, "ranks": self.ranks}
        if with_characters:
            out["characters"] = [{"character": list(u), "ranks": h} for u, h in sorted(self.per_character.items())]
        return out


def cech_cohomology(
    variety: ToricSpace, k: int, space: str = BOUNDARY, prime: int | None = None, margin: int = 2
) -> CohomologyTable:
    """Total ranks of H^q(O(kF)) summed over characters, with the per-character table.

    Characters are scanned in a box around the hyperplane arrangement; any
    nonzero cohomology on the outermost shell of the box is treated as an error.
    """
    if space not in (AMBIENT, BOUNDARY):
        raise ValueError(f"unknown space {space!r}")
    chars, lo, hi = variety.character_box(k, margin)
    top = variety.rank if space == AMBIENT else variety.boundary_dim
    total = [0] * (top + 1)
    per: dict[tuple[int, ...], list[int]] = {}
    for u in chars:
        h = variety.character_cohomology(u, k, space, prime)
        if any(h):
            if any(c in (a, b) for c, a, b in zip(u, lo, hi)):
                raise AssertionError(f"nonzero cohomology at {u} on the edge of the scanned box")
            per[u] = h
            total = [a + b for a, b in zip(total, h)]
    return CohomologyTable(k, space, total, per)


@dataclass
class SerreReport:
    ok: bool
    concentration: bool
    serre: bool
    top_unit: bool
    tables: dict[int, list[int]]
    failures: list[str]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "concentration": self.concentration,
            "serre": self.serre,
            "top_unit": self.top_unit,
            "ranks": {str(k): v for k, v in sorted(self.tables.items())},
            "failures": self.failures,
        }


def concentration_and_serre(variety: ToricSpace, twists: Iterable[int]) -> SerreReport:
    """Boundary cohomology sits in degrees 0 and d, pairs u under m -> -m, and h^d(O) = 1."""
    d = variety.boundary_dim
    tables = {}
    failures = []
    conc = serre = True
    ks = sorted(set(twists) | {-k for k in twists})
    per = {}
    for k in ks:
        t = cech_cohomology(variety, k, BOUNDARY)
        tables[k] = t.ranks
        per[k] = t.per_character
        if any(t.ranks[q] for q in range(1, d)):
            conc = False
            failures.append(f"twist {k}: cohomology outside degrees 0 and {d}: {t.ranks}")
    for k in ks:
        for u, h in per[k].items():
            mirror = variety.character_cohomology(tuple(-c for c in u), -k, BOUNDARY)
            if h != mirror[::-1]:
                serre = False
                failures.append(f"twist {k}, character {u}: {h} vs reversed {mirror}")
        for u, h in per[-k].items():
            if tuple(-c for c in u) not in per[k]:
                serre = False
                failures.append(f"twist {-k}, character {u} has no partner")
    h0 = cech_cohomology(variety, 0, BOUNDARY).ranks
    top_unit = h0[d] == 1
    if not top_unit:
        failures.append(f"h^{d}(O) = {h0[d]}")
    return SerreReport(conc and serre and top_unit, conc, serre, top_unit, tables, failures)
