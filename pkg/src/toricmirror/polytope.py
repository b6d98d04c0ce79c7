"""Lattice polytopes: exact convex hulls, polar duality, faces and lattice points."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .linalg import det, primitive_part, rank

Coord = Union[int, Fraction]
Point = tuple[Coord, ...]
IntPoint = tuple[int, ...]


def _normalize(v: Iterable[Coord]) -> Point:
    out = []
    for x in v:
        x = Fraction(x)
        out.append(int(x) if x.denominator == 1 else x)
    return tuple(out)


def _dot(a: Sequence[Coord], b: Sequence[Coord]) -> Coord:
    return sum(x * y for x, y in zip(a, b))


def _affine_rank(points: Sequence[Sequence[int]]) -> int:
    if len(points) <= 1:
        return len(points) - 1
    base = points[0]
    return rank([[x - y for x, y in zip(p, base)] for p in points[1:]])


def _affine_basis(points: Sequence[Sequence[int]], size: int) -> list[int]:
    """Indices of ``size`` affinely independent points, chosen greedily in order."""
    chosen = [0]
    for i in range(1, len(points)):
        if len(chosen) == size:
            break
        trial = [points[j] for j in chosen] + [points[i]]
        if _affine_rank(trial) == len(trial) - 1:
            chosen.append(i)
    return chosen


def _hyperplane(points: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Primitive normal of the hyperplane through n affinely independent points in Z^n."""
    n = len(points[0])
    diffs = [[x - y for x, y in zip(p, points[0])] for p in points[1:]]
    normal = []
    for i in range(n):
        minor = [row[:i] + row[i + 1 :] for row in diffs]
        normal.append((-1) ** i * det(minor))
    return primitive_part(normal)


@dataclass
class _Facet:
    normal: tuple[int, ...]
    offset: int
    points: set[int]


def convex_hull(points: Sequence[Sequence[int]]) -> list[tuple[tuple[int, ...], int, frozenset[int]]]:
    """Facets of the convex hull of full-dimensional integer points.

    Incremental beneath-beyond in exact integer arithmetic. Each facet is
    returned as ``(normal, offset, indices)`` with ``<normal, x> >= offset``
    on the hull and ``indices`` the input points lying on the facet.
    """
    pts = [tuple(int(x) for x in p) for p in points]
    n = len(pts[0])
    if n == 1:
        xs = [p[0] for p in pts]
        lo, hi = min(xs), max(xs)
        if lo == hi:
            raise ValueError("points are not full-dimensional")
        return [
            ((1,), lo, frozenset(i for i, x in enumerate(xs) if x == lo)),
            ((-1,), -hi, frozenset(i for i, x in enumerate(xs) if x == hi)),
        ]
    simplex = _affine_basis(pts, n + 1)
    if len(simplex) < n + 1:
        raise ValueError("points are not full-dimensional")
    # (n+1) * centroid of the initial simplex, kept integral
    centre = [sum(pts[i][k] for i in simplex) for k in range(n)]
    scale = n + 1

    def oriented(normal: tuple[int, ...], anchor: Sequence[int]) -> tuple[tuple[int, ...], int]:
        off = _dot(normal, anchor)
        if _dot(normal, centre) < scale * off:
            normal = tuple(-x for x in normal)
            off = -off
        return normal, off

    facets: list[_Facet] = []
    for drop in simplex:
        face = [i for i in simplex if i != drop]
        normal, off = oriented(_hyperplane([pts[i] for i in face]), pts[face[0]])
        facets.append(_Facet(normal, off, set(face)))

    for idx in range(len(pts)):
        if idx in simplex:
            continue
        x = pts[idx]
        values = [_dot(f.normal, x) - f.offset for f in facets]
        visible = [f for f, v in zip(facets, values) if v < 0]
        if not visible:
            for f, v in zip(facets, values):
                if v == 0:
                    f.points.add(idx)
            continue
        hidden = [(f, v) for f, v in zip(facets, values) if v >= 0]
        new: dict[tuple[tuple[int, ...], int], set[int]] = {}
        for f in visible:
            for g, _ in hidden:
                ridge = f.points & g.points
                if len(ridge) < n - 1:
                    continue
                ridge_pts = sorted(ridge)
                if _affine_rank([pts[i] for i in ridge_pts]) != n - 2:
                    continue
                basis = _affine_basis([pts[i] for i in ridge_pts], n - 1)
                anchor = [pts[ridge_pts[i]] for i in basis] + [x]
                key = oriented(_hyperplane(anchor), x)
                new.setdefault(key, set()).update(ridge)
                new[key].add(idx)
        kept = []
        for g, v in hidden:
            key = (g.normal, g.offset)
            if key in new:
                g.points |= new.pop(key)
            if v == 0:
                g.points.add(idx)
            kept.append(g)
        for (normal, off), members in new.items():
            kept.append(_Facet(normal, off, members))
        facets = kept
    return sorted((f.normal, f.offset, frozenset(f.points)) for f in facets)


@dataclass(frozen=True)
class Face:
    """A face of a polytope: vertex indices, dimension and a supporting functional.

    ``functional`` and ``offset`` satisfy ``<functional, x> >= offset`` on the
    polytope with equality exactly on the face; for a reflexive polytope the
    offset is -1 (the full polytope uses the zero functional and offset 0).
    """

    dim: int
    vertices: frozenset[int]
    functional: Point
    offset: Coord
    interior_points: int = field(default=0, compare=False)


class LatticePointSet:
    """Sorted, deduplicated lattice points, each annotated with its carrier face."""

    def __init__(self, points: Iterable[IntPoint], carriers: dict[IntPoint, Face] | None = None):
        self.points: tuple[IntPoint, ...] = tuple(sorted(set(tuple(map(int, p)) for p in points)))
        self.carriers: dict[IntPoint, Face] = dict(carriers or {})

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p: object) -> bool:
        return tuple(p) in set(self.points)  # type: ignore[arg-type]

    def __repr__(self) -> str:
        return f"LatticePointSet({list(self.points)})"


@dataclass(frozen=True)
class LatticePolytope:
    """A full-dimensional polytope given by its vertices.

    Vertices are integral for lattice polytopes; rational vertices are
    permitted (moment polytopes, non-reflexive duals) and ``is_lattice``
    reports which case applies.
    """

    rank: int
    vertices: tuple[Point, ...]

    @classmethod
    def from_points(cls, points: Iterable[Sequence[Coord]]) -> "LatticePolytope":
        pts = sorted(set(_normalize(p) for p in points))
        if not pts:
            raise ValueError("empty point set")
        n = len(pts[0])
        den = math.lcm(*[Fraction(x).denominator for p in pts for x in p])
        scaled = [tuple(int(Fraction(x) * den) for x in p) for p in pts]
        facets = convex_hull(scaled)
        on: dict[int, list[frozenset[int]]] = {}
        for _, _, members in facets:
            for i in members:
                on.setdefault(i, []).append(members)
        verts = []
        for i, sets in on.items():
            common = frozenset.intersection(*sets)
            if common == {i}:
                verts.append(pts[i])
        poly = cls(n, tuple(sorted(verts)))
        where = {pts.index(v): k for k, v in enumerate(poly.vertices)}
        # reuse the hull instead of recomputing it from the vertices
        poly.__dict__["facets"] = tuple(
            (normal, Fraction(off, den), frozenset(where[i] for i in members if i in where))
            for normal, off, members in facets
        )
        return poly

    @property
    def is_lattice(self) -> bool:
        return all(isinstance(x, int) for v in self.vertices for x in v)

    @cached_property
    def _scale(self) -> int:
        return math.lcm(*[Fraction(x).denominator for v in self.vertices for x in v])

    @cached_property
    def facets(self) -> tuple[tuple[tuple[int, ...], Fraction, frozenset[int]], ...]:
        """Facets as ``(primitive integer normal, offset, vertex indices)``; ``<a, x> >= b``."""
        s = self._scale
        scaled = [tuple(int(Fraction(x) * s) for x in v) for v in self.vertices]
        out = []
        for normal, off, members in convex_hull(scaled):
            out.append((normal, Fraction(off, s), members))
        return tuple(out)

    def contains(self, x: Sequence[Coord], strict: bool = False) -> bool:
        for a, b, _ in self.facets:
            v = _dot(a, x) - b
            if v < 0 or (strict and v == 0):
                return False
        return True

    def origin_interior(self) -> bool:
        return all(b < 0 for _, b, _ in self.facets)

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        return tuple(face_lattice(self))

    def face_of(self, vertex_set: frozenset[int]) -> Face:
        for f in self.faces:
            if f.vertices == vertex_set:
                return f
        raise KeyError(vertex_set)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "vertices": [[x if isinstance(x, int) else f"{x.numerator}/{x.denominator}" for x in v] for v in self.vertices],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LatticePolytope":
        if not {"rank", "vertices"} <= set(data):
            raise ValueError("polytope record needs 'rank' and 'vertices'")
        verts = [tuple(Fraction(x) for x in v) for v in data["vertices"]]
        if any(len(v) != data["rank"] for v in verts):
            raise ValueError("vertex length does not match rank")
        poly = cls.from_points(verts)
        if len(poly.vertices) != len(set(_normalize(v) for v in verts)):
            raise ValueError("vertex list contains non-extreme points")
        return poly

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "LatticePolytope":
        return cls.from_json(json.loads(Path(path).read_text()))


def polar_dual(p: LatticePolytope, strict: bool = False) -> LatticePolytope:
    """The polar {y : <x, y> >= -1 for all x in p}."""
    if not p.origin_interior():
        raise ValueError("origin is not in the strict interior")
    verts = []
    for a, b, _ in p.facets:
        verts.append(_normalize(Fraction(x) / -b for x in a))
    dual = LatticePolytope(p.rank, tuple(sorted(verts)))
    if strict and not dual.is_lattice:
        raise ValueError("polar dual is not a lattice polytope")
    return dual


def is_reflexive(p: LatticePolytope) -> bool:
    if not p.is_lattice or not p.origin_interior():
        return False
    return all(b == -1 for _, b, _ in p.facets)


def _face_functional(p: LatticePolytope, facet_ids: list[int]) -> tuple[Point, Coord]:
    if not facet_ids:
        return tuple(0 for _ in range(p.rank)), 0
    acc = [Fraction(0)] * p.rank
    if any(p.facets[k][1] >= 0 for k in facet_ids):
        # origin not strictly inside these facets: sum the inequalities unscaled
        off = Fraction(0)
        for k in facet_ids:
            a, b, _ = p.facets[k]
            acc = [x + c for x, c in zip(acc, a)]
            off += b
        return _normalize(acc), _normalize([off])[0]
    for k in facet_ids:
        a, b, _ = p.facets[k]
        for i in range(p.rank):
            acc[i] += Fraction(a[i]) / -b
    return _normalize(x / len(facet_ids) for x in acc), -1


def face_lattice(p: LatticePolytope) -> list[Face]:
    """All nonempty faces, sorted by dimension then vertex set, with i(S)."""
    facet_sets = [members for _, _, members in p.facets]
    everything = frozenset(range(len(p.vertices)))
    found = {everything}
    frontier = set(facet_sets)
    while frontier:
        found |= frontier
        nxt = set()
        for s in frontier:
            for f in facet_sets:
                t = s & f
                if t and t not in found:
                    nxt.add(t)
        frontier = nxt
    s = p._scale
    faces = []
    for vs in found:
        pts = [tuple(int(Fraction(x) * s) for x in p.vertices[i]) for i in sorted(vs)]
        dim = _affine_rank(pts)
        ids = [k for k, fs in enumerate(facet_sets) if vs <= fs]
        functional, offset = _face_functional(p, ids)
        faces.append(Face(dim, vs, functional, offset))
    faces.sort(key=lambda f: (f.dim, sorted(f.vertices)))
    if p.is_lattice:
        counts: dict[frozenset[int], int] = {}
        for pt in _scan(p):
            c = _carrier_vertices(p, pt)
            counts[c] = counts.get(c, 0) + 1
        faces = [Face(f.dim, f.vertices, f.functional, f.offset, counts.get(f.vertices, 0)) for f in faces]
    return faces


def _carrier_vertices(p: LatticePolytope, x: Sequence[Coord]) -> frozenset[int]:
    result = frozenset(range(len(p.vertices)))
    for a, b, members in p.facets:
        if _dot(a, x) == b:
            result &= members
    return result


def carrier_face(x: Sequence[int], p: LatticePolytope) -> Face:
    """The face containing ``x`` in its relative interior."""
    if not p.contains(x):
        raise ValueError(f"{tuple(x)} lies outside the polytope")
    return p.face_of(_carrier_vertices(p, x))


def _scan(p: LatticePolytope) -> list[IntPoint]:
    lo = [math.floor(min(v[k] for v in p.vertices)) for k in range(p.rank)]
    hi = [math.floor(max(v[k] for v in p.vertices)) for k in range(p.rank)]
    normals = np.array([a for a, _, _ in p.facets], dtype=np.int64)
    offsets = np.array([math.ceil(b) for _, b, _ in p.facets], dtype=np.int64)
    found = kernels.box_scan(normals, offsets, lo, hi)
    return [tuple(int(v) for v in row) for row in found]


def lattice_points(p: LatticePolytope) -> LatticePointSet:
    """All lattice points of ``p``, annotated with carrier faces."""
    pts = _scan(p)
    carriers = {pt: p.face_of(_carrier_vertices(p, pt)) for pt in pts}
    return LatticePointSet(pts, carriers)


def codim_ge2_points(dual: LatticePolytope) -> LatticePointSet:
    """Nonzero lattice points lying on faces of codimension at least two."""
    all_pts = lattice_points(dual)
    keep = {pt: f for pt, f in all_pts.carriers.items() if f.dim <= dual.rank - 2 and any(pt)}
    return LatticePointSet(keep.keys(), keep)


def dual_face(face: Face, p: LatticePolytope, dual: LatticePolytope) -> Face:
    """The face of ``dual`` dual to ``face`` (``dual`` must be the polar of ``p``)."""
    ids = [k for k, (_, _, members) in enumerate(p.facets) if face.vertices <= members]
    dual_pts = set()
    for k in ids:
        a, b, _ = p.facets[k]
        dual_pts.add(_normalize(Fraction(x) / -b for x in a))
    if not ids:
        return dual.face_of(frozenset(range(len(dual.vertices))))
    index = {v: i for i, v in enumerate(dual.vertices)}
    return dual.face_of(frozenset(index[v] for v in dual_pts))


def interior_count(face: Face) -> int:
    """i(S): lattice points in the relative interior of ``face``."""
    return face.interior_points


# ----------------------------------------------------------------------------
# reflexive polygon census


def _det2(v: Sequence[int], w: Sequence[int]) -> int:
    return v[0] * w[1] - v[1] * w[0]


def _reflexive_cycles(box: int) -> list[tuple[IntPoint, ...]]:
    """Counter-clockwise convex vertex cycles whose edges sit at lattice distance one."""
    grid = [(x, y) for x in range(-box, box + 1) for y in range(-box, box + 1) if (x, y) != (0, 0)]
    found = []

    def edge_ok(v: IntPoint, w: IntPoint) -> bool:
        return _det2(v, w) == math.gcd(w[0] - v[0], w[1] - v[1]) and _det2(v, w) > 0

    succ = {v: [w for w in grid if edge_ok(v, w)] for v in grid}

    def extend(path: list[IntPoint], winding: int) -> None:
        start, last = path[0], path[-1]
        for w in succ[last]:
            if len(path) >= 2:
                prev = path[-2]
                turn = _det2((last[0] - prev[0], last[1] - prev[1]), (w[0] - last[0], w[1] - last[1]))
                if turn <= 0:
                    continue
            if w == start:
                if len(path) >= 3:
                    # convex at the start vertex as well
                    a, b = path[-1], path[1]
                    if _det2((start[0] - a[0], start[1] - a[1]), (b[0] - start[0], b[1] - start[1])) > 0:
                        found.append(tuple(path))
                continue
            if w < start or w in path:
                continue
            # angle swept around the origin must stay below one turn
            new_winding = winding + (1 if w[1] < 0 <= last[1] or last[1] < 0 <= w[1] else 0)
            if new_winding > 2:
                continue
            extend(path + [w], new_winding)

    for s in grid:
        extend([s], 0)
    return found


def _to_e1(v: IntPoint) -> list[list[int]]:
    p, q = v
    g, x, y = _xgcd(p, q)
    if g != 1:
        raise ValueError("vertex is not primitive")
    return [[x, y], [-q, p]]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _xgcd(b, a % b)
    return g, y, x - (a // b) * y


def polygon_normal_form(vertices_ccw: Sequence[IntPoint]) -> tuple[IntPoint, ...]:
    """Canonical representative of a polygon with primitive vertices under GL2(Z)."""
    k = len(vertices_ccw)
    best = None
    for seq in (list(vertices_ccw), list(reversed(vertices_ccw))):
        for i in range(k):
            rot = seq[i:] + seq[:i]
            u = _to_e1(rot[0])
            img = [(u[0][0] * x + u[0][1] * y, u[1][0] * x + u[1][1] * y) for x, y in rot]
            a, b = img[1]
            if b < 0:
                img = [(x, -y) for x, y in img]
                a, b = img[1]
            c = -(a // b)
            img = [(x + c * y, y) for x, y in img]
            cand = tuple(img)
            if best is None or cand < best:
                best = cand
    return best


def reflexive_polygon_census(box: int = 3) -> list[LatticePolytope]:
    """Reflexive polygons with vertices in [-box, box]^2, one per GL2(Z) class."""
    classes: dict[tuple[IntPoint, ...], LatticePolytope] = {}
    for cyc in _reflexive_cycles(box):
        poly = LatticePolytope.from_points(cyc)
        if len(poly.vertices) != len(cyc) or not is_reflexive(poly):
            continue
        key = polygon_normal_form(cyc)
        if key not in classes:
            classes[key] = LatticePolytope.from_points(key)
    return [classes[k] for k in sorted(classes)]
