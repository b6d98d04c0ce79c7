"""Sampled checks of the tropical picture: the PL max function, the bounded
region C_0, its cut-off defining function, the FLTZ skeleton, and mollified
and cylindrized Lagrangian sections.

Coordinates. ``x`` lives in the real span of the dual lattice (tropical
coordinates, already divided by log t); ``u`` lives in the real span of the
lattice containing ``delta``, where the face fan of ``delta`` lives; ``theta``
is a point of the dual torus. The potential is ``-t + sum_{alpha != 0} z^alpha``
over ``A = delta`` lattice points, so the tropical function is
``max(1, max_{alpha != 0} <alpha, x>)`` and the bounded region is ``-delta^*``.

Everything here is floating point with explicit tolerances and a seeded
generator; these checks sample, they do not prove.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .linalg import primitive_part, solve
from .lp import linprog
from .polytope import LatticePolytope, lattice_points

TIE_TOL = 1e-9
GRAD_TOL = 1e-6


# ----------------------------------------------------------------------------
# PL data


@dataclass(frozen=True)
class CutoffFamily:
    """C^1 smoothsteps in the distance to each region: 0 within ``inner``, 1 beyond ``outer``."""

    inner: float = 0.1
    outer: float = 0.3

    def __post_init__(self) -> None:
        if not 0 < self.inner < self.outer:
            raise ValueError("need 0 < inner < outer")

    def __call__(self, dist: np.ndarray) -> np.ndarray:
        s = np.clip((np.asarray(dist, dtype=float) - self.inner) / (self.outer - self.inner), 0.0, 1.0)
        return s * s * (3.0 - 2.0 * s)


class TropicalData:
    """Monomials A = delta ∩ M with weights nu(0) = 1, c(0) = -1 and nu = 0, c = +1 elsewhere."""

    def __init__(self, delta: LatticePolytope, t: float = 100.0, cutoffs: CutoffFamily | None = None):
        if t <= 1:
            raise ValueError("t must exceed 1")
        if not delta.is_lattice or not delta.origin_interior():
            raise ValueError("delta must be a lattice polytope with the origin inside")
        self.delta = delta
        self.t = float(t)
        self.cutoffs = cutoffs or CutoffFamily()
        pts = list(lattice_points(delta))
        self.monomials: list[tuple[int, ...]] = pts
        self.nonzero = [p for p in pts if any(p)]
        self.alphas = np.array(self.nonzero, dtype=float)
        self.verts = np.array(delta.vertices, dtype=float)
        self.n = delta.rank
        self._regions = [self._region(a) for a in self.nonzero]
        # Lipschitz constant of x -> tropical max - <alpha, x>
        self.lipschitz = [
            max(float(np.linalg.norm(self.verts - np.array(a, dtype=float), axis=1).max()), float(np.linalg.norm(a)))
            for a in self.nonzero
        ]

    def weights(self, alpha: Sequence[int]) -> tuple[int, int]:
        """(nu, c) of a monomial."""
        return (1, -1) if not any(alpha) else (0, 1)

    # -- max function ----------------------------------------------------

    def trop_max(self, x: Sequence[float], tol: float = TIE_TOL) -> tuple[float, list[tuple[int, ...]]]:
        """Value of max_alpha (nu(alpha) + <alpha, x>) and every alpha within ``tol`` of it."""
        xv = np.asarray(x, dtype=float)
        vals = [1.0] + list(self.alphas @ xv)
        labels = [tuple([0] * self.n)] + self.nonzero
        best = max(vals)
        return best, [a for a, v in zip(labels, vals) if v >= best - tol]

    def on_amoeba(self, x: Sequence[float], tol: float = TIE_TOL) -> bool:
        return len(self.trop_max(x, tol)[1]) >= 2

    def component_of(self, x: Sequence[float], tol: float = TIE_TOL) -> tuple[int, ...] | None:
        """The unique maximising monomial, or None on the amoeba."""
        _, arg = self.trop_max(x, tol)
        return arg[0] if len(arg) == 1 else None

    # -- regions and distances ------------------------------------------

    def _region(self, alpha: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        """C_alpha = {x : <v - alpha, x> <= 0 for vertices v, <alpha, x> >= 1} as G x <= h.

        Duplicate and redundant rows are removed (exact LP), which keeps the
        active-set enumeration in the distance computation small.
        """
        rows: dict[tuple[int, ...], int] = {}
        for v in self.delta.vertices:
            w = tuple(int(b - a) for a, b in zip(alpha, v))
            if any(w):
                rows.setdefault(primitive_part(w), 0)
        rows[tuple(-a for a in alpha)] = -1
        keys = list(rows)
        keep = []
        for i, g in enumerate(keys):
            others = [k for j, k in enumerate(keys) if j != i]
            res = linprog([-c for c in g], others, [rows[k] for k in others], free=range(self.n))
            if res.status != "optimal" or -res.value > rows[g]:
                keep.append(g)
        return np.array(keep, dtype=float), np.array([rows[k] for k in keep], dtype=float)

    def distance_to_region(self, k: int, x: np.ndarray) -> np.ndarray:
        """Exact Euclidean distance from each row of ``x`` to C_alpha_k."""
        g, h = self._regions[k]
        return _polyhedron_distance(g, h, x)

    def h_c0(self, x: np.ndarray) -> np.ndarray:
        """sum over alpha != 0 of (1 - psi_alpha(x)) t^(<alpha, x> - 1), rowwise."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        dots = x @ self.alphas.T
        top = np.maximum(1.0, dots.max(axis=1))
        out = np.zeros(len(x))
        for k in range(len(self.nonzero)):
            gap = top - dots[:, k]
            near = gap < self.lipschitz[k] * self.cutoffs.outer
            if not near.any():
                continue
            dist = self.distance_to_region(k, x[near])
            weight = 1.0 - self.cutoffs(dist)
            out[near] += weight * np.power(self.t, dots[near, k] - 1.0)
        return out

    def ray_exit(self, direction: np.ndarray) -> np.ndarray:
        """Radius at which the ray through each direction leaves -delta^*."""
        m = (np.atleast_2d(direction) @ self.alphas.T).max(axis=1)
        return 1.0 / m


def _polyhedron_distance(g: np.ndarray, h: np.ndarray, x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Distance to {y : g y <= h} by projecting onto every active set of size <= n."""
    x = np.atleast_2d(x)
    n = x.shape[1]
    viol = x @ g.T - h
    best = np.where((viol <= tol).all(axis=1), 0.0, np.inf)
    todo = best > 0
    if not todo.any():
        return best
    xs = x[todo]
    sub_best = np.full(len(xs), np.inf)
    m = len(g)
    for size in range(1, min(n, m) + 1):
        for act in combinations(range(m), size):
            ga = g[list(act)]
            gram = ga @ ga.T
            if abs(np.linalg.det(gram)) < 1e-12:
                continue
            lam = np.linalg.solve(gram, (xs @ ga.T - h[list(act)]).T).T
            proj = xs - lam @ ga
            feas = (proj @ g.T - h <= tol).all(axis=1)
            d = np.linalg.norm(xs - proj, axis=1)
            sub_best = np.where(feas & (d < sub_best), d, sub_best)
    best[todo] = sub_best
    return best


# ----------------------------------------------------------------------------
# reports


@dataclass
class SamplingReport:
    check: str
    ok: bool
    samples: int
    max_deviation: float = 0.0
    mean_deviation: float = 0.0
    bound: float | None = None
    witness: list[float] | None = None
    details: dict = field(default_factory=dict)
    rows: list[list[float]] = field(default_factory=list, repr=False)
    columns: list[str] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "ok": self.ok,
            "samples": self.samples,
            "max_deviation": self.max_deviation,
            "mean_deviation": self.mean_deviation,
            "bound": self.bound,
            "witness": self.witness,
            "details": self.details,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(self.columns)
        w.writerows(self.rows)
        return buf.getvalue()


class SamplingError(RuntimeError):
    pass


# ----------------------------------------------------------------------------
# star-shapedness


def star_check(
    data: TropicalData, epsilon: float = 0.05, sample_count: int = 10_000, seed: int = 0, step: float = 1e-6
) -> SamplingReport:
    """Radial derivative of H_C0 at points with 1 - epsilon <= H <= 1.

    Each sample draws a direction and a level in [1 - epsilon, 1], locates a
    point of that level on the ray by bisection inside -delta^*, and tests
    the sign of a central difference along the ray.
    """
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(sample_count, data.n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    levels = rng.uniform(1.0 - epsilon, 1.0, size=sample_count)
    hi = data.ray_exit(dirs)
    lo = np.zeros(sample_count)
    h_lo = data.h_c0(dirs * lo[:, None])
    h_hi = data.h_c0(dirs * hi[:, None])
    usable = (h_lo < levels) & (h_hi >= levels)
    if not usable.any():
        raise SamplingError("no samples reached the level shell; check t and epsilon")
    d, lv, a, b = dirs[usable], levels[usable], lo[usable], hi[usable]
    for _ in range(45):
        mid = 0.5 * (a + b)
        below = data.h_c0(d * mid[:, None]) < lv
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    r = 0.5 * (a + b)
    x = d * r[:, None]
    hx = data.h_c0(x)
    deriv = (data.h_c0(x * (1 + step)) - data.h_c0(x * (1 - step))) / (2 * step)
    shell = (hx >= 1 - epsilon - 1e-9) & (hx <= 1 + 1e-9)
    ok_pts = deriv > 0
    bad = np.flatnonzero(~ok_pts & shell)
    rep = SamplingReport(
        "star",
        bool(len(bad) == 0 and shell.all()),
        int(len(x)),
        max_deviation=float(max(0.0, -deriv.min())) if len(deriv) else 0.0,
        mean_deviation=float(deriv.mean()),
        witness=x[bad[0]].tolist() if len(bad) else None,
        details={
            "t": data.t,
            "epsilon": epsilon,
            "requested": sample_count,
            "skipped": int(sample_count - usable.sum()),
            "min_radial_derivative": float(deriv.min()),
            "off_shell": int((~shell).sum()),
        },
        columns=[f"x{i}" for i in range(data.n)] + ["H", "radial_derivative"],
        rows=np.column_stack([x, hx, deriv]).tolist(),
    )
    return rep


# ----------------------------------------------------------------------------
# the face fan of delta, in floating point


class FloatFaceFan:
    """Maximal cones of the face fan of ``delta`` with facet normals scaled to offset -1."""

    def __init__(self, delta: LatticePolytope):
        self.delta = delta
        self.n = delta.rank
        self.facets = list(delta.facets)
        self.normals = np.array([[float(Fraction(c) / -b) for c in a] for a, b, _ in self.facets])
        self.members = [frozenset(m) for _, _, m in self.facets]
        self.vertices = np.array(delta.vertices, dtype=float)
        cones: set[frozenset[int]] = {frozenset()}
        for m in self.members:
            for face in delta.faces:
                if face.vertices <= m and face.dim < delta.rank:
                    cones.add(frozenset(face.vertices))
        self.cones = sorted(cones, key=lambda c: (len(c), sorted(c)))

    def cone_index(self, w: np.ndarray) -> np.ndarray:
        """Index of a maximal cone containing each row of ``w``."""
        return np.argmin(np.atleast_2d(w) @ self.normals.T, axis=1)

    def minimal_cone(self, u: Sequence[float], tol: float = TIE_TOL) -> frozenset[int]:
        """Vertex indices spanning the smallest cone that contains ``u``."""
        uv = np.asarray(u, dtype=float)
        if np.linalg.norm(uv) <= tol:
            return frozenset()
        vals = self.normals @ uv
        tight = np.flatnonzero(vals <= vals.min() + tol * max(1.0, abs(vals.min())))
        return frozenset.intersection(*[self.members[k] for k in tight])

    def cones_containing(self, alpha: Sequence[int]) -> set[int]:
        vals = self.normals @ np.asarray(alpha, dtype=float)
        return set(np.flatnonzero(vals <= vals.min() + TIE_TOL).tolist())

    def pieces(self, values: dict[tuple[int, ...], Fraction]) -> np.ndarray:
        """Linear piece of a support function on each maximal cone."""
        out = []
        for m in self.members:
            vs = [self.delta.vertices[i] for i in sorted(m)]
            sol = solve([list(v) for v in vs], [Fraction(values[tuple(v)]) for v in vs])
            if sol is None:
                raise ValueError("support function is not linear on a maximal cone")
            out.append([float(c) for c in sol])
        return np.array(out)

    def canonical_pieces(self) -> np.ndarray:
        """Pieces of the support function equal to 1 on every ray."""
        return -self.normals

    def distance_to_cone(self, cone: frozenset[int], u: np.ndarray) -> np.ndarray:
        """Euclidean distance from each row of ``u`` to the cone spanned by the given vertices."""
        u = np.atleast_2d(u)
        if not cone:
            return np.linalg.norm(u, axis=1)
        gens = self.vertices[sorted(cone)]
        best = np.linalg.norm(u, axis=1)
        for size in range(1, min(len(gens), self.n) + 1):
            for sub in combinations(range(len(gens)), size):
                g = gens[list(sub)]
                gram = g @ g.T
                if abs(np.linalg.det(gram)) < 1e-12:
                    continue
                coef = np.linalg.solve(gram, (u @ g.T).T).T
                ok = (coef >= -1e-12).all(axis=1)
                d = np.linalg.norm(u - coef @ g, axis=1)
                best = np.where(ok & (d < best), d, best)
        return best


def fltz_membership(
    fan: FloatFaceFan, u: Sequence[float], theta: Sequence[float], tol: float = 1e-9
) -> tuple[bool, list[list[int]]]:
    """Whether (u, theta) lies on the union of sigma x sigma^perp; returns the witness cone.

    It suffices to test the smallest cone containing ``u``: every larger cone
    has more generators to be perpendicular to.
    """
    cone = fan.minimal_cone(u, tol)
    th = np.asarray(theta, dtype=float)
    gens = [fan.delta.vertices[i] for i in sorted(cone)]
    for g in gens:
        v = float(np.dot(th, g))
        if abs(v - round(v)) > tol:
            return False, [list(map(int, x)) for x in gens]
    return True, [list(map(int, x)) for x in gens]


# ----------------------------------------------------------------------------
# mollifiers


def mollifier_grid(n: int, delta: float, per_radius: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes of spacing delta/per_radius inside the delta-ball, with normalised bump weights."""
    h = delta / per_radius
    ticks = (np.arange(-per_radius, per_radius) + 0.5) * h
    grid = np.stack(np.meshgrid(*[ticks] * n, indexing="ij"), axis=-1).reshape(-1, n)
    r2 = (grid**2).sum(axis=1) / delta**2
    keep = r2 < 1.0
    grid, r2 = grid[keep], r2[keep]
    w = np.exp(-1.0 / (1.0 - r2))
    if not np.isfinite(w).all() or w.sum() <= 0:
        raise SamplingError("quadrature weights degenerate")
    return grid, w / w.sum()


def mollified_gradient(fan: FloatFaceFan, pieces: np.ndarray, u: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """d of the convolution of F with the mollifier, at each row of ``u``."""
    out = np.empty((len(u), fan.n))
    for i, ui in enumerate(np.atleast_2d(u)):
        idx = fan.cone_index(ui - nodes)
        out[i] = weights @ pieces[idx]
    return out


def cylindrized_gradient(fan: FloatFaceFan, pieces: np.ndarray, u: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """d of u -> integral of F(u - |u| y) eta(y) dy, at each row of ``u``.

    Differentiating under the integral gives m - <m, y> u/|u| with m the
    piece at u - |u| y.
    """
    out = np.empty((len(u), fan.n))
    for i, ui in enumerate(np.atleast_2d(u)):
        r = np.linalg.norm(ui)
        w = ui - r * nodes
        m = pieces[fan.cone_index(w)]
        my = (m * nodes).sum(axis=1)
        out[i] = weights @ m - (weights @ my) * ui / r
    return out


def _sample_shell(rng: np.random.Generator, count: int, n: int, r_lo: float, r_hi: float) -> np.ndarray:
    d = rng.normal(size=(count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(r_lo, r_hi, size=count)[:, None]


def _support_values(fan: FloatFaceFan, F: dict | None) -> dict[tuple[int, ...], Fraction]:
    if F is None:
        return {tuple(v): Fraction(-1) for v in fan.delta.vertices}
    vals = F if isinstance(F, dict) else F.values
    return {tuple(k): Fraction(v) for k, v in vals.items()}


def _pl_value(fan: FloatFaceFan, pieces: np.ndarray, p: Sequence[int]) -> float:
    return float(pieces[fan.cone_index(np.asarray(p, dtype=float))[0]] @ np.asarray(p, dtype=float))


def mollified_section_check(
    delta: LatticePolytope,
    F: dict | object | None = None,
    delta_radius: float = 0.05,
    sample_count: int = 10_000,
    seed: int = 0,
    radii: tuple[float, float] = (1.0, 3.0),
    tol: float = GRAD_TOL,
) -> SamplingReport:
    """dH(alpha) = F(alpha) on shrunken stars, graph near the skeleton, values in the moment polytope.

    ``F`` maps rays (vertices of delta) to integers; the default is the
    anticanonical function with value -1 on every ray.
    """
    fan = FloatFaceFan(delta)
    vals = _support_values(fan, F)
    if any(v.denominator != 1 for v in vals.values()):
        raise ValueError("F must be integral on rays")
    pieces = fan.pieces(vals)
    nodes, weights = mollifier_grid(fan.n, delta_radius)
    rng = np.random.default_rng(seed)
    us = _sample_shell(rng, sample_count, fan.n, *radii)
    tdata = [(tuple(a), fan.cones_containing(a), float(_pl_value(fan, pieces, a))) for a in lattice_points(delta) if any(a)]
    rays = fan.vertices
    ray_vals = np.array([float(vals[tuple(v)]) for v in delta.vertices])
    star_dev = []
    skel_fail = 0
    moment_fail = 0
    checked = 0
    witness = None
    grads = np.empty((len(us), fan.n))
    for i, u in enumerate(us):
        idx = fan.cone_index(u - nodes)
        g = weights @ pieces[idx]
        grads[i] = g
        hit = set(np.unique(idx).tolist())
        for a, st, fa in tdata:
            if hit <= st:
                dev = abs(float(np.dot(g, a)) - fa)
                star_dev.append(dev)
                checked += 1
                if dev > tol and witness is None:
                    witness = u.tolist()
        tau = frozenset.intersection(*[fan.members[k] for k in hit])
        near = fan.distance_to_cone(tau, u[None, :])[0] < delta_radius
        integral = all(abs(float(g @ rays[j]) - round(float(g @ rays[j]))) <= tol for j in tau)
        if not (near and integral):
            skel_fail += 1
            witness = witness or u.tolist()
        if ((rays @ g) < ray_vals - tol).any():
            moment_fail += 1
            witness = witness or u.tolist()
    star_dev_arr = np.array(star_dev) if star_dev else np.zeros(1)
    ok = bool(star_dev_arr.max() <= tol and skel_fail == 0 and moment_fail == 0 and checked > 0)
    return SamplingReport(
        "mollified-section",
        ok,
        int(len(us)),
        max_deviation=float(star_dev_arr.max()),
        mean_deviation=float(star_dev_arr.mean()),
        bound=tol,
        witness=witness,
        details={
            "delta": delta_radius,
            "star_checks": checked,
            "skeleton_failures": skel_fail,
            "moment_polytope_failures": moment_fail,
            "quadrature_nodes": int(len(nodes)),
        },
        columns=[f"u{i}" for i in range(fan.n)] + [f"dH{i}" for i in range(fan.n)],
        rows=np.column_stack([us, grads]).tolist(),
    )


def delta_star_mask(fan: FloatFaceFan, alpha: Sequence[int], units: np.ndarray, delta_radius: float) -> np.ndarray:
    """Unit vectors in the star of alpha at distance > delta from every cone avoiding alpha."""
    a = np.asarray(alpha, dtype=float)
    mask = np.isin(fan.cone_index(units), list(fan.cones_containing(alpha)))
    for cone in fan.cones:
        if not cone or _alpha_in_cone(fan.vertices[sorted(cone)], a):
            continue
        sub = np.flatnonzero(mask)
        if not len(sub):
            break
        d = fan.distance_to_cone(cone, units[sub])
        mask[sub[d <= delta_radius]] = False
    return mask


def _alpha_in_cone(gens: np.ndarray, a: np.ndarray) -> bool:
    sol, res, rk, _ = np.linalg.lstsq(gens.T, a, rcond=None)
    if np.linalg.norm(gens.T @ sol - a) > 1e-9:
        return False
    if rk == len(gens):
        return bool((sol >= -1e-9).all())
    # non-simplicial cone: fall back to a nonnegative combination search over bases
    for sub in combinations(range(len(gens)), rk):
        g = gens[list(sub)]
        c, *_ = np.linalg.lstsq(g.T, a, rcond=None)
        if np.linalg.norm(g.T @ c - a) <= 1e-9 and (c >= -1e-9).all():
            return True
    return False


def cyl_section_check(
    delta: LatticePolytope,
    F: dict | object | None = None,
    a: float = 0.01,
    delta_radius: float = 0.05,
    sample_count: int = 10_000,
    seed: int = 0,
    radii: tuple[float, float] = (1.0, 3.0),
    require_nonintegral: bool = True,
) -> SamplingReport:
    """|dG(alpha) - F(alpha) + a| <= delta * C * |alpha| on delta-stars, and dG(alpha) not an integer.

    G is the cylindrized primitive of F_a = F - a F_K with F_K equal to 1 on
    every ray; C is the largest norm of a linear piece of F_a. The extra
    factor |alpha| turns the bound on the gradient covector into a bound on
    its pairing with alpha. ``F`` defaults to the zero function.
    """
    if a == 0:
        raise ValueError("a = 0 voids the non-integrality argument")
    fan = FloatFaceFan(delta)
    vals = {tuple(v): Fraction(0) for v in delta.vertices} if F is None else _support_values(fan, F)
    base = fan.pieces(vals)
    pieces = base - a * fan.canonical_pieces()
    C = float(np.linalg.norm(pieces, axis=1).max())
    nodes, weights = mollifier_grid(fan.n, delta_radius)
    rng = np.random.default_rng(seed)
    us = _sample_shell(rng, sample_count, fan.n, *radii)
    units = us / np.linalg.norm(us, axis=1, keepdims=True)
    grads = cylindrized_gradient(fan, pieces, us, nodes, weights)
    devs, slack, nonint_fail, checked = [], [], 0, 0
    witness = None
    for alpha in lattice_points(delta):
        if not any(alpha):
            continue
        mask = delta_star_mask(fan, alpha, units, delta_radius)
        if not mask.any():
            continue
        av = np.asarray(alpha, dtype=float)
        target = _pl_value(fan, base, alpha) - a
        pair = grads[mask] @ av
        dev = np.abs(pair - target)
        bound = delta_radius * C * float(np.linalg.norm(av))
        devs.extend(dev.tolist())
        slack.append(bound - float(dev.max()))
        checked += int(mask.sum())
        frac = np.abs(pair - np.round(pair))
        bad = frac <= 1e-12
        nonint_fail += int(bad.sum())
        if (dev > bound).any() and witness is None:
            witness = us[mask][np.argmax(dev)].tolist()
    if not checked:
        raise SamplingError("no samples landed in any delta-star")
    dev_arr = np.array(devs)
    ok = bool(min(slack) >= 0 and (nonint_fail == 0 or not require_nonintegral))
    return SamplingReport(
        "cylindrized-section",
        ok,
        int(len(us)),
        max_deviation=float(dev_arr.max()),
        mean_deviation=float(dev_arr.mean()),
        bound=delta_radius * C,
        witness=witness,
        details={
            "a": a,
            "delta": delta_radius,
            "lipschitz_C": C,
            "star_checks": checked,
            "integral_values": nonint_fail,
            "min_slack": float(min(slack)),
        },
        columns=[f"u{i}" for i in range(fan.n)] + [f"dG{i}" for i in range(fan.n)],
        rows=np.column_stack([us, grads]).tolist(),
    )
