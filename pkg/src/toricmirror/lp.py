"""Exact two-phase simplex over the rationals with Bland's anti-cycling rule."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Number = int | Fraction


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None


def _pivot(tab: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tab[row][col]
    tab[row] = [v / piv for v in tab[row]]
    prow = tab[row]
    for i, r in enumerate(tab):
        if i != row and r[col] != 0:
            f = r[col]
            tab[i] = [a - f * b for a, b in zip(r, prow)]
    basis[row] = col


def _run(tab: list[list[Fraction]], basis: list[int], allowed: int) -> str:
    """Minimise the objective stored in the last row (reduced costs, value in last column)."""
    m = len(tab) - 1
    while True:
        obj = tab[m]
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(tab, basis, best[1], col)


def _standard_form(a_eq: Sequence[Sequence[Number]], b_eq: Sequence[Number], n: int):
    rows = []
    rhs = []
    for r, b in zip(a_eq, b_eq):
        r = [Fraction(v) for v in r]
        b = Fraction(b)
        if b < 0:
            r = [-v for v in r]
            b = -b
        rows.append(r)
        rhs.append(b)
    return rows, rhs


def simplex_min(c: Sequence[Number], a_eq: Sequence[Sequence[Number]], b_eq: Sequence[Number]) -> LPResult:
    """Minimise ``c.x`` subject to ``a_eq x = b_eq`` and ``x >= 0``."""
    n = len(c)
    rows, rhs = _standard_form(a_eq, b_eq, n)
    m = len(rows)
    width = n + m + 1
    tab = []
    for i in range(m):
        art = [Fraction(int(i == k)) for k in range(m)]
        tab.append(rows[i] + art + [rhs[i]])
    basis = [n + i for i in range(m)]
    # phase one objective: sum of artificials, expressed in reduced form
    phase1 = [Fraction(0)] * width
    for i in range(m):
        for j in range(n):
            phase1[j] -= tab[i][j]
        phase1[-1] -= tab[i][-1]
    tab.append(phase1)
    _run(tab, basis, n + m)
    if tab[m][-1] != 0:
        return LPResult("infeasible")
    # drive degenerate artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)
    keep = [i for i in range(m) if basis[i] < n]
    tab = [tab[i][:n] + [tab[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    obj = [Fraction(v) for v in c] + [Fraction(0)]
    for i, bcol in enumerate(basis):
        f = obj[bcol]
        if f != 0:
            obj = [a - f * b for a, b in zip(obj, tab[i])]
    tab.append(obj)
    status = _run(tab, basis, n)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, bcol in enumerate(basis):
        x[bcol] = tab[i][-1]
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", x, value)


def linprog(
    c: Sequence[Number],
    a_ub: Sequence[Sequence[Number]] = (),
    b_ub: Sequence[Number] = (),
    a_eq: Sequence[Sequence[Number]] = (),
    b_eq: Sequence[Number] = (),
    free: Sequence[int] = (),
) -> LPResult:
    """Minimise ``c.x`` with ``a_ub x <= b_ub``, ``a_eq x = b_eq``.

    Variables are nonnegative except those listed in ``free``.
    """
    n = len(c)
    free = sorted(set(free))
    # column map: each variable -> (+col, optional -col)
    cols: list[tuple[int, int | None]] = []
    k = 0
    for j in range(n):
        if j in free:
            cols.append((k, k + 1))
            k += 2
        else:
            cols.append((k, None))
            k += 1
    n_slack = len(a_ub)
    total = k + n_slack

    def expand(row: Sequence[Number]) -> list[Fraction]:
        out = [Fraction(0)] * total
        for j, v in enumerate(row):
            pos, neg = cols[j]
            out[pos] += Fraction(v)
            if neg is not None:
                out[neg] -= Fraction(v)
        return out

    eq_rows = []
    eq_rhs = []
    for i, (row, b) in enumerate(zip(a_ub, b_ub)):
        r = expand(row)
        r[k + i] = Fraction(1)
        eq_rows.append(r)
        eq_rhs.append(Fraction(b))
    for row, b in zip(a_eq, b_eq):
        eq_rows.append(expand(row))
        eq_rhs.append(Fraction(b))
    res = simplex_min(expand(c), eq_rows, eq_rhs)
    if res.status != "optimal":
        return res
    x = []
    for pos, neg in cols:
        x.append(res.x[pos] - (res.x[neg] if neg is not None else 0))
    return LPResult("optimal", x, res.value)
