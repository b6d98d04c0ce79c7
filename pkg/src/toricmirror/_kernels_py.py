"""Pure-Python versions of the compiled kernels, used when the extension is absent."""

from __future__ import annotations

import itertools

import numpy as np


def _eliminate(rows: list[list[int]], p: int, full: bool) -> list[int]:
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    r = 0
    pivots: list[int] = []
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [(v * inv) % p for v in rows[r]]
        pivot_row = rows[r]
        for i in range(n_rows):
            if i == r or (not full and i < r):
                continue
            f = rows[i][c]
            if f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], pivot_row)]
        pivots.append(c)
        r += 1
    return pivots


def rank_mod_p(mat, p: int) -> int:
    """Rank of an integer matrix over GF(p)."""
    rows = [[int(v) % p for v in row] for row in np.asarray(mat, dtype=object).tolist()]
    if not rows or not rows[0]:
        return 0
    return len(_eliminate(rows, p, False))


def rref_mod_p(mat, p: int):
    """Reduced row echelon form over GF(p); returns (matrix, pivot columns)."""
    arr = np.asarray(mat, dtype=object)
    rows = [[int(v) % p for v in row] for row in arr.tolist()]
    if not rows or not rows[0]:
        return np.zeros(arr.shape, dtype=np.int64), []
    pivots = _eliminate(rows, p, True)
    return np.array(rows, dtype=np.int64), pivots


def box_scan(normals, offsets, lo, hi):
    """All integer x with lo <= x <= hi and normals @ x >= offsets."""
    nm = [list(map(int, r)) for r in np.asarray(normals).tolist()]
    off = [int(v) for v in np.asarray(offsets).tolist()]
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    n = len(lo)
    out = []
    # last coordinate varies slowest, matching the compiled odometer
    for rev in itertools.product(*[range(a, b + 1) for a, b in zip(reversed(lo), reversed(hi))]):
        x = rev[::-1]
        if all(sum(a * b for a, b in zip(row, x)) >= o for row, o in zip(nm, off)):
            out.append(x)
    if not out:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(out, dtype=np.int64)
