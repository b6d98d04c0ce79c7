"""Exact integer, rational and prime-field linear algebra.

Matrices are lists of rows of Python ints (or Fractions); nothing here ever
rounds. Elimination over GF(p) is delegated to :mod:`toricmirror.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from . import _kernels_py, kernels

IntMatrix = list[list[int]]
Scalar = Union[int, Fraction]

INFINITE = "infinite"


def _copy(m: Sequence[Sequence[int]]) -> IntMatrix:
    return [[int(v) for v in row] for row in m]


def identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def det(m: Sequence[Sequence[Scalar]]) -> Scalar:
    """Determinant by fraction-free Bareiss elimination (exact)."""
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = m
        return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0)
    a = [list(row) for row in m]
    sign = 1
    prev: Scalar = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else num / prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[list[int], IntMatrix, IntMatrix]:
    """Smith normal form with unimodular transforms.

    Returns ``(diag, left, right)`` with ``left @ m @ right`` equal to the
    rectangular matrix carrying ``diag`` on its diagonal, ``diag[i]`` dividing
    ``diag[i+1]`` and all entries nonnegative. ``len(diag) == min(rows, cols)``.
    """
    a = _copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    left = identity(rows)
    right = identity(cols)

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, f: int) -> None:
        # row_dst += f * row_src
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + f * y for x, y in zip(left[dst], left[src])]

    def add_col(dst: int, src: int, f: int) -> None:
        for row in a:
            row[dst] += f * row[src]
        for row in right:
            row[dst] += f * row[src]

    def negate_row(i: int) -> None:
        a[i] = [-x for x in a[i]]
        left[i] = [-x for x in left[i]]

    for t in range(min(rows, cols)):
        while True:
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
            if not nonzero:
                break
            _, pi, pj = min(nonzero)
            swap_rows(t, pi)
            swap_cols(t, pj)
            done = True
            for i in range(t + 1, rows):
                q = a[i][t] // a[t][t]
                if q:
                    add_row(i, t, -q)
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // a[t][t]
                if q:
                    add_col(j, t, -q)
                if a[t][j]:
                    done = False
            if not done:
                continue
            # enforce divisibility of the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            negate_row(t)
    diag = [a[i][i] for i in range(min(rows, cols))]
    return diag, left, right


def group_index(generators: Sequence[Sequence[int]], ambient_rank: int) -> Union[int, str]:
    """Order of Z^n modulo the span of ``generators``, or ``"infinite"``."""
    gens = [list(map(int, g)) for g in generators]
    for g in gens:
        if len(g) != ambient_rank:
            raise ValueError(f"generator {g} does not have length {ambient_rank}")
    if ambient_rank == 0:
        return 1
    if not gens:
        return INFINITE
    diag, _, _ = smith_normal_form(gens)
    nonzero = [d for d in diag if d]
    if len(nonzero) < ambient_rank:
        return INFINITE
    return math.prod(nonzero)


def primitive_part(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = math.gcd(*[int(x) for x in v]) if len(v) else 0
    if g == 0:
        raise ValueError("primitive part of the zero vector")
    return tuple(int(x) // g for x in v)


def is_prime(n: int) -> bool:
    """Miller-Rabin with the prime bases up to 41 (deterministic below 3.3e24)."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if is_prime(q)]


@lru_cache(maxsize=4096)
def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


@lru_cache(maxsize=None)
def _large_prime(k: int) -> int:
    """The k-th prime below 2**31 counting downward."""
    q = kernels.MAX_COMPILED_PRIME if k == 0 else _large_prime(k - 1) - 2
    while not is_prime(q):
        q -= 2
    return q


def _to_int64(m: Sequence[Sequence[int]], p: int) -> np.ndarray:
    if isinstance(m, np.ndarray):
        return np.mod(m.astype(np.int64), p)
    return np.array([[int(v) % p for v in row] for row in m], dtype=np.int64).reshape(len(m), -1)


def rank_mod_p(m: Sequence[Sequence[int]], p: int) -> int:
    """Rank over GF(p) of an integer matrix."""
    _check_prime(p)
    if len(m) == 0 or len(m[0]) == 0:
        return 0
    if p <= kernels.MAX_COMPILED_PRIME:
        return int(kernels.rank_mod_p(_to_int64(m, p), p))
    if isinstance(m, np.ndarray):
        m = m.tolist()
    return _kernels_py.rank_mod_p(m, p)


def _integerize(m: Sequence[Sequence[Scalar]]) -> IntMatrix:
    out = []
    for row in m:
        if all(type(v) is int for v in row):
            out.append(list(row))
            continue
        den = math.lcm(*[Fraction(v).denominator for v in row]) if row else 1
        out.append([int(Fraction(v) * den) for v in row])
    return out


def rank(m: Sequence[Sequence[Scalar]]) -> int:
    """Exact rank over Q.

    Multimodular: rank_Q is the maximum of rank_p over enough large primes that
    their product exceeds the Hadamard bound on every minor.
    """
    if len(m) == 0 or len(m[0]) == 0:
        return 0
    if isinstance(m, np.ndarray) and m.dtype.kind == "i" and np.abs(m).max() < 2**20:
        a = m
        norms = (a.astype(np.float64) ** 2).sum(axis=0)
        log_bound = float(0.5 * np.log2(norms[norms > 1]).sum())
    else:
        a = _integerize(m)
        log_bound = 0.0
        for j in range(len(a[0])):
            norm2 = sum(a[i][j] ** 2 for i in range(len(a)))
            if norm2 > 1:
                log_bound += 0.5 * math.log2(norm2)
    n_cols = len(a[0])
    best = 0
    full = min(len(a), n_cols)
    covered = 0.0
    k = 0
    while covered <= log_bound + 1:
        p = _large_prime(k)
        best = max(best, rank_mod_p(a, p))
        if best == full:
            return best
        covered += math.log2(p)
        k += 1
    return best


def rref(m: Sequence[Sequence[Scalar]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q with Fractions."""
    a = [[Fraction(v) for v in row] for row in m]
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(m: Sequence[Sequence[Scalar]], n_cols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel over Q."""
    if n_cols is None:
        n_cols = len(m[0]) if m else 0
    if not m:
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    red, pivots = rref(m)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def nullspace_mod_p(m: Sequence[Sequence[int]], p: int, n_cols: int | None = None) -> list[list[int]]:
    """Basis of the right kernel over GF(p)."""
    _check_prime(p)
    if n_cols is None:
        n_cols = len(m[0]) if m else 0
    if not m:
        return [[int(i == j) for i in range(n_cols)] for j in range(n_cols)]
    if p <= kernels.MAX_COMPILED_PRIME:
        red, pivots = kernels.rref_mod_p(_to_int64(m, p), p)
    else:
        red, pivots = _kernels_py.rref_mod_p(m, p)
    red = np.asarray(red).tolist()
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n_cols
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = (-int(row[f])) % p
        basis.append(v)
    return basis


def solve(m: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> list[Fraction] | None:
    """One rational solution of ``m x = rhs`` or None when inconsistent."""
    n_cols = len(m[0]) if m else 0
    aug = [list(row) + [b] for row, b in zip(m, rhs)]
    red, pivots = rref(aug)
    if n_cols in pivots:
        return None
    x = [Fraction(0)] * n_cols
    for row, pc in zip(red, pivots):
        x[pc] = row[n_cols]
    return x


@dataclass(frozen=True)
class TwoForm:
    """Antisymmetric coefficient matrix over Q (``prime=None``) or GF(prime)."""

    coeffs: tuple[tuple[Scalar, ...], ...]
    prime: int | None = None

    def __post_init__(self) -> None:
        n = len(self.coeffs)
        if self.prime is not None:
            _check_prime(self.prime)
        for i in range(n):
            if len(self.coeffs[i]) != n:
                raise ValueError("two-form coefficients must be square")
            for j in range(n):
                if not self._eq(self.coeffs[i][j], -self.coeffs[j][i]):
                    raise ValueError("two-form coefficients must be antisymmetric")

    def _eq(self, x: Scalar, y: Scalar) -> bool:
        if self.prime is None:
            return x == y
        return (x - y) % self.prime == 0

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @classmethod
    def wedge(cls, n: int, i: int, j: int, prime: int | None = None) -> "TwoForm":
        """The basis form e_i ^ e_j (0-based indices)."""
        c = [[0] * n for _ in range(n)]
        if i != j:
            c[i][j] = 1
            c[j][i] = -1
        return cls(tuple(map(tuple, c)), prime)

    def __add__(self, other: "TwoForm") -> "TwoForm":
        if self.dim != other.dim or self.prime != other.prime:
            raise ValueError("incompatible two-forms")
        c = tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.coeffs, other.coeffs))
        return TwoForm(c, self.prime)


def wedge_contract(alpha: TwoForm, p: Sequence[Scalar]) -> list[Scalar]:
    """The vector alpha(p, .), so that contracting e_i ^ e_j with e_i* gives e_j."""
    n = alpha.dim
    if len(p) != n:
        raise ValueError(f"dual vector has length {len(p)}, form has dimension {n}")
    out = [sum(alpha.coeffs[j][i] * p[j] for j in range(n)) for i in range(n)]
    if alpha.prime is not None:
        out = [int(v) % alpha.prime for v in out]
    return out


class SparseSystem:
    """Incremental exact elimination for sparse linear equations over Q or GF(prime).

    Equations are added one at a time; an inconsistent equation is recorded
    (with its label) instead of raising, so the caller can report the
    contradiction as a certificate.
    """

    def __init__(self, prime: int | None = None):
        if prime is not None:
            _check_prime(prime)
        self.prime = prime
        self.pivots: dict[object, tuple[dict[object, Scalar], Scalar]] = {}
        self.order: list[object] = []
        self.contradiction: object | None = None
        self.equations = 0

    def _norm(self, v: Scalar) -> Scalar:
        return v % self.prime if self.prime is not None else Fraction(v)

    def _inv(self, v: Scalar) -> Scalar:
        return pow(int(v), self.prime - 2, self.prime) if self.prime is not None else 1 / Fraction(v)

    def add(self, coeffs: dict[object, Scalar], rhs: Scalar, label: object = None) -> bool:
        """Add ``sum coeffs[x] * x = rhs``; returns False once the system is inconsistent."""
        self.equations += 1
        row = {k: self._norm(v) for k, v in coeffs.items()}
        row = {k: v for k, v in row.items() if v}
        rhs = self._norm(rhs)
        while True:
            hit = next((k for k in row if k in self.pivots), None)
            if hit is None:
                break
            f = row[hit]
            prow, prhs = self.pivots[hit]
            for k, v in prow.items():
                nv = self._norm(row.get(k, 0) - f * v)
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            rhs = self._norm(rhs - f * prhs)
        if not row:
            if rhs:
                if self.contradiction is None:
                    self.contradiction = label
                return False
            return self.contradiction is None
        key = min(row, key=repr)
        inv = self._inv(row[key])
        row = {k: self._norm(v * inv) for k, v in row.items()}
        self.pivots[key] = (row, self._norm(rhs * inv))
        self.order.append(key)
        return self.contradiction is None

    @property
    def consistent(self) -> bool:
        return self.contradiction is None

    def solution(self) -> dict[object, Scalar]:
        """A particular solution (free variables set to zero)."""
        if not self.consistent:
            raise ValueError("system is inconsistent")
        values: dict[object, Scalar] = {}
        for key in reversed(self.order):
            row, rhs = self.pivots[key]
            acc = rhs
            for k, v in row.items():
                if k != key:
                    acc = self._norm(acc - v * values.get(k, 0))
            values[key] = acc
        return values
