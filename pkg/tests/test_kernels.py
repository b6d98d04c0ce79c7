import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricmirror import _kernels_py, kernels

compiled = pytest.importorskip("toricmirror._kernels") if kernels.BACKEND == "compiled" else None

matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-20, 20), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)
primes = st.sampled_from([2, 3, 5, 7, 101, 2_147_483_647])


def reference_rank(m, p):
    # independent Gaussian elimination using Python modular inverses
    rows = [[v % p for v in row] for row in m]
    rank = 0
    cols = len(rows[0])
    for c in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c] * pow(rows[rank][c], -1, p)
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@given(matrices, primes)
def test_rank_backends_agree(m, p):
    expect = reference_rank(m, p)
    assert _kernels_py.rank_mod_p(m, p) == expect
    assert kernels.rank_mod_p(m, p) == expect


@given(matrices, primes)
def test_rref_backends_agree(m, p):
    a, pa = _kernels_py.rref_mod_p(m, p)
    b, pb = kernels.rref_mod_p(m, p)
    assert pa == list(pb) and np.array_equal(np.asarray(a), np.asarray(b))


@given(
    st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=1, max_size=5),
    st.lists(st.integers(-4, 2), min_size=5, max_size=5),
)
def test_box_scan_backends_agree(normals, offsets):
    off = offsets[: len(normals)]
    lo, hi = [-3, -2], [2, 3]
    a = _kernels_py.box_scan(normals, off, lo, hi)
    b = kernels.box_scan(normals, off, lo, hi)
    assert np.array_equal(a, b)
    for x in a:
        assert all(np.dot(r, x) >= o for r, o in zip(normals, off))


def test_empty_inputs():
    assert kernels.rank_mod_p(np.zeros((0, 3), dtype=int), 5) == 0
    assert kernels.box_scan([[1, 0]], [5], [0, 0], [1, 1]).shape == (0, 2)


def test_pure_python_switch():
    env = dict(os.environ, TORICMIRROR_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from toricmirror import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_compiled_backend_selected():
    if compiled is None:
        pytest.skip("extension not built")
    assert kernels.BACKEND == "compiled"
