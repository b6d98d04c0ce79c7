"""Compare the compiled kernels with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import argparse
import random
import timeit

from toricmirror import _kernels_py, kernels


def random_matrix(rows: int, cols: int, seed: int) -> list[list[int]]:
    rng = random.Random(seed)
    return [[rng.randint(-50, 50) for _ in range(cols)] for _ in range(rows)]


def cube_facets(n: int, r: int) -> tuple[list[list[int]], list[int]]:
    normals, offsets = [], []
    for i in range(n):
        for s in (1, -1):
            normals.append([s if j == i else 0 for j in range(n)])
            offsets.append(-r)
    return normals, offsets


def bench(label: str, fn, repeat: int) -> float:
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<10} {best * 1e3:9.2f} ms")
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=200, help="matrix side for rank_mod_p")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if kernels.BACKEND != "compiled":
        print("compiled extension not available; only the fallback is timed")

    m = random_matrix(args.size, args.size, 0)
    p = 1_000_003
    print(f"rank_mod_p {args.size}x{args.size} over GF({p})")
    slow = bench("python", lambda: _kernels_py.rank_mod_p(m, p), args.repeat)
    if kernels.BACKEND == "compiled":
        fast = bench("compiled", lambda: kernels.rank_mod_p(m, p), args.repeat)
        print(f"  speedup    {slow / fast:9.1f}x")

    normals, offsets = cube_facets(4, 3)
    lo, hi = [-4] * 4, [4] * 4
    print("box_scan over a 9^4 box")
    slow = bench("python", lambda: _kernels_py.box_scan(normals, offsets, lo, hi), args.repeat)
    if kernels.BACKEND == "compiled":
        fast = bench("compiled", lambda: kernels.box_scan(normals, offsets, lo, hi), args.repeat)
        print(f"  speedup    {slow / fast:9.1f}x")


if __name__ == "__main__":
    main()
