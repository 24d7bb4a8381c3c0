"""Compare the numba kernels against the pure numpy/Python fallback.

Run: python benchmarks/bench_kernels.py --chars 2000 --nodes 300 --repeats 5
"""

import argparse
import random
import time

import numpy as np

from semdiff import _kernels
from semdiff.surface import TreeNode, _postorder_arrays


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def random_code_like(rng, length):
    alphabet = "abcdefghij ()[]{}=+-*/%:.\n"
    return "".join(rng.choice(alphabet) for _ in range(length))


def random_tree(rng, size):
    nodes = [TreeNode(rng.choice("abcdefgh")) for _ in range(size)]
    for i in range(1, size):
        nodes[rng.randrange(i)].children.append(nodes[i])
    return nodes[0]


def encode_pair(t1, t2):
    order1, lmld1, kr1 = _postorder_arrays(t1, 1_000_000)
    order2, lmld2, kr2 = _postorder_arrays(t2, 1_000_000)
    intern = {}
    l1 = np.asarray([intern.setdefault(n.kind, len(intern)) for n in order1], dtype=np.int64)
    l2 = np.asarray([intern.setdefault(n.kind, len(intern)) for n in order2], dtype=np.int64)
    return (l1, lmld1, kr1, l2, lmld2, kr2)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--chars", type=int, default=2000)
    parser.add_argument("--nodes", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = random.Random(0)
    s1 = random_code_like(rng, args.chars)
    s2 = random_code_like(rng, args.chars)
    a = np.frombuffer(s1.encode("utf-32-le"), dtype=np.uint32).copy()
    b = np.frombuffer(s2.encode("utf-32-le"), dtype=np.uint32).copy()

    print(f"levenshtein over {args.chars}x{args.chars} chars")
    t_numpy = time_call(_kernels.levenshtein_numpy, a, b, repeats=args.repeats)
    print(f"  numpy fallback : {t_numpy * 1000:9.2f} ms")
    if _kernels.USE_NUMBA:
        _kernels._levenshtein_njit(a[:8], b[:8])  # warm up the JIT
        t_njit = time_call(_kernels._levenshtein_njit, a, b, repeats=args.repeats)
        print(f"  numba njit     : {t_njit * 1000:9.2f} ms   ({t_numpy / t_njit:5.1f}x)")
    else:
        print("  numba disabled (SEMDIFF_NO_NUMBA or import failure)")

    ted_args = encode_pair(random_tree(rng, args.nodes), random_tree(rng, args.nodes))
    print(f"tree edit distance over {args.nodes}-node trees")
    t_loops = time_call(_kernels._ted_loops, *ted_args, repeats=args.repeats)
    print(f"  python fallback: {t_loops * 1000:9.2f} ms")
    if _kernels.USE_NUMBA:
        small = encode_pair(random_tree(rng, 4), random_tree(rng, 4))
        _kernels._ted_njit(*small)  # warm up the JIT
        t_njit = time_call(_kernels._ted_njit, *ted_args, repeats=args.repeats)
        print(f"  numba njit     : {t_njit * 1000:9.2f} ms   ({t_loops / t_njit:5.1f}x)")


if __name__ == "__main__":
    main()
