"""Compare the compiled and NumPy kernel backends on representative workloads.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from selfsim import kernels
from selfsim.lamp import core
from selfsim.mealy import aleshin_machine, all_words, cayley_machine


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    m = aleshin_machine()
    d, o = m.combined_tables
    words = all_words(2, 16)
    states = np.array([0, 1, 2, 3, 4, 5, 0, 1], dtype=np.int64)
    yield "act_batch aleshin 2^16 words x 8 states", lambda impl: impl.act_batch(d, o, states, words)

    c = cayley_machine(5)
    dc, oc = c.combined_tables
    words5 = all_words(5, 7)
    st5 = np.arange(dc.shape[0], dtype=np.int64)
    yield "act_batch cayley5 5^7 words x 10 states", lambda impl: impl.act_batch(dc, oc, st5, words5)

    comp = np.array([0, 1, 2, 3, 4, 5] * 4, dtype=np.int64)
    yield "composite_children x 2000", lambda impl: [impl.composite_children(d, o, comp) for _ in range(2000)]

    x = core.from_word(6, "a x a x a-1 x-1 x-1 a")
    T, cvec = core.affine_action(x, 7)
    words6 = all_words(6, 7)
    yield "affine_batch k=6 6^7 words", lambda impl: impl.affine_batch(T, cvec, 6, words6)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(backends)}")
    header = f"{'workload':44s}" + "".join(f"{name:>12s}" for name in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10s}"
    print(header)
    for label, work in workloads():
        times = {name: best_of(lambda impl=impl: work(impl), args.repeat) for name, impl in backends.items()}
        row = f"{label:44s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times.values())
        if "cython" in times:
            row += f"{times['python'] / times['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
