from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from selfsim import kernels
from selfsim.mealy import BUILDERS, all_words

BACKENDS = kernels.available_backends()


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_pure_env_var_selects_fallback():
    code = "from selfsim import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, SELFSIM_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_act_batch_parity(name):
    m = BUILDERS[name]()
    d, o = m.combined_tables
    rng = np.random.default_rng(7)
    words = all_words(m.nsym, 4)
    for _ in range(10):
        states = rng.integers(0, d.shape[0], size=int(rng.integers(0, 6))).astype(np.int64)
        results = [impl.act_batch(d, o, states, words) for impl in BACKENDS.values()]
        for r in results[1:]:
            assert np.array_equal(r, results[0])


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_composite_children_parity(name):
    m = BUILDERS[name]()
    d, o = m.combined_tables
    rng = np.random.default_rng(3)
    for _ in range(10):
        comp = rng.integers(0, d.shape[0], size=int(rng.integers(1, 6))).astype(np.int64)
        results = [impl.composite_children(d, o, comp) for impl in BACKENDS.values()]
        for out, nxt in results[1:]:
            assert np.array_equal(out, results[0][0]) and np.array_equal(nxt, results[0][1])


@pytest.mark.parametrize("k", (2, 7, 1000003, 2**40 + 15))
def test_affine_batch_parity(k):
    rng = np.random.default_rng(k % 1000)
    L = 9
    T = np.triu(rng.integers(0, min(k, 2**62), size=(L, L), dtype=np.int64))
    c = rng.integers(0, min(k, 2**62), size=L, dtype=np.int64)
    words = rng.integers(0, min(k, 2**62), size=(50, L), dtype=np.int64)
    exact = np.array([[(sum(int(words[r, i]) * int(T[i, j]) for i in range(L)) + int(c[j])) % k
                       for j in range(L)] for r in range(50)], dtype=object)
    for impl in BACKENDS.values():
        got = impl.affine_batch(T, c, k, words)
        assert np.array_equal(got.astype(object), exact)
