import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperstar._accel import BACKEND, BACKENDS, get_backend
from hyperstar.sampler import binom, binomial_table

from strategies import hypergraphs

needs_compiled = pytest.mark.skipif("compiled" not in BACKENDS,
                                    reason="compiled extension not built")


def test_default_backend():
    assert BACKEND in BACKENDS
    assert get_backend() is BACKENDS[BACKEND]
    with pytest.raises(ValueError, match="unavailable"):
        get_backend("gpu")


def test_pure_mode_from_environment():
    env = dict(os.environ, HYPERSTAR_PURE="1")
    res = subprocess.run([sys.executable, "-c", "import hyperstar; print(hyperstar.BACKEND)"],
                         env=env, capture_output=True, text=True)
    assert res.stdout.strip() == "python"


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(H=hypergraphs())
def test_stars_and_units_agree(H):
    c, p = BACKENDS["compiled"], BACKENDS["python"]
    ic, xc = c.build_stars(H.edges, H.n)
    ip, xp = p.build_stars(H.edges, H.n)
    assert np.array_equal(ic, ip) and np.array_equal(xc, xp)
    assert np.array_equal(c.unit_representatives(H.edges, ic, xc),
                          p.unit_representatives(H.edges, ip, xp))


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(st.integers(2, 3000), st.integers(1, 7), st.data())
def test_unrank_agrees(n, k, data):
    k = min(k, n)
    table = binomial_table(n, k)
    if table is None:
        return
    total = binom(n, k)
    idx = data.draw(st.lists(st.integers(0, total - 1), min_size=1, max_size=50))
    ranks = np.array(idx, dtype=np.uint64)
    a = BACKENDS["compiled"].unrank_colex(ranks, table, k)
    b = BACKENDS["python"].unrank_colex(ranks, table, k)
    assert np.array_equal(a, b)


@needs_compiled
@settings(max_examples=50, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2 ** 32))
def test_jacobi_agrees(n, seed):
    A = np.random.default_rng(seed).normal(size=(n, n))
    A = np.ascontiguousarray(A + A.T)
    ea, sa, ca = BACKENDS["compiled"].jacobi_eigenvalues(A.copy(), 1e-12, 100)
    eb, sb, cb = BACKENDS["python"].jacobi_eigenvalues(A.copy(), 1e-12, 100)
    assert ca and cb
    assert np.max(np.abs(np.sort(ea) - np.sort(eb))) <= 1e-10 * (1 + np.abs(A).max())


@needs_compiled
def test_benchmark_script_runs():
    script = os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks", "bench_backends.py")
    res = subprocess.run([sys.executable, script, "--repeat", "1", "--n", "3000"],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "sample + census" in res.stdout
