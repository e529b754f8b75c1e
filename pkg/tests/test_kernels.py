"""Kernel oracles and equivalence between the compiled and pure-Python backends."""
import itertools
import os
from functools import lru_cache

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from csrnet import _kernels

BACKENDS = _kernels.backends()
words = st.text(alphabet="abcàè1", max_size=9)


def edit_oracle(a: str, b: str) -> int:
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0 or j == 0:
            return i + j
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
    return d(len(a), len(b))


def tail_oracle(q, v):
    total = 0.0
    for bits in itertools.product((0, 1), repeat=len(q)):
        if sum(bits) >= v:
            total += np.prod([qa if b else 1 - qa for qa, b in zip(q, bits)])
    return total


@pytest.mark.skipif(os.environ.get("CSRNET_PURE_PYTHON") == "1", reason="fallback forced")
def test_compiled_backend_built():
    assert "compiled" in BACKENDS, "extension missing; run pip install -e . --no-build-isolation"


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(a=words, b=words)
def test_levenshtein_matches_recursive_oracle(name, a, b):
    assert BACKENDS[name].levenshtein(a, b) == edit_oracle(a, b)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(strings=st.lists(words, max_size=12, unique=True), data=st.data())
def test_close_pairs_matches_brute_force(name, strings, data):
    elig = np.array(data.draw(st.lists(st.booleans(), min_size=len(strings), max_size=len(strings))),
                    dtype=np.uint8)
    thr = data.draw(st.sampled_from([0.1, 0.2, 0.34, 0.5]))
    i, j, d = BACKENDS[name].close_pairs(strings, elig, thr)
    got = {(a, b): x for a, b, x in zip(i.tolist(), j.tolist(), d.tolist())}
    want = {}
    for a, b in itertools.combinations(range(len(strings)), 2):
        sa, sb = strings[a], strings[b]
        if not sa or not sb or not (elig[a] or elig[b]):
            continue
        rel = edit_oracle(sa, sb) / max(len(sa), len(sb))
        if rel < thr:
            want[(a, b)] = rel
    assert got.keys() == want.keys()
    for key in got:
        assert got[key] == pytest.approx(want[key], abs=1e-15)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(q=st.lists(st.floats(0, 1), min_size=0, max_size=9), v=st.integers(0, 10))
def test_poibin_tail_matches_enumeration(name, q, v):
    t = BACKENDS[name].poibin_tail(np.array(q, dtype=float), v)
    assert len(t) == max(v, 0) + 1
    for w in range(len(t)):
        assert abs(t[w] - tail_oracle(q, w)) <= 1e-12


def test_backends_agree_on_poibin_bitwise():
    if len(BACKENDS) < 2:
        pytest.skip("single backend")
    rng = np.random.default_rng(3)
    for _ in range(50):
        q = rng.random(rng.integers(1, 300)) * rng.random()
        v = int(rng.integers(1, 40))
        a = BACKENDS["python"].poibin_tail(q, v)
        b = BACKENDS["compiled"].poibin_tail(q, v)
        assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


def _sweep_inputs(seed):
    g = nx.gnp_random_graph(40, 0.12, seed=seed)
    a = nx.to_scipy_sparse_array(g, nodelist=sorted(g), format="csr", dtype=float)
    k = np.asarray(a.sum(axis=1)).ravel()
    order = np.random.default_rng(seed).permutation(len(k)).astype(np.int64)
    return a.indptr.astype(np.int64), a.indices.astype(np.int64), a.data, k, order, float(k.sum())


def test_backends_agree_on_louvain_sweep():
    if len(BACKENDS) < 2:
        pytest.skip("single backend")
    for seed in range(20):
        indptr, indices, w, k, order, m2 = _sweep_inputs(seed)
        res = {}
        for name, mod in BACKENDS.items():
            comm = np.arange(len(k), dtype=np.int64)
            tot = k.copy()
            moves = mod.louvain_sweep(indptr, indices, w, k, order, comm, tot, m2)
            res[name] = (moves, comm.tolist(), tot.tolist())
        assert res["python"] == res["compiled"]
