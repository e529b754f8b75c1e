import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import spearmanr

from csrnet.errors import InsufficientData, InvalidInput
from csrnet.rankstats import FirmRecord, correlation_matrix, spearman


def avg_ranks(xs):
    return [sum(y < x for y in xs) + (sum(y == x for y in xs) + 1) / 2 for x in xs]


def pearson(a, b):
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    num = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    den = math.sqrt(sum((x - ma) ** 2 for x in a) * sum((y - mb) ** 2 for y in b))
    return num / den


def spearman_oracle(x, y):
    return pearson(avg_ranks(x), avg_ranks(y))


def tied_fixture(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 40))
    x = rng.integers(0, max(2, n // 3), n).astype(float)
    y = (x + rng.integers(-3, 4, n)).astype(float)
    return x, y


def test_perfect_monotone():
    x = np.arange(1, 21, dtype=float)
    assert spearman(x, x ** 3)[0] == 1.0
    assert spearman(x, -np.exp(x / 5))[0] == -1.0
    assert spearman(x[:6], x[:6] ** 2)[0] == 1.0


@pytest.mark.parametrize("seed", range(100))
def test_ties_match_average_rank_oracle(seed):
    x, y = tied_fixture(seed)
    if len(set(x)) < 2 or len(set(y)) < 2:
        pytest.skip("constant fixture")
    assert abs(spearman(x, y)[0] - spearman_oracle(list(x), list(y))) <= 1e-12


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=3, max_size=30))
def test_monotone_transform_invariance(pairs):
    x = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    r, p = spearman(x, y)
    r2, p2 = spearman(np.exp(x), 3 * y ** 3 + 7)
    if math.isnan(r):
        assert math.isnan(r2)
    else:
        assert r2 == pytest.approx(r, abs=1e-12) and p2 == pytest.approx(p, abs=1e-12)
        assert spearman(y, x)[0] == pytest.approx(r, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_t_approximation_matches_scipy(seed):
    x, y = tied_fixture(seed + 500)
    x, y = np.concatenate([x, np.arange(12.0)]), np.concatenate([y, np.arange(12.0)])
    r, p = spearman(x, y)
    ref = spearmanr(x, y)
    assert r == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=1e-9)


def test_exact_small_sample_pvalue():
    x = [1.0, 2.0, 3.0, 4.0, 5.0]
    y = [2.0, 1.0, 4.0, 3.0, 5.0]
    r, p = spearman(x, y)
    perms = [spearman_oracle(x, list(q)) for q in itertools.permutations(y)]
    assert p == pytest.approx(sum(abs(v) >= abs(r) - 1e-12 for v in perms) / len(perms), abs=1e-15)
    assert spearman(x, x)[1] == pytest.approx(2 / 120)


def test_missing_and_degenerate():
    r, _ = spearman([1, 2, np.nan, 4, 5], [2, 1, 3, np.nan, 5])
    assert r == pytest.approx(spearman_oracle([1, 2, 5], [2, 1, 5]))
    with pytest.raises(InsufficientData):
        spearman([1, 2, np.nan], [1, np.nan, 3])
    r, p = spearman([1, 1, 1, 1], [1, 2, 3, 4])
    assert math.isnan(r) and math.isnan(p)
    with pytest.raises(InvalidInput):
        spearman([1, 2, 3], [1, 2])


def test_firm_record_normalisation():
    assert FirmRecord("x", ateco_code="62.01").ateco_code == "62"
    assert FirmRecord("x", ateco_code="6").ateco_code == "06"
    assert math.isnan(FirmRecord("x", revenues="").revenues)
    with pytest.raises(InvalidInput):
        FirmRecord("x", ateco_code="00")
    with pytest.raises(InvalidInput):
        FirmRecord("x", employees=-1)


def test_correlation_matrix():
    firms = [FirmRecord(f"f{i}", ateco_code="62" if i % 2 else "35", followers=i, revenues=i * i,
                        employees=10 - i) for i in range(10)]
    cm = correlation_matrix(firms, ["followers", "revenues", "employees"])
    assert cm.rho[0, 1] == 1.0 and cm.rho[0, 2] == -1.0
    assert (cm.rho == cm.rho.T).all() and (cm.n_effective == 10).all()
    sub = correlation_matrix(firms, ["followers", "revenues"], ateco_filter=62)
    assert sub.n_effective[0, 1] == 5
    with pytest.raises(InsufficientData):
        correlation_matrix(firms[:4], ["followers", "revenues"], ateco_filter="62")
