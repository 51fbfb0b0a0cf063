import threading
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from partlim.exactnum import (
    BernoulliCache,
    bernoulli_number,
    bernoulli_poly_at_half,
    binomial,
    s2,
)


def bernoulli_by_series(n_max):
    """Invert (e^t - 1)/t = sum t^k/(k+1)! as a power series; B_n = n! * coeff."""
    a = [Fraction(1, factorial(k + 1)) for k in range(n_max + 1)]
    inv = [Fraction(1)]
    for n in range(1, n_max + 1):
        inv.append(-sum(a[k] * inv[n - k] for k in range(1, n + 1)))
    return [inv[n] * factorial(n) for n in range(n_max + 1)]


def pascal_rows(n_max):
    rows = [[1]]
    for _ in range(n_max):
        prev = rows[-1]
        rows.append([1] + [prev[i] + prev[i + 1] for i in range(len(prev) - 1)] + [1])
    return rows


@pytest.mark.parametrize("n, expected", [(0, Fraction(1)), (1, Fraction(-1, 2)),
                                         (2, Fraction(1, 6)), (4, Fraction(-1, 30)),
                                         (6, Fraction(1, 42)), (12, Fraction(-691, 2730))])
def test_bernoulli_values(n, expected):
    assert bernoulli_number(n) == expected


def test_bernoulli_matches_series_inversion():
    assert [bernoulli_number(n) for n in range(61)] == bernoulli_by_series(60)


def test_odd_bernoulli_vanish():
    assert all(bernoulli_number(n) == 0 for n in range(3, 101, 2))


def test_pascal_recurrence_closure():
    for n in range(1, 61):
        assert sum(binomial(n + 1, k) * bernoulli_number(k) for k in range(n + 1)) == 0


@pytest.mark.parametrize("n, expected", [(0, 1), (1, 0), (2, Fraction(-1, 12)), (4, Fraction(7, 240))])
def test_bernoulli_half_values(n, expected):
    assert bernoulli_poly_at_half(n) == expected


def test_bernoulli_half_identity():
    for n in range(61):
        assert bernoulli_poly_at_half(n) == (Fraction(2) ** (1 - n) - 1) * bernoulli_number(n)


def test_bernoulli_rejects_negative():
    with pytest.raises(ValueError):
        bernoulli_number(-1)
    with pytest.raises(ValueError):
        bernoulli_poly_at_half(-2)


def test_cache_concurrent_growth():
    cache = BernoulliCache()
    results = {}

    def work(i):
        results[i] = [cache.get(n) for n in range(0, 80, 2)]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    expected = [bernoulli_number(n) for n in range(0, 80, 2)]
    assert all(r == expected for r in results.values())
    assert len(cache) >= 79


def test_binomial_examples():
    assert binomial(5, 2) == 10
    assert binomial(7, 3) == 35
    assert binomial(0, 0) == 1
    assert binomial(3, 5) == 0


def test_binomial_matches_pascal():
    rows = pascal_rows(30)
    for n, row in enumerate(rows):
        for k, v in enumerate(row):
            assert binomial(n, k) == v


def test_binomial_negative_upper():
    # C(-1, k) = (-1)^k
    assert [binomial(-1, k) for k in range(5)] == [1, -1, 1, -1, 1]


def test_binomial_rejects_negative_k():
    with pytest.raises(ValueError):
        binomial(5, -1)


@pytest.mark.parametrize("n, expected", [(0, 0), (7, 3), (12, 2), (255, 8), (256, 1)])
def test_s2_examples(n, expected):
    assert s2(n) == expected


@given(st.integers(min_value=0, max_value=10**30))
def test_s2_doubling(n):
    assert s2(2 * n) == s2(n)
    assert s2(2 * n + 1) == s2(n) + 1


def test_s2_rejects_negative():
    with pytest.raises(ValueError):
        s2(-3)
