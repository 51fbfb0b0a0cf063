import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partlim.coeffs import expand_coeffs
from partlim.distn import (
    c_squared,
    clt_diagnostics,
    cumulant_closed_form_base2,
    cumulant_decomposition_check,
    cumulants_to_moments,
    decomposition_terms,
    mean_variance,
    mgf_eval,
    moments_to_cumulants,
    pmf,
    pmf_cumulants,
    pmf_moments,
    standardized_cumulants,
    standardized_mgf_cosh,
    summarize,
)
from partlim.exactnum import bernoulli_number

F = Fraction


def test_pmf_examples():
    assert pmf(expand_coeffs(2, 1)) == [F(1, 2), F(1, 2)]
    assert pmf(expand_coeffs(2, 2)) == [F(1, 8), F(1, 4), F(1, 4), F(1, 4), F(1, 8)]
    assert sum(pmf(expand_coeffs(3, 3))) == 1


def test_mean_variance_examples():
    assert mean_variance(2, 1) == (F(1, 2), F(1, 4))
    assert mean_variance(2, 2) == (F(2), F(3, 2))
    # Var X_j = (a^{2j} - 1)/12
    assert mean_variance(3, 2) == (F(5), F(8 + 80, 12))


@pytest.mark.parametrize("a, N", [(2, n) for n in range(1, 9)] + [(3, n) for n in range(1, 5)] + [(5, n) for n in range(1, 4)])
def test_mean_variance_vs_pmf(a, N):
    mean, central = pmf_moments(expand_coeffs(a, N), 3)
    assert (mean, central[2]) == mean_variance(a, N)
    assert central[1] == 0 and central[3] == 0


@pytest.mark.parametrize("N", range(1, 10))
def test_c_squared_is_nine_variances(N):
    assert c_squared(N) == 9 * mean_variance(2, N)[1]


def test_summarize():
    s = summarize(2, 3)
    assert s.normalizer == 64 and s.c_sq == c_squared(3)
    assert s.pmf()[0] == F(1, 64)
    assert summarize(3, 2, with_pmf=False).c_sq is None
    with pytest.raises(ValueError):
        summarize(2, 2, with_pmf=False).pmf()


def test_mgf_basic_values():
    assert mgf_eval(2, 5, 0.0) == 1.0
    assert mgf_eval(2, 2, math.log(2)) == pytest.approx(5.625, rel=1e-14)
    # N=1: (1 + e^t)/2
    assert mgf_eval(2, 1, 0.7) == pytest.approx((1 + math.exp(0.7)) / 2, rel=1e-14)


@pytest.mark.parametrize("a, N", [(2, 3), (2, 6), (3, 3)])
@pytest.mark.parametrize("t", [-0.3, -1e-5, 1e-4, 0.05, 0.2])
def test_mgf_vs_pmf(a, N, t):
    row = expand_coeffs(a, N).row
    direct = math.fsum(c * math.exp(t * k) for k, c in enumerate(row)) / sum(row)
    assert mgf_eval(a, N, t) == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("t", [1e-10, -3e-9, 1e-12])
def test_mgf_small_t_branch(t):
    mean, var = mean_variance(2, 4)
    approx = 1 + t * float(mean) + t * t * float(var + mean * mean) / 2
    assert mgf_eval(2, 4, t) == pytest.approx(approx, rel=1e-15)


def test_mgf_derivative_is_mean():
    h = 1e-6
    d = (mgf_eval(2, 6, h) - mgf_eval(2, 6, -h)) / (2 * h)
    assert d == pytest.approx(float(mean_variance(2, 6)[0]), rel=1e-8)


@pytest.mark.parametrize("N", [1, 3, 8, 15])
@pytest.mark.parametrize("s", [-2.0, 0.3, 1.0, 2.5])
def test_mgf_cosh_form(N, s):
    mean, var = mean_variance(2, N)
    sigma = math.sqrt(float(var))
    t = s / sigma
    via_mgf = math.exp(-t * float(mean)) * mgf_eval(2, N, t)
    assert standardized_mgf_cosh(N, s) == pytest.approx(via_mgf, rel=1e-12)


def test_mgf_errors():
    with pytest.raises(OverflowError):
        mgf_eval(2, 20, 50.0)
    with pytest.raises(ValueError):
        mgf_eval(2, 3, float("nan"))
    with pytest.raises(ValueError):
        mgf_eval(2, 3, float("inf"))
    # very negative t is fine: tends to P(Z = 0)
    assert mgf_eval(2, 5, -800.0) == pytest.approx(2.0**-15, rel=1e-12)


@pytest.mark.parametrize("a", [2, 3, 7])
@pytest.mark.parametrize("N", [1, 4, 12])
def test_kappa2_is_one(a, N):
    assert standardized_cumulants(a, N, 1).even[0] == 1


def test_kappa4_instance():
    # n = 2: 9^2/15 * (16 (16^N - N - 1) + N) / c_N^4 * B_4/4
    N = 3
    expected = F(81, 15) * (16 * (16**3 - 4) + 3) / c_squared(3) ** 2 * F(-1, 120)
    assert standardized_cumulants(2, N, 2).even[1] == expected
    # N = 1 is a symmetric Bernoulli: kappa_4 = -2
    assert standardized_cumulants(2, 1, 2).even[1] == -2


@pytest.mark.parametrize("N", range(1, 25))
def test_general_formula_matches_base2_closed_form(N):
    seq = standardized_cumulants(2, N, 12)
    assert list(seq.even) == [cumulant_closed_form_base2(N, n) for n in range(1, 13)]


@pytest.mark.parametrize("a, N", [(2, 1), (2, 3), (2, 5), (3, 2), (3, 3), (5, 2)])
def test_cumulants_vs_pmf(a, N):
    raw, std = pmf_cumulants(expand_coeffs(a, N), 8)
    assert raw[0] == mean_variance(a, N)[0]
    assert all(raw[k] == 0 for k in (2, 4, 6))
    assert std == list(standardized_cumulants(a, N, 4).even)


def test_cumulant_seq_accessors():
    seq = standardized_cumulants(2, 4, 3)
    assert seq.kappa(1) == seq.kappa(3) == 0
    assert seq.kappa(2) == 1 and seq.kappa(6) == seq.even[2]
    assert seq.as_list()[:3] == [0, 1, 0]
    with pytest.raises(ValueError):
        standardized_cumulants(2, 4, 0)


def test_decomposition_examples():
    t = decomposition_terms(1, 2)
    # N=1 standardized Bernoulli has kappa_4 = -2
    assert t["sum"] == t["closed_form"] == -2
    t = decomposition_terms(5, 1)
    assert t["sum"] == 1


@pytest.mark.parametrize("N", range(1, 16))
@pytest.mark.parametrize("n", range(1, 9))
def test_decomposition_check(N, n):
    assert cumulant_decomposition_check(N, n)


def test_decomposition_leading_dominates():
    # the complex and tail terms are O(N 4^{-nN}) relative to the leading one
    for n in (2, 3):
        t = decomposition_terms(30, n)
        assert abs(t["complex"] + t["tail"]) < abs(t["leading"]) * F(1, 10**15)


# -- CLT diagnostics --------------------------------------------------------------


def lindeberg_brute(a, N, eps):
    mean, var = mean_variance(a, N)
    thr = F(eps) ** 2 * var
    total = F(0)
    for j in range(1, N + 1):
        m = a**j
        mu = F(m - 1, 2)
        total += sum(((k - mu) ** 2 for k in range(m) if (k - mu) ** 2 > thr), F(0)) / m
    return total / var


@pytest.mark.parametrize("a, N", [(2, 1), (2, 4), (2, 8), (3, 3), (5, 3)])
@pytest.mark.parametrize("eps", ["1/10", "1/3", "1/2", "7/8"])
def test_lindeberg_vs_brute(a, N, eps):
    assert clt_diagnostics(a, N, F(eps)).lindeberg == lindeberg_brute(a, N, F(eps))


def test_lindeberg_threshold_is_strict():
    # N=1: |X - 1/2| = 1/2 = eps sigma exactly when eps = 1; strict inequality drops it
    assert clt_diagnostics(2, 1, 1).lindeberg == 0
    assert clt_diagnostics(2, 1, "0.999").lindeberg == 1


def test_feller_examples():
    assert clt_diagnostics(2, 1, 0.1).feller_ratio == 1
    d = clt_diagnostics(2, 20, 0.1)
    assert float(d.feller_ratio) == pytest.approx(0.75, abs=1e-10)
    ratios = [clt_diagnostics(2, N, 0.1).feller_ratio for N in range(1, 41)]
    assert all(x > y for x, y in zip(ratios, ratios[1:]))
    assert all(r > F(3, 4) for r in ratios)


def test_lindeberg_stays_large():
    for N in (10, 20, 40):
        d = clt_diagnostics(2, N, 0.1)
        assert d.lindeberg > F(1, 10)
        assert d.uan > F(1, 2)
        assert d.max_atom == F(1, 2)


def test_diagnostics_eps_parsing():
    assert clt_diagnostics(2, 3, 0.1).eps == F(1, 10)
    assert clt_diagnostics(2, 3, "1/7").eps == F(1, 7)
    with pytest.raises(ValueError):
        clt_diagnostics(2, 3, 0)
    out = clt_diagnostics(2, 3, 0.25).as_dict()
    assert out["eps"] == "1/4" and out["N"] == 3


# -- moment/cumulant conversion ---------------------------------------------------

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=50)


@settings(max_examples=60, deadline=None)
@given(st.lists(fractions, min_size=1, max_size=10))
def test_cumulant_moment_round_trip(kappa):
    assert moments_to_cumulants(cumulants_to_moments(kappa)) == kappa


def test_gaussian_moments_from_cumulants():
    m = cumulants_to_moments([F(0), F(1)] + [F(0)] * 6)
    assert m == [0, 1, 0, 3, 0, 15, 0, 105]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=8))
def test_cumulants_additive(values):
    # cumulants of an independent sum add
    mom = [F(sum(F(int(c), len(values)) * k**r for k, c in enumerate(np.bincount(values)))) for r in range(1, 6)]
    k1 = moments_to_cumulants(mom)
    conv = np.convolve(np.bincount(values), np.bincount(values))
    tot = int(conv.sum())
    mom2 = [F(sum(int(c) * k**r for k, c in enumerate(conv)), tot) for r in range(1, 6)]
    assert moments_to_cumulants(mom2) == [2 * k for k in k1]


def test_bernoulli_convention_in_cumulants():
    # B_2 = 1/6 reproduces Var of a uniform on {0..m-1}
    m = 6
    var = F(m * m - 1, 12)
    assert bernoulli_number(2) / 2 * (m * m - 1) == var
