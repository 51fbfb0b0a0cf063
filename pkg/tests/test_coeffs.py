import itertools
from collections import Counter

import pytest

from partlim.coeffs import (
    BFileError,
    BudgetExceeded,
    CoeffTable,
    alpha_row,
    appendix_tn_check,
    brute_force_coeffs,
    cache_path,
    coeff_via_s2,
    expand_binary_product,
    expand_coeffs,
    finite_difference_check,
    finite_difference_sides,
    invert_s2_check,
    oeis_crosscheck,
    parse_bfile,
    read_cache,
    row_length,
    rows_to_bfile,
    tn_direct,
    tn_weighted,
    write_cache,
)
from partlim.exactnum import s2

KNOWN_ROWS = {
    1: (1, 1),
    2: (1, 2, 2, 2, 1),
    3: (1, 3, 5, 7, 8, 8, 8, 8, 7, 5, 3, 1),
}


def count_tuples(a, N):
    """Plain itertools enumeration, independent of numpy."""
    c = Counter(sum(t) for t in itertools.product(*(range(a**j) for j in range(1, N + 1))))
    return tuple(c[k] for k in range(max(c) + 1))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_small_rows(N):
    assert expand_coeffs(2, N).row == KNOWN_ROWS[N]


@pytest.mark.parametrize("a, N", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (4, 2), (5, 2)])
def test_expand_vs_itertools(a, N):
    assert expand_coeffs(a, N).row == count_tuples(a, N)


@pytest.mark.parametrize("a, N", [(2, n) for n in range(1, 7)] + [(3, n) for n in range(1, 5)])
def test_expand_vs_bruteforce(a, N):
    assert expand_coeffs(a, N).row == brute_force_coeffs(a, N).row


def test_bruteforce_small_examples():
    assert brute_force_coeffs(2, 1).row == (1, 1)
    assert brute_force_coeffs(2, 2).row == (1, 2, 2, 2, 1)
    t = brute_force_coeffs(3, 2)
    assert len(t) == 11 and sum(t.row) == 27


@pytest.mark.parametrize("N", range(1, 11))
def test_binary_product_form(N):
    assert expand_binary_product(N).row == expand_coeffs(2, N).row


def test_verify_flag_runs_both_forms():
    assert expand_coeffs(2, 7, verify=True).row == expand_binary_product(7).row


@pytest.mark.parametrize("a", [2, 3, 5])
@pytest.mark.parametrize("N", range(1, 7))
def test_table_invariants(a, N):
    t = expand_coeffs(a, N)
    t.check()
    assert len(t) == row_length(a, N) == a * (a**N - 1) // (a - 1) - N + 1


def test_large_values_are_exact():
    # a=2, N=12 exceeds int64 totals: 2^78 tuples
    t = expand_coeffs(2, 12)
    assert sum(t.row) == 2**78
    assert t.row == t.row[::-1]
    assert all(isinstance(v, int) for v in t.row[:5])


def test_rejects_bad_params():
    with pytest.raises(ValueError):
        expand_coeffs(1, 3)
    with pytest.raises(ValueError):
        expand_coeffs(2, 0)
    with pytest.raises(BudgetExceeded):
        expand_coeffs(2, 30)
    with pytest.raises(BudgetExceeded):
        expand_coeffs(3, 5, max_len=100)
    with pytest.raises(BudgetExceeded):
        brute_force_coeffs(2, 8)


def test_alpha_row_zero():
    assert alpha_row(0) == (1,)
    assert alpha_row(3) == KNOWN_ROWS[3]


@pytest.mark.parametrize("j, N, expected", [(0, 0, 1), (0, 4, 1), (4, 2, 1), (5, 3, 8), (2, 2, 2)])
def test_coeff_via_s2_examples(j, N, expected):
    assert coeff_via_s2(j, N) == expected


@pytest.mark.parametrize("N", range(1, 7))
def test_coeff_via_s2_matches_expansion(N):
    row = expand_coeffs(2, N).row
    assert [coeff_via_s2(j, N) for j in range(len(row))] == list(row)
    # the formula keeps holding past the natural range, where the row is zero
    assert all(coeff_via_s2(j, N) == 0 for j in range(len(row), len(row) + 20))


def test_coeff_via_s2_rejects_negative():
    with pytest.raises(ValueError):
        coeff_via_s2(-1, 2)


@pytest.mark.parametrize("n, N, expected", [(0, 1, 1), (0, 4, 1), (3, 2, 1), (1, 3, -1)])
def test_invert_examples(n, N, expected):
    assert invert_s2_check(n, N) == expected


@pytest.mark.parametrize("N", range(1, 7))
def test_invert_full_range(N):
    assert [invert_s2_check(n, N) for n in range(2**N)] == [(-1) ** s2(n) for n in range(2**N)]


def test_invert_out_of_range():
    with pytest.raises(ValueError):
        invert_s2_check(4, 2)
    with pytest.raises(ValueError):
        invert_s2_check(-1, 2)


def test_tn_examples():
    assert tn_direct(1, [0, 1], 0) == tn_weighted(1, [0, 1], 0) == 1
    ones = {y: 1 for y in range(-5, 20)}
    assert tn_direct(2, ones, 7) == tn_weighted(2, ones, 7) == 8
    squares = {y: y * y for y in range(0, 12)}
    assert appendix_tn_check(3, squares, 0)


def test_tn_expanded_n3():
    # T_3 written out term by term
    g = {y: 10**y for y in range(12)}
    assert tn_weighted(3, g, 0) == sum(c * 10**k for k, c in enumerate(KNOWN_ROWS[3]))
    assert tn_direct(3, g, 0) == tn_weighted(3, g, 0)


@pytest.mark.parametrize("N", range(1, 6))
def test_tn_polynomial_and_exponential(N):
    span = 2 ** (N + 1) + 3
    poly = {y: 2 * y**3 - y + 5 for y in range(-3, span)}
    expo = {y: 3**y for y in range(0, span)}
    assert appendix_tn_check(N, poly, -3)
    assert appendix_tn_check(N, expo, 2)


def test_tn_insufficient_domain():
    with pytest.raises(ValueError, match="does not cover"):
        appendix_tn_check(3, {y: y for y in range(5)}, 0)


@pytest.mark.parametrize("N", range(1, 6))
def test_fd_low_degree_polynomial_vanishes(N):
    f = {y: sum((y**d) for d in range(N)) for y in range(0, 2**N + 2)}
    assert finite_difference_sides(N, f, 0) == (0, 0)


def test_fd_examples():
    assert finite_difference_check(2, {y: y * y for y in range(4)}, 0)
    assert finite_difference_check(3, {y: 2**y for y in range(8)}, 0)
    lhs, rhs = finite_difference_sides(2, {y: y * y for y in range(4)}, 0)
    # 0 - 1 - 4 + 9
    assert lhs == rhs == 4


@pytest.mark.parametrize("N", range(1, 6))
def test_fd_polynomial_and_exponential(N):
    poly = {y: y**N + 3 * y ** (N + 1) for y in range(0, 2**N + 5)}
    expo = {y: 5**y for y in range(0, 2**N + 5)}
    assert finite_difference_check(N, poly, 1)
    assert finite_difference_check(N, expo, 3)


def test_fd_insufficient_domain():
    with pytest.raises(ValueError):
        finite_difference_check(3, {y: y for y in range(5)}, 0)


def test_parse_bfile():
    text = "# A test\n\n1 1\n2  1\n3 -4\n   # trailing comment\n"
    assert parse_bfile(text.splitlines()) == [(1, 1), (2, 1), (3, -4)]
    with pytest.raises(BFileError):
        parse_bfile(["1 2 3"])
    with pytest.raises(BFileError):
        parse_bfile(["1 x"])


def tables(n_max):
    return [expand_coeffs(2, n) for n in range(1, n_max + 1)]


def test_crosscheck_all_match():
    pairs = parse_bfile(rows_to_bfile(tables(4), offset=1).splitlines())
    report = oeis_crosscheck(tables(4), pairs)
    assert report.ok
    assert [r.status for r in report.rows] == ["match"] * 4


def test_crosscheck_single_table():
    pairs = parse_bfile(rows_to_bfile(tables(3)).splitlines())
    report = oeis_crosscheck(expand_coeffs(2, 3), pairs)
    assert report.ok and report.rows[0].order == 3


def test_crosscheck_first_row_zero():
    text = "0 1\n" + rows_to_bfile(tables(3), offset=1)
    report = oeis_crosscheck(tables(3), parse_bfile(text.splitlines()), first_row=0)
    assert report.ok


def test_crosscheck_truncated():
    pairs = parse_bfile(rows_to_bfile(tables(4)).splitlines())[:12]
    report = oeis_crosscheck(tables(4), pairs)
    # rows 1 and 2 occupy 7 entries, row 3 gets 5 of its 12, row 4 none
    assert [r.status for r in report.rows] == ["match", "match", "partial", "missing"]
    assert report.rows[2].covered == 5
    assert not report.ok


def test_crosscheck_locates_corruption():
    pairs = parse_bfile(rows_to_bfile(tables(4)).splitlines())
    # row 3 starts at flat index 2 + 5 = 7; corrupt its k = 4 entry
    pairs[7 + 4] = (pairs[7 + 4][0], 9)
    report = oeis_crosscheck(tables(4), pairs)
    bad = [r for r in report.rows if r.status == "mismatch"]
    assert len(bad) == 1 and bad[0].order == 3
    assert bad[0].mismatches == [(4, 8, 9)]


def test_cache_round_trip(tmp_path):
    for a, N in [(2, 5), (3, 3), (2, 13)]:
        t = expand_coeffs(a, N)
        path = write_cache(t, tmp_path / "cache")
        assert path == cache_path(tmp_path / "cache", a, N)
        first = path.read_text().splitlines()[0]
        assert first == f"partlim-coeffs v1 a={a} N={N} len={len(t)}"
        back = read_cache(path)
        assert back == t
    assert not list((tmp_path / "cache").glob("*.tmp"))


def test_cache_rejects_bad_files(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("something else\n1\n")
    with pytest.raises(ValueError):
        read_cache(p)
    p.write_text("partlim-coeffs v1 a=2 N=2 len=5\n1\n2\n2\n")
    with pytest.raises(ValueError):
        read_cache(p)


def test_coefftable_check_catches_damage():
    with pytest.raises(AssertionError):
        CoeffTable(2, 2, (1, 2, 3, 2, 1)).check()
