"""Restricted-partition coefficient rows.

``alpha_k^(N)(a)`` counts tuples ``(k_1, ..., k_N)`` with
``0 <= k_j <= a^j - 1`` and ``k_1 + ... + k_N = k``.  Equivalently it is the
coefficient of ``x^k`` in ``prod_{j=1}^{N} (x^{a^j} - 1) / (x - 1)``.

Each factor is an all-ones block of length ``a^j``, so multiplying by it is
a sliding-window sum over the current row: one prefix-sum pass, linear in
the output length.  Factors are applied smallest block first.

Besides the expansion this module holds the independent oracles (tuple
enumeration, the alternating binary digit-sum convolution), the T_N and
finite-difference identities, OEIS b-file ingestion and the on-disk cache.
"""

from __future__ import annotations

import itertools
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from partlim.exactnum import binomial, s2

__all__ = [
    "DEFAULT_MAX_LEN",
    "DEFAULT_ENUM_BUDGET",
    "BudgetExceeded",
    "BFileError",
    "CoeffTable",
    "RowCheck",
    "CrosscheckReport",
    "row_length",
    "expand_coeffs",
    "expand_binary_product",
    "brute_force_coeffs",
    "alpha_row",
    "coeff_via_s2",
    "invert_s2_check",
    "appendix_tn_check",
    "finite_difference_check",
    "parse_bfile",
    "read_bfile",
    "rows_to_bfile",
    "oeis_crosscheck",
    "cache_path",
    "write_cache",
    "read_cache",
    "fetch_bfile",
]

DEFAULT_MAX_LEN = 2**28
DEFAULT_ENUM_BUDGET = 2**22
CACHE_MAGIC = "partlim-coeffs v1"

_INT64_SAFE = 2**62

ValueTable = Union[Mapping[int, object], Sequence[object]]


class BudgetExceeded(ValueError):
    """The requested (a, N) is too large for the configured budget."""


class BFileError(ValueError):
    """A b-file line could not be parsed."""


def _check_params(a: int, N: int) -> None:
    if a < 2:
        raise ValueError(f"base a must be >= 2, got {a}")
    if N < 1:
        raise ValueError(f"order N must be >= 1, got {N}")


def max_degree(a: int, N: int) -> int:
    """Largest attainable sum ``a(a^N - 1)/(a - 1) - N``."""
    return a * (a**N - 1) // (a - 1) - N


def row_length(a: int, N: int) -> int:
    return max_degree(a, N) + 1


@dataclass(frozen=True)
class CoeffTable:
    """Full coefficient row for one ``(a, N)``.

    ``row[k] = alpha_k^(N)(a)``; ``total = a^(N(N+1)/2)`` is the number of
    tuples and the normalizer of the probability mass function.
    """

    base: int
    order: int
    row: tuple[int, ...] = field(repr=False)

    @property
    def total(self) -> int:
        return self.base ** (self.order * (self.order + 1) // 2)

    @property
    def degree(self) -> int:
        return len(self.row) - 1

    def __len__(self) -> int:
        return len(self.row)

    def __getitem__(self, k: int) -> int:
        return self.row[k]

    def check(self) -> None:
        """Raise ``AssertionError`` if a structural invariant is broken."""
        row = self.row
        assert len(row) == row_length(self.base, self.order), "row length"
        assert row[0] == 1 and row[-1] == 1, "endpoint entries"
        assert all(v > 0 for v in row), "positivity"
        assert row == row[::-1], "palindrome"
        assert sum(row) == self.total, "total"


def _block_multiply(row: np.ndarray, m: int) -> np.ndarray:
    """Multiply the polynomial ``row`` by ``1 + x + ... + x^(m-1)``."""
    L = len(row)
    prefix = np.empty(L + 1, dtype=row.dtype)
    prefix[0] = 0
    np.cumsum(row, out=prefix[1:])
    idx = np.arange(1, L + m)
    hi = np.minimum(idx, L)
    lo = np.maximum(idx - m, 0)
    return prefix[hi] - prefix[lo]


def _dtype_for(total: int):
    return np.int64 if total < _INT64_SAFE else object


def expand_coeffs(
    a: int, N: int, *, max_len: int = DEFAULT_MAX_LEN, verify: bool = False
) -> CoeffTable:
    """Expand ``prod_{j=1}^{N} (1 + x + ... + x^(a^j - 1))`` exactly.

    With ``verify=True`` and ``a == 2`` the row is recomputed from the
    binary product form ``prod_{i=0}^{N-1} (1 + x^(2^i))^(N-i)`` and the two
    are compared.
    """
    _check_params(a, N)
    length = row_length(a, N)
    if length > max_len:
        raise BudgetExceeded(
            f"row length {length} for (a={a}, N={N}) exceeds budget {max_len}"
        )
    total = a ** (N * (N + 1) // 2)
    row = np.ones(1, dtype=_dtype_for(total))
    for j in range(1, N + 1):
        row = _block_multiply(row, a**j)
    table = CoeffTable(a, N, tuple(int(v) for v in row.tolist()))
    if verify:
        table.check()
        if a == 2 and expand_binary_product(N).row != table.row:
            raise AssertionError(f"product forms disagree at N={N}")
    return table


def expand_binary_product(N: int, *, max_len: int = DEFAULT_MAX_LEN) -> CoeffTable:
    """Base-2 row from ``prod_{i=0}^{N-1} (1 + x^(2^i))^(N-i)``."""
    _check_params(2, N)
    length = row_length(2, N)
    if length > max_len:
        raise BudgetExceeded(f"row length {length} exceeds budget {max_len}")
    row = np.ones(1, dtype=_dtype_for(2 ** (N * (N + 1) // 2)))
    for i in range(N):
        shift = 2**i
        for _ in range(N - i):
            out = np.zeros(len(row) + shift, dtype=row.dtype)
            out[: len(row)] += row
            out[shift:] += row
            row = out
    return CoeffTable(2, N, tuple(int(v) for v in row.tolist()))


def brute_force_coeffs(
    a: int, N: int, *, budget: int = DEFAULT_ENUM_BUDGET
) -> CoeffTable:
    """Count every tuple ``(k_1..k_N)`` by its sum.

    All ``a^(N(N+1)/2)`` tuple sums are materialized, so this is only for
    desk-scale parameters (a=2, N <= 6; a=3, N <= 4 under the default budget).
    """
    _check_params(a, N)
    n_tuples = a ** (N * (N + 1) // 2)
    if n_tuples > budget:
        raise BudgetExceeded(
            f"{n_tuples} tuples for (a={a}, N={N}) exceeds enumeration budget {budget}"
        )
    sums = np.zeros(1, dtype=np.int64)
    for j in range(1, N + 1):
        sums = np.add.outer(sums, np.arange(a**j, dtype=np.int64)).ravel()
    counts = np.bincount(sums)
    return CoeffTable(a, N, tuple(int(v) for v in counts))


def alpha_row(N: int) -> tuple[int, ...]:
    """Base-2 row ``alpha^(N)`` including the empty-product case ``N = 0``."""
    if N < 0:
        raise ValueError(f"order must be >= 0, got {N}")
    if N == 0:
        return (1,)
    return expand_coeffs(2, N).row


def coeff_via_s2(j: int, N: int) -> int:
    """``sum_{n=0}^{min(j, 2^(N+1)-1)} C(j-n+N, N) (-1)^s2(n)``.

    Equals ``alpha_j^(N)`` (base 2) inside the natural range
    ``0 <= j <= 2^(N+1) - N - 2``; the formula itself holds for every
    ``j >= 0`` and yields 0 past the end of the row.
    """
    if j < 0:
        raise ValueError(f"index j must be >= 0, got {j}")
    if N < 0:
        raise ValueError(f"order N must be >= 0, got {N}")
    top = min(j, 2 ** (N + 1) - 1)
    return sum(binomial(j - n + N, N) * (-1) ** s2(n) for n in range(top + 1))


def invert_s2_check(n: int, N: int) -> int:
    """Evaluate ``sum_k C(N,k) (-1)^k alpha_{n-k}^(N-1)``; equals ``(-1)^s2(n)``."""
    if N < 1:
        raise ValueError(f"order N must be >= 1, got {N}")
    if not 0 <= n <= 2**N - 1:
        raise ValueError(f"n must lie in [0, {2**N - 1}], got {n}")
    row = alpha_row(N - 1)
    total = 0
    for k in range(min(n, N) + 1):
        i = n - k
        if i < len(row):
            total += binomial(N, k) * (-1) ** k * row[i]
    return total


def _as_table(values: ValueTable) -> Mapping[int, object]:
    if isinstance(values, Mapping):
        return values
    return dict(enumerate(values))


def _require(table: Mapping[int, object], lo: int, hi: int, what: str) -> None:
    missing = [i for i in range(lo, hi + 1) if i not in table]
    if missing:
        raise ValueError(
            f"{what} table does not cover [{lo}, {hi}]; first missing index {missing[0]}"
        )


def tn_direct(N: int, g: ValueTable, x: int):
    """Multiple sum of ``g(x + k_1 + ... + k_N)`` over the box ``prod [0, 2^i - 1]``."""
    table = _as_table(g)
    _require(table, x, x + max_degree(2, N), "g")
    ranges = [range(2**i) for i in range(1, N + 1)]
    return sum(table[x + sum(ks)] for ks in itertools.product(*ranges))


def tn_weighted(N: int, g: ValueTable, x: int):
    """Single sum ``sum_k alpha_k^(N) g(x + k)``."""
    table = _as_table(g)
    row = alpha_row(N)
    _require(table, x, x + len(row) - 1, "g")
    return sum(c * table[x + k] for k, c in enumerate(row))


def appendix_tn_check(N: int, g: ValueTable, x: int) -> bool:
    """True when the box sum and the alpha-weighted sum agree exactly."""
    if N < 1:
        raise ValueError(f"order N must be >= 1, got {N}")
    return tn_direct(N, g, x) == tn_weighted(N, g, x)


def forward_difference(values: Mapping[int, object], order: int, x: int):
    """``Delta^order f(x)`` with ``Delta f(x) = f(x+1) - f(x)``."""
    return sum(
        (-1) ** (order - i) * binomial(order, i) * values[x + i]
        for i in range(order + 1)
    )


def finite_difference_sides(N: int, f: ValueTable, x: int):
    """Both sides of the alternating-digit-sum / N-th difference identity."""
    if N < 1:
        raise ValueError(f"order N must be >= 1, got {N}")
    table = _as_table(f)
    _require(table, x, x + 2**N - 1, "f")
    lhs = sum((-1) ** s2(n) * table[x + n] for n in range(2**N))
    row = alpha_row(N - 1)
    rhs = (-1) ** N * sum(
        c * forward_difference(table, N, x + k) for k, c in enumerate(row)
    )
    return lhs, rhs


def finite_difference_check(N: int, f: ValueTable, x: int) -> bool:
    lhs, rhs = finite_difference_sides(N, f, x)
    return lhs == rhs


# -- OEIS b-files --------------------------------------------------------------


def parse_bfile(lines: Iterable[str]) -> list[tuple[int, int]]:
    """Parse ``index value`` lines; blank lines and ``#`` comments are skipped."""
    pairs = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BFileError(f"line {lineno}: expected 'index value', got {raw!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise BFileError(f"line {lineno}: non-integer field in {raw!r}") from None
    return pairs


def read_bfile(path: Union[str, os.PathLike]) -> list[tuple[int, int]]:
    with open(path, encoding="utf-8") as fh:
        return parse_bfile(fh)


def rows_to_bfile(tables: Iterable[CoeffTable], offset: int = 0) -> str:
    """Flatten rows into b-file text (used for fixtures and round trips)."""
    out = []
    i = offset
    for table in tables:
        for v in table.row:
            out.append(f"{i} {v}")
            i += 1
    return "\n".join(out) + "\n"


@dataclass
class RowCheck:
    order: int
    status: str  # "match", "mismatch", "partial" or "missing"
    expected_len: int
    covered: int
    mismatches: list[tuple[int, int, int]] = field(default_factory=list)


@dataclass
class CrosscheckReport:
    offset: int
    first_row: int
    rows: list[RowCheck]

    @property
    def ok(self) -> bool:
        return all(r.status == "match" for r in self.rows)

    def as_dict(self) -> dict:
        return {
            "offset": self.offset,
            "first_row": self.first_row,
            "ok": self.ok,
            "rows": [
                {
                    "N": r.order,
                    "status": r.status,
                    "expected_len": r.expected_len,
                    "covered": r.covered,
                    "mismatches": [list(m) for m in r.mismatches],
                }
                for r in self.rows
            ],
        }


def oeis_crosscheck(
    tables: Union[CoeffTable, Iterable[CoeffTable]],
    bfile: Sequence[tuple[int, int]],
    *,
    first_row: int = 1,
) -> CrosscheckReport:
    """Compare base-2 rows with a flat b-file read row by row.

    Row ``N`` has ``2^(N+1) - N - 1`` entries; the first b-file index is
    taken to be the start of row ``first_row``.  Rows only partly present in
    the file are reported as ``partial`` (mismatches in the covered part
    still show up), rows entirely absent as ``missing``.
    """
    if isinstance(tables, CoeffTable):
        tables = [tables]
    tables = sorted(tables, key=lambda t: t.order)
    for t in tables:
        if t.base != 2:
            raise ValueError("OEIS cross-check is defined for base 2 only")
        if t.order < first_row:
            raise ValueError(f"row N={t.order} precedes first_row={first_row}")
    values = dict(bfile)
    offset = min(values) if values else 0

    rows = []
    for t in tables:
        start = offset + sum(row_length(2, n) for n in range(first_row, t.order))
        covered = 0
        mismatches = []
        for k, want in enumerate(t.row):
            got = values.get(start + k)
            if got is None:
                continue
            covered += 1
            if got != want:
                mismatches.append((k, want, got))
        if covered == 0:
            status = "missing"
        elif mismatches:
            status = "mismatch"
        elif covered < len(t.row):
            status = "partial"
        else:
            status = "match"
        rows.append(RowCheck(t.order, status, len(t.row), covered, mismatches))
    return CrosscheckReport(offset, first_row, rows)


def fetch_bfile(url: str = "https://oeis.org/A131823/b131823.txt", timeout: float = 30.0) -> str:
    """Download a b-file; never used by the tests."""
    import urllib.request

    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read().decode("utf-8")


# -- cache ---------------------------------------------------------------------


def cache_path(cache_dir: Union[str, os.PathLike], a: int, N: int) -> Path:
    return Path(cache_dir) / f"coeffs_a{a}_N{N}.txt"


def write_cache(table: CoeffTable, cache_dir: Union[str, os.PathLike]) -> Path:
    """Write atomically (temp file in the same directory, then rename)."""
    target = cache_path(cache_dir, table.base, table.order)
    target.parent.mkdir(parents=True, exist_ok=True)
    header = f"{CACHE_MAGIC} a={table.base} N={table.order} len={len(table.row)}\n"
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=target.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(header)
            for v in table.row:
                fh.write(f"{v}\n")
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def read_cache(path: Union[str, os.PathLike]) -> CoeffTable:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(CACHE_MAGIC + " "):
            raise ValueError(f"{path}: not a coefficient cache file")
        fields = dict(item.split("=", 1) for item in header[len(CACHE_MAGIC) + 1 :].split())
        try:
            a, N, length = int(fields["a"]), int(fields["N"]), int(fields["len"])
        except (KeyError, ValueError):
            raise ValueError(f"{path}: malformed header {header!r}") from None
        row = tuple(int(line) for line in fh if line.strip())
    if len(row) != length:
        raise ValueError(f"{path}: header says {length} entries, found {len(row)}")
    return CoeffTable(a, N, row)
