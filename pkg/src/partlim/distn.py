"""Exact distributional analytics for Z_N(a) = X_1(a) + ... + X_N(a).

``X_j(a)`` is uniform on ``{0, ..., a^j - 1}``.  All moments and cumulants
are exact ``Fraction`` values; floats only appear in :func:`mgf_eval` and
in rendered diagnostics.

The base-a standardized cumulant formula used here,

    kappa_2n(Zhat_N(a)) = B_2n / (2n) * sum_j (a^(2nj) - 1) / sigma_N(a)^(2n),

follows from the centred MGF ``sinh(m t / 2) / (m sinh(t / 2))`` of each
summand.  It is derived, not quoted, and is tested against the base-2
closed form :func:`cumulant_closed_form_base2` for equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt
from typing import Optional, Sequence

from partlim.coeffs import CoeffTable, expand_coeffs
from partlim.exactnum import bernoulli_number

__all__ = [
    "SERIES_THRESHOLD",
    "CumulantSeq",
    "DistSummary",
    "CLTDiagnostics",
    "pmf",
    "pmf_moments",
    "mean_variance",
    "c_squared",
    "summarize",
    "mgf_eval",
    "standardized_mgf_cosh",
    "moments_to_cumulants",
    "cumulants_to_moments",
    "standardized_cumulants",
    "cumulant_closed_form_base2",
    "pmf_cumulants",
    "decomposition_terms",
    "cumulant_decomposition_check",
    "clt_diagnostics",
]

# Below this |t| each MGF factor (1 - e^{tm}) / (m (1 - e^t)) is replaced by
# its 4-term Taylor series (only while |t| m stays small as well).
SERIES_THRESHOLD = 1e-8
_SERIES_MAX_TM = 1e-3
_LOG_FLOAT_MAX = math.log(2.0**1023 * (2.0 - 2.0**-52))


@dataclass(frozen=True)
class CumulantSeq:
    """Even-order cumulants ``kappa_2 .. kappa_{2 n_max}``; odd orders are 0.

    ``order`` is ``None`` for the limit law.
    """

    base: int
    order: Optional[int]
    even: tuple[Fraction, ...]

    @property
    def n_max(self) -> int:
        return len(self.even)

    def kappa(self, k: int) -> Fraction:
        """Cumulant of order ``k`` (``k >= 1``)."""
        if k < 1 or k > 2 * self.n_max:
            raise IndexError(f"order {k} outside 1..{2 * self.n_max}")
        if k % 2:
            return Fraction(0)
        return self.even[k // 2 - 1]

    def as_list(self) -> list[Fraction]:
        """All cumulants of orders 1..2*n_max, odd ones zero."""
        return [self.kappa(k) for k in range(1, 2 * self.n_max + 1)]


def pmf(table: CoeffTable) -> list[Fraction]:
    total = table.total
    return [Fraction(c, total) for c in table.row]


def pmf_moments(table: CoeffTable, k_max: int = 2) -> tuple[Fraction, list[Fraction]]:
    """Exact mean and central moments ``mu_0..mu_{k_max}`` from the pmf."""
    total = table.total
    mean = Fraction(sum(k * c for k, c in enumerate(table.row)), total)
    central = [Fraction(0)] * (k_max + 1)
    for k, c in enumerate(table.row):
        d = k - mean
        p = Fraction(c)
        for r in range(k_max + 1):
            central[r] += p
            p *= d
    return mean, [m / total for m in central]


def mean_variance(a: int, N: int) -> tuple[Fraction, Fraction]:
    """Closed-form ``E Z_N(a)`` and ``Var Z_N(a)``."""
    if a < 2 or N < 1:
        raise ValueError(f"need a >= 2 and N >= 1, got a={a}, N={N}")
    mean = Fraction(a * (a**N - 1) // (a - 1) - N, 2)
    var = Fraction(a * a * (a ** (2 * N) - 1) // (a * a - 1) - N, 12)
    return mean, var


def c_squared(N: int) -> Fraction:
    """``4^N - 3N/4 - 1``, i.e. ``9 Var Z_N`` in base 2."""
    return 4**N - Fraction(3 * N, 4) - 1


@dataclass(frozen=True)
class DistSummary:
    base: int
    order: int
    mean: Fraction
    variance: Fraction
    c_sq: Optional[Fraction]
    table: Optional[CoeffTable]

    @property
    def normalizer(self) -> int:
        return self.base ** (self.order * (self.order + 1) // 2)

    def pmf(self) -> list[Fraction]:
        if self.table is None:
            raise ValueError("summary was built without a coefficient table")
        return pmf(self.table)


def summarize(a: int, N: int, *, with_pmf: bool = True, **expand_kw) -> DistSummary:
    mean, var = mean_variance(a, N)
    table = expand_coeffs(a, N, **expand_kw) if with_pmf else None
    return DistSummary(a, N, mean, var, c_squared(N) if a == 2 else None, table)


# -- MGF -----------------------------------------------------------------------


def _log_uniform_factor(t: float, m: int) -> float:
    """log of (1/m) sum_{k<m} e^{tk}, stable for all finite nonzero t."""
    if t > 0:
        # (e^{tm} - 1)/(e^t - 1) = e^{t(m-1)} (1 - e^{-tm}) / (1 - e^{-t})
        return (
            t * (m - 1)
            + math.log(-math.expm1(-t * m))
            - math.log(-math.expm1(-t))
            - math.log(m)
        )
    return math.log(-math.expm1(t * m)) - math.log(-math.expm1(t)) - math.log(m)


def _series_uniform_factor(t: float, m: int) -> float:
    m1 = (m - 1) / 2
    m2 = (m - 1) * (2 * m - 1) / 6
    m3 = m * (m - 1) ** 2 / 4
    return 1.0 + t * m1 + t * t * m2 / 2 + t**3 * m3 / 6


def mgf_eval(a: int, N: int, t: float) -> float:
    """``E exp(t Z_N(a))`` as a float.

    Raises ``OverflowError`` when the value exceeds the float range.
    """
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    if t == 0:
        return 1.0
    log_total = 0.0
    series_prod = 1.0
    for j in range(1, N + 1):
        m = a**j
        if abs(t) < SERIES_THRESHOLD and abs(t) * m < _SERIES_MAX_TM:
            series_prod *= _series_uniform_factor(t, m)
        else:
            log_total += _log_uniform_factor(t, m)
    if log_total > _LOG_FLOAT_MAX:
        raise OverflowError(f"E exp(t Z_N) overflows for a={a}, N={N}, t={t}")
    return math.exp(log_total) * series_prod


def standardized_mgf_cosh(N: int, s: float) -> float:
    """Base-2 ``E exp(s Zhat_N)`` as the product of ``cosh(2^(k-l) s / (2 sigma_N))``."""
    sigma = math.sqrt(float(mean_variance(2, N)[1]))
    u = s / (2 * sigma)
    out = 1.0
    for k in range(1, N + 1):
        for l in range(1, k + 1):
            out *= math.cosh(2 ** (k - l) * u)
    return out


# -- moments and cumulants -----------------------------------------------------


def cumulants_to_moments(kappa: Sequence[Fraction]) -> list[Fraction]:
    """Raw moments ``m_1..m_n`` from cumulants ``kappa_1..kappa_n``.

    ``m_n = sum_{k=1}^{n} C(n-1, k-1) kappa_k m_{n-k}`` with ``m_0 = 1``.
    """
    m = [Fraction(1)]
    for n in range(1, len(kappa) + 1):
        m.append(sum((comb(n - 1, k - 1) * kappa[k - 1] * m[n - k] for k in range(1, n + 1)), Fraction(0)))
    return m[1:]


def moments_to_cumulants(moments: Sequence[Fraction]) -> list[Fraction]:
    """Inverse of :func:`cumulants_to_moments`."""
    m = [Fraction(1)] + list(moments)
    kappa: list[Fraction] = []
    for n in range(1, len(m)):
        s = sum((comb(n - 1, k - 1) * kappa[k - 1] * m[n - k] for k in range(1, n)), Fraction(0))
        kappa.append(m[n] - s)
    return kappa


def standardized_cumulants(a: int, N: int, n_max: int) -> CumulantSeq:
    """Exact even cumulants of ``(Z_N(a) - mu) / sigma`` up to order ``2 n_max``."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    _, var = mean_variance(a, N)
    out = []
    for n in range(1, n_max + 1):
        s = sum(a ** (2 * n * j) - 1 for j in range(1, N + 1))
        out.append(bernoulli_number(2 * n) / (2 * n) * s / var**n)
    return CumulantSeq(a, N, tuple(out))


def cumulant_closed_form_base2(N: int, n: int) -> Fraction:
    """``9^n/(4^n-1) * (4^n (4^{nN} - N - 1) + N) / c_N^{2n} * B_2n/(2n)``."""
    return (
        Fraction(9**n, 4**n - 1)
        * (4**n * (4 ** (n * N) - N - 1) + N)
        / c_squared(N) ** n
        * bernoulli_number(2 * n)
        / (2 * n)
    )


def pmf_cumulants(table: CoeffTable, k_max: int) -> tuple[list[Fraction], list[Fraction]]:
    """Cumulants computed from the exact pmf.

    Returns ``(raw, std_even)``: ``raw`` are the cumulants ``kappa_1..kappa_{k_max}``
    of ``Z_N`` itself; ``std_even`` are ``kappa_{2n} / sigma^{2n}`` for the
    standardized variable.
    """
    mean, central = pmf_moments(table, k_max)
    var = central[2]
    total = table.total
    raw_moments = []
    for r in range(1, k_max + 1):
        raw_moments.append(Fraction(sum(c * k**r for k, c in enumerate(table.row)), total))
    raw = moments_to_cumulants(raw_moments)
    std_even = [raw[2 * n - 1] / var**n for n in range(1, k_max // 2 + 1)]
    return raw, std_even


# -- cumulant decomposition (base 2) --------------------------------------------


def decomposition_terms(N: int, n: int) -> dict[str, Fraction]:
    """The three cumulant contributions of the leading/complex/tail components.

    Built from cumulant calculus: ``kappa(lambda xi) = lambda^k kappa(xi)`` and
    additivity.  ``U`` is uniform on [-3, 3], ``X = sum U_k / 2^k``,
    ``W = 6 i L`` with ``kappa_2n(i L) = -B_2n/(2n)``, ``Y = sum W_k / 2^k``.
    """
    if N < 1 or n < 1:
        raise ValueError(f"need N >= 1 and n >= 1, got N={N}, n={n}")
    b = bernoulli_number(2 * n) / (2 * n)
    geo = Fraction(1, 4**n - 1)  # sum_{k>=1} 2^{-2nk}
    kappa_u = 36**n * b
    kappa_x = kappa_u * geo
    kappa_w = -(36**n) * b
    kappa_y = kappa_w * geo
    c2n = c_squared(N) ** n
    leading = Fraction(4**N) ** n / c2n * kappa_x
    complex_part = (N + 1) * kappa_y / c2n
    tail = N * kappa_x / (4 * c_squared(N)) ** n
    return {
        "leading": leading,
        "complex": complex_part,
        "tail": tail,
        "sum": leading + complex_part + tail,
        "closed_form": cumulant_closed_form_base2(N, n),
    }


def cumulant_decomposition_check(N: int, n: int) -> bool:
    """Check the three-term split against the closed form, exactly.

    Each term is also compared with its geometric-series closed form.
    """
    t = decomposition_terms(N, n)
    b = bernoulli_number(2 * n) / (2 * n)
    front = Fraction(36**n) / c_squared(N) ** n * b
    expected = (
        front * Fraction(2 ** (2 * N * n), 2 ** (2 * n) - 1),
        -(N + 1) * front / (2 ** (2 * n) - 1),
        N * front * Fraction(1, 2 ** (2 * n)) / (2 ** (2 * n) - 1),
    )
    return (t["leading"], t["complex"], t["tail"]) == expected and t["sum"] == t["closed_form"]


# -- CLT diagnostics -----------------------------------------------------------


@dataclass(frozen=True)
class CLTDiagnostics:
    base: int
    order: int
    eps: Fraction
    feller_ratio: Fraction
    lindeberg: Fraction
    uan: Fraction
    max_atom: Fraction

    def as_dict(self) -> dict:
        return {
            "a": self.base,
            "N": self.order,
            "eps": str(self.eps),
            "feller_ratio": float(self.feller_ratio),
            "feller_ratio_exact": str(self.feller_ratio),
            "lindeberg": float(self.lindeberg),
            "uan": float(self.uan),
            "max_atom": str(self.max_atom),
        }


def _tail_square_sum(m: int, thresh_sq4: Fraction) -> tuple[int, int]:
    """For X uniform on {0..m-1} with centred values d: (count, sum of (2d)^2)
    over the upper tail 2d > sqrt(thresh_sq4)."""
    parity = (m - 1) % 2
    e0 = isqrt(math.floor(thresh_sq4))
    while e0 * e0 <= thresh_sq4:
        e0 += 1
    if e0 % 2 != parity:
        e0 += 1
    if e0 > m - 1:
        return 0, 0
    c = (m - 1 - e0) // 2 + 1
    # sum_{i<c} (e0 + 2i)^2
    sq = c * e0 * e0 + 2 * e0 * c * (c - 1) + 2 * (c - 1) * c * (2 * c - 1) // 3
    return c, sq


def clt_diagnostics(a: int, N: int, eps) -> CLTDiagnostics:
    """Feller ratio, Lindeberg sum ``L_N(eps)`` and UAN statistic, exactly.

    ``eps`` may be a float (read through its decimal repr), str or Fraction.
    ``uan`` is ``max_j P(|X_j - E X_j| > eps sigma_N)``; ``max_atom`` is
    ``max_j max_k P(X_j = k)``.
    """
    eps = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    _, var = mean_variance(a, N)
    thresh_sq4 = 4 * eps * eps * var  # (2 eps sigma)^2
    lind = Fraction(0)
    uan = Fraction(0)
    for j in range(1, N + 1):
        m = a**j
        count, sq = _tail_square_sum(m, thresh_sq4)
        # both tails, (2d)^2 / 4, averaged over m atoms
        lind += Fraction(2 * sq, 4 * m)
        uan = max(uan, Fraction(2 * count, m))
    feller = Fraction(a ** (2 * N) - 1, 12) / var
    return CLTDiagnostics(a, N, eps, feller, lind / var, uan, Fraction(1, a))
