"""Exact scalar helpers: Bernoulli numbers, B_n(1/2), binomials, binary digit sums.

Integers are Python ``int`` and rationals are :class:`fractions.Fraction`;
both are arbitrary precision and ``Fraction`` is always kept in lowest
terms with a positive denominator.

Bernoulli convention: ``t / (e^t - 1) = sum B_n t^n / n!``, hence
``B_1 = -1/2``.  The other common convention flips the sign of ``B_1``
only; even-index values agree.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb

__all__ = [
    "BernoulliCache",
    "bernoulli_number",
    "bernoulli_poly_at_half",
    "binomial",
    "s2",
]


class BernoulliCache:
    """Memoized exact Bernoulli numbers.

    Entries are computed once by the Pascal recurrence
    ``sum_{k=0}^{n} C(n+1, k) B_k = 0`` and never modified afterwards.
    Growth is serialized by a lock; reading an already computed entry
    does not take it.
    """

    def __init__(self) -> None:
        self._values: list[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def get(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError(f"Bernoulli index must be >= 0, got {n}")
        values = self._values
        if n < len(values):
            return values[n]
        with self._lock:
            while len(self._values) <= n:
                self._values.append(self._next(len(self._values)))
            return self._values[n]

    def _next(self, n: int) -> Fraction:
        if n >= 3 and n % 2 == 1:
            return Fraction(0)
        b = self._values
        s = sum((comb(n + 1, k) * b[k] for k in range(n) if b[k]), Fraction(0))
        return -s / (n + 1)


_CACHE = BernoulliCache()


def bernoulli_number(n: int) -> Fraction:
    """Exact ``B_n`` with ``B_1 = -1/2``."""
    return _CACHE.get(n)


def bernoulli_poly_at_half(n: int) -> Fraction:
    """Exact value of the Bernoulli polynomial ``B_n(x)`` at ``x = 1/2``.

    Evaluated from the defining sum ``sum_k C(n, k) B_k (1/2)^(n-k)``.
    """
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    half = Fraction(1, 2)
    return sum(
        (comb(n, k) * bernoulli_number(k) * half ** (n - k) for k in range(n + 1)),
        Fraction(0),
    )


def binomial(n: int, k: int) -> int:
    """Exact ``C(n, k)``.

    Returns 0 when ``0 <= n < k``.  Negative ``n`` uses the generalized
    definition ``n (n-1) ... (n-k+1) / k!``.
    """
    if k < 0:
        raise ValueError(f"binomial lower index must be >= 0, got {k}")
    if n >= 0:
        return comb(n, k)
    # C(n, k) = (-1)^k C(k - n - 1, k) for negative n
    return (-1) ** k * comb(k - n - 1, k)


def s2(n: int) -> int:
    """Number of ones in the binary expansion of ``n``."""
    if n < 0:
        raise ValueError(f"s2 is defined for n >= 0, got {n}")
    return bin(n).count("1")
