"""The bounded limit law Z*(a) of the standardized sums.

``Z*(a) = sum_{k>=1} U_k / a^k`` with ``U_k`` i.i.d. uniform on
``[-b_a, b_a]`` and ``b_a^2 = 3 (a^2 - 1)``; the support is
``[-b_a/(a-1), b_a/(a-1)]`` (``[-3, 3]`` for ``a = 2``).

Exact quantities only ever need even powers of ``b_a``, which are rational,
so ``b_a^2`` is stored exactly and ``b_a`` itself only as a float for grid
geometry.

The numeric density uses the self-similarity ``a Z* = Z*' + U`` iterated on
the CDF:

    G_{k+1}(x) = (1/w) * integral_{a x - hi}^{a x - lo} G_k(s) ds
    g_{k+1}(x) = (a/w) * (G_k(a x - lo) - G_k(a x - hi))

for ``U`` uniform on ``[lo, hi]`` (width ``w``).  Grids are laid out so that
``a x - lo`` and ``a x - hi`` are grid points whenever ``x`` is, hence the
density step is exact given the CDF and the only quadrature is the
trapezoid rule applied to ``G_k``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional, Union

import numpy as np

from partlim.distn import CumulantSeq, cumulants_to_moments
from partlim.exactnum import bernoulli_number, bernoulli_poly_at_half

__all__ = [
    "LimitLaw",
    "DensityGrid",
    "b_squared",
    "limit_cumulants",
    "limit_law",
    "moments_rec1",
    "moments_rec2",
    "moments_rec3",
    "moments_from_cumulants",
    "moments_from_truncated_sum",
    "lyapunov_profile",
    "uniform_cumulant_comparison",
    "density_grid",
    "vstar_grid",
    "shift_scale_maps",
    "DEFAULT_GRID_M",
    "DEFAULT_ITERS",
]

DEFAULT_GRID_M = 8192
DEFAULT_ITERS = 40
MAX_TRUNCATED_WORK = 10**6


def b_squared(a: int) -> int:
    """Squared half-width of the uniform summands, ``3 (a^2 - 1)``."""
    if a < 2:
        raise ValueError(f"base a must be >= 2, got {a}")
    return 3 * (a * a - 1)


def limit_cumulants(a: int, n_max: int) -> CumulantSeq:
    """``kappa*_2n = B_2n/(2n) * (12 (a^2-1))^n / (a^(2n) - 1)``."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    bsq = b_squared(a)
    even = tuple(
        bernoulli_number(2 * n) / (2 * n) * Fraction((4 * bsq) ** n, a ** (2 * n) - 1)
        for n in range(1, n_max + 1)
    )
    return CumulantSeq(a, None, even)


def moments_rec1(n_max: int, a: int = 2) -> list[Fraction]:
    """Even moments ``[m_2, ..., m_{2 n_max}]`` from integrating ``(u + Z*)^{2n}``.

    ``m_2n = sum_{j=1}^{n} C(2n+1, 2j+1) (b_a^2)^j m_{2n-2j} / ((2n+1)(a^{2n}-1))``.
    """
    bsq = b_squared(a)
    m = [Fraction(1)]
    for n in range(1, n_max + 1):
        s = sum(comb(2 * n + 1, 2 * j + 1) * bsq**j * m[n - j] for j in range(1, n + 1))
        m.append(Fraction(s, (2 * n + 1) * (a ** (2 * n) - 1)))
    return m[1:]


def moments_rec2(n_max: int, a: int = 2) -> list[Fraction]:
    """Even moments from the cumulant-to-moment convolution with ``kappa*``."""
    kappa = limit_cumulants(a, n_max).even if n_max >= 1 else ()
    m = [Fraction(1)]
    for n in range(1, n_max + 1):
        m.append(sum(comb(2 * n - 1, 2 * j - 1) * kappa[j - 1] * m[n - j] for j in range(1, n + 1)))
    return m[1:]


def moments_rec3(n_max: int, a: int = 2) -> list[Fraction]:
    """Even moments from ``Z* = 2 Z* + 6 i L`` (base 2 only).

    ``m_2n = 2^{2n}/(1 - 2^{2n}) sum_{j=1}^{n} C(2n, 2j) 3^{2j} B_2j(1/2) m_{2n-2j}``.
    """
    if a != 2:
        raise ValueError("the B_2j(1/2) recurrence is only available for a = 2")
    m = [Fraction(1)]
    for n in range(1, n_max + 1):
        s = sum(
            comb(2 * n, 2 * j) * 9**j * bernoulli_poly_at_half(2 * j) * m[n - j]
            for j in range(1, n + 1)
        )
        m.append(Fraction(4**n, 1 - 4**n) * s)
    return m[1:]


def moments_from_cumulants(cumulants: CumulantSeq) -> list[Fraction]:
    """Even moments from a symmetric cumulant sequence (full Bell-type conversion)."""
    raw = cumulants_to_moments(cumulants.as_list())
    return raw[1::2]


def moments_from_truncated_sum(K: int, n_max: int, a: int = 2) -> list[Fraction]:
    """Exact even moments of ``sum_{k<=K} U_k / a^k``.

    Built by convolving even moments one summand at a time, with
    ``E U^{2j} = b_a^{2j} / (2j + 1)``.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if K * n_max * n_max > MAX_TRUNCATED_WORK:
        raise ValueError(f"K={K}, n_max={n_max} exceeds the work budget")
    bsq = b_squared(a)
    u = [Fraction(bsq**j, 2 * j + 1) for j in range(n_max + 1)]
    s = [Fraction(1)] + [Fraction(0)] * n_max
    for k in range(1, K + 1):
        scale = a ** (2 * k)
        v = [u[j] / scale**j for j in range(n_max + 1)]
        s = [
            sum(comb(2 * n, 2 * j) * s[j] * v[n - j] for j in range(n + 1))
            for n in range(n_max + 1)
        ]
    return s[1:]


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def lyapunov_profile(n_max: int, a: int = 2, moments: Optional[list[Fraction]] = None) -> list[float]:
    """``(m_2n)^{1/(2n)}`` for ``n = 1..n_max``, bounded by the support half-width."""
    if moments is None:
        moments = moments_rec1(n_max, a)
    return [math.exp(_log_fraction(m) / (2 * n)) for n, m in enumerate(moments[:n_max], 1)]


def uniform_cumulant_comparison(n_max: int) -> list[tuple[int, Fraction, Fraction, float]]:
    """Rows ``(n, kappa*_2n, B_2n/(2n) 9^n, ratio)`` for base 2.

    ``B_2n/(2n) 9^n`` is the cumulant of the first summand ``U_1 / 2``, a
    uniform on ``[-3/2, 3/2]``; the ratio is ``4^n / (4^n - 1) -> 1``.
    """
    kappa = limit_cumulants(2, n_max).even
    rows = []
    for n in range(1, n_max + 1):
        u = bernoulli_number(2 * n) / (2 * n) * 9**n
        rows.append((n, kappa[n - 1], u, float(kappa[n - 1] / u)))
    return rows


@dataclass(frozen=True)
class LimitLaw:
    base: int
    b_sq: int
    cumulants: CumulantSeq
    moments: tuple[Fraction, ...]

    @property
    def b(self) -> float:
        return math.sqrt(self.b_sq)

    @property
    def support_halfwidth(self) -> float:
        return self.b / (self.base - 1)


def limit_law(a: int, n_max: int) -> LimitLaw:
    return LimitLaw(a, b_squared(a), limit_cumulants(a, n_max), tuple(moments_rec1(n_max, a)))


# -- numeric density -----------------------------------------------------------


@dataclass
class DensityGrid:
    """Density and CDF of a truncated self-similar sum on a uniform grid.

    ``truncation_bound`` is a certified Kolmogorov-distance bound between
    the depth-``iters+1`` sum and the infinite sum.  ``discretization_bound``
    is the a-priori sup bound on the trapezoid error accumulated in the CDF
    values.  No renormalization is applied; ``integral`` is the raw
    trapezoid mass of ``pdf``.
    """

    base: int
    variable: str  # "zstar" or "vstar"
    grid_M: int
    iters: int
    h: float
    x: np.ndarray = field(repr=False)
    pdf: np.ndarray = field(repr=False)
    cdf: np.ndarray = field(repr=False)
    truncation_bound: float
    discretization_bound: float
    support: tuple[float, float]

    @property
    def error_bound(self) -> float:
        return self.truncation_bound + self.discretization_bound

    @property
    def integral(self) -> float:
        return float(np.trapezoid(self.pdf, dx=self.h))

    def moment(self, k: int, center: float = 0.0) -> float:
        return float(np.trapezoid((self.x - center) ** k * self.pdf, dx=self.h))

    def symmetry_defect(self) -> float:
        """Max ``|pdf(x) - pdf(-x)|`` over mirrored points (about the centre)."""
        return float(np.max(np.abs(self.pdf - self.pdf[::-1])))

    def interpolation_slack(self) -> float:
        """Bound on linear-interpolation error of the CDF between grid points."""
        lo, hi = self.support
        w = (hi - lo) * (self.base - 1)
        lip = self.base**3 / w**2
        return self.h**2 * lip / 8

    def cdf_at(self, x) -> np.ndarray:
        return np.interp(x, self.x, self.cdf, left=0.0, right=1.0)

    def pdf_at(self, x) -> np.ndarray:
        return np.interp(x, self.x, self.pdf, left=0.0, right=0.0)

    def metadata(self) -> dict:
        return {
            "a": self.base,
            "variable": self.variable,
            "grid_M": self.grid_M,
            "iters": self.iters,
            "h": self.h,
            "truncation_bound": self.truncation_bound,
            "discretization_bound": self.discretization_bound,
            "integral": self.integral,
        }

    def write(self, csv_path: Union[str, os.PathLike]) -> tuple[str, str]:
        """Write ``x,pdf,cdf`` CSV plus a JSON sidecar next to it."""
        csv_path = os.fspath(csv_path)
        with open(csv_path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "pdf", "cdf"])
            for row in zip(self.x, self.pdf, self.cdf):
                w.writerow([repr(float(v)) for v in row])
        json_path = os.path.splitext(csv_path)[0] + ".json"
        with open(json_path, "w", encoding="ascii") as fh:
            json.dump(self.metadata(), fh, indent=2, sort_keys=True)
        return csv_path, json_path


def _iterate(a: int, lo_pos: int, hi_pos: int, first_pos: int, M: int, h: float, iters: int):
    """Run the CDF fixed point on grid positions ``first_pos .. first_pos + M``.

    ``U`` is uniform on ``[lo_pos h, hi_pos h]``.  Returns ``(pdf, cdf)`` of
    the depth ``iters + 1`` truncated sum.
    """
    width = (hi_pos - lo_pos) * h
    pos = np.arange(first_pos, first_pos + M + 1, dtype=np.int64)
    up = a * pos - lo_pos - first_pos  # grid index of a x - lo
    dn = a * pos - hi_pos - first_pos  # grid index of a x - hi

    def lookup_cdf(G, idx):
        out = np.ones(idx.shape)
        inside = (idx >= 0) & (idx <= M)
        out[idx < 0] = 0.0
        out[inside] = G[idx[inside]]
        return out

    def lookup_integral(C, idx):
        # C[i] = integral of G from x_0 to x_i; G = 0 left of the grid, 1 right of it
        out = np.zeros(idx.shape)
        inside = (idx >= 0) & (idx <= M)
        right = idx > M
        out[inside] = C[idx[inside]]
        out[right] = C[M] + (idx[right] - M) * h
        return out

    # depth 1: U / a
    G = np.clip((a * pos - lo_pos) / (hi_pos - lo_pos), 0.0, 1.0)
    pdf = None
    for _ in range(iters):
        pdf = a / width * (lookup_cdf(G, up) - lookup_cdf(G, dn))
        C = np.empty(M + 1)
        C[0] = 0.0
        np.cumsum((G[1:] + G[:-1]) * (h / 2), out=C[1:])
        G = (lookup_integral(C, up) - lookup_integral(C, dn)) / width
    return pdf, G


def _bounds(a: int, width: float, umax: float, h: float, iters: int) -> tuple[float, float]:
    depth = iters + 1
    # |Z - Z_K| <= umax a^{-K} / (a-1), and the depth-K density is at most a / width
    trunc = umax * float(a) ** (-depth) / (a - 1) * a / width
    first = a * h * h / (4 * width * width)
    rest = (iters - 1) * a**3 * h * h / (12 * width * width)
    return trunc, first + rest


def _check_grid(grid_M: int, iters: int) -> None:
    if grid_M < 512 or grid_M % 2:
        raise ValueError(f"grid_M must be even and >= 512, got {grid_M}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")


def density_grid(a: int = 2, grid_M: int = DEFAULT_GRID_M, iters: int = DEFAULT_ITERS) -> DensityGrid:
    """Density/CDF of ``Z*(a)`` on ``M + 1`` points spanning ``[-b_a - h, b_a + h]``."""
    _check_grid(grid_M, iters)
    b = math.sqrt(b_squared(a))
    h = 2 * b / (grid_M - 2)
    if h > b / 64:
        raise ValueError(f"grid step {h} is coarser than b_a/64")
    half = grid_M // 2
    b_pos = half - 1
    pdf, cdf = _iterate(a, -b_pos, b_pos, -half, grid_M, h, iters)
    x = np.arange(-half, half + 1) * h
    trunc, disc = _bounds(a, 2 * b, b, h, iters)
    c = b / (a - 1)
    return DensityGrid(a, "zstar", grid_M, iters, h, x, pdf, cdf, trunc, disc, (-c, c))


def vstar_grid(a: int = 2, grid_M: int = DEFAULT_GRID_M, iters: int = DEFAULT_ITERS) -> DensityGrid:
    """Density/CDF of the [0, 1]-valued ``V*(a) = (a-1) sum V_k / a^k``.

    ``V_k`` uniform on [0, 1]; for ``a = 2`` this is ``sum V_k / 2^k``.  Grid
    spans ``[-h, 1 + h]``.
    """
    _check_grid(grid_M, iters)
    h = 1.0 / (grid_M - 2)
    hi_pos = (a - 1) * (grid_M - 2)
    pdf, cdf = _iterate(a, 0, hi_pos, -1, grid_M, h, iters)
    x = np.arange(-1, grid_M) * h
    trunc, disc = _bounds(a, float(a - 1), float(a - 1), h, iters)
    return DensityGrid(a, "vstar", grid_M, iters, h, x, pdf, cdf, trunc, disc, (0.0, 1.0))


def shift_scale_maps(a: int, x, grid: DensityGrid):
    """CDF and density of ``Z*(a)`` at ``x`` read off a ``V*(a)`` grid.

    ``Z*(a) = -c + 2 c V*(a)`` with ``c = b_a / (a - 1)``, so
    ``G(x) = F*((x + c) / (2c))`` and ``g(x) = f*((x + c) / (2c)) / (2c)``.
    Outside the support the CDF is 0 or 1 and the density 0.
    """
    if grid.variable != "vstar" or grid.base != a:
        raise ValueError("shift_scale_maps needs a V* grid built for the same base")
    c = math.sqrt(b_squared(a)) / (a - 1)
    u = (np.asarray(x, dtype=float) + c) / (2 * c)
    cdf = np.clip(grid.cdf_at(u), 0.0, 1.0)
    pdf = grid.pdf_at(u) / (2 * c)
    cdf = np.where(u <= 0, 0.0, np.where(u >= 1, 1.0, cdf))
    pdf = np.where((u <= 0) | (u >= 1), 0.0, pdf)
    if np.ndim(x) == 0:
        return float(cdf), float(pdf)
    return cdf, pdf
