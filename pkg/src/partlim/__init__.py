"""Exact restricted-partition coefficients and the bounded limit law of the
associated standardized sums Z_N(a) = X_1(a) + ... + X_N(a)."""

from partlim.exactnum import bernoulli_number, bernoulli_poly_at_half, binomial, s2
from partlim.coeffs import CoeffTable, brute_force_coeffs, expand_coeffs
from partlim.distn import DistSummary, mean_variance, pmf, standardized_cumulants
from partlim.limitlaw import DensityGrid, LimitLaw, density_grid, limit_cumulants

__version__ = "0.1.0"

__all__ = [
    "CoeffTable",
    "DensityGrid",
    "DistSummary",
    "LimitLaw",
    "bernoulli_number",
    "bernoulli_poly_at_half",
    "binomial",
    "brute_force_coeffs",
    "density_grid",
    "expand_coeffs",
    "limit_cumulants",
    "mean_variance",
    "pmf",
    "s2",
    "standardized_cumulants",
]
