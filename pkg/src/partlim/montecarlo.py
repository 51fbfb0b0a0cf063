"""Seeded samplers for Z_N(a) and truncated Z*(a), plus comparison statistics.

Random streams: numpy ``PCG64`` seeded through ``SeedSequence(seed,
spawn_key=(shard, variable))``.  Each summand owns its own stream, so the
draws of one variable never depend on how many other variables or threads
exist.  Discrete uniforms come from ``Generator.integers``, which uses
bounded rejection (no modulo bias).  Changing ``shards`` changes the
values; the same ``(seed, params, shards)`` always reproduces them.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np
from scipy import stats

from partlim.coeffs import CoeffTable, expand_coeffs, max_degree
from partlim.distn import mean_variance, standardized_cumulants
from partlim.limitlaw import DensityGrid, b_squared, moments_rec1

__all__ = [
    "GENERATOR",
    "SampleBatch",
    "stream",
    "sample_zn_direct",
    "sample_zn_bernoulli",
    "sample_zstar",
    "zn_moment_zscores",
    "zstar_moment_zscore",
    "chi2_vs_pmf",
    "chi2_two_sample",
    "ks_distance_exact",
    "ks_convergence",
]

GENERATOR = "numpy.PCG64 via SeedSequence(seed, spawn_key=(shard, variable))"

_INT64_LIMIT = 2**62


def stream(seed: int, shard: int, variable: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(shard, variable))
    return np.random.Generator(np.random.PCG64(ss))


def _shard_sizes(count: int, shards: int) -> list[int]:
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if shards < 1:
        raise ValueError(f"shards must be >= 1, got {shards}")
    q, r = divmod(count, shards)
    return [q + (1 if s < r else 0) for s in range(shards)]


@dataclass
class SampleBatch:
    model: str  # "zn_direct", "zn_bernoulli" or "zstar"
    params: dict
    seed: int
    count: int
    values: np.ndarray = field(repr=False)

    def summary(self) -> dict:
        v = self.values.astype(float)
        return {
            "model": self.model,
            **self.params,
            "seed": self.seed,
            "count": self.count,
            "mean": float(v.mean()),
            "var": float(v.var(ddof=1)) if self.count > 1 else 0.0,
            "min": float(v.min()),
            "max": float(v.max()),
        }

    def write(self, csv_path: Union[str, os.PathLike]) -> tuple[str, str]:
        """CSV with a single ``value`` column plus a JSON sidecar."""
        csv_path = os.fspath(csv_path)
        integer = np.issubdtype(self.values.dtype, np.integer)
        with open(csv_path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh)
            w.writerow(["value"])
            for v in self.values.tolist():
                w.writerow([v if integer else repr(v)])
        json_path = os.path.splitext(csv_path)[0] + ".json"
        meta = {"model": self.model, "params": self.params, "seed": self.seed,
                "count": self.count, "generator": GENERATOR}
        with open(json_path, "w", encoding="ascii") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
        return csv_path, json_path


def sample_zn_direct(a: int, N: int, count: int, seed: int, shards: int = 1) -> SampleBatch:
    """Draws of ``X_1 + ... + X_N`` with ``X_j`` uniform on ``{0..a^j - 1}``."""
    if a < 2 or N < 1:
        raise ValueError(f"need a >= 2 and N >= 1, got a={a}, N={N}")
    if max_degree(a, N) >= _INT64_LIMIT:
        raise ValueError(f"Z_N values for (a={a}, N={N}) do not fit in int64")
    parts = []
    for shard, n in enumerate(_shard_sizes(count, shards)):
        total = np.zeros(n, dtype=np.int64)
        for j in range(1, N + 1):
            total += stream(seed, shard, j).integers(0, a**j, size=n, dtype=np.int64)
        parts.append(total)
    return SampleBatch("zn_direct", {"a": a, "N": N, "shards": shards}, seed, count,
                       np.concatenate(parts))


def sample_zn_bernoulli(N: int, count: int, seed: int, a: int = 2, shards: int = 1) -> SampleBatch:
    """Draws built from fair bits: row ``j`` contributes ``sum_{i<=j} 2^i V_i^(j)``."""
    if a != 2:
        raise ValueError("the Bernoulli decomposition exists for a = 2 only")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if N > 60:
        raise ValueError("N too large for int64 sums")
    parts = []
    for shard, n in enumerate(_shard_sizes(count, shards)):
        total = np.zeros(n, dtype=np.int64)
        for j in range(N):
            bits = stream(seed, shard, j).integers(0, 2, size=(n, j + 1), dtype=np.int64)
            total += bits @ (np.int64(1) << np.arange(j + 1, dtype=np.int64))
        parts.append(total)
    return SampleBatch("zn_bernoulli", {"a": 2, "N": N, "shards": shards}, seed, count,
                       np.concatenate(parts))


def sample_zstar(a: int, K: int, count: int, seed: int, shards: int = 1) -> SampleBatch:
    """Draws of ``sum_{k<=K} U_k / a^k``, ``U_k`` uniform on ``[-b_a, b_a]``.

    Every draw is within ``b_a a^{-K} / (a - 1)`` of some realization of Z*.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    b = math.sqrt(b_squared(a))
    parts = []
    for shard, n in enumerate(_shard_sizes(count, shards)):
        total = np.zeros(n)
        for k in range(K, 0, -1):
            total += stream(seed, shard, k).uniform(-b, b, size=n) / float(a) ** k
        parts.append(total)
    return SampleBatch("zstar", {"a": a, "K": K, "shards": shards}, seed, count,
                       np.concatenate(parts))


# -- statistics ----------------------------------------------------------------


def zn_moment_zscores(batch: SampleBatch) -> tuple[float, float]:
    """Standardized errors of the sample mean and sample variance of a Z_N batch.

    Standard errors use the exact variance and fourth central moment
    ``sigma^4 (kappa_4_hat + 3)``.
    """
    a, N = batch.params["a"], batch.params["N"]
    mean, var = mean_variance(a, N)
    k4 = standardized_cumulants(a, N, 2).even[1]
    mu4 = var * var * (k4 + 3)
    n = batch.count
    v = batch.values.astype(float)
    se_mean = math.sqrt(float(var) / n)
    se_var = math.sqrt(float(mu4 - var * var) / n)
    return (
        (float(v.mean()) - float(mean)) / se_mean,
        (float(v.var(ddof=1)) - float(var)) / se_var,
    )


def zstar_moment_zscore(batch: SampleBatch, order: int) -> float:
    """Standardized error of the sample raw moment of even ``order`` vs the exact one."""
    if order % 2:
        raise ValueError("only even orders have non-trivial exact values")
    a = batch.params["a"]
    m = [Fraction(1)] + moments_rec1(order, a)
    target = float(m[order // 2])
    var = float(m[order] - m[order // 2] ** 2)
    est = float(np.mean(batch.values**order))
    return (est - target) / math.sqrt(var / batch.count)


def chi2_vs_pmf(batch: SampleBatch, table: Optional[CoeffTable] = None, min_expected: float = 5.0) -> float:
    """Goodness-of-fit p-value of a Z_N batch against the exact pmf.

    Adjacent bins are pooled from the tails inward until each expected count
    reaches ``min_expected``.
    """
    if table is None:
        table = expand_coeffs(batch.params["a"], batch.params["N"])
    observed = np.bincount(batch.values, minlength=len(table)).astype(float)
    if len(observed) > len(table):
        raise ValueError("batch contains values outside the support")
    expected = np.array([c / table.total for c in table.row]) * batch.count
    obs_p, exp_p = _pool(observed, expected, min_expected)
    return float(stats.chisquare(obs_p, exp_p).pvalue)


def _pool(observed: np.ndarray, expected: np.ndarray, min_expected: float):
    obs_out, exp_out = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= min_expected:
            obs_out.append(o_acc)
            exp_out.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 and exp_out:
        obs_out[-1] += o_acc
        exp_out[-1] += e_acc
    obs_out, exp_out = np.array(obs_out), np.array(exp_out)
    # rescale so totals match exactly (floating drift only)
    return obs_out, exp_out * obs_out.sum() / exp_out.sum()


def chi2_two_sample(first: SampleBatch, second: SampleBatch) -> float:
    """Homogeneity p-value for two integer-valued batches."""
    size = int(max(first.values.max(), second.values.max())) + 1
    table = np.vstack([
        np.bincount(first.values, minlength=size),
        np.bincount(second.values, minlength=size),
    ])
    table = table[:, table.sum(axis=0) > 0]
    return float(stats.chi2_contingency(table, correction=False).pvalue)


def ks_distance_exact(table: CoeffTable, grid: DensityGrid) -> float:
    """Kolmogorov distance between the standardized step CDF of Z_N and a grid CDF.

    The grid CDF is continuous and nondecreasing, so the supremum is attained
    at the jump points, comparing both one-sided limits there.
    """
    mean, var = mean_variance(table.base, table.order)
    sigma = math.sqrt(float(var))
    k = np.arange(len(table))
    z = (k - float(mean)) / sigma
    cum = np.cumsum([Fraction(c, table.total) for c in table.row])
    right = np.array([float(c) for c in cum])
    left = np.concatenate([[0.0], right[:-1]])
    G = grid.cdf_at(z)
    return float(max(np.max(np.abs(right - G)), np.max(np.abs(left - G))))


def ks_convergence(
    a: int,
    N_list: Iterable[int],
    grid: DensityGrid,
    count: int = 0,
    seed: int = 0,
    max_len: int = 2**24,
) -> list[dict]:
    """Exact KS distance of standardized Z_N to the grid CDF for each N.

    With ``count > 0`` a sampled KS statistic is added for comparison only.
    """
    if grid.variable != "zstar" or grid.base != a:
        raise ValueError("need a Z* grid for the same base")
    report = []
    for N in N_list:
        table = expand_coeffs(a, N, max_len=max_len)
        row = {"N": N, "ks_exact": ks_distance_exact(table, grid),
               "max_atom": max(table.row) / table.total}
        if count > 0:
            batch = sample_zn_direct(a, N, count, seed)
            mean, var = mean_variance(a, N)
            z = (batch.values - float(mean)) / math.sqrt(float(var))
            row["ks_sampled"] = float(stats.kstest(z, grid.cdf_at).statistic)
        report.append(row)
    return report
