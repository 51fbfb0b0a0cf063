"""Identity and oracle batteries behind ``partlim verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from partlim import coeffs, distn, limitlaw
from partlim.exactnum import s2

REPORT_SCHEMA = "partlim-verify/1"


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


def _timed(fn: Callable[[], tuple[bool, dict]], name: str) -> Check:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    detail["seconds"] = round(time.perf_counter() - t0, 4)
    return Check(name, bool(ok), detail)


def _poly_table(lo: int, hi: int, coefs=(3, -2, 0, 1)) -> dict[int, int]:
    return {y: sum(c * y**i for i, c in enumerate(coefs)) for y in range(lo, hi + 1)}


def _exp_table(lo: int, hi: int, base: int = 3) -> dict[int, Fraction]:
    return {y: Fraction(base) ** y for y in range(lo, hi + 1)}


def suite_coeffs(n_max_brute: int = 6) -> list[Check]:
    def oracle():
        cases = [(2, N) for N in range(1, n_max_brute + 1)] + [(3, N) for N in range(1, 5)]
        bad = [c for c in cases if coeffs.expand_coeffs(*c).row != coeffs.brute_force_coeffs(*c).row]
        return not bad, {"cases": len(cases), "failures": bad}

    def invariants():
        bad = []
        for a in (2, 3, 5):
            for N in range(1, 9):
                try:
                    coeffs.expand_coeffs(a, N).check()
                except AssertionError as exc:
                    bad.append([a, N, str(exc)])
        return not bad, {"failures": bad}

    def product_forms():
        bad = [N for N in range(1, 11)
               if coeffs.expand_coeffs(2, N).row != coeffs.expand_binary_product(N).row]
        return not bad, {"failures": bad}

    return [
        _timed(oracle, "expand_vs_enumeration"),
        _timed(invariants, "row_invariants"),
        _timed(product_forms, "binary_product_form"),
    ]


def suite_appendix(n_max: int = 6, n_max_sums: int = 5) -> list[Check]:
    def via_s2():
        bad = []
        for N in range(1, n_max + 1):
            row = coeffs.expand_coeffs(2, N).row
            for j in range(len(row) + 4):
                want = row[j] if j < len(row) else 0
                if coeffs.coeff_via_s2(j, N) != want:
                    bad.append([N, j])
        return not bad, {"failures": bad[:20]}

    def inverse():
        bad = [[N, n] for N in range(1, n_max + 1) for n in range(2**N)
               if coeffs.invert_s2_check(n, N) != (-1) ** s2(n)]
        return not bad, {"failures": bad[:20]}

    def tn():
        bad = []
        for N in range(1, n_max_sums + 1):
            span = 2 ** (N + 1) + 4
            for x in (0, 3):
                for name, table in (("poly", _poly_table(0, span)), ("exp", _exp_table(0, span))):
                    if not coeffs.appendix_tn_check(N, table, x):
                        bad.append([N, x, name])
        return not bad, {"failures": bad}

    def fd():
        bad = []
        for N in range(1, n_max_sums + 1):
            span = 2**N + 4
            for x in (0, 2):
                for name, table in (("poly", _poly_table(0, span)), ("exp", _exp_table(0, span))):
                    if not coeffs.finite_difference_check(N, table, x):
                        bad.append([N, x, name])
        return not bad, {"failures": bad}

    return [
        _timed(via_s2, "coeff_via_s2"),
        _timed(inverse, "inverse_relation"),
        _timed(tn, "tn_sums"),
        _timed(fd, "finite_difference_identity"),
    ]


def suite_cumulants(n_max_N: int = 20, n_max: int = 10) -> list[Check]:
    def closed_form():
        bad = []
        for N in range(1, n_max_N + 1):
            seq = distn.standardized_cumulants(2, N, n_max)
            if seq.even[0] != 1:
                bad.append([N, "kappa_2"])
            for n in range(1, n_max + 1):
                if seq.even[n - 1] != distn.cumulant_closed_form_base2(N, n):
                    bad.append([N, n])
        return not bad, {"failures": bad}

    def from_pmf():
        bad = []
        for N in range(1, 6):
            raw, std = distn.pmf_cumulants(coeffs.expand_coeffs(2, N), 8)
            if any(raw[k] != 0 for k in (2, 4, 6)):
                bad.append([N, "odd"])
            if std != list(distn.standardized_cumulants(2, N, 4).even):
                bad.append([N, "even"])
        return not bad, {"failures": bad}

    def decomposition():
        bad = [[N, n] for N in range(1, 16) for n in range(1, 9)
               if not distn.cumulant_decomposition_check(N, n)]
        return not bad, {"failures": bad}

    return [
        _timed(closed_form, "general_vs_closed_form"),
        _timed(from_pmf, "pmf_cumulants"),
        _timed(decomposition, "three_term_decomposition"),
    ]


def suite_recurrences(n_max: int = 50) -> list[Check]:
    def agree():
        r1 = limitlaw.moments_rec1(n_max)
        r2 = limitlaw.moments_rec2(n_max)
        r3 = limitlaw.moments_rec3(n_max)
        bell = limitlaw.moments_from_cumulants(limitlaw.limit_cumulants(2, n_max))
        ok = r1 == r2 == r3 == bell
        return ok, {"n_max": n_max, "m4": str(r1[1]), "m6": str(r1[2])}

    def bound():
        m = limitlaw.moments_rec1(n_max)
        bad = [n for n in range(1, n_max + 1) if m[n - 1] > 9**n]
        prof = limitlaw.lyapunov_profile(n_max, moments=m)
        return not bad, {"failures": bad, "lyapunov_last": prof[-1]}

    def general_base():
        bad = [a for a in (3, 4, 5)
               if limitlaw.moments_rec1(12, a) != limitlaw.moments_rec2(12, a)]
        return not bad, {"failures": bad}

    return [
        _timed(agree, "rec1_rec2_rec3_bell"),
        _timed(bound, "moment_bound"),
        _timed(general_base, "general_base_rec1_rec2"),
    ]


def suite_convergence(N_list=(2, 4, 6, 8, 10)) -> list[Check]:
    from partlim.montecarlo import ks_convergence

    def ks():
        grid = limitlaw.density_grid(2)
        rep = ks_convergence(2, N_list, grid)
        d = [r["ks_exact"] for r in rep]
        ok = all(x > y for x, y in zip(d, d[1:])) and d[-1] < d[0] / 3
        return ok, {"N": list(N_list), "ks": d}

    return [_timed(ks, "ks_decreasing")]


SUITES = {
    "coeffs": suite_coeffs,
    "appendix": suite_appendix,
    "cumulants": suite_cumulants,
    "recurrences": suite_recurrences,
    "convergence": suite_convergence,
}


def run(suite: str) -> dict:
    names = list(SUITES) if suite == "all" else [suite]
    checks = []
    for name in names:
        for c in SUITES[name]():
            checks.append({"suite": name, "name": c.name, "status": "PASS" if c.passed else "FAIL",
                           **c.detail})
    return {
        "schema": REPORT_SCHEMA,
        "suite": suite,
        "status": "PASS" if all(c["status"] == "PASS" for c in checks) else "FAIL",
        "checks": checks,
    }
