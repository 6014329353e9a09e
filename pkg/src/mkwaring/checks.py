"""Invariant sweeps shared by ``mkwaring selftest`` and the test suite."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapExceeded,
    GF,
    QuotientRing,
    artin_schreier_solve,
    binomial,
    enumerate_ring,
    trace_value,
    vp,
)
from .formula import profile
from .subgroup import observations, span_J, span_K
from .tables import SEQUENCE_COLUMNS, build_rows, bundled_bfile, compare_fixture, compare_oeis


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""
    skipped: bool = False

    def line(self) -> str:
        tag = "PASS" if self.ok else ("SKIPPED-FATAL" if self.skipped else "FAIL")
        return f"[{tag}] {self.name}" + (f": {self.detail}" if self.detail else "")


def vpbinom_sweep(kmax: int = 200) -> CheckResult:
    """v2(C(k,j)) >= v2(k) - (j-1) for even k, with equality exactly at j in {1, 2}."""
    name = f"binomial 2-adic bound (even k <= {kmax})"
    cases = 0
    for k in range(2, kmax + 1, 2):
        n = vp(k, 2)
        for j in range(1, k + 1):
            lhs = vp(binomial(k, j), 2)
            rhs = n - (j - 1)
            cases += 1
            if lhs < rhs:
                return CheckResult(name, False, f"bound fails at k={k}, j={j}")
            if (lhs == rhs) != (j in (1, 2)):
                return CheckResult(name, False, f"equality pattern wrong at k={k}, j={j}")
    return CheckResult(name, True, f"{cases} cases")


def prop_ff_sweep(jmax: int = 6, kmax: int = 24, trace_jmax: int = 8,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> CheckResult:
    """K(k, F_{2^j}) is the whole field when 3 does not divide k; h + h^2 = c solvable iff Tr(c) = 0."""
    name = f"K(k, F_2^j) full for j <= {jmax}, 3 not | k <= {kmax}; trace criterion j <= {trace_jmax}"
    try:
        for j in range(1, jmax + 1):
            field = GF(2, j)
            for k in range(1, kmax + 1):
                if k % 3 == 0:
                    continue
                if not span_K(field, k, cap, pair_cap=max(cap, 1) ** 2).is_full:
                    return CheckResult(name, False, f"K({k}, F_2^{j}) is a proper subgroup")
        for j in range(1, trace_jmax + 1):
            field = GF(2, j)
            for c in enumerate_ring(field, cap):
                h = artin_schreier_solve(field, c)
                if (h is not None) != (trace_value(field, c) == 0):
                    return CheckResult(name, False, f"trace criterion fails for {c}")
                if h is not None and h + h * h != c:
                    return CheckResult(name, False, f"bad Artin-Schreier root for {c}")
    except EnumerationCapExceeded as exc:
        return CheckResult(name, False, str(exc), skipped=True)
    return CheckResult(name, True)


def tower_property(smax: int = 2, cap: int = DEFAULT_ENUMERATION_CAP) -> CheckResult:
    """In (Z/2^(s+3))[x]/(x^2+x+1): (6*2^s)-th powers have x-coefficient 0 and v2(m) = s + 3."""
    name = f"cube-root ring tower (s <= {smax})"
    try:
        for s in range(smax + 1):
            q = 2 ** (s + 3)
            k = 6 * 2**s
            ring = QuotientRing(q, (1, 1, 1))
            for g in ring.enumerate_t(cap):
                if ring.pow_t(g, k)[1] != 0:
                    return CheckResult(name, False, f"s={s}: x-coefficient of {g}^{k} is nonzero")
            m = span_J(ring, k, cap).m_k_R
            if vp(m, 2) != s + 3:
                return CheckResult(name, False, f"s={s}: v2(m({k}, R)) = {vp(m, 2)}, expected {s + 3}")
    except EnumerationCapExceeded as exc:
        return CheckResult(name, False, str(exc), skipped=True)
    return CheckResult(name, True)


def fixture_check(legacy: bool = False) -> CheckResult:
    name = "published table fixture (k = 1..150)"
    report = compare_fixture(build_rows(1, 150, legacy=legacy))
    if report.ok:
        return CheckResult(name, True, f"{report.compared} rows")
    ks = sorted({k for k, *_ in report.mismatches})
    return CheckResult(name, False, f"{len(ks)} rows differ: {ks}")


def oeis_check(legacy: bool = False) -> CheckResult:
    name = "bundled OEIS b-files"
    rows = build_rows(1, 150, legacy=legacy)
    bad = []
    for seq in SEQUENCE_COLUMNS:
        rep = compare_oeis(rows, bundled_bfile(seq))
        if not rep.ok:
            bad.append(f"{seq}: {len(rep.mismatches)} mismatches")
    return CheckResult(name, not bad, "; ".join(bad))


def master_invariant() -> CheckResult:
    """m(k, R) | m(k) for every (R, k) any oracle has computed in this process."""
    items = observations.items()
    bad = [(spec, k, m) for spec, k, m in items if profile(k).m % m]
    name = "m(k,R) divides m(k) for every computed pair"
    if bad:
        return CheckResult(name, False, f"violations: {bad[:5]}")
    return CheckResult(name, True, f"{len(items)} pairs")


def run_all(cap: int = DEFAULT_ENUMERATION_CAP, legacy: bool = False) -> list[CheckResult]:
    return [
        vpbinom_sweep(),
        prop_ff_sweep(cap=cap),
        tower_property(cap=cap),
        fixture_check(legacy),
        oeis_check(legacy),
        master_invariant(),
    ]
