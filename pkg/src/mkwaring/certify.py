"""Independent certification of m(k).

An upper bound is an explicit identity ``sum a_i * g_i(x)^k = m*x + c`` read off
an HNF of the coefficient lattice spanned by chosen k-th powers; any such m is
a multiple of m(k).  A lower bound for the prime p is a finite ring R with
``v_p(m(k, R)) = v_p(m(k))``, which works because m(k, R) divides m(k).
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Optional, Sequence

from .algebra import (
    DEFAULT_ENUMERATION_CAP,
    GF,
    QuotientRing,
    binomial,
    expand_power,
    is_irreducible_mod_p,
    poly_trim,
    vp,
)
from .formula import FactorProfile, factor, profile, repunit_witness
from .subgroup import AmbientGroup, Lattice, span_J

log = logging.getLogger(__name__)

SCHEMA = "mk-cert/1"
DEFAULT_MAX_DEGREE = 7


class FormulaFalsified(RuntimeError):
    """A computed bound contradicts the closed-form m(k).

    Raised when a finite ring gives v_p(m(k,R)) above v_p(m(k)), or when a
    lattice certificate yields an m that m(k) does not divide.
    """


# ---------------------------------------------------------------------------
# upper bounds


@dataclass(frozen=True)
class GeneratorConfig:
    """Which k-th powers span the certificate lattice.

    Always present: the constant 1 and (x - i)^k for 0 <= i <= k.  Degree-1
    generators (a*x + b)^k use 1 <= a <= max_a and |b| <= max_b (default k).
    With degree >= 2, every polynomial of degree 2..degree with coefficients
    in [-coeff_bound, coeff_bound] and positive leading coefficient is added.
    """

    max_a: int = 2
    max_b: Optional[int] = None
    degree: int = 1
    coeff_bound: int = 1

    def generators(self, k: int) -> list[tuple]:
        gens: list[tuple] = [(1,)]
        gens.extend((-i, 1) for i in range(k + 1))
        B = k if self.max_b is None else self.max_b
        for a in range(1, self.max_a + 1):
            gens.extend((b, a) for b in range(-B, B + 1))
        c = self.coeff_bound
        for deg in range(2, self.degree + 1):
            for low in itertools.product(range(-c, c + 1), repeat=deg):
                for lead in range(1, c + 1):
                    gens.append(tuple(low) + (lead,))
        return list(dict.fromkeys(poly_trim(g) for g in gens))


@dataclass(frozen=True)
class UpperCertificate:
    """Claims sum(a * g^k for a, g in terms) == m*x + c."""

    k: int
    terms: tuple
    m: int
    c: int
    source: str = ""

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "m": str(self.m),
            "c": str(self.c),
            "source": self.source,
            "terms": [[str(a), [str(x) for x in g]] for a, g in self.terms],
        }


def finite_difference_certificate(k: int) -> UpperCertificate:
    """sum_i (-1)^i C(k-1, i) (x - i)^k = k! x + c."""
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = tuple(((-1) ** i * binomial(k - 1, i), poly_trim((-i, 1))) for i in range(k))
    total: list[int] = [0] * (k + 1)
    for a, g in terms:
        for deg, coef in enumerate(expand_power(g, k)):
            total[deg] += a * coef
    if any(total[2:]):
        raise AssertionError(f"finite-difference sum for k={k} has degree >= 2 terms")
    cert = UpperCertificate(k, terms, total[1], total[0], "finite-difference")
    if cert.m != factorial(k):
        raise AssertionError(f"finite-difference sum gave {cert.m}x, expected {k}!x")
    return cert


def _coefficient_vector(g: Sequence[int], k: int, dim: int) -> list[int]:
    # highest degree first, so echelon elimination clears x^dim-1 .. x^2 before x, 1
    P = expand_power(g, k)
    v = list(P) + [0] * (dim - len(P))
    return v[::-1]


def lattice_upper(k: int, config: GeneratorConfig = GeneratorConfig()) -> UpperCertificate:
    if k < 1:
        raise ValueError("k must be >= 1")
    gens = config.generators(k)
    dim = max(1, config.degree) * k + 1
    lat = Lattice(AmbientGroup(dim), track=True)
    for g in gens:
        lat.insert(_coefficient_vector(g, k, dim))
        # keeping the basis reduced after each step stops coefficient blow-up
        lat.canonicalize()
    if k == 1:
        # x itself is a generator: (x - 0)^1
        return UpperCertificate(1, ((1, (0, 1)),), 1, 0, "lattice")
    xcol, ccol = dim - 2, dim - 1
    row = lat.rows.get(xcol)
    if row is None:
        raise AssertionError("finite-difference generators must put some m*x in the lattice")
    combo = lat.combos[xcol]
    terms = tuple((a, gens[i]) for i, a in sorted(combo.items()))
    cert = UpperCertificate(
        k, terms, row[xcol], row[ccol],
        f"lattice(degree={config.degree}, max_a={config.max_a}, coeff_bound={config.coeff_bound})",
    )
    return cert


def verify_upper(cert: UpperCertificate, check_formula: bool = True) -> bool:
    """Re-check a certificate by evaluation rather than by expansion.

    Both sides are polynomials of degree <= D (the largest deg(g)*k), so
    agreement at D + 1 integer points proves the identity.
    """
    try:
        if cert.m < 1:
            return False
        D = max([len(poly_trim(g)) - 1 for _, g in cert.terms] + [1]) * cert.k
        for t in range(D + 1):
            lhs = 0
            for a, g in cert.terms:
                val = 0
                for coef in reversed(g):
                    val = val * t + coef
                lhs += a * val**cert.k
            if lhs != cert.m * t + cert.c:
                return False
        if check_formula and cert.m % profile(cert.k).m:
            return False
        return True
    except (TypeError, ValueError):
        return False


# ---------------------------------------------------------------------------
# lower bounds


@dataclass(frozen=True)
class LowerWitness:
    p: int
    target_valuation: int
    ring: Optional[QuotientRing]
    achieved_valuation: int
    method: str
    m_k_R: Optional[int] = None
    reason: str = ""

    @property
    def success(self) -> bool:
        return self.achieved_valuation == self.target_valuation

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "target_valuation": self.target_valuation,
            "achieved_valuation": self.achieved_valuation,
            "ring": self.ring.spec if self.ring is not None else None,
            "m_k_R": str(self.m_k_R) if self.m_k_R is not None else None,
            "method": self.method,
            "success": self.success,
            "reason": self.reason,
        }


def _guard(k: int, w: LowerWitness, formula_m: Optional[int] = None) -> LowerWitness:
    """Abort if a witness beats the formula at p."""
    fm = profile(k).m if formula_m is None else formula_m
    bound = vp(fm, w.p)
    if w.achieved_valuation > bound:
        raise FormulaFalsified(
            f"FORMULA FALSIFIED: k={k}, p={w.p}: ring {w.ring} has v_p(m(k,R)) = "
            f"{w.achieved_valuation} > v_p(m(k)) = {bound} (m(k) = {fm})"
        )
    return w


def _ring_valuation(ring: QuotientRing, k: int, p: int, cap: int) -> tuple[int, int]:
    m = span_J(ring, k, cap).m_k_R
    return vp(m, p), m


def witness_k_part(k: int, p: int, cap: int = DEFAULT_ENUMERATION_CAP) -> LowerWitness:
    """p^v_p(k) | m(k), realized by (Z/p^v)[x]/(x^2) where every x-coefficient vanishes."""
    v = vp(k, p)
    if v == 0:
        raise ValueError(f"p={p} does not divide k={k}")
    ring = QuotientRing(p**v, (0, 0, 1))
    return _guard(k, _search(k, p, v, [ring], "x-coefficient", cap))


def witness_beta(k: int, p: int, cap: int = DEFAULT_ENUMERATION_CAP) -> LowerWitness:
    rw = repunit_witness(k, p) if p < k and k % p else None
    if rw is None:
        raise ValueError(f"beta_{k}({p}) = 0; nothing to witness")
    j = rw.m_exp * rw.r
    if p**j > cap:
        return LowerWitness(p, 1, None, 0, "repunit-field", reason=f"F_{p}^{j} exceeds enumeration cap {cap}")
    return _guard(k, _search(k, p, 1, [GF(p, j)], "repunit-field", cap))


def _search(k: int, p: int, target: int, rings: Sequence[QuotientRing], method: str, cap: int) -> LowerWitness:
    best: Optional[LowerWitness] = None
    for ring in sorted(rings, key=lambda R: (R.size, R.d, R.f)):
        if ring.size > cap:
            continue
        v, m = _ring_valuation(ring, k, p, cap)
        w = LowerWitness(p, target, ring, v, method, m)
        if v > target:
            return w  # caller's guard turns this into FormulaFalsified
        if best is None or v > best.achieved_valuation:
            best = w
        if v == target:
            return w
    if best is None:
        return LowerWitness(p, target, None, 0, method, reason=f"no candidate ring under cap {cap}")
    return LowerWitness(p, target, best.ring, best.achieved_valuation, method, best.m_k_R,
                        reason="search exhausted without reaching target")


def _cyclotomic(p: int) -> tuple:
    return (1,) * p if p > 2 else (1, 0, 1)


def ring_family(p: int, modulus: int, extra: int = 2) -> list[QuotientRing]:
    """Candidate witness rings (Z/modulus)[x]/(f), cheapest first.

    f runs over x^2, x^3, the cyclotomic polynomial of p (x^2+1 for p = 2),
    and the first ``extra`` monic irreducibles mod p of degrees 1..3.
    """
    polys = [(0, 0, 1), (0, 0, 0, 1), _cyclotomic(p)]
    if p == 2:
        polys.append((1, 1, 1))
    for deg in (1, 2, 3):
        found = 0
        for low in itertools.product(range(p), repeat=deg):
            f = tuple(reversed(low)) + (1,)
            if is_irreducible_mod_p(f, p):
                polys.append(f)
                found += 1
                if found >= extra:
                    break
    rings = [QuotientRing(modulus, f) for f in dict.fromkeys(polys)]
    return sorted(rings, key=lambda R: (R.size, R.f))


def witness_alpha2(k: int, cap: int = DEFAULT_ENUMERATION_CAP, target: Optional[int] = None) -> LowerWitness:
    if k % 2 or k <= 2:
        raise ValueError("witness_alpha2 needs an even k > 2")
    n = vp(k, 2)
    if target is None:
        target = vp(profile(k).m, 2)
    q = 2 ** (n + 2)
    if k % 6 == 0:
        w = _search(k, 2, target, [QuotientRing(q, (1, 1, 1))], "cube-root-ring", cap)
    else:
        w = _search(k, 2, target, ring_family(2, q), "ring-search", cap)
    return _guard(k, w)


def witness_alpha_odd(k: int, p: int, cap: int = DEFAULT_ENUMERATION_CAP, target: Optional[int] = None) -> LowerWitness:
    if p == 2 or k % p:
        raise ValueError(f"witness_alpha_odd needs an odd prime dividing k, got k={k}, p={p}")
    if target is None:
        target = vp(profile(k).m, p)
    if target == vp(k, p):
        return witness_k_part(k, p, cap)
    q = p ** (vp(k, p) + 1)
    return _guard(k, _search(k, p, target, ring_family(p, q), "ring-search", cap))


@dataclass(frozen=True)
class XCoefficientProof:
    """Sampled check that x-coeff((c0 + c1 x + c2 x^2 + c3 x^3)^k) = k c0^(k-1) c1.

    The x-coefficient has degree <= k-1 in c0, <= 1 in c1 and does not involve
    c2, c3 (they only reach degree >= 2), so k values of c0 times two of c1
    pin it down; c2, c3 cycle through {0, 1}^2 as a spot check.
    """

    k: int
    samples: int
    verified: bool


def x_coefficient_fact(k: int) -> XCoefficientProof:
    if k < 1:
        raise ValueError("k must be >= 1")
    count = 0
    ok = True
    for c0 in range(k):
        for c1 in (0, 1):
            c2, c3 = (count % 2, (count // 2) % 2)
            P = expand_power((c0, c1, c2, c3), k)
            xc = P[1] if len(P) > 1 else 0
            count += 1
            if xc != k * c0 ** (k - 1) * c1:
                ok = False
    return XCoefficientProof(k, count, ok)


# ---------------------------------------------------------------------------
# bundles


@dataclass
class CertificateBundle:
    k: int
    m_formula: int
    upper: UpperCertificate
    witnesses: list = field(default_factory=list)
    x_fact: Optional[XCoefficientProof] = None
    uncertified: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "FULL" if not self.uncertified else "PARTIAL"

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "k": self.k,
            "m": str(self.m_formula),
            "status": self.status,
            "uncertified_primes": self.uncertified,
            "upper": self.upper.to_dict(),
            "witnesses": [w.to_dict() for w in self.witnesses],
            "x_coefficient_fact": None if self.x_fact is None else {
                "k": self.x_fact.k, "samples": self.x_fact.samples, "verified": self.x_fact.verified,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def best_upper(k: int, m_target: int, base: GeneratorConfig = GeneratorConfig(),
               max_degree: int = DEFAULT_MAX_DEGREE) -> UpperCertificate:
    """Default lattice first, then raise the generator degree until m_target is met."""
    cert = lattice_upper(k, base)
    deg = max(2, base.degree + 1)
    while cert.m != m_target and deg <= max_degree:
        log.info("k=%d: lattice gives %d, target %d; trying degree %d", k, cert.m, m_target, deg)
        cand = lattice_upper(k, GeneratorConfig(base.max_a, base.max_b, deg, base.coeff_bound))
        # each degree's generator set contains the previous one, so cand.m | cert.m
        if cert.m % cand.m == 0:
            cert = cand
        deg += 1
    if cert.m != m_target and factorial(k) % m_target == 0:
        fd = finite_difference_certificate(k)
        if fd.m < cert.m:
            cert = fd
    return cert


def certify(
    k: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    config: GeneratorConfig = GeneratorConfig(),
    max_degree: int = DEFAULT_MAX_DEGREE,
    formula_profile: Optional[FactorProfile] = None,
) -> CertificateBundle:
    """Upper certificate plus one lower witness per prime of m(k).

    ``formula_profile`` replaces the closed form for testing the abort path.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    prof = profile(k) if formula_profile is None else formula_profile
    fm = prof.m
    upper = best_upper(k, fm, config, max_degree)
    if not verify_upper(upper, check_formula=False):
        raise AssertionError(f"constructed certificate for k={k} fails re-verification")
    if upper.m % fm:
        raise FormulaFalsified(
            f"FORMULA FALSIFIED: k={k}: explicit identity gives {upper.m}x, not a multiple of m(k) = {fm}"
        )
    bundle = CertificateBundle(k, fm, upper)
    bundle.x_fact = x_coefficient_fact(k)
    for p in sorted(factor(fm)):
        target = vp(fm, p)
        vk = vp(k, p) if k % p == 0 else 0
        if vk and target == vk:
            w = witness_k_part(k, p, cap)
            if not bundle.x_fact.verified:
                w = LowerWitness(p, target, w.ring, 0, w.method, w.m_k_R, "x-coefficient check failed")
        elif vk and p == 2:
            w = witness_alpha2(k, cap, target)
        elif vk:
            w = witness_alpha_odd(k, p, cap, target)
        else:
            rw = repunit_witness(k, p) if p < k else None
            if rw is None:
                w = LowerWitness(p, target, None, 0, "repunit-field", reason="no repunit divisor of k")
            else:
                w = witness_beta(k, p, cap)
                w = LowerWitness(p, target, w.ring, w.achieved_valuation, w.method, w.m_k_R, w.reason)
        _guard(k, w, fm)
        bundle.witnesses.append(w)
        if not w.success or vp(upper.m, p) != target:
            bundle.uncertified.append(p)
    for p in factor(upper.m // fm):
        if p not in bundle.uncertified:
            bundle.uncertified.append(p)
    bundle.uncertified.sort()
    return bundle
