import json
from dataclasses import replace
from math import factorial

import pytest

from mkwaring.algebra import GF, QuotientRing, expand_power, vp
from mkwaring.certify import (
    SCHEMA,
    FormulaFalsified,
    GeneratorConfig,
    LowerWitness,
    UpperCertificate,
    _guard,
    best_upper,
    certify,
    finite_difference_certificate,
    lattice_upper,
    ring_family,
    verify_upper,
    witness_alpha2,
    witness_alpha_odd,
    witness_beta,
    witness_k_part,
    x_coefficient_fact,
)
from mkwaring.formula import profile


def _expand_sum(cert):
    total = {}
    for a, g in cert.terms:
        for i, c in enumerate(expand_power(g, cert.k)):
            total[i] = total.get(i, 0) + a * c
    return {i: c for i, c in total.items() if c}


def test_finite_difference_small():
    c1 = finite_difference_certificate(1)
    assert (c1.m, c1.c) == (1, 0)
    c2 = finite_difference_certificate(2)
    assert (c2.m, c2.c) == (2, -1)
    assert c2.terms == ((1, (0, 1)), (-1, (-1, 1)))
    c3 = finite_difference_certificate(3)
    assert (c3.m, c3.c) == (6, -6)
    assert [a for a, _ in c3.terms] == [1, -2, 1]


@pytest.mark.parametrize("k", range(1, 31))
def test_finite_difference_is_factorial(k):
    cert = finite_difference_certificate(k)
    assert cert.m == factorial(k)
    assert verify_upper(cert)
    assert _expand_sum(cert) == {i: c for i, c in {0: cert.c, 1: cert.m}.items() if c}


def test_verify_rejects_tampering():
    cert = finite_difference_certificate(3)
    assert verify_upper(cert)
    assert not verify_upper(replace(cert, c=cert.c + 1))
    assert not verify_upper(replace(cert, m=cert.m + 1))
    a, g = cert.terms[0]
    assert not verify_upper(replace(cert, terms=((a + 1, g),) + cert.terms[1:]))
    assert not verify_upper(replace(cert, m=0))


def test_verify_identity_and_formula_check():
    ident = UpperCertificate(1, ((1, (0, 1)),), 1, 0)
    assert verify_upper(ident)
    # 2x is a multiple of m(1) = 1
    assert verify_upper(UpperCertificate(1, ((2, (0, 1)),), 2, 0))
    # (x+1)^2 - x^2 - 1 = 2x
    assert verify_upper(UpperCertificate(2, ((1, (1, 1)), (-1, (0, 1)), (-1, (1,))), 2, 0))


@pytest.mark.parametrize("k, expected", [(1, 1), (2, 2), (3, 6), (4, 24), (6, 360)])
def test_lattice_upper_reaches_formula(k, expected):
    cert = lattice_upper(k)
    assert cert.m == expected == profile(k).m
    assert verify_upper(cert)
    assert _expand_sum(cert).keys() <= {0, 1}


def test_lattice_upper_divisibility_k_le_20():
    for k in range(1, 21):
        cert = lattice_upper(k, GeneratorConfig(max_a=2, max_b=min(k, 6)))
        assert cert.m % profile(k).m == 0
        assert factorial(k) % cert.m == 0
        assert verify_upper(cert)


def test_degree_escalation_reaches_formula():
    for k in (5, 7, 8):
        cert = best_upper(k, profile(k).m)
        assert cert.m == profile(k).m
        assert verify_upper(cert)


def test_generator_config():
    gens = GeneratorConfig(max_a=1, max_b=1).generators(2)
    assert gens[0] == (1,)
    assert (0, 1) in gens and (-1, 1) in gens and (-2, 1) in gens and (1, 1) in gens
    assert len(gens) == len(set(gens))
    deg2 = GeneratorConfig(max_a=1, max_b=0, degree=2).generators(2)
    assert (-1, -1, 1) in deg2 and (1, 0, 1) in deg2


# -- witnesses


def test_witness_beta_examples():
    w = witness_beta(4, 3)
    assert w.ring == GF(3, 2) and w.m_k_R == 3 and w.achieved_valuation == 1 and w.success
    w = witness_beta(8, 7)
    assert w.ring == GF(7, 2) and w.achieved_valuation == 1
    w = witness_beta(5, 2)
    assert w.ring == GF(2, 4) and w.achieved_valuation == 1
    with pytest.raises(ValueError):
        witness_beta(11, 2)


def test_witness_beta_cap_failure():
    w = witness_beta(8, 7, cap=10)
    assert not w.success and w.ring is None and "cap" in w.reason


def test_witness_beta_sweep():
    count = 0
    for k in range(2, 61):
        for p, rw in profile(k).witnesses.items():
            if p ** (rw.m_exp * rw.r) > 10**4:
                continue
            w = witness_beta(k, p)
            assert w.success, (k, p, w)
            count += 1
    assert count > 50


def test_witness_alpha2_examples():
    w = witness_alpha2(6)
    assert w.ring == QuotientRing(8, (1, 1, 1)) and w.achieved_valuation == 3 and w.success
    w = witness_alpha2(12)
    assert w.ring == QuotientRing(16, (1, 1, 1)) and w.achieved_valuation == 4 and w.success
    w = witness_alpha2(4)
    assert w.target_valuation == 3
    assert w.success, w
    with pytest.raises(ValueError):
        witness_alpha2(2)


def test_witness_alpha_odd():
    w = witness_alpha_odd(6, 3)
    assert w.target_valuation == 2 and w.success
    w = witness_alpha_odd(9, 3)
    assert w.target_valuation == 3 == vp(profile(9).m, 3)
    w = witness_alpha_odd(3, 3)
    assert w.target_valuation == 1 and w.method == "x-coefficient" and w.success


def test_witness_k_part():
    w = witness_k_part(12, 2)
    assert w.ring == QuotientRing(4, (0, 0, 1)) and w.achieved_valuation == 2


def test_ring_family_includes_cyclotomic():
    fam = ring_family(5, 25)
    assert QuotientRing(25, (1, 1, 1, 1, 1)) in fam
    assert [r.size for r in fam] == sorted(r.size for r in fam)
    assert QuotientRing(8, (1, 0, 1)) in ring_family(2, 8)


def test_guard_aborts_on_overshoot():
    ring = QuotientRing(8, (1, 1, 1))
    fake = LowerWitness(2, 3, ring, 4, "test")
    with pytest.raises(FormulaFalsified, match="FORMULA FALSIFIED"):
        _guard(6, fake)
    ok = LowerWitness(2, 3, ring, 3, "test")
    assert _guard(6, ok) is ok


def test_certify_aborts_when_target_is_mutated():
    # pretend m(6) were 180 (v_2 = 2); the cube-root ring shows v_2 >= 3
    true = profile(6)
    mutated = replace(true, m=180, a=6)
    with pytest.raises(FormulaFalsified):
        certify(6, max_degree=1, formula_profile=mutated)


def test_certify_aborts_when_upper_contradicts():
    # a claimed m(4) of 48 is not a divisor of the explicit 24x identity
    mutated = replace(profile(4), m=48)
    with pytest.raises(FormulaFalsified, match="explicit identity"):
        certify(4, max_degree=1, formula_profile=mutated)


# -- x-coefficient fact


def test_x_coefficient_fact():
    for k in (1, 2, 6, 13):
        proof = x_coefficient_fact(k)
        assert proof.verified and proof.samples == 2 * k
    P = expand_power((3, 5), 2)
    assert P[1] == 2 * 3 * 5


# -- bundles


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_certify_full_small(k):
    bundle = certify(k)
    assert bundle.status == "FULL", bundle.uncertified
    assert bundle.upper.m == profile(k).m
    assert verify_upper(bundle.upper)
    for w in bundle.witnesses:
        assert w.achieved_valuation == w.target_valuation == vp(profile(k).m, w.p)


def test_certify_3_pieces():
    bundle = certify(3)
    assert bundle.m_formula == 6
    by_p = {w.p: w for w in bundle.witnesses}
    assert by_p[2].ring == GF(2, 2)
    assert by_p[3].method == "x-coefficient"


def test_certify_partial_when_cap_too_small():
    bundle = certify(6, cap=16)
    assert bundle.status == "PARTIAL"
    assert 2 in bundle.uncertified


def test_bundle_json():
    doc = json.loads(certify(6).to_json())
    assert doc["schema"] == SCHEMA
    assert doc["m"] == "360" and doc["status"] == "FULL"
    assert doc["uncertified_primes"] == []
    assert {w["p"] for w in doc["witnesses"]} == {2, 3, 5}
    ring_specs = {w["ring"] for w in doc["witnesses"]}
    assert "Z/8[x]/(x^2+x+1)" in ring_specs
    assert all(isinstance(a, str) and all(isinstance(c, str) for c in g) for a, g in doc["upper"]["terms"])


def test_upper_bound_for_14_is_the_corrected_value():
    cert = best_upper(14, profile(14).m)
    assert cert.m == 2548 != profile(14, legacy=True).m
    assert verify_upper(cert)


@pytest.mark.parametrize("k", [7, 8, 9, 12])
def test_certify_full_beyond_six(k):
    assert certify(k).status == "FULL"
