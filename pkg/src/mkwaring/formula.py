"""Closed form for m(k), the least m with m*x a Z-combination of k-th powers.

    m(k) = k * prod_{p | k} p^alpha_k(p) * prod_{p < k, p not | k} p^beta_k(p)

``a(k)`` and ``b(k)`` are the two products.  The 1976 rule for alpha_k(2) is
kept behind ``legacy=True`` only to reproduce the rows it gets wrong.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Optional

from .algebra import is_prime, primes_below

MAX_K = 10**5


@dataclass(frozen=True)
class RepunitWitness:
    """(p^(m_exp*r) - 1) / (p^r - 1), a divisor of k forcing beta_k(p) = 1."""

    p: int
    r: int
    m_exp: int
    value: int


@dataclass(frozen=True)
class FactorProfile:
    k: int
    alpha: dict = field(hash=False)
    beta: dict = field(hash=False)
    a: int
    b: int
    m: int
    witnesses: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def m_over_k(self) -> int:
        return self.a * self.b


def factor(n: int) -> dict[int, int]:
    """Trial-division factorization, primes in increasing order."""
    if n < 1:
        raise ValueError("factor() needs n >= 1")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _mersenne_divisor(k: int) -> bool:
    """True if 2^j - 1 divides k for some j >= 2."""
    j = 2
    while 2**j - 1 <= k:
        if k % (2**j - 1) == 0:
            return True
        j += 1
    return False


def alpha(k: int, p: int, legacy: bool = False) -> int:
    if k < 1 or not is_prime(p):
        raise ValueError(f"invalid arguments k={k}, p={p}")
    if k % p:
        raise ValueError(f"alpha needs p | k, got k={k}, p={p}")
    if p != 2:
        return 1 if k > p else 0
    if k == 2:
        return 0
    if legacy:
        return 2 if _mersenne_divisor(k) else 1
    return 2 if k % 6 == 0 else 1


def repunit_witness(k: int, p: int) -> Optional[RepunitWitness]:
    """Least (r, m_exp) with (p^(m_exp r)-1)/(p^r-1) dividing k, if any."""
    r = 1
    while p**r + 1 <= k:
        base = p**r
        m_exp = 2
        value = 1 + base
        while value <= k:
            if k % value == 0:
                return RepunitWitness(p, r, m_exp, value)
            m_exp += 1
            value = value * base + 1
        r += 1
    return None


def beta(k: int, p: int) -> tuple[int, Optional[RepunitWitness]]:
    if not is_prime(p) or p >= k or k % p == 0:
        raise ValueError(f"beta needs a prime p < k with p not dividing k, got k={k}, p={p}")
    w = repunit_witness(k, p)
    return (1, w) if w else (0, None)


def profile(k: int, legacy: bool = False) -> FactorProfile:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > MAX_K:
        raise ValueError(f"k={k} exceeds supported range 1..{MAX_K}")
    alphas = {p: alpha(k, p, legacy) for p in factor(k)}
    betas: dict[int, int] = {}
    witnesses: dict[int, RepunitWitness] = {}
    for p in primes_below(k):
        if k % p == 0:
            continue
        e, w = beta(k, p)
        betas[p] = e
        if w:
            witnesses[p] = w
    a = prod(p**e for p, e in alphas.items())
    b = prod(p**e for p, e in betas.items())
    return FactorProfile(k, alphas, betas, a, b, k * a * b, witnesses)


def m(k: int, legacy: bool = False) -> int:
    return profile(k, legacy).m
