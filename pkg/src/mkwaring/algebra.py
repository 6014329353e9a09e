"""Exact integer, polynomial and quotient-ring arithmetic.

Polynomials over Z are plain tuples of ints, lowest degree first, with
trailing zeros trimmed (the zero polynomial is the empty tuple).  Elements of
a quotient ring ``(Z/q)[x]/(f)`` are length-``d`` tuples with every entry in
``[0, q)``; :class:`RingElement` wraps one together with its ring for the
public API, while the hot loops elsewhere work on the bare tuples.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator, Optional, Sequence

import numpy as np

DEFAULT_ENUMERATION_CAP = 10**6

Poly = tuple  # tuple[int, ...]


class AlgebraError(ValueError):
    pass


class RingMismatch(AlgebraError):
    pass


class EnumerationCapExceeded(AlgebraError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"ring has {size} elements, enumeration cap is {cap}")
        self.size = size
        self.cap = cap


class RingSpecError(AlgebraError):
    pass


# ---------------------------------------------------------------------------
# integers


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("vp(0) is undefined")
    if p < 2:
        raise ValueError(f"invalid prime {p}")
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def binomial(n: int, j: int) -> int:
    if n < 0 or j < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return comb(n, j)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def primes_below(n: int) -> list[int]:
    """Primes p with p < n (simple sieve)."""
    if n < 3:
        return []
    sieve = bytearray([1]) * n
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n, i)))
    return [i for i in range(n) if sieve[i]]


# ---------------------------------------------------------------------------
# polynomials over Z


def poly_trim(coeffs: Sequence[int]) -> Poly:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(f: Sequence[int], g: Sequence[int]) -> Poly:
    return poly_trim(a + b for a, b in itertools.zip_longest(f, g, fillvalue=0))


def poly_scale(f: Sequence[int], c: int) -> Poly:
    return poly_trim(c * a for a in f)


def poly_mul(f: Sequence[int], g: Sequence[int]) -> Poly:
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return poly_trim(out)


def expand_power(g: Sequence[int], k: int) -> Poly:
    """Exact expansion of ``g**k`` in Z[x]."""
    if k < 0:
        raise ValueError("negative exponent")
    result: Poly = (1,)
    base = poly_trim(g)
    while k:
        if k & 1:
            result = poly_mul(result, base)
        k >>= 1
        if k:
            base = poly_mul(base, base)
    return result


def poly_eval(f: Sequence[int], t: int) -> int:
    acc = 0
    for a in reversed(f):
        acc = acc * t + a
    return acc


def format_poly(f: Sequence[int], var: str = "x") -> str:
    """Sparse text form, highest degree first: ``x^2+x+1``, ``3x-2``."""
    f = poly_trim(f)
    if not f:
        return "0"
    parts = []
    for i in range(len(f) - 1, -1, -1):
        a = f[i]
        if a == 0:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}{mono}"
        parts.append((sign, body))
    text = "".join(s + b for s, b in parts)
    return text[1:] if text.startswith("+") else text


_TERM = re.compile(r"([+-]?)\s*(\d*)\s*(\*?\s*x(?:\s*\^\s*(\d+))?)?")


def parse_poly(text: str) -> Poly:
    """Parse a sparse polynomial such as ``x^2+x+1`` or ``-2x^3 + 5``."""
    s = text.replace(" ", "")
    if not s:
        raise RingSpecError("empty polynomial")
    coeffs: dict[int, int] = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or not (m.group(2) or m.group(3)):
            raise RingSpecError(f"cannot parse polynomial {text!r} at position {pos}")
        if pos > 0 and not m.group(1):
            raise RingSpecError(f"missing operator in {text!r} at position {pos}")
        sign = -1 if m.group(1) == "-" else 1
        if m.group(3):
            c = int(m.group(2)) if m.group(2) else 1
            deg = int(m.group(4)) if m.group(4) else 1
        else:
            c = int(m.group(2))
            deg = 0
        coeffs[deg] = coeffs.get(deg, 0) + sign * c
        pos = m.end()
    top = max(coeffs)
    return poly_trim(coeffs.get(i, 0) for i in range(top + 1))


# ---------------------------------------------------------------------------
# polynomials over Z/p, used for irreducibility tests


def _polymod_p(f: Sequence[int], g: Sequence[int], p: int) -> Poly:
    """Remainder of f by monic g over Z/p."""
    r = [a % p for a in f]
    dg = len(g) - 1
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i]
        if c:
            for j in range(dg + 1):
                r[i - dg + j] = (r[i - dg + j] - c * g[j]) % p
    return poly_trim(r[:dg])


def _monic_polys(p: int, degree: int) -> Iterator[Poly]:
    for low in itertools.product(range(p), repeat=degree):
        yield tuple(reversed(low)) + (1,)


def is_irreducible_mod_p(f: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(f)/2."""
    f = poly_trim(a % p for a in f)
    n = len(f) - 1
    if n < 1:
        return False
    for deg in range(1, n // 2 + 1):
        for g in _monic_polys(p, deg):
            if not _polymod_p(f, g, p):
                return False
    return True


@lru_cache(maxsize=None)
def default_irreducible(p: int, j: int) -> Poly:
    """Least monic irreducible of degree j over F_p.

    The order is lexicographic on (coeff_{j-1}, ..., coeff_0), the same order
    :func:`enumerate_ring` uses.
    """
    if not is_prime(p):
        raise AlgebraError(f"{p} is not prime")
    if j < 1:
        raise AlgebraError("extension degree must be >= 1")
    for f in _monic_polys(p, j):
        if is_irreducible_mod_p(f, p):
            return f
    raise AssertionError("unreachable: irreducibles exist in every degree")


# ---------------------------------------------------------------------------
# quotient rings


@dataclass(frozen=True, eq=False)
class QuotientRing:
    """The finite ring (Z/q)[x]/(f) for a monic f of degree d >= 1.

    Equality is structural on (q, f), so a :class:`FiniteField` equals the
    plain quotient ring with the same presentation.
    """

    q: int
    f: Poly

    def __post_init__(self):
        if self.q < 2:
            raise AlgebraError(f"modulus must be >= 2, got {self.q}")
        f = poly_trim(self.f)
        if len(f) < 2:
            raise AlgebraError("quotient polynomial must have degree >= 1")
        if f[-1] % self.q != 1:
            raise AlgebraError(f"quotient polynomial {format_poly(f)} is not monic")
        object.__setattr__(self, "f", tuple(a % self.q for a in f[:-1]) + (1,))

    def __eq__(self, other):
        if not isinstance(other, QuotientRing):
            return NotImplemented
        return self.q == other.q and self.f == other.f

    def __hash__(self):
        return hash((self.q, self.f))

    @property
    def d(self) -> int:
        return len(self.f) - 1

    @property
    def size(self) -> int:
        return self.q**self.d

    @property
    def spec(self) -> str:
        return f"Z/{self.q}[x]/({format_poly(self.f)})"

    def __str__(self):
        return self.spec

    # -- tuple-level arithmetic; inputs are assumed reduced

    @property
    def zero_t(self) -> tuple:
        return (0,) * self.d

    @property
    def one_t(self) -> tuple:
        return (1 % self.q,) + (0,) * (self.d - 1)

    def basis_t(self, i: int) -> tuple:
        v = [0] * self.d
        v[i] = 1 % self.q
        return tuple(v)

    def reduce_t(self, coeffs: Sequence[int]) -> tuple:
        """Reduce an arbitrary integer coefficient list mod (q, f)."""
        q, f, d = self.q, self.f, self.d
        r = [a % q for a in coeffs]
        for i in range(len(r) - 1, d - 1, -1):
            c = r[i]
            if c:
                base = i - d
                for j in range(d):
                    r[base + j] = (r[base + j] - c * f[j]) % q
        r = r[:d]
        r.extend([0] * (d - len(r)))
        return tuple(r)

    def add_t(self, u: tuple, v: tuple) -> tuple:
        q = self.q
        return tuple((a + b) % q for a, b in zip(u, v))

    def mul_t(self, u: tuple, v: tuple) -> tuple:
        d = self.d
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    prod[i + j] += a * b
        return self.reduce_t(prod)

    def pow_t(self, u: tuple, e: int) -> tuple:
        if e < 0:
            raise ValueError("negative exponent")
        result = self.one_t
        base = u
        while e:
            if e & 1:
                result = self.mul_t(result, base)
            e >>= 1
            if e:
                base = self.mul_t(base, base)
        return result

    def enumerate_t(self, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple]:
        size = self.size
        if size > cap:
            raise EnumerationCapExceeded(size, cap)
        # product() varies its last slot fastest; that slot is coeff_0
        for high_first in itertools.product(range(self.q), repeat=self.d):
            yield high_first[::-1]

    # -- whole-ring vectorized arithmetic

    def all_elements_array(self, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
        """Every element as a row of an (q^d, d) int64 array, in enumeration order."""
        size = self.size
        if size > cap:
            raise EnumerationCapExceeded(size, cap)
        idx = np.arange(size, dtype=np.int64)
        cols = [(idx // self.q**i) % self.q for i in range(self.d)]
        return np.stack(cols, axis=1)

    def _mul_array(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        q, f, d = self.q, self.f, self.d
        C = np.zeros((A.shape[0], 2 * d - 1), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                C[:, i + j] = (C[:, i + j] + A[:, i] * B[:, j]) % q
        for i in range(2 * d - 2, d - 1, -1):
            c = C[:, i]
            for j in range(d):
                if f[j]:
                    C[:, i - d + j] = (C[:, i - d + j] - c * f[j]) % q
        return C[:, :d]

    def pow_array(self, A: np.ndarray, e: int) -> np.ndarray:
        """Row-wise A**e.  Needs q < 2**31 so products fit in int64."""
        if self.q >= 2**31:
            raise OverflowError("modulus too large for vectorized arithmetic")
        result = np.zeros_like(A)
        result[:, 0] = 1 % self.q
        base = A
        while e:
            if e & 1:
                result = self._mul_array(result, base)
            e >>= 1
            if e:
                base = self._mul_array(base, base)
        return result

    # -- element-level API

    def element(self, coeffs: Sequence[int] | int) -> "RingElement":
        if isinstance(coeffs, int):
            coeffs = (coeffs,)
        return RingElement(self, self.reduce_t(coeffs))

    def one(self) -> "RingElement":
        return RingElement(self, self.one_t)

    def zero(self) -> "RingElement":
        return RingElement(self, self.zero_t)

    def x(self) -> "RingElement":
        return self.element((0, 1))


@dataclass(frozen=True)
class RingElement:
    ring: QuotientRing
    coeffs: tuple

    def _check(self, other: "RingElement") -> None:
        if not isinstance(other, RingElement) or other.ring != self.ring:
            raise RingMismatch(f"cannot combine elements of {self.ring} and {getattr(other, 'ring', other)}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        return RingElement(self.ring, self.ring.add_t(self.coeffs, other.coeffs))

    def __neg__(self) -> "RingElement":
        q = self.ring.q
        return RingElement(self.ring, tuple(-a % q for a in self.coeffs))

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __mul__(self, other: "RingElement") -> "RingElement":
        return ring_mul(self.ring, self, other)

    def __pow__(self, e: int) -> "RingElement":
        return ring_pow(self.ring, self, e)

    def __repr__(self):
        return f"RingElement({format_poly(self.coeffs)} in {self.ring.spec})"


class FiniteField(QuotientRing):
    """F_{p^j} presented as (Z/p)[x]/(f) with f verified irreducible."""

    def __init__(self, p: int, irreducible: Sequence[int] | None = None, j: int | None = None):
        if not is_prime(p):
            raise AlgebraError(f"{p} is not prime")
        if irreducible is None:
            if j is None:
                raise AlgebraError("need an irreducible polynomial or an extension degree")
            irreducible = default_irreducible(p, j)
        f = poly_trim(irreducible)
        if j is not None and len(f) - 1 != j:
            raise AlgebraError(f"irreducible has degree {len(f) - 1}, expected {j}")
        if not is_irreducible_mod_p(f, p):
            raise AlgebraError(f"{format_poly(f)} is reducible over F_{p}")
        super().__init__(p, f)

    @property
    def p(self) -> int:
        return self.q

    @property
    def j(self) -> int:
        return self.d

    @property
    def spec(self) -> str:
        if self.f == default_irreducible(self.p, self.j):
            return f"GF({self.p}^{self.j})"
        return super().spec


def GF(p: int, j: int = 1, irreducible: Sequence[int] | None = None) -> FiniteField:
    return FiniteField(p, irreducible, j)


def as_field(ring: QuotientRing) -> FiniteField:
    """View a quotient ring as a field, verifying that it is one."""
    if isinstance(ring, FiniteField):
        return ring
    return FiniteField(ring.q, ring.f)


# ---------------------------------------------------------------------------
# operations


def ring_mul(ring: QuotientRing, u: RingElement, v: RingElement) -> RingElement:
    if u.ring != ring or v.ring != ring:
        raise RingMismatch("operands do not belong to the given ring")
    return RingElement(ring, ring.mul_t(u.coeffs, v.coeffs))


def ring_pow(ring: QuotientRing, u: RingElement, e: int) -> RingElement:
    if u.ring != ring:
        raise RingMismatch("operand does not belong to the given ring")
    if e < 0:
        raise ValueError("negative exponent")
    return RingElement(ring, ring.pow_t(u.coeffs, e))


def enumerate_ring(ring: QuotientRing, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[RingElement]:
    """Every element exactly once, lexicographic in (coeff_{d-1}, ..., coeff_0)."""
    for t in ring.enumerate_t(cap):
        yield RingElement(ring, t)


def field_trace(field: FiniteField, u: RingElement) -> RingElement:
    """Absolute trace u + u^p + ... + u^(p^(j-1)), landing in F_p."""
    if u.ring != field:
        raise RingMismatch("element does not belong to the field")
    acc = field.zero_t
    term = u.coeffs
    for _ in range(field.j):
        acc = field.add_t(acc, term)
        term = field.pow_t(term, field.p)
    return RingElement(field, acc)


def trace_value(field: FiniteField, u: RingElement) -> int:
    t = field_trace(field, u).coeffs
    assert all(c == 0 for c in t[1:]), "trace left the prime field"
    return t[0]


def artin_schreier_solve(field: FiniteField, c: RingElement) -> Optional[RingElement]:
    """Solve h + h^2 = c in F_{2^j}; None when Tr(c) = 1.

    h + h^2 is F_2-linear in h, so this solves a j x j linear system over F_2.
    """
    if field.p != 2:
        raise AlgebraError("Artin-Schreier solving is implemented for characteristic 2 only")
    if c.ring != field:
        raise RingMismatch("element does not belong to the field")
    j = field.j
    # column i of the operator is the image of the basis element x^i
    cols = []
    for i in range(j):
        e = field.basis_t(i)
        cols.append(field.add_t(e, field.mul_t(e, e)))
    # augmented rows: row r has bits cols[i][r] for i < j, then c[r]
    rows = [[cols[i][r] for i in range(j)] + [c.coeffs[r]] for r in range(j)]
    pivots = []
    rank = 0
    for col in range(j):
        pr = next((r for r in range(rank, j) if rows[r][col]), None)
        if pr is None:
            continue
        rows[rank], rows[pr] = rows[pr], rows[rank]
        for r in range(j):
            if r != rank and rows[r][col]:
                rows[r] = [a ^ b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    if any(rows[r][j] for r in range(rank, j)):
        return None
    h = [0] * j
    for r, col in enumerate(pivots):
        h[col] = rows[r][j]
    return RingElement(field, tuple(h))


# ---------------------------------------------------------------------------
# ring-spec text grammar

_Z_SPEC = re.compile(r"^\s*Z\s*/\s*\(?\s*(\d+)\s*\)?\s*(?:Z\s*)?\[\s*x\s*\]\s*/\s*\((.+)\)\s*$")
_GF_SPEC = re.compile(r"^\s*(?:GF|F)\s*\(\s*(\d+)\s*(?:\^\s*(\d+))?\s*\)\s*$")


def parse_ring(text: str) -> QuotientRing:
    """Parse ``Z/<q>[x]/(<poly>)`` or ``GF(<p>^<j>)``."""
    m = _GF_SPEC.match(text)
    if m:
        p = int(m.group(1))
        j = int(m.group(2)) if m.group(2) else 1
        try:
            return GF(p, j)
        except AlgebraError as exc:
            raise RingSpecError(str(exc)) from exc
    m = _Z_SPEC.match(text)
    if not m:
        raise RingSpecError(f"unrecognized ring spec {text!r}")
    q = int(m.group(1))
    f = parse_poly(m.group(2))
    try:
        return QuotientRing(q, f)
    except AlgebraError as exc:
        raise RingSpecError(str(exc)) from exc
