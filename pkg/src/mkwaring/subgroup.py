"""Additive subgroups of Z^d and (Z/q)^d in Hermite normal form.

The same echelon routine serves both cases: for a finite ambient group the
relation vectors ``q*e_i`` are inserted first, which makes the lattice full
rank from the start and lets every entry be kept reduced mod ``q``.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

import numpy as np

from .algebra import DEFAULT_ENUMERATION_CAP, AlgebraError, EnumerationCapExceeded, QuotientRing

DEFAULT_PAIR_CAP = 2**24


class DimensionMismatch(ValueError):
    pass


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b) >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        t = g // ng
        x, nx = nx, x - t * nx
        y, ny = ny, y - t * ny
        g, ng = ng, g - t * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


@dataclass(frozen=True)
class AmbientGroup:
    """(Z/q)^d, or the free group Z^d when q == 0."""

    d: int
    q: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("rank must be >= 1")
        if self.q != 0 and self.q < 2:
            raise ValueError("exponent must be 0 (free) or >= 2")

    @classmethod
    def of_ring(cls, ring: QuotientRing) -> "AmbientGroup":
        return cls(ring.d, ring.q)


class Lattice:
    """Mutable echelon basis used while a subgroup is being built.

    Rows are kept keyed by pivot column.  With ``track=True`` each row also
    carries the integer combination of inserted generators that produces it;
    only sensible when q == 0.
    """

    def __init__(self, ambient: AmbientGroup, track: bool = False):
        self.ambient = ambient
        self.d = ambient.d
        self.q = ambient.q
        self.rows: dict[int, list[int]] = {}
        self.track = track
        self.combos: dict[int, dict[int, int]] = {}
        self.n_generators = 0
        if self.q:
            for i in range(self.d):
                row = [0] * self.d
                row[i] = self.q
                self.rows[i] = row
                self.combos[i] = {}

    def _reduce_tail(self, v: list[int], start: int) -> None:
        q = self.q
        if q:
            for j in range(start, self.d):
                v[j] %= q

    def is_full(self) -> bool:
        return len(self.rows) == self.d and all(self.rows[j][j] == 1 for j in range(self.d))

    def insert(self, vec: Sequence[int]) -> None:
        if len(vec) != self.d:
            raise DimensionMismatch(f"expected length {self.d}, got {len(vec)}")
        gen_index = self.n_generators
        self.n_generators += 1
        v = list(vec)
        combo = {gen_index: 1} if self.track else None
        self._reduce_tail(v, 0)
        rows = self.rows
        for j in range(self.d):
            b = v[j]
            if b == 0:
                continue
            row = rows.get(j)
            if row is None:
                if b < 0:
                    v = [-a for a in v]
                    if combo is not None:
                        combo = {i: -c for i, c in combo.items()}
                rows[j] = v
                if combo is not None:
                    self.combos[j] = combo
                return
            a = row[j]
            if b % a == 0:
                t = b // a
                for jj in range(j, self.d):
                    v[jj] -= t * row[jj]
                if combo is not None:
                    combo = _combo_axpy(combo, self.combos[j], -t)
            else:
                x, y, g = xgcd(a, b)
                ag, bg = a // g, b // g
                new_row = [x * r + y * w for r, w in zip(row, v)]
                v = [ag * w - bg * r for r, w in zip(row, v)]
                if combo is not None:
                    old = self.combos[j]
                    self.combos[j] = _combo_lin(old, x, combo, y)
                    combo = _combo_lin(combo, ag, old, -bg)
                self._reduce_tail(new_row, j + 1)
                rows[j] = new_row
            self._reduce_tail(v, j + 1)

    def extend(self, vecs: Iterable[Sequence[int]]) -> None:
        for v in vecs:
            self.insert(v)

    def canonicalize(self) -> None:
        """Reduce the entries above each pivot into [0, pivot)."""
        pivots = sorted(self.rows)
        for j in pivots:
            pj = self.rows[j][j]
            for i in pivots:
                if i >= j:
                    break
                ri = self.rows[i]
                t = ri[j] // pj
                if t:
                    rj = self.rows[j]
                    for jj in range(j, self.d):
                        ri[jj] -= t * rj[jj]
                    if self.track:
                        self.combos[i] = _combo_axpy(self.combos[i], self.combos[j], -t)

    def freeze(self) -> "HnfBasis":
        self.canonicalize()
        pivots = tuple(sorted(self.rows))
        return HnfBasis(self.ambient, pivots, tuple(tuple(self.rows[j]) for j in pivots))


def _combo_axpy(c: dict[int, int], other: dict[int, int], t: int) -> dict[int, int]:
    out = dict(c)
    for i, a in other.items():
        val = out.get(i, 0) + t * a
        if val:
            out[i] = val
        else:
            out.pop(i, None)
    return out


def _combo_lin(c1: dict[int, int], s1: int, c2: dict[int, int], s2: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for c, s in ((c1, s1), (c2, s2)):
        if s:
            for i, a in c.items():
                out[i] = out.get(i, 0) + s * a
    return {i: a for i, a in out.items() if a}


@dataclass(frozen=True)
class HnfBasis:
    """Canonical echelon basis of a subgroup.

    ``full_rows`` includes the relation rows ``q*e_i`` that survive reduction;
    :attr:`rows` drops them, so a subgroup of (Z/q)^d lists only its
    nontrivial generators.
    """

    ambient: AmbientGroup
    pivots: tuple
    full_rows: tuple

    @property
    def rows(self) -> tuple:
        q = self.ambient.q
        if not q:
            return self.full_rows
        return tuple(r for j, r in zip(self.pivots, self.full_rows) if r[j] != q)

    def pivot_row(self, j: int) -> Optional[tuple]:
        try:
            return self.full_rows[self.pivots.index(j)]
        except ValueError:
            return None

    @property
    def is_full(self) -> bool:
        d = self.ambient.d
        return len(self.pivots) == d and all(r[j] == 1 for j, r in zip(self.pivots, self.full_rows))

    def index(self) -> int:
        """Order of the quotient group (0 when infinite)."""
        if len(self.pivots) < self.ambient.d:
            return 0
        out = 1
        for j, r in zip(self.pivots, self.full_rows):
            out *= r[j]
        return out


def hnf(ambient: AmbientGroup, generators: Iterable[Sequence[int]]) -> HnfBasis:
    lat = Lattice(ambient)
    lat.extend(generators)
    return lat.freeze()


def contains(basis: HnfBasis, v: Sequence[int]) -> bool:
    d, q = basis.ambient.d, basis.ambient.q
    if len(v) != d:
        raise DimensionMismatch(f"expected length {d}, got {len(v)}")
    w = [a % q for a in v] if q else list(v)
    for j, row in zip(basis.pivots, basis.full_rows):
        # columns before this pivot must already be clear
        if any(w[jj] for jj in range(j)):
            return False
        b = w[j]
        if b % row[j]:
            return False
        t = b // row[j]
        if t:
            for jj in range(j, d):
                w[jj] -= t * row[jj]
            if q:
                w = [a % q for a in w]
    return not any(w)


def element_order_mod(basis: HnfBasis, v: Sequence[int]) -> int:
    """Least t >= 1 with t*v in the subgroup; 0 if no such t (free case only)."""
    d, q = basis.ambient.d, basis.ambient.q
    if len(v) != d:
        raise DimensionMismatch(f"expected length {d}, got {len(v)}")
    w = [a % q for a in v] if q else list(v)
    t = 1
    rows = dict(zip(basis.pivots, basis.full_rows))
    for j in range(d):
        b = w[j]
        if b == 0:
            continue
        row = rows.get(j)
        if row is None:
            return 0
        a = row[j]
        s = a // gcd(a, b)
        if s != 1:
            t *= s
            w = [s * c for c in w]
        c = w[j] // a
        for jj in range(j, d):
            w[jj] -= c * row[jj]
        if q:
            w = [c % q for c in w]
    if q:
        assert q % t == 0, "element order must divide the exponent"
    return t


# ---------------------------------------------------------------------------
# J(k, R) and K(k, R)


@dataclass(frozen=True)
class SubgroupReport:
    ring: QuotientRing
    k: int
    kind: str
    basis: HnfBasis
    m_k_R: int
    is_full: bool

    def to_dict(self) -> dict:
        return {
            "ring": self.ring.spec,
            "k": self.k,
            "kind": self.kind,
            "rows": [[str(a) for a in r] for r in self.basis.rows],
            "m_k_R": self.m_k_R,
            "is_full": self.is_full,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class _ObservationLog:
    """Every (ring, k, m(k,R)) computed by span_J in this process.

    Exists so the test suite can check m(k,R) | m(k) over every pair any
    oracle ever produced.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._seen: dict[tuple[str, int], int] = {}

    def record(self, ring: QuotientRing, k: int, m: int) -> None:
        with self._lock:
            self._seen[(ring.spec, k)] = m

    def items(self) -> list[tuple[str, int, int]]:
        with self._lock:
            return sorted((spec, k, m) for (spec, k), m in self._seen.items())

    def clear(self) -> None:
        with self._lock:
            self._seen.clear()


observations = _ObservationLog()


def _m_from_basis(basis: HnfBasis, d: int) -> int:
    m = 1
    for i in range(d):
        e = [0] * d
        e[i] = 1
        m = lcm(m, element_order_mod(basis, e))
    assert m > 0, "m(k,R) cannot vanish for a finite ring"
    return m


def kth_powers(ring: QuotientRing, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> list[tuple]:
    """Distinct k-th powers of ring elements, sorted."""
    if ring.q < 2**31:
        P = ring.pow_array(ring.all_elements_array(cap), k)
        return [tuple(int(a) for a in row) for row in np.unique(P, axis=0)]
    return sorted(set(ring.pow_t(g, k) for g in ring.enumerate_t(cap)))


@lru_cache(maxsize=4096)
def _span_J_cached(ring: QuotientRing, k: int, cap: int) -> SubgroupReport:
    lat = Lattice(AmbientGroup.of_ring(ring))
    lat.extend(kth_powers(ring, k, cap))
    basis = lat.freeze()
    m = _m_from_basis(basis, ring.d)
    return SubgroupReport(ring, k, "J", basis, m, basis.is_full)


def span_J(ring: QuotientRing, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> SubgroupReport:
    """J(k, R): the additive span of all k-th powers."""
    if k < 1:
        raise ValueError("k must be >= 1")
    report = _span_J_cached(ring, k, cap)
    observations.record(ring, k, report.m_k_R)
    return report


def span_K(
    ring: QuotientRing,
    k: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    pair_cap: int = DEFAULT_PAIR_CAP,
) -> SubgroupReport:
    """K(k, R) over an F_2-algebra: the span of g^k and g^k * (h + h^2)."""
    if ring.q != 2:
        raise AlgebraError("K(k, R) is only defined here for rings with q = 2")
    if k < 1:
        raise ValueError("k must be >= 1")
    if ring.size**2 > pair_cap:
        raise EnumerationCapExceeded(ring.size**2, pair_cap)
    elements = list(ring.enumerate_t(cap))
    powers = list(dict.fromkeys(ring.pow_t(g, k) for g in elements))
    shifts = list(dict.fromkeys(ring.add_t(h, ring.mul_t(h, h)) for h in elements))
    lat = Lattice(AmbientGroup.of_ring(ring))
    lat.extend(powers)
    for gk in powers:
        if lat.is_full():
            break
        for t in shifts:
            lat.insert(ring.mul_t(gk, t))
    basis = lat.freeze()
    m = _m_from_basis(basis, ring.d)
    return SubgroupReport(ring, k, "K", basis, m, basis.is_full)


def m_k_R(ring: QuotientRing, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    return span_J(ring, k, cap).m_k_R
