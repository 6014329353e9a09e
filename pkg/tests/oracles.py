"""Slow, obviously-correct reference computations used only by the tests.

Nothing here touches the HNF code: subgroups are built by closing a set of
vectors under addition, which is feasible for the tiny groups involved.
"""

from itertools import product
from math import gcd


def additive_closure(q, d, generators):
    """All of span(generators) inside (Z/q)^d, by breadth-first closure."""
    gens = [tuple(a % q for a in g) for g in generators]
    seen = {(0,) * d}
    frontier = [(0,) * d]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % q for a, b in zip(v, g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def naive_ring_mul(q, f, u, v):
    """Multiply in (Z/q)[x]/(f) by polynomial long division written out longhand."""
    d = len(f) - 1
    prod = [0] * (2 * d)
    for i in range(d):
        for j in range(d):
            prod[i + j] += u[i] * v[j]
    # x^d = -(f_0 + ... + f_{d-1} x^{d-1})
    for i in range(2 * d - 1, d - 1, -1):
        c = prod[i]
        prod[i] = 0
        for j in range(d):
            prod[i - d + j] -= c * f[j]
    return tuple(a % q for a in prod[:d])


def naive_pow(q, f, u, e):
    d = len(f) - 1
    out = (1,) + (0,) * (d - 1)
    for _ in range(e):
        out = naive_ring_mul(q, f, out, u)
    return out


def brute_m_k_R(q, f, k):
    """m(k, R) from the closure of all k-th powers: least m with m*e_i in J for all i."""
    d = len(f) - 1
    powers = {naive_pow(q, f, g, k) for g in product(range(q), repeat=d)}
    J = additive_closure(q, d, powers)
    m = 1
    for i in range(d):
        e = [0] * d
        e[i] = 1
        t = next(t for t in range(1, q + 1) if tuple(t * a % q for a in e) in J)
        m = m * t // gcd(m, t)
    return m


def brute_order(q, d, span, v):
    return next(t for t in range(1, q + 1) if tuple(t * a % q for a in v) in span)
