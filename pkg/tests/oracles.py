"""Brute-force reference implementations used only by the tests.

Nothing here touches charmean: primitive roots, discrete logs and roots of
unity are recomputed from scratch with pow() and cmath, and sums use
math.fsum on the real and imaginary parts separately.
"""

import cmath
import math


def prim_root(p):
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g


def dlog(p, g, a):
    a %= p
    x = 1
    for t in range(p - 1):
        if x == a:
            return t
        x = x * g % p
    raise ValueError("not a unit")


def inv(p, a):
    a %= p
    if a == 0:
        return 0
    return next(b for b in range(1, p) if a * b % p == 1)


def chi(p, j, a):
    a %= p
    if a == 0:
        return 0j
    return cmath.exp(2j * math.pi * j * dlog(p, prim_root(p), a) / (p - 1))


def e(y):
    return cmath.exp(2j * math.pi * y)


def csum(terms):
    terms = list(terms)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def leg(p, a):
    a %= p
    if a == 0:
        return 0
    return 1 if any(x * x % p == a for x in range(1, p)) else -1


def gauss(p, j, n):
    return csum(chi(p, j, a) * e(n * a / p) for a in range(1, p + 1))


def kloost(p, j, m, n):
    return csum(chi(p, j, a) * e((m * a + n * inv(p, a)) / p) for a in range(1, p + 1))


def h(p, j, m, n, k):
    return csum(chi(p, j, m * a + n * inv(p, a)) * e(k * a / p) for a in range(1, p))


def weighted_second_moment(p, j, jpsi, n, k):
    return csum(chi(p, jpsi, m) * abs(h(p, j, m, n, k)) ** 2 for m in range(1, p))


def t_triple(p):
    total = 0
    for u in range(1, p):
        for a in range(1, p):
            for b in range(1, p):
                lhs = (a - 1) ** 2 * (u * inv(p, a) - 1) * (u * b - 1) % p
                rhs = (b - 1) ** 2 * (u * inv(p, b) - 1) * (u * a - 1) % p
                if lhs == rhs and lhs != 0:
                    total += 1
    return total


def s_sets(p):
    out = {N: set() for N in range(1, p)}
    for u in range(1, p):
        for a in range(2, p):
            if u in (a, inv(p, a)):
                continue
            v = inv(p, u * a - 1) * (u * inv(p, a) - 1) * (a - 1) ** 2 % p
            if v:
                out[v].add((u, a))
    return out


def t_l(p):
    return sum(
        sum(leg(p, (u * a - 1) * (u * inv(p, a) - 1)) for a in range(1, p)) ** 2 for u in range(1, p)
    )
