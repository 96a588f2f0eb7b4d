"""Arithmetic in the prime field F_p.

Everything here is exact. Tables are numpy integer arrays so the bulk
routines elsewhere can index them with whole arrays of residues; they are
marked read-only once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MIN_PRIME = 5


class UnsupportedModulus(ValueError):
    """Raised for moduli that are not odd primes >= 5."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes_in_range(lo: int, hi: int) -> list[int]:
    """Primes ``p`` with ``lo <= p <= hi`` and ``p >= MIN_PRIME``."""
    return [p for p in range(max(lo, MIN_PRIME), hi + 1) if is_prime(p)]


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(p: int) -> int:
    q = p - 1
    factors = _prime_factors(q)
    for g in range(2, p):
        if all(pow(g, q // f, p) != 1 for f in factors):
            return g
    raise UnsupportedModulus(f"no primitive root mod {p}")  # unreachable for prime p


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def unit_roots(order: int) -> np.ndarray:
    """Table of e(t/order) for t = 0..order-1 as complex long double.

    Angles are folded into [-1/2, 1/2) turns before calling cos/sin so the
    argument stays small.
    """
    two_pi = 2 * np.arccos(np.longdouble(-1))
    t = np.arange(order, dtype=np.int64)
    t = np.where(2 * t >= order, t - order, t)
    theta = two_pi * t.astype(np.longdouble) / np.longdouble(order)
    z = np.cos(theta) + 1j * np.sin(theta)
    z = z.astype(np.clongdouble)
    # exact values where they are known
    z[0] = 1
    if order % 2 == 0:
        z[order // 2] = -1
    if order % 4 == 0:
        z[order // 4] = 1j
        z[3 * order // 4] = -1j
    return _readonly(z)


@dataclass(frozen=True, eq=False)
class PrimeContext:
    """Immutable per-prime workspace.

    ``index[a]`` is the discrete log of ``a`` base ``g``; ``index[0]`` holds
    the sentinel ``p``. ``inv[0] == 0`` by convention.
    """

    p: int
    g: int
    index: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)
    leg: np.ndarray = field(repr=False)
    roots_p: np.ndarray = field(repr=False)
    roots_q: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        """Order of the multiplicative group, p - 1."""
        return self.p - 1

    def ind(self, a: int) -> int:
        a %= self.p
        assert a != 0, "index of 0 is undefined"
        return int(self.index[a])

    def units(self) -> np.ndarray:
        return np.arange(1, self.p, dtype=np.int64)


@lru_cache(maxsize=64)
def build_context(p: int) -> PrimeContext:
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise UnsupportedModulus(f"unsupported modulus {p!r}: not an integer")
    p = int(p)
    if p < MIN_PRIME or not is_prime(p):
        raise UnsupportedModulus(f"unsupported modulus {p}: need an odd prime >= {MIN_PRIME}")
    q = p - 1
    g = smallest_primitive_root(p)

    powers = np.empty(q, dtype=np.int64)
    x = 1
    for t in range(q):
        powers[t] = x
        x = x * g % p
    index = np.full(p, p, dtype=np.int64)
    index[powers] = np.arange(q, dtype=np.int64)

    # inverse of g^t is g^(q-t)
    inv = np.zeros(p, dtype=np.int64)
    inv[powers] = powers[(-np.arange(q)) % q]

    leg = np.zeros(p, dtype=np.int64)
    leg[1:] = np.where(index[1:] % 2 == 0, 1, -1)

    return PrimeContext(
        p=p,
        g=g,
        index=_readonly(index),
        inv=_readonly(inv),
        leg=_readonly(leg),
        roots_p=unit_roots(p),
        roots_q=unit_roots(q),
    )


def mod_inv(ctx: PrimeContext, a: int) -> int:
    """Inverse of ``a`` mod p, with the inverse of 0 taken to be 0."""
    return int(ctx.inv[a % ctx.p])


def legendre(ctx: PrimeContext, a: int) -> int:
    return int(ctx.leg[a % ctx.p])


def euler_criterion(p: int, a: int) -> int:
    """Legendre symbol by Euler's criterion; independent of any table."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def quad_legendre_sum(ctx: PrimeContext, m: int, n: int) -> int:
    """Direct sum of ((a^2 + m a + n) | p) over a = 0..p-1."""
    p = ctx.p
    a = np.arange(p, dtype=np.int64)
    return int(ctx.leg[(a * a + m * a + n) % p].sum())


def quad_legendre_closed(ctx: PrimeContext, m: int, n: int) -> int:
    """Closed value of :func:`quad_legendre_sum`: p-1 if p | m^2-4n, else -1."""
    return ctx.p - 1 if (m * m - 4 * n) % ctx.p == 0 else -1
