"""Dirichlet characters mod an odd prime, indexed by an exponent j.

With g the primitive root of the context, chi_j(g^t) = e(j t / (p-1)).
Characters carry no value table of their own; evaluation goes through the
shared root-of-unity table on the context.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from charmean.fp import PrimeContext


@dataclass(frozen=True)
class DirichletCharacter:
    p: int
    j: int

    def __post_init__(self):
        if not 0 <= self.j < self.p - 1:
            raise ValueError(f"character index {self.j} out of range for p={self.p}")

    @property
    def is_principal(self) -> bool:
        return self.j == 0

    @property
    def is_legendre(self) -> bool:
        return 2 * self.j == self.p - 1

    @property
    def is_real(self) -> bool:
        return self.is_principal or self.is_legendre

    @property
    def parity(self) -> int:
        """chi(-1); -1 has index (p-1)/2, so this is (-1)^j."""
        return -1 if self.j % 2 else 1

    @property
    def order(self) -> int:
        q = self.p - 1
        return q // gcd(self.j, q)

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.p, (-self.j) % (self.p - 1))

    def __pow__(self, e: int) -> "DirichletCharacter":
        return DirichletCharacter(self.p, (self.j * e) % (self.p - 1))

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.p != self.p:
            raise ValueError("characters to different moduli")
        return DirichletCharacter(self.p, (self.j + other.j) % (self.p - 1))


def character(ctx: PrimeContext, j: int) -> DirichletCharacter:
    return DirichletCharacter(ctx.p, j % ctx.q)


def principal(ctx: PrimeContext) -> DirichletCharacter:
    return DirichletCharacter(ctx.p, 0)


def legendre_character(ctx: PrimeContext) -> DirichletCharacter:
    return DirichletCharacter(ctx.p, ctx.q // 2)


def enumerate_characters(ctx: PrimeContext) -> list[DirichletCharacter]:
    return [DirichletCharacter(ctx.p, j) for j in range(ctx.q)]


def char_eval(ctx: PrimeContext, chi: DirichletCharacter, a: int) -> complex:
    a %= ctx.p
    if a == 0:
        return 0j
    return complex(ctx.roots_q[(chi.j * int(ctx.index[a])) % ctx.q])


def char_parity(chi: DirichletCharacter) -> int:
    return chi.parity


@lru_cache(maxsize=64)
def character_table(ctx: PrimeContext) -> np.ndarray:
    """Matrix ``T[j, a] = chi_j(a)`` for j in 0..p-2 and a in 0..p-1.

    Column 0 is identically zero. Indexing ``T[:, x]`` with an integer array
    of residues evaluates every character on every entry at once.
    """
    q, p = ctx.q, ctx.p
    t = np.zeros((q, p), dtype=np.clongdouble)
    j = np.arange(q, dtype=np.int64)[:, None]
    t[:, 1:] = ctx.roots_q[(j * ctx.index[None, 1:]) % q]
    t.flags.writeable = False
    return t


def char_values(ctx: PrimeContext, chi: DirichletCharacter, x) -> np.ndarray:
    """Evaluate one character on an integer array of residues."""
    return character_table(ctx)[chi.j][np.asarray(x, dtype=np.int64) % ctx.p]
