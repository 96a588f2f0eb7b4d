"""Gauss, Kloosterman and H sums with compensated complex summation.

Scalar routines follow the defining sums term by term. The ``*_table``
routines evaluate the same sums for every character (and every m) at once;
they loop over the summation variable and accumulate whole arrays, so both
paths share the accumulator but not the indexing.

All accumulation happens in numpy's long double (80-bit on x86).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from charmean.characters import DirichletCharacter, character_table
from charmean.fp import PrimeContext

LD = np.longdouble
CLD = np.clongdouble


def _neumaier(s, c, x):
    t = s + x
    c = c + np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
    return t, c


class ComplexAccumulator:
    """Compensated (Neumaier) running sum of complex values.

    ``shape`` lets one accumulator carry a whole array of independent sums;
    the default ``()`` is a single complex number.
    """

    __slots__ = ("re", "im", "_cre", "_cim")

    def __init__(self, shape=()):
        self.re = np.zeros(shape, dtype=LD)
        self.im = np.zeros(shape, dtype=LD)
        self._cre = np.zeros(shape, dtype=LD)
        self._cim = np.zeros(shape, dtype=LD)

    def add(self, z) -> "ComplexAccumulator":
        z = np.asarray(z)
        self.re, self._cre = _neumaier(self.re, self._cre, z.real.astype(LD))
        if np.iscomplexobj(z):
            self.im, self._cim = _neumaier(self.im, self._cim, z.imag.astype(LD))
        return self

    __iadd__ = add

    @property
    def real(self):
        return self.re + self._cre

    @property
    def imag(self):
        return self.im + self._cim

    @property
    def value(self):
        out = self.real + 1j * self.imag
        return out.astype(CLD) if isinstance(out, np.ndarray) else CLD(out)

    def abs2(self):
        # |z|^2 from the parts, never via abs() then square
        r, i = self.real, self.imag
        return r * r + i * i


def compensated_sum(values, axis: int = -1):
    """Sum ``values`` along ``axis`` with compensation.

    Returns a long double (complex long double for complex input).
    """
    v = np.moveaxis(np.asarray(values), axis, 0)
    acc = ComplexAccumulator(v.shape[1:])
    for x in v:
        acc.add(x)
    return acc.value if np.iscomplexobj(v) else acc.real


def abs2(z):
    z = np.asarray(z)
    return z.real.astype(LD) ** 2 + z.imag.astype(LD) ** 2


def e_p(ctx: PrimeContext, t: int):
    """e(t/p) from the context's table."""
    return ctx.roots_p[t % ctx.p]


def _chi(ctx: PrimeContext, j: int, a: int):
    a %= ctx.p
    if a == 0:
        return CLD(0)
    return ctx.roots_q[(j * int(ctx.index[a])) % ctx.q]


# --- scalar sums -----------------------------------------------------------


def gauss_sum(ctx: PrimeContext, chi: DirichletCharacter, n: int):
    """G(n, chi), summed over a = 1..p."""
    acc = ComplexAccumulator()
    for a in range(1, ctx.p + 1):
        acc.add(_chi(ctx, chi.j, a) * e_p(ctx, n * a))
    return acc.value


def tau(ctx: PrimeContext, chi: DirichletCharacter):
    return gauss_sum(ctx, chi, 1)


class ExcludedCase(ValueError):
    """The twist law does not apply to the principal character at n = 0."""


def twist_check(ctx: PrimeContext, chi: DirichletCharacter, n: int):
    """Both sides of G(n, chi) = conj(chi)(n) tau(chi)."""
    if n % ctx.p == 0:
        if chi.is_principal:
            raise ExcludedCase("excluded case: principal character with n = 0 mod p")
        raise ValueError("n must be coprime to p")
    lhs = gauss_sum(ctx, chi, n)
    rhs = _chi(ctx, chi.conj().j, n) * tau(ctx, chi)
    return lhs, rhs


def kloosterman(ctx: PrimeContext, chi: DirichletCharacter, m: int, n: int):
    """K(m, n, chi; p) summed over a = 1..p (the a = p term vanishes)."""
    p = ctx.p
    acc = ComplexAccumulator()
    for a in range(1, p + 1):
        acc.add(_chi(ctx, chi.j, a) * e_p(ctx, m * a + n * int(ctx.inv[a % p])))
    return acc.value


def h_sum(ctx: PrimeContext, chi: DirichletCharacter, m: int, n: int, k: int):
    """H(m, n, k, chi; p) = sum over a = 1..p-1 of chi(m a + n/a) e(k a / p)."""
    acc = ComplexAccumulator()
    for a in range(1, ctx.p):
        acc.add(_chi(ctx, chi.j, m * a + n * int(ctx.inv[a])) * e_p(ctx, k * a))
    return acc.value


def second_moment_m(ctx: PrimeContext, chi: DirichletCharacter, n: int, k: int):
    """Sum over m = 1..p-1 of |H(m, n, k, chi; p)|^2."""
    return psi_weighted_second_moment(ctx, chi, DirichletCharacter(ctx.p, 0), n, k).real


def psi_weighted_second_moment(
    ctx: PrimeContext, chi: DirichletCharacter, psi: DirichletCharacter, n: int, k: int
):
    acc = ComplexAccumulator()
    for m in range(1, ctx.p):
        acc.add(_chi(ctx, psi.j, m) * abs2(h_sum(ctx, chi, m, n, k)))
    return acc.value


# --- whole-group tables ----------------------------------------------------


@lru_cache(maxsize=8)
def gauss_table(ctx: PrimeContext) -> np.ndarray:
    """``G[j, n] = G(n, chi_j)`` for every character and n = 0..p-1."""
    p = ctx.p
    table = character_table(ctx)
    nn = np.arange(p, dtype=np.int64)
    acc = ComplexAccumulator((ctx.q, p))
    for a in range(1, p + 1):
        acc.add(table[:, a % p][:, None] * ctx.roots_p[(nn * a) % p][None, :])
    out = acc.value
    out.flags.writeable = False
    return out


@lru_cache(maxsize=8)
def h_table(ctx: PrimeContext, n: int, k: int) -> np.ndarray:
    """``H[j, m-1] = H(m, n, k, chi_j; p)`` for every character and m = 1..p-1."""
    p = ctx.p
    table = character_table(ctx)
    m = ctx.units()
    acc = ComplexAccumulator((ctx.q, p - 1))
    for a in range(1, p):
        x = (m * a + n * int(ctx.inv[a])) % p
        acc.add(table[:, x] * ctx.roots_p[(k * a) % p])
    out = acc.value
    out.flags.writeable = False
    return out


@lru_cache(maxsize=8)
def h_abs2_table(ctx: PrimeContext, n: int, k: int) -> np.ndarray:
    """``|H[j, m-1]|^2`` as long double."""
    out = abs2(h_table(ctx, n, k))
    out.flags.writeable = False
    return out


@lru_cache(maxsize=8)
def psi_weighted_table(ctx: PrimeContext, n: int, k: int) -> np.ndarray:
    """``P[j_chi, j_psi]`` = sum over m of psi(m) |H(m, n, k, chi; p)|^2."""
    w = h_abs2_table(ctx, n, k)
    table = character_table(ctx)
    acc = ComplexAccumulator((ctx.q, ctx.q))
    for m in range(1, ctx.p):
        acc.add(w[:, m - 1][:, None] * table[:, m][None, :])
    out = acc.value
    out.flags.writeable = False
    return out


@lru_cache(maxsize=8)
def kloosterman_table(ctx: PrimeContext, n: int) -> np.ndarray:
    """``K[j, m-1]`` summed over a = 1..p-1 as in the fourth-moment formula."""
    p = ctx.p
    table = character_table(ctx)
    m = ctx.units()
    acc = ComplexAccumulator((ctx.q, p - 1))
    for a in range(1, p):
        phase = ctx.roots_p[(m * a + n * int(ctx.inv[a])) % p]
        acc.add(table[:, a][:, None] * phase[None, :])
    out = acc.value
    out.flags.writeable = False
    return out


@lru_cache(maxsize=8)
def psi_kernel_table(ctx: PrimeContext) -> np.ndarray:
    """``B[j, u-1]`` = sum over a of conj(psi)(u a - 1) psi(u/a - 1) psi^2(a - 1), psi = chi_j.

    The three arguments combine into one exponent of the (p-1)-th root of
    unity; any zero argument kills the term.
    """
    p, q = ctx.p, ctx.q
    idx, inv = ctx.index, ctx.inv
    u = ctx.units()
    j = np.arange(q, dtype=np.int64)[:, None]
    acc = ComplexAccumulator((q, q))
    for a in range(1, p):
        x1 = (u * a - 1) % p
        x2 = (u * int(inv[a]) - 1) % p
        x3 = (a - 1) % p
        if x3 == 0:
            continue
        live = (x1 != 0) & (x2 != 0)
        expo = (-idx[x1] + idx[x2] + 2 * int(idx[x3])) % q
        vals = ctx.roots_q[(j * expo[None, :]) % q] * live[None, :]
        acc.add(vals)
    out = acc.value
    out.flags.writeable = False
    return out


def conj_transform(ctx: PrimeContext, f) -> np.ndarray:
    """``F[j, ...]`` = sum over u = 1..p-1 of conj(chi_j)(u) f[..., u-1]."""
    f = np.asarray(f)
    table = character_table(ctx)
    acc = ComplexAccumulator((ctx.q,) + f.shape[:-1])
    extra = (None,) * (f.ndim - 1)
    for u in range(1, ctx.p):
        acc.add(np.conj(table[:, u])[(slice(None),) + extra] * f[..., u - 1][None, ...])
    return acc.value
