"""Exact counting quantities behind the fourth power mean.

Integer arithmetic only. Bulk enumerations use numpy int64 grids over
F_p^x; every intermediate is reduced mod p before the next product, so the
largest value ever formed is below p^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from charmean.fp import PrimeContext, legendre


@dataclass(frozen=True)
class SetCensus:
    """One set S(N) as a sorted tuple of (u, a) pairs."""

    N: int
    members: tuple[tuple[int, int], ...]

    @property
    def cardinality(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CongruenceTriple:
    u: int
    a: int
    b: int

    def _sides(self, ctx: PrimeContext) -> tuple[int, int]:
        p, inv = ctx.p, ctx.inv
        u, a, b = self.u, self.a, self.b
        lhs = (u * a - 1) * (u * int(inv[b % p]) - 1) * (b - 1) ** 2 % p
        rhs = (u * b - 1) * (u * int(inv[a % p]) - 1) * (a - 1) ** 2 % p
        return lhs, rhs

    def in_u(self, ctx: PrimeContext) -> bool:
        lhs, rhs = self._sides(ctx)
        return lhs == rhs

    def in_u0(self, ctx: PrimeContext) -> bool:
        lhs, rhs = self._sides(ctx)
        return lhs == rhs == 0


def _mulmod(p: int, *factors):
    out = factors[0] % p
    for f in factors[1:]:
        out = out * (f % p) % p
    return out


def _grid3(ctx: PrimeContext):
    r = ctx.units()
    return r[:, None, None], r[None, :, None], r[None, None, :]


# --- S(N) ------------------------------------------------------------------


@lru_cache(maxsize=8)
def census_direct(ctx: PrimeContext) -> dict[int, SetCensus]:
    """Every S(N), N = 1..p-1, by one exhaustive pass over (u, a)."""
    p, inv = ctx.p, ctx.inv
    u = ctx.units()[:, None]
    a = np.arange(2, p, dtype=np.int64)[None, :]
    ia = inv[a]
    value = _mulmod(p, inv[(u * a - 1) % p], u * ia - 1, (a - 1) ** 2)
    ok = (u != a) & (u != ia)
    buckets: dict[int, list[tuple[int, int]]] = {N: [] for N in range(1, p)}
    uu, aa = np.broadcast_arrays(u, a)
    for uv, av, nv in zip(uu[ok].tolist(), aa[ok].tolist(), value[ok].tolist()):
        if nv:
            buckets[nv].append((uv, av))
    return {N: SetCensus(N, tuple(sorted(m))) for N, m in buckets.items()}


def s_set_direct(ctx: PrimeContext, N: int) -> SetCensus:
    if not 1 <= N < ctx.p:
        raise ValueError(f"N must lie in 1..{ctx.p - 1}")
    return census_direct(ctx)[N]


def s_set_constructed(ctx: PrimeContext, N: int) -> SetCensus:
    """S(N) rebuilt from the closed-form u for each admissible a."""
    p, inv = ctx.p, ctx.inv
    if not 1 <= N < p:
        raise ValueError(f"N must lie in 1..{p - 1}")
    members = []
    for a in range(2, p - 1):
        ia = int(inv[a])
        sq = (a - 1) ** 2 % p
        if sq == N or (ia - 1) ** 2 % p == N:
            continue
        den = (sq * ia - a * N) % p
        u = (sq - N) * int(inv[den]) % p
        members.append((u, a))
    if N == 4 % p:
        members.extend((u, p - 1) for u in range(1, p - 1))
    return SetCensus(N, tuple(sorted(members)))


def census_class_count(ctx: PrimeContext, N: int) -> int:
    """Predicted |S(N)| by residue class of N."""
    p = ctx.p
    N %= p
    if N == 1:
        return p - 5
    if N == 4 % p:
        return 2 * p - 7
    return p - 7 if legendre(ctx, N) == 1 else p - 3


def census_square_sum(ctx: PrimeContext) -> int:
    return sum(s.cardinality ** 2 for s in census_direct(ctx).values())


# --- U, U0 and T(p) ----------------------------------------------------------


def _t_sides(ctx: PrimeContext):
    p, inv = ctx.p, ctx.inv
    u, a, b = _grid3(ctx)
    lhs = _mulmod(p, (a - 1) ** 2, u * inv[a] - 1, u * b - 1)
    rhs = _mulmod(p, (b - 1) ** 2, u * inv[b] - 1, u * a - 1)
    return lhs, rhs


def _u_sides(ctx: PrimeContext):
    p, inv = ctx.p, ctx.inv
    u, a, b = _grid3(ctx)
    lhs = _mulmod(p, u * a - 1, u * inv[b] - 1, (b - 1) ** 2)
    rhs = _mulmod(p, u * b - 1, u * inv[a] - 1, (a - 1) ** 2)
    return lhs, rhs


@lru_cache(maxsize=8)
def t_direct(ctx: PrimeContext) -> int:
    """T(p) as the restricted triple sum of the principal-character indicator."""
    lhs, rhs = _t_sides(ctx)
    return int(np.count_nonzero((lhs == rhs) & (lhs != 0)))


@lru_cache(maxsize=8)
def u_count(ctx: PrimeContext) -> int:
    lhs, rhs = _u_sides(ctx)
    return int(np.count_nonzero(lhs == rhs))


@lru_cache(maxsize=8)
def u0_members(ctx: PrimeContext) -> tuple[tuple[int, int, int], ...]:
    lhs, rhs = _u_sides(ctx)
    hit = (lhs == 0) & (rhs == 0)
    u, a, b = np.nonzero(hit)
    return tuple(zip((u + 1).tolist(), (a + 1).tolist(), (b + 1).tolist()))


def u0_forms(ctx: PrimeContext, triple: tuple[int, int, int]) -> list[str]:
    """Names of the parametric families (n free in F_p^x) that contain ``triple``."""
    p = ctx.p
    u, a, b = triple
    m1 = p - 1
    forms = {
        "(1,1,n)": u == 1 and a == 1,
        "(n,1,n)": a == 1 and u == b,
        "(n,1,1)": a == 1 and b == 1,
        "(1,n,1)": u == 1 and b == 1,
        "(n,n,1)": u == a and b == 1,
        "(-1,-1,n)": u == m1 and a == m1,
        "(-1,n,-1)": u == m1 and b == m1,
        "(n,n,n)": u == a == b,
        "(n,1/n,1/n)": a == b and u * a % p == 1,
    }
    return [name for name, hit in forms.items() if hit]


def u0_count(ctx: PrimeContext) -> int:
    """|U0| by enumeration. Raises if a member fits none of the nine families."""
    members = u0_members(ctx)
    stray = [t for t in members if not u0_forms(ctx, t)]
    if stray:
        raise AssertionError(f"U0 members outside the nine families: {stray[:5]}")
    return len(members)


def t_via_sets(ctx: PrimeContext) -> int:
    return u_count(ctx) - u0_count(ctx)


def delta(ctx: PrimeContext, a: int, b: int) -> int:
    p = ctx.p
    s = a + b
    return ((1 - a * a * b * b) ** 2 + 4 * a * b * (s - 2) * (s - 2 * a * b)) % p


def delta_proof_form(ctx: PrimeContext, a: int, b: int) -> int:
    p = ctx.p
    ab = a * b
    return (((1 + ab) * (1 - ab)) ** 2 - 4 * (a + b - 2 * ab) * ab * (2 - a - b)) % p


def sol_count(ctx: PrimeContext, a: int, b: int) -> int:
    """Number of u in F_p solving (a+b-2ab)u^2 - (1+ab)(1-ab)u + ab(2-a-b) = 0."""
    p = ctx.p
    c2 = (a + b - 2 * a * b) % p
    c1 = -(1 + a * b) * (1 - a * b) % p
    c0 = a * b * (2 - a - b) % p
    return sum(1 for u in range(p) if (c2 * u * u + c1 * u + c0) % p == 0)


def _delta_grid(ctx: PrimeContext):
    p = ctx.p
    a = ctx.units()[:, None]
    b = ctx.units()[None, :]
    ab = a * b % p
    s = a + b
    d = ((1 - ab * ab) % p) ** 2 % p + _mulmod(p, 4 * ab, s - 2, s - 2 * ab)
    admissible = (a != b) & ((s - 2 * ab) % p != 0)
    return d % p, admissible


def delta_legendre_sum(ctx: PrimeContext) -> int:
    d, admissible = _delta_grid(ctx)
    return int(ctx.leg[d][admissible].sum())


@lru_cache(maxsize=8)
def t_via_delta(ctx: PrimeContext) -> int:
    p = ctx.p
    return (p - 5) * (2 * p - 5) - legendre(ctx, 2) + delta_legendre_sum(ctx)


def u_count_via_sol(ctx: PrimeContext) -> int:
    """|U| assembled from the diagonal and the per-(a, b) solution counts."""
    p = ctx.p
    total = (p - 1) ** 2
    zero_roots = 0
    for a in range(1, p):
        for b in range(1, p):
            if a == b:
                continue
            total += sol_count(ctx, a, b)
            if (a * b * (2 - a - b)) % p == 0:
                zero_roots += 1
    return total - zero_roots


# --- Legendre sums -----------------------------------------------------------


def _ua_legendre(ctx: PrimeContext) -> np.ndarray:
    """``L[u-1, a-1] = ((u a - 1)(u/a - 1) | p)``."""
    p = ctx.p
    u = ctx.units()[:, None]
    a = ctx.units()[None, :]
    return ctx.leg[_mulmod(p, u * a - 1, u * ctx.inv[a] - 1)]


def t_l_inner(ctx: PrimeContext) -> list[int]:
    return _ua_legendre(ctx).sum(axis=1).tolist()


@lru_cache(maxsize=8)
def t_l(ctx: PrimeContext) -> int:
    return sum(s * s for s in t_l_inner(ctx))


def reciprocal_legendre_sum(ctx: PrimeContext) -> int:
    """Sum over units a of ((a - 1)(1/a - 1) | p)."""
    p = ctx.p
    a = ctx.units()
    return int(ctx.leg[_mulmod(p, a - 1, ctx.inv[a] - 1)].sum())


def reciprocal_double_sum(ctx: PrimeContext) -> int:
    """Sum over units u, a of ((u a - 1)(u/a - 1) | p)."""
    return int(_ua_legendre(ctx).sum())


def legendre_inner_from2(ctx: PrimeContext) -> np.ndarray:
    """``B[u-1] = sum over a = 2..p-1 of ((u a - 1)(u/a - 1) | p)``."""
    return _ua_legendre(ctx)[:, 1:].sum(axis=1)
