"""One verifier per identity, each producing a :class:`VerificationRecord`.

Right-hand sides are exact integers wherever the identity allows it;
left-hand sides come from the floating-point sums in :mod:`charmean.csum` or,
for the counting statements, from the exact enumerations in
:mod:`charmean.combinatorics`.

Verifiers that range over a family (all characters, all N, all (m, n), ...)
return a single record for the prime: it passes only if every member passes,
and it reports the member whose error is largest relative to its tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Iterable

import numpy as np

from charmean import combinatorics as comb
from charmean import csum
from charmean.characters import DirichletCharacter, character_table
from charmean.fp import PrimeContext, legendre, quad_legendre_closed, quad_legendre_sum

DEFAULT_CUBIC_GUARD = 199


class IdentityId(str, Enum):
    TH1 = "TH1"
    TH2 = "TH2"
    T_DELTA = "T_DELTA"
    PSI_IDENTITY = "PSI_IDENTITY"
    TH2_1 = "TH2_1"
    L3_1_SCOUNT = "L3_1_SCOUNT"
    U0_COUNT = "U0_COUNT"
    L4_1 = "L4_1"
    C4_1 = "C4_1"
    L4_2 = "L4_2"
    L4_3A = "L4_3A"
    L4_3B = "L4_3B"
    QUAD_LEG = "QUAD_LEG"
    C4_2A = "C4_2A"
    C4_2B = "C4_2B"
    ZHANG_K4 = "ZHANG_K4"
    EQ1_1 = "EQ1_1"
    GAUSS_MAG = "GAUSS_MAG"

    def __str__(self) -> str:
        return self.value


ALL_IDENTITIES = tuple(IdentityId)
ORDER = {ident: i for i, ident in enumerate(ALL_IDENTITIES)}

INTEGER_ROUTES = frozenset(
    {
        IdentityId.T_DELTA,
        IdentityId.L3_1_SCOUNT,
        IdentityId.U0_COUNT,
        IdentityId.L4_3A,
        IdentityId.L4_3B,
        IdentityId.QUAD_LEG,
    }
)
CUBIC_ROUTES = frozenset({IdentityId.T_DELTA, IdentityId.U0_COUNT})
USES_NK = frozenset(
    {
        IdentityId.TH1,
        IdentityId.TH2,
        IdentityId.TH2_1,
        IdentityId.L4_1,
        IdentityId.C4_1,
        IdentityId.L4_2,
        IdentityId.C4_2A,
        IdentityId.C4_2B,
        IdentityId.ZHANG_K4,  # n only
    }
)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass(frozen=True)
class Tolerance:
    """An integer-valued RHS is matched iff |lhs - rhs| <= max(abs_floor, rel * |rhs|)."""

    abs_floor: float = 1e-6
    rel: float = 1e-9

    def bound(self, rhs) -> float:
        return max(self.abs_floor, self.rel * abs(complex(rhs)))


DEFAULT_TOL = Tolerance()


@dataclass
class VerificationRecord:
    identity: IdentityId
    prime: int
    lhs: int | float | complex | None
    rhs: int | float | complex | None
    abs_err: float
    rel_err: float
    status: str
    elapsed_ms: float = 0.0
    n: int | None = None
    k: int | None = None
    detail: str = ""
    cache_hit: bool = False

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["identity"] = self.identity.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationRecord":
        d = dict(d)
        d["identity"] = IdentityId(d["identity"])
        return cls(**d)


# --- helpers -----------------------------------------------------------------


def _py(x):
    """numpy scalar -> int / float / complex."""
    if isinstance(x, (int, np.integer)):
        return int(x)
    if np.iscomplexobj(x):
        return complex(x)
    return float(x)


@dataclass
class _Member:
    label: str
    lhs: object
    rhs: object
    exact: bool = False
    err: float = field(init=False)
    bound: float = field(init=False)

    def settle(self, tol: Tolerance) -> None:
        if self.exact:
            self.err = float(abs(int(self.lhs) - int(self.rhs)))
            self.bound = 0.0
        else:
            diff = np.clongdouble(self.lhs) - np.clongdouble(self.rhs)
            self.err = float(abs(diff))
            self.bound = tol.bound(self.rhs)

    @property
    def ok(self) -> bool:
        return self.err <= self.bound

    @property
    def badness(self) -> float:
        if self.bound == 0.0:
            return math.inf if self.err else 0.0
        return self.err / self.bound


def _record(
    identity: IdentityId,
    ctx: PrimeContext,
    members: Iterable[_Member],
    tol: Tolerance,
    *,
    n: int | None = None,
    k: int | None = None,
    problems: Iterable[str] = (),
    note: str = "",
) -> VerificationRecord:
    members = list(members)
    for m in members:
        m.settle(tol)
    worst = max(members, key=lambda m: m.badness)  # first on ties
    problems = list(problems)
    n_bad = sum(not m.ok for m in members)
    ok = n_bad == 0 and not problems
    parts = []
    if len(members) > 1:
        parts.append(f"worst {worst.label} of {len(members)}")
        if n_bad:
            parts.append(f"{n_bad} failing")
    elif worst.label:
        parts.append(worst.label)
    if note:
        parts.append(note)
    parts.extend(problems)
    return VerificationRecord(
        identity=identity,
        prime=ctx.p,
        lhs=_py(worst.lhs),
        rhs=_py(worst.rhs),
        abs_err=worst.err,
        rel_err=worst.err / max(abs(complex(worst.rhs)), 1.0),
        status=PASS if ok else FAIL,
        n=n,
        k=k,
        detail="; ".join(parts),
    )


def skipped(identity: IdentityId, p: int, reason: str) -> VerificationRecord:
    return VerificationRecord(identity, p, None, None, 0.0, 0.0, SKIPPED, detail=reason)


def _require_p_gt3(ctx: PrimeContext) -> None:
    if ctx.p <= 3:
        raise ValueError("identity requires p > 3")


def _check_coprime(ctx: PrimeContext, *vals: int) -> None:
    for v in vals:
        if v % ctx.p == 0:
            raise ValueError(f"{v} is not coprime to {ctx.p}")


def _agree(a, b, tol: Tolerance, rhs, what: str) -> list[str]:
    """Two LHS routes must agree within twice the base tolerance."""
    gap = float(abs(np.clongdouble(a) - np.clongdouble(b)))
    if gap > 2 * tol.bound(rhs):
        return [f"{what} routes disagree by {gap:.3e}"]
    return []


def exact_t(ctx: PrimeContext, cubic_guard: int = DEFAULT_CUBIC_GUARD) -> int:
    """T(p) by the triple sum when affordable, else by the discriminant formula."""
    return comb.t_direct(ctx) if ctx.p <= cubic_guard else comb.t_via_delta(ctx)


# --- closed forms ------------------------------------------------------------


def th2_1_rhs(p: int, chi: DirichletCharacter) -> int:
    if chi.is_principal:
        return 2 * p - 5
    # conj(chi)(-1) = chi(-1)
    return p * (p - 3 - chi.parity)


def th1_rhs(p: int) -> int:
    return (p - 1) * (p**4 - 7 * p**3 + 17 * p**2 - 5 * p - 25)


def th1_assembly(p: int) -> int:
    # (p-3)/2 even non-principal characters give p(p-4), (p-1)/2 odd ones give p(p-2)
    return (2 * p - 5) ** 2 + (p - 3) // 2 * (p * (p - 4)) ** 2 + (p - 1) // 2 * (p * (p - 2)) ** 2


def th2_rhs(p: int, t: int, tl: int) -> int:
    return (p - 1) * (p * p - 10 * p + 37 + p * t - tl)


def psi_identity_rhs(p: int) -> int:
    return (p - 1) * (p**3 - 8 * p**2 + 29 * p - 53)


def c4_1_rhs(p: int) -> int:
    return 6 * p * p - 31 * p + 16


def c4_2a_rhs(p: int, leg_m1: int, tl: int) -> int:
    return (p**3 - 2 * p**2 - 4 * p - 4) - 2 * p * (p - 1) * leg_m1 + (p - 1) * tl


def c4_2b_rhs(p: int, leg_m1: int, t: int, tl: int) -> int:
    return (
        -p * (p**4 - 9 * p**3 + 37 * p**2 - 76 * p + 29)
        + 2 * p * (p - 1) * leg_m1
        - p * (p - 1) * tl
        + p * (p - 1) ** 2 * t
    )


def kloosterman_k4_rhs(p: int, chi: DirichletCharacter) -> int:
    if chi.is_principal:
        return 2 * p**3 - 3 * p**2 - 3 * p - 1
    if chi.is_legendre:
        return 3 * p**3 - 8 * p**2
    return p * p * (2 * p - 7)


def u0_rhs(p: int) -> int:
    return 9 * p - 20


# --- verifiers ---------------------------------------------------------------


def verify_th2_1(
    ctx: PrimeContext, chi: DirichletCharacter | None = None, n: int = 1, k: int = 1, tol: Tolerance = DEFAULT_TOL
) -> VerificationRecord:
    """Second moment over m against its two-branch closed form.

    With ``chi`` given the scalar summation path is used; otherwise every
    character is checked from the bulk H table.
    """
    _check_coprime(ctx, n, k)
    p = ctx.p
    if chi is not None:
        members = [_Member(f"j={chi.j}", csum.second_moment_m(ctx, chi, n, k), th2_1_rhs(p, chi))]
    else:
        s2 = csum.compensated_sum(csum.h_abs2_table(ctx, n, k), axis=1)
        members = [
            _Member(f"j={j}", s2[j], th2_1_rhs(p, DirichletCharacter(p, j))) for j in range(ctx.q)
        ]
    return _record(IdentityId.TH2_1, ctx, members, tol, n=n, k=k)


def th1_lhs(ctx: PrimeContext, n: int, k: int):
    s2 = csum.compensated_sum(csum.h_abs2_table(ctx, n, k), axis=1)
    return csum.compensated_sum(s2 * s2)


def verify_th1(ctx: PrimeContext, n: int = 1, k: int = 1, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    _check_coprime(ctx, n, k)
    p = ctx.p
    rhs = th1_rhs(p)
    problems = []
    if th1_assembly(p) != rhs:
        problems.append(f"assembly {th1_assembly(p)} != polynomial {rhs}")
    return _record(IdentityId.TH1, ctx, [_Member("", th1_lhs(ctx, n, k), rhs)], tol, n=n, k=k, problems=problems)


def th2_lhs(ctx: PrimeContext, n: int, k: int):
    w = csum.h_abs2_table(ctx, n, k)
    return csum.compensated_sum(csum.compensated_sum(w * w, axis=1))


def th2_lhs_parseval(ctx: PrimeContext, n: int, k: int):
    """(1/(p-1)) times the sum over chi and psi of |psi-weighted second moment|^2."""
    pw = csum.abs2(csum.psi_weighted_table(ctx, n, k))
    return csum.compensated_sum(csum.compensated_sum(pw, axis=1)) / ctx.q


def verify_th2(
    ctx: PrimeContext,
    n: int = 1,
    k: int = 1,
    tol: Tolerance = DEFAULT_TOL,
    cubic_guard: int = DEFAULT_CUBIC_GUARD,
) -> VerificationRecord:
    _require_p_gt3(ctx)
    _check_coprime(ctx, n, k)
    p = ctx.p
    t = exact_t(ctx, cubic_guard)
    tl = comb.t_l(ctx)
    rhs = th2_rhs(p, t, tl)
    lhs = th2_lhs(ctx, n, k)
    problems = _agree(lhs, th2_lhs_parseval(ctx, n, k), tol, rhs, "direct/Parseval")
    return _record(
        IdentityId.TH2, ctx, [_Member("", lhs, rhs)], tol, n=n, k=k, problems=problems, note=f"T={t} T_L={tl}"
    )


def verify_t_delta(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL, cubic_guard: int = DEFAULT_CUBIC_GUARD):
    _require_p_gt3(ctx)
    if ctx.p > cubic_guard:
        return skipped(IdentityId.T_DELTA, ctx.p, f"p > max cubic prime {cubic_guard}")
    direct = comb.t_direct(ctx)
    via_sets = comb.t_via_sets(ctx)
    via_delta = comb.t_via_delta(ctx)
    members = [
        _Member("direct", direct, via_delta, exact=True),
        _Member("|U|-|U0|", via_sets, via_delta, exact=True),
    ]
    return _record(IdentityId.T_DELTA, ctx, members, tol)


def psi_identity_float(ctx: PrimeContext):
    kernel = csum.psi_kernel_table(ctx)
    per_psi = csum.compensated_sum(kernel, axis=1)
    return csum.compensated_sum(csum.abs2(per_psi))


def psi_identity_census(ctx: PrimeContext) -> int:
    return ctx.q * comb.census_square_sum(ctx)


def verify_psi_identity(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    _require_p_gt3(ctx)
    rhs = psi_identity_rhs(ctx.p)
    census = psi_identity_census(ctx)
    fl = psi_identity_float(ctx)
    members = [_Member("character sum", fl, rhs), _Member("census", census, rhs, exact=True)]
    problems = _agree(fl, census, tol, rhs, "float/census")
    return _record(IdentityId.PSI_IDENTITY, ctx, members, tol, problems=problems)


def verify_l3_1_scount(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    _require_p_gt3(ctx)
    members, problems = [], []
    for N in range(1, ctx.p):
        direct = comb.s_set_direct(ctx, N)
        built = comb.s_set_constructed(ctx, N)
        if set(direct.members) != set(built.members):
            diff = len(set(direct.members) ^ set(built.members))
            problems.append(f"N={N}: constructed set differs in {diff} pairs")
        members.append(_Member(f"N={N}", direct.cardinality, comb.census_class_count(ctx, N), exact=True))
    return _record(IdentityId.L3_1_SCOUNT, ctx, members, tol, problems=problems)


def verify_u0_count(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL, cubic_guard: int = DEFAULT_CUBIC_GUARD):
    _require_p_gt3(ctx)
    if ctx.p > cubic_guard:
        return skipped(IdentityId.U0_COUNT, ctx.p, f"p > max cubic prime {cubic_guard}")
    try:
        count, problems = comb.u0_count(ctx), []
    except AssertionError as exc:
        count, problems = len(comb.u0_members(ctx)), [str(exc)]
    return _record(IdentityId.U0_COUNT, ctx, [_Member("", count, u0_rhs(ctx.p), exact=True)], tol, problems=problems)


def l4_1_rhs(ctx: PrimeContext, psi: DirichletCharacter, n: int, k: int):
    p = ctx.p
    weight = csum._chi(ctx, psi.j, -n * k * k)
    if psi.is_legendre:
        return weight * (p - 4)
    tau_sq = csum.gauss_table(ctx)[(psi.conj() ** 2).j, 1]
    return weight * tau_sq * (2 + csum._chi(ctx, psi.j, 4))


def verify_l4_1(
    ctx: PrimeContext, psi: DirichletCharacter | None = None, n: int = 1, k: int = 1, tol: Tolerance = DEFAULT_TOL
) -> VerificationRecord:
    _require_p_gt3(ctx)
    _check_coprime(ctx, n, k)
    if psi is not None:
        if psi.is_principal:
            raise ValueError("psi must be non-principal")
        principal = DirichletCharacter(ctx.p, 0)
        lhs = csum.psi_weighted_second_moment(ctx, principal, psi, n, k)
        members = [_Member(f"psi j={psi.j}", lhs, l4_1_rhs(ctx, psi, n, k))]
    else:
        pw = csum.psi_weighted_table(ctx, n, k)
        members = [
            _Member(f"psi j={j}", pw[0, j], l4_1_rhs(ctx, DirichletCharacter(ctx.p, j), n, k))
            for j in range(1, ctx.q)
        ]
    return _record(IdentityId.L4_1, ctx, members, tol, n=n, k=k)


def verify_c4_1(ctx: PrimeContext, n: int = 1, k: int = 1, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    _require_p_gt3(ctx)
    _check_coprime(ctx, n, k)
    pw = csum.psi_weighted_table(ctx, n, k)
    lhs = csum.compensated_sum(csum.abs2(pw[0, 1:]))
    return _record(IdentityId.C4_1, ctx, [_Member("", lhs, c4_1_rhs(ctx.p))], tol, n=n, k=k)


def l4_2_rhs_table(ctx: PrimeContext, n: int, k: int) -> np.ndarray:
    """RHS for every (chi, psi) pair, built without touching any m-sum.

    Rows and columns with a principal index are left as NaN.
    """
    p, q = ctx.p, ctx.q
    gauss = csum.gauss_table(ctx)
    table = character_table(ctx)
    taus = gauss[:, 1]
    jl = q // 2
    j = np.arange(q)
    pref = table[:, (n * k * k) % p] * taus * taus[(-j) % q] / p  # indexed by psi
    kernel = csum.psi_kernel_table(ctx)  # [psi, u]
    twisted = csum.conj_transform(ctx, kernel)  # [chi, psi]
    out = pref[None, :] * taus[(-2 * j) % q][None, :] * twisted
    leg_inner = comb.legendre_inner_from2(ctx).astype(np.longdouble)
    leg_col = -(p - 1) - csum.conj_transform(ctx, leg_inner)
    out[:, jl] = pref[jl] * leg_col
    out[0, :] = np.nan
    out[:, 0] = np.nan
    return out


def _l4_2_sample(q: int) -> list[tuple[int, int]]:
    jl = q // 2
    picks = [(1, jl), (1, 1), (q - 1, q - 1 if q - 1 != jl else 1)]
    return list(dict.fromkeys(picks))


def verify_l4_2(
    ctx: PrimeContext,
    chi: DirichletCharacter | None = None,
    psi: DirichletCharacter | None = None,
    n: int = 1,
    k: int = 1,
    tol: Tolerance = DEFAULT_TOL,
) -> VerificationRecord:
    """Psi-weighted second moment for non-principal chi and psi.

    Single pair: scalar LHS against the RHS. Whole family: bulk LHS for all
    pairs, plus the scalar route on a few fixed pairs as a route cross-check.
    """
    _require_p_gt3(ctx)
    _check_coprime(ctx, n, k)
    if (chi is None) != (psi is None):
        raise ValueError("give both chi and psi, or neither")
    rhs = l4_2_rhs_table(ctx, n, k)
    pw = csum.psi_weighted_table(ctx, n, k)
    if chi is not None:
        if chi.is_principal or psi.is_principal:
            raise ValueError("chi and psi must both be non-principal")
        lhs = csum.psi_weighted_second_moment(ctx, chi, psi, n, k)
        r = rhs[chi.j, psi.j]
        members = [_Member(f"chi j={chi.j}, psi j={psi.j}", lhs, r)]
        problems = _agree(lhs, pw[chi.j, psi.j], tol, r, "scalar/bulk")
    else:
        members = [
            _Member(f"chi j={a}, psi j={b}", pw[a, b], rhs[a, b]) for a in range(1, ctx.q) for b in range(1, ctx.q)
        ]
        problems = []
        for a, b in _l4_2_sample(ctx.q):
            scalar = csum.psi_weighted_second_moment(
                ctx, DirichletCharacter(ctx.p, a), DirichletCharacter(ctx.p, b), n, k
            )
            problems += _agree(scalar, pw[a, b], tol, rhs[a, b], f"scalar/bulk at ({a},{b})")
    return _record(IdentityId.L4_2, ctx, members, tol, n=n, k=k, problems=problems)


def verify_l4_3a(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    rhs = -legendre(ctx, -1)
    return _record(IdentityId.L4_3A, ctx, [_Member("", comb.reciprocal_legendre_sum(ctx), rhs, exact=True)], tol)


def reciprocal_double_sum_via_quadratics(ctx: PrimeContext) -> int:
    """The double sum rebuilt from complete quadratic-polynomial Legendre sums in u."""
    p = ctx.p
    total = 0
    for a in range(1, p):
        total += quad_legendre_sum(ctx, -(a + int(ctx.inv[a])) % p, 1)
    return total - (p - 1)  # drop the u = 0 terms, each (1|p) = 1


def verify_l4_3b(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    direct = comb.reciprocal_double_sum(ctx)
    members = [_Member("direct", direct, 2, exact=True), _Member("quadratics", reciprocal_double_sum_via_quadratics(ctx), 2, exact=True)]
    return _record(IdentityId.L4_3B, ctx, members, tol)


def quad_leg_table(ctx: PrimeContext) -> np.ndarray:
    """``Q[m, n]`` = sum over a of ((a^2 + m a + n) | p), all pairs at once."""
    p = ctx.p
    a = np.arange(p, dtype=np.int64)
    m = a[:, None, None]
    n = a[None, :, None]
    x = (a * a % p)[None, None, :] + (m * a[None, None, :]) % p + n
    return ctx.leg[x % p].sum(axis=2)


def verify_quad_leg(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    p = ctx.p
    got = quad_leg_table(ctx)
    members = [
        _Member(f"m={m}, n={n}", int(got[m, n]), quad_legendre_closed(ctx, m, n), exact=True)
        for m in range(p)
        for n in range(p)
    ]
    return _record(IdentityId.QUAD_LEG, ctx, members, tol)


def c4_2a_lhs(ctx: PrimeContext, n: int, k: int):
    pw = csum.psi_weighted_table(ctx, n, k)
    return csum.compensated_sum(csum.abs2(pw[1:, ctx.q // 2]))


def c4_2b_lhs(ctx: PrimeContext, n: int, k: int):
    pw = csum.psi_weighted_table(ctx, n, k)
    keep = [j for j in range(1, ctx.q) if j != ctx.q // 2]
    block = csum.abs2(pw[1:][:, keep])
    return csum.compensated_sum(csum.compensated_sum(block, axis=1))


def verify_c4_2a(ctx: PrimeContext, n: int = 1, k: int = 1, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    _require_p_gt3(ctx)
    _check_coprime(ctx, n, k)
    tl = comb.t_l(ctx)
    rhs = c4_2a_rhs(ctx.p, legendre(ctx, -1), tl)
    return _record(IdentityId.C4_2A, ctx, [_Member("", c4_2a_lhs(ctx, n, k), rhs)], tol, n=n, k=k, note=f"T_L={tl}")


def verify_c4_2b(
    ctx: PrimeContext,
    n: int = 1,
    k: int = 1,
    tol: Tolerance = DEFAULT_TOL,
    cubic_guard: int = DEFAULT_CUBIC_GUARD,
) -> VerificationRecord:
    _require_p_gt3(ctx)
    _check_coprime(ctx, n, k)
    t = exact_t(ctx, cubic_guard)
    tl = comb.t_l(ctx)
    rhs = c4_2b_rhs(ctx.p, legendre(ctx, -1), t, tl)
    return _record(
        IdentityId.C4_2B, ctx, [_Member("", c4_2b_lhs(ctx, n, k), rhs)], tol, n=n, k=k, note=f"T={t} T_L={tl}"
    )


def kloosterman_k4_lhs(ctx: PrimeContext, n: int):
    """Fourth moment over m of K(m, n, chi; p), one value per character."""
    kt = csum.kloosterman_table(ctx, n)
    w = csum.abs2(kt)
    return csum.compensated_sum(w * w, axis=1)


def verify_kloosterman_k4(
    ctx: PrimeContext, chi: DirichletCharacter | None = None, n: int = 1, tol: Tolerance = DEFAULT_TOL
) -> VerificationRecord:
    _check_coprime(ctx, n)
    p = ctx.p
    if chi is not None:
        acc = csum.ComplexAccumulator()
        for m in range(1, p):
            w = csum.abs2(csum.kloosterman(ctx, chi, m, n))
            acc.add(w * w)
        members = [_Member(f"j={chi.j}", acc.real, kloosterman_k4_rhs(p, chi))]
    else:
        lhs = kloosterman_k4_lhs(ctx, n)
        members = [_Member(f"j={j}", lhs[j], kloosterman_k4_rhs(p, DirichletCharacter(p, j))) for j in range(ctx.q)]
    return _record(IdentityId.ZHANG_K4, ctx, members, tol, n=n)


def verify_eq1_1(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    """Twist law for every character and every n coprime to p."""
    g = csum.gauss_table(ctx)
    table = character_table(ctx)
    q = ctx.q
    members = []
    for j in range(q):
        conj_row = table[(-j) % q]
        for n in range(1, ctx.p):
            members.append(_Member(f"j={j}, n={n}", g[j, n], conj_row[n] * g[j, 1]))
    return _record(IdentityId.EQ1_1, ctx, members, tol)


def verify_gauss_mag(ctx: PrimeContext, tol: Tolerance = DEFAULT_TOL) -> VerificationRecord:
    g = csum.gauss_table(ctx)
    root = np.sqrt(np.longdouble(ctx.p))
    members = [_Member(f"j={j}", np.sqrt(csum.abs2(g[j, 1])), root) for j in range(1, ctx.q)]
    return _record(IdentityId.GAUSS_MAG, ctx, members, tol)


# --- dispatch ----------------------------------------------------------------

Runner = Callable[..., VerificationRecord]


def _runner(ident: IdentityId) -> Runner:
    return {
        IdentityId.TH1: lambda c, n, k, tol, guard: verify_th1(c, n, k, tol),
        IdentityId.TH2: lambda c, n, k, tol, guard: verify_th2(c, n, k, tol, guard),
        IdentityId.T_DELTA: lambda c, n, k, tol, guard: verify_t_delta(c, tol, guard),
        IdentityId.PSI_IDENTITY: lambda c, n, k, tol, guard: verify_psi_identity(c, tol),
        IdentityId.TH2_1: lambda c, n, k, tol, guard: verify_th2_1(c, None, n, k, tol),
        IdentityId.L3_1_SCOUNT: lambda c, n, k, tol, guard: verify_l3_1_scount(c, tol),
        IdentityId.U0_COUNT: lambda c, n, k, tol, guard: verify_u0_count(c, tol, guard),
        IdentityId.L4_1: lambda c, n, k, tol, guard: verify_l4_1(c, None, n, k, tol),
        IdentityId.C4_1: lambda c, n, k, tol, guard: verify_c4_1(c, n, k, tol),
        IdentityId.L4_2: lambda c, n, k, tol, guard: verify_l4_2(c, None, None, n, k, tol),
        IdentityId.L4_3A: lambda c, n, k, tol, guard: verify_l4_3a(c, tol),
        IdentityId.L4_3B: lambda c, n, k, tol, guard: verify_l4_3b(c, tol),
        IdentityId.QUAD_LEG: lambda c, n, k, tol, guard: verify_quad_leg(c, tol),
        IdentityId.C4_2A: lambda c, n, k, tol, guard: verify_c4_2a(c, n, k, tol),
        IdentityId.C4_2B: lambda c, n, k, tol, guard: verify_c4_2b(c, n, k, tol, guard),
        IdentityId.ZHANG_K4: lambda c, n, k, tol, guard: verify_kloosterman_k4(c, None, n, tol),
        IdentityId.EQ1_1: lambda c, n, k, tol, guard: verify_eq1_1(c, tol),
        IdentityId.GAUSS_MAG: lambda c, n, k, tol, guard: verify_gauss_mag(c, tol),
    }[ident]


def run_identity(
    ident: IdentityId,
    ctx: PrimeContext,
    n: int = 1,
    k: int = 1,
    tol: Tolerance = DEFAULT_TOL,
    cubic_guard: int = DEFAULT_CUBIC_GUARD,
) -> VerificationRecord:
    """Run one verifier and stamp its wall time."""
    t0 = time.perf_counter()
    rec = _runner(ident)(ctx, n, k, tol, cubic_guard)
    rec.elapsed_ms = (time.perf_counter() - t0) * 1e3
    if ident == IdentityId.ZHANG_K4:
        rec.n = n
    return rec


def parse_identities(spec: str | Iterable[str]) -> list[IdentityId]:
    """``"all"`` or a comma-separated list of ids, returned in canonical order."""
    if isinstance(spec, str):
        if spec.strip().lower() == "all":
            return list(ALL_IDENTITIES)
        names = [s.strip() for s in spec.split(",") if s.strip()]
    else:
        names = list(spec)
    out = set()
    for name in names:
        try:
            out.add(IdentityId(name.upper()))
        except ValueError:
            raise ValueError(f"unknown identity id: {name}") from None
    if not out:
        raise ValueError("no identities selected")
    return sorted(out, key=ORDER.__getitem__)


def clear_caches() -> None:
    """Drop every memoised table (contexts, character tables, sums, counts)."""
    from charmean import characters, fp

    for mod in (fp, characters, csum, comb):
        for obj in vars(mod).values():
            if callable(getattr(obj, "cache_clear", None)):
                obj.cache_clear()
