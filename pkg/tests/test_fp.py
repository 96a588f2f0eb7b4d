import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from charmean.fp import (
    UnsupportedModulus,
    build_context,
    euler_criterion,
    is_prime,
    legendre,
    mod_inv,
    primes_in_range,
    quad_legendre_closed,
    quad_legendre_sum,
)

from conftest import SWEEP_PRIMES

primes = st.sampled_from(SWEEP_PRIMES)


@pytest.mark.parametrize("p, g", [(5, 2), (7, 3)])
def test_smallest_primitive_root(p, g):
    assert build_context(p).g == g
    assert oracles.prim_root(p) == g


@pytest.mark.parametrize("bad", [9, 3, 4, 2, 1, 0, -7, 15, 91])
def test_unsupported_modulus(bad):
    with pytest.raises(UnsupportedModulus, match="unsupported modulus"):
        build_context(bad)


@pytest.mark.parametrize("p", SWEEP_PRIMES)
def test_context_invariants(p):
    ctx = build_context(p)
    g = ctx.g
    assert pow(g, p - 1, p) == 1
    assert all(pow(g, t, p) != 1 for t in range(1, p - 1))
    assert g == oracles.prim_root(p)
    for a in range(1, p):
        assert pow(g, int(ctx.index[a]), p) == a
    assert ctx.index[0] == p
    assert ctx.inv[0] == 0
    assert all(ctx.inv[ctx.inv[a]] == a for a in range(p))


def test_tables_are_read_only():
    ctx = build_context(7)
    with pytest.raises(ValueError):
        ctx.inv[1] = 3


def test_index_of_zero_is_a_defect():
    with pytest.raises(AssertionError):
        build_context(7).ind(0)


@pytest.mark.parametrize("p, a, expected", [(7, 3, 5), (5, 2, 3), (7, 0, 0)])
def test_mod_inv_examples(p, a, expected):
    assert mod_inv(build_context(p), a) == expected


@given(primes, st.integers(min_value=1, max_value=10**6))
def test_mod_inv_roundtrip(p, a):
    ctx = build_context(p)
    a %= p
    if a:
        assert a * mod_inv(ctx, a) % p == 1
        assert mod_inv(ctx, mod_inv(ctx, a)) == a


@pytest.mark.parametrize("a, expected", [(2, 1), (0, 0), (3, -1), (14, 0), (-1, -1)])
def test_legendre_examples_p7(a, expected):
    assert legendre(build_context(7), a) == expected


@pytest.mark.parametrize("p", SWEEP_PRIMES)
def test_legendre_three_ways(p):
    ctx = build_context(p)
    for a in range(p):
        expected = euler_criterion(p, a)
        assert legendre(ctx, a) == expected
        if a:
            assert expected == (1 if ctx.index[a] % 2 == 0 else -1)
    values = [legendre(ctx, a) for a in range(1, p)]
    assert values.count(1) == values.count(-1) == (p - 1) // 2


def test_legendre_matches_square_enumeration():
    for p in (5, 7, 11, 13, 17):
        ctx = build_context(p)
        assert [legendre(ctx, a) for a in range(p)] == [oracles.leg(p, a) for a in range(p)]


@given(primes, st.integers(), st.integers())
def test_legendre_multiplicative(p, a, b):
    ctx = build_context(p)
    assert legendre(ctx, a * b) == legendre(ctx, a) * legendre(ctx, b)


@pytest.mark.parametrize("p, m, n, expected", [(5, 0, 0, 4), (5, 1, 1, -1), (7, 2, 1, 6)])
def test_quad_legendre_examples(p, m, n, expected):
    ctx = build_context(p)
    assert quad_legendre_sum(ctx, m, n) == expected
    assert quad_legendre_closed(ctx, m, n) == expected


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_quad_legendre_against_brute_force(p):
    ctx = build_context(p)
    for m in range(p):
        for n in range(p):
            brute = sum(oracles.leg(p, a * a + m * a + n) for a in range(p))
            assert quad_legendre_sum(ctx, m, n) == brute == quad_legendre_closed(ctx, m, n)


def test_primes_in_range():
    assert primes_in_range(1, 30) == [5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_in_range(4, 4) == []
    assert is_prime(97) and not is_prime(91)
