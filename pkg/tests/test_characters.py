import math
from collections import Counter

import numpy as np
import pytest

import oracles
from charmean.characters import (
    DirichletCharacter,
    char_eval,
    char_parity,
    character,
    character_table,
    enumerate_characters,
)
from charmean.fp import build_context, legendre

from conftest import SWEEP_PRIMES


def test_p5_group():
    chars = enumerate_characters(build_context(5))
    assert len(chars) == 4
    assert sum(c.is_principal for c in chars) == 1
    assert sum(c.is_legendre for c in chars) == 1
    assert sum(not c.is_real for c in chars) == 2


def test_p7_orders():
    chars = enumerate_characters(build_context(7))
    assert sorted(c.order for c in chars) == [1, 2, 3, 3, 6, 6]


@pytest.mark.parametrize("p", SWEEP_PRIMES)
def test_legendre_character_matches_symbol(p):
    ctx = build_context(p)
    chi = enumerate_characters(ctx)[(p - 1) // 2]
    assert chi.is_legendre and chi.order == 2
    for a in range(p):
        v = char_eval(ctx, chi, a)
        assert v.imag == 0
        assert v.real == legendre(ctx, a)


def test_char_eval_examples():
    ctx5 = build_context(5)
    assert char_eval(ctx5, character(ctx5, 1), 2) == pytest.approx(1j, abs=1e-15)
    ctx7 = build_context(7)
    for j in range(6):
        assert char_eval(ctx7, character(ctx7, j), 7) == 0
        assert char_eval(ctx7, character(ctx7, j), 0) == 0
    for a in range(1, 7):
        assert char_eval(ctx7, character(ctx7, 0), a) == 1


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_char_eval_against_cmath_oracle(p):
    ctx = build_context(p)
    for j in range(p - 1):
        for a in range(-p, 2 * p):
            assert abs(char_eval(ctx, character(ctx, j), a) - oracles.chi(p, j, a)) < 1e-13


@pytest.mark.parametrize("p, j, expected", [(7, 0, 1), (7, 3, -1), (5, 2, 1), (5, 1, -1)])
def test_parity(p, j, expected):
    ctx = build_context(p)
    chi = character(ctx, j)
    assert char_parity(chi) == expected
    assert round(char_eval(ctx, chi, p - 1).real) == expected


@pytest.mark.parametrize("p", SWEEP_PRIMES)
def test_parity_matches_value_at_minus_one(p):
    ctx = build_context(p)
    for chi in enumerate_characters(ctx):
        assert abs(char_eval(ctx, chi, -1) - chi.parity) < 1e-15


@pytest.mark.parametrize("p", SWEEP_PRIMES)
def test_orthogonality(p):
    table = character_table(build_context(p))
    col_sums = table.sum(axis=0)
    assert col_sums[1] == p - 1
    others = np.abs(col_sums[2:]).astype(float)
    assert others.max() < 1e-12
    assert col_sums[0] == 0


@pytest.mark.parametrize("p", SWEEP_PRIMES)
def test_values_on_unit_circle(p):
    table = character_table(build_context(p))
    mags = np.abs(table[:, 1:]).astype(float)
    assert np.all(np.abs(mags - 1) < 1e-12)
    assert np.all(table[:, 0] == 0)


@pytest.mark.parametrize("p", [5, 7, 11, 23])
def test_multiplicative(p):
    ctx = build_context(p)
    for chi in enumerate_characters(ctx):
        for a in range(1, p):
            for b in range(1, p):
                lhs = char_eval(ctx, chi, a * b)
                assert abs(lhs - char_eval(ctx, chi, a) * char_eval(ctx, chi, b)) < 1e-12


def test_conjugate_and_group_ops():
    ctx = build_context(11)
    chi = character(ctx, 3)
    assert chi.conj().j == 7
    assert character(ctx, 0).conj().j == 0
    for a in range(1, 11):
        assert abs(char_eval(ctx, chi.conj(), a) - np.conj(char_eval(ctx, chi, a))) < 1e-14
    assert (chi * chi.conj()).is_principal
    assert (chi**2).j == 6
    assert Counter(c.order for c in enumerate_characters(ctx)) == {1: 1, 2: 1, 5: 4, 10: 4}


def test_conjugation_reindexing_preserves_moments():
    ctx = build_context(13)
    table = character_table(ctx)
    f = np.array([math.sin(a) for a in range(13)])
    direct = np.abs(table @ f) ** 2
    conj_order = [(-j) % 12 for j in range(12)]
    assert abs(float(direct.sum() - direct[conj_order].sum())) < 1e-9


def test_invalid_index():
    with pytest.raises(ValueError):
        DirichletCharacter(7, 6)
