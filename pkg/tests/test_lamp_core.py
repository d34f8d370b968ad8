from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfsim.errors import InvalidModulus, ModulusMismatch, ParseError, SymbolOutOfRange
from selfsim.explorer import level_quotient
from selfsim.lamp import core
from selfsim.lamp.core import (
    INF,
    LampElement,
    TruncSeries,
    ZkLaurent,
    act_series,
    act_word,
    act_word_batch,
    alpha,
    beta,
    depth_distance_lamp,
    elem_order,
    format_element,
    from_word,
    identity,
    inv,
    is_torsion,
    mul,
    power,
    stab_length,
    xi,
)
from selfsim.mealy import act_words, all_words, cayley_machine

MODULI = (2, 3, 4, 5, 6)


def random_element(k, rng, length=8):
    return core.letters_to_element(k, core.random_word(int(rng.integers(0, length + 1)), rng))


def elements(k_values=MODULI, length=8):
    return st.builds(lambda k, seed: random_element(k, np.random.default_rng(seed), length),
                     st.sampled_from(k_values), st.integers(0, 2**32 - 1))


def brute_stab_length(x, cap=9):
    """Largest L <= cap such that x fixes every word of length L, by exhaustive action."""
    k = x.modulus
    for L in range(1, cap + 1):
        words = all_words(k, L)
        if not np.array_equal(act_word_batch(x, words), words):
            return L - 1
    return cap


def brute_order(x, cap=200):
    y = identity(x.modulus)
    for n in range(1, cap + 1):
        y = mul(y, x)
        if y.is_identity:
            return n
    return INF


# ---------------------------------------------------------------------------
# Laurent data
# ---------------------------------------------------------------------------
def test_laurent_canonical_form():
    f = ZkLaurent.of(4, {0: 5, 1: 4, -2: -1})
    assert f.as_dict() == {-2: 3, 0: 1}
    assert str(f) == "{-2:3,0:1}"
    assert not ZkLaurent.zero(3)
    assert (f - f) == ZkLaurent.zero(4)
    assert ZkLaurent.of(2, {0: 1, 1: 1}) * ZkLaurent.of(2, {0: 1, 1: 1}) == ZkLaurent.of(2, {0: 1, 2: 1})
    with pytest.raises(InvalidModulus):
        ZkLaurent.of(1, {})
    with pytest.raises(ModulusMismatch):
        f + ZkLaurent.zero(3)


def test_one_minus_t_power_binomials():
    # (1-t)^-n has coefficient C(n+j-1, j); (1-t)^n has (-1)^j C(n, j)
    for k in (2, 6, 9):
        for n in (1, 2, 5):
            assert core.one_minus_t_power(-n, k, 8) == tuple(math.comb(n + j - 1, j) % k for j in range(8))
            assert core.one_minus_t_power(n, k, 8) == tuple((-1) ** j * math.comb(n, j) % k for j in range(8))


# ---------------------------------------------------------------------------
# constructors and multiplication
# ---------------------------------------------------------------------------
def test_constructor_examples():
    assert alpha(2) == beta(2, 0)
    x = from_word(2, "αξαξ⁻¹")
    assert x.beta.as_dict() == {0: 1, 1: 1} and x.shift == 0
    for k in (2, 3, 7):
        assert from_word(k, "a" * k).is_identity
    with pytest.raises(InvalidModulus):
        alpha(1)


def test_multiplication_examples():
    assert mul(beta(2, 3), beta(2, 3)).is_identity
    y = mul(xi(2), alpha(2))
    assert y.beta.as_dict() == {1: 1} and y.shift == 1
    z = from_word(3, "a x")
    assert mul(inv(z), z).is_identity
    with pytest.raises(ModulusMismatch):
        mul(alpha(2), alpha(3))


def test_conjugation_moves_beta():
    for k in (2, 5):
        for m in range(-3, 4):
            assert mul(mul(xi(k), beta(k, m)), inv(xi(k))) == beta(k, m + 1)


@settings(max_examples=100, deadline=None)
@given(elements(), st.integers(0, 2**32 - 1))
def test_group_axioms(x, seed):
    rng = np.random.default_rng(seed)
    k = x.modulus
    y, z = random_element(k, rng), random_element(k, rng)
    assert mul(mul(x, y), z) == mul(x, mul(y, z))
    assert mul(x, identity(k)) == x == mul(identity(k), x)
    assert mul(x, inv(x)).is_identity
    assert power(x, -3) == inv(power(x, 3))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(MODULI), st.integers(0, 2**32 - 1))
def test_normal_form_uniqueness(k, seed):
    # insert cancelling pairs and swap commuting lamp letters: the normal form must not change
    rng = np.random.default_rng(seed)
    letters = core.random_word(int(rng.integers(0, 9)), rng)
    x = core.letters_to_element(k, letters)
    noisy = list(letters)
    for _ in range(3):
        pos = int(rng.integers(0, len(noisy) + 1))
        pair = [["a", "a-1"], ["a-1", "a"], ["x", "x-1"], ["x-1", "x"]][int(rng.integers(0, 4))]
        noisy[pos:pos] = pair
    assert core.letters_to_element(k, noisy) == x
    m1, m2 = (int(v) for v in rng.integers(-4, 5, size=2))
    assert mul(beta(k, m1), beta(k, m2)) == mul(beta(k, m2), beta(k, m1))


def test_syntax_round_trip():
    x = from_word(6, "b(-2)^5 x^3 a")
    assert format_element(x) == "b(-2)^5 b(3)^1 x^3"
    assert from_word(6, format_element(x)) == x
    assert format_element(identity(4)) == "1"
    assert from_word(4, "1").is_identity
    with pytest.raises(ParseError):
        from_word(4, "a y")


# ---------------------------------------------------------------------------
# action
# ---------------------------------------------------------------------------
def test_series_action_examples():
    X = TruncSeries.zero(2, 2)
    assert act_series(identity(2), X) == X
    assert act_series(mul(alpha(2), xi(2)), X).coeffs == (1, 1)
    assert act_series(beta(2, 1), TruncSeries.zero(2, 3)).coeffs == (1, 1, 0)


def test_word_action_examples():
    assert act_word(xi(2), "110") == "100"
    assert act_word(xi(2), "110") == "".join(map(str, act_words(cayley_machine(2), "0", np.array([[1, 1, 0]]))[0]))
    assert act_word(identity(5), "0413") == "0413"
    assert act_word(alpha(3), "012") == "112"
    with pytest.raises(SymbolOutOfRange):
        act_word(alpha(3), "013")


def test_beta_acts_near_root():
    # right action: beta_m adds (1-t)^m, whose constant term is 1 for every m >= 0
    for m in range(6):
        assert act_word(beta(2, m), "0")[0] == "1"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(MODULI), st.integers(0, 2**32 - 1))
def test_series_action_is_right_action(k, seed):
    rng = np.random.default_rng(seed)
    x, y = random_element(k, rng), random_element(k, rng)
    X = TruncSeries.of(k, rng.integers(0, k, size=10))
    assert act_series(mul(x, y), X) == act_series(y, act_series(x, X))


@pytest.mark.parametrize("k", MODULI)
def test_oracle_against_cayley_machine(k):
    rng = np.random.default_rng(1000 + k)
    m = cayley_machine(k)
    levels = [all_words(k, L) for L in range(6)]
    for _ in range(40):
        letters = core.random_word(int(rng.integers(0, 11)), rng)
        x = core.letters_to_element(k, letters)
        sw = core.cayley_state_word(letters)
        for lv in levels:
            assert np.array_equal(act_word_batch(x, lv), act_words(m, sw, lv))


def test_affine_batch_large_modulus():
    # coefficients near 2^40 overflow int64 products; the action must stay exact
    k = 2**40 + 15
    x = from_word(k, "a x^3 a^5 x-1")
    w = [k - 1, 3, k - 7, 11]
    X = TruncSeries.of(k, w)
    assert act_word(x, w) == list(act_series(x, X).coeffs)


# ---------------------------------------------------------------------------
# stabilizer depth and order
# ---------------------------------------------------------------------------
def test_stab_length_examples():
    assert stab_length(identity(3)) == INF
    assert stab_length(power(xi(2), 2)) == 2
    assert stab_length(from_word(2, "αξαξ⁻¹")) == 1


@settings(max_examples=80, deadline=None)
@given(elements((2, 3, 4)))
def test_stab_length_matches_exhaustive_action(x):
    cap = 8 if x.modulus == 2 else 5
    expected = brute_stab_length(x, cap)
    got = stab_length(x)
    assert min(got, cap) == expected


@pytest.mark.parametrize("k", (2, 3, 4, 6))
def test_stab_length_of_shift_powers(k):
    for n in range(1, 20):
        x = power(xi(k), n)
        assert min(stab_length(x), 5) == brute_stab_length(x, 5)


@settings(max_examples=80, deadline=None)
@given(elements(), st.integers(0, 2**32 - 1))
def test_stabilizers_are_subgroups(x, seed):
    y = random_element(x.modulus, np.random.default_rng(seed))
    assert stab_length(mul(x, y)) >= min(stab_length(x), stab_length(y))
    assert stab_length(inv(x)) == stab_length(x)


def test_depth_distance_examples():
    x = from_word(3, "a x a")
    assert depth_distance_lamp(x, x) == 0
    assert depth_distance_lamp(alpha(2), identity(2)) == Fraction(1, 2)
    assert depth_distance_lamp(power(xi(2), 2), identity(2)) == Fraction(1, 8)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(MODULI), st.integers(0, 2**32 - 1))
def test_depth_distance_ultrametric(k, seed):
    rng = np.random.default_rng(seed)
    # multiply by level stabilizers so that the three points are close to each other
    x = random_element(k, rng)
    y = mul(x, power(xi(k), k ** int(rng.integers(0, 3))))
    z = mul(y, core.product(k, [power(xi(k), k), random_element(k, rng, 2), power(xi(k), -k)]))
    assert depth_distance_lamp(x, z) <= max(depth_distance_lamp(x, y), depth_distance_lamp(y, z))


def test_order_examples():
    assert elem_order(power(beta(6, 2), 3)) == 2
    assert elem_order(xi(5)) == INF
    assert elem_order(identity(4)) == 1
    assert is_torsion(from_word(4, "x a x-1"))
    assert not is_torsion(from_word(4, "x a"))


@settings(max_examples=80, deadline=None)
@given(elements((2, 3, 4, 6, 12)))
def test_order_matches_repeated_multiplication(x):
    assert elem_order(x) == brute_order(x)


@pytest.mark.parametrize("k,n", [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2)])
def test_level_quotient_count_matches_bfs(k, n):
    m = cayley_machine(k)
    gens = list(m.states)
    assert level_quotient(m, gens, n).order == core.fixed_level_count(k, n)
