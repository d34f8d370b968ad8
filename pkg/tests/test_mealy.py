from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfsim.errors import MalformedMachine, NotInvertible, ParseError, StateBudgetExceeded, SymbolNotInAlphabet
from selfsim.mealy import (
    BUILDERS,
    MealyMachine,
    StateWord,
    act,
    act_words,
    adding_machine,
    aleshin_machine,
    all_words,
    cayley_machine,
    direct_product,
    dump_machine,
    ex44_A,
    ex44_B,
    ex44_C,
    invert_machine,
    is_invertible,
    level_action,
    level_images,
    parse_machine,
    to_dot,
    word_fixes_level,
    word_index,
    word_is_identity,
)


def simulate(rows, state, word):
    """Dictionary-driven transducer run, independent of the package tables."""
    out = []
    for a in word:
        state, b = rows[state][a]
        out.append(b)
    return "".join(out)


ADDING_ROWS = {"p": {"0": ("q", "1"), "1": ("p", "0")}, "q": {"0": ("q", "0"), "1": ("q", "1")}}


# ---------------------------------------------------------------------------
# invertibility and inversion
# ---------------------------------------------------------------------------
def test_builders_invertible():
    for name, build in BUILDERS.items():
        assert is_invertible(build()), name


def test_constant_output_not_invertible():
    m = MealyMachine.from_transitions("01", "q", {("q", "0"): ("q", "0"), ("q", "1"): ("q", "0")})
    assert not is_invertible(m)
    with pytest.raises(NotInvertible):
        invert_machine(m)


def test_cayley3_invertible():
    assert cayley_machine(3).invertible


def test_inverse_adding():
    m = adding_machine()
    inv = invert_machine(m)
    assert act(m, "p", "11") == "00"
    assert act(inv, "p", "00") == "11"


def test_inverse_identity_machine_is_itself():
    m = MealyMachine.from_transitions("01", "e", {("e", a): ("e", a) for a in "01"})
    assert invert_machine(m) == m


def test_inverse_cayley2():
    m = cayley_machine(2)
    w = act(invert_machine(m), "1", "10")
    assert act(m, "1", w) == "10"


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_inverse_round_trip_all_words(name):
    m = BUILDERS[name]()
    inv = invert_machine(m)
    words = all_words(m.nsym, 4)
    for q in m.states:
        assert np.array_equal(act_words(inv, q, act_words(m, q, words)), words)


# ---------------------------------------------------------------------------
# action
# ---------------------------------------------------------------------------
def test_act_examples():
    assert act(adding_machine(), "p", "11") == "00"
    assert act(ex44_A(), "p", "11") == "01"
    assert act(ex44_B(), "r", "4") == "2"


def test_act_matches_dictionary_simulation():
    m = adding_machine()
    for n in range(6):
        for w in itertools.product("01", repeat=n):
            w = "".join(w)
            assert act(m, "p", w) == simulate(ADDING_ROWS, "p", w)


def test_adding_machine_is_binary_increment():
    # least significant bit first
    m = adding_machine()
    n = 6
    for value in range(2**n):
        bits = "".join(str((value >> i) & 1) for i in range(n))
        out = act(m, "p", bits)
        assert sum(int(b) << i for i, b in enumerate(out)) == (value + 1) % 2**n


def test_act_composes_left_to_right():
    m = aleshin_machine()
    for w in ("0110", "111", "0"):
        assert act(m, "p,q", w) == act(m, "q", act(m, "p", w))
        assert act(m, "p^-1", act(m, "p", w)) == w


def test_act_rejects_foreign_symbol():
    with pytest.raises(SymbolNotInAlphabet):
        act(adding_machine(), "p", "012")


def test_act_batch_matches_act():
    m = ex44_C()
    words = all_words(m.nsym, 3)
    batch = act_words(m, "p,r^-1,s", words)
    for row, img in zip(words, batch):
        assert m.decode(img) == act(m, "p,r^-1,s", m.decode(row))


def test_word_index_is_lexicographic():
    words = all_words(3, 3)
    assert np.array_equal(word_index(words, 3), np.arange(27))
    assert list(words[5]) == [0, 1, 2]


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_level_images_match_batch_action(name):
    m = BUILDERS[name]()
    sw = f"{m.states[0]},{m.states[-1]}^-1,{m.states[0]}^2"
    for n in range(5):
        assert np.array_equal(level_images(m, sw, n), act_words(m, sw, all_words(m.nsym, n)))


def test_level_action_is_permutation():
    m = aleshin_machine()
    tab = level_action(m, "p,q^-1,r", 5)
    assert sorted(tab.tolist()) == list(range(32))


# ---------------------------------------------------------------------------
# direct product
# ---------------------------------------------------------------------------
def test_direct_product_example():
    C = direct_product(ex44_A(), ex44_B()).machine
    assert C.alphabet == ("0", "1", "2", "3", "4")
    assert act(C, "p", "24") == "24"
    assert act(C, "r", "01") == "01"
    assert act(C, "p,r", "0240") == act(C, "r,p", "0240")
    assert C == ex44_C()


def test_direct_product_renames_collisions():
    m = adding_machine()
    prod = direct_product(m, m)
    assert prod.symbol_renaming == {"0": "0'", "1": "1'"}
    assert prod.state_renaming == {"p": "p'", "q": "q'"}
    C = prod.machine
    assert act(C, "p'", ["1'", "1'", "0"]) == ["0'", "0'", "0"]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("01234"), max_size=8), st.lists(st.sampled_from(["p", "q", "r", "s"]), max_size=4))
def test_product_states_commute_across_factors(word, sw):
    C = ex44_C()
    left = [q for q in sw if q in "pq"]
    right = [q for q in sw if q in "rs"]
    w = "".join(word)
    assert act(C, ",".join(left + right) or "", w) == act(C, ",".join(right + left) or "", w)


# ---------------------------------------------------------------------------
# word problem
# ---------------------------------------------------------------------------
def test_word_problem_examples():
    m = adding_machine()
    assert word_is_identity(m, "")
    assert word_is_identity(m, "p,p-1")
    assert not word_is_identity(m, "p,p")
    assert act(m, "p,p", "00") == "01"


def test_word_problem_aleshin_relators():
    m = aleshin_machine()
    assert word_is_identity(m, "p,q,r,r-1,q-1,p-1")
    assert not word_is_identity(m, "p,q")
    assert word_fixes_level(m, "p,q", 2)
    assert not word_fixes_level(m, "r,p,q", 2)


def test_word_problem_powers_of_adding_machine_never_identity():
    m = adding_machine()
    for n in range(1, 20):
        assert not word_is_identity(m, f"p^{n}")


def test_word_problem_budget():
    with pytest.raises(StateBudgetExceeded):
        word_is_identity(aleshin_machine(), "p,q,r,r-1,q-1,p-1", budget=2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("pqr"), st.sampled_from([1, -1])), max_size=6))
def test_word_problem_agrees_with_finite_levels(letters):
    # identity words fix every level; a word moving some level is not the identity
    m = aleshin_machine()
    w = StateWord(tuple(letters))
    fixes = all(word_fixes_level(m, w, n) for n in range(1, 9))
    if word_is_identity(m, w):
        assert fixes and np.array_equal(level_action(m, w, 8), np.arange(256))
    if not fixes:
        assert not word_is_identity(m, w)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("pqr"), st.sampled_from([1, -1])), max_size=6))
def test_word_times_inverse_is_identity(letters):
    w = StateWord(tuple(letters))
    assert word_is_identity(aleshin_machine(), w * w.inverse())


# ---------------------------------------------------------------------------
# state words
# ---------------------------------------------------------------------------
def test_state_word_syntax():
    assert StateWord.parse("p,p-1") == StateWord((("p", 1), ("p", -1)))
    assert StateWord.parse("p q^-1") == StateWord((("p", 1), ("q", -1)))
    assert StateWord.parse("p^3") == StateWord((("p", 1),) * 3)
    assert StateWord.parse("ε") == StateWord(())
    assert StateWord.parse("1") == StateWord((("1", 1),))
    assert str(StateWord.parse("p,p,q-1")) == "p^2,q^-1"
    assert str(StateWord(())) == "ε"
    assert StateWord.parse("p,q,q-1").reduced() == StateWord.parse("p")
    with pytest.raises(ParseError):
        StateWord.parse("p^")


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_text_round_trip(name):
    m = BUILDERS[name]()
    assert parse_machine(dump_machine(m)) == m


def test_parse_errors_carry_line_numbers():
    text = "alphabet 0 1\nstates p\ntrans p 0 p 1\ntrans p 2 p 0\n"
    with pytest.raises(ParseError, match="line 4"):
        parse_machine(text)
    with pytest.raises((ParseError, MalformedMachine)):
        parse_machine("alphabet 0 1\nstates p\ntrans p 0 p 1\n")


def test_dot_merges_parallel_edges():
    dot = to_dot(cayley_machine(2))
    assert dot.startswith("digraph")
    assert "0|1" in dot or "1|0" in dot
