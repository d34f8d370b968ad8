from __future__ import annotations

import itertools

import numpy as np
import pytest

from selfsim.errors import InvalidParameter, StateBudgetExceeded
from selfsim.explorer import (
    aleshin_stab2_report,
    cycle_notation,
    ex44_report,
    level_quotient,
    reduced_words,
    table_order,
    uc_falsify,
)
from selfsim.lamp import core
from selfsim.mealy import (
    StateWord,
    adding_machine,
    aleshin_machine,
    cayley_machine,
    ex44_C,
    level_action,
    word_fixes_level,
)


def closure_by_products(m, gens, n, max_len=12):
    """All distinct level tables of products of generators and inverses up to ``max_len`` letters."""
    tables = []
    for g in gens:
        t = level_action(m, g, n)
        inv = np.empty_like(t)
        inv[t] = np.arange(len(t))
        tables += [t, inv]
    seen = {np.arange(m.nsym**n).tobytes()}
    frontier = [np.arange(m.nsym**n)]
    for _ in range(max_len):
        nxt = []
        for cur in frontier:
            for t in tables:
                new = t[cur]
                if new.tobytes() not in seen:
                    seen.add(new.tobytes())
                    nxt.append(new)
        frontier = nxt
    return len(seen)


def test_adding_quotients():
    m = adding_machine()
    assert level_quotient(m, ["p"], 3).order == 8
    for n in range(1, 8):
        assert level_quotient(m, ["p"], n).order == 2**n


def test_level_zero_is_trivial():
    for m in (adding_machine(), aleshin_machine(), ex44_C()):
        assert level_quotient(m, list(m.states), 0).order == 1


@pytest.mark.parametrize("n", (1, 2, 3))
def test_quotient_matches_inverse_closed_search(n):
    m = aleshin_machine()
    q = level_quotient(m, list(m.states), n)
    assert q.order == closure_by_products(m, list(m.states), n)


@pytest.mark.parametrize("k,n", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (4, 2)])
def test_cayley_quotient_matches_series_count(k, n):
    m = cayley_machine(k)
    assert level_quotient(m, list(m.states), n).order == core.fixed_level_count(k, n)


def test_quotient_budget():
    with pytest.raises(StateBudgetExceeded):
        level_quotient(aleshin_machine(), ["p", "q", "r"], 3, budget=10)
    with pytest.raises(InvalidParameter):
        level_quotient(adding_machine(), ["p"], -1)


def test_quotient_contains_generators():
    m = aleshin_machine()
    q = level_quotient(m, ["p", "q"], 2)
    assert q.contains(level_action(m, "p,q^-1", 2))
    assert set(q.generator_images) == {"p", "q"}


def test_table_helpers():
    m = aleshin_machine()
    assert table_order(level_action(m, "p", 2)) == 4
    assert cycle_notation(level_action(m, "r", 2), m.alphabet, 2) == "(00 01)(10 11)"
    assert cycle_notation(np.arange(4), m.alphabet, 2) == "()"


def test_reduced_words_shortlex():
    words = list(reduced_words(2, 2))
    assert words[0] == ()
    assert len(words) == 1 + 4 + 12
    assert all(not any(a == (b[0], -b[1]) for a, b in zip(w, w[1:])) for w in words)


def test_falsifier_example():
    w = uc_falsify(ex44_C(), ["p", "r"], {"p": "r", "r": "p"}, 1, 1, 4)
    assert w == StateWord.parse("p^2")
    C = ex44_C()
    assert word_fixes_level(C, "p^2", 1) and not word_fixes_level(C, "r^2", 1)


def test_falsifier_identity_map_finds_nothing():
    m = aleshin_machine()
    gens = ["p", "q", "r"]
    assert uc_falsify(m, gens, {g: g for g in gens}, 2, 2, 4) is None


def test_falsifier_inner_automorphism_finds_nothing():
    m = adding_machine()
    images = {"p": "p-1,p,p"}  # conjugation by p fixes p
    assert uc_falsify(m, ["p"], images, 2, 2, 4) is None
    aleshin = aleshin_machine()
    conj = {g: f"p-1,{g},p" for g in "pqr"}
    assert uc_falsify(aleshin, list("pqr"), conj, 2, 2, 4) is None


def test_falsifier_result_is_shortlex_minimal():
    # brute force over the same letter order confirms no shorter witness exists
    C = ex44_C()
    letters = [("p", 1), ("p", -1), ("r", 1), ("r", -1)]
    swap = {"p": "r", "r": "p"}
    for length in range(1, 2):
        for combo in itertools.product(letters, repeat=length):
            w = StateWord(combo)
            img = StateWord(tuple((swap[s], e) for s, e in combo))
            assert not (word_fixes_level(C, w, 1) and not word_fixes_level(C, img, 1))


def test_aleshin_report():
    rep = aleshin_stab2_report()
    assert rep.ok
    assert rep.p_cycle == "(00 10 01 11)"
    assert rep.q_cycle == "(00 11 01 10)"
    assert rep.r_cycle == "(00 01)(10 11)"
    assert rep.pq_in_stab2 and not rep.rpq_in_stab2
    assert any("freeness" in line for line in rep.lines())


def test_ex44_report():
    rep = ex44_report(4)
    assert rep.ok
    assert rep.rows[1] == (2, True, False)
    assert rep.commute_words == sum(5**n for n in range(6))
    with pytest.raises(InvalidParameter):
        ex44_report(0)
