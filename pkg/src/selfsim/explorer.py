"""Finite-level exploration of automaton groups.

Everything here works with the permutation a group element induces on the
words of one fixed length (a *level table*): entry ``i`` is the index of the
image of the ``i``-th word in lexicographic order.  Tables compose as
``(g h)[i] = h[g[i]]`` because elements act on the right.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidParameter, StateBudgetExceeded
from .mealy import (
    MealyMachine,
    StateWord,
    act_words,
    aleshin_machine,
    all_words,
    as_state_word,
    ex44_C,
    level_action,
    word_fixes_level,
)

DEFAULT_ORDER_BUDGET = 10**7
DEFAULT_RADIUS = 8


@dataclass
class LevelQuotient:
    """Image of the group generated by ``gens`` in the symmetric group of level ``level``."""

    level: int
    elements: list[np.ndarray]
    generator_images: dict[str, np.ndarray]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def contains(self, table: np.ndarray) -> bool:
        key = np.asarray(table, dtype=np.int64).tobytes()
        return any(e.tobytes() == key for e in self.elements)


def level_quotient(m: MealyMachine, gens: Sequence[StateWord | str], n: int,
                   budget: int = DEFAULT_ORDER_BUDGET) -> LevelQuotient:
    """Close the generators' level-``n`` tables under composition (BFS, FIFO, generator order)."""
    if n < 0:
        raise InvalidParameter("level must be nonnegative")
    gens = [as_state_word(g) for g in gens]
    images = {str(g): level_action(m, g, n) for g in gens}
    tables = list(images.values())
    start = np.arange(m.nsym**n, dtype=np.int64)
    seen = {start.tobytes()}
    elements = [start]
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for g in tables:
            nxt = g[cur]
            key = nxt.tobytes()
            if key not in seen:
                if len(seen) >= budget:
                    raise StateBudgetExceeded(f"level-{n} quotient has more than {budget} elements")
                seen.add(key)
                elements.append(nxt)
                queue.append(nxt)
    return LevelQuotient(n, elements, images)


def table_order(table: np.ndarray) -> int:
    """Order of a permutation given as an index table (lcm of cycle lengths)."""
    seen = np.zeros(len(table), dtype=bool)
    order = 1
    for i in range(len(table)):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = int(table[j])
                length += 1
            order = np.lcm(order, length)
    return int(order)


def cycle_notation(table: np.ndarray, alphabet: Sequence[str], n: int) -> str:
    """Disjoint cycles of a level table with words spelled out, fixed points omitted."""
    words = all_words(len(alphabet), n)
    sep = "" if all(len(a) == 1 for a in alphabet) else ","
    name = lambda i: sep.join(alphabet[int(c)] for c in words[i])  # noqa: E731
    seen = set()
    out = []
    for i in range(len(table)):
        if i in seen or int(table[i]) == i:
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(name(j))
            j = int(table[j])
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) if out else "()"


# ---------------------------------------------------------------------------
# uniform-continuity falsifier
# ---------------------------------------------------------------------------
def _lookup(images: Mapping, g: StateWord) -> StateWord:
    for key in (g, str(g)):
        if key in images:
            return as_state_word(images[key])
    raise KeyError(f"no image given for generator {g}")


def reduced_words(ngens: int, radius: int):
    """Freely reduced words over ``ngens`` generators and inverses, shortlex.

    Letters are pairs ``(index, +1 | -1)`` ordered ``g0, g0^-1, g1, g1^-1, ...``.
    """
    letters = [(i, e) for i in range(ngens) for e in (1, -1)]
    layer: list[tuple] = [()]
    yield ()
    for _ in range(radius):
        nxt = []
        for w in layer:
            for a in letters:
                if w and w[-1] == (a[0], -a[1]):
                    continue
                nxt.append(w + (a,))
        for w in nxt:
            yield w
        layer = nxt


def uc_falsify(m: MealyMachine, gens: Sequence[StateWord | str], endo_images: Mapping,
               n: int, mtarget: int, radius: int = DEFAULT_RADIUS) -> StateWord | None:
    """Search for ``w`` fixing level ``n`` whose image moves level ``mtarget``.

    Returns the first witness in shortlex order over the generators, spelled
    as a state word, or ``None``.  ``None`` only means nothing was found
    within ``radius``; it proves nothing about the inclusion.
    """
    gens = [as_state_word(g) for g in gens]
    imgs = [_lookup(endo_images, g) for g in gens]

    def tables(words, level):
        out = []
        for w in words:
            t = level_action(m, w, level)
            inv = np.empty_like(t)
            inv[t] = np.arange(len(t))
            out.append((t, inv))
        return out

    src = tables(gens, n)
    dst = tables(imgs, mtarget)
    id_src = np.arange(m.nsym**n, dtype=np.int64)
    id_dst = np.arange(m.nsym**mtarget, dtype=np.int64)
    letters = [(i, e) for i in range(len(gens)) for e in (1, -1)]
    layer = [((), id_src, id_dst)]
    for _ in range(radius):
        nxt = []
        for w, ts, td in layer:
            for gi, e in letters:
                if w and w[-1] == (gi, -e):
                    continue
                s_tab = src[gi][0 if e > 0 else 1]
                d_tab = dst[gi][0 if e > 0 else 1]
                item = (w + ((gi, e),), s_tab[ts], d_tab[td])
                nxt.append(item)
                if np.array_equal(item[1], id_src) and not np.array_equal(item[2], id_dst):
                    return _spell(item[0], gens)
        layer = nxt
    return None


def _spell(w, gens: Sequence[StateWord]) -> StateWord:
    out = StateWord(())
    for gi, e in w:
        out = out * (gens[gi] if e > 0 else gens[gi].inverse())
    return out


# ---------------------------------------------------------------------------
# scripted reports
# ---------------------------------------------------------------------------
FREENESS_CAVEAT = ("non-characteristic conclusion also needs the three generators to be free; "
                   "freeness is a known theorem and is not checked here")


@dataclass
class AleshinReport:
    p_cycle: str
    q_cycle: str
    r_cycle: str
    pq_in_stab2: bool
    rpq_in_stab2: bool
    caveat: str = FREENESS_CAVEAT

    expected = {
        "p_cycle": "(00 10 01 11)",
        "q_cycle": "(00 11 01 10)",
        "r_cycle": "(00 01)(10 11)",
        "pq_in_stab2": True,
        "rpq_in_stab2": False,
    }

    def checks(self) -> dict[str, bool]:
        return {key: getattr(self, key) == val for key, val in self.expected.items()}

    @property
    def ok(self) -> bool:
        return all(self.checks().values())

    def lines(self) -> list[str]:
        out = [f"{key}: {getattr(self, key)}" for key in self.expected]
        out.append(f"caveat: {self.caveat}")
        return out


def aleshin_stab2_report() -> AleshinReport:
    m = aleshin_machine()
    cyc = {q: cycle_notation(level_action(m, q, 2), m.alphabet, 2) for q in m.states}
    return AleshinReport(
        p_cycle=cyc["p"],
        q_cycle=cyc["q"],
        r_cycle=cyc["r"],
        pq_in_stab2=word_fixes_level(m, "p,q", 2),
        rpq_in_stab2=word_fixes_level(m, "r,p,q", 2),
    )


@dataclass
class Ex44Report:
    nmax: int
    rows: list[tuple[int, bool, bool]] = field(default_factory=list)
    commute_words: int = 0
    commute_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.commute_ok and all(pf and not rf for _, pf, rf in self.rows)

    def lines(self) -> list[str]:
        out = [f"n={n}: p^{2**n} fixes level {n}: {str(pf).lower()}; "
               f"r^{2**n} fixes level 1: {str(rf).lower()}" for n, pf, rf in self.rows]
        out.append(f"p,r commute on {self.commute_words} words up to length 5: "
                   f"{str(self.commute_ok).lower()}")
        return out


def ex44_report(nmax: int, commute_length: int = 5) -> Ex44Report:
    """Level checks on the product machine: powers ``p^(2^n)`` fix level ``n``, ``r^(2^n)`` never fixes level 1."""
    if nmax < 1:
        raise InvalidParameter("nmax must be at least 1")
    C = ex44_C()
    rep = Ex44Report(nmax)
    for n in range(1, nmax + 1):
        pw = StateWord.of(f"p^{2**n}")
        rw = StateWord.of(f"r^{2**n}")
        rep.rows.append((n, word_fixes_level(C, pw, n), word_fixes_level(C, rw, 1)))
    for length in range(commute_length + 1):
        words = all_words(C.nsym, length)
        a = act_words(C, "p,r", words)
        b = act_words(C, "r,p", words)
        rep.commute_words += len(words)
        rep.commute_ok &= bool(np.array_equal(a, b))
    return rep
