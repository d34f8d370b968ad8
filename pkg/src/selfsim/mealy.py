"""Synchronous Mealy machines and the tree automorphisms their states define.

Conventions used throughout the package:

* automorphisms act on the right, so a state word ``[q1, q2]`` applies ``q1``
  first and ``q2`` second;
* the local permutation at a node is indexed by the *input* prefix;
* words over single-character alphabets may be given as plain strings, and
  results are returned in the same form as the input.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import (
    InvalidModulus,
    MalformedMachine,
    NotInvertible,
    ParseError,
    StateBudgetExceeded,
    SymbolNotInAlphabet,
)

DEFAULT_STATE_BUDGET = 10**6


@dataclass(frozen=True, eq=False)
class MealyMachine:
    """A finite synchronous transducer ``(alphabet, states, delta, lam)``.

    ``delta[(q, a)]`` is the next state and ``lam[(q, a)]`` the output symbol.
    Both mappings must be total on ``states x alphabet``.
    """

    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    delta: Mapping[tuple[str, str], str]
    lam: Mapping[tuple[str, str], str]
    sym_index: Mapping[str, int] = field(init=False, repr=False)
    state_index: Mapping[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        alphabet = tuple(str(a) for a in self.alphabet)
        states = tuple(str(q) for q in self.states)
        if not alphabet:
            raise MalformedMachine("alphabet must be nonempty")
        if not states:
            raise MalformedMachine("state set must be nonempty")
        if len(set(alphabet)) != len(alphabet):
            raise MalformedMachine("repeated alphabet symbol")
        if len(set(states)) != len(states):
            raise MalformedMachine("repeated state name")
        delta, lam = dict(self.delta), dict(self.lam)
        for q in states:
            for a in alphabet:
                if (q, a) not in delta or (q, a) not in lam:
                    raise MalformedMachine(f"transition ({q}, {a}) is undefined")
                if delta[(q, a)] not in states:
                    raise MalformedMachine(f"unknown target state {delta[(q, a)]!r}")
                if lam[(q, a)] not in alphabet:
                    raise MalformedMachine(f"unknown output symbol {lam[(q, a)]!r}")
        extra = (set(delta) | set(lam)) - set(itertools.product(states, alphabet))
        if extra:
            raise MalformedMachine(f"transitions outside states x alphabet: {sorted(extra)}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "delta", MappingProxyType(delta))
        object.__setattr__(self, "lam", MappingProxyType(lam))
        object.__setattr__(self, "sym_index", MappingProxyType({a: i for i, a in enumerate(alphabet)}))
        object.__setattr__(self, "state_index", MappingProxyType({q: i for i, q in enumerate(states)}))

    @classmethod
    def from_transitions(cls, alphabet: Iterable[str], states: Iterable[str],
                         transitions: Mapping[tuple[str, str], tuple[str, str]]) -> "MealyMachine":
        """Build from ``{(q, a): (q', b)}``, i.e. the edge ``q --a|b--> q'``."""
        delta = {key: val[0] for key, val in transitions.items()}
        lam = {key: val[1] for key, val in transitions.items()}
        return cls(tuple(alphabet), tuple(states), delta, lam)

    def __eq__(self, other):
        if not isinstance(other, MealyMachine):
            return NotImplemented
        return (self.alphabet == other.alphabet and self.states == other.states
                and dict(self.delta) == dict(other.delta) and dict(self.lam) == dict(other.lam))

    def __hash__(self):
        return hash((self.alphabet, self.states, tuple(sorted(self.delta.items())),
                     tuple(sorted(self.lam.items()))))

    @property
    def nsym(self) -> int:
        return len(self.alphabet)

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        n, a = len(self.states), len(self.alphabet)
        d = np.empty((n, a), dtype=np.int64)
        o = np.empty((n, a), dtype=np.int64)
        for (q, s), q2 in self.delta.items():
            d[self.state_index[q], self.sym_index[s]] = self.state_index[q2]
        for (q, s), b in self.lam.items():
            o[self.state_index[q], self.sym_index[s]] = self.sym_index[b]
        d.flags.writeable = False
        o.flags.writeable = False
        return d, o

    @cached_property
    def invertible(self) -> bool:
        _, o = self._tables
        return all(len(set(row.tolist())) == len(row) for row in o)

    @cached_property
    def combined_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Index tables covering the states and, when invertible, their inverses.

        Rows ``0..n-1`` are the states of this machine; rows ``n..2n-1`` (only
        present for invertible machines) are the states of the inverse machine.
        """
        d, o = self._tables
        if not self.invertible:
            return d, o
        n = len(self.states)
        inv = np.argsort(o, axis=1)
        d_inv = np.take_along_axis(d, inv, axis=1)
        d_all = np.ascontiguousarray(np.vstack([d, d_inv + n]))
        o_all = np.ascontiguousarray(np.vstack([o, inv]))
        d_all.flags.writeable = False
        o_all.flags.writeable = False
        return d_all, o_all

    # word encoding -------------------------------------------------------
    @property
    def single_char(self) -> bool:
        return all(len(a) == 1 for a in self.alphabet)

    def split(self, word: str | Sequence[str]) -> list[str]:
        if isinstance(word, str):
            if self.single_char:
                return list(word)
            return word.split()
        return [str(a) for a in word]

    def join(self, symbols: Sequence[str]) -> str:
        return ("" if self.single_char else " ").join(symbols)

    def encode(self, word: str | Sequence[str]) -> list[int]:
        out = []
        for a in self.split(word):
            try:
                out.append(self.sym_index[a])
            except KeyError:
                raise SymbolNotInAlphabet(f"symbol {a!r} not in alphabet {self.alphabet}") from None
        return out

    def decode(self, ids: Iterable[int]) -> str:
        return self.join([self.alphabet[int(i)] for i in ids])

    def output_permutation(self, q: str) -> tuple[str, ...]:
        return tuple(self.lam[(q, a)] for a in self.alphabet)


def is_invertible(m: MealyMachine) -> bool:
    """True iff every state's output map is a permutation of the alphabet."""
    return m.invertible


def invert_machine(m: MealyMachine) -> MealyMachine:
    """The machine whose state ``q`` realises the inverse of ``q`` in ``m``."""
    if not m.invertible:
        raise NotInvertible("machine has a state whose output map is not a permutation")
    delta, lam = {}, {}
    for q in m.states:
        preimage = {m.lam[(q, a)]: a for a in m.alphabet}
        for b in m.alphabet:
            a = preimage[b]
            delta[(q, b)] = m.delta[(q, a)]
            lam[(q, b)] = a
    return MealyMachine(m.alphabet, m.states, delta, lam)


# ---------------------------------------------------------------------------
# state words
# ---------------------------------------------------------------------------
_TOKEN = re.compile(r"^(?P<name>[^\s,^]+?)(?:\^(?P<exp>[+-]?\d+)|(?P<inv>-1|⁻¹))?$")


@dataclass(frozen=True)
class StateWord:
    """A group word over machine states; ``letters`` holds ``(state, +1 | -1)``."""

    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        letters = tuple((str(q), int(e)) for q, e in self.letters)
        for _, e in letters:
            if e not in (1, -1):
                raise ValueError("state word exponents must be +1 or -1")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def of(cls, *items: str | tuple[str, int]) -> "StateWord":
        """``StateWord.of("p", ("q", -1), "r^2")``."""
        letters: list[tuple[str, int]] = []
        for item in items:
            if isinstance(item, tuple):
                letters.append(item)
            else:
                letters.extend(cls.parse(item).letters)
        return cls(tuple(letters))

    @classmethod
    def parse(cls, text: str) -> "StateWord":
        """Parse ``"p,p-1"``, ``"p q^-1"``, ``"p^3"``; an empty string or ``"ε"`` is the identity.

        ``"1"`` is deliberately *not* an identity shorthand since Cayley
        machines use residues as state names.
        """
        text = text.strip()
        if text in ("", "ε"):
            return cls(())
        letters: list[tuple[str, int]] = []
        for tok in re.split(r"[\s,*]+", text):
            if not tok:
                continue
            mt = _TOKEN.match(tok)
            if mt is None:
                raise ParseError(f"bad state-word token {tok!r}")
            if mt["exp"] is not None:
                e = int(mt["exp"])
            elif mt["inv"] is not None:
                e = -1
            else:
                e = 1
            sign = 1 if e > 0 else -1
            letters.extend([(mt["name"], sign)] * abs(e))
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.letters)

    def __mul__(self, other: "StateWord") -> "StateWord":
        return StateWord(self.letters + other.letters)

    def __pow__(self, n: int) -> "StateWord":
        if n < 0:
            return self.inverse() ** (-n)
        return StateWord(self.letters * n)

    def inverse(self) -> "StateWord":
        return StateWord(tuple((q, -e) for q, e in reversed(self.letters)))

    def reduced(self) -> "StateWord":
        out: list[tuple[str, int]] = []
        for q, e in self.letters:
            if out and out[-1] == (q, -e):
                out.pop()
            else:
                out.append((q, e))
        return StateWord(tuple(out))

    def __str__(self) -> str:
        if not self.letters:
            return "ε"
        parts = []
        for (q, e), grp in itertools.groupby(self.letters):
            n = len(list(grp)) * e
            parts.append(q if n == 1 else f"{q}^{n}")
        return ",".join(parts)


def as_state_word(w0: StateWord | str | Sequence) -> StateWord:
    if isinstance(w0, StateWord):
        return w0
    if isinstance(w0, str):
        return StateWord.parse(w0)
    return StateWord.of(*w0)


def state_ids(m: MealyMachine, w0: StateWord | str | Sequence) -> np.ndarray:
    """Row indices of ``w0``'s letters in ``m.combined_tables``."""
    w0 = as_state_word(w0)
    n = len(m.states)
    ids = []
    for q, e in w0:
        if q not in m.state_index:
            raise MalformedMachine(f"unknown state {q!r}")
        if e < 0:
            if not m.invertible:
                raise NotInvertible(f"cannot invert state {q!r} of a non-invertible machine")
            ids.append(m.state_index[q] + n)
        else:
            ids.append(m.state_index[q])
    return np.asarray(ids, dtype=np.int64)


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------
def act(m: MealyMachine, w0: StateWord | str | Sequence, w: str | Sequence[str]):
    """Image of the word ``w`` under the automorphism named by ``w0``.

    This is a direct letter-by-letter simulation and serves as the reference
    for every faster route in the package.
    """
    ids = state_ids(m, w0)
    word = m.encode(w)
    d, o = m.combined_tables
    for q in ids.tolist():
        out = []
        for a in word:
            out.append(int(o[q, a]))
            q = int(d[q, a])
        word = out
    if isinstance(w, str):
        return m.decode(word)
    return [m.alphabet[i] for i in word]


def all_words(nsym: int, n: int) -> np.ndarray:
    """Every word of length ``n`` as rows, in lexicographic order (first letter most significant)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((nsym,) * n, dtype=np.int64).reshape(n, -1)
    return np.ascontiguousarray(grids.T)


def word_index(words: np.ndarray, nsym: int) -> np.ndarray:
    n = words.shape[1]
    weights = nsym ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return words @ weights


def act_words(m: MealyMachine, w0, words: np.ndarray) -> np.ndarray:
    """Batch version of :func:`act` on an integer array of shape ``(N, L)``."""
    d, o = m.combined_tables
    return kernels.act_batch(d, o, state_ids(m, w0), np.ascontiguousarray(words, dtype=np.int64))


def level_images(m: MealyMachine, w0, n: int) -> np.ndarray:
    """Images of ``all_words(m.nsym, n)``, row for row.

    Grows the tree one letter at a time, carrying the tuple of current states
    for each prefix, so every prefix is simulated once instead of once per
    word that extends it.
    """
    d, o = m.combined_tables
    ids = state_ids(m, w0)
    k = m.nsym
    d_flat = np.ascontiguousarray(d).ravel()
    o_flat = np.ascontiguousarray(o).ravel()
    # one row per letter of w0, one column per prefix
    states = ids[:, None].copy()
    images = np.zeros((n, 1), dtype=np.int64)
    letters = np.arange(k, dtype=np.int64)
    for level in range(n):
        nprefix = states.shape[1]
        states = np.repeat(states, k, axis=1)
        a = np.tile(letters, nprefix)
        for row in states:
            idx = row * k + a
            d_flat.take(idx, out=row)
            a = o_flat.take(idx)
        images = np.repeat(images, k, axis=1)
        images[level] = a
    return np.ascontiguousarray(images.T)


def level_action(m: MealyMachine, w0, n: int) -> np.ndarray:
    """The permutation induced on level ``n``: entry ``i`` is the index of the image of word ``i``."""
    return word_index(level_images(m, w0, n), m.nsym)


# ---------------------------------------------------------------------------
# word problem
# ---------------------------------------------------------------------------
def _explore(m: MealyMachine, w0, max_depth: int | None, budget: int) -> bool:
    d, o = m.combined_tables
    start = state_ids(m, w0)
    identity = np.arange(m.nsym, dtype=np.int64)
    seen = {start.tobytes()}
    queue = deque([(start, 0)])
    while queue:
        comp, depth = queue.popleft()
        if max_depth is not None and depth >= max_depth:
            continue
        out, nxt = kernels.composite_children(d, o, comp)
        if not np.array_equal(out, identity):
            return False
        for row in nxt:
            key = row.tobytes()
            if key not in seen:
                if len(seen) >= budget:
                    raise StateBudgetExceeded(f"more than {budget} composite states reachable")
                seen.add(key)
                queue.append((np.ascontiguousarray(row), depth + 1))
    return True


def word_is_identity(m: MealyMachine, w0, budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """Decide whether ``w0`` acts trivially on every finite word.

    Explores the composite states (tuples of states of ``m`` and of its
    inverse) reachable from ``w0``; the element is trivial iff each of them
    outputs the identity permutation.
    """
    return _explore(m, w0, None, budget)


def word_fixes_level(m: MealyMachine, w0, level: int, budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """Whether ``w0`` fixes every word of length ``level`` (hence all shorter ones)."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    return _explore(m, w0, level, budget)


# ---------------------------------------------------------------------------
# direct product
# ---------------------------------------------------------------------------
class Product(NamedTuple):
    machine: MealyMachine
    symbol_renaming: dict[str, str]
    state_renaming: dict[str, str]


def _fresh(name: str, taken: set[str]) -> str:
    cand = name + "'"
    while cand in taken:
        cand += "'"
    return cand


def direct_product(mA: MealyMachine, mB: MealyMachine) -> Product:
    """Machine on the union alphabet whose group is ``G(mA) x G(mB)``.

    States of ``mA`` act as the identity on the letters of ``mB`` without
    changing state, and symmetrically.  Symbols or state names of ``mB`` that
    collide with those of ``mA`` are suffixed with primes; the renamings are
    returned alongside the machine.
    """
    sym_ren: dict[str, str] = {}
    taken = set(mA.alphabet) | set(mB.alphabet)
    for b in mB.alphabet:
        if b in mA.alphabet:
            sym_ren[b] = _fresh(b, taken)
            taken.add(sym_ren[b])
    st_ren: dict[str, str] = {}
    taken = set(mA.states) | set(mB.states)
    for q in mB.states:
        if q in mA.states:
            st_ren[q] = _fresh(q, taken)
            taken.add(st_ren[q])
    bsym = lambda b: sym_ren.get(b, b)  # noqa: E731
    bst = lambda q: st_ren.get(q, q)  # noqa: E731

    alphabet = mA.alphabet + tuple(bsym(b) for b in mB.alphabet)
    states = mA.states + tuple(bst(q) for q in mB.states)
    delta, lam = {}, {}
    for q in mA.states:
        for a in mA.alphabet:
            delta[(q, a)] = mA.delta[(q, a)]
            lam[(q, a)] = mA.lam[(q, a)]
        for b in mB.alphabet:
            delta[(q, bsym(b))] = q
            lam[(q, bsym(b))] = bsym(b)
    for q in mB.states:
        for b in mB.alphabet:
            delta[(bst(q), bsym(b))] = bst(mB.delta[(q, b)])
            lam[(bst(q), bsym(b))] = bsym(mB.lam[(q, b)])
        for a in mA.alphabet:
            delta[(bst(q), a)] = bst(q)
            lam[(bst(q), a)] = a
    return Product(MealyMachine(alphabet, states, delta, lam), sym_ren, st_ren)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------
def _machine(alphabet, rows: dict[str, dict[str, tuple[str, str]]]) -> MealyMachine:
    trans = {(q, a): val for q, row in rows.items() for a, val in row.items()}
    return MealyMachine.from_transitions(alphabet, tuple(rows), trans)


def adding_machine() -> MealyMachine:
    """Binary odometer: ``p`` adds one to a word read least significant bit first."""
    return _machine("01", {
        "p": {"0": ("q", "1"), "1": ("p", "0")},
        "q": {"0": ("q", "0"), "1": ("q", "1")},
    })


def cayley_machine(k: int) -> MealyMachine:
    """Cayley machine of ``Z_k``: states and letters are residues, ``delta = lam = +``."""
    if k < 2:
        raise InvalidModulus(f"modulus must be at least 2, got {k}")
    res = [str(i) for i in range(k)]
    rows = {str(h): {str(x): (str((h + x) % k), str((h + x) % k)) for x in range(k)}
            for h in range(k)}
    return _machine(res, rows)


def aleshin_machine() -> MealyMachine:
    return _machine("01", {
        "p": {"0": ("r", "1"), "1": ("q", "0")},
        "q": {"0": ("q", "1"), "1": ("r", "0")},
        "r": {"0": ("p", "0"), "1": ("p", "1")},
    })


def ex44_A() -> MealyMachine:  # noqa: N802
    """Binary machine whose state ``p`` generates an infinite cyclic group."""
    return _machine("01", {
        "p": {"0": ("p", "1"), "1": ("q", "0")},
        "q": {"0": ("q", "0"), "1": ("q", "1")},
    })


def ex44_B() -> MealyMachine:  # noqa: N802
    """Ternary machine on ``{2, 3, 4}``; ``r`` cycles ``2 -> 3 -> 4`` on level one."""
    return _machine("234", {
        "r": {"2": ("r", "3"), "3": ("r", "4"), "4": ("s", "2")},
        "s": {"2": ("s", "2"), "3": ("s", "3"), "4": ("s", "4")},
    })


def ex44_C() -> MealyMachine:  # noqa: N802
    return direct_product(ex44_A(), ex44_B()).machine


BUILDERS = {
    "adding": adding_machine,
    "aleshin": aleshin_machine,
    "ex44a": ex44_A,
    "ex44b": ex44_B,
    "ex44c": ex44_C,
    "cayley2": lambda: cayley_machine(2),
    "cayley3": lambda: cayley_machine(3),
}


# ---------------------------------------------------------------------------
# text format and DOT export
# ---------------------------------------------------------------------------
def parse_machine(text: str) -> MealyMachine:
    """Parse the line format ``alphabet ...`` / ``states ...`` / ``trans q a q' b``."""
    alphabet = states = None
    delta: dict[tuple[str, str], str] = {}
    lam: dict[tuple[str, str], str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "alphabet":
            if alphabet is not None:
                raise ParseError("duplicate alphabet directive", lineno)
            alphabet = tuple(rest)
        elif head == "states":
            if states is not None:
                raise ParseError("duplicate states directive", lineno)
            states = tuple(rest)
        elif head == "trans":
            if alphabet is None or states is None:
                raise ParseError("trans before alphabet/states", lineno)
            if len(rest) != 4:
                raise ParseError("trans expects: <state> <sym> <state'> <sym'>", lineno)
            q, a, q2, b = rest
            if q not in states or q2 not in states:
                raise ParseError(f"unknown state in {line!r}", lineno)
            if a not in alphabet or b not in alphabet:
                raise ParseError(f"unknown symbol in {line!r}", lineno)
            if (q, a) in delta:
                raise ParseError(f"transition ({q}, {a}) defined twice", lineno)
            delta[(q, a)] = q2
            lam[(q, a)] = b
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if alphabet is None or states is None:
        raise ParseError("missing alphabet or states directive")
    for q in states:
        for a in alphabet:
            if (q, a) not in delta:
                raise ParseError(f"transition ({q}, {a}) missing")
    try:
        return MealyMachine(alphabet, states, delta, lam)
    except MalformedMachine as exc:
        raise ParseError(str(exc)) from None


def load_machine(path: str | Path) -> MealyMachine:
    return parse_machine(Path(path).read_text(encoding="utf-8"))


def dump_machine(m: MealyMachine) -> str:
    lines = ["alphabet " + " ".join(m.alphabet), "states " + " ".join(m.states)]
    for q in m.states:
        for a in m.alphabet:
            lines.append(f"trans {q} {a} {m.delta[(q, a)]} {m.lam[(q, a)]}")
    return "\n".join(lines) + "\n"


def to_dot(m: MealyMachine, name: str = "M") -> str:
    """Graphviz source; parallel edges are merged with labels ``a|b`` joined by commas."""
    edges: dict[tuple[str, str], list[str]] = {}
    for q in m.states:
        for a in m.alphabet:
            edges.setdefault((q, m.delta[(q, a)]), []).append(f"{a}|{m.lam[(q, a)]}")
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for q in m.states:
        lines.append(f'  "{q}";')
    for (q, q2), labels in edges.items():
        lines.append(f'  "{q}" -> "{q2}" [label="{",".join(labels)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
