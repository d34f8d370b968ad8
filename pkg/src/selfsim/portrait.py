"""Tree automorphisms truncated at a finite depth.

A portrait of depth ``D`` stores the local permutation at every node ``u``
with ``|u| < D`` and therefore pins down the action on all words of length at
most ``D``.  Level ``n`` is stored as an integer array of shape
``(|A|**n, |A|)`` whose row ``i`` is the local permutation at the ``i``-th
word of length ``n`` in lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    DepthMismatch,
    LevelTooDeep,
    NonBinaryAlphabet,
    ParseError,
    SymbolNotInAlphabet,
    WordTooLong,
)
from .mealy import MealyMachine, act_words, all_words, as_state_word


@dataclass(frozen=True)
class UpperBound:
    """Distance known only to be at most ``bound`` (the portraits agree through their depth)."""

    bound: Fraction

    def __str__(self) -> str:
        return f"<= {self.bound}"


class Portrait:
    def __init__(self, alphabet: Sequence[str], levels: Sequence[np.ndarray]):
        self.alphabet = tuple(str(a) for a in alphabet)
        k = len(self.alphabet)
        lv = []
        for n, arr in enumerate(levels):
            arr = np.array(arr, dtype=np.int64).reshape(k**n, k)
            if not np.array_equal(np.sort(arr, axis=1), np.broadcast_to(np.arange(k), arr.shape)):
                raise ValueError(f"level {n} contains a non-permutation")
            arr.flags.writeable = False
            lv.append(arr)
        self.depth = len(lv)
        self._levels = tuple(lv)

    # construction ------------------------------------------------------
    @classmethod
    def identity(cls, alphabet: Sequence[str], depth: int) -> "Portrait":
        k = len(alphabet)
        return cls(alphabet, [np.tile(np.arange(k), (k**n, 1)) for n in range(depth)])

    @classmethod
    def random(cls, alphabet: Sequence[str], depth: int, rng: np.random.Generator) -> "Portrait":
        k = len(alphabet)
        return cls(alphabet, [rng.permuted(np.tile(np.arange(k), (k**n, 1)), axis=1)
                              for n in range(depth)])

    @property
    def nsym(self) -> int:
        return len(self.alphabet)

    def level(self, n: int) -> np.ndarray:
        return self._levels[n]

    def _index(self, u: str | Sequence[str]) -> tuple[int, int]:
        if isinstance(u, str):
            syms = list(u) if all(len(a) == 1 for a in self.alphabet) else [a for a in u.split(",") if a]
        else:
            syms = list(u)
        idx = 0
        pos = {a: i for i, a in enumerate(self.alphabet)}
        for a in syms:
            if a not in pos:
                raise SymbolNotInAlphabet(f"symbol {a!r} not in alphabet {self.alphabet}")
            idx = idx * self.nsym + pos[a]
        return len(syms), idx

    def local(self, u: str | Sequence[str] = "") -> tuple[str, ...]:
        """Local permutation at node ``u`` as the tuple of images of the alphabet."""
        n, idx = self._index(u)
        if n >= self.depth:
            raise WordTooLong(f"node of length {n} is below the stored depth {self.depth}")
        return tuple(self.alphabet[i] for i in self._levels[n][idx])

    @cached_property
    def locals(self) -> dict[str, tuple[str, ...]]:
        """Every stored node (as a joined word) mapped to its local permutation."""
        out = {}
        for n in range(self.depth):
            for idx, word in enumerate(all_words(self.nsym, n)):
                out[self._join(word)] = tuple(self.alphabet[i] for i in self._levels[n][idx])
        return out

    def _join(self, ids) -> str:
        sep = "" if all(len(a) == 1 for a in self.alphabet) else ","
        return sep.join(self.alphabet[int(i)] for i in ids)

    # action ---------------------------------------------------------------
    @cached_property
    def _images(self) -> tuple[np.ndarray, ...]:
        k = self.nsym
        imgs = [np.zeros(1, dtype=np.int64)]
        for n in range(self.depth):
            prev = imgs[-1]
            nxt = (prev[:, None] * k + self._levels[n]).reshape(-1)
            imgs.append(nxt)
        for arr in imgs:
            arr.flags.writeable = False
        return tuple(imgs)

    def level_map(self, n: int) -> np.ndarray:
        """Permutation of level ``n`` (indices of words in lexicographic order)."""
        if n > self.depth:
            raise LevelTooDeep(f"level {n} exceeds depth {self.depth}")
        return self._images[n]

    def apply(self, w: str | Sequence[str]):
        n, idx = self._index(w)
        if n > self.depth:
            raise WordTooLong(f"word of length {n} is longer than the depth {self.depth}")
        img = int(self._images[n][idx])
        digits = []
        for _ in range(n):
            img, d = divmod(img, self.nsym)
            digits.append(d)
        digits.reverse()
        return self._join(digits) if isinstance(w, str) else [self.alphabet[d] for d in digits]

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Portrait):
            return NotImplemented
        return (self.alphabet == other.alphabet and self.depth == other.depth
                and all(np.array_equal(a, b) for a, b in zip(self._levels, other._levels)))

    def __hash__(self):
        return hash((self.alphabet, self.depth, b"".join(a.tobytes() for a in self._levels)))

    def __repr__(self):
        return f"Portrait(alphabet={self.alphabet}, depth={self.depth})"

    def __mul__(self, other: "Portrait") -> "Portrait":
        return compose(self, other)

    # serialization --------------------------------------------------------
    def to_text(self) -> str:
        """One line per node in length-lexicographic order: ``<word or -> <images>``.

        Multi-character symbols are separated by commas inside both fields.
        """
        lines = []
        for n in range(self.depth):
            for idx, word in enumerate(all_words(self.nsym, n)):
                label = self._join(word) if n else "-"
                lines.append(f"{label} {self._join(self._levels[n][idx])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, alphabet: Sequence[str]) -> "Portrait":
        alphabet = tuple(alphabet)
        k = len(alphabet)
        single = all(len(a) == 1 for a in alphabet)
        pos = {a: i for i, a in enumerate(alphabet)}
        rows = [ln.split(None, 1) for ln in text.splitlines() if ln.strip()]
        levels: list[list] = []
        expected = iter(_length_lex(k))
        for lineno, parts in enumerate(rows, 1):
            if len(parts) != 2:
                raise ParseError("expected '<node> <images>'", lineno)
            node, images = parts
            syms = [] if node == "-" else (list(node) if single else node.split(","))
            imgs = list(images.strip()) if single else images.strip().split(",")
            try:
                ids = tuple(pos[a] for a in syms)
                perm = [pos[a] for a in imgs]
            except KeyError as exc:
                raise ParseError(f"unknown symbol {exc.args[0]!r}", lineno) from None
            if ids != next(expected):
                raise ParseError("nodes must be listed in length-lexicographic order", lineno)
            if len(ids) == len(levels):
                levels.append([])
            levels[len(ids)].append(perm)
        for n, lv in enumerate(levels):
            if len(lv) != k**n:
                raise ParseError(f"level {n} is incomplete")
        try:
            return cls(alphabet, levels)
        except ValueError as exc:
            raise ParseError(str(exc)) from None


def _length_lex(k: int):
    n = 0
    while True:
        for word in all_words(k, n):
            yield tuple(int(x) for x in word)
        n += 1


def _check_pair(P: Portrait, Q: Portrait) -> None:
    if P.alphabet != Q.alphabet:
        raise AlphabetMismatch(f"{P.alphabet} vs {Q.alphabet}")
    if P.depth != Q.depth:
        raise DepthMismatch(f"depth {P.depth} vs {Q.depth}")


def portrait_of(m: MealyMachine, w0, depth: int) -> Portrait:
    """Portrait of the automorphism named by the state word ``w0``, to ``depth`` levels."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    w0 = as_state_word(w0)
    k = m.nsym
    levels = []
    for n in range(depth):
        words = all_words(k, n + 1)
        out = act_words(m, w0, words)
        levels.append(out[:, n].reshape(k**n, k))
    return Portrait(m.alphabet, levels)


def compose(P: Portrait, Q: Portrait) -> Portrait:
    """``P`` followed by ``Q``; the local at ``u`` is ``P_u`` then ``Q`` at the image of ``u``."""
    _check_pair(P, Q)
    levels = []
    for n in range(P.depth):
        img = P.level_map(n)
        levels.append(np.take_along_axis(Q.level(n)[img], P.level(n), axis=1))
    return Portrait(P.alphabet, levels)


def inverse(P: Portrait) -> Portrait:
    levels = []
    for n in range(P.depth):
        lv = np.empty_like(P.level(n))
        lv[P.level_map(n)] = np.argsort(P.level(n), axis=1)
        levels.append(lv)
    return Portrait(P.alphabet, levels)


def cone(P: Portrait, u: str | Sequence[str]) -> Portrait:
    """Restriction of ``P`` to the subtree below ``u``, of depth ``D - |u|``."""
    n, idx = P._index(u)
    if n > P.depth:
        raise WordTooLong(f"|u| = {n} exceeds the depth {P.depth}")
    k = P.nsym
    levels = []
    for j in range(P.depth - n):
        lo = idx * k**j
        levels.append(P.level(n + j)[lo:lo + k**j])
    return Portrait(P.alphabet, levels)


def depth_distance(P: Portrait, Q: Portrait) -> Fraction | UpperBound:
    """``2**-n`` for the first level ``n`` where the actions differ, else an :class:`UpperBound`."""
    _check_pair(P, Q)
    for n in range(1, P.depth + 1):
        if not np.array_equal(P.level_map(n), Q.level_map(n)):
            return Fraction(1, 2**n)
    return UpperBound(Fraction(1, 2**P.depth))


def is_level_identity(P: Portrait, n: int) -> bool:
    if n > P.depth:
        raise LevelTooDeep(f"level {n} exceeds depth {P.depth}")
    img = P.level_map(n)
    return bool(np.array_equal(img, np.arange(len(img))))


def mirror(P: Portrait) -> Portrait:
    """Conjugate by the global bit flip: the local at ``u`` becomes the local at the flipped ``u``."""
    if P.nsym != 2:
        raise NonBinaryAlphabet(f"mirror needs a binary alphabet, got {P.alphabet}")
    # Flipping every bit of a length-n word reverses its lexicographic index.
    return Portrait(P.alphabet, [P.level(n)[::-1] for n in range(P.depth)])
