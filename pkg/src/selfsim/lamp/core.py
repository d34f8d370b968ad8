"""Exact arithmetic in the lamplighter group ``L_k = Z_k wr Z``.

An element is stored in normal form ``prod_n b(n)^{e_n} * x^r`` where
``b(n) = x^n a x^-n``.  Elements act on the right on truncated power series
``X = sum x_n t^n`` over ``Z_k`` (equivalently on words ``x_0 x_1 ...``):

* ``x`` multiplies by ``(1 - t)^-1`` (running partial sums);
* ``b(m)`` adds ``(1 - t)^m``, so ``a = b(0)`` adds 1 to the first letter.

A consequence worth keeping in mind: ``b(m)`` for large positive ``m``
still changes the *first* letter, because ``(1 - t)^m`` has constant term 1.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .. import kernels
from ..errors import InvalidModulus, ModulusMismatch, ParseError, SymbolOutOfRange

INF = math.inf


def check_modulus(k: int) -> int:
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise InvalidModulus(f"modulus must be an integer >= 2, got {k!r}")
    return int(k)


# ---------------------------------------------------------------------------
# finitely supported Z -> Z_k
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ZkLaurent:
    """Finitely supported map ``Z -> Z_k``; ``terms`` are sorted ``(exponent, coeff)`` with coeff != 0."""

    modulus: int
    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, k: int, coeffs: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> "ZkLaurent":
        k = check_modulus(k)
        acc: dict[int, int] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for n, c in items:
            acc[int(n)] = (acc.get(int(n), 0) + int(c)) % k
        return cls(k, tuple(sorted((n, c) for n, c in acc.items() if c)))

    @classmethod
    def zero(cls, k: int) -> "ZkLaurent":
        return cls(check_modulus(k), ())

    @classmethod
    def monomial(cls, k: int, n: int, c: int = 1) -> "ZkLaurent":
        return cls.of(k, {n: c})

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def __getitem__(self, n: int) -> int:
        for m, c in self.terms:
            if m == n:
                return c
        return 0

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.terms)

    @property
    def min_exp(self) -> int:
        return self.terms[0][0]

    @property
    def max_exp(self) -> int:
        return self.terms[-1][0]

    def _same(self, other: "ZkLaurent") -> None:
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"Z_{self.modulus} vs Z_{other.modulus}")

    def __add__(self, other: "ZkLaurent") -> "ZkLaurent":
        self._same(other)
        return ZkLaurent.of(self.modulus, list(self.terms) + list(other.terms))

    def __neg__(self) -> "ZkLaurent":
        return ZkLaurent.of(self.modulus, [(n, -c) for n, c in self.terms])

    def __sub__(self, other: "ZkLaurent") -> "ZkLaurent":
        return self + (-other)

    def scale(self, c: int) -> "ZkLaurent":
        return ZkLaurent.of(self.modulus, [(n, c * v) for n, v in self.terms])

    def shift(self, s: int) -> "ZkLaurent":
        """Re-index ``n -> n + s``."""
        return ZkLaurent(self.modulus, tuple((n + s, c) for n, c in self.terms))

    def __mul__(self, other: "ZkLaurent") -> "ZkLaurent":
        """Laurent-polynomial product (convolution of coefficient families)."""
        self._same(other)
        acc: dict[int, int] = {}
        for n, c in self.terms:
            for m, d in other.terms:
                acc[n + m] = acc.get(n + m, 0) + c * d
        return ZkLaurent.of(self.modulus, acc)

    def reduce(self, u: int) -> "ZkLaurent":
        """Coefficientwise reduction to ``Z_u``."""
        return ZkLaurent.of(u, self.terms)

    def recast(self, k: int) -> "ZkLaurent":
        """Same integer representatives read in ``Z_k``."""
        return ZkLaurent.of(k, self.terms)

    def __str__(self) -> str:
        return "{" + ",".join(f"{n}:{c}" for n, c in self.terms) + "}"


# ---------------------------------------------------------------------------
# truncated power series over Z_k
# ---------------------------------------------------------------------------
def _mul_trunc(a: Sequence[int], b: Sequence[int], k: int, length: int) -> list[int]:
    out = [0] * length
    for i, ai in enumerate(a[:length]):
        if ai:
            for j in range(min(len(b), length - i)):
                out[i + j] += ai * b[j]
    return [v % k for v in out]


def _pow_trunc(base: Sequence[int], e: int, k: int, length: int) -> list[int]:
    result = [1 % k] + [0] * (length - 1)
    cur = list(base[:length]) + [0] * (length - len(base))
    while e:
        if e & 1:
            result = _mul_trunc(result, cur, k, length)
        e >>= 1
        if e:
            cur = _mul_trunc(cur, cur, k, length)
    return result


@lru_cache(maxsize=4096)
def one_minus_t_power(n: int, k: int, length: int) -> tuple[int, ...]:
    """Coefficients of ``(1 - t)^n`` modulo ``(k, t^length)`` for any integer ``n``."""
    if length <= 0:
        return ()
    if n >= 0:
        base = [1, -1 % k]
    else:
        base = [1] * length  # geometric series for (1 - t)^-1
    return tuple(_pow_trunc(base, abs(n), k, length))


@dataclass(frozen=True)
class TruncSeries:
    """Element of ``Z_k[[t]] / t^L``; ``coeffs[n]`` is the coefficient of ``t^n``."""

    modulus: int
    coeffs: tuple[int, ...]

    @classmethod
    def of(cls, k: int, coeffs: Iterable[int]) -> "TruncSeries":
        k = check_modulus(k)
        return cls(k, tuple(int(c) % k for c in coeffs))

    @classmethod
    def zero(cls, k: int, length: int) -> "TruncSeries":
        return cls.of(k, [0] * length)

    @classmethod
    def from_word(cls, k: int, w: str | Sequence) -> "TruncSeries":
        """Read a word over ``Z_k`` (digits, or whitespace/comma separated residues)."""
        return cls(check_modulus(k), tuple(parse_residue_word(k, w)))

    def to_word(self) -> str:
        if self.modulus <= 10:
            return "".join(str(c) for c in self.coeffs)
        return " ".join(str(c) for c in self.coeffs)

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def _same(self, other: "TruncSeries") -> None:
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"Z_{self.modulus} vs Z_{other.modulus}")
        if self.length != other.length:
            raise ValueError(f"series lengths differ: {self.length} vs {other.length}")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._same(other)
        return TruncSeries.of(self.modulus, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._same(other)
        return TruncSeries(self.modulus, tuple(_mul_trunc(self.coeffs, other.coeffs,
                                                          self.modulus, self.length)))

    def valuation(self) -> float:
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return INF


def parse_residue_word(k: int, w: str | Sequence) -> list[int]:
    if isinstance(w, str):
        parts = w.replace(",", " ").split()
        if len(parts) == 1 and k <= 10:
            parts = list(parts[0])
    else:
        parts = list(w)
    out = []
    for p in parts:
        try:
            v = int(p)
        except (TypeError, ValueError):
            raise SymbolOutOfRange(f"letter {p!r} is not a residue mod {k}") from None
        if not 0 <= v < k:
            raise SymbolOutOfRange(f"letter {v} outside 0..{k - 1}")
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LampElement:
    """Normal form ``prod b(n)^{beta[n]} * x^shift`` of an element of ``L_k``."""

    modulus: int
    beta: ZkLaurent
    shift: int = 0

    def __post_init__(self):
        if self.beta.modulus != self.modulus:
            raise ModulusMismatch("beta data and element disagree on the modulus")

    @classmethod
    def identity(cls, k: int) -> "LampElement":
        return cls(check_modulus(k), ZkLaurent.zero(k), 0)

    @classmethod
    def of(cls, k: int, beta: Mapping[int, int] | ZkLaurent = (), shift: int = 0) -> "LampElement":
        k = check_modulus(k)
        b = beta if isinstance(beta, ZkLaurent) else ZkLaurent.of(k, beta)
        return cls(k, b, int(shift))

    def _same(self, other: "LampElement") -> None:
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"L_{self.modulus} vs L_{other.modulus}")

    def __mul__(self, other: "LampElement") -> "LampElement":
        return mul(self, other)

    def __pow__(self, n: int) -> "LampElement":
        return power(self, n)

    def inv(self) -> "LampElement":
        return inv(self)

    @property
    def is_identity(self) -> bool:
        return self.shift == 0 and not self.beta

    def __str__(self) -> str:
        return format_element(self)


def beta(k: int, m: int) -> LampElement:
    return LampElement.of(k, {m: 1})


def alpha(k: int) -> LampElement:
    return beta(k, 0)


def xi(k: int) -> LampElement:
    return LampElement.of(k, {}, 1)


def identity(k: int) -> LampElement:
    return LampElement.identity(k)


def mul(x: LampElement, y: LampElement) -> LampElement:
    """Product ``xy`` (``x`` acts first).  Moving ``y``'s lamps past ``x^r`` shifts them by ``r``."""
    x._same(y)
    return LampElement(x.modulus, x.beta + y.beta.shift(x.shift), x.shift + y.shift)


def inv(x: LampElement) -> LampElement:
    return LampElement(x.modulus, (-x.beta).shift(-x.shift), -x.shift)


def power(x: LampElement, n: int) -> LampElement:
    if n < 0:
        return power(inv(x), -n)
    result, base = identity(x.modulus), x
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def product(k: int, elems: Iterable[LampElement]) -> LampElement:
    out = identity(k)
    for e in elems:
        out = mul(out, e)
    return out


def conjugate(g: LampElement, x: LampElement) -> LampElement:
    """``g x g^-1``."""
    return mul(mul(g, x), inv(g))


# ---------------------------------------------------------------------------
# words over the generators a, x
# ---------------------------------------------------------------------------
_ELEM_TOKEN = re.compile(
    r"""(?P<gen>a|α|x|ξ|b\(\s*(?P<m>[+-]?\d+)\s*\)|β_?\(?(?P<gm>[+-]?\d+)\)?)
        (?:\^\(?(?P<exp>[+-]?\d+)\)?|(?P<neg>-1|⁻¹))?""",
    re.VERBOSE,
)
_SKIP = re.compile(r"[\s*·.]+")


def parse_tokens(text: str) -> list[tuple[str, int, int]]:
    """Split element syntax into ``(kind, index, exponent)`` with kind ``"b"`` or ``"x"``."""
    text = text.strip()
    if text in ("", "1", "e", "id"):
        return []
    out: list[tuple[str, int, int]] = []
    pos = 0
    while pos < len(text):
        skip = _SKIP.match(text, pos)
        if skip:
            pos = skip.end()
            continue
        mt = _ELEM_TOKEN.match(text, pos)
        if mt is None:
            raise ParseError(f"unexpected input at position {pos}: {text[pos:pos + 8]!r}", position=pos)
        e = int(mt["exp"]) if mt["exp"] is not None else (-1 if mt["neg"] else 1)
        gen = mt["gen"]
        if gen in ("a", "α"):
            out.append(("b", 0, e))
        elif gen in ("x", "ξ"):
            out.append(("x", 0, e))
        else:
            out.append(("b", int(mt["m"] if mt["m"] is not None else mt["gm"]), e))
        pos = mt.end()
    return out


def from_word(k: int, word: str | Sequence[tuple[str, int, int]]) -> LampElement:
    """Multiply out a word in ``a``, ``x``, ``b(m)`` (with exponents) to normal form."""
    k = check_modulus(k)
    tokens = parse_tokens(word) if isinstance(word, str) else list(word)
    out = identity(k)
    for kind, m, e in tokens:
        if kind == "x":
            g = LampElement.of(k, {}, e)
        else:
            g = LampElement.of(k, {m: e})
        out = mul(out, g)
    return out


parse_element = from_word


def format_element(x: LampElement) -> str:
    parts = [f"b({m})^{c}" for m, c in x.beta.terms]
    if x.shift:
        parts.append(f"x^{x.shift}")
    return " ".join(parts) if parts else "1"


GEN_LETTERS = ("a", "a-1", "x", "x-1")


def random_word(length: int, rng: np.random.Generator) -> list[str]:
    """Uniform word over ``a^{+-1}, x^{+-1}`` of the given length (not reduced)."""
    return [GEN_LETTERS[i] for i in rng.integers(0, 4, size=length)]


def letters_to_element(k: int, letters: Sequence[str]) -> LampElement:
    return from_word(k, " ".join(letters))


def cayley_state_word(letters: Sequence[str]):
    """State word over the Cayley machine of ``Z_k`` realising a generator word.

    ``x`` is state ``0`` and ``a`` is state ``1`` followed by the inverse of
    state ``0``.
    """
    from ..mealy import StateWord

    table = {
        "a": [("1", 1), ("0", -1)],
        "a-1": [("0", 1), ("1", -1)],
        "x": [("0", 1)],
        "x-1": [("0", -1)],
    }
    out: list[tuple[str, int]] = []
    for g in letters:
        out.extend(table[g])
    return StateWord(tuple(out))


# ---------------------------------------------------------------------------
# action on series and words
# ---------------------------------------------------------------------------
def lamp_series(x: LampElement, length: int) -> list[int]:
    """``f = sum_m beta[m] (1 - t)^m`` modulo ``(k, t^length)``."""
    k = x.modulus
    f = [0] * length
    for m, c in x.beta.terms:
        for j, v in enumerate(one_minus_t_power(m, k, length)):
            f[j] += c * v
    return [v % k for v in f]


def shift_series(x: LampElement, length: int) -> tuple[int, ...]:
    """``h = (1 - t)^-shift`` modulo ``(k, t^length)``."""
    return one_minus_t_power(-x.shift, x.modulus, length)


def act_series(x: LampElement, X: TruncSeries) -> TruncSeries:
    """``(X + f) * (1 - t)^-shift`` truncated to the length of ``X``."""
    if X.modulus != x.modulus:
        raise ModulusMismatch(f"series over Z_{X.modulus}, element of L_{x.modulus}")
    k, n = x.modulus, X.length
    f = lamp_series(x, n)
    h = shift_series(x, n)
    summed = [a + b for a, b in zip(X.coeffs, f)]
    return TruncSeries(k, tuple(_mul_trunc(summed, h, k, n)))


def affine_action(x: LampElement, length: int) -> tuple[np.ndarray, np.ndarray]:
    """``(T, c)`` with ``X.x = X @ T + c (mod k)`` for row vectors ``X`` of the given length."""
    k = x.modulus
    h = shift_series(x, length)
    T = np.zeros((length, length), dtype=np.int64)
    for i in range(length):
        T[i, i:] = h[: length - i]
    c = np.array(_mul_trunc(lamp_series(x, length), h, k, length), dtype=np.int64)
    return T, c


def act_word_batch(x: LampElement, words: np.ndarray) -> np.ndarray:
    """Apply ``x`` to every row of an integer array of words over ``Z_k``."""
    words = np.ascontiguousarray(words, dtype=np.int64)
    T, c = affine_action(x, words.shape[1])
    return kernels.affine_batch(T, c, x.modulus, words)


def act_word(x: LampElement, w: str | Sequence):
    """Image of a word over ``Z_k`` under ``x``; returned in the same shape as ``w``."""
    X = TruncSeries.from_word(x.modulus, w)
    Y = act_series(x, X)
    if isinstance(w, str):
        if x.modulus <= 10 and len(w.replace(",", " ").split()) <= 1:
            return "".join(str(c) for c in Y.coeffs)
        return " ".join(str(c) for c in Y.coeffs)
    return list(Y.coeffs)


# ---------------------------------------------------------------------------
# stabilizer depth and the metric
# ---------------------------------------------------------------------------
def _valuation(coeffs: Sequence[int]) -> float:
    for n, c in enumerate(coeffs):
        if c:
            return n
    return INF


def lamp_valuation(x: LampElement) -> float:
    """t-adic valuation of ``f = sum beta[m] (1 - t)^m``.

    Multiplying by the unit ``(1 - t)^-a`` (``a`` the least lamp index)
    turns ``f`` into the polynomial ``sum beta[m] (1 - t)^(m - a)``, whose
    coefficient at ``t^j`` is ``(-1)^j sum beta[m] binom(m - a, j)``.  The
    scan stops at the first nonzero coefficient, which appears no later than
    the support width since the substitution ``t -> 1 - t`` is invertible.
    """
    if not x.beta:
        return INF
    k, a = x.modulus, x.beta.min_exp
    width = x.beta.max_exp - a
    for j in range(width + 1):
        if sum(c * math.comb(m - a, j) for m, c in x.beta.terms) % k:
            return j
    raise AssertionError("nonzero lamp data with vanishing series")


def shift_valuation(r: int, k: int) -> float:
    """t-adic valuation of ``(1 - t)^-r - 1`` over ``Z_k``.

    Up to a unit this is ``(1 - t)^|r| - 1``, whose coefficient at ``t^j`` is
    ``+-binom(|r|, j)``; the first ``j >= 1`` with a nonzero residue wins.
    It exists and is at most ``|r|`` because ``binom(|r|, |r|) = 1``.
    """
    n = abs(r)
    if n == 0:
        return INF
    c = 1
    for j in range(1, n + 1):
        c = c * (n - j + 1) // j
        if c % k:
            return j
    raise AssertionError("unreachable: the top binomial coefficient is 1")


def stab_length(x: LampElement) -> float:
    """Largest ``L`` such that ``x`` fixes every word of length ``L`` (``inf`` for the identity)."""
    return min(shift_valuation(x.shift, x.modulus), lamp_valuation(x))


def depth_distance_lamp(x: LampElement, y: LampElement) -> Fraction:
    x._same(y)
    L = stab_length(mul(inv(y), x))
    if L == INF:
        return Fraction(0)
    return Fraction(1, 2 ** (int(L) + 1))


def is_torsion(x: LampElement) -> bool:
    return x.shift == 0


def elem_order(x: LampElement) -> float:
    if x.shift:
        return INF
    k = x.modulus
    out = 1
    for _, c in x.beta.terms:
        out = math.lcm(out, k // math.gcd(c, k))
    return out


def fixed_level_count(k: int, n: int) -> int:
    """``|G_n|`` for ``L_k`` acting on words of length ``n``.

    An element acts on level ``n`` as ``X -> (X + f) h`` with ``h`` a power of
    ``(1 - t)^-1`` and ``f`` arbitrary mod ``t^n`` (the lamps span all of
    ``Z_k[t]/t^n``), so the level quotient has ``ord(1 - t) * k^n`` elements.
    """
    k = check_modulus(k)
    if n == 0:
        return 1
    base = [1, k - 1] + [0] * (n - 2) if n >= 2 else [1]
    cur = list(base)
    order = 1
    target = [1] + [0] * (n - 1)
    while cur != target:
        cur = _mul_trunc(cur, base, k, n)
        order += 1
    return order * k**n
