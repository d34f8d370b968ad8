"""Text syntax for endomorphisms of ``L_k``.

Two forms are accepted:

* explicit data ``endo k=4 r=1 i={0:1,1:2} j={}`` (``k=`` may be omitted when
  the modulus is supplied separately);
* a product of named generators such as ``eta(3)*delta(1,2)^2*lambda^-1``.
"""
from __future__ import annotations

import re

from ..errors import ParseError
from .aut import GENERATORS, Gen, LampEndo, evaluate_word
from .core import ZkLaurent, check_modulus

_FIELD = re.compile(r"(?P<key>[kijr])\s*=\s*(?P<val>\{[^}]*\}|[+-]?\d+)")
_FACTOR = re.compile(
    r"\s*(?P<name>[a-z_]+)\s*(?:\(\s*(?P<args>[^)]*)\))?\s*(?:\^\s*\(?(?P<pow>[+-]?\d+)\)?)?\s*"
)


def parse_laurent(k: int, text: str, offset: int = 0) -> ZkLaurent:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ParseError(f"expected '{{n:c,...}}' at position {offset}", position=offset)
    coeffs: dict[int, int] = {}
    inner = body[1:-1].strip()
    if inner:
        for item in inner.split(","):
            try:
                n, c = item.split(":")
                coeffs[int(n)] = coeffs.get(int(n), 0) + int(c)
            except ValueError:
                raise ParseError(f"bad coefficient entry {item.strip()!r} near position {offset}", position=offset) from None
    return ZkLaurent.of(k, coeffs)


def _parse_explicit(text: str, k: int | None) -> LampEndo:
    body = text.strip()[len("endo"):]
    fields: dict[str, str] = {}
    pos = 0
    for mt in _FIELD.finditer(body):
        gap = body[pos:mt.start()].strip()
        if gap:
            raise ParseError(f"unexpected {gap!r} at position {pos + 4}", position=pos + 4)
        fields[mt["key"]] = mt["val"]
        pos = mt.end()
    if body[pos:].strip():
        raise ParseError(f"unexpected {body[pos:].strip()!r} at position {pos + 4}", position=pos + 4)
    if "k" in fields:
        fk = int(fields["k"])
        if k is not None and fk != k:
            raise ParseError(f"k={fk} in the text disagrees with modulus {k}")
        k = fk
    if k is None:
        raise ParseError("modulus missing: give k=<k>")
    k = check_modulus(k)
    i = parse_laurent(k, fields.get("i", "{0:1}"))
    j = parse_laurent(k, fields.get("j", "{}"))
    return LampEndo(k, i, j, int(fields.get("r", "1")))


def parse_gen_word(text: str) -> list[Gen]:
    """Parse ``name(args)^pow`` factors joined by ``*``."""
    word: list[Gen] = []
    pos = 0
    text = text.strip()
    if text in ("", "1", "id"):
        return []
    while True:
        mt = _FACTOR.match(text, pos)
        if mt is None or not mt.group("name"):
            raise ParseError(f"expected a generator at position {pos}", position=pos)
        name = mt["name"]
        if name == "lambda_":
            name = "lambda"
        if name not in GENERATORS:
            raise ParseError(f"unknown generator {name!r} at position {mt.start('name')}", position=mt.start("name"))
        args: tuple[int, ...] = ()
        if mt["args"] is not None and mt["args"].strip():
            try:
                args = tuple(int(a) for a in mt["args"].split(","))
            except ValueError:
                raise ParseError(f"non-integer argument at position {mt.start('args')}", position=mt.start("args")) from None
        word.append(Gen(name, args, int(mt["pow"]) if mt["pow"] else 1))
        pos = mt.end()
        if pos >= len(text):
            return word
        if text[pos] != "*":
            raise ParseError(f"expected '*' at position {pos}", position=pos)
        pos += 1


def parse_endo(text: str, k: int | None = None) -> LampEndo:
    if text.strip().startswith("endo"):
        return _parse_explicit(text, k)
    if k is None:
        raise ParseError("modulus required for a generator expression")
    word = parse_gen_word(text)
    try:
        return evaluate_word(check_modulus(k), word)
    except TypeError as exc:
        raise ParseError(f"wrong number of generator arguments: {exc}") from None
