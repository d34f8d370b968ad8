"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 a checked property was
refuted, 3 a computation budget was exceeded.
"""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import explorer, verify
from .errors import BudgetExceeded, SelfSimError
from .lamp import aut, core
from .lamp.syntax import parse_endo
from .mealy import (
    DEFAULT_STATE_BUDGET,
    MealyMachine,
    StateWord,
    act,
    direct_product,
    dump_machine,
    load_machine,
    parse_machine,
    to_dot,
    word_is_identity,
)

EXIT_OK, EXIT_USAGE, EXIT_REFUTED, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def bundled_machine_path(name: str) -> Path | None:
    stem = Path(name).name
    if not stem.endswith(".mealy"):
        stem += ".mealy"
    ref = resources.files("selfsim") / "machines" / stem
    return Path(str(ref)) if ref.is_file() else None


def read_machine(path: str) -> MealyMachine:
    """Load a machine file; bare names of bundled machines (``adding.mealy``) also work."""
    p = Path(path)
    if p.is_file():
        return load_machine(p)
    bundled = bundled_machine_path(path)
    if bundled is None:
        raise UsageError(f"machine file not found: {path}")
    return parse_machine(bundled.read_text(encoding="utf-8"))


def _bool(v: bool) -> str:
    return "true" if v else "false"


def _fmt_num(v) -> str:
    return "inf" if v == core.INF else str(int(v))


# ---------------------------------------------------------------------------
# machine
# ---------------------------------------------------------------------------
def cmd_machine(args, out) -> int:
    m = read_machine(args.file)
    if args.action == "info":
        print(f"alphabet: {' '.join(m.alphabet)}", file=out)
        print(f"states: {' '.join(m.states)}", file=out)
        print(f"invertible: {_bool(m.invertible)}", file=out)
        for q in m.states:
            perm = " ".join(f"{a}->{b}" for a, b in zip(m.alphabet, m.output_permutation(q)))
            print(f"output {q}: {perm}", file=out)
        return EXIT_OK
    if args.action == "act":
        if args.word is None or args.input is None:
            raise UsageError("machine act needs --word and --input")
        print(act(m, StateWord.parse(args.word), args.input), file=out)
        return EXIT_OK
    if args.action == "identity":
        if args.word is None:
            raise UsageError("machine identity needs --word")
        verdict = word_is_identity(m, StateWord.parse(args.word), budget=args.budget)
        print(f"identity: {_bool(verdict)}", file=out)
        return EXIT_OK if verdict else EXIT_REFUTED
    if args.action == "product":
        if not args.file2:
            raise UsageError("machine product needs --file2")
        prod = direct_product(m, read_machine(args.file2))
        for old, new in prod.symbol_renaming.items():
            print(f"# symbol {old} of the second machine renamed to {new}", file=out)
        for old, new in prod.state_renaming.items():
            print(f"# state {old} of the second machine renamed to {new}", file=out)
        out.write(dump_machine(prod.machine))
        return EXIT_OK
    if args.action == "dot":
        out.write(to_dot(m))
        return EXIT_OK
    raise UsageError(f"unknown machine action {args.action}")


# ---------------------------------------------------------------------------
# group
# ---------------------------------------------------------------------------
def _gens(m: MealyMachine, text: str | None) -> list[StateWord]:
    if not text:
        return [StateWord.of(q) for q in m.states]
    return [StateWord.parse(g) for g in text.split(";")] if ";" in text else \
        [StateWord.parse(g) for g in text.split(",")]


def _parse_map(text: str) -> dict[str, str]:
    out = {}
    for item in text.split(","):
        if ":" not in item:
            raise UsageError(f"bad --map entry {item!r}; expected gen:image")
        g, img = item.split(":", 1)
        out[g.strip()] = img.strip()
    return out


def cmd_group(args, out) -> int:
    m = read_machine(args.file)
    if args.action == "quotient":
        q = explorer.level_quotient(m, _gens(m, args.gens), args.level, budget=args.budget)
        print(f"order: {q.order}", file=out)
        return EXIT_OK
    if args.action == "falsify":
        if not args.map:
            raise UsageError("group falsify needs --map")
        images = _parse_map(args.map)
        gens = _gens(m, args.gens) if args.gens else [StateWord.of(g) for g in images]
        w = explorer.uc_falsify(m, gens, images, args.n, args.m, args.radius)
        if w is None:
            print(f"witness: none within radius {args.radius} (not a proof of continuity)", file=out)
            return EXIT_OK
        print(f"witness: {w}", file=out)
        print(f"refuted: level-{args.n} stabilizer is not mapped into the level-{args.m} stabilizer",
              file=out)
        return EXIT_REFUTED
    raise UsageError(f"unknown group action {args.action}")


# ---------------------------------------------------------------------------
# lamp
# ---------------------------------------------------------------------------
def _elem(args) -> core.LampElement:
    if args.elem is None:
        raise UsageError("--elem is required")
    return core.from_word(args.k, args.elem)


def _endos(args) -> list[aut.LampEndo]:
    if not args.endo:
        raise UsageError("--endo is required")
    return [parse_endo(e, args.k) for e in args.endo]


def cmd_lamp(args, out) -> int:
    action = args.action
    if action == "eval":
        print(core.format_element(_elem(args)), file=out)
    elif action == "order":
        print(_fmt_num(core.elem_order(_elem(args))), file=out)
    elif action == "stabdepth":
        print(_fmt_num(core.stab_length(_elem(args))), file=out)
    elif action == "act":
        if args.input is None:
            raise UsageError("lamp act needs --input")
        print(core.act_word(_elem(args), args.input), file=out)
    elif action == "endo":
        return cmd_endo(args, out)
    elif action == "decompose":
        e = _endos(args)[0]
        word = aut.decompose(e)
        print(aut.format_word(word), file=out)
        print(f"recomposes: {_bool(aut.evaluate_word(args.k, word) == e)}", file=out)
    elif action == "luc":
        e = _endos(args)[0]
        rng = np.random.default_rng(args.seed)
        rep = aut.luc_check(e, args.kind, args.samples, args.lmax, rng, iota_factors=args.iota_factors)
        print(f"kind: {rep.kind}", file=out)
        print(f"samples: {rep.samples}", file=out)
        print(f"allowed loss: {rep.allowed_loss}", file=out)
        print(f"worst loss: {rep.worst_loss}", file=out)
        print(f"violations: {len(rep.violations)}", file=out)
        return EXIT_OK if rep.ok else EXIT_REFUTED
    else:
        raise UsageError(f"unknown lamp action {action}")
    return EXIT_OK


def cmd_endo(args, out) -> int:
    op = args.op
    endos = _endos(args)
    if op == "apply":
        print(core.format_element(aut.endo_apply(endos[0], _elem(args))), file=out)
    elif op == "compose":
        print(aut.endo_product(args.k, endos), file=out)
    elif op == "check":
        ok = aut.is_automorphism(endos[0])
        print(f"automorphism: {_bool(ok)}", file=out)
        print(f"reason: {aut.automorphism_reason(endos[0])}", file=out)
        return EXIT_OK if ok else EXIT_REFUTED
    elif op == "invert":
        print(aut.endo_invert(endos[0]), file=out)
    else:
        raise UsageError(f"unknown endo operation {op}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify-paper
# ---------------------------------------------------------------------------
def cmd_verify(args, out) -> int:
    only = None
    if args.only:
        only = [name for item in args.only for name in item.split(",") if name]
        unknown = sorted(set(only) - set(verify.BLOCKS))
        if unknown:
            raise UsageError(f"unknown block(s) {unknown}; choose from {list(verify.BLOCKS)}")
    checks = verify.run(args.seed, only)
    if args.format == "jsonl":
        out.write(verify.render_jsonl(checks))
    else:
        out.write(verify.render_text(checks, args.seed))
    return EXIT_OK if all(c.ok for c in checks) else EXIT_REFUTED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write results to this file instead of stdout")

    p = _Parser(prog="selfsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pm = sub.add_parser("machine", parents=[common], help="Mealy machine files")
    pm.add_argument("action", choices=["info", "act", "product", "identity", "dot"])
    pm.add_argument("--file", required=True)
    pm.add_argument("--file2")
    pm.add_argument("--word", help="state word, e.g. p,p-1 or p^2")
    pm.add_argument("--input", help="input word over the alphabet")
    pm.add_argument("--budget", type=int, default=DEFAULT_STATE_BUDGET)
    pm.set_defaults(func=cmd_machine)

    pg = sub.add_parser("group", parents=[common], help="finite-level exploration")
    pg.add_argument("action", choices=["quotient", "falsify"])
    pg.add_argument("--file", required=True)
    pg.add_argument("--gens", help="comma-separated generator words (default: all states)")
    pg.add_argument("--level", type=int, default=1)
    pg.add_argument("--map", help="images of generators, e.g. p:r,r:p")
    pg.add_argument("--n", type=int, default=1, help="source level")
    pg.add_argument("--m", type=int, default=1, help="target level")
    pg.add_argument("--radius", type=int, default=explorer.DEFAULT_RADIUS)
    pg.add_argument("--budget", type=int, default=explorer.DEFAULT_ORDER_BUDGET)
    pg.set_defaults(func=cmd_group)

    pl = sub.add_parser("lamp", parents=[common], help="lamplighter arithmetic")
    pl.add_argument("action", choices=["eval", "order", "stabdepth", "act", "endo", "decompose", "luc"])
    pl.add_argument("op", nargs="?", choices=["apply", "compose", "check", "invert"],
                    help="operation for 'lamp endo'")
    pl.add_argument("--k", type=int, required=True)
    pl.add_argument("--elem")
    pl.add_argument("--endo", action="append", help="repeat for compose")
    pl.add_argument("--input")
    pl.add_argument("--kind", default="stab-xi", choices=["stab-xi", "iota", "zeta", "mixed"])
    pl.add_argument("--iota-factors", type=int)
    pl.add_argument("--samples", type=int, default=500)
    pl.add_argument("--lmax", type=int, default=12)
    pl.add_argument("--seed", type=int, default=0)
    pl.set_defaults(func=cmd_lamp)

    pv = sub.add_parser("verify-paper", parents=[common], help="run every reproduction check")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--only", action="append", help=f"block names: {', '.join(verify.BLOCKS)}")
    pv.add_argument("--format", choices=["text", "jsonl"], default="text")
    pv.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "lamp" and (args.action == "endo") != (args.op is not None):
        parser.error("'lamp endo' takes one of apply|compose|check|invert; other lamp actions take none")
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, SelfSimError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if args.output:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
