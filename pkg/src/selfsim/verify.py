"""End-to-end reproduction checks, grouped into named blocks.

Each block is a function ``block(rng) -> list[Check]``.  A block never
raises on a failed expectation; failures become ``FAIL`` checks.  Text
output is deterministic for a fixed seed because it omits timings.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import explorer
from .lamp import aut, core
from .errors import IterationBudgetExceeded
from .mealy import act_words, adding_machine, all_words, cayley_machine, ex44_C, level_images


@dataclass
class Check:
    name: str
    anchor: str
    ok: bool
    detail: str = ""
    elapsed_ms: float = 0.0

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"

    def text(self) -> str:
        line = f"{self.status} {self.name}: {self.detail}" if self.detail else f"{self.status} {self.name}"
        return f"{line}  [{self.anchor}]"

    def record(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "status": self.status,
                "elapsed_ms": round(self.elapsed_ms, 3), "detail": self.detail}


class _Timer:
    def __init__(self):
        self.t0 = time.perf_counter()

    def lap(self) -> float:
        t = time.perf_counter()
        ms = (t - self.t0) * 1000.0
        self.t0 = t
        return ms


def _check(out: list, timer: _Timer, name: str, anchor: str, ok: bool, detail: str = "") -> None:
    out.append(Check(name, anchor, bool(ok), detail, timer.lap()))


# ---------------------------------------------------------------------------
# blocks
# ---------------------------------------------------------------------------
ANCHOR_ADDING = "adding machine: the level-m stabilizer is generated by the 2^m-th power"


def block_adding(rng, mmax: int = 10) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()
    m = adding_machine()
    orders = [explorer.level_quotient(m, ["p"], n).order for n in range(1, mmax + 1)]
    _check(out, timer, "adding.quotient_orders", ANCHOR_ADDING,
           orders == [2**n for n in range(1, mmax + 1)],
           "orders " + ",".join(map(str, orders)) + f" for m=1..{mmax}")
    return out


ANCHOR_ALESHIN = "Aleshin machine: level-2 stabilizer is not characteristic"


def block_aleshin(rng) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()
    rep = explorer.aleshin_stab2_report()
    for key, ok in rep.checks().items():
        _check(out, timer, f"aleshin.{key}", ANCHOR_ALESHIN, ok, str(getattr(rep, key)))
    _check(out, timer, "aleshin.caveat", ANCHOR_ALESHIN, True, rep.caveat)
    return out


ANCHOR_EX44 = "product of a binary and a ternary machine: swapping generators is not uniformly continuous"


def block_ex44(rng, nmax: int = 10) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()
    rep = explorer.ex44_report(nmax)
    p_ok = all(pf for _, pf, _ in rep.rows)
    r_ok = all(not rf for _, _, rf in rep.rows)
    _check(out, timer, "ex44.p_power_fixes_level", ANCHOR_EX44, p_ok,
           f"p^(2^n) fixes level n for n=1..{nmax}")
    _check(out, timer, "ex44.r_power_moves_level1", ANCHOR_EX44, r_ok,
           f"r^(2^n) moves level 1 for n=1..{nmax} (3-cycle on 2,3,4)")
    _check(out, timer, "ex44.commute", ANCHOR_EX44, rep.commute_ok,
           f"p,r and r,p agree on {rep.commute_words} words of length <= 5")
    C = ex44_C()
    w = explorer.uc_falsify(C, ["p", "r"], {"p": "r", "r": "p"}, 1, 1, 4)
    _check(out, timer, "ex44.falsifier_witness", ANCHOR_EX44, w is not None and str(w) == "p^2",
           f"witness {w}")
    return out


ANCHOR_ORACLE = "lamplighter series action agrees with the Cayley machine"


def block_oracle(rng, moduli=(2, 3, 4, 5, 6), words: int = 200, maxlen: int = 10,
                 depth: int = 7) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()
    for k in moduli:
        m = cayley_machine(k)
        levels = [all_words(k, L) for L in range(depth + 1)]
        mismatches = 0
        for _ in range(words):
            letters = core.random_word(int(rng.integers(0, maxlen + 1)), rng)
            x = core.letters_to_element(k, letters)
            sw = core.cayley_state_word(letters)
            for L, lv in enumerate(levels):
                if not np.array_equal(core.act_word_batch(x, lv), level_images(m, sw, L)):
                    mismatches += 1
        _check(out, timer, f"oracle.k{k}", ANCHOR_ORACLE, mismatches == 0,
               f"{words} words, all inputs of length <= {depth}, {mismatches} mismatches")
    return out


ANCHOR_IDENT = "identities among endomorphisms of the lamplighter group"
STAB_MODULI = (2, 3, 4, 6, 8, 9, 12)


def block_identities(rng, pairs: int = 200) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()

    bad = 0
    for k in STAB_MODULI:
        for _ in range(pairs):
            e1 = aut.LampEndo(k, aut.random_laurent(k, rng), None, 1)
            e2 = aut.LampEndo(k, aut.random_laurent(k, rng), None, 1)
            bad += aut.endo_compose(e1, e2) != aut.endo_compose(e2, e1)
    _check(out, timer, "identities.stab_commutative", "automorphisms fixing x commute", bad == 0,
           f"{pairs} pairs x {len(STAB_MODULI)} moduli, {bad} failures")

    bad = total = 0
    for k in (4, 8, 9):
        p = aut.primes_of(k)[0]
        for m in range(-3, 4):
            if m == 0:
                continue
            for c in range(p, k, p):
                total += 1
                bad += aut.endo_power(aut.delta(k, m, c), k) != aut.endo_identity(k)
    _check(out, timer, "identities.delta_order", "delta(m,pc)^(p^s) = 1", bad == 0,
           f"{total} deltas over k=4,8,9, {bad} failures")

    bad = 0
    for k in (6, 10, 15):
        ps = aut.primes_of(k)
        m = math.prod(p - 1 for p in ps)
        lhs = aut.endo_product(k, [aut.endo_power(aut.rho(k, ell), m) for ell in range(1, len(ps) + 1)])
        bad += lhs != aut.endo_power(aut.lambda_(k), m)
    _check(out, timer, "identities.rho_power_product", "rho_1^m ... rho_s^m = lambda^m", bad == 0,
           "k=6,10,15")

    pre = all(((6 // p) ** 2 - 1) % p == 0 for p in (2, 3))
    eq = aut.endo_compose(aut.rho(6, 1), aut.rho(6, 2)) == aut.lambda_(6)
    _check(out, timer, "identities.lambda_rho_product", "lambda = rho_1 rho_2", pre and eq,
           f"k=6, precondition {pre}, equality {eq}")

    bad = total = 0
    for k in range(2, 13):
        units = [j for j in range(1, k) if math.gcd(j, k) == 1]
        for m in range(-4, 5):
            lam_m = aut.endo_power(aut.lambda_(k), m)
            for j in units:
                total += 1
                bad += aut.gamma(k, m, j) != aut.endo_compose(lam_m, aut.eta(k, j))
    _check(out, timer, "identities.gamma_factorization", "gamma(m,j) = lambda^m eta(j)", bad == 0,
           f"{total} cases, {bad} failures")

    bad = nonmember = 0
    for _ in range(pairs):
        k = int(rng.choice(STAB_MODULI))
        x = core.letters_to_element(k, core.random_word(int(rng.integers(0, 9)), rng))
        y = core.letters_to_element(k, core.random_word(int(rng.integers(0, 9)), rng))
        bad += aut.psi_mu(core.mul(x, y)) != aut.endo_compose(aut.psi_mu(x), aut.psi_mu(y))
        nonmember += not aut.is_psi_member(aut.psi_mu(x))
    _check(out, timer, "identities.psi_homomorphism", "L_k embeds as a normal subgroup of Aut(L_k)",
           bad == 0 and nonmember == 0, f"{pairs} pairs, {bad} failures, {nonmember} non-members")

    bad = 0
    for _ in range(pairs):
        k = int(rng.choice(STAB_MODULI))
        x = core.letters_to_element(k, core.random_word(int(rng.integers(0, 9)), rng))
        g = aut.random_automorphism(k, rng)
        conj = aut.endo_product(k, [aut.endo_invert(g), aut.psi_mu(x), g])
        bad += not aut.is_psi_member(conj)
    _check(out, timer, "identities.psi_normal", "L_k embeds as a normal subgroup of Aut(L_k)",
           bad == 0, f"{pairs} conjugates, {bad} outside the image")

    bad = 0
    for _ in range(pairs):
        k = int(rng.choice(STAB_MODULI))
        e1 = aut.random_automorphism(k, rng, positive=True)
        e2 = aut.random_automorphism(k, rng, positive=True)
        bad += aut.sigma_(aut.endo_compose(e1, e2)) != aut.endo_compose(aut.sigma_(e1), aut.sigma_(e2))
    _check(out, timer, "identities.sigma_homomorphism", "forgetting j is a homomorphism on Aut_+",
           bad == 0, f"{pairs} pairs, {bad} failures")
    return out


ANCHOR_DECOMP = "automorphisms fixing x factor over named generators"


def block_decompose(rng, samples: int = 100) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()
    for label, moduli in (("prime", (2, 3, 5, 7)), ("prime_power", (4, 8, 9, 27)),
                          ("squarefree", (6, 10, 15, 30))):
        bad = budget = 0
        for k in moduli:
            for _ in range(samples):
                e = aut.random_stab_automorphism(k, rng)
                try:
                    word = aut.decompose(e)
                except IterationBudgetExceeded:
                    budget += 1
                    continue
                except AssertionError:
                    bad += 1
                    continue
                bad += aut.evaluate_word(k, word) != e
        _check(out, timer, f"decompose.{label}", ANCHOR_DECOMP, bad == 0 and budget == 0,
               f"k={','.join(map(str, moduli))}, {samples} each, {bad} mismatches, "
               f"{budget} budget overruns")
    return out


ANCHOR_LUC = "automorphism images keep stabilizer depth, losing at most one level per iota factor"


def random_mixed(k: int, rng, extra: int = 2) -> tuple[aut.LampEndo, int]:
    """Random product containing a stabilizer factor, zeta and iota (plus ``extra`` random ones).

    Returns the product and its number of iota factors.
    """
    kinds = [0, 1, 2] + [int(v) for v in rng.integers(0, 3, size=extra)]
    rng.shuffle(kinds)
    parts = []
    for kind in kinds:
        if kind == 0:
            parts.append(aut.random_stab_automorphism(k, rng))
        elif kind == 1:
            parts.append(aut.zeta(k))
        else:
            parts.append(aut.iota(k))
    return aut.endo_product(k, parts), kinds.count(2)


def block_luc(rng, moduli=(2, 3, 4, 6), samples: int = 500, Lmax: int = 12) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()
    for k in moduli:
        reports = [
            aut.luc_check(aut.random_stab_automorphism(k, rng), "stab-xi", samples, Lmax, rng),
            aut.luc_check(aut.zeta(k), "zeta", samples, Lmax, rng),
            aut.luc_check(aut.iota(k), "iota", samples, Lmax, rng),
        ]
        mixed, n_iota = random_mixed(k, rng)
        reports.append(aut.luc_check(mixed, "mixed", samples, Lmax, rng, iota_factors=n_iota))
        for rep in reports:
            _check(out, timer, f"luc.k{k}.{rep.kind}", ANCHOR_LUC, rep.ok,
                   f"{rep.samples} samples, allowed loss {rep.allowed_loss}, worst loss "
                   f"{rep.worst_loss}, {len(rep.violations)} violations")
    return out


ANCHOR_AUTCHECK = "an endomorphism is an automorphism iff r = +-1 and the stabilizer part is invertible"


def block_autcheck(rng, samples: int = 200) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()
    for k in STAB_MODULI:
        disagree = positives = 0
        for n in range(samples):
            if n % 2:
                i = aut.random_unit(k, rng)
            else:
                i = aut.random_laurent(k, rng)
            r = int(rng.choice([1, -1, 1, -1, 0, 2]))
            e = aut.LampEndo(k, i, aut.random_laurent(k, rng), r)
            fast = aut.is_automorphism(e)
            positives += fast
            disagree += fast != aut.brute_is_automorphism(e)
        _check(out, timer, f"autcheck.k{k}", ANCHOR_AUTCHECK, disagree == 0,
               f"{samples} endos, {positives} automorphisms, {disagree} disagreements")
    return out


ANCHOR_NFF = "conjugation by a in L_2 has the torsion subgroup as fixed points"


def block_nff(rng, radius: int = 6) -> list[Check]:
    out: list[Check] = []
    timer = _Timer()
    theta = aut.inner(core.alpha(2))
    elems = aut.ball(2, radius)
    torsion = [x for x in elems if core.is_torsion(x)]
    unfixed = sum(not aut.is_fixed(theta, x) for x in torsion)
    _check(out, timer, "nff.torsion_fixed", ANCHOR_NFF, unfixed == 0,
           f"{len(torsion)} torsion elements in the radius-{radius} ball, {unfixed} not fixed")
    powers = [n for n in range(-radius, radius + 1) if n]
    fixed = [n for n in powers if aut.is_fixed(theta, core.power(core.xi(2), n))]
    _check(out, timer, "nff.shifts_moved", ANCHOR_NFF, not fixed,
           f"x^n fixed for n in {fixed}" if fixed else f"no x^n fixed for 1 <= |n| <= {radius}")
    return out


BLOCKS: dict[str, Callable] = {
    "adding": block_adding,
    "aleshin": block_aleshin,
    "ex44": block_ex44,
    "oracle": block_oracle,
    "identities": block_identities,
    "decompose": block_decompose,
    "luc": block_luc,
    "autcheck": block_autcheck,
    "nff": block_nff,
}


def block_rng(seed: int, name: str) -> np.random.Generator:
    """Per-block generator so a block's stream does not depend on which other blocks run."""
    return np.random.default_rng([seed, list(BLOCKS).index(name)])


def run(seed: int = 0, only: list[str] | None = None) -> list[Check]:
    names = list(BLOCKS) if not only else [n for n in BLOCKS if n in only]
    checks: list[Check] = []
    for name in names:
        checks.extend(BLOCKS[name](block_rng(seed, name)))
    return checks


def render_text(checks: list[Check], seed: int) -> str:
    lines = [f"verify-paper seed={seed}"]
    lines += [c.text() for c in checks]
    n_pass = sum(c.ok for c in checks)
    lines.append(f"summary: {n_pass}/{len(checks)} passed")
    return "\n".join(lines) + "\n"


def render_jsonl(checks: list[Check]) -> str:
    return "".join(json.dumps(c.record(), sort_keys=True) + "\n" for c in checks)
