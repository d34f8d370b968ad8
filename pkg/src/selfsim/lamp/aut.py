"""Endomorphisms and automorphisms of ``L_k``.

An endomorphism is fixed by the images of the two generators::

    a -> prod b(n)^{i[n]}            (any torsion element)
    x -> prod b(n)^{j[n]} * x^r

so ``b(m) -> prod b(n)^{i[n - r m]}``.  Composition is written left to
right: ``endo_compose(e1, e2)`` applies ``e1`` first.

The subgroup fixing ``x`` (``j = 0``, ``r = 1``) is abelian and isomorphic
to the unit group of the Laurent ring ``Z_k[t, 1/t]`` via ``i``; most of the
decomposition machinery below is unit arithmetic in that ring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ..errors import (
    BadDivisor,
    InvalidParameter,
    InvalidUnit,
    IterationBudgetExceeded,
    ModulusMismatch,
    NotAnAutomorphism,
    NotCoprime,
    NotInStab,
    NotPositiveAutomorphism,
    NotPrime,
    NotSquarefree,
)
from .core import (
    INF,
    LampElement,
    ZkLaurent,
    check_modulus,
    conjugate,
    identity,
    inv,
    mul,
    one_minus_t_power,
    power,
    stab_length,
    xi,
)


# ---------------------------------------------------------------------------
# number theory helpers
# ---------------------------------------------------------------------------
def factorize(k: int) -> list[tuple[int, int]]:
    """Prime factorization as sorted ``(p, s)`` pairs."""
    out = []
    n, p = k, 2
    while p * p <= n:
        if n % p == 0:
            s = 0
            while n % p == 0:
                n //= p
                s += 1
            out.append((p, s))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def primes_of(k: int) -> list[int]:
    return [p for p, _ in factorize(k)]


def is_prime(k: int) -> bool:
    f = factorize(k)
    return len(f) == 1 and f[0][1] == 1


def is_squarefree(k: int) -> bool:
    return all(s == 1 for _, s in factorize(k))


def valuation(c: int, p: int, cap: int) -> int:
    """``p``-adic valuation of ``c`` read modulo ``p^cap`` (``cap`` for zero)."""
    c %= p**cap
    if c == 0:
        return cap
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def crt(residues: Sequence[tuple[int, int]]) -> int:
    """Combine ``(value, modulus)`` pairs with pairwise coprime moduli."""
    x, m = 0, 1
    for a, n in residues:
        t = ((a - x) * pow(m, -1, n)) % n
        x += m * t
        m *= n
    return x % m


# ---------------------------------------------------------------------------
# the endomorphism type
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LampEndo:
    modulus: int
    i: ZkLaurent
    j: ZkLaurent = field(default=None)  # type: ignore[assignment]
    r: int = 1

    def __post_init__(self):
        k = check_modulus(self.modulus)
        if self.j is None:
            object.__setattr__(self, "j", ZkLaurent.zero(k))
        if self.i.modulus != k or self.j.modulus != k:
            raise ModulusMismatch("endomorphism data over a different modulus")
        object.__setattr__(self, "r", int(self.r))

    @classmethod
    def of(cls, k: int, i=None, j=None, r: int = 1) -> "LampEndo":
        k = check_modulus(k)
        def conv(d):
            if d is None:
                return ZkLaurent.zero(k)
            return d if isinstance(d, ZkLaurent) else ZkLaurent.of(k, d)
        return cls(k, conv({0: 1} if i is None else i), conv(j), r)

    @property
    def alpha_image(self) -> LampElement:
        return LampElement(self.modulus, self.i, 0)

    @property
    def xi_image(self) -> LampElement:
        return LampElement(self.modulus, self.j, self.r)

    @property
    def in_stab_xi(self) -> bool:
        return self.r == 1 and not self.j

    def __mul__(self, other: "LampEndo") -> "LampEndo":
        return endo_compose(self, other)

    def __pow__(self, n: int) -> "LampEndo":
        return endo_power(self, n)

    def __str__(self) -> str:
        return format_endo(self)


def format_endo(e: LampEndo) -> str:
    return f"endo k={e.modulus} r={e.r} i={e.i} j={e.j}"


def endo_identity(k: int) -> LampEndo:
    return LampEndo.of(k)


def _check_same(*objs) -> int:
    ks = {o.modulus for o in objs}
    if len(ks) != 1:
        raise ModulusMismatch(f"moduli differ: {sorted(ks)}")
    return ks.pop()


def _image_of_lamps(e: LampEndo, lamps: ZkLaurent) -> ZkLaurent:
    """Image of the torsion element ``prod b(m)^{c_m}``: ``sum_m c_m * i shifted by r m``."""
    out = ZkLaurent.zero(e.modulus)
    acc: dict[int, int] = {}
    for m, c in lamps.terms:
        for n, d in e.i.terms:
            key = n + e.r * m
            acc[key] = acc.get(key, 0) + c * d
    return ZkLaurent.of(e.modulus, acc) if acc else out


def endo_apply(e: LampEndo, x: LampElement) -> LampElement:
    _check_same(e, x)
    lamps = LampElement(e.modulus, _image_of_lamps(e, x.beta), 0)
    return mul(lamps, power(e.xi_image, x.shift))


def endo_compose(e1: LampEndo, e2: LampEndo) -> LampEndo:
    """``e1`` followed by ``e2``, recomputed from the images of the generators."""
    k = _check_same(e1, e2)
    a_img = endo_apply(e2, e1.alpha_image)
    x_img = endo_apply(e2, e1.xi_image)
    return LampEndo(k, a_img.beta, x_img.beta, x_img.shift)


def endo_power(e: LampEndo, n: int) -> LampEndo:
    if n < 0:
        return endo_power(endo_invert(e), -n)
    result, base = endo_identity(e.modulus), e
    while n:
        if n & 1:
            result = endo_compose(result, base)
        n >>= 1
        if n:
            base = endo_compose(base, base)
    return result


def endo_product(k: int, factors: Iterable[LampEndo]) -> LampEndo:
    out = endo_identity(k)
    for f in factors:
        out = endo_compose(out, f)
    return out


# ---------------------------------------------------------------------------
# units of Z_k[t, 1/t]
# ---------------------------------------------------------------------------
def unit_check(i: ZkLaurent) -> bool:
    """Laurent unit test: modulo every prime ``p | k`` exactly one coefficient survives."""
    if not i:
        return False
    for p in primes_of(i.modulus):
        if sum(1 for _, c in i.terms if c % p) != 1:
            return False
    return True


def is_automorphism(e: LampEndo) -> bool:
    return e.r in (1, -1) and unit_check(e.i)


def automorphism_reason(e: LampEndo) -> str:
    if e.r not in (1, -1):
        return f"shift r = {e.r} is not +1 or -1"
    if not e.i:
        return "the image of a is trivial"
    for p in primes_of(e.modulus):
        n = sum(1 for _, c in e.i.terms if c % p)
        if n != 1:
            return f"i reduced mod {p} has {n} nonzero coefficients"
    return "r = +-1 and i is a unit"


def _prime_power_inverse(i: ZkLaurent, p: int, s: int) -> dict[int, int]:
    q = p**s
    terms = [(n, c % q) for n, c in i.terms if c % q]
    units = [(n, c) for n, c in terms if c % p]
    if len(units) != 1:
        raise NotAnAutomorphism(f"not a unit modulo {q}")
    m, c = units[0]
    cinv = pow(c, -1, q)
    # c^-1 t^-m i = 1 + N with N divisible by p, hence N^s = 0 mod p^s.
    nil = ZkLaurent.of(q, [(n - m, cinv * d) for n, d in terms if n != m])
    acc = ZkLaurent.monomial(q, 0, 1)
    term = ZkLaurent.monomial(q, 0, 1)
    neg = -nil
    for _ in range(1, s):
        term = term * neg
        if not term:
            break
        acc = acc + term
    return {n - m: cinv * d for n, d in acc.terms}


def laurent_inverse(i: ZkLaurent) -> ZkLaurent:
    """Inverse in ``Z_k[t, 1/t]``, prime power by prime power, glued by CRT."""
    k = i.modulus
    parts = [(p**s, _prime_power_inverse(i, p, s)) for p, s in factorize(k)]
    support = sorted({n for _, d in parts for n in d})
    coeffs = {n: crt([(d.get(n, 0), q) for q, d in parts]) for n in support}
    out = ZkLaurent.of(k, coeffs)
    if i * out != ZkLaurent.monomial(k, 0, 1):
        raise AssertionError("Laurent inverse failed to verify")
    return out


def _solve_local(A: np.ndarray, b: np.ndarray, p: int, s: int) -> bool:
    """Decide solvability of ``A x = b`` over ``Z_{p^s}`` by full-pivot elimination."""
    q = p**s
    A = A.copy() % q
    b = b.copy() % q
    rows, cols = A.shape
    free_rows = list(range(rows))
    free_cols = list(range(cols))
    while free_rows and free_cols:
        sub = A[np.ix_(free_rows, free_cols)]
        if not sub.any():
            break
        vals = np.zeros(sub.shape, dtype=np.int64)
        for e in range(1, s + 1):
            vals += (sub % p**e == 0)
        r_i, c_i = np.unravel_index(np.argmin(vals), vals.shape)
        pr, pc = free_rows[r_i], free_cols[c_i]
        v = int(vals[r_i, c_i])
        unit = (int(A[pr, pc]) // p**v) % q
        uinv = pow(unit, -1, q)
        A[pr] = (A[pr] * uinv) % q
        b[pr] = (b[pr] * uinv) % q
        pv = p**v
        for rr in range(rows):
            if rr != pr and A[rr, pc]:
                f = int(A[rr, pc]) // pv
                A[rr] = (A[rr] - f * A[pr]) % q
                b[rr] = (b[rr] - f * b[pr]) % q
        free_rows.remove(pr)
        free_cols.remove(pc)
        if b[pr] % pv:
            return False
    return all(b[rr] % q == 0 for rr in free_rows)


def brute_force_inverse_exists(i: ZkLaurent, window: tuple[int, int] | None = None) -> bool:
    """Search for ``u`` with ``i * u = 1`` among Laurent polynomials supported in ``window``.

    The linear system over ``Z_k`` is split into prime-power components, each
    solved exactly.  The default window is wide enough to contain the inverse
    whenever one exists: for support ``[a, b]`` of width ``w`` and largest
    prime exponent ``s`` it is ``[-b - (s-1) w, -a + (s-1) w]``.
    """
    k = i.modulus
    if not i:
        return False
    fac = factorize(k)
    a, b = i.min_exp, i.max_exp
    if window is None:
        s = max(e for _, e in fac)
        w = b - a
        window = (-b - (s - 1) * w, -a + (s - 1) * w)
    lo, hi = window
    unknowns = list(range(lo, hi + 1))
    eqs = list(range(a + lo, b + hi + 1))
    A = np.zeros((len(eqs), len(unknowns)), dtype=np.int64)
    for col, n in enumerate(unknowns):
        for m, c in i.terms:
            A[m + n - eqs[0], col] = c
    rhs = np.zeros(len(eqs), dtype=np.int64)
    if not eqs[0] <= 0 <= eqs[-1]:
        return False
    rhs[-eqs[0]] = 1
    return all(_solve_local(A, rhs, p, s) for p, s in fac)


def brute_is_automorphism(e: LampEndo, window: tuple[int, int] | None = None) -> bool:
    return e.r in (1, -1) and brute_force_inverse_exists(e.i, window)


# ---------------------------------------------------------------------------
# named generators
# ---------------------------------------------------------------------------
def _unit(k: int, j: int) -> int:
    if math.gcd(j, k) != 1:
        raise InvalidUnit(f"{j} is not a unit modulo {k}")
    return j % k


def lambda_(k: int) -> LampEndo:
    """Conjugation by ``x``: ``a -> b(1)``, ``x -> x``."""
    return LampEndo.of(k, {1: 1})


def eta(k: int, j: int) -> LampEndo:
    """``a -> a^j`` for a unit ``j``."""
    return LampEndo.of(k, {0: _unit(k, j)})


def gamma(k: int, m: int, j: int) -> LampEndo:
    """``a -> b(m)^j`` for a unit ``j``."""
    return LampEndo.of(k, {m: _unit(k, j)})


def delta(k: int, m: int, c: int) -> LampEndo:
    """``a -> a b(m)^c``; only parameters yielding an automorphism are accepted."""
    if m == 0:
        raise InvalidParameter("delta needs a nonzero index m")
    e = LampEndo.of(k, {0: 1, m: c})
    if not is_automorphism(e):
        raise InvalidParameter(f"delta({m},{c}) is not an automorphism of L_{k}")
    return e


def rho(k: int, ell: int) -> LampEndo:
    """``a -> a^p b(1)^(k/p)`` for the ``ell``-th prime ``p`` of a squarefree ``k`` (1-based)."""
    k = check_modulus(k)
    if not is_squarefree(k):
        raise NotSquarefree(f"{k} is not squarefree")
    ps = primes_of(k)
    if not 1 <= ell <= len(ps):
        raise InvalidParameter(f"prime index {ell} outside 1..{len(ps)}")
    p = ps[ell - 1]
    return LampEndo.of(k, {0: p, 1: k // p})


def iota(k: int) -> LampEndo:
    """``a -> a``, ``x -> a x``."""
    return LampEndo.of(k, {0: 1}, {0: 1}, 1)


def zeta(k: int) -> LampEndo:
    """``a -> a``, ``x -> x^-1``."""
    return LampEndo.of(k, {0: 1}, {}, -1)


def inner(g: LampElement) -> LampEndo:
    """Conjugation ``y -> g y g^-1``."""
    k = g.modulus
    a_img = conjugate(g, LampElement.of(k, {0: 1}))
    x_img = conjugate(g, xi(k))
    return LampEndo(k, a_img.beta, x_img.beta, x_img.shift)


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------
def endo_invert(e: LampEndo) -> LampEndo:
    if not is_automorphism(e):
        raise NotAnAutomorphism(automorphism_reason(e))
    k = e.modulus
    if e.r == -1:
        # e = zeta * P with P = zeta * e orientation preserving; zeta is an involution.
        P = endo_compose(zeta(k), e)
        out = endo_compose(endo_invert(P), zeta(k))
    else:
        stab_inv = LampEndo(k, laurent_inverse(e.i), ZkLaurent.zero(k), 1)
        # e = S * T with S = (i, 0, 1) and T = (a, j, 1); T^-1 replaces j by -j.
        j_inv = endo_apply(stab_inv, LampElement(k, -e.j, 0)).beta
        out = LampEndo(k, stab_inv.i, j_inv, 1)
    if endo_compose(e, out) != endo_identity(k) or endo_compose(out, e) != endo_identity(k):
        raise AssertionError("inverse failed to verify")
    return out


# ---------------------------------------------------------------------------
# decompositions of automorphisms fixing x
# ---------------------------------------------------------------------------
class Gen(NamedTuple):
    """A named generator raised to ``power``; ``args`` are its integer parameters."""

    name: str
    args: tuple[int, ...] = ()
    power: int = 1

    def build(self, k: int) -> LampEndo:
        base = GENERATORS[self.name](k, *self.args)
        return endo_power(base, self.power) if self.power != 1 else base

    def __str__(self) -> str:
        s = self.name + (f"({','.join(str(a) for a in self.args)})" if self.args else "")
        return s if self.power == 1 else f"{s}^{self.power}"


GENERATORS = {
    "lambda": lambda_,
    "eta": eta,
    "gamma": gamma,
    "delta": delta,
    "rho": rho,
    "iota": iota,
    "zeta": zeta,
    "id": endo_identity,
}


def format_word(word: Sequence[Gen]) -> str:
    return "*".join(str(g) for g in word) if word else "id"


def evaluate_word(k: int, word: Sequence[Gen]) -> LampEndo:
    return endo_product(k, (g.build(k) for g in word))


def _require_stab_aut(e: LampEndo) -> None:
    if not e.in_stab_xi:
        raise NotInStab("automorphism must fix x (j = 0, r = 1)")
    if not is_automorphism(e):
        raise NotAnAutomorphism(automorphism_reason(e))


def decompose_stab_prime(e: LampEndo) -> tuple[int, int]:
    """``(m, j)`` with ``e = gamma(m, j)``, for a prime modulus."""
    if not is_prime(e.modulus):
        raise NotPrime(f"{e.modulus} is not prime")
    _require_stab_aut(e)
    (m, j), = e.i.terms
    if gamma(e.modulus, m, j) != e:
        raise AssertionError("recomposition failed")
    return m, j


def decompose_stab_prime_power(e: LampEndo) -> list[Gen]:
    """Positive word over ``lambda^n``, ``eta(u)``, ``delta(m, c)`` that multiplies out to ``e``.

    The reduction runs on ``e^-1``: multiplying ``e^-1`` by the emitted
    factors ends at the identity, and because the group is abelian the same
    factors multiply to ``e``.  Each round first normalizes the constant
    coefficient to 1 (shifting the unique unit coefficient to index 0 and
    scaling by its inverse) and then cancels the leftmost coefficient of
    least ``p``-adic valuation with a ``delta`` factor.
    """
    k = e.modulus
    fac = factorize(k)
    if len(fac) != 1:
        raise InvalidParameter(f"{k} is not a prime power")
    p, s = fac[0]
    _require_stab_aut(e)
    cur = laurent_inverse(e.i)
    word: list[Gen] = []
    budget = 64 * s * max(len(e.i), len(cur), 1)
    steps = 0
    while True:
        steps += 1
        if steps > budget:
            raise IterationBudgetExceeded(f"reduction exceeded {budget} steps")
        (m, c), = [(n, d) for n, d in cur.terms if d % p]
        if m != 0:
            word.append(Gen("lambda", (), -m))
            cur = cur.shift(-m)
        if c != 1:
            u = pow(c, -1, k)
            word.append(Gen("eta", (u,)))
            cur = cur.scale(u)
        rest = [(n, d) for n, d in cur.terms if n != 0]
        if not rest:
            break
        t = min(valuation(d, p, s) for _, d in rest)
        r, d = next((n, d) for n, d in rest if valuation(d, p, s) == t)
        word.append(Gen("delta", (r, (-d) % k)))
        cur = cur * ZkLaurent.of(k, {0: 1, r: -d})
    if evaluate_word(k, word) != e:
        raise AssertionError("recomposition failed")
    return word


def decompose_stab_squarefree(e: LampEndo) -> tuple[int, tuple[int, ...]]:
    """``(j, (m_1, ..., m_s))`` with ``e = eta(j) rho_1^{m_1} ... rho_s^{m_s}``."""
    k = e.modulus
    if not is_squarefree(k):
        raise NotSquarefree(f"{k} is not squarefree")
    ps = primes_of(k)
    if len(ps) < 2:
        raise InvalidParameter(f"{k} is prime; use decompose_stab_prime")
    _require_stab_aut(e)
    exps = []
    for p in ps:
        m, _ = decompose_stab_prime(reduce_modulus(e, p))
        exps.append(m)
    rest = e
    for ell, m in enumerate(exps, 1):
        rest = endo_compose(rest, endo_power(rho(k, ell), -m))
    if len(rest.i) != 1 or rest.i.terms[0][0] != 0 or rest.j or rest.r != 1:
        raise AssertionError("residual factor is not a unit scaling")
    j = rest.i.terms[0][1]
    recomposed = endo_product(k, [eta(k, j)] + [endo_power(rho(k, ell), m)
                                                for ell, m in enumerate(exps, 1)])
    if recomposed != e:
        raise AssertionError("recomposition failed")
    return j, tuple(exps)


def decompose(e: LampEndo) -> list[Gen]:
    """Dispatch on the modulus; returns a generator word recomposing to ``e``."""
    k = e.modulus
    if is_prime(k):
        m, j = decompose_stab_prime(e)
        return [Gen("gamma", (m, j))]
    if len(factorize(k)) == 1:
        return decompose_stab_prime_power(e)
    if is_squarefree(k):
        j, exps = decompose_stab_squarefree(e)
        word = [Gen("eta", (j,))] if j != 1 else []
        word += [Gen("rho", (ell,), m) for ell, m in enumerate(exps, 1) if m]
        return word
    # TODO(decompose-general-k): glue prime-power words by CRT once a
    # generating set for mixed moduli such as 12 is fixed.
    raise InvalidParameter(f"no decomposition algorithm for modulus {k} "
                           "(needs a prime, a prime power or a squarefree modulus)")


# ---------------------------------------------------------------------------
# structural maps
# ---------------------------------------------------------------------------
def sigma_(e: LampEndo) -> LampEndo:
    """Forget the ``j`` data of an orientation-preserving automorphism."""
    if not is_automorphism(e):
        raise NotAnAutomorphism(automorphism_reason(e))
    if e.r != 1:
        raise NotPositiveAutomorphism("sigma_ needs r = +1")
    return LampEndo(e.modulus, e.i, ZkLaurent.zero(e.modulus), 1)


def psi_mu(x: LampElement) -> LampEndo:
    """Embed ``L_k`` into its automorphism group.

    Writing ``x = x^r * prod b(n)^{j[n]}`` (lamps to the right of the shift),
    the image sends ``a -> b(-r)`` and ``x -> prod b(n)^{j[n]} x``.  So
    ``a`` goes to ``iota`` and ``x`` to the inverse of ``lambda``.
    """
    k = x.modulus
    return LampEndo(k, ZkLaurent.monomial(k, -x.shift, 1), x.beta.shift(-x.shift), 1)


def is_psi_member(e: LampEndo) -> bool:
    return e.r == 1 and len(e.i) == 1 and e.i.terms[0][1] == 1


def reduce_modulus(e: LampEndo, u: int) -> LampEndo:
    """Coefficientwise reduction of an automorphism fixing ``x`` to ``Z_u``."""
    k = e.modulus
    if u < 2 or k % u or math.gcd(u, k // u) != 1:
        raise BadDivisor(f"{u} is not a unitary divisor of {k} (need u | k, gcd(u, k/u) = 1)")
    if not e.in_stab_xi:
        raise NotInStab("reduction is defined on automorphisms fixing x")
    return LampEndo(u, e.i.reduce(u), ZkLaurent.zero(u), 1)


def embed(x: LampElement, v: int) -> LampElement:
    """``L_u -> L_{uv}`` sending ``a -> a^v`` and ``x -> x``."""
    u = x.modulus
    if v < 2 or math.gcd(u, v) != 1:
        raise NotCoprime(f"gcd({u}, {v}) != 1")
    k = u * v
    return LampElement(k, ZkLaurent.of(k, [(n, v * c) for n, c in x.beta.terms]), x.shift)


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------
def is_fixed(e: LampEndo, x: LampElement) -> bool:
    return endo_apply(e, x) == x


def ball(k: int, radius: int) -> list[LampElement]:
    """Distinct elements of word length at most ``radius`` over ``a^{+-1}, x^{+-1}``, in BFS order."""
    gens = [LampElement.of(k, {0: 1}), LampElement.of(k, {0: -1}), xi(k), inv(xi(k))]
    start = identity(k)
    seen = {start}
    order = [start]
    frontier = [start]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for s in gens:
                h = mul(g, s)
                if h not in seen:
                    seen.add(h)
                    order.append(h)
                    nxt.append(h)
        frontier = nxt
    return order


def fix_sample(e: LampEndo, radius: int) -> list[LampElement]:
    return [x for x in ball(e.modulus, radius) if is_fixed(e, x)]


# ---------------------------------------------------------------------------
# level-preservation checks
# ---------------------------------------------------------------------------
LUC_LOSS = {"stab-xi": 0, "zeta": 0, "iota": 1}


def _ord_one_minus_t(k: int, length: int) -> int:
    if length <= 1:
        return 1
    target = (1,) + (0,) * (length - 1)
    n = 1
    while one_minus_t_power(n, k, length) != target:
        n += 1
    return n


def random_level_stabilizer(k: int, level: int, rng: np.random.Generator,
                            degree: int = 4, conj_len: int = 4) -> LampElement:
    """Random element fixing all words of length ``level``.

    The lamp series is ``t^level * P(t)`` rewritten in powers of ``1 - t``,
    the shift is a multiple of the order of ``1 - t`` modulo ``t^level``, and
    the result is conjugated by a random element (level stabilizers are
    normal).
    """
    deg = int(rng.integers(0, degree + 1))
    P = [int(c) for c in rng.integers(0, k, size=deg + 1)]
    # coefficients of t^level P(t) as a polynomial in t, then substitute t = 1 - s
    poly_t = [0] * level + P
    lamps: dict[int, int] = {}
    for n, c in enumerate(poly_t):
        if c:
            # t^n = (1 - s)^n = sum_j binom(n, j) (-1)^j s^j
            for jj, v in enumerate(one_minus_t_power(n, k, n + 1)):
                lamps[jj] = lamps.get(jj, 0) + c * v
    order = _ord_one_minus_t(k, level)
    shift = order * int(rng.integers(-2, 3))
    g = LampElement.of(k, lamps, shift)
    conj = identity(k)
    for _ in range(conj_len):
        choice = int(rng.integers(0, 4))
        step = [LampElement.of(k, {0: 1}), LampElement.of(k, {0: -1}), xi(k), inv(xi(k))][choice]
        conj = mul(conj, step)
    return conjugate(conj, g)


@dataclass
class LucReport:
    kind: str
    modulus: int
    samples: int
    allowed_loss: int
    violations: list = field(default_factory=list)
    worst_loss: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def luc_check(e: LampEndo, kind: str, samples: int, Lmax: int,
              rng: np.random.Generator, iota_factors: int | None = None) -> LucReport:
    """Check that ``e`` moves stabilizer depth down by at most the allowance for ``kind``.

    Kinds ``stab-xi`` and ``zeta`` allow no loss, ``iota`` one level, and
    ``mixed`` as many levels as ``iota_factors``.
    """
    if not is_automorphism(e):
        raise NotAnAutomorphism(automorphism_reason(e))
    if kind == "mixed":
        if iota_factors is None:
            raise InvalidParameter("mixed kind needs the number of iota factors")
        allowed = iota_factors
    elif kind in LUC_LOSS:
        allowed = LUC_LOSS[kind]
    else:
        raise InvalidParameter(f"unknown kind {kind!r}")
    k = e.modulus
    rep = LucReport(kind, k, 0, allowed)
    while rep.samples < samples:
        level = int(rng.integers(0, Lmax + 1))
        g = random_level_stabilizer(k, level, rng)
        L = stab_length(g)
        if L == INF or L > Lmax:
            continue
        rep.samples += 1
        L2 = stab_length(endo_apply(e, g))
        loss = int(L - L2) if L2 != INF else 0
        rep.worst_loss = max(rep.worst_loss, loss)
        if L2 < L - allowed:
            rep.violations.append((g, int(L), L2))
    return rep


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------
def random_unit(k: int, rng: np.random.Generator, lo: int = -3, hi: int = 3,
                density: float = 0.5) -> ZkLaurent:
    """Random unit of ``Z_k[t, 1/t]`` supported in ``[lo, hi]``.

    For each prime power ``p^s`` dividing ``k`` a unit monomial is placed at
    a random index and the other indices receive random multiples of ``p``;
    the components are glued coefficientwise by CRT.
    """
    positions = list(range(lo, hi + 1))
    comps = []
    for p, s in factorize(k):
        q = p**s
        m = int(rng.choice(positions))
        coeffs = {}
        for n in positions:
            if n == m:
                c = int(rng.integers(1, q))
                while c % p == 0:
                    c = int(rng.integers(1, q))
                coeffs[n] = c
            elif s > 1 and rng.random() < density:
                coeffs[n] = p * int(rng.integers(0, q // p))
        comps.append((q, coeffs))
    out = {n: crt([(d.get(n, 0), q) for q, d in comps]) for n in positions}
    return ZkLaurent.of(k, out)


def random_laurent(k: int, rng: np.random.Generator, lo: int = -3, hi: int = 3,
                   density: float = 0.5) -> ZkLaurent:
    return ZkLaurent.of(k, {n: int(rng.integers(0, k)) for n in range(lo, hi + 1)
                            if rng.random() < density})


def random_stab_automorphism(k: int, rng: np.random.Generator, lo: int = -3, hi: int = 3) -> LampEndo:
    return LampEndo(k, random_unit(k, rng, lo, hi), ZkLaurent.zero(k), 1)


def random_automorphism(k: int, rng: np.random.Generator, positive: bool = False) -> LampEndo:
    """Random automorphism with unit ``i``, random ``j`` and (unless ``positive``) random sign."""
    r = 1 if positive else int(rng.choice([1, -1]))
    return LampEndo(k, random_unit(k, rng), random_laurent(k, rng), r)
