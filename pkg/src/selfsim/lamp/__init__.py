"""The lamplighter groups ``Z_k wr Z``: elements, series action and automorphisms."""
from __future__ import annotations

from .aut import (
    Gen,
    LampEndo,
    brute_force_inverse_exists,
    brute_is_automorphism,
    decompose,
    decompose_stab_prime,
    decompose_stab_prime_power,
    decompose_stab_squarefree,
    delta,
    embed,
    endo_apply,
    endo_compose,
    endo_identity,
    endo_invert,
    endo_power,
    eta,
    evaluate_word,
    fix_sample,
    gamma,
    inner,
    iota,
    is_automorphism,
    is_fixed,
    is_psi_member,
    lambda_,
    laurent_inverse,
    luc_check,
    psi_mu,
    reduce_modulus,
    rho,
    sigma_,
    zeta,
)
from .core import (
    INF,
    LampElement,
    TruncSeries,
    ZkLaurent,
    act_series,
    act_word,
    alpha,
    beta,
    depth_distance_lamp,
    elem_order,
    from_word,
    identity,
    inv,
    is_torsion,
    mul,
    stab_length,
    xi,
)
from .syntax import parse_endo, parse_gen_word

__all__ = [name for name in dir() if not name.startswith("_")]
