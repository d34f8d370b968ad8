"""Acceptance criteria 1-9: each runs its reproduction block with seed 0 under a wall-clock limit.

Run directly (``python tests/test_acceptance.py``) or through pytest; either
way one PASS/FAIL line per criterion is printed.
"""
from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

from selfsim import verify

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES  # noqa: E402

SEED = 0

# criterion number -> (title, verify block, time limit in seconds)
CRITERIA = {
    1: ("adding-machine quotient orders 2^m, m=1..10", "adding", 5.0),
    2: ("Aleshin level-2 permutations and stabilizer membership", "aleshin", 1.0),
    3: ("product machine level checks n=1..10 and commutation", "ex44", 5.0),
    4: ("series action equals Cayley-machine simulation", "oracle", 30.0),
    5: ("endomorphism identity suite", "identities", 30.0),
    6: ("stabilizer decomposition round trips", "decompose", 60.0),
    7: ("continuity level inequalities", "luc", 30.0),
    8: ("automorphism test agrees with brute-force inverse search", "autcheck", 30.0),
    9: ("conjugation by a fixes exactly the torsion in the ball", "nff", 5.0),
}


def evaluate(number: int, seed: int = SEED) -> tuple[bool, str]:
    title, block, limit = CRITERIA[number]
    t0 = time.perf_counter()
    checks = verify.BLOCKS[block](verify.block_rng(seed, block))
    elapsed = time.perf_counter() - t0
    failed = [c.name for c in checks if not c.ok]
    ok = bool(checks) and not failed and elapsed < limit
    status = "PASS" if ok else "FAIL"
    detail = f"{len(checks) - len(failed)}/{len(checks)} checks, {elapsed:.2f}s (limit {limit:g}s)"
    if failed:
        detail += f", failed: {', '.join(failed)}"
    return ok, f"{status} criterion {number}: {title}: {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, line = evaluate(number)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_full_report_is_deterministic():
    a = verify.render_text(verify.run(SEED, ["aleshin", "identities"]), SEED)
    b = verify.render_text(verify.run(SEED, ["aleshin", "identities"]), SEED)
    assert a == b


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
