"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v``; the summary lines
are printed at the end of the session.
"""

import functools
import time
from functools import lru_cache

import numpy as np

from psucentre import pipeline, zkncf
from psucentre.classalg import check_tensor
from psucentre.commalg import loewy_profile
from psucentre.truncpoly import distinguishable, tensor_truncated
from psucentre.unitary import BIG_BUDGET, DEFAULT_BUDGET

from helpers import ACCEPTANCE, brute_force_radical_agrees, field, random_algebra

# Loewy profiles of Z(B) (principal block of PSU(3,q)) and Z(b) (its Brauer
# correspondent in N).
EXPECTED_B = {3: (13, 12, 4, 0), 4: (21, 20, 5, 0), 5: (13, 12, 2, 0), 8: (27, 26, 3, 0)}
EXPECTED_b = {3: (13, 12, 3, 0), 4: (21, 20, 4, 0), 5: (13, 12, 1, 0), 8: (27, 26, 2, 0)}
PRIME_POWERS_16 = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, f"criterion {n}: {detail}"


def criterion(n):
    """Record a FAIL line when the check itself raises."""
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            try:
                fn()
            except Exception as e:
                ACCEPTANCE.setdefault(n, (False, f"{type(e).__name__}: {e}"))
                raise
        return run
    return wrap


@lru_cache(maxsize=None)
def full_group(q):
    """analyze_g from scratch, with its wall time."""
    budget = BIG_BUDGET if q == 8 else DEFAULT_BUDGET
    t = time.perf_counter()
    sections, objs = pipeline.analyze_g(field(q), budget=budget)
    return sections, objs, time.perf_counter() - t


@lru_cache(maxsize=None)
def normalizer_centre(q):
    return pipeline.analyze_n(field(q))


def group_criterion(n, q, limit):
    sections, _, secs = full_group(q)
    c = sections["centre_g"]
    prof = tuple(c["principal_profile"])
    failed = [k for k, v in sections["checks"].items() if not v]
    ok = prof == EXPECTED_B[q] and secs <= limit and not failed
    detail = f"q={q} principal {prof} (want {EXPECTED_B[q]}), {secs:.1f}s (limit {limit}s)"
    if failed:
        detail += f", failed checks {failed}"
    if n == 1:
        ok = ok and c["dim"] == 22 and c["n_blocks"] == 2
        detail = f"dim Z = {c['dim']}, blocks = {c['n_blocks']}, " + detail
    record(n, ok, detail)


@criterion(1)
def test_criterion_01_psu_3_4():
    group_criterion(1, 4, 60)


@criterion(2)
def test_criterion_02_psu_3_3():
    group_criterion(2, 3, 30)


@criterion(3)
def test_criterion_03_psu_3_5():
    group_criterion(3, 5, 600)


@criterion(4)
def test_criterion_04_psu_3_8():
    group_criterion(4, 8, 90 * 60)


@criterion(5)
def test_criterion_05_brauer_correspondent():
    bad = []
    for q in (3, 4, 5, 8):
        prof = normalizer_centre(q)[1]["profile"].dims
        d = prof[0]
        want = (d, d - 1, (q + 1) // zkncf.gamma_of(q) - 1, 0)
        if prof != want or prof != EXPECTED_b[q]:
            bad.append(f"brute q={q}: {prof}")
    for q in PRIME_POWERS_16:
        got = loewy_profile(zkncf.mult_table(q).algebra()).dims
        if got != pipeline.closed_profile(q):
            bad.append(f"closed q={q}: {got} vs {pipeline.closed_profile(q)}")
    record(5, not bad, "; ".join(bad) or "brute-force q in {3,4,5,8} and closed form q <= 16 agree")


@criterion(6)
def test_criterion_06_crosscheck():
    bad = []
    for q in (2, 3, 4, 5):
        rep = zkncf.crosscheck(field(q))
        if not (rep["match"] and rep["mismatch_count"] == 0 and rep["bijection"]):
            bad.append(f"q={q}: {rep['mismatch_count']} mismatches")
    record(6, not bad, "; ".join(bad) or "tables equal entry-for-entry for q = 2, 3, 4, 5")


@criterion(7)
def test_criterion_07_lmn():
    res = {}
    for q in (2, 5, 8, 11, 17):
        res[q] = (zkncf.lmn(q), zkncf.lmn_bruteforce(field(q)))
    bad = [f"q={q}: {a} vs {b}" for q, (a, b) in res.items() if a != b]
    record(7, not bad, "; ".join(bad) or ", ".join(f"q={q}: {a}" for q, (a, _) in res.items()))


@criterion(8)
def test_criterion_08_algebra_properties():
    bad = []
    for q in PRIME_POWERS_16:
        checks = zkncf.check_model(zkncf.mult_table(q), associativity=True)
        bad += [f"closed q={q}: {k}" for k, v in checks.items() if not v]
    tensors = [(f"N q={q}", normalizer_centre(q)[1]["st"]) for q in (2, 3, 4, 5, 8)]
    tensors += [(f"G q={q}", full_group(q)[1]["st"]) for q in (3, 4, 5, 8)]
    for name, st in tensors:
        checks = check_tensor(st, associativity=True)
        bad += [f"{name}: {k}" for k, v in checks.items() if not v]
    record(8, not bad, "; ".join(bad) or f"closed form q <= 16 and {len(tensors)} group tensors pass")


@criterion(9)
def test_criterion_09_radical_oracle():
    bad = []
    for p in (2, 3):
        rng = np.random.default_rng(9000 + p)
        for i in range(100):
            A = random_algebra(rng, p, max_dim=6)
            if not brute_force_radical_agrees(A):
                bad.append(f"p={p} #{i}")
    record(9, not bad, "; ".join(bad) or "200 random algebras (100 over each of F_2, F_3) agree")


@criterion(10)
def test_criterion_10_tensor_suite():
    B = full_group(4)[1]["principal"]
    b = normalizer_centre(4)[1]["A"]
    tB = loewy_profile(tensor_truncated(B, 2))
    tb = loewy_profile(tensor_truncated(b, 2))
    ok = tB.loewy_length == 4 and tB.top_dim == 5 and tb.top_dim == 4
    detail = [f"q=4: B (len {tB.loewy_length}, top {tB.top_dim}), b top {tb.top_dim}"]
    for q in (3, 4, 5, 8):
        pB = loewy_profile(full_group(q)[1]["principal"])
        pb = normalizer_centre(q)[1]["profile"]
        d = distinguishable(pB, pb, field(q).p)
        ok = ok and d
        detail.append(f"q={q} distinguishable={d}")
    record(10, ok, ", ".join(detail))

