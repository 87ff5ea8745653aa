"""Acceptance checks, one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import random
import time
from fractions import Fraction

import pytest

from generators import random_blocks, random_prefix, random_tail
from oracles import mediant_qm, rationals
from qmfold.cahen import cahen_spec, growth_holds, verify_cf
from qmfold.cf import canonicalize, cf_from_rational
from qmfold.deriv import EndpointCapped, chain_factor_table, fn_difference_quotient, log2_fraction
from qmfold.folding import FoldInput, extract_z, fold_range_bounds, fold_step
from qmfold.minkowski import TARGETS, fixed_point_orbit, qm_of_cf, qm_of_rational
from qmfold.setm import (
    MSpec,
    block_boundaries,
    certify_image_membership,
    certify_membership,
    expand_prefix,
    kappa2,
    minimal_slack,
    minimal_spec,
)

SEED = 20240611


def image_of(a):
    return cf_from_rational(qm_of_cf(a).to_fraction())


def report(n, ok, detail, capsys=None):
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def check_1():
    start = time.perf_counter()
    count = bad = 0
    for x in rationals(300):
        count += 1
        if qm_of_rational(x).to_fraction() != mediant_qm(x):
            bad += 1
    elapsed = time.perf_counter() - start
    return bad == 0 and elapsed < 10, f"{count} rationals with q <= 300, {bad} mismatches, {elapsed:.2f}s"


def check_2():
    worked = [((2,), 0, 0, (2, 1, 1, 1)), ((2,), 0, 1, (2, 3, 1, 1)),
              ((2, 1, 2), 1, 0, (2, 1, 1, 1, 1, 2, 1, 2))]
    ok_worked = all(fold_step(FoldInput(b, p, s)) == e for b, p, s, e in worked)
    rng = random.Random(SEED)
    n, bad = 1200, 0
    for _ in range(n):
        prefix, s = random_prefix(rng, 24), rng.randint(0, 6)
        inp = FoldInput(image_of(prefix), (len(prefix) + 1) % 2, s)
        if canonicalize(fold_step(inp)) != image_of(prefix + (sum(prefix) + s,)):
            bad += 1
    return ok_worked and bad == 0, f"worked examples {'ok' if ok_worked else 'WRONG'}, {n} random folds, {bad} mismatches"


def check_3():
    rng = random.Random(SEED + 3)
    n, bad, hit_lo, hit_hi = 600, 0, 0, 0
    for _ in range(n):
        prefix, s = random_prefix(rng, 16), rng.randint(0, 6)
        inp = FoldInput(image_of(prefix), (len(prefix) + 1) % 2, s)
        gamma = prefix + (sum(prefix) + s,) + random_tail(rng)
        z = extract_z(image_of(gamma), inp)
        b = fold_range_bounds(inp)
        bad += not b.z_lo <= z <= b.z_hi
        hit_lo += z == b.z_lo
        hit_hi += z == b.z_hi
    edge = image_of((2, 10, 1)) == (2, 1023, 2) and extract_z((2, 1023, 2), FoldInput((2,), 0, 8)) == 1023
    return bad == 0 and edge, (f"{n} random gamma, {bad} outside bounds "
                               f"({hit_lo} at lower, {hit_hi} at upper); ?([2,10,1]) = [2,1023,2]: {edge}")


def check_4():
    widths = [Fraction(1, 10**3), Fraction(1, 10**5), Fraction(1, 10**9), Fraction(1, 10**12)]
    encs = [kappa2(w) for w in widths]
    nested = all(b.lo >= a.lo and b.hi <= a.hi for a, b in zip(encs, encs[1:]))
    narrow = all(e.width <= w for e, w in zip(encs, widths))
    k5 = encs[1]
    grid = k5.round_decimal(5)
    contains = Fraction("4.40105") in grid
    anchor = Fraction("4.401") < k5.lo and k5.hi < Fraction("4.402")
    ok = nested and narrow and contains and anchor
    return ok, (f"width 1e-5 enclosure {k5}, on the 1e-5 grid {grid} contains 4.40105: {contains}; "
                f"inside (4.401, 4.402): {anchor}; nested: {nested}")


def check_5():
    cs = cahen_spec(6)
    member = certify_membership(cs.spec).status == "pass"
    margins = all(cs.tau_margin_ok)
    growth = all(growth_holds(n) for n in range(3, 13))
    expected, stable, cf_ok = verify_cf(6, 200)
    ok = member and margins and growth and cf_ok
    return ok, (f"membership {member}, tau_k > 2 sigma_k + 2 for k <= 2: {margins}, "
                f"q_n growth n = 3..12: {growth}, CF {list(expected)} vs {len(stable)} stable quotients: {cf_ok}")


def check_6():
    rng = random.Random(SEED + 6)
    kappa = kappa2()
    specs, statuses, exact_checks, exact_bad = 0, [], 0, 0
    with_empty = 0
    for i in range(20):
        blocks = random_blocks(rng, 9)
        if i % 2 == 0 and all(blocks[1:]):
            blocks[rng.randint(1, 8)] = ()
        with_empty += not all(blocks[1:])
        extras = [rng.randint(0, 3) for _ in range(8)]
        spec = minimal_spec(blocks, kappa, extras)
        specs += 1
        if certify_membership(spec, kappa).status != "pass":
            statuses.append("not in M")
            continue
        rep = certify_image_membership(spec, 8, kappa)
        statuses.append(rep.status)
        for c in rep.checks:
            if c.exact is not None:
                exact_checks += 1
                exact_bad += not all(c.exact["holds"].values())
    ok = statuses == ["pass"] * 20 and exact_bad == 0 and exact_checks > 0
    counts = {s: statuses.count(s) for s in set(statuses)}
    return ok, (f"{specs} specs ({with_empty} with empty blocks), image verdicts {counts}, "
                f"{exact_checks} exact cross-checks, {exact_bad} bound violations")


def check_7():
    blocks = [(2,), (1,), (1,)]
    spec = MSpec(tuple(blocks), (8, minimal_slack(blocks, 2, kappa2().hi, (8,))))
    rows = [r for r in chain_factor_table(spec, 1) if r.level == 0]
    q1 = [r.log2_quotient for r in rows]
    decreasing = all(a.lo > b.hi for a, b in zip(q1[1:], q1[2:])) and q1[0].lo > q1[1].hi
    last_ok = q1[-1].hi < -3
    seq = expand_prefix(spec)
    best = None
    for j, t in enumerate(block_boundaries(spec)):
        try:
            q2 = fn_difference_quotient(seq[:t], 2)
        except EndpointCapped:
            continue
        best = (t, log2_fraction(q2), q1[j])
    n2_ok = best is not None and best[1].hi < -1 and best[1].hi < best[2].lo
    shown = ", ".join(f"{float(q.hi):.3f}" for q in q1)
    n2 = f"t={best[0]} log2 {float(best[1].hi):.3f} vs n=1 {float(best[2].hi):.3f}" if best else "none feasible"
    return decreasing and last_ok and n2_ok, (f"slacks {spec.slacks}, n=1 log2 quotients at t={block_boundaries(spec)}: "
                                              f"[{shown}]; n=2 deepest feasible {n2}")


def check_8():
    start = time.perf_counter()
    xs = sorted({Fraction(p, q) for q in range(1, 51) for p in range(q + 1)})
    counts, outside = {}, 0
    results = {}
    for x in xs:
        o = fixed_point_orbit(x)
        results[x] = o.classification
        counts[o.classification] = counts.get(o.classification, 0) + 1
        if o.target is not None and o.target not in TARGETS:
            outside += 1
    elapsed = time.perf_counter() - start
    anchors = (results[Fraction(1, 2)] == "fixed" and results[Fraction(1, 3)] == "toward 0"
               and results[Fraction(3, 4)] == "toward 1")
    ok = anchors and outside == 0 and elapsed < 60
    return ok, f"{len(xs)} starts, {counts}, limits outside {{0, 1/2, 1}}: {outside}, {elapsed:.2f}s"


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8]


@pytest.mark.parametrize("n", range(1, 9))
def test_criterion(n, capsys):
    ok, detail = CHECKS[n - 1]()
    assert report(n, ok, detail, capsys), detail


if __name__ == "__main__":
    results = [report(i, *check()) for i, check in enumerate(CHECKS, start=1)]
    raise SystemExit(0 if all(results) else 1)
