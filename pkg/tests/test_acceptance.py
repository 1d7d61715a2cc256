"""Exit criteria. Each test logs one PASS/FAIL line, shown in the summary."""

import json
import math
import random
import time

import pytest

from conftest import ACCEPTANCE_LOG, random_primitive_prefix
from primset import (
    BoxSpec,
    IntMatrix,
    LambdaSpec,
    check_covering_bounds,
    convergence_table,
    crt_blind_box,
    determinant,
    estimate_primitive_probability,
    exact_primitive_probability,
    hnf,
    hnf_bounded,
    incremental_gcd_check,
    inclusion_exclusion_identity,
    is_primitive,
    is_primitive_minors,
    target_probability,
)
from primset.experiments import covering_report
from primset.lattice import rank

MC_N = 10**6
MC_TRIALS = 2 * 10**5
SEED = 0

_runs = {}


def report(number, title, ok, detail):
    ACCEPTANCE_LOG.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})")
    assert ok, detail


def _timed(func, *args, **kwargs):
    start = time.perf_counter()
    out = func(*args, **kwargs)
    return out, time.perf_counter() - start


def _estimate(d, m, family, workers=1):
    key = ("estimate", d, m, family, workers)
    if key not in _runs:
        _runs[key] = _timed(estimate_primitive_probability, d, m, family, MC_N, MC_TRIALS, SEED, workers)
    return _runs[key]


def _table(workers=1):
    key = ("table", workers)
    if key not in _runs:
        _runs[key] = _timed(
            convergence_table, 2, 1, "centered", [10**k for k in range(2, 7)], 10**5, SEED, workers
        )
    return _runs[key]


def test_criterion_01_classic_density():
    box = BoxSpec(2, 1, 1000, [[1, 1]])
    p, secs = _timed(exact_primitive_probability, 2, 1, box)
    mid = target_probability(2, 1).mid
    gap = abs(float(p - mid))
    report(1, "exact P over [1,1000]^2 vs 1/zeta(2)", gap < 0.005 and secs < 5,
           f"p={float(p):.6f} target={float(mid):.6f} gap={gap:.2e} time={secs:.2f}s")


def test_criterion_02_nymann():
    res, secs = _estimate(3, 1, "centered")
    report(2, "Monte Carlo d=3 m=1 vs 1/zeta(3)", res.gap < 0.01 and secs < 30,
           f"est={float(res.estimate):.6f} target={float(res.target.mid):.6f} "
           f"gap={res.gap:.2e} se={res.std_error:.1e} time={secs:.1f}s")


@pytest.mark.parametrize("d, m", [(3, 2), (4, 2)])
def test_criterion_03_theorem_m_ge_2(d, m):
    res, secs = _estimate(d, m, "centered")
    report(3, f"Monte Carlo d={d} m={m}", res.gap < 0.01 and secs < 120,
           f"est={float(res.estimate):.6f} target={float(res.target.mid):.6f} "
           f"gap={res.gap:.2e} time={secs:.1f}s")


def test_criterion_04_polynomial_offset_boxes():
    res, secs = _estimate(3, 1, "poly:2")
    report(4, "d=3 m=1 with poly:2 offsets", res.gap < 0.01 and secs < 30,
           f"est={float(res.estimate):.6f} gap={res.gap:.2e} time={secs:.1f}s")


def test_criterion_05_oracle_equivalence():
    rng = random.Random(5)
    start = time.perf_counter()
    disagreements = checked_incremental = primitive = 0
    for _ in range(10**4):
        d = rng.randint(1, 6)
        m = rng.randint(0, d)
        cap = rng.choice((1, 2, 5, 50))
        pts = [tuple(rng.randint(-cap, cap) for _ in range(d)) for _ in range(m)]
        verdict = is_primitive(pts)
        primitive += verdict
        if verdict != is_primitive_minors(pts):
            disagreements += 1
        if pts and rank(pts) == m:
            for k in range(1, m + 1):
                prefix = pts[: k - 1]
                if not is_primitive(prefix):
                    break
                checked_incremental += 1
                if incremental_gcd_check(prefix, pts[k - 1]) != is_primitive(pts[:k]):
                    disagreements += 1
    secs = time.perf_counter() - start
    report(5, "is_primitive == minors == incremental on 10^4 sets",
           disagreements == 0 and secs < 60,
           f"{primitive} primitive, {checked_incremental} incremental checks, "
           f"{disagreements} disagreements, time={secs:.1f}s")


def _random_full_rank(rng):
    while True:
        q = rng.randint(1, 6)
        p = rng.randint(1, q)
        a = [[rng.randint(-50, 50) for _ in range(q)] for _ in range(p)]
        if rank(a) == p:
            return a


def _hnf_shape_ok(h):
    p, q = h.shape
    return all(
        h[i, i] > 0
        and all(h[i, j] == 0 for j in range(i + 1, q))
        and all(0 <= h[i, j] < h[i, i] for j in range(i))
        for i in range(p)
    )


def test_criterion_06_hnf_soundness():
    rng = random.Random(6)
    failures = 0
    for _ in range(10**4):
        a = _random_full_rank(rng)
        h, u = hnf(a)
        if IntMatrix(a) @ u != h or abs(determinant(u)) != 1 or not _hnf_shape_ok(h):
            failures += 1
    bound_failures = 0
    worst = 0.0
    for _ in range(10**3):
        a = _random_full_rank(rng)
        (h, v), rep = hnf_bounded(a)
        p, q = len(a), len(a[0])
        m0 = max(abs(x) for row in a for x in row) + 1
        bound = math.factorial(p) * q * m0**p
        worst = max(worst, v.max_abs() / bound)
        if (v.max_abs() > bound or rep.bound != bound or IntMatrix(a) @ v != h
                or not _hnf_shape_ok(h) or abs(determinant(v)) != 1):
            bound_failures += 1
    report(6, "HNF soundness (10^4) and bounded multiplier (10^3)",
           failures == 0 and bound_failures == 0,
           f"{failures} HNF failures, {bound_failures} bound failures, "
           f"max |V|/bound = {worst:.3g}")


def _small_config(rng, max_m):
    d = rng.randint(2, 4)
    m = rng.randint(1, min(max_m, d))
    prefix = random_primitive_prefix(rng, d, m - 1)
    n = rng.randint(1, 8)
    lower = [[rng.randint(-8, 8) for _ in range(d)] for _ in range(m)]
    return prefix, BoxSpec(d, m, n, lower)


def test_criterion_07_inclusion_exclusion():
    rng = random.Random(7)
    bad = []
    for _ in range(50):
        prefix, box = _small_config(rng, 2)
        res = inclusion_exclusion_identity(prefix, box)
        if not res.equal:
            bad.append((prefix, box, res))
    report(7, "exact inclusion-exclusion identity on 50 configs", not bad,
           f"{50 - len(bad)}/50 equal")


def test_criterion_08_covering_bounds():
    rng = random.Random(8)
    failures = 0
    cubes = 0
    for _ in range(100):
        prefix, box = _small_config(rng, 4)
        D = rng.randint(1, box.n)
        spec = LambdaSpec.build(prefix, D, dim=box.d)
        cubes += covering_report(spec, box)["cubes"]
        failures += not check_covering_bounds(spec, box)
    report(8, "covering bounds and D^(m-1) per cube on 100 configs", failures == 0,
           f"{100 - failures}/100 hold, {cubes} cubes checked")


def test_criterion_09_crt_blind_box():
    found = 0
    checked = 0
    for n in (2, 3):
        box = crt_blind_box(2, n)
        for p in box.points(0):
            checked += 1
            found += is_primitive([p])
    report(9, "CRT blind boxes d=2, n in {2,3} have no primitive point", found == 0,
           f"{checked} points checked, {found} primitive")


def test_criterion_10_convergence_endpoints():
    rows, secs = _table()
    first, last = rows[0].gap, rows[-1].gap
    report(10, "convergence table d=2 m=1, n=10^2..10^6", last < first and last < 0.01,
           f"gaps {[round(r.gap, 5) for r in rows]} time={secs:.1f}s")


def test_criterion_11_worker_determinism():
    one_est, _ = _estimate(3, 1, "centered", workers=1)
    eight_est, _ = _estimate(3, 1, "centered", workers=8)
    one_tab, _ = _table(workers=1)
    eight_tab, _ = _table(workers=8)
    same_est = json.dumps(one_est.to_dict()) == json.dumps(eight_est.to_dict())
    same_tab = json.dumps([r.to_dict() for r in one_tab]) == json.dumps(
        [r.to_dict() for r in eight_tab]
    )
    report(11, "criteria 2 and 10 bit-identical for workers 1 and 8", same_est and same_tab,
           f"estimate identical={same_est}, table identical={same_tab}")
