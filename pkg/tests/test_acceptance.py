"""Acceptance suite: one test per criterion, each recording a pass/fail line."""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from framecert import linalg as la
from framecert.frames import VectorFamily, certify_nr_vectors, certify_pr_vectors
from framecert.gen import fixture, random_full_spark, random_rational_orthogonal, two_basis_construction
from framecert.linalg import Subspace
from framecert.perturb import dim_preserved_under_projection_distance, neighborhood_scan, stable_gram_schmidt
from framecert.retrieve import measure_three_hyperplanes, reconstruct_norm_sq_three_hyperplanes
from framecert.subspaces import (
    SubspaceFamily,
    certify_nr_exact_cases,
    certify_nr_subspaces,
    falsify_by_lift,
    falsify_nr_subspaces,
    falsify_pr_subspaces,
)

from acceptance_log import record
from oracles import brute_complement_property, projection, sigma_min_on_circle

pytestmark = pytest.mark.acceptance


def check(k: int, ok: bool, msg: str) -> None:
    record(k, ok, msg)
    assert ok, msg


def test_criterion_01_two_subspace_counterexample():
    fx = fixture("two_subspace_counterexample_R3")
    cert = certify_nr_subspaces(fx.family)
    pair = cert.witness.replay(fx.family)
    norms = [r for pr in pair.per_index_norms for r in pr]
    spread = max(norms) - min(norms)
    ratio = max(pair.norm_u, pair.norm_v) / min(pair.norm_u, pair.norm_v)
    x, y = fx.extras["x"], fx.extras["y"]
    printed = fx.family.measure_sq(x) + fx.family.measure_sq(y) == [1, 1, 1, 1] and [la.norm_sq(x), la.norm_sq(y)] == [1, 2]
    ok = cert.failed and spread <= 1e-12 and abs(ratio - math.sqrt(2)) <= 1e-12 and printed
    check(1, ok, f"verdict={cert.verdict.value} norm spread={spread:.1e} ratio-sqrt2={ratio - math.sqrt(2):.1e}")


def test_criterion_02_three_hyperplane_reconstruction():
    rng = random.Random(2)
    exact_bad = float_worst = 0
    for _ in range(1000):
        n = rng.randint(3, 10)
        x = la.vec([Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(n)], True)
        if reconstruct_norm_sq_three_hyperplanes(measure_three_hyperplanes(x)) != la.norm_sq(x):
            exact_bad += 1
        xf = la.to_float(x)
        true = float(xf @ xf)
        got = reconstruct_norm_sq_three_hyperplanes(measure_three_hyperplanes(xf))
        float_worst = max(float_worst, abs(got - true) / max(true, 1e-300))
    t = measure_three_hyperplanes(la.vec([1, 2, 3]))
    worked = t.squared == (13, 10, Fraction(27, 2)) and reconstruct_norm_sq_three_hyperplanes(t) == 14
    ok = exact_bad == 0 and float_worst <= 1e-9 and worked
    check(2, ok, f"exact mismatches={exact_bad}/1000 worst float rel err={float_worst:.1e} worked point={worked}")


def test_criterion_03_complement_property():
    onb_fail = all(certify_pr_vectors(VectorFamily.of([la.unit(i, n) for i in range(n)])).failed for n in range(2, 7))
    full, short = True, True
    for n in range(2, 6):
        for seed in range(3):
            full &= certify_pr_vectors(random_full_spark(n, 2 * n - 1, seed)).passed
            fam = random_full_spark(n, 2 * n - 2, seed)
            short &= certify_pr_vectors(fam).failed
            if n <= 4:
                short &= not brute_complement_property(fam.vectors)
    big = random_full_spark(10, 20, seed=0)
    start = time.perf_counter()
    cert = certify_pr_vectors(big)
    elapsed = time.perf_counter() - start
    exhaustive = cert.passed and cert.detail.get("partitions") == 2**19
    ok = onb_fail and full and short and exhaustive and elapsed < 5.0
    check(3, ok, f"ONBs fail={onb_fail} 2N-1 pass={full} 2N-2 fail={short} M=20 exhaustive={exhaustive} in {elapsed:.2f}s")


def test_criterion_04_partition_criterion_vs_sphere_falsifier():
    rng = random.Random(4)
    mismatches, fails = [], 0
    for k in range(100):
        n, m = rng.randint(1, 4), rng.randint(1, 6)
        vs = []
        while len(vs) < m:
            v = [rng.randint(-2, 2) for _ in range(n)]
            if any(v):
                vs.append(v)
        fam = VectorFamily.of(vs)
        lines = SubspaceFamily.lines(fam)
        verdict = certify_nr_vectors(fam)
        sphere = falsify_nr_subspaces(lines)
        if verdict.failed:
            fails += 1
            ok = sphere.failed and sphere.witness.replay(lines).breaks_norm_retrieval()
        else:
            ok = sphere.verdict.value == "unknown" and sphere.detail["min_objective"] > 1e-6
        if not ok:
            mismatches.append(k)
    check(4, not mismatches, f"100 families ({fails} failing), disagreements={mismatches}")


def _unit_rows(a):
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def test_criterion_05_hyperplane_bases():
    rng = np.random.default_rng(5)
    bad = []
    for k in range(200):
        n = (3, 4, 5)[k % 3]
        normals = _unit_rows(rng.standard_normal((n, n)))
        fam = SubspaceFamily.of([Subspace.span([v], n, False).complement() for v in normals], exact=False)
        cert = certify_nr_subspaces(fam)
        if not (cert.failed and cert.witness is not None and cert.witness.replay(fam).breaks_norm_retrieval()):
            bad.append(k)
    orth_ok = True
    for n in (3, 4, 5):
        q = random_rational_orthogonal(n, rng)
        cols = [[q[r][c] for r in range(n)] for c in range(n)]
        for fam in (
            SubspaceFamily.of([Subspace.span([v], n, True).complement() for v in cols], exact=True),
            SubspaceFamily.of([Subspace.span([v], n, False).complement() for v in _unit_rows(np.array(cols, dtype=float))], exact=False),
        ):
            cert = certify_nr_subspaces(fam)
            orth_ok &= cert.passed and cert.method == "exact:tight-fusion"
    check(5, not bad and orth_ok, f"non-orthogonal sets not failed={bad}; orthonormal sets pass via tight fusion={orth_ok}")


def _random_rational_subspace(rng, n, d):
    while True:
        w = Subspace.span([[rng.randint(-3, 3) for _ in range(n)] for _ in range(d)], n, True)
        if w.dim == d:
            return w


def test_criterion_06_total_dimension_n():
    rng = random.Random(6)
    nrng = np.random.default_rng(6)
    bad = []
    for k in range(100):
        n = rng.randint(2, 5)
        cuts = sorted(rng.sample(range(1, n), rng.randint(1, n - 1)))
        dims = [b - a for a, b in zip([0] + cuts, cuts + [n])]
        if k % 2 == 0:
            q = random_rational_orthogonal(n, nrng)
            cols = [[q[r][c] for r in range(n)] for c in range(n)]
            groups, i = [], 0
            for d in dims:
                groups.append(cols[i:i + d])
                i += d
            fam = SubspaceFamily.of(groups, exact=True)
            expect_pass = True
        else:
            while True:
                subs = [_random_rational_subspace(rng, n, d) for d in dims]
                if not all(a.is_orthogonal_to(b) for i, a in enumerate(subs) for b in subs[i + 1:]):
                    break
            fam = SubspaceFamily.of(subs, exact=True)
            expect_pass = False
        exact = certify_nr_exact_cases(fam)
        lift = falsify_by_lift(fam, "nr", 20, seed=k)
        consistent = exact.passed == expect_pass and lift.failed == (not expect_pass)
        if expect_pass is False:
            consistent &= exact.witness is not None and exact.witness.breaks_norm_retrieval()
        if not consistent:
            bad.append(k)
    check(6, not bad, f"100 families (50 orthogonal, 50 not), inconsistent={bad}")


def test_criterion_07_two_subspace_families():
    fx = fixture("proof_witness_two_subspaces")
    values_ok = fx.extras["squared_values"] == [5, 5, 5, 5, 6, 9]
    rng = random.Random(7)
    comp_ok = True
    for _ in range(20):
        n = rng.randint(2, 6)
        w = _random_rational_subspace(rng, n, rng.randint(1, n - 1))
        comp_ok &= certify_nr_subspaces(SubspaceFamily.of([w, w.complement()])).passed
    fails = 0
    while fails < 50:
        n = rng.randint(2, 6)
        w1 = _random_rational_subspace(rng, n, rng.randint(1, n - 1))
        w2 = _random_rational_subspace(rng, n, rng.randint(1, n - 1))
        if w2.same_span(w1.complement()):
            continue
        fam = SubspaceFamily.of([w1, w2])
        cert = certify_nr_subspaces(fam)
        if not (cert.failed and cert.witness is not None and cert.witness.replay(fam).breaks_norm_retrieval()):
            break
        fails += 1
    ok = values_ok and comp_ok and fails == 50
    check(7, ok, f"squared values 5,5,5,5,6,9={values_ok}; complements pass={comp_ok}; failing pairs with witness={fails}/50")


CRITERION_8: dict[int, str] = {}


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_criterion_08_two_basis_construction(n):
    vecs, comps = two_basis_construction(n, seed=0)
    pr = certify_pr_vectors(vecs).passed
    rng = np.random.default_rng(n)
    stack = comps.projection_stack[:n]
    worst = 0.0
    for _ in range(100):
        x = rng.standard_normal(n)
        lhs = float(sum(x @ p @ x for p in stack))
        worst = max(worst, abs(lhs - (n - 1) * float(x @ x)))
    nr = certify_nr_subspaces(comps)
    tight = nr.passed and nr.method == "exact:tight-fusion"
    fals = falsify_pr_subspaces(comps)
    sigma = fals.detail["min_objective"]
    not_falsified = fals.verdict.value == "unknown" and sigma > 1e-3
    good = pr and worst <= 1e-12 and tight and not_falsified
    CRITERION_8[n] = (
        f"N={n}:{'ok' if good else 'FAIL'}(PR={pr} identity err={worst:.0e} tight={tight} "
        f"{fals.verdict.value} sigma_min={sigma:.1e})"
    )
    ok = all(m.split(":")[1].startswith("ok") for m in CRITERION_8.values())
    record(8, ok, " ".join(CRITERION_8[k] for k in sorted(CRITERION_8)))
    assert pr and worst <= 1e-12 and tight, CRITERION_8[n]
    assert not_falsified, CRITERION_8[n]


def test_criterion_09_gram_schmidt_stability():
    delta = 1e-4
    bad = []
    for p in range(2, 7):
        rng = np.random.default_rng(p)
        for t in range(100):
            n = p + rng.integers(0, 3)
            xs = np.linalg.qr(rng.standard_normal((n, p)))[0].T
            d = rng.standard_normal((p, n))
            ys = xs + delta * rng.uniform(0, 1, (p, 1)) * d / np.linalg.norm(d, axis=1, keepdims=True)
            rep = stable_gram_schmidt(xs, ys, delta)
            if not (rep.orthonormality_residual <= 1e-12 and rep.within_bound and rep.span_preserved):
                bad.append((p, t))
    check(9, not bad, f"500 trials, violations={bad}")


def test_criterion_10_projection_distance():
    rot_err = 0.0
    for theta in (math.pi / 12, math.pi / 6, math.pi / 4):
        p = projection([[1, 0]])
        q = projection([[math.cos(theta), math.sin(theta)]])
        cert = dim_preserved_under_projection_distance(p, q)
        rot_err = max(rot_err, abs(cert.detail["norm"] - abs(math.sin(theta))))
    rng = np.random.default_rng(10)
    violations = close = 0
    for _ in range(10_000):
        n = int(rng.integers(2, 6))
        a = rng.standard_normal((int(rng.integers(1, n + 1)), n))
        if rng.uniform() < 0.5:
            b = a + rng.uniform(0, 1.5) * rng.standard_normal(a.shape)
        else:
            b = rng.standard_normal((int(rng.integers(1, n + 1)), n))
        p, q = projection(a), projection(b)
        try:
            cert = dim_preserved_under_projection_distance(p, q)
        except AssertionError:
            violations += 1
            continue
        if cert.detail["norm"] < 0.99:
            close += 1
            if cert.detail["dim_p"] != cert.detail["dim_q"]:
                violations += 1
    ok = rot_err <= 1e-9 and violations == 0 and close > 0
    check(10, ok, f"rotation error={rot_err:.1e}; 10^4 pairs ({close} below 0.99), violations={violations}")


def test_criterion_11_neighborhood_scans():
    fails = neighborhood_scan(VectorFamily.of([[1, 0], [1, 1]]), 1e-3, 500, seed=11)
    center = random_full_spark(3, 5, seed=11)
    passes = neighborhood_scan(center, 1e-3, 500, seed=11, prop="pr", guarded=False)
    ok = fails.fraction("fail") == 1.0 and passes.fraction("pass") >= 0.99
    check(11, ok, f"NR scan fail fraction={fails.fraction('fail'):.3f}; PR scan pass fraction={passes.fraction('pass'):.3f}")


def test_criterion_12_sigma_min_falsifier():
    axes = SubspaceFamily.of([[la.unit(0, 2)], [la.unit(1, 2)]])
    cert = falsify_pr_subspaces(axes)
    sigma_fail = cert.detail["min_objective"]
    lines = SubspaceFamily.lines(random_full_spark(2, 3, seed=12))
    unk = falsify_pr_subspaces(lines)
    grid = sigma_min_on_circle(list(lines.projection_stack))
    rel = abs(unk.detail["min_objective"] - grid) / grid
    ok = cert.failed and sigma_fail <= 1e-10 and unk.verdict.value == "unknown" and rel <= 0.05
    check(12, ok, f"axes sigma_min={sigma_fail:.1e} ({cert.verdict.value}); 3 lines reported={unk.detail['min_objective']:.4e} grid={grid:.4e} rel={rel:.1e}")
