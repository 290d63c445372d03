import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framecert import linalg as la
from framecert.errors import DependentPerturbation, PreconditionViolated, ZeroVector
from framecert.frames import VectorFamily
from framecert.gen import random_full_spark
from framecert.linalg import Subspace
from framecert.perturb import (
    dim_preserved_under_projection_distance,
    gram_schmidt_constants,
    neighborhood_scan,
    normalize_perturbation_bound,
    stable_gram_schmidt,
)
from framecert.subspaces import SubspaceFamily

from oracles import projection


def test_gram_schmidt_constants():
    assert gram_schmidt_constants(4) == [2, 8, 26, 80]


def test_normalize_bound_example():
    lhs, rhs = normalize_perturbation_bound(np.array([1.0, 0.0]), np.array([1.05, 0.05]))
    assert lhs == pytest.approx(0.04758, abs=1e-5)
    assert rhs == pytest.approx(2 * math.hypot(0.05, 0.05))
    assert normalize_perturbation_bound([1.0, 0.0], [1.0, 0.0]) == (0.0, 0.0)
    assert normalize_perturbation_bound([1.0, 0.0], [2.0, 0.0]) == (0.0, 2.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.floats(1e-6, 0.99))
def test_normalize_bound_random(seed, n, eps):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    d = rng.standard_normal(n)
    y = x + eps * d / np.linalg.norm(d)
    lhs, rhs = normalize_perturbation_bound(x, y)
    assert lhs < rhs


def test_normalize_bound_preconditions():
    with pytest.raises(PreconditionViolated):
        normalize_perturbation_bound([2.0, 0.0], [1.0, 0.0])
    with pytest.raises(ZeroVector):
        normalize_perturbation_bound([1.0, 0.0], [0.0, 0.0])


@pytest.mark.parametrize("p", [2, 3, 4])
def test_stable_gram_schmidt(p):
    rng = np.random.default_rng(p)
    xs, _ = np.linalg.qr(rng.standard_normal((p + 1, p)))
    xs = xs.T
    d = rng.standard_normal((p, p + 1))
    ys = xs + 1e-4 * rng.uniform(0, 1, (p, 1)) * d / np.linalg.norm(d, axis=1, keepdims=True)
    rep = stable_gram_schmidt(xs, ys, 1e-4)
    assert rep.orthonormality_residual <= 1e-12
    assert rep.within_bound and rep.span_preserved
    assert rep.epsilon == pytest.approx(gram_schmidt_constants(p)[-1] * 1e-4)


def test_stable_gram_schmidt_preconditions():
    xs = np.eye(2)
    with pytest.raises(PreconditionViolated):
        stable_gram_schmidt(xs, xs + 0.1, 1e-3)
    with pytest.raises(PreconditionViolated):
        stable_gram_schmidt([[1.0, 0.0], [1.0, 0.0]], xs, 1.0)
    with pytest.raises(DependentPerturbation):
        stable_gram_schmidt(xs, [[1.0, 0.0], [1.0, 0.0]], 2.0)


@pytest.mark.parametrize("theta", [math.pi / 12, math.pi / 6, math.pi / 4])
def test_rotation_pair_distance(theta):
    p = projection([[1, 0]])
    q = projection([[math.cos(theta), math.sin(theta)]])
    cert = dim_preserved_under_projection_distance(p, q)
    assert cert.passed
    assert cert.detail["norm"] == pytest.approx(abs(math.sin(theta)), abs=1e-9)


def test_distant_projections_are_unknown():
    cert = dim_preserved_under_projection_distance(projection([[1, 0, 0]]), projection([[0, 1, 0], [0, 0, 1]]))
    assert cert.verdict.value == "unknown" and cert.detail["dim_p"] == 1 and cert.detail["dim_q"] == 2
    w = Subspace.span([[1, 2, 0]])
    assert dim_preserved_under_projection_distance(w, w).passed


def test_scan_around_failing_vectors():
    res = neighborhood_scan(VectorFamily.of([[1, 0], [1, 1]]), 1e-3, 100, seed=1)
    assert res.verdicts["fail"] == 100 and res.first_nonfail is None


def test_scan_is_reproducible():
    fam = VectorFamily.of([[1, 0], [1, 1]])
    a = neighborhood_scan(fam, 0.5, 40, seed=3)
    b = neighborhood_scan(fam, 0.5, 40, seed=3)
    assert a.verdicts == b.verdicts


def test_scan_around_subspaces():
    fam = SubspaceFamily.of([[la.unit(0, 3), la.unit(2, 3)], [[1, 1, 0]]])
    res = neighborhood_scan(fam, 1e-3, 10, seed=0)
    assert res.verdicts["fail"] == 10


def test_scan_guards():
    with pytest.raises(PreconditionViolated):
        neighborhood_scan(VectorFamily.of([[1, 0], [0, 1], [1, 1]]), 1e-3, 5)
    with pytest.raises(PreconditionViolated):
        neighborhood_scan(VectorFamily.of([[1, 0], [0, 1]]), 1e-3, 5)
    with pytest.raises(PreconditionViolated):
        neighborhood_scan(VectorFamily.of([[1, 0], [1, 1]]), 1e-3, 5, prop="pr")
    res = neighborhood_scan(random_full_spark(2, 3, 0), 1e-3, 20, prop="pr", guarded=False)
    assert res.verdicts["pass"] == 20
