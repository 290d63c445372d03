from fractions import Fraction

import numpy as np
import pytest

from framecert import linalg as la
from framecert.errors import PreconditionViolated, UnknownFixture
from framecert.frames import certify_nr_vectors, certify_pr_vectors, is_full_spark
from framecert.gen import FixtureId, fixture, random_full_spark, random_rational_orthogonal, two_basis_construction
from framecert.subspaces import certify_nr_subspaces

from oracles import brute_spark


@pytest.mark.parametrize("n, m", [(2, 3), (3, 4), (3, 5), (4, 7)])
def test_random_full_spark(n, m):
    fam = random_full_spark(n, m, seed=7)
    assert brute_spark([[Fraction(c) for c in v] for v in fam.vectors]) == n + 1
    assert certify_pr_vectors(fam).passed == (m >= 2 * n - 1)
    again = random_full_spark(n, m, seed=7)
    assert again.vectors == fam.vectors


def test_random_full_spark_precondition():
    with pytest.raises(PreconditionViolated):
        random_full_spark(3, 2)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_rational_orthogonal_is_exact(n):
    q = random_rational_orthogonal(n, np.random.default_rng(n))
    for i in range(n):
        for j in range(n):
            col_i = [q[r][i] for r in range(n)]
            col_j = [q[r][j] for r in range(n)]
            assert la.dot(col_i, col_j) == (1 if i == j else 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_two_basis_construction(n):
    vecs, comps = two_basis_construction(n, seed=0)
    assert vecs.M == 2 * n - 1 and is_full_spark(vecs)
    assert certify_pr_vectors(vecs).passed
    assert comps.M == 2 * n - 1 and all(d == n - 1 for d in comps.dims)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    stack = comps.projection_stack[:n]
    assert float(sum(x @ p @ x for p in stack)) == pytest.approx((n - 1) * float(x @ x), abs=1e-12)
    assert two_basis_construction(n, seed=0)[0].vectors == vecs.vectors


def test_two_subspace_counterexample():
    fx = fixture(FixtureId.TWO_SUBSPACE_COUNTEREXAMPLE_R3)
    x, y = fx.extras["x"], fx.extras["y"]
    assert fx.family.measure_sq(x) + fx.family.measure_sq(y) == [1, 1, 1, 1]
    assert [la.norm_sq(x), la.norm_sq(y)] == fx.extras["norm_sq"] == [1, 2]


def test_invertible_op_counterexample():
    fx = fixture("invertible_op_counterexample_R3")
    assert fx.extras["original_inner_product"] == 0
    assert fx.extras["image_inner_product"] == -1
    assert fx.extras["images"] == [la.vec([1, 0, 0]), la.vec([-1, 2, 0])]
    assert certify_nr_vectors(fx.extras["image_family_2d"]).failed


def test_proof_witness():
    fx = fixture("proof_witness_two_subspaces")
    assert fx.extras["squared_values"] == [5, 5, 5, 5, 6, 9]
    assert all(isinstance(v, Fraction) for v in fx.extras["squared_values"])
    with pytest.raises(PreconditionViolated):
        fixture("proof_witness_two_subspaces", w1=[la.unit(0, 3)], w2=[la.unit(1, 3)])


@pytest.mark.parametrize("n", [3, 5])
def test_canonical_three_hyperplanes(n):
    fam = fixture("canonical_three_hyperplanes", n=n).family
    cert = certify_nr_subspaces(fam)
    assert cert.passed and cert.method == "exact:canonical-triple"


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        fixture("nope")
