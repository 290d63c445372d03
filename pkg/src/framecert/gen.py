"""Generators for random families and the named fixtures."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import linalg as la
from .errors import GenerationFailed, PreconditionViolated, UnknownFixture
from .frames import VectorFamily, is_full_spark
from .linalg import Subspace
from .retrieve import canonical_normals
from .subspaces import SubspaceFamily

logger = logging.getLogger(__name__)

__all__ = [
    "FixtureId",
    "Fixture",
    "random_full_spark",
    "random_rational_orthogonal",
    "two_basis_construction",
    "fixture",
]

MAX_ATTEMPTS = 100


class FixtureId(str, Enum):
    TWO_SUBSPACE_COUNTEREXAMPLE_R3 = "two_subspace_counterexample_R3"
    INVERTIBLE_OP_COUNTEREXAMPLE_R3 = "invertible_op_counterexample_R3"
    CANONICAL_THREE_HYPERPLANES = "canonical_three_hyperplanes"
    TWO_BASIS_CONSTRUCTION = "two_basis_construction"
    PROOF_WITNESS_TWO_SUBSPACES = "proof_witness_two_subspaces"


@dataclass
class Fixture:
    name: str
    family: object
    extras: dict = field(default_factory=dict)


def random_full_spark(n: int, m: int, seed: int = 0, max_denominator: int = 1000) -> VectorFamily:
    """Seeded Gaussian vectors, rationalized, accepted only if exactly full spark."""
    if m < n:
        raise PreconditionViolated("full spark needs M >= N")
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_ATTEMPTS):
        g = rng.standard_normal((m, n))
        vectors = [la.rationalize(row, max_denominator) for row in g]
        if any(la.is_zero(v) for v in vectors):
            continue
        fam = VectorFamily.of(vectors, exact=True)
        if is_full_spark(fam):
            logger.debug("full spark after %d attempt(s)", attempt + 1)
            return fam
    raise GenerationFailed(f"no full-spark family of {m} vectors in R^{n} after {MAX_ATTEMPTS} attempts")


def random_rational_orthogonal(n: int, rng: np.random.Generator, max_denominator: int = 100) -> list[list[Fraction]]:
    """Exactly orthogonal rational matrix (I − K)(I + K)^(-1) for a random skew K.

    K has rationalized Gaussian entries. I + K is invertible for every skew K
    and the result has rational entries, so its columns form an exact
    orthonormal basis.
    """
    g = rng.standard_normal((n, n))
    k = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            c = Fraction(float(g[i, j])).limit_denominator(max_denominator)
            k[i][j], k[j][i] = c, -c
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    plus = [[ident[i][j] + k[i][j] for j in range(n)] for i in range(n)]
    minus = [[ident[i][j] - k[i][j] for j in range(n)] for i in range(n)]
    inv = _inverse(plus)
    return [[sum((minus[i][t] * inv[t][j] for t in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def _inverse(a: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = la.rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red[:n]]


def two_basis_construction(n: int, seed: int = 0) -> tuple[VectorFamily, SubspaceFamily]:
    """The standard basis together with N − 1 vectors of a second orthonormal basis.

    The second basis is the column set of a seeded random rational orthogonal
    matrix; rotations are redrawn until the 2N − 1 vectors are full spark.
    Returns the vectors and the family of their orthogonal complements.
    """
    if n < 2:
        raise PreconditionViolated("the construction needs N >= 2")
    rng = np.random.default_rng(seed)
    std = [la.unit(i, n, True) for i in range(n)]
    for _ in range(MAX_ATTEMPTS):
        q = random_rational_orthogonal(n, rng)
        psi = [tuple(q[r][c] for r in range(n)) for c in range(n - 1)]
        if any(la.is_zero(v) for v in psi):
            continue
        fam = VectorFamily.of(std + psi, exact=True)
        if is_full_spark(fam):
            comps = SubspaceFamily.of([Subspace.span([v], n, True).complement() for v in fam.vectors], exact=True)
            return fam, comps
    raise GenerationFailed(f"no full-spark two-basis family in R^{n} after {MAX_ATTEMPTS} rotations")


def _two_subspace_counterexample() -> Fixture:
    e = [la.unit(i, 3) for i in range(3)]
    fam = SubspaceFamily.of([[e[0], e[2]], [e[1], e[2]]], exact=True)
    x, y = la.vec([0, 0, 1]), la.vec([1, 1, 0])
    return Fixture(
        FixtureId.TWO_SUBSPACE_COUNTEREXAMPLE_R3.value,
        fam,
        {"x": x, "y": y, "projection_sq": [1, 1, 1, 1], "norm_sq": [1, 2]},
    )


def _invertible_op_counterexample() -> Fixture:
    # unnormalized directions of (1, 0, 1)/√2 and (−1, 2, 1)/√6
    u1, u2 = la.vec([1, 0, 1]), la.vec([-1, 2, 1])
    w = Subspace.span([u1, u2], 3, True)
    p = Subspace.span([la.unit(0, 3), la.unit(1, 3)], 3, True)
    images = [p.project(u1), p.project(u2)]
    fam = VectorFamily.of(images, exact=True)
    return Fixture(
        FixtureId.INVERTIBLE_OP_COUNTEREXAMPLE_R3.value,
        fam,
        {
            "u": [u1, u2],
            "W": w,
            "projection": p,
            "images": images,
            "image_inner_product": la.dot(*images),
            "original_inner_product": la.dot(u1, u2),
            "image_family_2d": VectorFamily.of([img[:2] for img in images], exact=True),
        },
    )


def _canonical_three_hyperplanes(n: int) -> Fixture:
    normals = canonical_normals(n, True)
    fam = SubspaceFamily.of([Subspace.span([v], n, True).complement() for v in normals], exact=True)
    return Fixture(FixtureId.CANONICAL_THREE_HYPERPLANES.value, fam, {"normals": normals})


def _exact_unit(v):
    """v/‖v‖ in exact arithmetic when ‖v‖² is a rational square, else in floats."""
    q = la.norm_sq(v)
    if la.is_exact_vector(v):
        a, b = Fraction(q).numerator, Fraction(q).denominator
        ra, rb = int(round(a**0.5)), int(round(b**0.5))
        if ra * ra == a and rb * rb == b:
            return la.scale(Fraction(rb, ra), v)
    return la.to_float(v) / la.norm(v)


def _proof_witness(n: int = 3, w1=None, w2=None) -> Fixture:
    if w1 is None:
        w1 = [la.unit(0, n), la.unit(1, n)]
    if w2 is None:
        w2 = [la.unit(0, n), la.unit(2, n)]
    s1, s2 = Subspace.span(w1, n), Subspace.span(w2, n)
    inter = la.nullspace(list(s1.complement().basis) + list(s2.complement().basis), n, s1.exact and s2.exact)
    if not inter:
        raise PreconditionViolated("W1 and W2 must intersect nontrivially")
    common = Subspace.span(inter, n)
    extra1 = [b for b in Subspace.span(list(common.basis) + list(s1.basis), n).orthogonal_basis][common.dim:]
    extra2 = [b for b in Subspace.span(list(common.basis) + list(s2.basis), n).orthogonal_basis][common.dim:]
    if not extra1 or not extra2:
        raise PreconditionViolated("each subspace must be larger than the intersection")
    e1 = _exact_unit(common.orthogonal_basis[0])
    u, v = _exact_unit(extra1[0]), _exact_unit(extra2[0])
    x = la.add(la.add(la.scale(2, e1), u), v)
    y = la.add(la.add(e1, la.scale(2, u)), la.scale(2, v))
    fam = SubspaceFamily.of([s1, s2])
    measured = fam.measure_sq(x) + fam.measure_sq(y) + [la.norm_sq(x), la.norm_sq(y)]
    extras = {"x": x, "y": y, "e": e1, "u": u, "v": v, "squared_values": measured}
    return Fixture(FixtureId.PROOF_WITNESS_TWO_SUBSPACES.value, fam, extras)


def fixture(name, **params) -> Fixture:
    """Look up a named fixture; parameters: ``n`` (and ``seed``, ``w1``, ``w2`` where relevant)."""
    try:
        fid = FixtureId(name if not isinstance(name, FixtureId) else name.value)
    except ValueError:
        raise UnknownFixture(name) from None
    if fid is FixtureId.TWO_SUBSPACE_COUNTEREXAMPLE_R3:
        return _two_subspace_counterexample()
    if fid is FixtureId.INVERTIBLE_OP_COUNTEREXAMPLE_R3:
        return _invertible_op_counterexample()
    if fid is FixtureId.CANONICAL_THREE_HYPERPLANES:
        return _canonical_three_hyperplanes(params.get("n", 3))
    if fid is FixtureId.TWO_BASIS_CONSTRUCTION:
        vecs, comps = two_basis_construction(params.get("n", 3), params.get("seed", 0))
        return Fixture(fid.value, vecs, {"complements": comps})
    return _proof_witness(params.get("n", 3), params.get("w1"), params.get("w2"))
