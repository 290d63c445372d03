"""Certifiers for finite families of vectors in R^N.

Exact families are enumerated with incremental elimination modulo the
Mersenne prime 2^61 - 1. A rank of N modulo p proves a rank of N over the
rationals, so pruning a branch once one side spans is always sound; every
claimed rank deficiency is re-checked with exact integer elimination before it
is reported.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator

import numpy as np

from . import linalg as la
from .certificates import Certificate, Partition, Verdict, make_witness_pair
from .errors import FamilyTooSmall, NotABasis, ZeroVector, DimensionMismatch

logger = logging.getLogger(__name__)

PRIME = (1 << 61) - 1


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """An ordered family of nonzero vectors of R^N."""

    ambient_dim: int
    vectors: tuple
    exact: bool
    labels: tuple | None = None

    @classmethod
    def of(cls, vectors, exact: bool | None = None, labels=None, ambient_dim: int | None = None) -> "VectorFamily":
        vectors = list(vectors)
        if ambient_dim is None:
            if not vectors:
                raise ValueError("empty family needs an explicit ambient_dim")
            ambient_dim = len(vectors[0])
        if exact is None:
            exact = la.detect_exact(vectors)
        out = []
        for i, v in enumerate(vectors):
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector {i} has length {len(v)}, expected {ambient_dim}")
            v = la.vec(v, exact)
            if la.is_zero(v, 0.0):
                raise ZeroVector(f"vector {i} is zero")
            out.append(v)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != len(out):
                raise ValueError("one label per vector required")
        return cls(ambient_dim, tuple(out), exact, labels)

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def M(self) -> int:
        return len(self.vectors)

    def to_float(self) -> "VectorFamily":
        if not self.exact:
            return self
        return VectorFamily(self.ambient_dim, tuple(la.to_float(v) for v in self.vectors), False, self.labels)

    def subfamily(self, indices) -> "VectorFamily":
        idx = list(indices)
        labels = None if self.labels is None else tuple(self.labels[i] for i in idx)
        return VectorFamily(self.ambient_dim, tuple(self.vectors[i] for i in idx), self.exact, labels)

    def measure_sq(self, x) -> list:
        """Squared norms of the projections of x onto each line span{φ_i}."""
        return [la.dot(x, v) ** 2 / la.norm_sq(v) for v in self.vectors]

    def projected(self, x) -> list:
        return [la.scale(la.dot(x, v) / la.norm_sq(v), v) for v in self.vectors]

    def spans(self) -> bool:
        return la.rank(self.vectors, self.exact) == self.ambient_dim


# ---------------------------------------------------------------------------
# incremental elimination
# ---------------------------------------------------------------------------
#
# A side of a partition is tracked by a basis of the orthogonal complement of
# its span. Pushing a vector costs O((N - rank) * N), which is cheap exactly
# where the enumeration spends its time (sides close to spanning). A side spans
# once its complement basis is empty. States are never mutated, so the search
# simply keeps references to the parent state.


def _modp_push(state: list, v: list[int]):
    """New complement basis after adding v, or None when v is already in the span."""
    for t, c in enumerate(state):
        d = sum(a * b for a, b in zip(c, v)) % PRIME
        if d:
            break
    else:
        return None
    c0 = state[t]
    out = state[:t]
    for c in state[t + 1 :]:
        e = sum(a * b for a, b in zip(c, v)) % PRIME
        out.append([(d * a - e * b) % PRIME for a, b in zip(c, c0)] if e else c)
    return out


def _exact_push(state: list, v: list[int]):
    for t, c in enumerate(state):
        d = sum(a * b for a, b in zip(c, v))
        if d:
            break
    else:
        return None
    c0 = state[t]
    out = state[:t]
    for c in state[t + 1 :]:
        e = sum(a * b for a, b in zip(c, v))
        if e:
            c = [d * a - e * b for a, b in zip(c, c0)]
            g = reduce(math.gcd, c, 0) or 1
            c = [a // g for a in c]
        out.append(c)
    return out


def _float_push(state: np.ndarray, v: np.ndarray):
    w = state @ v
    nw = float(np.linalg.norm(w))
    if nw <= la.TOL.rank:
        return None
    k = state.shape[0]
    if k == 1:
        return state[:0]
    u = w / nw
    h = u.copy()
    h[0] += 1.0 if u[0] >= 0 else -1.0
    hh = np.eye(k) - 2.0 * np.outer(h, h) / float(h @ h)
    return hh[1:] @ state


class _ModularAnomaly(Exception):
    """A residue computation disagreed with exact arithmetic."""


def _engine(fam: VectorFamily, modular: bool = True):
    """(per-vector representations, push function, initial state, integer rows or None)."""
    n = fam.ambient_dim
    if fam.exact:
        ints = [la.integer_row(v) for v in fam.vectors]
        eye = [[int(i == j) for j in range(n)] for i in range(n)]
        if modular:
            return [[c % PRIME for c in r] for r in ints], _modp_push, eye, ints
        return ints, _exact_push, eye, ints
    reps = [np.asarray(v, dtype=float) / np.linalg.norm(v) for v in fam.vectors]
    return reps, _float_push, np.eye(n), None


def _exact_rank_of(ints, idx) -> int:
    return la._bareiss_rank([ints[i] for i in idx])


def deficient_partitions(fam: VectorFamily) -> Iterator[Partition]:
    """Yield every partition in which neither side spans R^N.

    Index 0 is pinned to side1. Order is depth-first with side1 tried before
    side2, so the first partition yielded is the one whose side2 indicator
    string is lexicographically smallest.
    """
    n, m = fam.ambient_dim, fam.M
    reps, push, init, ints = _engine(fam)
    side = [0] * m

    def rec(k: int, s1, s2):
        if k == m:
            p1 = tuple(i for i in range(m) if side[i] == 0)
            p2 = tuple(i for i in range(m) if side[i] == 1)
            if ints is not None and (_exact_rank_of(ints, p1) == n or _exact_rank_of(ints, p2) == n):
                return
            yield Partition(p1, p2)
            return
        nxt = push(s1, reps[k])
        nxt = s1 if nxt is None else nxt
        if len(nxt):
            side[k] = 0
            yield from rec(k + 1, nxt, s2)
        if k == 0:
            return
        nxt = push(s2, reps[k])
        nxt = s2 if nxt is None else nxt
        if len(nxt):
            side[k] = 1
            yield from rec(k + 1, s1, nxt)

    yield from rec(0, init, init)


def _side_vectors(fam: VectorFamily, side) -> list:
    return [fam.vectors[i] for i in side]


# ---------------------------------------------------------------------------
# spark
# ---------------------------------------------------------------------------


def _spark(fam: VectorFamily, modular: bool) -> int:
    m = fam.M
    reps, push, init, ints = _engine(fam, modular)
    best = [m + 1]
    chosen: list[int] = []

    def rec(start: int, state):
        for j in range(start, m):
            if len(chosen) + 1 >= best[0]:
                return
            nxt = push(state, reps[j])
            if nxt is not None:
                chosen.append(j)
                rec(j + 1, nxt)
                chosen.pop()
            else:
                if modular and ints is not None and _exact_rank_of(ints, chosen + [j]) == len(chosen) + 1:
                    raise _ModularAnomaly
                best[0] = len(chosen) + 1

    rec(0, init)
    return best[0]


def spark(fam: VectorFamily) -> int:
    """Size of the smallest linearly dependent subfamily (M + 1 if none)."""
    try:
        return _spark(fam, modular=True)
    except _ModularAnomaly:
        logger.warning("modular elimination disagreed with exact rank; recomputing over Q")
        return _spark(fam, modular=False)


def is_full_spark(fam: VectorFamily) -> bool:
    if fam.M < fam.ambient_dim:
        raise FamilyTooSmall(f"full spark needs M >= N, got M={fam.M}, N={fam.ambient_dim}")
    return spark(fam) == fam.ambient_dim + 1


# ---------------------------------------------------------------------------
# phase retrieval
# ---------------------------------------------------------------------------


def _complement_vector(fam: VectorFamily, side):
    basis = la.nullspace(_side_vectors(fam, side), fam.ambient_dim, fam.exact)
    return la.vec(basis[0], fam.exact)


def has_complement_property(fam: VectorFamily) -> Certificate:
    """Exhaustive complement-property check over all 2^(M-1) bipartitions."""
    for part in deficient_partitions(fam):
        x = _complement_vector(fam, part.side1)
        y = _complement_vector(fam, part.side2)
        pair = make_witness_pair(x, y, fam)
        detail = {
            "rank_side1": la.rank(_side_vectors(fam, part.side1), fam.exact),
            "rank_side2": la.rank(_side_vectors(fam, part.side2), fam.exact),
            "witness_pair": pair,
        }
        return Certificate(Verdict.FAIL, "complement-property", part, detail)
    return Certificate(Verdict.PASS, "complement-property", None, {"partitions": 2 ** (fam.M - 1)})


def certify_pr_vectors(fam: VectorFamily) -> Certificate:
    """Real phase retrieval is equivalent to the complement property."""
    return has_complement_property(fam)


# ---------------------------------------------------------------------------
# norm retrieval
# ---------------------------------------------------------------------------


def certify_nr_vectors(fam: VectorFamily) -> Certificate:
    """Norm retrieval through the partition-orthogonality criterion.

    For every partition {I1, I2}, the orthogonal complements of span{φ_i : i in I1}
    and span{φ_i : i in I2} must be orthogonal. Sides that span have a zero
    complement and are skipped by the enumeration.
    """
    n = fam.ambient_dim
    if not fam.spans():
        z = la.vec(la.nullspace(fam.vectors, n, fam.exact)[0], fam.exact)
        pair = make_witness_pair(z, z, fam)
        return Certificate(Verdict.FAIL, "not-a-frame", z, {"witness_pair": pair})
    cache: dict[tuple, list] = {}

    def comp(side):
        if side not in cache:
            cache[side] = [la.vec(b, fam.exact) for b in la.nullspace(_side_vectors(fam, side), n, fam.exact)]
        return cache[side]

    checked = 0
    for part in deficient_partitions(fam):
        checked += 1
        for a in comp(part.side1):
            for b in comp(part.side2):
                ip = la.dot(a, b)
                if not la.is_zero_scalar(ip):
                    pair = make_witness_pair(a, b, fam)
                    detail = {
                        "complement_pair": (a, b),
                        "inner_product": ip,
                        "witness_pair": pair,
                    }
                    return Certificate(Verdict.FAIL, "partition-orthogonality", part, detail)
    return Certificate(Verdict.PASS, "partition-orthogonality", None, {"deficient_partitions": checked})


def frame_operator(fam: VectorFamily):
    n = fam.ambient_dim
    if fam.exact:
        s = [[Fraction(0)] * n for _ in range(n)]
        for v in fam.vectors:
            for i in range(n):
                if v[i]:
                    for j in range(n):
                        s[i][j] += v[i] * v[j]
        return s
    a = np.array(fam.vectors, dtype=float)
    return a.T @ a


def is_tight(fam: VectorFamily):
    """Frame bound A when Σ φ_i φ_iᵀ = A·I, else None."""
    s = frame_operator(fam)
    n = fam.ambient_dim
    if fam.exact:
        a = s[0][0]
        ok = all(s[i][j] == (a if i == j else 0) for i in range(n) for j in range(n))
        return a if ok and a > 0 else None
    a = float(np.trace(s)) / n
    if a <= 0:
        return None
    if np.max(np.abs(s - a * np.eye(n))) <= la.TOL.orth * max(1.0, a):
        return a
    return None


def basis_nr_iff_orthogonal(fam: VectorFamily) -> Certificate:
    """A basis does norm retrieval exactly when it is orthogonal."""
    n = fam.ambient_dim
    if fam.M != n or la.rank(fam.vectors, fam.exact) != n:
        raise NotABasis(f"expected a basis of R^{n}, got {fam.M} vectors")
    for i in range(n):
        for j in range(i + 1, n):
            ip = la.dot(fam.vectors[i], fam.vectors[j])
            if not la.is_zero_scalar(ip):
                return Certificate(Verdict.FAIL, "basis-orthogonality", (i, j), {"inner_product": ip})
    return Certificate(Verdict.PASS, "basis-orthogonality")
