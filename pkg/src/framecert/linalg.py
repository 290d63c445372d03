"""Dual-backend linear algebra on small dense real spaces.

Two scalar backends are supported side by side:

* exact: vectors are tuples of :class:`fractions.Fraction`; every rank,
  nullspace and projection is computed without rounding.
* float: vectors are 1-D ``numpy`` arrays; every comparison goes through the
  global tolerances in :data:`TOL`.

The backend of an input is detected from its entries (``int``/``Fraction``
means exact) unless it is forced with ``exact=True/False``.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DependentInput, DimensionMismatch


@dataclass
class Tolerances:
    rank: float = 1e-10
    orth: float = 1e-9


TOL = Tolerances()


@contextmanager
def tolerances(**overrides):
    """Temporarily override the global float tolerances."""
    saved = Tolerances(TOL.rank, TOL.orth)
    for key, value in overrides.items():
        if not hasattr(TOL, key):
            raise AttributeError(key)
        setattr(TOL, key, value)
    try:
        yield TOL
    finally:
        TOL.rank, TOL.orth = saved.rank, saved.orth


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------


def _exact_scalar(c) -> bool:
    return isinstance(c, (int, Fraction)) and not isinstance(c, (bool, np.bool_))


def detect_exact(vectors: Iterable) -> bool:
    """True when every entry of every vector is an int or a Fraction."""
    for v in vectors:
        if isinstance(v, np.ndarray) and v.dtype.kind == "f":
            return False
        for c in v:
            if not _exact_scalar(c):
                return False
    return True


def vec(coords, exact: bool | None = None):
    """Build a vector in the requested backend."""
    coords = list(coords)
    if exact is None:
        exact = detect_exact([coords])
    if exact:
        return tuple(_to_fraction(c) for c in coords)
    return np.array([float(c) for c in coords], dtype=float)


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (np.floating, np.integer)):
        c = c.item()
    return Fraction(c)


def to_float(v) -> np.ndarray:
    return np.array([float(c) for c in v], dtype=float)


def to_exact(v) -> tuple[Fraction, ...]:
    """Exact copy; floats convert to their exact dyadic value."""
    return tuple(_to_fraction(c) for c in v)


def rationalize(v, max_denominator: int = 10**6) -> tuple[Fraction, ...]:
    """Nearest rationals with bounded denominators (continued fractions)."""
    return tuple(Fraction(float(c)).limit_denominator(max_denominator) for c in v)


def is_exact_vector(v) -> bool:
    return not isinstance(v, np.ndarray)


def dot(u, v):
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} != {len(v)}")
    if is_exact_vector(u) and is_exact_vector(v):
        return sum((a * b for a, b in zip(u, v)), Fraction(0))
    return float(np.dot(to_float(u), to_float(v)))


def norm_sq(v):
    return dot(v, v)


def norm(v) -> float:
    return math.sqrt(float(norm_sq(v)))


def add(u, v):
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} != {len(v)}")
    if is_exact_vector(u) and is_exact_vector(v):
        return tuple(a + b for a, b in zip(u, v))
    return to_float(u) + to_float(v)


def sub(u, v):
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} != {len(v)}")
    if is_exact_vector(u) and is_exact_vector(v):
        return tuple(a - b for a, b in zip(u, v))
    return to_float(u) - to_float(v)


def scale(c, v):
    if is_exact_vector(v) and _exact_scalar(c):
        return tuple(c * a for a in v)
    return float(c) * to_float(v)


def is_zero_scalar(c, tol: float | None = None) -> bool:
    if _exact_scalar(c):
        return c == 0
    return abs(float(c)) <= (TOL.orth if tol is None else tol)


def is_zero(v, tol: float | None = None) -> bool:
    if is_exact_vector(v):
        return all(c == 0 for c in v)
    return float(np.linalg.norm(v)) <= (TOL.rank if tol is None else tol)


def unit(e: int, n: int, exact: bool = True):
    """Canonical basis vector e_{e} (0-based) of R^n."""
    coords = [0] * n
    coords[e] = 1
    return vec(coords, exact)


# ---------------------------------------------------------------------------
# rank / nullspace
# ---------------------------------------------------------------------------


def integer_row(v) -> list[int]:
    """Scale an exact vector to an integer vector with the same direction."""
    den = reduce(math.lcm, (c.denominator for c in v), 1)
    return [int(c * den) for c in v]


def _bareiss_rank(rows: list[list[int]]) -> int:
    a = [list(r) for r in rows]
    m = len(a)
    if m == 0:
        return 0
    n = len(a[0])
    rank = 0
    prev = 1
    for col in range(n):
        piv = next((i for i in range(rank, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, m):
            q = a[i][col]
            a[i] = [(a[i][j] * p - a[rank][j] * q) // prev for j in range(n)]
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def _float_rank(vectors: Sequence) -> int:
    if len(vectors) == 0:
        return 0
    a = np.array([to_float(v) for v in vectors], dtype=float)
    norms = np.linalg.norm(a, axis=1)
    a = a[norms > 0] / norms[norms > 0, None]
    m, n = a.shape
    rank = 0
    for col in range(n):
        if rank == m:
            break
        piv = rank + int(np.argmax(np.abs(a[rank:, col])))
        if abs(a[piv, col]) <= TOL.rank:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank + 1 :] -= np.outer(a[rank + 1 :, col] / a[rank, col], a[rank])
        rank += 1
    return rank


def rank(vectors, exact: bool | None = None) -> int:
    """Dimension of the span of ``vectors``.

    A 2-D array is accepted as well; its rank does not depend on whether rows or
    columns are read as the vectors.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        vectors = list(vectors)
    vectors = list(vectors)
    if not vectors:
        return 0
    if exact is None:
        exact = detect_exact(vectors)
    if exact:
        return _bareiss_rank([integer_row(to_exact(v)) for v in vectors])
    return _float_rank(vectors)


def _primitive(v: list[Fraction]) -> tuple[Fraction, ...]:
    ints = integer_row(v)
    g = reduce(math.gcd, ints, 0) or 1
    first = next(c for c in ints if c != 0)
    if first < 0:
        g = -g
    return tuple(Fraction(c // g) for c in ints)


def rref(rows: Sequence[Sequence[Fraction]], n: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (rows, pivot columns)."""
    a = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][col]
        a[r] = [c * inv for c in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def nullspace(rows, n: int, exact: bool | None = None) -> list:
    """Basis of {x in R^n : <r, x> = 0 for every r in rows}.

    Exact bases are primitive integer vectors whose first nonzero entry is
    positive. Float bases are orthonormal.
    """
    rows = list(rows)
    if exact is None:
        exact = detect_exact(rows)
    if exact:
        red, pivots = rref([to_exact(r) for r in rows], n)
        free = [c for c in range(n) if c not in pivots]
        basis = []
        for f in free:
            x = [Fraction(0)] * n
            x[f] = Fraction(1)
            for row, p in zip(red, pivots):
                x[p] = -row[f]
            basis.append(_primitive(x))
        return basis
    if not rows:
        return list(np.eye(n))
    a = np.array([to_float(r) for r in rows], dtype=float)
    norms = np.linalg.norm(a, axis=1)
    a = a[norms > 0] / norms[norms > 0, None]
    if a.shape[0] == 0:
        return list(np.eye(n))
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    r = int(np.sum(s > TOL.rank * max(1.0, s[0])))
    return list(vt[r:])


# ---------------------------------------------------------------------------
# Gram-Schmidt
# ---------------------------------------------------------------------------


def gram_schmidt(vs, exact: bool | None = None) -> list:
    """Orthogonalize a linearly independent list, preserving order and span.

    The exact backend returns unnormalized orthogonal vectors (normalizing would
    need square roots); the float backend returns an orthonormal list.
    """
    vs = list(vs)
    if exact is None:
        exact = detect_exact(vs)
    if rank(vs, exact) < len(vs):
        raise DependentInput("Gram-Schmidt input is linearly dependent")
    out: list = []
    if exact:
        sq: list[Fraction] = []
        for v in vs:
            u = to_exact(v)
            for w, w2 in zip(out, sq):
                c = dot(u, w) / w2
                u = tuple(a - c * b for a, b in zip(u, w))
            out.append(u)
            sq.append(dot(u, u))
        return out
    for v in vs:
        u = to_float(v)
        # two passes of modified Gram-Schmidt keep the residual at roundoff level
        for _ in range(2):
            for w in out:
                u = u - np.dot(u, w) * w
        out.append(u / np.linalg.norm(u))
    return out


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^N stored by an independent spanning list."""

    ambient_dim: int
    basis: tuple
    exact: bool

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, exact: bool | None = None) -> "Subspace":
        """Subspace spanned by ``vectors``; dependent members are dropped in order."""
        vectors = list(vectors)
        if ambient_dim is None:
            if not vectors:
                raise ValueError("ambient_dim required for an empty spanning set")
            ambient_dim = len(vectors[0])
        if exact is None:
            exact = detect_exact(vectors)
        kept: list = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in R^{ambient_dim}")
            v = vec(v, exact)
            if rank(kept + [v], exact) > len(kept):
                kept.append(v)
        return cls(ambient_dim, tuple(kept), exact)

    @classmethod
    def full(cls, n: int, exact: bool = True) -> "Subspace":
        return cls(n, tuple(unit(i, n, exact) for i in range(n)), exact)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def orthogonal_basis(self) -> tuple:
        if not self.basis:
            return ()
        return tuple(gram_schmidt(self.basis, self.exact))

    @cached_property
    def _orth_sq(self) -> tuple:
        return tuple(dot(b, b) for b in self.orthogonal_basis)

    def to_float(self) -> "Subspace":
        if not self.exact:
            return self
        return Subspace(self.ambient_dim, tuple(to_float(b) for b in self.basis), False)

    def to_exact(self) -> "Subspace":
        if self.exact:
            return self
        return Subspace.span([to_exact(b) for b in self.basis], self.ambient_dim, True)

    def project(self, x):
        """Orthogonal projection of ``x``; exact when both inputs are exact."""
        if len(x) != self.ambient_dim:
            raise DimensionMismatch(f"vector of length {len(x)} in R^{self.ambient_dim}")
        if self.exact and is_exact_vector(x):
            out = [Fraction(0)] * self.ambient_dim
            for b, b2 in zip(self.orthogonal_basis, self._orth_sq):
                c = dot(x, b) / b2
                if c:
                    out = [o + c * bi for o, bi in zip(out, b)]
            return tuple(out)
        return self.projection_array @ to_float(x)

    @cached_property
    def projection_array(self) -> np.ndarray:
        """Float64 projection matrix."""
        n = self.ambient_dim
        if not self.basis:
            return np.zeros((n, n))
        if self.exact:
            return np.array([[float(c) for c in row] for row in self.projection_matrix()])
        q = np.array(self.orthogonal_basis).T
        return q @ q.T

    def projection_matrix(self):
        """Projection matrix; a list of Fraction rows in the exact backend."""
        if not self.exact:
            return self.projection_array
        n = self.ambient_dim
        p = [[Fraction(0)] * n for _ in range(n)]
        for b, b2 in zip(self.orthogonal_basis, self._orth_sq):
            for i in range(n):
                if b[i]:
                    bi = b[i] / b2
                    row = p[i]
                    for j in range(n):
                        row[j] += bi * b[j]
        return p

    def contains(self, x) -> bool:
        return is_zero(sub(x, self.project(x)))

    def complement(self) -> "Subspace":
        return orthogonal_complement(self)

    def same_span(self, other: "Subspace") -> bool:
        exact = self.exact and other.exact
        if self.dim != other.dim:
            return False
        return rank(list(self.basis) + list(other.basis), exact) == self.dim

    def is_orthogonal_to(self, other: "Subspace") -> bool:
        return all(is_zero_scalar(dot(a, b)) for a in self.orthogonal_basis for b in other.orthogonal_basis)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, N={self.ambient_dim}, exact={self.exact})"


def orthogonal_complement(w: Subspace) -> Subspace:
    basis = nullspace(w.basis, w.ambient_dim, w.exact)
    return Subspace(w.ambient_dim, tuple(vec(b, w.exact) for b in basis), w.exact)


def project(w: Subspace, x):
    return w.project(x)


def intersection_dim(w1: Subspace, w2: Subspace) -> int:
    if w1.ambient_dim != w2.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    exact = w1.exact and w2.exact
    joined = rank(list(w1.basis) + list(w2.basis), exact)
    return w1.dim + w2.dim - joined


# ---------------------------------------------------------------------------
# operator norm
# ---------------------------------------------------------------------------


def operator_norm(m, squarings: int = 60) -> float:
    """Spectral norm by power iteration on m^T m.

    The iteration is accelerated by repeated squaring (each squaring doubles the
    number of power steps), then the norm is read off as ||m x|| / ||x|| for the
    dominant column x of the iterated matrix.
    """
    a = np.array([[float(c) for c in row] for row in m], dtype=float)
    if a.size == 0:
        return 0.0
    scale_ = float(np.max(np.abs(a)))
    if scale_ == 0.0:
        return 0.0
    a = a / scale_
    b = a.T @ a
    for _ in range(squarings):
        nb = np.linalg.norm(b)
        if nb == 0.0:
            return 0.0
        b2 = b @ b
        n2 = np.linalg.norm(b2)
        if n2 == 0.0:
            break
        b2 /= n2
        if np.linalg.norm(b2 - b / nb) < 1e-15:
            b = b2
            break
        b = b2
    x = b[:, int(np.argmax(np.linalg.norm(b, axis=0)))]
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return 0.0
    # one more plain power step sharpens the Rayleigh estimate
    x = a.T @ (a @ x)
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return 0.0
    return float(np.linalg.norm(a @ x) / nx) * scale_
