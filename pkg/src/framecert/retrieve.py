"""Constructive norm reconstruction.

* Three hyperplanes with normals e1, e2 and e1 − e2 recover ‖x‖ in any R^N,
  N >= 3. Writing a1 = x_1, a2 = x_2 and S = x_3² + ... + x_N², the squared
  measurements are ‖P_1x‖² = a2² + S, ‖P_2x‖² = a1² + S and
  ‖P_3x‖² = S + (a1 + a2)²/2, from which a1² − a2², a1·a2 and hence
  a1² + a2² = sqrt((a1² − a2²)² + 4(a1a2)²) follow.
* A tight frame with bound A gives ‖x‖² = Σ|<x, φ_i>|² / A.
* A pair x, y of equal norm in W admits an orthonormal basis of W on which
  their moduli agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg as la
from .errors import InconsistentMeasurements, NotTight, PreconditionViolated
from .frames import VectorFamily, is_tight
from .linalg import Subspace

__all__ = [
    "TripleMeasurement",
    "canonical_normals",
    "measure_three_hyperplanes",
    "reconstruct_norm_sq_three_hyperplanes",
    "reconstruct_norm_three_hyperplanes",
    "reconstruct_norm_sq_tight",
    "reconstruct_norm_tight",
    "MatchedBasis",
    "matched_moduli_basis",
]


def canonical_normals(n: int, exact: bool = True) -> list:
    """The normals e1, e2, e1 − e2 of the canonical hyperplane triple in R^n."""
    if n < 2:
        raise ValueError("the canonical triple needs N >= 2")
    third = [0] * n
    third[0], third[1] = 1, -1
    return [la.unit(0, n, exact), la.unit(1, n, exact), la.vec(third, exact)]


def _is_exact_scalar(c) -> bool:
    return isinstance(c, (int, Fraction)) and not isinstance(c, bool)


@dataclass(frozen=True)
class TripleMeasurement:
    """Squared measurements ‖P_kx‖² for the canonical hyperplane triple.

    Squares are stored so rational inputs stay exact; ``m1``..``m3`` give the
    norms themselves.
    """

    sq1: object
    sq2: object
    sq3: object

    @classmethod
    def from_norms(cls, m1, m2, m3) -> "TripleMeasurement":
        ms = (m1, m2, m3)
        if any(m < 0 for m in ms):
            raise InconsistentMeasurements("measurements must be nonnegative")
        return cls(*(m * m for m in ms))

    @classmethod
    def from_squared(cls, s1, s2, s3) -> "TripleMeasurement":
        return cls(s1, s2, s3)

    @property
    def squared(self) -> tuple:
        return (self.sq1, self.sq2, self.sq3)

    @property
    def exact(self) -> bool:
        return all(_is_exact_scalar(s) for s in self.squared)

    @property
    def m1(self) -> float:
        return math.sqrt(self.sq1)

    @property
    def m2(self) -> float:
        return math.sqrt(self.sq2)

    @property
    def m3(self) -> float:
        return math.sqrt(self.sq3)

    @property
    def diff(self):
        """a1² − a2²."""
        return self.sq2 - self.sq1

    @property
    def prod(self):
        """a1 · a2."""
        if self.exact:
            return self.sq3 - Fraction(self.sq1 + self.sq2, 2)
        return self.sq3 - 0.5 * (self.sq1 + self.sq2)


def measure_three_hyperplanes(x) -> TripleMeasurement:
    """Project x onto the three canonical hyperplanes and record ‖P_kx‖²."""
    exact = la.is_exact_vector(x)
    n = len(x)
    sq = []
    for normal in canonical_normals(n, exact):
        h = Subspace.span([normal], n, exact).complement()
        sq.append(la.norm_sq(h.project(x)))
    return TripleMeasurement(*(sq if exact else [float(s) for s in sq]))


def _sqrt_exact_or_float(q):
    if _is_exact_scalar(q):
        q = Fraction(q)
        a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
        if a * a == q.numerator and b * b == q.denominator:
            return Fraction(a, b)
    return math.sqrt(q)


def reconstruct_norm_sq_three_hyperplanes(t: TripleMeasurement, tol: float = 1e-9):
    """‖x‖² from the triple; a Fraction whenever the square roots involved are rational.

    The hidden tail S = ‖x‖² − a1² − a2² must be nonnegative; a negative value
    beyond ``tol`` (relative) means no real x produces these measurements.
    """
    if any(s < 0 for s in t.squared):
        raise InconsistentMeasurements("squared measurements must be nonnegative")
    diff, prod = t.diff, t.prod
    a_sum = _sqrt_exact_or_float(diff * diff + 4 * prod * prod)
    if isinstance(a_sum, Fraction):
        half = Fraction(t.sq1 + t.sq2, 2)
        tail = half - a_sum / 2
        total = half + a_sum / 2
        if tail < 0:
            raise InconsistentMeasurements(f"implied tail ‖x‖² − a1² − a2² = {tail} is negative")
        return total
    half = 0.5 * (float(t.sq1) + float(t.sq2))
    a_sum = float(a_sum)
    tail = half - 0.5 * a_sum
    if tail < -tol * max(1.0, half):
        raise InconsistentMeasurements(f"implied tail ‖x‖² − a1² − a2² = {tail:.3e} is negative")
    return half + 0.5 * a_sum


def reconstruct_norm_three_hyperplanes(t: TripleMeasurement, tol: float = 1e-9) -> float:
    return math.sqrt(reconstruct_norm_sq_three_hyperplanes(t, tol))


def reconstruct_norm_sq_tight(f: VectorFamily, measurements):
    """Σ m_i² / A for a tight family with bound A."""
    a = is_tight(f)
    if a is None:
        raise NotTight("the family is not tight")
    measurements = list(measurements)
    if len(measurements) != f.M:
        raise PreconditionViolated(f"expected {f.M} measurements, got {len(measurements)}")
    if f.exact and all(_is_exact_scalar(m) for m in measurements):
        return sum((Fraction(m) ** 2 for m in measurements), Fraction(0)) / a
    return float(sum(float(m) ** 2 for m in measurements)) / float(a)


def reconstruct_norm_tight(f: VectorFamily, measurements) -> float:
    """Norm from tight-frame moduli |<x, φ_i>|."""
    return math.sqrt(reconstruct_norm_sq_tight(f, measurements))


@dataclass(frozen=True)
class MatchedBasis:
    basis: tuple
    moduli: tuple

    def orthonormality_residual(self) -> float:
        b = np.array(self.basis)
        return float(np.max(np.abs(b @ b.T - np.eye(len(self.basis)))))


def _next_direction(candidates: np.ndarray, constraints: list, rel: float = 1e-8):
    """First candidate with a nonnegligible component orthogonal to ``constraints``."""
    q = np.array(la.gram_schmidt(constraints, False)) if constraints else np.zeros((0, candidates.shape[1]))
    for c in candidates:
        r = c.copy()
        for _ in range(2 if len(q) else 0):
            r -= q.T @ (q @ r)
        nr = np.linalg.norm(r)
        if nr > rel:
            return r / nr
    return None


def matched_moduli_basis(w: Subspace, x, y, tol: float = 1e-9) -> MatchedBasis:
    """Orthonormal basis of W on which x and y have equal moduli.

    For k < dim W the vector φ_k is a unit vector of W orthogonal to x − y and to
    the earlier φ's, so <x, φ_k> = <y, φ_k>. The last vector completes the basis;
    its moduli agree because ‖x‖ = ‖y‖ and all other coefficients match.
    Candidates are taken from the stored orthonormal basis of W in order.
    """
    if not (w.contains(x) and w.contains(y)):
        raise PreconditionViolated("x and y must lie in W")
    xf, yf = la.to_float(x), la.to_float(y)
    nx, ny = np.linalg.norm(xf), np.linalg.norm(yf)
    if abs(nx - ny) > tol * max(1.0, nx):
        raise PreconditionViolated(f"norms differ: {nx} vs {ny}")
    onb = np.array(w.to_float().orthogonal_basis)
    p = w.dim
    d = xf - yf
    chosen: list = []
    for k in range(p):
        constraints = list(chosen)
        if k < p - 1 and np.linalg.norm(d) > tol:
            constraints = [d] + constraints
        phi = _next_direction(onb, constraints)
        if phi is None:
            phi = _next_direction(onb, list(chosen))
        chosen.append(phi)
    moduli = tuple(float(abs(xf @ phi)) for phi in chosen)
    return MatchedBasis(tuple(chosen), moduli)
