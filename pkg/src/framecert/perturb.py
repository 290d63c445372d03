"""Perturbation and stability checks.

* normalizing a perturbed unit vector at most doubles its distance;
* Gram-Schmidt on a small perturbation of an orthonormal set moves each
  output vector by at most C_k·delta, with C_1 = 2 and
  C_k = 2(k + C_1 + ... + C_{k-1});
* projections at operator distance below 1 have ranges of equal dimension;
* neighborhood scans that sample perturbed families and tally verdicts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .certificates import Certificate, Verdict
from .errors import DependentPerturbation, DimensionMismatch, PreconditionViolated, ZeroVector
from .frames import VectorFamily, certify_nr_vectors, certify_pr_vectors
from .linalg import Subspace
from .subspaces import FalsifierConfig, SubspaceFamily, certify_nr_subspaces, certify_pr_subspaces

logger = logging.getLogger(__name__)

__all__ = [
    "normalize_perturbation_bound",
    "gram_schmidt_constants",
    "StabilityReport",
    "stable_gram_schmidt",
    "dim_preserved_under_projection_distance",
    "ScanResult",
    "neighborhood_scan",
]


def normalize_perturbation_bound(x, y) -> tuple[float, float]:
    """(‖y/‖y‖ − x‖, 2‖y − x‖) for a unit vector x.

    Raises AssertionError if the first is not strictly smaller while
    0 < ‖y − x‖ < 1.
    """
    xf, yf = la.to_float(x), la.to_float(y)
    if abs(np.linalg.norm(xf) - 1.0) > 1e-12:
        raise PreconditionViolated("x must be a unit vector")
    ny = np.linalg.norm(yf)
    if ny == 0.0:
        raise ZeroVector("y must be nonzero")
    eps = float(np.linalg.norm(yf - xf))
    lhs = float(np.linalg.norm(yf / ny - xf))
    rhs = 2 * eps
    if 0 < eps < 1 and not lhs < rhs:
        raise AssertionError(f"normalization bound violated: {lhs} >= {rhs}")
    return lhs, rhs


def gram_schmidt_constants(p: int) -> list[int]:
    """C_1..C_p from C_1 = 2, C_k = 2(k + Σ_{i<k} C_i)."""
    cs: list[int] = []
    for k in range(1, p + 1):
        cs.append(2 * (k + sum(cs)))
    return cs


@dataclass
class StabilityReport:
    delta: float
    epsilon: float
    constant_C: int
    per_vector_constants: list[int]
    per_vector_errors: list[float]
    orthonormality_residual: float
    span_preserved: bool
    span_gap: float
    zs: np.ndarray = field(repr=False)

    @property
    def within_bound(self) -> bool:
        return all(e <= c * self.delta for e, c in zip(self.per_vector_errors, self.per_vector_constants))


def stable_gram_schmidt(xs, ys, delta: float) -> StabilityReport:
    """Orthonormalize ``ys`` and compare with the orthonormal ``xs``.

    ``epsilon`` is C_p·delta, the guaranteed bound on every output error. The
    span check runs in exact arithmetic on the binary values of the float
    vectors: the outputs must be exactly independent and each must lie within
    1e-12 of span(ys).
    """
    xs = np.array([la.to_float(x) for x in xs])
    ys = np.array([la.to_float(y) for y in ys])
    if xs.shape != ys.shape:
        raise PreconditionViolated("xs and ys must have the same shape")
    p = len(xs)
    if np.max(np.abs(xs @ xs.T - np.eye(p))) > 1e-12:
        raise PreconditionViolated("xs must be orthonormal")
    dist = np.linalg.norm(ys - xs, axis=1)
    if np.any(dist > delta):
        raise PreconditionViolated(f"perturbation {dist.max():.3e} exceeds delta {delta:.3e}")
    exact_ys = [la.to_exact(y) for y in ys]
    if la.rank(exact_ys, True) < p:
        raise DependentPerturbation("perturbed vectors are dependent")
    zs = np.array(la.gram_schmidt(list(ys), False))
    cs = gram_schmidt_constants(p)
    errors = [float(e) for e in np.linalg.norm(zs - xs, axis=1)]
    residual = float(np.max(np.abs(zs @ zs.T - np.eye(p))))
    span_gap = _span_gap(exact_ys, zs)
    return StabilityReport(delta, cs[-1] * delta, cs[-1], cs, errors, residual, span_gap <= 1e-12, span_gap, zs)


def _span_gap(exact_ys: list, zs: np.ndarray) -> float:
    """Largest distance from an output vector to span(ys), computed exactly.

    Each z is taken at its exact binary value; infinity if the zs are dependent.
    """
    exact_zs = [la.to_exact(z) for z in zs]
    if la.rank(exact_zs, True) < len(exact_zs):
        return float("inf")
    target = Subspace.span(exact_ys, len(exact_ys[0]), True)
    return max(la.norm(la.sub(z, target.project(z))) for z in exact_zs)


def _rank_of_projection(p: np.ndarray) -> int:
    return int(round(float(np.trace(p))))


def _as_projection(p) -> np.ndarray:
    if isinstance(p, Subspace):
        return p.projection_array
    return np.array([[float(c) for c in row] for row in p], dtype=float)


def dim_preserved_under_projection_distance(p, q, tol: float = 1e-9) -> Certificate:
    """Check that ‖P − Q‖ < 1 forces dim P(R^N) = dim Q(R^N).

    Raises AssertionError on a violation; returns unknown when the distance is
    not below 1 and the statement says nothing.
    """
    pa, qa = _as_projection(p), _as_projection(q)
    if pa.shape != qa.shape:
        raise DimensionMismatch("projections act on different spaces")
    dist = la.operator_norm(pa - qa)
    dp, dq = _rank_of_projection(pa), _rank_of_projection(qa)
    detail = {"norm": dist, "dim_p": dp, "dim_q": dq}
    if dist < 1 - tol:
        if dp != dq:
            raise AssertionError(f"dimension changed ({dp} -> {dq}) at projection distance {dist}")
        return Certificate(Verdict.PASS, "projection-distance", None, detail)
    return Certificate(Verdict.UNKNOWN, "projection-distance", None, detail)


@dataclass
class ScanResult:
    center: object
    radius: float
    samples: int
    prop: str
    seed: int
    guarded: bool
    verdicts: dict
    first_nonfail: dict | None = None

    def fraction(self, verdict: str) -> float:
        return self.verdicts.get(verdict, 0) / self.samples if self.samples else 0.0


def _perturb_vectors(fam: VectorFamily, radius: float, rng: np.random.Generator) -> VectorFamily:
    base = np.array([la.to_float(v) for v in fam.vectors])
    r = rng.standard_normal(base.shape)
    norms = np.linalg.norm(r, axis=1)
    r *= radius * rng.uniform(0.0, 1.0) / norms.sum()
    return VectorFamily.of(list(base + r), exact=False)


def _perturb_subspaces(fam: SubspaceFamily, radius: float, rng: np.random.Generator, tries: int = 100) -> SubspaceFamily:
    out = []
    for w in fam.subspaces:
        onb = np.array(w.to_float().orthogonal_basis)
        pw = w.projection_array
        for _ in range(tries):
            g = rng.standard_normal(onb.shape)
            cand = onb + g * (radius * rng.uniform(0.0, 1.0) / (2 * np.linalg.norm(g)))
            s = Subspace.span(list(cand), w.ambient_dim, False)
            if s.dim == w.dim and la.operator_norm(s.projection_array - pw) < radius:
                out.append(s)
                break
        else:
            raise PreconditionViolated("could not sample a perturbed subspace within the radius")
    return SubspaceFamily.of(out, exact=False)


def _certify(fam, prop: str, cfg: FalsifierConfig) -> Certificate:
    if isinstance(fam, VectorFamily):
        return certify_nr_vectors(fam) if prop == "nr" else certify_pr_vectors(fam)
    return certify_nr_subspaces(fam, cfg) if prop == "nr" else certify_pr_subspaces(fam, cfg)


def neighborhood_scan(
    fam,
    radius: float,
    samples: int,
    seed: int = 0,
    prop: str = "nr",
    guarded: bool = True,
    cfg: FalsifierConfig | None = None,
) -> ScanResult:
    """Certify ``samples`` random perturbations of ``fam`` and tally the verdicts.

    In guarded mode (norm retrieval only) the center must fail norm retrieval
    with total dimension below 2N − 1, the regime in which small perturbations
    are expected to keep failing. Unguarded mode skips the preconditions and
    accepts either property. Sample k draws from its own generator seeded by
    (seed, k), so results do not depend on evaluation order.
    """
    if prop not in ("nr", "pr"):
        raise ValueError("prop must be 'nr' or 'pr'")
    cfg = cfg or FalsifierConfig(starts=8, lift_trials=4, seed=seed)
    n = fam.ambient_dim
    if guarded:
        if prop != "nr":
            raise PreconditionViolated("guarded scans apply to norm retrieval only")
        size = fam.M if isinstance(fam, VectorFamily) else fam.total_dim
        if size >= 2 * n - 1:
            raise PreconditionViolated(f"total dimension {size} is not below 2N-1 = {2 * n - 1}")
        if not _certify(fam, "nr", cfg).failed:
            raise PreconditionViolated("the center does not fail norm retrieval")
    counts = {"fail": 0, "unknown": 0, "pass": 0}
    first = None
    for k in range(samples):
        rng = np.random.default_rng([seed, k])
        if isinstance(fam, VectorFamily):
            sample = _perturb_vectors(fam, radius, rng)
        else:
            sample = _perturb_subspaces(fam, radius, rng)
        cert = _certify(sample, prop, cfg)
        counts[cert.verdict.value] += 1
        if first is None and not cert.failed:
            first = {"index": k, "seed": [seed, k], "verdict": cert.verdict.value, "method": cert.method}
    logger.info("scan radius=%g samples=%d verdicts=%s", radius, samples, counts)
    return ScanResult(fam, radius, samples, prop, seed, guarded, counts, first)
