"""Phase and norm retrieval for families of subspaces (orthogonal projections).

Only a handful of structural situations are decidable outright; those are
handled by :func:`certify_nr_exact_cases`. Everything else goes through
semi-decision procedures that can prove failure with a witness pair but never
prove success:

* lifting each subspace to an orthogonal basis and certifying the resulting
  vector family (a failing lift is a failing subspace family);
* multi-start projected gradient descent on the unit sphere.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

import numpy as np

from . import linalg as la
from .certificates import Certificate, Verdict, WitnessPair, make_witness_pair, measure_pair
from .errors import DimensionMismatch, FullSpaceMember, NotADirectSum
from .frames import VectorFamily, certify_nr_vectors, certify_pr_vectors
from .linalg import Subspace

logger = logging.getLogger(__name__)

__all__ = [
    "SubspaceFamily",
    "FalsifierConfig",
    "WitnessPair",
    "make_witness_pair",
    "falsify_nr_subspaces",
    "falsify_pr_subspaces",
    "lift_to_vectors",
    "falsify_by_lift",
    "hyperplane_sign_witness",
    "nr_witness_by_probing",
    "certify_nr_exact_cases",
    "certify_nr_subspaces",
    "certify_pr_subspaces",
    "check_pairwise_trivial_intersection",
    "split_direct_sum",
    "complements_family",
]


@dataclass(frozen=True, eq=False)
class SubspaceFamily:
    ambient_dim: int
    subspaces: tuple[Subspace, ...]
    exact: bool

    @classmethod
    def of(cls, members, exact: bool | None = None, ambient_dim: int | None = None) -> "SubspaceFamily":
        """Build from Subspace objects or from spanning lists of vectors."""
        members = list(members)
        subs = []
        for m in members:
            if isinstance(m, Subspace):
                subs.append(m)
            else:
                subs.append(Subspace.span(m, ambient_dim, exact))
        if not subs:
            raise ValueError("a subspace family needs at least one member")
        n = subs[0].ambient_dim if ambient_dim is None else ambient_dim
        if exact is None:
            exact = all(s.exact for s in subs)
        out = []
        for i, s in enumerate(subs):
            if s.ambient_dim != n:
                raise DimensionMismatch(f"subspace {i} lives in R^{s.ambient_dim}, expected R^{n}")
            if s.dim < 1:
                raise ValueError(f"subspace {i} is zero-dimensional")
            if s.exact != exact:
                s = s.to_exact() if exact else s.to_float()
            out.append(s)
        return cls(n, tuple(out), exact)

    @classmethod
    def lines(cls, fam: VectorFamily) -> "SubspaceFamily":
        """The lines span{φ_i} of a vector family."""
        return cls(fam.ambient_dim, tuple(Subspace(fam.ambient_dim, (v,), fam.exact) for v in fam.vectors), fam.exact)

    def __len__(self) -> int:
        return len(self.subspaces)

    @property
    def M(self) -> int:
        return len(self.subspaces)

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.subspaces]

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def to_float(self) -> "SubspaceFamily":
        if not self.exact:
            return self
        return SubspaceFamily(self.ambient_dim, tuple(s.to_float() for s in self.subspaces), False)

    @cached_property
    def projection_stack(self) -> np.ndarray:
        """Float projections as an (M, N, N) array."""
        return np.stack([s.projection_array for s in self.subspaces])

    def measure_sq(self, x) -> list:
        return [la.norm_sq(s.project(x)) for s in self.subspaces]

    def projected(self, x) -> list:
        return [s.project(x) for s in self.subspaces]


@dataclass
class FalsifierConfig:
    starts: int = 64
    max_iters: int = 500
    seed: int = 0
    fail_threshold: float = 1e-8
    unknown_floor: float = 1e-6
    fd_step: float = 1e-6
    lift_trials: int = 20
    stop_on_witness: bool = True

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if not self.fail_threshold < self.unknown_floor:
            raise ValueError("fail_threshold must be below unknown_floor")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _rational_sqrt(q: Fraction) -> Fraction:
    """Exact square root when q is a rational square, else a close rational."""
    if q < 0:
        raise ValueError("negative square")
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return Fraction(math.sqrt(q)).limit_denominator(10**6)


def _rational_candidates(x):
    """Nearby rational points, simplest first."""
    seen = set()
    for md in (10, 100, 10**4, 10**6):
        xr = la.rationalize(x, md)
        if xr not in seen and not la.is_zero(xr):
            seen.add(xr)
            yield xr


def _span_residual(fam: SubspaceFamily, x):
    """x minus its projection onto span{P_i x}; exact for exact inputs."""
    exact = fam.exact and la.is_exact_vector(x)
    images = [p for p in fam.projected(x) if not la.is_zero(p)]
    if not images:
        return x
    s = Subspace.span(images, fam.ambient_dim, exact)
    return la.sub(x, s.project(x))


def _pair_from_residual(fam: SubspaceFamily, x, r) -> WitnessPair:
    """Scale the residual to the size of x and build (x + y, x − y)."""
    if la.is_exact_vector(r) and la.is_exact_vector(x):
        t = _rational_sqrt(la.norm_sq(x) / la.norm_sq(r))
        y = la.scale(t, r)
    else:
        y = la.to_float(r) * (la.norm(x) / la.norm(r))
    return make_witness_pair(x, y, fam)


def nr_witness_by_probing(fam: SubspaceFamily, seed: int = 0, tries: int = 200):
    """Search for x outside span{P_i x}; returns a witness pair or None.

    Finds failures that occur at points where {P_i x} has its generic rank;
    those form an open set, so random probes hit them. Failures confined to
    the lower-dimensional set where the rank drops are usually missed. The
    all-ones vector is tried first, then the coordinate vectors, then seeded
    small-integer vectors.
    """
    n = fam.ambient_dim
    rng = random.Random(seed)
    candidates = [[1] * n] + [[int(i == j) for j in range(n)] for i in range(n)]
    candidates += [[rng.randint(-3, 3) for _ in range(n)] for _ in range(tries)]
    for c in candidates:
        if not any(c):
            continue
        x = la.vec(c, fam.exact)
        r = _span_residual(fam, x)
        if fam.exact:
            if la.is_zero(r):
                continue
        elif la.norm(r) <= 1e-6 * la.norm(x):
            continue
        pair = _pair_from_residual(fam, x, r)
        if pair.breaks_norm_retrieval():
            return pair
    return None


# ---------------------------------------------------------------------------
# sphere optimization
# ---------------------------------------------------------------------------


def _sigma_min_batch(stack: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Smallest singular value of [P_1x ... P_Mx] for each row x of xs."""
    m, n, _ = stack.shape
    if m < n:
        return np.zeros(xs.shape[0])
    a = np.einsum("mij,kj->kmi", stack, xs)
    return np.linalg.svd(a, compute_uv=False)[:, -1]


def _span_fit_batch(stack: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """||proj_{span{P_i x}} x|| / ||x|| for each row x of xs."""
    a = np.einsum("mij,kj->kmi", stack, xs)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    out = np.empty(xs.shape[0])
    for k in range(xs.shape[0]):
        r = int(np.sum(s[k] > la.TOL.rank))
        nx = np.linalg.norm(xs[k])
        out[k] = np.linalg.norm(vt[k, :r] @ xs[k]) / nx if nx > 0 else 1.0
    return out


@dataclass
class _SphereRun:
    x: np.ndarray
    value: float
    start: int
    starts_run: int
    values: list = field(default_factory=list)


def _sphere_descents(objective, n: int, cfg: FalsifierConfig):
    """Yield (start, x, value) for each start of a projected gradient descent.

    Each start takes normalized steps along the tangential central-difference
    gradient, doubling the step after a success and halving it until the
    objective decreases.
    """
    rng = np.random.default_rng(cfg.seed)
    h = cfg.fd_step
    eye = np.eye(n)
    for s in range(cfg.starts):
        x = rng.standard_normal(n)
        x /= np.linalg.norm(x)
        fx = float(objective(x[None])[0])
        step = 0.25
        for _ in range(cfg.max_iters):
            probes = np.vstack([x + h * eye, x - h * eye])
            vals = objective(probes)
            g = (vals[:n] - vals[n:]) / (2 * h)
            g -= (g @ x) * x
            gn = float(np.linalg.norm(g))
            if gn < 1e-15:
                break
            d = g / gn
            moved = False
            while step > 1e-15:
                xn = x - step * d
                xn /= np.linalg.norm(xn)
                fn = float(objective(xn[None])[0])
                if fn < fx:
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
            gain = fx - fn
            x, fx = xn, fn
            step = min(2 * step, 1.0)
            if gain <= 1e-14 * max(1.0, abs(fx)) and step < 1e-8:
                break
        yield s, x, fx


def _minimize_on_sphere(objective, n: int, cfg: FalsifierConfig, target: float | None = None) -> _SphereRun:
    """Best of the multi-start descents; ties go to the lower start index.

    Stops early once a start reaches ``target``.
    """
    best: _SphereRun | None = None
    values = []
    for s, x, fx in _sphere_descents(objective, n, cfg):
        values.append(fx)
        if best is None or fx < best.value:
            best = _SphereRun(x.copy(), fx, s, s + 1)
        if target is not None and fx <= target:
            break
    best.starts_run = len(values)
    best.values = values
    return best


def _soft_residual_batch(stack: np.ndarray, xs: np.ndarray, mu: float) -> np.ndarray:
    """Regularized squared residual of x against span{P_i x}, relative to ||x||^2.

    Equals mu x^T (sum_i P_i x x^T P_i + mu I)^{-1} x / ||x||^2. It tends to the
    squared span residual as mu -> 0 but stays continuous where the rank of
    {P_i x} drops, which is where failures of norm retrieval often hide.
    """
    n = xs.shape[1]
    a = np.einsum("mij,kj->kmi", stack, xs)
    b = np.einsum("kmi,kmj->kij", a, a) + mu * np.eye(n)
    z = np.linalg.solve(b, xs[..., None])[..., 0]
    return mu * np.einsum("ki,ki->k", xs, z) / np.einsum("ki,ki->k", xs, xs)


def _generic_rank(stack: np.ndarray, rng: np.random.Generator, trials: int = 4) -> int:
    """Rank of {P_i x} at random x (the maximal rank, almost surely)."""
    n = stack.shape[1]
    a = np.einsum("mij,kj->kmi", stack, rng.standard_normal((trials, n)))
    s = np.linalg.svd(a, compute_uv=False)
    return max(int(np.sum(row > la.TOL.rank * max(1.0, row[0]))) for row in s)


def _refine_to_rank_drop(stack: np.ndarray, x: np.ndarray, k: int, iters: int = 80):
    """Newton iteration on the sphere driving the k-th singular value of [P_i x] to zero.

    The gradient of sigma_k is sum_i c_i P_i w with (c, w) its singular pair.
    Returns the final point and sigma_k there.
    """
    def sigma(z):
        return float(np.linalg.svd(np.einsum("mij,j->mi", stack, z), compute_uv=False)[k])

    for _ in range(iters):
        u, s, vt = np.linalg.svd(np.einsum("mij,j->mi", stack, x))
        sig = float(s[k])
        if sig < 1e-15:
            break
        g = np.einsum("m,mij,j->i", u[:, k], stack, vt[k])
        g -= (g @ x) * x
        gn2 = float(g @ g)
        if gn2 < 1e-30:
            break
        t = 1.0
        while t > 1e-6:
            xn = x - t * sig * g / gn2
            xn /= np.linalg.norm(xn)
            if sigma(xn) < sig:
                break
            t *= 0.5
        else:
            break
        x = xn
    return x, sigma(x)


def _float_residual_pair(ff: SubspaceFamily, x: np.ndarray, keep: int):
    """Witness from the part of x outside the top ``keep`` right singular vectors of [P_i x]."""
    _, _, vt = np.linalg.svd(np.einsum("mij,j->mi", ff.projection_stack, x))
    top = vt[:keep]
    r = x - top.T @ (top @ x)
    nr = float(np.linalg.norm(r))
    if nr == 0.0:
        return None
    y = r * (np.linalg.norm(x) / nr)
    pair = measure_pair(ff, x + y, x - y)
    return pair if pair.breaks_norm_retrieval() else None


def falsify_nr_subspaces(fam: SubspaceFamily, cfg: FalsifierConfig | None = None, mu: float = 1e-3) -> Certificate:
    """Look for x outside span{P_i x}; such an x disproves norm retrieval.

    Each start descends 1 - r(x) on the unit sphere, r being the regularized
    span residual of :func:`_soft_residual_batch`. Every end point is then
    turned into a candidate witness: first from its exact (or float) span
    residual, then, if the residual vanishes there, after a Newton refinement
    onto the nearby set where the rank of {P_i x} drops. Only re-verified
    witness pairs yield fail; the method never returns pass.
    """
    cfg = cfg or FalsifierConfig()
    ff = fam.to_float()
    stack = ff.projection_stack
    n = fam.ambient_dim
    r0 = _generic_rank(stack, np.random.default_rng(cfg.seed))
    best = None
    starts_run = 0
    witness = None
    for s, x, fx in _sphere_descents(lambda xs: 1.0 - _soft_residual_batch(stack, xs, mu), n, cfg):
        starts_run += 1
        if best is None or fx < best[2]:
            best = (s, x.copy(), fx)
        pair = _witness_near(fam, ff, x, r0)
        if pair is not None and (witness is None or pair[0].norm_gap() > witness[0].norm_gap()):
            witness = (pair[0], pair[1], s)
            if cfg.stop_on_witness:
                break
    s, x, fx = best
    fit = float(_span_fit_batch(stack, x[None])[0])
    detail = {
        "objective": "soft-span-residual",
        "mu": mu,
        "min_objective": fit,
        "max_residual": float(np.linalg.norm(la.to_float(_span_residual(ff, x)))),
        "max_soft_residual": 1.0 - fx,
        "best_start": s,
        "starts_run": starts_run,
        "seed": cfg.seed,
    }
    if witness is not None:
        pair, wx, s = witness
        detail["witness_x"] = wx
        detail["witness_start"] = s
        detail["min_objective"] = float(_span_fit_batch(stack, la.to_float(wx)[None])[0])
        detail["max_residual"] = float(np.linalg.norm(la.to_float(_span_residual(ff, la.to_float(wx)))))
        return Certificate(Verdict.FAIL, "sphere:span-residual", pair, detail)
    return Certificate(Verdict.UNKNOWN, "sphere:span-residual", None, detail)


def _witness_near(fam: SubspaceFamily, ff: SubspaceFamily, x: np.ndarray, r0: int):
    """A re-verified witness pair built at or near x, with the point used, or None."""
    if fam.exact:
        for xr in _rational_candidates(x):
            r = _span_residual(fam, xr)
            if not la.is_zero(r):
                pair = _pair_from_residual(fam, xr, r)
                if pair.breaks_norm_retrieval():
                    return pair, xr
    if r0 < ff.ambient_dim:
        pair = _float_residual_pair(ff, x, r0)
        if pair is not None:
            return pair, x
    if r0 >= 1:
        z, sig = _refine_to_rank_drop(ff.projection_stack, x, r0 - 1)
        if sig < 1e-8:
            pair = _float_residual_pair(ff, z, r0 - 1)
            if pair is not None:
                return pair, z
    return None


def falsify_pr_subspaces(fam: SubspaceFamily, cfg: FalsifierConfig | None = None) -> Certificate:
    """Look for x with span{P_i x} != R^N by minimizing its smallest singular value.

    Squared singular values are descended (same minimizers, smooth at zero),
    and a small minimum is polished by Newton steps on the singular value
    itself. Never returns pass.
    """
    cfg = cfg or FalsifierConfig()
    stack = fam.projection_stack
    n = fam.ambient_dim
    target = cfg.fail_threshold**2 if cfg.stop_on_witness else None
    run = _minimize_on_sphere(lambda xs: _sigma_min_batch(stack, xs) ** 2, n, cfg, target)
    x = run.x
    sigma = float(_sigma_min_batch(stack, x[None])[0])
    if cfg.fail_threshold <= sigma < 1e-3 and fam.M >= n:
        z, sz = _refine_to_rank_drop(stack, x, n - 1)
        if sz < sigma:
            x, sigma = z, sz
    detail = {
        "objective": "sigma-min",
        "min_objective": sigma,
        "argmin": x,
        "best_start": run.start,
        "starts_run": run.starts_run,
        "seed": cfg.seed,
    }
    for xr in _rational_candidates(x) if fam.exact else ():
        images = [p for p in fam.projected(xr) if not la.is_zero(p)]
        if la.rank(images, True) < n:
            y = la.vec(la.nullspace(images, n, True)[0], True)
            pair = make_witness_pair(xr, y, fam)
            detail["min_objective"] = float(_sigma_min_batch(stack, la.to_float(xr)[None])[0])
            detail["witness_x"] = xr
            return Certificate(Verdict.FAIL, "sphere:sigma-min", pair, detail)
    if sigma < cfg.fail_threshold:
        a = np.einsum("mij,j->mi", stack, x)
        if a.shape[0] < n:
            y = la.nullspace(list(a), n, False)[0]
        else:
            y = np.linalg.svd(a.T)[0][:, -1]
        pair = measure_pair(fam.to_float(), x + y, x - y)
        detail["witness_x"] = x
        detail["measurement_gap"] = pair.measurement_gap()
        return Certificate(Verdict.FAIL, "sphere:sigma-min", pair, detail)
    return Certificate(Verdict.UNKNOWN, "sphere:sigma-min", None, detail)


# ---------------------------------------------------------------------------
# lifting to vectors
# ---------------------------------------------------------------------------


def _haar_rotation(k: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def _lift_basis(w: Subspace, rng, exact: bool) -> list:
    if exact:
        if rng is None:
            return list(w.orthogonal_basis)
        while True:
            g = [[rng.randint(-4, 4) for _ in range(w.dim)] for _ in range(w.dim)]
            if la.rank(g, True) == w.dim:
                break
        combos = [tuple(sum((Fraction(c) * b[t] for c, b in zip(row, w.basis)), Fraction(0)) for t in range(w.ambient_dim)) for row in g]
        return la.gram_schmidt(combos, True)
    onb = np.array(w.to_float().orthogonal_basis)
    if rng is None:
        return list(onb)
    return list(_haar_rotation(w.dim, rng) @ onb)


def lift_to_vectors(fam: SubspaceFamily, seed: int | None = 0, rotate: bool = True, exact: bool = False) -> VectorFamily:
    """Concatenate an orthonormal basis of every W_i, labelled (i, j).

    With ``rotate`` each basis is turned by a seeded Haar-random rotation inside
    its subspace. With ``exact`` (exact families only) the basis is instead the
    exact Gram-Schmidt orthogonalization of seeded random integer combinations;
    it is orthogonal but not normalized, which no retrieval property notices.
    """
    exact = exact and fam.exact
    if exact:
        rng = random.Random(seed) if rotate else None
    else:
        rng = np.random.default_rng(seed) if rotate else None
    vectors, labels = [], []
    for i, w in enumerate(fam.subspaces):
        for j, b in enumerate(_lift_basis(w, rng, exact)):
            vectors.append(b)
            labels.append((i, j))
    return VectorFamily.of(vectors, exact=exact, labels=labels, ambient_dim=fam.ambient_dim)


def falsify_by_lift(fam: SubspaceFamily, prop: str = "nr", trials: int = 20, seed: int = 0, exact: bool | None = None) -> Certificate:
    """Certify lifted vector families; any failing lift fails the subspaces.

    Trial 0 is the unrotated lift; later trials rotate every basis afresh.
    """
    if prop not in ("pr", "nr"):
        raise ValueError("prop must be 'pr' or 'nr'")
    exact = fam.exact if exact is None else exact and fam.exact
    certify = certify_nr_vectors if prop == "nr" else certify_pr_vectors
    for t in range(trials):
        lifted = lift_to_vectors(fam, seed=seed + t, rotate=t > 0, exact=exact)
        cert = certify(lifted)
        if cert.failed:
            pair = cert.detail.get("witness_pair")
            detail = {
                "trial": t,
                "lifted_vectors": list(lifted.vectors),
                "labels": list(lifted.labels),
                "lift_method": cert.method,
                "partition": cert.witness,
                "seed": seed,
            }
            if pair is not None:
                pair = pair.replay(fam)
            return Certificate(Verdict.FAIL, f"lift:{prop}", pair, detail)
    return Certificate(Verdict.UNKNOWN, f"lift:{prop}", None, {"trials": trials, "seed": seed})


# ---------------------------------------------------------------------------
# exact structural cases
# ---------------------------------------------------------------------------


def _pairwise_orthogonal(fam: SubspaceFamily) -> bool:
    return all(a.is_orthogonal_to(b) for a, b in combinations(fam.subspaces, 2))


def _is_scalar_matrix(mat, n: int, exact: bool):
    if exact:
        lam = mat[0][0]
        ok = all(mat[i][j] == (lam if i == j else 0) for i in range(n) for j in range(n))
        return lam if ok and lam > 0 else None
    lam = float(np.trace(mat)) / n
    if lam > 0 and np.max(np.abs(mat - lam * np.eye(n))) <= la.TOL.orth * max(1.0, lam):
        return lam
    return None


def find_tight_subfamily(fam: SubspaceFamily, max_members: int = 16):
    """Indices S and λ > 0 with Σ_{i in S} P_i = λ I, or None.

    Subfamilies are scanned by increasing size when M <= ``max_members``,
    otherwise only the whole family is tried. Candidates are screened in
    floating point and confirmed exactly for exact families.
    """
    n, m = fam.ambient_dim, fam.M
    stack = fam.projection_stack
    if m <= max_members:
        candidates = (s for k in range(1, m + 1) for s in combinations(range(m), k))
    else:
        candidates = iter([tuple(range(m))])
    for s in candidates:
        if sum(fam.subspaces[i].dim for i in s) < n:
            continue
        lam = _is_scalar_matrix(stack[list(s)].sum(axis=0), n, False)
        if lam is None:
            continue
        if fam.exact:
            mats = [fam.subspaces[i].projection_matrix() for i in s]
            exact_total = [[sum((mm[r][c] for mm in mats), Fraction(0)) for c in range(n)] for r in range(n)]
            lam = _is_scalar_matrix(exact_total, n, True)
            if lam is None:
                continue
        return list(s), lam
    return None


def _hyperplane_normals(fam: SubspaceFamily):
    n = fam.ambient_dim
    if n < 2 or any(d != n - 1 for d in fam.dims):
        return None
    return [s.complement().basis[0] for s in fam.subspaces]


def _canonical_triple(normals, exact: bool) -> bool:
    """Normals n1 ⊥ n2 with n3 ∥ n1 ± (|n1|/|n2|) n2, in some order."""
    if len(normals) != 3:
        return False
    for k in range(3):
        a, b = [normals[i] for i in range(3) if i != k]
        c = normals[k]
        if not la.is_zero_scalar(la.dot(a, b)):
            continue
        # c = alpha a + beta b ?
        if la.rank([a, b, c], exact) != 2:
            continue
        alpha = la.dot(c, a) / la.norm_sq(a)
        beta = la.dot(c, b) / la.norm_sq(b)
        if la.is_zero_scalar(alpha):
            continue
        lhs = beta * beta * la.norm_sq(b)
        rhs = alpha * alpha * la.norm_sq(a)
        if exact and lhs == rhs:
            return True
        if not exact and abs(float(lhs) - float(rhs)) <= la.TOL.orth * max(1.0, abs(float(rhs))):
            return True
    return False


def hyperplane_sign_witness(fam: SubspaceFamily):
    """Witness pair for N hyperplanes with independent, non-orthogonal normals.

    For a sign vector s, the point x(s) with <x, n_i>/|n_i| = s_i has
    ||P_i x||^2 = ||x||^2 - 1 for every i. Two sign vectors with
    ||x(s)|| != ||x(t)|| therefore give u = c_t x(s), v = c_s x(t) with
    c^2 = ||x||^2 - 1 whose measurements all agree while their norms differ.
    The pair is computed in floating point; returns None when every sign
    vector gives the same norm or the family is not of this shape.
    """
    normals = _hyperplane_normals(fam)
    n = fam.ambient_dim
    if normals is None or fam.M != n:
        return None
    phi = np.array([la.to_float(v) / la.norm(v) for v in normals])
    if np.linalg.matrix_rank(phi) < n:
        return None
    best = None
    for bits in range(2 ** (n - 1)):
        sign = np.array([1.0 if (bits >> i) & 1 == 0 else -1.0 for i in range(n)])
        x = np.linalg.solve(phi, sign)
        q = float(x @ x)
        if best is None:
            best = (x, q)
            continue
        if abs(q - best[1]) > 1e-6 * max(q, best[1]):
            (xs, qs), (xt, qt) = best, (x, q)
            u = xs * math.sqrt(qt - 1.0)
            v = xt * math.sqrt(qs - 1.0)
            scale = 1.0 / max(np.linalg.norm(u), np.linalg.norm(v))
            pair = measure_pair(fam.to_float(), u * scale, v * scale)
            return pair if pair.breaks_norm_retrieval() else None
    return None


def _nr_fail(fam: SubspaceFamily, method: str, detail: dict, seed: int) -> Certificate:
    """Fail certificate with the first witness found by increasingly costly searches."""
    pair, source = hyperplane_sign_witness(fam), "sign-pattern"
    if pair is None:
        pair, source = nr_witness_by_probing(fam, seed), "probe"
    if pair is None:
        lifted = falsify_by_lift(fam, "nr", 20, seed)
        pair, source = lifted.witness, "lift"
    if pair is None:
        sphere = falsify_nr_subspaces(fam, FalsifierConfig(seed=seed))
        pair, source = sphere.witness, "sphere"
    if pair is not None:
        detail = {**detail, "witness_source": source}
    return Certificate(Verdict.FAIL, method, pair, detail)


def certify_nr_exact_cases(fam: SubspaceFamily, seed: int = 0) -> Certificate:
    """Decide norm retrieval in the structurally decidable cases, else unknown.

    Cases, in order: too few dimensions, a member equal to R^N, total
    dimension exactly N (pass iff pairwise orthogonal), two proper subspaces
    (pass iff mutual orthogonal complements), a subfamily whose projections
    sum to a multiple of the identity, families of lines (decided through the
    partition criterion on the direction vectors) and families of hyperplanes.
    """
    n = fam.ambient_dim
    total = fam.total_dim
    detail = {"total_dim": total}
    if total < n:
        return _nr_fail(fam, "exact:dimension-count", detail, seed)
    if any(d == n for d in fam.dims):
        return Certificate(Verdict.PASS, "exact:full-space-member", None, detail)
    if total == n:
        if _pairwise_orthogonal(fam):
            return Certificate(Verdict.PASS, "exact:pairwise-orthogonal", None, detail)
        return _nr_fail(fam, "exact:pairwise-orthogonal", detail, seed)
    if fam.M == 2:
        w1, w2 = fam.subspaces
        if w2.same_span(w1.complement()):
            return Certificate(Verdict.PASS, "exact:two-subspace", None, detail)
        return _nr_fail(fam, "exact:two-subspace", detail, seed)
    tight = find_tight_subfamily(fam)
    if tight is not None:
        idx, lam = tight
        return Certificate(Verdict.PASS, "exact:tight-fusion", None, {**detail, "subfamily": idx, "lambda": lam})
    if all(d == 1 for d in fam.dims):
        vf = VectorFamily.of([s.basis[0] for s in fam.subspaces], exact=fam.exact)
        cert = certify_nr_vectors(vf)
        if cert.passed:
            return Certificate(Verdict.PASS, "exact:lines", None, detail)
        pair = cert.detail["witness_pair"].replay(fam)
        return Certificate(Verdict.FAIL, "exact:lines", pair, {**detail, "partition": cert.witness})
    normals = _hyperplane_normals(fam)
    if normals is not None:
        independent = la.rank(normals, fam.exact) == len(normals)
        if independent and fam.M == n - 1:
            return _nr_fail(fam, "exact:hyperplanes-deficient", detail, seed)
        if independent and fam.M == n:
            orth = all(la.is_zero_scalar(la.dot(a, b)) for a, b in combinations(normals, 2))
            if orth:
                return Certificate(Verdict.PASS, "exact:hyperplane-basis", None, detail)
            return _nr_fail(fam, "exact:hyperplane-basis", detail, seed)
        if _canonical_triple(normals, fam.exact):
            return Certificate(Verdict.PASS, "exact:canonical-triple", None, detail)
    return Certificate(Verdict.UNKNOWN, "exact:none", None, detail)


def certify_nr_subspaces(fam: SubspaceFamily, cfg: FalsifierConfig | None = None) -> Certificate:
    """Exact cases, then lift falsification, then the sphere falsifier."""
    cfg = cfg or FalsifierConfig()
    cert = certify_nr_exact_cases(fam, cfg.seed)
    if cert.verdict is not Verdict.UNKNOWN and (cert.passed or cert.witness is not None):
        cert.detail["stage"] = "exact"
        return cert
    lifted = falsify_by_lift(fam, "nr", cfg.lift_trials, cfg.seed)
    if lifted.failed:
        lifted.detail["stage"] = "lift"
        return lifted
    sphere = falsify_nr_subspaces(fam, cfg)
    sphere.detail["stage"] = "sphere" if sphere.failed else "none"
    return sphere


def _shared_vector_lift(fam: SubspaceFamily, i: int, j: int) -> VectorFamily:
    """Orthogonal lift in which W_i and W_j start with the same vector."""
    w1, w2 = fam.subspaces[i], fam.subspaces[j]
    inter = la.nullspace(list(w1.complement().basis) + list(w2.complement().basis), fam.ambient_dim, fam.exact)
    x = la.vec(inter[0], fam.exact)
    vectors = []
    for k, w in enumerate(fam.subspaces):
        if k in (i, j):
            vectors += la.gram_schmidt(Subspace.span([x] + list(w.basis), fam.ambient_dim, fam.exact).basis, fam.exact)
        else:
            vectors += list(w.orthogonal_basis if fam.exact else w.to_float().orthogonal_basis)
    return VectorFamily.of(vectors, exact=fam.exact)


def certify_pr_subspaces(fam: SubspaceFamily, cfg: FalsifierConfig | None = None) -> Certificate:
    """Phase retrieval for subspaces: exact where decidable, falsifiers otherwise.

    Passes only for families of lines, where phase retrieval is the complement
    property of the direction vectors.
    """
    cfg = cfg or FalsifierConfig()
    n = fam.ambient_dim
    total = fam.total_dim
    if all(d == 1 for d in fam.dims):
        vf = VectorFamily.of([s.basis[0] for s in fam.subspaces], exact=fam.exact)
        cert = certify_pr_vectors(vf)
        pair = cert.detail.get("witness_pair")
        return Certificate(cert.verdict, "exact:lines", pair.replay(fam) if pair else None, {"stage": "exact", "partition": cert.witness})
    if total < 2 * n - 1:
        lifted = falsify_by_lift(fam, "pr", 1, cfg.seed)
        return Certificate(Verdict.FAIL, "exact:dimension-count", lifted.witness, {"stage": "exact", "total_dim": total})
    if total == 2 * n - 1:
        inter = check_pairwise_trivial_intersection(fam)
        if inter.failed:
            i, j = inter.witness
            cert = certify_pr_vectors(_shared_vector_lift(fam, i, j))
            pair = cert.detail["witness_pair"].replay(fam) if cert.failed else None
            return Certificate(Verdict.FAIL, "exact:pairwise-intersection", pair, {"stage": "exact", "pair": (i, j)})
    nr = certify_nr_exact_cases(fam, cfg.seed)
    if nr.failed and nr.witness is not None:
        return Certificate(Verdict.FAIL, "exact:norm-retrieval-fails", nr.witness, {"stage": "exact", "nr_method": nr.method})
    lifted = falsify_by_lift(fam, "pr", cfg.lift_trials, cfg.seed)
    if lifted.failed:
        lifted.detail["stage"] = "lift"
        return lifted
    sphere = falsify_pr_subspaces(fam, cfg)
    sphere.detail["stage"] = "sphere" if sphere.failed else "none"
    return sphere


# ---------------------------------------------------------------------------
# structural operations
# ---------------------------------------------------------------------------


def check_pairwise_trivial_intersection(fam: SubspaceFamily) -> Certificate:
    for i, j in combinations(range(fam.M), 2):
        d = la.intersection_dim(fam.subspaces[i], fam.subspaces[j])
        if d:
            return Certificate(Verdict.FAIL, "pairwise-intersection", (i, j), {"intersection_dim": d})
    return Certificate(Verdict.PASS, "pairwise-intersection")


def split_direct_sum(fam: SubspaceFamily, splits) -> SubspaceFamily:
    """Replace each W_i = U_i ⊕ V_i (orthogonal) by the pair U_i, V_i.

    ``splits`` holds one (U_i, V_i) pair per member; the result lists every U_i
    first, then every V_i.
    """
    splits = list(splits)
    if len(splits) != fam.M:
        raise NotADirectSum("one split per subspace required")
    us, vs = [], []
    for i, (w, (u, v)) in enumerate(zip(fam.subspaces, splits)):
        u = u if isinstance(u, Subspace) else Subspace.span(u, fam.ambient_dim, fam.exact)
        v = v if isinstance(v, Subspace) else Subspace.span(v, fam.ambient_dim, fam.exact)
        if not u.is_orthogonal_to(v):
            raise NotADirectSum(f"U_{i} and V_{i} are not orthogonal")
        joined = Subspace.span(list(u.basis) + list(v.basis), fam.ambient_dim, fam.exact)
        if not joined.same_span(w):
            raise NotADirectSum(f"U_{i} + V_{i} does not reproduce W_{i}")
        us.append(u)
        vs.append(v)
    return SubspaceFamily.of(us + vs, exact=fam.exact)


def complements_family(fam: SubspaceFamily) -> SubspaceFamily:
    for i, w in enumerate(fam.subspaces):
        if w.dim == fam.ambient_dim:
            raise FullSpaceMember(f"W_{i} is the whole space")
    return SubspaceFamily.of([w.complement() for w in fam.subspaces], exact=fam.exact)
