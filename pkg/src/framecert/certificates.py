"""Verdicts, certificates and the witnesses they carry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from . import linalg as la
from .errors import PreconditionViolated, ZeroVector


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Partition:
    """A bipartition of the index set; indices are 0-based."""

    side1: tuple[int, ...]
    side2: tuple[int, ...]

    @classmethod
    def of(cls, side1, m: int) -> "Partition":
        s1 = tuple(sorted(side1))
        return cls(s1, tuple(i for i in range(m) if i not in set(s1)))

    def __post_init__(self):
        if set(self.side1) & set(self.side2):
            raise ValueError("partition sides overlap")

    def __str__(self) -> str:
        return "{%s}|{%s}" % (",".join(map(str, self.side1)), ",".join(map(str, self.side2)))


@dataclass(frozen=True)
class WitnessPair:
    """Two signals with identical measurements.

    ``per_index_sq`` holds the squared measurements (||P_i u||^2, ||P_i v||^2).
    In the exact backend all squared quantities are Fractions and the pair
    re-verifies with zero tolerance.
    """

    u: Any
    v: Any
    per_index_sq: tuple[tuple[Any, Any], ...]
    norm_u_sq: Any
    norm_v_sq: Any
    exact: bool

    @property
    def norm_u(self) -> float:
        return math.sqrt(float(self.norm_u_sq))

    @property
    def norm_v(self) -> float:
        return math.sqrt(float(self.norm_v_sq))

    @property
    def per_index_norms(self) -> list[tuple[float, float]]:
        return [(math.sqrt(float(a)), math.sqrt(float(b))) for a, b in self.per_index_sq]

    def measurement_gap(self) -> float:
        """Largest |‖P_i u‖ − ‖P_i v‖| over the family."""
        if not self.per_index_sq:
            return 0.0
        if self.exact and all(a == b for a, b in self.per_index_sq):
            return 0.0
        return max(abs(a - b) for a, b in self.per_index_norms)

    def norm_gap(self) -> float:
        if self.exact and self.norm_u_sq == self.norm_v_sq:
            return 0.0
        return abs(self.norm_u - self.norm_v)

    def breaks_norm_retrieval(self, gap_tol: float = 1e-9, norm_tol: float = 1e-4) -> bool:
        if self.exact:
            return all(a == b for a, b in self.per_index_sq) and self.norm_u_sq != self.norm_v_sq
        return self.measurement_gap() <= gap_tol and self.norm_gap() >= norm_tol

    def breaks_phase_retrieval(self, gap_tol: float = 1e-9) -> bool:
        """Equal measurements while u is neither v nor -v."""
        same = la.is_zero(la.sub(self.u, self.v))
        flipped = la.is_zero(la.add(self.u, self.v))
        if self.exact:
            equal = all(a == b for a, b in self.per_index_sq)
        else:
            equal = self.measurement_gap() <= gap_tol
        return equal and not same and not flipped

    def replay(self, family) -> "WitnessPair":
        """Recompute every measured value from scratch against ``family``."""
        return measure_pair(family, self.u, self.v)


def measure_pair(family, u, v) -> WitnessPair:
    mu = family.measure_sq(u)
    mv = family.measure_sq(v)
    exact = la.is_exact_vector(u) and la.is_exact_vector(v) and family.exact
    return WitnessPair(u, v, tuple(zip(mu, mv)), la.norm_sq(u), la.norm_sq(v), exact)


def make_witness_pair(x, y, family, tol: float | None = None) -> WitnessPair:
    """The pair (x + y, x − y) for y orthogonal to every P_i x.

    Then ‖P_i(x+y)‖² = ‖P_i x‖² + ‖P_i y‖² = ‖P_i(x−y)‖² for all i, while
    ‖x+y‖² − ‖x−y‖² = 4<x, y>.
    """
    if la.is_zero(x) or la.is_zero(y):
        raise ZeroVector("witness construction needs nonzero x and y")
    tol = la.TOL.orth if tol is None else tol
    scale = la.norm(x) * la.norm(y)
    for i, px in enumerate(family.projected(x)):
        ip = la.dot(y, px)
        if not la.is_zero_scalar(ip, tol * max(1.0, scale)):
            raise PreconditionViolated(f"y is not orthogonal to P_{i} x (inner product {float(ip):.3e})")
    return measure_pair(family, la.add(x, y), la.sub(x, y))


@dataclass
class Certificate:
    verdict: Verdict
    method: str
    witness: Any = None
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    @property
    def failed(self) -> bool:
        return self.verdict is Verdict.FAIL

    def __str__(self) -> str:
        return f"{self.verdict.value} [{self.method}]"
