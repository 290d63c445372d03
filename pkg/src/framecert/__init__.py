"""Certificates for phase and norm retrieval by vectors and subspaces of R^N."""

from .certificates import Certificate, Partition, Verdict, WitnessPair, make_witness_pair
from .errors import FrameCertError
from .frames import (
    VectorFamily,
    basis_nr_iff_orthogonal,
    certify_nr_vectors,
    certify_pr_vectors,
    has_complement_property,
    is_full_spark,
    is_tight,
    spark,
)
from .linalg import TOL, Subspace, tolerances
from .subspaces import (
    FalsifierConfig,
    SubspaceFamily,
    certify_nr_exact_cases,
    certify_nr_subspaces,
    certify_pr_subspaces,
    falsify_by_lift,
    falsify_nr_subspaces,
    falsify_pr_subspaces,
    lift_to_vectors,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "Partition",
    "Verdict",
    "WitnessPair",
    "make_witness_pair",
    "FrameCertError",
    "VectorFamily",
    "basis_nr_iff_orthogonal",
    "certify_nr_vectors",
    "certify_pr_vectors",
    "has_complement_property",
    "is_full_spark",
    "is_tight",
    "spark",
    "TOL",
    "Subspace",
    "tolerances",
    "FalsifierConfig",
    "SubspaceFamily",
    "certify_nr_exact_cases",
    "certify_nr_subspaces",
    "certify_pr_subspaces",
    "falsify_by_lift",
    "falsify_nr_subspaces",
    "falsify_pr_subspaces",
    "lift_to_vectors",
]
