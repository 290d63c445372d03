"""JSON documents for families and certificates.

Rationals travel as strings ("p/q" or "p") so exact families survive a round
trip unchanged. Plain JSON numbers are read as exact decimals in the exact
backend.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, is_dataclass
from decimal import Decimal, InvalidOperation
from enum import Enum
from fractions import Fraction

import numpy as np

from . import linalg as la
from .certificates import Certificate, Partition, WitnessPair, measure_pair
from .errors import DimensionMismatch, FrameCertError
from .frames import VectorFamily
from .linalg import Subspace
from .subspaces import SubspaceFamily

__all__ = [
    "DocumentError",
    "parse_scalar",
    "load_json",
    "parse_family",
    "family_to_document",
    "to_jsonable",
    "certificate_document",
    "witness_from_document",
    "dump_json",
    "write_json",
]


class DocumentError(FrameCertError, ValueError):
    """A JSON document is malformed or inconsistent."""


def parse_scalar(value, exact: bool):
    """A number or rational string as a Fraction (exact) or float."""
    if isinstance(value, bool):
        raise DocumentError(f"boolean is not a number: {value!r}")
    try:
        if isinstance(value, str):
            text = value.strip()
            if "/" in text:
                p, q = text.split("/", 1)
                num, den = int(p), int(q)
                if den <= 0:
                    raise DocumentError(f"denominator must be positive in {value!r}")
                f = Fraction(num, den)
            else:
                f = Fraction(Decimal(text))
        elif isinstance(value, (int, Decimal)):
            f = Fraction(value)
        elif isinstance(value, float):
            f = Fraction(Decimal(repr(value)))
        else:
            raise DocumentError(f"not a number: {value!r}")
    except (ValueError, InvalidOperation, ZeroDivisionError) as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(f"not a number: {value!r}") from None
    return f if exact else float(f)


def load_json(text: str):
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from None


def _parse_vector(raw, n: int, exact: bool):
    if not isinstance(raw, list):
        raise DocumentError("vectors must be JSON arrays")
    if len(raw) != n:
        raise DimensionMismatch(f"vector of length {len(raw)} in R^{n}")
    return la.vec([parse_scalar(c, exact) for c in raw], exact)


def parse_family(doc, mode: str | None = None):
    """Build a VectorFamily or SubspaceFamily from a parsed FamilyDocument.

    ``mode`` ("exact" or "float") overrides the document's backend.
    """
    if not isinstance(doc, dict):
        raise DocumentError("family document must be a JSON object")
    n = doc.get("ambient_dim")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DocumentError("ambient_dim must be a positive integer")
    kind = doc.get("kind")
    backend = mode or doc.get("backend", "exact")
    if backend not in ("exact", "float"):
        raise DocumentError(f"unknown backend {backend!r}")
    exact = backend == "exact"
    entries = doc.get("entries")
    if not isinstance(entries, list) or not entries:
        raise DocumentError("entries must be a nonempty array")
    if kind == "vectors":
        vectors = [_parse_vector(e, n, exact) for e in entries]
        return VectorFamily.of(vectors, exact=exact, ambient_dim=n)
    if kind == "subspaces":
        subs = []
        for e in entries:
            if not isinstance(e, dict) or "basis" not in e:
                raise DocumentError('subspace entries must be objects with a "basis"')
            basis = [_parse_vector(b, n, exact) for b in e["basis"]]
            if not basis:
                raise DocumentError("subspace basis must be nonempty")
            s = Subspace.span(basis, n, exact)
            if s.dim < 1:
                raise DocumentError("subspace basis spans the zero space")
            subs.append(s)
        return SubspaceFamily.of(subs, exact=exact, ambient_dim=n)
    raise DocumentError(f"kind must be 'vectors' or 'subspaces', got {kind!r}")


def _scalar_out(c):
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, (int, np.integer)):
        return int(c)
    return float(c)


def _vector_out(v) -> list:
    return [_scalar_out(c) for c in (v if la.is_exact_vector(v) else la.to_float(v))]


def family_to_document(fam) -> dict:
    backend = "exact" if fam.exact else "float"
    if isinstance(fam, VectorFamily):
        entries = [_vector_out(v) for v in fam.vectors]
        kind = "vectors"
    elif isinstance(fam, SubspaceFamily):
        entries = [{"basis": [_vector_out(b) for b in s.basis]} for s in fam.subspaces]
        kind = "subspaces"
    else:
        raise TypeError(f"not a family: {type(fam).__name__}")
    return {"ambient_dim": fam.ambient_dim, "kind": kind, "entries": entries, "backend": backend}


def _pair_out(pair: WitnessPair) -> dict:
    return {
        "u": _vector_out(pair.u),
        "v": _vector_out(pair.v),
        "exact": pair.exact,
        "per_index_sq": [[_scalar_out(a), _scalar_out(b)] for a, b in pair.per_index_sq],
        "per_index_norms": [[a, b] for a, b in pair.per_index_norms],
        "norm_u_sq": _scalar_out(pair.norm_u_sq),
        "norm_v_sq": _scalar_out(pair.norm_v_sq),
        "norm_u": pair.norm_u,
        "norm_v": pair.norm_v,
        "measurement_gap": pair.measurement_gap(),
        "norm_gap": pair.norm_gap(),
    }


def to_jsonable(obj):
    """Recursively convert certificate payloads into JSON-compatible values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, WitnessPair):
        return _pair_out(obj)
    if isinstance(obj, Partition):
        return {"side1": list(obj.side1), "side2": list(obj.side2)}
    if isinstance(obj, (VectorFamily, SubspaceFamily)):
        return family_to_document(obj)
    if isinstance(obj, Subspace):
        return {"basis": [_vector_out(b) for b in obj.basis]}
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if is_dataclass(obj):
        return to_jsonable(asdict(obj))
    return str(obj)


def _witness_out(cert: Certificate):
    w = cert.witness
    pair = w if isinstance(w, WitnessPair) else cert.detail.get("witness_pair")
    if w is None and pair is None:
        return None
    out: dict = {}
    if isinstance(w, Partition):
        out["partition"] = to_jsonable(w)
    elif w is not None and not isinstance(w, WitnessPair):
        out["object"] = to_jsonable(w)
    if pair is not None:
        out["pair"] = _pair_out(pair)
    return out


def certificate_document(cert: Certificate, seed: int, tolerances: dict, runtime_ms: float) -> dict:
    detail = {k: v for k, v in cert.detail.items() if k != "witness_pair"}
    return {
        "verdict": cert.verdict.value,
        "method": cert.method,
        "witness": _witness_out(cert),
        "detail": to_jsonable(detail),
        "seed": seed,
        "tolerances": tolerances,
        "runtime_ms": runtime_ms,
    }


def witness_from_document(cert_doc: dict, fam) -> WitnessPair:
    """Re-measure the (u, v) pair stored in a CertificateDocument against ``fam``."""
    w = cert_doc.get("witness") if isinstance(cert_doc, dict) else None
    if not isinstance(w, dict) or "pair" not in w:
        raise DocumentError("certificate carries no witness pair")
    raw = w["pair"]
    exact = bool(raw.get("exact")) and fam.exact
    n = fam.ambient_dim
    u = _parse_vector(raw["u"], n, exact)
    v = _parse_vector(raw["v"], n, exact)
    return measure_pair(fam, u, v)


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), ensure_ascii=False) + "\n"


def write_json(path: str, obj) -> None:
    """Write a newline-terminated UTF-8 JSON document atomically."""
    text = dump_json(obj)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".framecert-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
