"""Command-line interface.

Verbs: certify, falsify, reconstruct, spark, generate, scan, verify-witness.
Exit codes: 0 pass, 1 fail, 2 unknown, 64 usage error, 65 data error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import io
from . import linalg as la
from .certificates import Certificate, Verdict
from .errors import FrameCertError
from .frames import VectorFamily, certify_nr_vectors, certify_pr_vectors, is_full_spark, spark
from .gen import FixtureId, fixture, random_full_spark, two_basis_construction
from .perturb import neighborhood_scan
from .retrieve import (
    TripleMeasurement,
    reconstruct_norm_sq_three_hyperplanes,
    reconstruct_norm_sq_tight,
)
from .subspaces import (
    FalsifierConfig,
    SubspaceFamily,
    certify_nr_subspaces,
    certify_pr_subspaces,
    falsify_by_lift,
    falsify_nr_subspaces,
    falsify_pr_subspaces,
)

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65
VERDICT_EXIT = {Verdict.PASS: EXIT_PASS, Verdict.FAIL: EXIT_FAIL, Verdict.UNKNOWN: EXIT_UNKNOWN}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _default_seed() -> int:
    raw = os.environ.get("FRAMECERT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"FRAMECERT_SEED must be an integer, got {raw!r}") from None


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise io.DocumentError(f"cannot read {path}: {exc.strerror}") from None


def _emit(obj, out: str | None) -> None:
    if out:
        io.write_json(out, obj)
    else:
        sys.stdout.write(io.dump_json(obj))
        sys.stdout.flush()


def _load_family(args):
    if args.input and args.fixture:
        raise UsageError("give either --input or --fixture, not both")
    if args.input:
        return io.parse_family(io.load_json(_read_text(args.input)), args.mode)
    if args.fixture:
        try:
            fx = fixture(args.fixture, n=args.n, seed=args.seed)
        except KeyError:
            raise UsageError(f"unknown fixture {args.fixture!r}; choose from {[f.value for f in FixtureId]}") from None
        fam = fx.family
        if args.mode == "float":
            fam = fam.to_float()
        return fam
    raise UsageError("one of --input or --fixture is required")


def _config(args) -> FalsifierConfig:
    return FalsifierConfig(starts=args.starts, seed=args.seed, lift_trials=args.trials)


def _tolerances(cfg: FalsifierConfig | None = None) -> dict:
    out = {"rank": la.TOL.rank, "orth": la.TOL.orth}
    if cfg is not None:
        out.update(fail_threshold=cfg.fail_threshold, unknown_floor=cfg.unknown_floor)
    return out


def _replay(cert: Certificate, fam, prop: str) -> dict:
    """Re-measure the witness pair from scratch against the family."""
    pair = cert.witness if hasattr(cert.witness, "per_index_sq") else cert.detail.get("witness_pair")
    if pair is None:
        return {"verified": cert.verdict is not Verdict.FAIL, "reason": "no witness pair"}
    fresh = pair.replay(fam)
    ok = fresh.breaks_norm_retrieval() if prop == "nr" else fresh.breaks_phase_retrieval()
    return {"verified": bool(ok), "measurement_gap": fresh.measurement_gap(), "norm_gap": fresh.norm_gap()}


def _certificate_output(cert, fam, args, cfg, start, replay: bool) -> int:
    runtime = (time.perf_counter() - start) * 1000.0
    doc = io.certificate_document(cert, args.seed, _tolerances(cfg), runtime)
    code = VERDICT_EXIT[cert.verdict]
    if replay:
        rep = _replay(cert, fam, args.property)
        doc["replay"] = rep
        if not rep["verified"]:
            code = EXIT_DATA
    _emit(doc, args.out)
    return code


def cmd_certify(args) -> int:
    fam = _load_family(args)
    cfg = _config(args)
    start = time.perf_counter()
    if isinstance(fam, VectorFamily):
        cert = certify_pr_vectors(fam) if args.property == "pr" else certify_nr_vectors(fam)
    else:
        cert = certify_pr_subspaces(fam, cfg) if args.property == "pr" else certify_nr_subspaces(fam, cfg)
    return _certificate_output(cert, fam, args, cfg, start, args.verify_witness)


def cmd_falsify(args) -> int:
    fam = _load_family(args)
    if isinstance(fam, VectorFamily):
        fam = SubspaceFamily.lines(fam)
    cfg = _config(args)
    start = time.perf_counter()
    cert = falsify_by_lift(fam, args.property, cfg.lift_trials, cfg.seed)
    if not cert.failed:
        cert = falsify_nr_subspaces(fam, cfg) if args.property == "nr" else falsify_pr_subspaces(fam, cfg)
    return _certificate_output(cert, fam, args, cfg, start, args.verify_witness)


def _parse_triple(text: str, exact: bool) -> list:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 3:
        raise UsageError("expected three comma-separated values")
    return [io.parse_scalar(p, exact) for p in parts]


def _format_norm(value: float) -> str:
    return repr(round(value, 12))


def cmd_reconstruct(args) -> int:
    exact = args.mode != "float"
    if args.measurements or args.squared:
        if args.measurements and args.squared:
            raise UsageError("give --measurements or --squared, not both")
        if args.squared:
            t = TripleMeasurement.from_squared(*_parse_triple(args.squared, exact))
        else:
            t = TripleMeasurement.from_norms(*_parse_triple(args.measurements, exact))
        norm_sq = reconstruct_norm_sq_three_hyperplanes(t)
    elif args.frame and args.meas:
        fam = io.parse_family(io.load_json(_read_text(args.frame)), args.mode)
        if not isinstance(fam, VectorFamily):
            raise io.DocumentError("tight mode needs a vector family")
        raw = io.load_json(_read_text(args.meas))
        if not isinstance(raw, list):
            raise io.DocumentError("measurements file must hold a JSON array")
        norm_sq = reconstruct_norm_sq_tight(fam, [io.parse_scalar(m, fam.exact) for m in raw])
    else:
        raise UsageError("give --measurements/--squared, or --frame with --meas")
    lines = [_format_norm(float(norm_sq) ** 0.5)]
    if exact and not isinstance(norm_sq, float):
        lines.append(f"norm_sq {norm_sq}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_PASS


def cmd_spark(args) -> int:
    fam = _load_family(args)
    if not isinstance(fam, VectorFamily):
        raise io.DocumentError("spark is defined for vector families")
    sys.stdout.write(f"{spark(fam)}\n")
    return EXIT_PASS


def cmd_generate(args) -> int:
    if args.what == "two-basis":
        vecs, comps = two_basis_construction(args.n, args.seed)
        fam = comps if args.complements else vecs
    elif args.what == "full-spark":
        fam = random_full_spark(args.n, args.m if args.m is not None else 2 * args.n - 1, args.seed)
    else:
        if not args.name:
            raise UsageError("generate fixture needs --name")
        try:
            fam = fixture(args.name, n=args.n, seed=args.seed).family
        except KeyError:
            raise UsageError(f"unknown fixture {args.name!r}") from None
    doc = io.family_to_document(fam)
    doc["seed"] = args.seed
    _emit(doc, args.out)
    return EXIT_PASS


def cmd_scan(args) -> int:
    fam = _load_family(args)
    res = neighborhood_scan(
        fam, args.radius, args.samples, args.seed, args.property, guarded=not args.unguarded,
        cfg=FalsifierConfig(starts=8, lift_trials=4, seed=args.seed),
    )
    doc = {
        "center": io.family_to_document(fam),
        "radius": res.radius,
        "samples": res.samples,
        "property": res.prop,
        "seed": res.seed,
        "guarded": res.guarded,
        "verdicts": {k: v for k, v in res.verdicts.items() if v},
        "first_nonfail": res.first_nonfail,
    }
    _emit(doc, args.out)
    return EXIT_PASS


def cmd_verify_witness(args) -> int:
    fam = _load_family(args)
    cert_doc = io.load_json(_read_text(args.certificate))
    pair = io.witness_from_document(cert_doc, fam)
    ok = pair.breaks_norm_retrieval() if args.property == "nr" else pair.breaks_phase_retrieval()
    _emit({"verified": bool(ok), "property": args.property, "measurement_gap": pair.measurement_gap(),
           "norm_gap": pair.norm_gap(), "pair": pair}, args.out)
    return EXIT_PASS if ok else EXIT_DATA


def _add_family_args(p, seed: int) -> None:
    p.add_argument("--input", help="family document (JSON)")
    p.add_argument("--fixture", help="named fixture instead of --input")
    p.add_argument("--n", type=int, default=3, help="ambient dimension for parametrized fixtures")
    p.add_argument("--mode", choices=["exact", "float"], help="override the document backend")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out", help="write the JSON result here instead of standard output")


def build_parser(seed: int = 0) -> argparse.ArgumentParser:
    parser = _Parser(prog="framecert", description="Certify phase and norm retrieval for frames and subspaces.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)
    sub.required = True

    for verb, fn in (("certify", cmd_certify), ("falsify", cmd_falsify)):
        p = sub.add_parser(verb)
        _add_family_args(p, seed)
        p.add_argument("--property", choices=["pr", "nr"], required=True)
        p.add_argument("--tol", type=float, help="override both rank and orthogonality tolerances")
        p.add_argument("--trials", type=int, default=20, help="lift trials")
        p.add_argument("--starts", type=int, default=64, help="sphere falsifier starts")
        p.add_argument("--verify-witness", action="store_true", help="replay the witness before reporting")
        p.set_defaults(func=fn)

    p = sub.add_parser("reconstruct")
    p.add_argument("--measurements", help="m1,m2,m3 for the canonical hyperplane triple")
    p.add_argument("--squared", help="squared measurements s1,s2,s3")
    p.add_argument("--frame", help="tight vector family document")
    p.add_argument("--meas", help="JSON array of moduli |<x, phi_i>|")
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("spark")
    _add_family_args(p, seed)
    p.set_defaults(func=cmd_spark)

    p = sub.add_parser("generate")
    p.add_argument("what", choices=["two-basis", "full-spark", "fixture"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int)
    p.add_argument("--name", help="fixture name")
    p.add_argument("--complements", action="store_true", help="two-basis: emit the hyperplane complements")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("scan")
    _add_family_args(p, seed)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--property", choices=["nr", "pr"], default="nr")
    p.add_argument("--unguarded", action="store_true", help="skip the failing-center preconditions")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify-witness")
    _add_family_args(p, seed)
    p.add_argument("--certificate", required=True, help="certificate document holding the witness")
    p.add_argument("--property", choices=["pr", "nr"], default="nr")
    p.set_defaults(func=cmd_verify_witness)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser(_default_seed())
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "tol", None) is not None:
            with la.tolerances(rank=args.tol, orth=args.tol):
                return args.func(args)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"framecert: {exc}\n")
        return EXIT_USAGE
    except (FrameCertError, ValueError, KeyError) as exc:
        sys.stderr.write(f"framecert: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
