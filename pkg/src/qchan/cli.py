"""File-driven command line front end.

Subcommands: convert, analyze, complement, verify, zoo. Exit codes are a
stable public contract:

    0  success
    1  verification suite reported failures
    2  parse error
    3  dimension error
    4  non-CP input
    5  parameter out of range / unmet precondition
    6  internal invariant violation

Reports are human-readable by default; ``--machine`` emits the structured
JSON form with the same certificate payloads. Report floats are quantised
to 12 significant digits (values below 1e-12 collapse to 0) so that a
fixed seed and fixed tolerances reproduce reports byte for byte; full
precision stays available through the Python API. ``--report DIR``
additionally renders figures and a delimited certificate summary per
input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import is_dataclass

import numpy as np

from . import __version__, complement, figures, matcore, structure, suites, zoo
from .certificates import Certificate, Verdict
from .docio import (
    ChannelDocument,
    ZOO_FAMILIES,
    zoo_channel_from_payload,
    channel_from_document,
    document_digest,
    document_from_choi,
    document_from_holevo,
    document_from_json,
    document_from_kraus,
    document_from_stinespring,
    document_to_json,
    matrix_to_json,
)
from .errors import (
    DimensionMismatchError,
    DocumentError,
    InvariantViolationError,
    NotHermitianError,
    NotPsdError,
    ParameterError,
    PreconditionError,
)
from .matcore import Tolerance
from .reprs import (
    HolevoForm,
    KrausRep,
    apply,
    choi_from_kraus,
    dual,
    holevo_to_kraus,
    is_trace_preserving,
    rank_one_holevo,
    stinespring_from_kraus,
)
from .structure import GroupedClass, GroupedHolevoForm

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_PARSE = 2
EXIT_DIMS = 3
EXIT_NON_CP = 4
EXIT_PARAMS = 5
EXIT_INVARIANT = 6

DEFAULT_SEED = 20260
ALL_PROPERTIES = (
    "ppt",
    "eb",
    "degradable",
    "antidegradable",
    "self-complementary",
    "cstar-extreme",
    "choi-projection",
)


def _qfloat(x: float) -> float:
    """Quantise a float for report output; see the module docstring."""
    if x is None:
        return None
    if not np.isfinite(x):
        return float(x)
    if abs(x) < 1e-12:
        return 0.0
    return float(f"{float(x):.12g}")


def _witness_value(v):
    """Certificate witness values in JSON-shaped form."""
    if v is None or isinstance(v, (bool, str, int)):
        return v
    if isinstance(v, float):
        return _qfloat(v)
    if isinstance(v, complex):
        return [_qfloat(v.real), _qfloat(v.imag)]
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return _qfloat(float(v))
    if isinstance(v, np.ndarray):
        if v.ndim == 1:
            return {"vector": matrix_to_json(v.reshape(1, -1))[0]}
        return {"matrix": matrix_to_json(v)}
    if isinstance(v, Verdict):
        return v.value
    if isinstance(v, KrausRep):
        return {
            "kraus": {
                "d_in": v.d_in,
                "d_out": v.d_out,
                "ops": [matrix_to_json(op) for op in v.ops],
            }
        }
    if isinstance(v, GroupedHolevoForm):
        return {
            "classes": [
                {
                    "members": list(c.members),
                    "weight": _qfloat(c.weight),
                    "direction": _witness_value(c.u),
                }
                for c in v.classes
            ]
        }
    if isinstance(v, GroupedClass):
        return _witness_value(GroupedHolevoForm(0, 0, (v,)))
    if isinstance(v, dict):
        return {str(k): _witness_value(val) for k, val in sorted(v.items())}
    if isinstance(v, (list, tuple)):
        return [_witness_value(x) for x in v]
    if is_dataclass(v):
        return {"type": type(v).__name__}
    return str(v)


def _certificate_json(cert: Certificate) -> dict:
    return {
        "property": cert.property,
        "verdict": cert.verdict.value,
        "witness": _witness_value(cert.witness),
        "provenance": list(cert.provenance),
    }


def _tol_json(tol: Tolerance) -> dict:
    return {"eps_rank": tol.eps_rank, "eps_psd": tol.eps_psd, "eps_eq": tol.eps_eq}


def _short_detail(cert: Certificate) -> str:
    for key in ("obstruction", "reason", "criterion", "residual", "violating_pair"):
        if key in cert.witness:
            val = cert.witness[key]
            if isinstance(val, float):
                val = _qfloat(val)
            return f"{key}={val}"
    return ""


def _resolve_tol(args) -> Tolerance:
    base = Tolerance()
    eps_eq = float(os.environ.get("QCHAN_TOL_EQ", base.eps_eq))
    return Tolerance(
        eps_rank=args.tol_rank if args.tol_rank is not None else base.eps_rank,
        eps_psd=args.tol_psd if args.tol_psd is not None else base.eps_psd,
        eps_eq=args.tol_eq if args.tol_eq is not None else eps_eq,
    )


def _load_document(path: str) -> ChannelDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(str(exc), path) from exc
    return document_from_json(text, source=os.path.basename(path))


class _ExitWith(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def _translate_errors(fn):
    def wrapper(args):
        try:
            return fn(args)
        except _ExitWith as exc:
            print(f"error: {exc.message}", file=sys.stderr)
            return exc.code
        except DocumentError as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        except (DimensionMismatchError,) as exc:
            print(f"dimension error: {exc}", file=sys.stderr)
            return EXIT_DIMS
        except (NotPsdError, NotHermitianError) as exc:
            print(f"non-CP input: {exc}", file=sys.stderr)
            return EXIT_NON_CP
        except (ParameterError, PreconditionError) as exc:
            print(f"parameter error: {exc}", file=sys.stderr)
            return EXIT_PARAMS
        except InvariantViolationError as exc:
            print(f"internal invariant violation: {exc}", file=sys.stderr)
            return EXIT_INVARIANT

    return wrapper


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _analyze_one(
    doc: ChannelDocument, properties: list[str], tol: Tolerance, use_dual: bool
) -> tuple[list[Certificate], KrausRep]:
    k, holevo = channel_from_document(doc, tol)
    target = dual(k) if use_dual else k
    if use_dual:
        holevo = None

    certs: list[Certificate] = []
    for prop in properties:
        if prop == "ppt":
            certs.append(structure.is_ppt(target, tol))
        elif prop == "eb":
            certs.append(structure.eb_certificate(holevo if holevo is not None else target, tol))
        elif prop == "degradable":
            if holevo is not None and _all_rank_one(holevo, tol):
                certs.append(structure.degradable_seb_test(holevo, tol))
            else:
                certs.append(structure.degradability_via_inverse(target, tol))
        elif prop == "antidegradable":
            certs.append(structure.antidegradable_test(target, tol))
        elif prop == "self-complementary":
            certs.append(complement.is_self_complementary(target, tol))
        elif prop == "cstar-extreme":
            certs.append(structure.cstar_extreme_test(target, tol))
        elif prop == "choi-projection":
            certs.append(_choi_projection_certificate(target, tol))
        else:
            raise _ExitWith(EXIT_PARAMS, f"unknown property {prop!r}")
    return certs, target


def _all_rank_one(h: HolevoForm, tol: Tolerance) -> bool:
    return all(matcore.rank_tol(f, tol) == 1 for f, _ in h.pairs)


def _choi_projection_certificate(k: KrausRep, tol: Tolerance) -> Certificate:
    unmet = []
    if not is_trace_preserving(k, tol):
        unmet.append("not trace preserving")
    if not structure.is_ppt(k, tol).verdict.is_true:
        unmet.append("not PPT")
    if matcore.rank_tol(apply(k, np.eye(k.d_in)), tol) > k.d_in:
        unmet.append("image rank exceeds d_in")
    if unmet:
        return Certificate(
            "ChoiProjection",
            Verdict.INDETERMINATE,
            witness={"reason": "preconditions unmet: " + ", ".join(unmet)},
            tolerances=tol,
            provenance=(),
        )
    bundle = structure.choi_projection_equivalences(k, tol)
    summary = {
        "conditions": [c.verdict.value for c in bundle.conditions],
        "projection_residual": bundle.conditions[0].witness["projection_residual"],
        "factorisation_residual": bundle.conditions[4].witness["factorisation_residual"],
    }
    return Certificate(
        "ChoiProjection",
        bundle.verdict,
        witness=summary,
        tolerances=tol,
        provenance=tuple(c.provenance[0] for c in bundle.conditions),
    )


@_translate_errors
def cmd_analyze(args) -> int:
    tol = _resolve_tol(args)
    properties = [p.strip() for p in args.properties.split(",") if p.strip()]
    entries = []
    for path in args.inputs:
        doc = _load_document(path)
        start = time.perf_counter()
        certs, target = _analyze_one(doc, properties, tol, args.dual)
        elapsed_ms = 0.0 if args.no_timing else (time.perf_counter() - start) * 1e3
        entries.append(
            {
                "input": os.path.basename(path),
                "digest": document_digest(doc),
                "picture": "heisenberg-dual" if args.dual else "schrodinger",
                "certificates": certs,
                "target": target,
                "wall_time_ms": _qfloat(elapsed_ms) if args.no_timing else elapsed_ms,
            }
        )
    entries.sort(key=lambda e: e["digest"])

    if args.report:
        for entry in entries:
            stem = os.path.splitext(entry["input"])[0]
            rows = [
                {
                    "input": entry["input"],
                    "digest": entry["digest"],
                    "property": c.property,
                    "verdict": c.verdict.value,
                    "detail": _short_detail(c),
                }
                for c in entry["certificates"]
            ]
            figures.render_analysis(args.report, stem, entry["target"], rows)

    if args.machine:
        payload = {
            "library_version": __version__,
            "tolerances": _tol_json(tol),
            "reports": [
                {
                    "input": e["input"],
                    "digest": e["digest"],
                    "picture": e["picture"],
                    "certificates": [_certificate_json(c) for c in e["certificates"]],
                    "wall_time_ms": e["wall_time_ms"],
                }
                for e in entries
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"qchan {__version__} analysis")
        print(
            "tolerances: "
            + " ".join(f"{k}={v:g}" for k, v in _tol_json(tol).items())
        )
        for e in entries:
            print(f"\ninput: {e['input']}")
            print(f"digest: sha256:{e['digest']}")
            print(f"picture: {e['picture']}")
            for c in e["certificates"]:
                print(f"  [{c.property}] {c.verdict.value}")
                detail = _short_detail(c)
                if detail:
                    print(f"      {detail}")
                for tag in c.provenance:
                    print(f"      via: {tag}")
            if not args.no_timing:
                print(f"  wall_time_ms: {e['wall_time_ms']:.3f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# convert / complement / zoo
# ---------------------------------------------------------------------------


def _write_document(doc: ChannelDocument, out_path: str) -> None:
    text = document_to_json(doc)
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


@_translate_errors
def cmd_convert(args) -> int:
    tol = _resolve_tol(args)
    doc = _load_document(args.input)
    k, holevo = channel_from_document(doc, tol)
    meta = dict(doc.metadata)
    meta["converted_from"] = doc.kind
    if args.to == "kraus":
        if doc.kind == "holevo" and holevo is not None:
            out = document_from_kraus(holevo_to_kraus(holevo, tol), meta)
        else:
            out = document_from_kraus(k, meta)
    elif args.to == "choi":
        out = document_from_choi(choi_from_kraus(k), meta)
    elif args.to == "holevo":
        form = holevo if holevo is not None else rank_one_holevo(k, tol)
        if form is None:
            raise ParameterError(
                "channel admits no rank-one family by the implemented extraction"
            )
        out = document_from_holevo(form, meta)
    elif args.to == "stinespring":
        out = document_from_stinespring(stinespring_from_kraus(k), meta)
    else:
        raise ParameterError(f"cannot convert to kind {args.to!r}")
    _write_document(out, args.out)
    return EXIT_OK


@_translate_errors
def cmd_complement(args) -> int:
    tol = _resolve_tol(args)
    doc = _load_document(args.input)
    k, _ = channel_from_document(doc, tol)
    if args.minimal:
        comp = complement.minimal_complement(k, tol)
        note = "minimal-complement"
    else:
        comp = complement.complement_from_kraus(k)
        note = "complement"
    meta = dict(doc.metadata)
    meta["provenance"] = note
    meta["source_digest"] = document_digest(doc)
    _write_document(document_from_kraus(comp, meta), args.out)
    return EXIT_OK


def _parse_zoo_params(pairs: list[str]) -> dict:
    params = {}
    for item in pairs:
        if "=" not in item:
            raise ParameterError(f"parameter {item!r} is not of the form key=value")
        key, _, raw = item.partition("=")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


@_translate_errors
def cmd_zoo(args) -> int:
    tol = _resolve_tol(args)
    if args.family not in ZOO_FAMILIES:
        raise ParameterError(f"unknown family {args.family!r}; choose from {ZOO_FAMILIES}")
    params = _parse_zoo_params(args.params)
    if "seed" not in params and args.family in ("holevo-gen", "holevo-violator", "random"):
        params["seed"] = args.seed
    probe = ChannelDocument(
        "zoo", 1, 1, {"family": args.family, "params": params}, {}
    )
    made = zoo_channel_from_payload(probe, tol)
    d_in, d_out = made.d_in, made.d_out
    meta = {"family": args.family, "prng": zoo.PRNG_NAME}
    if "seed" in params:
        meta["seed"] = str(params["seed"])
    doc = ChannelDocument(
        "zoo", d_in, d_out, {"family": args.family, "params": params}, meta
    )
    _write_document(doc, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@_translate_errors
def cmd_verify(args) -> int:
    tol = _resolve_tol(args)
    if args.suite not in suites.SUITES:
        raise ParameterError(
            f"unknown suite {args.suite!r}; choose from {sorted(suites.SUITES)}"
        )
    start = time.perf_counter()
    rows, ok = suites.run_suite(args.suite, args.n, args.seed, tol)
    elapsed_ms = 0.0 if args.no_timing else (time.perf_counter() - start) * 1e3

    if args.report:
        figures.render_verify(args.report, args.suite, rows)

    passed = sum(1 for r in rows if r["ok"])
    if args.machine:
        payload = {
            "library_version": __version__,
            "suite": args.suite,
            "seed": args.seed,
            "instances": args.n,
            "tolerances": _tol_json(tol),
            "checks": [
                {
                    "instance": r["instance"],
                    "case": r["case"],
                    "ok": r["ok"],
                    "detail": r.get("detail", ""),
                    "residual": _qfloat(r["residual"]) if "residual" in r else None,
                }
                for r in rows
            ],
            "passed": passed,
            "total": len(rows),
            "wall_time_ms": elapsed_ms,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"qchan {__version__} verify suite={args.suite} seed={args.seed} n={args.n}")
        for r in rows:
            mark = "PASS" if r["ok"] else "FAIL"
            extra = f" residual={_qfloat(r['residual'])}" if "residual" in r else ""
            print(f"  [{mark}] #{r['instance']:03d} {r['case']}{extra}")
            if not r["ok"] and r.get("detail"):
                print(f"         {r['detail']}")
        print(f"{passed}/{len(rows)} checks pass")
    return EXIT_OK if ok else EXIT_SUITE_FAILED


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol-eq", type=float, default=None, help="equality tolerance")
    parser.add_argument("--tol-psd", type=float, default=None, help="positivity tolerance")
    parser.add_argument("--tol-rank", type=float, default=None, help="rank cutoff")
    parser.add_argument("--machine", action="store_true", help="structured JSON output")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="suite/generator seed")
    parser.add_argument(
        "--no-timing", action="store_true", help="zero wall times for reproducible reports"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qchan",
        description="Quantum-channel representation conversion and structure certificates.",
    )
    parser.add_argument("--version", action="version", version=f"qchan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a channel document between representations")
    p.add_argument("input")
    p.add_argument("--to", required=True, choices=("kraus", "choi", "holevo", "stinespring"))
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("analyze", help="run property certificates on channel documents")
    p.add_argument("inputs", nargs="+")
    p.add_argument(
        "--properties",
        default=",".join(ALL_PROPERTIES),
        help="comma-separated subset of: " + ", ".join(ALL_PROPERTIES),
    )
    p.add_argument("--dual", action="store_true", help="analyze the dual map instead")
    p.add_argument("--report", default=None, help="directory for figures and CSV summaries")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("complement", help="write the (minimal) complementary channel")
    p.add_argument("input")
    p.add_argument("--minimal", action="store_true", help="use the minimal Kraus family")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_complement)

    p = sub.add_parser("verify", help="run a seeded cross-equivalence suite")
    p.add_argument("suite", choices=sorted(suites.SUITES))
    p.add_argument("-n", type=int, default=50, help="instance count")
    p.add_argument("--report", default=None, help="directory for figures and CSV summaries")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zoo", help="generate a channel document from a named family")
    p.add_argument("family")
    p.add_argument("params", nargs="*", help="family parameters as key=value")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_zoo)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
