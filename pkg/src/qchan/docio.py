"""Channel documents: the JSON interchange format of the CLI.

A document is ``{"kind": ..., "d_in": n, "d_out": m, "payload": ...,
"metadata": {...}}`` where matrices are arrays of rows and a complex scalar
is either a plain number or a two-element ``[re, im]`` array. Parsing is
total: every malformed field raises :class:`DocumentError` naming the
location, never an unlocated crash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import zoo
from .errors import DimensionMismatchError, DocumentError
from .matcore import Tolerance, default_tolerance
from .reprs import (
    ChoiMatrix,
    HolevoForm,
    KrausRep,
    StinespringRep,
    holevo_to_kraus,
    kraus_from_choi,
    kraus_from_stinespring,
)

__all__ = [
    "ChannelDocument",
    "KINDS",
    "ZOO_FAMILIES",
    "document_from_json",
    "document_to_json",
    "document_digest",
    "channel_from_document",
    "zoo_channel_from_payload",
    "document_from_kraus",
    "document_from_choi",
    "document_from_holevo",
    "matrix_to_json",
    "matrix_from_json",
]

KINDS = ("kraus", "choi", "holevo", "stinespring", "zoo")

ZOO_FAMILIES = (
    "schur",
    "schur-complement",
    "werner-holevo",
    "phi-lambda",
    "pinching",
    "ad-operator",
    "direct-sum-pure",
    "cstar-extreme-gen",
    "holevo-gen",
    "holevo-violator",
    "random",
)


@dataclass(frozen=True)
class ChannelDocument:
    """Parsed channel document; payload stays in JSON-shaped form."""

    kind: str
    d_in: int
    d_out: int
    payload: dict
    metadata: dict = field(default_factory=dict)


def _scalar_from_json(obj, location: str) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if (
        isinstance(obj, list)
        and len(obj) == 2
        and all(isinstance(x, (int, float)) for x in obj)
    ):
        return complex(obj[0], obj[1])
    raise DocumentError("expected a number or an [re, im] pair", location)


def matrix_from_json(obj, location: str) -> np.ndarray:
    """Parse an array-of-rows matrix with located errors."""
    if not isinstance(obj, list) or not obj:
        raise DocumentError("expected a non-empty array of rows", location)
    rows = []
    width = None
    for r, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise DocumentError("expected a non-empty row array", f"{location}[{r}]")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DocumentError(
                f"row has {len(row)} entries, expected {width}", f"{location}[{r}]"
            )
        rows.append(
            [_scalar_from_json(x, f"{location}[{r}][{c}]") for c, x in enumerate(row)]
        )
    mat = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(mat)):
        raise DocumentError("matrix contains non-finite entries", location)
    return mat


def _num_to_json(x: float):
    if x == int(x) and abs(x) < 1e15:
        return int(x)
    return x


def matrix_to_json(m: np.ndarray) -> list:
    """Serialise a matrix; real entries collapse to plain numbers."""
    out = []
    for row in np.asarray(m, dtype=complex):
        cells = []
        for x in row:
            if x.imag == 0.0:
                cells.append(_num_to_json(float(x.real)))
            else:
                cells.append([_num_to_json(float(x.real)), _num_to_json(float(x.imag))])
        out.append(cells)
    return out


def document_from_json(text: str, source: str = "document") -> ChannelDocument:
    """Parse a document string; all failures carry a location."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}", source) from exc
    if not isinstance(obj, dict):
        raise DocumentError("top level must be an object", source)
    kind = obj.get("kind")
    if kind not in KINDS:
        raise DocumentError(f"kind must be one of {KINDS}, got {kind!r}", f"{source}.kind")
    for dim_key in ("d_in", "d_out"):
        val = obj.get(dim_key)
        if not isinstance(val, int) or val <= 0:
            raise DocumentError(f"{dim_key} must be a positive integer", f"{source}.{dim_key}")
    payload = obj.get("payload")
    if not isinstance(payload, dict):
        raise DocumentError("payload must be an object", f"{source}.payload")
    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise DocumentError("metadata must map strings to strings", f"{source}.metadata")
    return ChannelDocument(kind, obj["d_in"], obj["d_out"], payload, dict(metadata))


def document_to_json(doc: ChannelDocument) -> str:
    """Canonical serialisation; parse o serialise is the identity on documents."""
    obj = {
        "kind": doc.kind,
        "d_in": doc.d_in,
        "d_out": doc.d_out,
        "payload": doc.payload,
        "metadata": doc.metadata,
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def document_digest(doc: ChannelDocument) -> str:
    """sha256 of the canonical serialisation."""
    return hashlib.sha256(document_to_json(doc).encode("utf-8")).hexdigest()


def zoo_channel_from_payload(doc: ChannelDocument, tol: Tolerance):
    params = doc.payload.get("params")
    family = doc.payload.get("family")
    if not isinstance(params, dict):
        raise DocumentError("zoo payload needs a params object", "payload.params")
    if family not in ZOO_FAMILIES:
        raise DocumentError(
            f"family must be one of {ZOO_FAMILIES}, got {family!r}", "payload.family"
        )

    def need(key, typ, caster=None):
        if key not in params:
            raise DocumentError(f"missing parameter {key!r}", "payload.params")
        val = params[key]
        if caster is not None:
            return caster(val, f"payload.params.{key}")
        if typ is float and isinstance(val, int):
            val = float(val)
        if not isinstance(val, typ):
            raise DocumentError(f"parameter {key!r} must be {typ.__name__}", "payload.params")
        return val

    if family == "schur":
        return zoo.schur_map(need("a", None, matrix_from_json), tol)
    if family == "schur-complement":
        return zoo.schur_complement_map(need("a", None, matrix_from_json), tol)
    if family == "werner-holevo":
        return zoo.werner_holevo(need("d", int), need("lambda", float), tol)
    if family == "phi-lambda":
        return zoo.phi_lambda(need("d", int), need("lambda", float), tol)
    if family == "pinching":
        return zoo.pinching(need("d", int))
    if family == "ad-operator":
        return zoo.ad_operator(need("a", None, matrix_from_json))
    if family == "direct-sum-pure":
        blocks = params.get("blocks")
        if not isinstance(blocks, list) or not blocks:
            raise DocumentError("direct-sum-pure needs a non-empty blocks array", "payload.params.blocks")
        mats = [matrix_from_json(b, f"payload.params.blocks[{i}]") for i, b in enumerate(blocks)]
        channel, _ = zoo.direct_sum_pure(mats)
        return channel
    if family == "cstar-extreme-gen":
        us = need("us", None, matrix_from_json)
        vs = need("vs", None, matrix_from_json)
        return zoo.cstar_extreme_gen(
            [us[:, i] for i in range(us.shape[1])],
            [vs[:, i] for i in range(vs.shape[1])],
            tol,
        )
    if family == "holevo-gen":
        return zoo.random_degradable_seb(
            need("d_in", int), need("d_out", int), need("classes", int), need("seed", int)
        )
    if family == "holevo-violator":
        return zoo.random_seb_violator(
            need("d_in", int), need("d_out", int), need("classes", int), need("seed", int)
        )
    if family == "random":
        return zoo.random_channel(
            need("d_in", int), need("d_out", int), need("cr", int), need("seed", int)
        )
    raise DocumentError(f"unhandled family {family!r}", "payload.family")


def channel_from_document(
    doc: ChannelDocument, tol: Tolerance | None = None
) -> tuple[KrausRep, HolevoForm | None]:
    """Materialise a document as a Kraus representation.

    The second element is the Holevo form when the document carries one
    natively (kind 'holevo' or a measure-and-prepare zoo family), since
    some certificates take the form directly.
    """
    tol = tol or default_tolerance()
    kind = doc.kind
    if kind == "kraus":
        ops_json = doc.payload.get("ops")
        if not isinstance(ops_json, list) or not ops_json:
            raise DocumentError("kraus payload needs a non-empty ops array", "payload.ops")
        ops = [matrix_from_json(o, f"payload.ops[{i}]") for i, o in enumerate(ops_json)]
        return KrausRep(doc.d_in, doc.d_out, tuple(ops)), None
    if kind == "choi":
        mat = matrix_from_json(doc.payload.get("mat"), "payload.mat")
        choi = ChoiMatrix(doc.d_in, doc.d_out, mat)
        return kraus_from_choi(choi, tol), None
    if kind == "holevo":
        pairs_json = doc.payload.get("pairs")
        if not isinstance(pairs_json, list) or not pairs_json:
            raise DocumentError("holevo payload needs a non-empty pairs array", "payload.pairs")
        pairs = []
        for i, pair in enumerate(pairs_json):
            if not isinstance(pair, dict) or "f" not in pair or "r" not in pair:
                raise DocumentError("each pair needs 'f' and 'r'", f"payload.pairs[{i}]")
            pairs.append(
                (
                    matrix_from_json(pair["f"], f"payload.pairs[{i}].f"),
                    matrix_from_json(pair["r"], f"payload.pairs[{i}].r"),
                )
            )
        h = HolevoForm(doc.d_in, doc.d_out, tuple(pairs))
        return holevo_to_kraus(h, tol), h
    if kind == "stinespring":
        a = matrix_from_json(doc.payload.get("a"), "payload.a")
        env = doc.payload.get("env_dim")
        if not isinstance(env, int) or env <= 0:
            raise DocumentError("env_dim must be a positive integer", "payload.env_dim")
        s = StinespringRep(doc.d_in, doc.d_out, env, a)
        return kraus_from_stinespring(s), None
    if kind == "zoo":
        made = zoo_channel_from_payload(doc, tol)
        if (made.d_in, made.d_out) != (doc.d_in, doc.d_out):
            raise DimensionMismatchError(
                f"generated channel is {made.d_in} -> {made.d_out}, document "
                f"declares {doc.d_in} -> {doc.d_out}"
            )
        if isinstance(made, HolevoForm):
            return holevo_to_kraus(made, tol), made
        return made, None
    raise DocumentError(f"unhandled kind {kind!r}", "kind")


def document_from_kraus(k: KrausRep, metadata: dict | None = None) -> ChannelDocument:
    payload = {"ops": [matrix_to_json(op) for op in k.ops]}
    return ChannelDocument("kraus", k.d_in, k.d_out, payload, dict(metadata or {}))


def document_from_choi(c: ChoiMatrix, metadata: dict | None = None) -> ChannelDocument:
    payload = {"mat": matrix_to_json(c.mat)}
    return ChannelDocument("choi", c.d_in, c.d_out, payload, dict(metadata or {}))


def document_from_holevo(h: HolevoForm, metadata: dict | None = None) -> ChannelDocument:
    payload = {
        "pairs": [{"f": matrix_to_json(f), "r": matrix_to_json(r)} for f, r in h.pairs]
    }
    return ChannelDocument("holevo", h.d_in, h.d_out, payload, dict(metadata or {}))


def document_from_stinespring(
    s: StinespringRep, metadata: dict | None = None
) -> ChannelDocument:
    payload = {"a": matrix_to_json(s.a), "env_dim": s.env_dim}
    return ChannelDocument("stinespring", s.d_in, s.d_out, payload, dict(metadata or {}))
