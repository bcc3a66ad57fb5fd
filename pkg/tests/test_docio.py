"""Unit tests for the channel-document interchange format."""

import numpy as np
import pytest

from qchan.docio import (
    ChannelDocument,
    channel_from_document,
    document_digest,
    document_from_holevo,
    document_from_json,
    document_from_kraus,
    document_to_json,
    matrix_from_json,
    matrix_to_json,
)
from qchan.errors import DocumentError
from qchan.reprs import apply, choi_from_kraus

from .test_reprs import repeated_preparation_form


def test_matrix_json_round_trip():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    back = matrix_from_json(matrix_to_json(m), "m")
    np.testing.assert_allclose(back, m)


def test_matrix_json_real_entries_collapse():
    enc = matrix_to_json(np.array([[1.0, 2.5], [0.0, -1.0]]))
    assert enc == [[1, 2.5], [0, -1]]


def test_scalar_forms():
    m = matrix_from_json([[1, [0, 1]], [[2.5, -1], 0]], "m")
    np.testing.assert_allclose(m, [[1.0, 1.0j], [2.5 - 1.0j, 0.0]])


@pytest.mark.parametrize(
    "obj,loc_piece",
    [
        ([], "m"),
        ([[1], [1, 2]], "m[1]"),
        ([[{"x": 1}]], "m[0][0]"),
        ([[[1, 2, 3]]], "m[0][0]"),
    ],
)
def test_matrix_errors_are_located(obj, loc_piece):
    with pytest.raises(DocumentError) as err:
        matrix_from_json(obj, "m")
    assert loc_piece in str(err.value)


def test_document_round_trip():
    doc = document_from_kraus(
        __import__("qchan.zoo", fromlist=["zoo"]).pinching(2), {"name": "pinch"}
    )
    text = document_to_json(doc)
    back = document_from_json(text)
    assert back == doc
    assert document_to_json(back) == text
    assert document_digest(back) == document_digest(doc)


def test_document_parse_errors():
    with pytest.raises(DocumentError):
        document_from_json("{not json")
    with pytest.raises(DocumentError):
        document_from_json('{"kind": "wat", "d_in": 2, "d_out": 2, "payload": {}}')
    with pytest.raises(DocumentError):
        document_from_json('{"kind": "kraus", "d_in": 0, "d_out": 2, "payload": {}}')
    with pytest.raises(DocumentError):
        document_from_json('{"kind": "kraus", "d_in": 2, "d_out": 2, "payload": []}')
    with pytest.raises(DocumentError):
        document_from_json(
            '{"kind": "kraus", "d_in": 2, "d_out": 2, "payload": {}, "metadata": {"a": 1}}'
        )


def test_holevo_document_materialises():
    h = repeated_preparation_form()
    doc = document_from_holevo(h)
    k, back = channel_from_document(document_from_json(document_to_json(doc)))
    assert back is not None
    t = np.diag([1.0, 2.0, 3.0])
    expect = sum(np.trace(t @ f) * r for f, r in h.pairs)
    np.testing.assert_allclose(apply(k, t), expect, atol=1e-9)


def test_zoo_document_materialises_deterministically():
    doc = ChannelDocument(
        "zoo", 3, 4,
        {"family": "holevo-gen", "params": {"d_in": 3, "d_out": 4, "classes": 2, "seed": 9}},
        {},
    )
    k1, h1 = channel_from_document(doc)
    k2, h2 = channel_from_document(doc)
    np.testing.assert_array_equal(choi_from_kraus(k1).mat, choi_from_kraus(k2).mat)
    assert h1 is not None


def test_zoo_document_unknown_family():
    doc = ChannelDocument("zoo", 2, 2, {"family": "nope", "params": {}}, {})
    with pytest.raises(DocumentError):
        channel_from_document(doc)


def test_zoo_document_declared_dims_must_match():
    from qchan.errors import DimensionMismatchError

    doc = ChannelDocument(
        "zoo", 5, 5, {"family": "pinching", "params": {"d": 3}}, {}
    )
    with pytest.raises(DimensionMismatchError):
        channel_from_document(doc)


def test_stinespring_document_round_trip():
    from qchan import zoo
    from qchan.docio import document_from_stinespring
    from qchan.reprs import stinespring_from_kraus

    s = stinespring_from_kraus(zoo.pinching(2))
    doc = document_from_stinespring(s)
    k, _ = channel_from_document(document_from_json(document_to_json(doc)))
    np.testing.assert_allclose(
        choi_from_kraus(k).mat, choi_from_kraus(zoo.pinching(2)).mat, atol=1e-12
    )
