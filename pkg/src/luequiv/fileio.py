"""JSON matrix documents and verdict reports.

A matrix document looks like::

    {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.0], ...], "dims": [M, N]}

``data`` is row-major with each complex entry as ``[re, im]``; ``dims`` is
optional. Floats are written with ``repr`` precision so a read/write cycle is
lossless.
"""
import json
import math
import os
import tempfile

import numpy as np


class MatrixFileError(ValueError):
    """Malformed matrix document; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


def matrix_to_doc(mat, dims=None):
    mat = np.asarray(mat, dtype=np.complex128)
    doc = {
        "rows": int(mat.shape[0]),
        "cols": int(mat.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in mat.ravel()],
    }
    if dims is not None:
        doc["dims"] = [int(d) for d in dims]
    return doc


def _count(doc, key):
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise MatrixFileError(key, f"expected a positive integer, got {v!r}")
    return v


def doc_to_matrix(doc):
    """Parse a matrix document; returns ``(matrix, dims or None)``."""
    if not isinstance(doc, dict):
        raise MatrixFileError("<root>", "expected a JSON object")
    rows, cols = _count(doc, "rows"), _count(doc, "cols")
    data = doc.get("data")
    if not isinstance(data, list):
        raise MatrixFileError("data", "expected a list of [re, im] pairs")
    if len(data) != rows * cols:
        raise MatrixFileError("data", f"has {len(data)} entries, expected {rows * cols}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for k, pair in enumerate(data):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
            raise MatrixFileError(f"data[{k}]", f"expected [re, im], got {pair!r}")
        if not all(math.isfinite(x) for x in pair):
            raise MatrixFileError(f"data[{k}]", "non-finite value")
        out[k] = complex(pair[0], pair[1])
    dims = doc.get("dims")
    if dims is not None:
        if (not isinstance(dims, list) or len(dims) != 2
                or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims)):
            raise MatrixFileError("dims", f"expected [M, N], got {dims!r}")
        if dims[0] * dims[1] != rows or rows != cols:
            raise MatrixFileError("dims", f"{dims} does not match a {rows}x{cols} matrix")
        dims = tuple(dims)
    return out.reshape(rows, cols), dims


def _loads(text):
    def reject(name):
        raise ValueError(f"non-finite constant {name}")

    return json.loads(text, parse_constant=reject)


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = _loads(text)
    except ValueError as exc:
        raise MatrixFileError("<root>", f"invalid JSON ({exc})") from exc
    return doc_to_matrix(doc)


def atomic_write_text(path, text):
    """Write via a temp file in the target directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(doc):
    return json.dumps(doc, allow_nan=False, indent=None) + "\n"


def write_matrix(path, mat, dims=None):
    atomic_write_text(path, dumps(matrix_to_doc(mat, dims)))


def write_json(path, doc):
    atomic_write_text(path, dumps(doc))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return _loads(fh.read())
