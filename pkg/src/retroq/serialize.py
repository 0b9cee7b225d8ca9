"""JSON schema for states and POVMs.

Complex entries are ``[re, im]`` pairs, matrices are row-major nested arrays.
A state is ``{"dim": d, "matrix": [[[re, im], ...], ...]}``, a POVM is
``{"dim": d, "elements": [matrix, ...]}``. Structural problems raise
:class:`SchemaError` carrying the path of the offending value; JSON parse
errors carry the line/column reported by the decoder.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .quantum import DensityMatrix, Povm


def matrix_to_obj(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def density_matrix_to_obj(dm: DensityMatrix) -> dict:
    return {"dim": dm.dim, "matrix": matrix_to_obj(dm.mat)}


def povm_to_obj(p: Povm) -> dict:
    return {"dim": p.dim, "elements": [matrix_to_obj(e) for e in p.elements]}


def _entry_from_obj(obj, path: str) -> complex:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise SchemaError("expected a [re, im] pair", path)
    re, im = obj
    if not isinstance(re, (int, float)) or not isinstance(im, (int, float)):
        raise SchemaError("entry parts must be numbers", path)
    return complex(re, im)


def matrix_from_obj(obj, dim: int, path: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != dim:
        raise SchemaError(f"expected {dim} rows", path)
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != dim:
            raise SchemaError(f"expected {dim} entries", f"{path}[{i}]")
        for j, entry in enumerate(row):
            out[i, j] = _entry_from_obj(entry, f"{path}[{i}][{j}]")
    return out


def _dim_from_obj(obj) -> int:
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object", "")
    dim = obj.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError("expected a positive integer", "dim")
    return dim


def density_matrix_from_obj(obj) -> DensityMatrix:
    dim = _dim_from_obj(obj)
    if "matrix" not in obj:
        raise SchemaError("missing key", "matrix")
    return DensityMatrix(matrix_from_obj(obj["matrix"], dim, "matrix"))


def povm_from_obj(obj) -> Povm:
    dim = _dim_from_obj(obj)
    elements = obj.get("elements")
    if not isinstance(elements, list) or not elements:
        raise SchemaError("expected a nonempty list of matrices", "elements")
    mats = [matrix_from_obj(e, dim, f"elements[{k}]") for k, e in enumerate(elements)]
    return Povm(tuple(mats))


def load_json(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                          str(path)) from exc


def load_density_matrix(path) -> DensityMatrix:
    return density_matrix_from_obj(load_json(path))


def load_povm(path) -> Povm:
    return povm_from_obj(load_json(path))


def save_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
