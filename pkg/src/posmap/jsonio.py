"""JSON wire formats.

Matrix: ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` in row-major order.
Map: ``{"d": n, "repr": "transfer"|"choi"|"aform"|"kraus", "basis": name, "data": ...}``
where ``data`` is a matrix, or a list of matrices for ``kraus``.

Floats are written with Python's shortest round-trip ``repr``, so decoding an
encoded matrix gives back the identical doubles.
"""
from __future__ import annotations

import json
import math
import re

import numpy as np

from .errors import PosmapError
from .matspace import basis_by_name
from .maprep import AForm, ChoiMatrix, KrausForm, MapRep, TransferMatrix

REPRS = ("transfer", "choi", "aform", "kraus")


class SchemaError(PosmapError, ValueError):
    """Malformed JSON document; ``path`` points at the offending node."""

    code = "SchemaError"

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path or "/"


def real_to_json(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0 else x  # drop negative zero


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [real_to_json(z.real), real_to_json(z.imag)]


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {m.shape}")
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "data": [complex_to_json(z) for z in m.reshape(-1)],
    }


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_real(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def matrix_from_json(obj, path: str = "") -> np.ndarray:
    _expect(isinstance(obj, dict), path, "matrix must be an object")
    for key in ("rows", "cols", "data"):
        _expect(key in obj, f"{path}/{key}", "missing")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    _expect(_is_int(rows) and rows >= 1, f"{path}/rows", "must be a positive integer")
    _expect(_is_int(cols) and cols >= 1, f"{path}/cols", "must be a positive integer")
    _expect(isinstance(data, list), f"{path}/data", "must be a list")
    _expect(len(data) == rows * cols, f"{path}/data", f"expected {rows * cols} entries, got {len(data)}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for k, z in enumerate(data):
        _expect(
            isinstance(z, list) and len(z) == 2 and all(_is_real(x) for x in z),
            f"{path}/data/{k}",
            "complex entry must be [re, im] with finite numbers",
        )
        out[k] = complex(z[0], z[1])
    return out.reshape(rows, cols)


def map_to_json(phi: MapRep) -> dict:
    if isinstance(phi, TransferMatrix):
        basis = "matrix_units" if phi.basis is None else phi.basis.kind
        return {"d": phi.d, "repr": "transfer", "basis": basis, "data": matrix_to_json(phi.B)}
    if isinstance(phi, ChoiMatrix):
        return {"d": phi.d, "repr": "choi", "basis": "matrix_units", "data": matrix_to_json(phi.C)}
    if isinstance(phi, AForm):
        return {"d": phi.d, "repr": "aform", "basis": phi.basis.kind, "data": matrix_to_json(phi.A)}
    if isinstance(phi, KrausForm):
        return {
            "d": phi.d,
            "repr": "kraus",
            "basis": "matrix_units",
            "data": [matrix_to_json(k) for k in phi.ops],
        }
    raise TypeError(f"not a map representation: {type(phi).__name__}")


def map_from_json(obj, path: str = "") -> MapRep:
    _expect(isinstance(obj, dict), path, "map must be an object")
    for key in ("d", "repr", "data"):
        _expect(key in obj, f"{path}/{key}", "missing")
    d, rep = obj["d"], obj["repr"]
    _expect(_is_int(d) and d >= 1, f"{path}/d", "must be a positive integer")
    _expect(rep in REPRS, f"{path}/repr", f"must be one of {', '.join(REPRS)}")
    basis_name = obj.get("basis", "matrix_units")
    _expect(isinstance(basis_name, str), f"{path}/basis", "must be a string")
    try:
        basis = basis_by_name(basis_name, d)
    except PosmapError:
        raise SchemaError(f"{path}/basis", f"unknown basis {basis_name!r}") from None

    if rep == "kraus":
        data = obj["data"]
        _expect(isinstance(data, list) and data, f"{path}/data", "must be a non-empty list of matrices")
        ops = [matrix_from_json(m, f"{path}/data/{k}") for k, m in enumerate(data)]
        for k, op in enumerate(ops):
            _expect(op.shape == (d, d), f"{path}/data/{k}", f"Kraus operator must be {d}x{d}")
        return KrausForm(np.array(ops))

    m = matrix_from_json(obj["data"], f"{path}/data")
    _expect(m.shape == (d * d, d * d), f"{path}/data", f"must be {d * d}x{d * d} for d={d}")
    if rep == "transfer":
        return TransferMatrix(m, None if basis.kind == "matrix_units" else basis)
    if rep == "choi":
        _expect(basis.kind == "matrix_units", f"{path}/basis", "Choi matrices use matrix units")
        return ChoiMatrix(m)
    return AForm(m, basis)


_PAIR = re.compile(r"\[\s+([^\s\[\]{},]+),\s+([^\s\[\]{},]+)\s+\]")


def dumps(obj) -> str:
    """Deterministic serialization used for every CLI output.

    Indented JSON with each ``[re, im]`` pair kept on one line.
    """
    text = json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False)
    return _PAIR.sub(r"[\1, \2]", text) + "\n"


# --------------------------------------------------------------------------
# reports


def spectrum_to_json(report) -> dict:
    return {
        "eigenvalues": [complex_to_json(z) for z in report.eigenvalues],
        "spectral_radius": real_to_json(report.spectral_radius),
        "pf_bound": real_to_json(report.pf_bound),
        "bound_satisfied": bool(report.bound_satisfied),
    }


def biorth_to_json(dec) -> dict:
    return {
        "lambdas": [complex_to_json(z) for z in dec.lambdas],
        "f": [matrix_to_json(m) for m in dec.f],
        "g": [matrix_to_json(m) for m in dec.g],
        "condition_number": real_to_json(dec.condition_number),
    }


def witness_to_json(w) -> dict:
    return {
        "a": matrix_to_json(w.a),
        "value": real_to_json(w.value),
        "cone": {k: bool(v) for k, v in w.cone.items()},
        "sampled_min": None if w.sampled_min is None else real_to_json(w.sampled_min),
        "seed": w.seed,
    }


def witness_from_json(obj, path: str = "") -> dict:
    """Parse a witness document into a plain dict with ``a`` as an array."""
    _expect(isinstance(obj, dict), path, "witness must be an object")
    for key in ("a", "value", "cone"):
        _expect(key in obj, f"{path}/{key}", "missing")
    _expect(_is_real(obj["value"]), f"{path}/value", "must be a finite number")
    cone = obj["cone"]
    _expect(isinstance(cone, dict), f"{path}/cone", "must be an object")
    for key in ("trace_nonneg", "trace_sq"):
        _expect(isinstance(cone.get(key), bool), f"{path}/cone/{key}", "must be a boolean")
    return {**obj, "a": matrix_from_json(obj["a"], f"{path}/a")}
