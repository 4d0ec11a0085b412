"""JSON encodings of matrices, superoperators, preservers and reports.

Matrices are ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in row-major
order.  Floats are written by ``json`` with Python's shortest round-trip repr,
so reading back gives the identical double.
"""

import json
import math

import numpy as np

from .lemmas import IneqReport
from .preserver import CanonicalPreserver, DecompositionResult, PreservationReport
from .tensor import Superoperator, TensorShape


class FormatError(ValueError):
    """Malformed or inconsistent JSON input."""


def _require(cond, msg):
    if not cond:
        raise FormatError(msg)


def _int(x, name):
    _require(isinstance(x, int) and not isinstance(x, bool), f"{name} must be an integer")
    return x


def _real(x, name):
    _require(isinstance(x, (int, float)) and not isinstance(x, bool), f"{name} must be a number")
    try:
        x = float(x)
    except OverflowError:
        raise FormatError(f"{name} is out of range") from None
    _require(math.isfinite(x), f"{name} must be finite")
    return x


def matrix_to_json(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("matrix must be 2-d")
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj):
    _require(isinstance(obj, dict), "matrix must be a JSON object")
    for key in ("rows", "cols", "data"):
        _require(key in obj, f"matrix is missing {key!r}")
    rows = _int(obj["rows"], "rows")
    cols = _int(obj["cols"], "cols")
    _require(rows > 0 and cols > 0, "rows and cols must be positive")
    data = obj["data"]
    _require(isinstance(data, list), "data must be a list")
    _require(len(data) == rows * cols, f"data has {len(data)} entries, expected {rows * cols}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(data):
        _require(isinstance(pair, list) and len(pair) == 2, f"entry {i} must be [re, im]")
        out[i] = complex(_real(pair[0], f"entry {i} re"), _real(pair[1], f"entry {i} im"))
    return out.reshape(rows, cols)


def _dims(obj):
    _require(isinstance(obj, list) and obj, "dims must be a non-empty list")
    dims = [_int(d, "dims entry") for d in obj]
    _require(all(d >= 2 for d in dims), "every dims entry must be >= 2")
    return TensorShape(dims)


def superoperator_to_json(phi):
    return {"dims": list(phi.shape.dims), "mat": matrix_to_json(phi.mat)}


def superoperator_from_json(obj):
    _require(isinstance(obj, dict), "superoperator must be a JSON object")
    _require("dims" in obj and "mat" in obj, "superoperator needs 'dims' and 'mat'")
    shape = _dims(obj["dims"])
    mat = matrix_from_json(obj["mat"])
    side = shape.N**2
    _require(mat.shape == (side, side), f"mat must be {side}x{side} for dims {list(shape.dims)}")
    return Superoperator(shape, mat)


def preserver_to_json(cp):
    return {
        "dims": list(cp.shape.dims),
        "flags": ["t" if f else "id" for f in cp.flags],
        "U": matrix_to_json(cp.u),
        "V": matrix_to_json(cp.v),
    }


def preserver_from_json(obj):
    _require(isinstance(obj, dict), "preserver must be a JSON object")
    for key in ("dims", "flags", "U", "V"):
        _require(key in obj, f"preserver is missing {key!r}")
    shape = _dims(obj["dims"])
    flags = obj["flags"]
    _require(isinstance(flags, list) and all(f in ("id", "t") for f in flags), "flags must be 'id' or 't'")
    try:
        return CanonicalPreserver(shape, matrix_from_json(obj["U"]), matrix_from_json(obj["V"]), [f == "t" for f in flags])
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from exc


def jsonable(x):
    """Recursively convert numpy values, matrices and tuples into JSON-ready data."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if x.ndim == 2:
            return matrix_to_json(x)
        if np.iscomplexobj(x):
            return [[float(z.real), float(z.imag)] for z in x.ravel()]
        return x.tolist()
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def decomposition_to_json(res):
    out = preserver_to_json(res.preserver)
    out["residual"] = float(res.residual)
    out["diagnostics"] = jsonable(res.diagnostics)
    return out


def report_to_json(rep):
    if isinstance(rep, IneqReport):
        return {
            "holds": "vacuous" if rep.vacuous else bool(rep.holds),
            "slack": float(rep.slack),
            "witness": jsonable(rep.witness),
            "details": jsonable(rep.details),
        }
    if isinstance(rep, PreservationReport):
        return {
            "max_deviation": rep.max_deviation,
            "preserving": rep.preserving,
            "trials": rep.trials,
            "tol": rep.tol,
            "per_params": jsonable(rep.per_params),
            "witness": jsonable(rep.witness),
        }
    if isinstance(rep, DecompositionResult):
        return decomposition_to_json(rep)
    raise TypeError(f"no JSON encoding for {type(rep).__name__}")


def dumps(obj):
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _no_constants(name):
    raise FormatError(f"non-finite constant {name} is not allowed")


def loads(text):
    try:
        return json.loads(text, parse_constant=_no_constants)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON ({exc})") from exc
    except RecursionError as exc:
        raise FormatError("JSON nested too deeply") from exc


def load(path):
    try:
        with open(path) as fh:
            return json.load(fh, parse_constant=_no_constants)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    except (UnicodeDecodeError, RecursionError) as exc:
        raise FormatError(f"{path}: unreadable JSON ({exc})") from exc


def save(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
