"""Schema-validated operator files and report serialization.

A single JSON format covers inputs and reports; complex numbers are always
two-element [re, im] arrays, matrices are row-major nested lists with the
bipartite row convention row = i_sys * env_dim + i_env.  Reports are written
atomically (write-then-rename) with sorted keys so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

try:
    import jsonschema
except ImportError:  # pragma: no cover - jsonschema is a declared dependency
    jsonschema = None

from .dipole import DipoleModel
from .errors import OperatorFileError
from .linalg import BipartiteOperator, Tolerance, bipartite_operator, resolve_tol

SCHEMA_VERSION = 1

_COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _COMPLEX}}

OPERATOR_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "kind", "sys_dim", "env_dim"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": ["unitary", "hamiltonian", "dipole"]},
        "sys_dim": {"type": "integer", "minimum": 1},
        "env_dim": {"type": "integer", "minimum": 1},
        "matrix": _MATRIX,
        "h_sys": _MATRIX,
        "h_env": _MATRIX,
        "couplings": {"type": "array", "items": _MATRIX},
    },
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": "dipole"}}},
            "then": {"required": ["h_sys", "couplings"]},
            "else": {"required": ["matrix"]},
        }
    ],
}


def encode_complex(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m)
    return [[encode_complex(z) for z in row] for row in m]


def encode_vector(v: np.ndarray) -> list:
    return [encode_complex(z) for z in np.asarray(v)]


def decode_matrix(rows, what: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(
            [[complex(entry[0], entry[1]) for entry in row] for row in rows]
        )
    except (TypeError, IndexError, ValueError) as exc:
        raise OperatorFileError(f"malformed {what}: {exc}") from exc
    if arr.ndim != 2:
        raise OperatorFileError(f"{what} is not two-dimensional")
    if not np.all(np.isfinite(arr)):
        raise OperatorFileError(f"{what} contains non-finite entries")
    return arr


def operator_to_dict(op: BipartiteOperator) -> dict:
    kind = "unitary" if op.kind == "unitary" else "hamiltonian"
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "sys_dim": op.sys_dim,
        "env_dim": op.env_dim,
        "matrix": encode_matrix(op.matrix),
    }


def dipole_to_dict(model: DipoleModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "dipole",
        "sys_dim": model.sys_dim,
        "env_dim": model.env_dim,
        "h_sys": encode_matrix(model.h_sys),
        "couplings": [encode_matrix(v) for v in model.couplings],
    }


def parse_operator_dict(doc: dict, tol: Tolerance | None = None):
    """Validate a parsed JSON document and build the domain object.

    Returns a BipartiteOperator for kinds unitary/hamiltonian and a
    DipoleModel for kind dipole.  Schema violations, dimension mismatches
    and failed unitarity/hermiticity checks raise OperatorFileError.
    """
    tol = resolve_tol(tol)
    if jsonschema is not None:
        try:
            jsonschema.validate(doc, OPERATOR_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise OperatorFileError(f"schema violation at {list(exc.path)}: {exc.message}") from exc
    kind = doc.get("kind")
    n, d = doc.get("sys_dim"), doc.get("env_dim")

    if kind == "dipole":
        h_sys = decode_matrix(doc["h_sys"], "h_sys")
        couplings = [decode_matrix(v, f"couplings[{i}]") for i, v in enumerate(doc["couplings"])]
        if h_sys.shape != (n, n):
            raise OperatorFileError(f"h_sys shape {h_sys.shape} != sys_dim {n}")
        if "h_env" in doc:
            h_env = decode_matrix(doc["h_env"], "h_env")
            if np.linalg.norm(h_env) > tol.eq_abs:
                raise OperatorFileError(
                    "dipole models carry no free environment Hamiltonian; h_env must be zero"
                )
        if len(couplings) != d - 1:
            raise OperatorFileError(
                f"env_dim {d} must equal number of couplings + 1 = {len(couplings) + 1}"
            )
        try:
            return DipoleModel(h_sys, np.asarray(couplings))
        except ValueError as exc:
            raise OperatorFileError(str(exc)) from exc

    matrix = decode_matrix(doc["matrix"])
    if matrix.shape != (n * d, n * d):
        raise OperatorFileError(f"matrix shape {matrix.shape} != ({n * d}, {n * d})")
    flag = "unitary" if kind == "unitary" else "hermitian"
    try:
        return bipartite_operator(matrix, n, d, flag, tol)
    except ValueError as exc:
        raise OperatorFileError(str(exc)) from exc


def parse_operator(path: str, tol: Tolerance | None = None):
    """Load and validate an operator file; see parse_operator_dict."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OperatorFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise OperatorFileError(f"{path} is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise OperatorFileError(f"{path}: top-level value must be an object")
    return parse_operator_dict(doc, tol)


def file_checksum(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: dict, path: str) -> None:
    """Serialize atomically: write to a temp file in the target directory,
    then rename over the destination."""
    text = dump_report(report)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
