"""JSON schemas for kernels, problems, colligations, tuples, and reports.

Complex numbers are always [re, im] pairs of 64-bit floats.  Emission is
deterministic: insertion-ordered fields, floats printed with 17 significant
digits, and files written atomically (temp + rename).
"""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .kernels import HermitianKernel, PointSample
from .preorder import Preordering
from .realize import (AglerCertificate, Colligation, DecomposeResult, FunctionSample,
                      SolverParams, Witness)

SCHEMA = "agler-lab/1"


class FormatError(ValueError):
    """Malformed document; carries a JSON-pointer-ish field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# ---------------------------------------------------------------------------
# emission


def _format_float(x: float) -> str:
    if x != x:
        raise ValueError("NaN is not serializable")
    if x in (float("inf"), float("-inf")):
        raise ValueError("infinity is not serializable")
    return format(float(x), ".17g")


def dumps(doc, indent: int = 0) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    pieces: list[str] = []
    _emit(doc, pieces)
    return "".join(pieces)


def _emit(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(k)))
            out.append(":")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _emit(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str, doc) -> None:
    text = dumps(doc) + "\n"
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".agler-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# complex arrays


def complex_to_json(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def array_to_json(arr: np.ndarray):
    arr = np.asarray(arr)
    if arr.ndim == 0:
        return complex_to_json(complex(arr))
    return [array_to_json(sub) for sub in arr]


def json_to_array(doc, path: str = "$") -> np.ndarray:
    """Nested [re, im] lists back to a complex ndarray."""
    def parse(node, p):
        if isinstance(node, list) and len(node) == 2 and all(
                isinstance(v, (int, float)) for v in node):
            return complex(node[0], node[1])
        if isinstance(node, list):
            return [parse(v, f"{p}[{i}]") for i, v in enumerate(node)]
        raise FormatError(p, "expected [re, im] pair or nested array")
    parsed = parse(doc, path)
    try:
        return np.array(parsed, dtype=complex)
    except ValueError as exc:
        raise FormatError(path, f"ragged complex array: {exc}") from None


# ---------------------------------------------------------------------------
# domain objects


def points_to_json(sample: PointSample):
    return array_to_json(sample.points)


def json_to_points(doc, path: str = "$.points") -> PointSample:
    pts = json_to_array(doc, path)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise FormatError(path, f"points must be N x d, got shape {pts.shape}")
    try:
        return PointSample(pts)
    except ValueError as exc:
        raise FormatError(path, str(exc)) from None


def kernel_to_json(K: HermitianKernel) -> dict:
    return {
        "points": points_to_json(K.sample),
        "block_dim": K.block_dim,
        "blocks": array_to_json(K.blocks),
    }


def json_to_kernel(doc, path: str = "$") -> HermitianKernel:
    if not isinstance(doc, dict):
        raise FormatError(path, "kernel must be an object")
    for key in ("points", "block_dim", "blocks"):
        if key not in doc:
            raise FormatError(f"{path}.{key}", "missing field")
    sample = json_to_points(doc["points"], f"{path}.points")
    blocks = json_to_array(doc["blocks"], f"{path}.blocks")
    m = int(doc["block_dim"])
    N = sample.n_points
    if blocks.shape != (N, N, m, m):
        raise FormatError(f"{path}.blocks",
                          f"expected shape {(N, N, m, m)}, got {blocks.shape}")
    try:
        return HermitianKernel(sample, blocks)
    except ValueError as exc:
        raise FormatError(f"{path}.blocks", str(exc)) from None


def preordering_to_json(p: Preordering):
    return [list(lam) for lam in p.sorted()]


def json_to_preordering(doc, path: str = "$.preordering") -> Preordering:
    if not isinstance(doc, list) or not all(isinstance(l, list) for l in doc):
        raise FormatError(path, "preordering must be an array of integer arrays")
    try:
        return Preordering([tuple(int(v) for v in lam) for lam in doc])
    except (TypeError, ValueError) as exc:
        raise FormatError(path, str(exc)) from None


def lambda_key(lam) -> str:
    return ",".join(str(int(v)) for v in lam)


def parse_lambda_key(key: str, path: str):
    try:
        return tuple(int(v) for v in key.split(","))
    except ValueError:
        raise FormatError(path, f"bad multi-index key {key!r}") from None


def certificate_to_json(cert: AglerCertificate) -> dict:
    return {lambda_key(lam): kernel_to_json(cert.gammas[lam]) for lam in cert.lambdas()}


def json_to_certificate(doc, c: float, path: str = "$.certificate") -> AglerCertificate:
    if not isinstance(doc, dict):
        raise FormatError(path, "certificate must be an object")
    gammas = {}
    for key, val in doc.items():
        lam = parse_lambda_key(key, f"{path}.{key}")
        gammas[lam] = json_to_kernel(val, f"{path}.{key}")
    return AglerCertificate(gammas, 0.0, c)


def colligation_to_json(col: Colligation) -> dict:
    doc = {
        "A": array_to_json(col.A),
        "B": array_to_json(col.B),
        "C": array_to_json(col.C),
        "D": array_to_json(col.D),
        "partition": [{"lambda": list(lam), "mult": mult} for lam, mult in col.partition],
    }
    if col.contractive:
        doc["contractive"] = True
    return doc


def json_to_colligation(doc, path: str = "$") -> Colligation:
    if not isinstance(doc, dict):
        raise FormatError(path, "colligation must be an object")
    for key in ("A", "B", "C", "D", "partition"):
        if key not in doc:
            raise FormatError(f"{path}.{key}", "missing field")
    mats = {k: json_to_array(doc[k], f"{path}.{k}") for k in "ABCD"}
    part = []
    if not isinstance(doc["partition"], list):
        raise FormatError(f"{path}.partition", "must be an array")
    for i, entry in enumerate(doc["partition"]):
        if not isinstance(entry, dict) or "lambda" not in entry or "mult" not in entry:
            raise FormatError(f"{path}.partition[{i}]", "need lambda and mult")
        part.append((tuple(int(v) for v in entry["lambda"]), int(entry["mult"])))
    try:
        return Colligation(mats["A"], mats["B"], mats["C"], mats["D"], tuple(part),
                           contractive=bool(doc.get("contractive", False)))
    except ValueError as exc:
        raise FormatError(path, str(exc)) from None


def function_sample_to_json(phi: FunctionSample) -> dict:
    return {"points": points_to_json(phi.sample), "phi": array_to_json(phi.values)}


def json_to_function_sample(doc, path: str = "$") -> FunctionSample:
    sample = json_to_points(doc["points"], f"{path}.points")
    vals = json_to_array(doc["phi"], f"{path}.phi")
    if vals.ndim == 1:
        vals = vals[:, None, None]
    if vals.ndim != 3 or vals.shape[0] != sample.n_points:
        raise FormatError(f"{path}.phi", f"expected (N, m, m'), got {vals.shape}")
    return FunctionSample(sample, vals)


def tuple_to_json(T) -> dict:
    return {
        "d": T.d,
        "q": T.q,
        "matrices": [array_to_json(M) for M in T.matrices],
    }


def json_to_tuple(doc, path: str = "$"):
    from .opmodel import CommutingTuple
    if not isinstance(doc, dict) or "matrices" not in doc:
        raise FormatError(path, "tuple document needs a matrices field")
    mats = [json_to_array(M, f"{path}.matrices[{i}]") for i, M in enumerate(doc["matrices"])]
    try:
        return CommutingTuple(mats)
    except ValueError as exc:
        raise FormatError(f"{path}.matrices", str(exc)) from None


def solver_params_from_json(doc, path: str = "$.solver") -> SolverParams:
    params = SolverParams()
    if doc is None:
        return params
    if not isinstance(doc, dict):
        raise FormatError(path, "solver must be an object")
    known = {"feas_tol", "max_iter", "stall_window", "stall_rtol", "seed",
             "force_iterative"}
    for key, val in doc.items():
        if key not in known:
            raise FormatError(f"{path}.{key}", "unknown solver parameter")
        setattr(params, key, type(getattr(params, key))(val))
    if params.feas_tol <= 0:
        raise FormatError(f"{path}.feas_tol", "must be positive")
    return params


def result_to_json(result: DecomposeResult) -> dict:
    doc = {"status": result.status}
    doc["certificate"] = (certificate_to_json(result.certificate)
                          if result.certificate else {})
    if result.witness is not None:
        doc["witness"] = kernel_to_json(result.witness.kernel)
        doc["witness_pairing"] = result.witness.pairing
    doc["residual"] = float(result.residual)
    doc["iterations"] = int(result.iterations)
    return doc


def report(body: dict) -> dict:
    """Wrap a result body in the versioned report envelope."""
    doc = {"schema": SCHEMA}
    doc.update(body)
    return doc
