"""JSON formats. Complex numbers are always ``{"re": float, "im": float}``."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .coeff import CoeffFunction, CoeffFunctional
from .errors import PickLabError
from .kernels import PointSet


class InputFileError(PickLabError):
    def __init__(self, path, msg, offset=None):
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"{path}{where}: {msg}")
        self.path = str(path)
        self.offset = offset


def cx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def uncx(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    return complex(float(obj["re"]), float(obj.get("im", 0.0)))


def load_json(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputFileError(path, exc.strerror or str(exc)) from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputFileError(path, "not valid UTF-8", exc.start) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise InputFileError(path, exc.msg, offset) from exc


def points_to_json(pts: PointSet) -> dict:
    return {
        "dim": pts.dim,
        "points": [[cx(c) for c in row] for row in pts.coords],
        "base_index": pts.base_index,
    }


def points_from_json(obj) -> PointSet:
    dim = int(obj["dim"])
    rows = [[uncx(c) for c in row] for row in obj["points"]]
    for i, row in enumerate(rows):
        if len(row) != dim:
            raise ValueError(f"point {i} has {len(row)} coordinates, expected {dim}")
    coords = np.array(rows, dtype=np.complex128).reshape(len(rows), dim)
    return PointSet(coords, obj.get("base_index"))


def coeff_to_json(f: CoeffFunction) -> dict:
    return {"vars": f.vars, "terms": [{"idx": list(k), **cx(c)} for k, c in f.coeffs.items()]}


def _terms(items):
    return [(tuple(t["idx"]), uncx(t)) for t in items]


def coeff_from_json(obj) -> CoeffFunction:
    return CoeffFunction(int(obj["vars"]), _terms(obj["terms"]))


def functional_to_json(L: CoeffFunctional) -> dict:
    return {
        "vars": L.vars,
        "weights": [{"idx": list(k), **cx(c)} for k, c in L.weights.items()],
        "max_degree": L.max_degree,
    }


def functional_from_json(obj) -> CoeffFunctional:
    return CoeffFunctional(int(obj["vars"]), _terms(obj["weights"]), obj.get("max_degree"))


def values_from_json(obj) -> list:
    """A list of complex numbers, bare or under a ``"values"`` key."""
    if isinstance(obj, dict):
        obj = obj["values"]
    return [uncx(v) for v in obj]


def finding_to_json(finding) -> dict:
    comp = finding.companion
    return {
        "kind": finding.kind,
        "witness_f": coeff_to_json(finding.witness_f) if finding.witness_f is not None else None,
        "witness_g": coeff_to_json(finding.witness_g) if finding.witness_g is not None else None,
        "defect": finding.defect,
        "trials": finding.trials,
        "seed": finding.seed,
        "max_degree": finding.max_degree,
        "lambda_one": cx(finding.lambda_one),
        "unit_hypothesis": finding.unit_hypothesis,
        "max_defect": finding.max_defect,
        "companion": None if comp is None else {
            "f": coeff_to_json(comp["f"]),
            "g": coeff_to_json(comp["g"]),
            "defect": comp["defect"],
        },
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"
