"""JSON scenario files: schema validation and (de)serialization.

Complex numbers are encoded as a plain number (real) or a two-element
list [re, im]. Kets are lists of complex entries; operators are lists of
rows. Validation errors carry a path into the document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .observables import IndexFunction, SpectralForm, make_spectral_form
from .qlin import BipartiteDims
from .scheme import MeasurementScheme, make_scheme

KINDS = ("verify-general", "verify-nd", "classify", "overmeasure",
         "distant", "ready-subspace")


class ScenarioError(ValueError):
    """Schema violation; message starts with the path into the document."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _complex_from_json(value, path: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ScenarioError(path, "expected a number or [re, im] pair")


def _complex_to_json(z: complex):
    if z.imag == 0.0:
        return z.real
    return [z.real, z.imag]


def ket_from_json(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ScenarioError(path, "expected a non-empty list of amplitudes")
    return np.array([_complex_from_json(v, f"{path}[{i}]")
                     for i, v in enumerate(value)], dtype=complex)


def ket_to_json(ket: np.ndarray) -> list:
    return [_complex_to_json(complex(z)) for z in ket]


def op_from_json(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ScenarioError(path, "expected a non-empty list of rows")
    rows = [ket_from_json(row, f"{path}[{i}]") for i, row in enumerate(value)]
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ScenarioError(path, "rows have unequal lengths")
    return np.array(rows, dtype=complex)


def op_to_json(op: np.ndarray) -> list:
    return [ket_to_json(row) for row in op]


def _require(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise ScenarioError(path, "expected an object")
    if key not in obj:
        raise ScenarioError(f"{path}.{key}", "missing required field")
    return obj[key]


def spectral_from_json(value, path: str) -> SpectralForm:
    values = _require(value, "eigenvalues", path)
    projs = _require(value, "projectors", path)
    if not isinstance(values, list) or not all(isinstance(v, (int, float)) for v in values):
        raise ScenarioError(f"{path}.eigenvalues", "expected a list of real numbers")
    if not isinstance(projs, list):
        raise ScenarioError(f"{path}.projectors", "expected a list of operators")
    ops = tuple(op_from_json(p, f"{path}.projectors[{i}]") for i, p in enumerate(projs))
    try:
        return make_spectral_form(tuple(float(v) for v in values), ops)
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from exc


def spectral_to_json(sf: SpectralForm) -> dict:
    return {"eigenvalues": list(sf.eigenvalues),
            "projectors": [op_to_json(p) for p in sf.projectors]}


def scheme_from_json(value, path: str) -> MeasurementScheme:
    dims = _require(value, "dims", path)
    dim_a = _require(dims, "A", f"{path}.dims")
    dim_b = _require(dims, "B", f"{path}.dims")
    if not isinstance(dim_a, int) or not isinstance(dim_b, int):
        raise ScenarioError(f"{path}.dims", "dimensions must be integers")
    ready = ket_from_json(_require(value, "ready", path), f"{path}.ready")
    pointer = spectral_from_json(_require(value, "pointer", path), f"{path}.pointer")
    interaction = op_from_json(_require(value, "interaction", path), f"{path}.interaction")
    try:
        return make_scheme(BipartiteDims(dim_a, dim_b), ready, pointer, interaction)
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from exc


def scheme_to_json(s: MeasurementScheme) -> dict:
    return {"dims": {"A": s.dims.dimA, "B": s.dims.dimB},
            "ready": ket_to_json(s.ready_state),
            "pointer": spectral_to_json(s.pointer),
            "interaction": op_to_json(s.interaction)}


def index_function_from_json(value, path: str) -> IndexFunction:
    mapping = _require(value, "mapping", path)
    targets = _require(value, "target_values", path)
    if not isinstance(mapping, list) or not all(isinstance(m, int) for m in mapping):
        raise ScenarioError(f"{path}.mapping", "expected a list of integers")
    if not isinstance(targets, list) or not all(isinstance(t, (int, float)) for t in targets):
        raise ScenarioError(f"{path}.target_values", "expected a list of real numbers")
    try:
        return IndexFunction(tuple(mapping), tuple(float(t) for t in targets))
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from exc


@dataclass(frozen=True)
class Scenario:
    kind: str
    payload: dict
    seed: int


def scenario_from_dict(doc, path: str = "$") -> Scenario:
    kind = _require(doc, "kind", path)
    if kind not in KINDS:
        raise ScenarioError(f"{path}.kind", f"unknown kind {kind!r}; expected one of {KINDS}")
    payload = _require(doc, "payload", path)
    if not isinstance(payload, dict):
        raise ScenarioError(f"{path}.payload", "expected an object")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ScenarioError(f"{path}.seed", "expected an integer")
    return Scenario(kind, payload, seed)


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError("$", f"not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)
