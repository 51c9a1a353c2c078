"""JSON model files for decompositions.

Layout::

    {
      "format": "chainedbell.decomposition/1",
      "alpha": 0.7071067811865476,
      "alice_angles": [...],          # radians
      "bob_angles": [...],
      "weights": [mu_0, mu_1, ...],   # one number per atom, no setting index
      "boxes": [p_0, p_1, ...]        # p_z[a][b][x][y]
    }

Floats are written with ``repr``, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from .boxes import ATOL, BehaviorBox
from .chained import ScenarioSettings
from .decomposition import DecompositionModel
from .quantum import EntangledPairState

FORMAT_ID = "chainedbell.decomposition/1"

_prob = {"type": "number", "minimum": 0, "maximum": 1}
_pair = {"type": "array", "items": _prob, "minItems": 2, "maxItems": 2}
_angles = {"type": "array", "items": {"type": "number"}, "minItems": 2}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["format", "alpha", "alice_angles", "bob_angles", "weights", "boxes"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": FORMAT_ID},
        "alpha": {"type": "number", "minimum": 0, "maximum": 1},
        "alice_angles": _angles,
        "bob_angles": _angles,
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
        "boxes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": {"type": "array", "items": _pair, "minItems": 2, "maxItems": 2},
                },
            },
        },
    },
}


class ModelFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


def model_to_dict(model: DecompositionModel) -> dict:
    return {
        "format": FORMAT_ID,
        "alpha": model.state.alpha,
        "alice_angles": list(model.scenario.alice_angles),
        "bob_angles": list(model.scenario.bob_angles),
        "weights": [float(w) for w in model.weights],
        "boxes": [b.p.tolist() for b in model.boxes],
    }


def dumps_model(model: DecompositionModel) -> str:
    return json.dumps(model_to_dict(model), indent=1) + "\n"


def loads_model(text: str, atol: float = ATOL) -> DecompositionModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    try:
        jsonschema.validate(data, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ModelFormatError(f"schema error at {path}: {exc.message}") from None
    n_a, n_b = len(data["alice_angles"]), len(data["bob_angles"])
    if len(data["weights"]) != len(data["boxes"]):
        raise ModelFormatError("weights and boxes differ in length")
    for z, box in enumerate(data["boxes"]):
        if len(box) != n_a or any(len(row) != n_b for row in box):
            raise ModelFormatError(f"box {z} is not {n_a}x{n_b}")
    try:
        scenario = ScenarioSettings(tuple(data["alice_angles"]), tuple(data["bob_angles"]))
        boxes = tuple(BehaviorBox(np.array(b, dtype=float), atol=atol) for b in data["boxes"])
        return DecompositionModel(
            np.array(data["weights"], dtype=float), boxes, scenario, EntangledPairState(data["alpha"]), atol=atol
        )
    except ValueError as exc:
        raise ModelFormatError(f"schema error: {exc}") from None


def save_model(model: DecompositionModel, path) -> None:
    Path(path).write_text(dumps_model(model))


def load_model(path, atol: float = ATOL) -> DecompositionModel:
    return loads_model(Path(path).read_text(), atol=atol)
