"""
JSON input and canonical JSON output for the command-line front end.

Objects are nested arrays of real coordinates, either bare or tagged:

    [0.5, 0.5]                                  a state
    {"state": [...]}
    {"measurement": [[...], [...]]}
    {"channel": [[...], ...], "model_out": {...}}
    {"ensemble": {"probs": [...], "states": [[...], ...]}}
    {"channels": {"probs": [...], "matrices": [[[...]]]}}

Reports are written with sorted keys and floats rounded to 12 significant
digits, printed in shortest round-trip form; infinities become "inf".
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from src.core.types import ContractViolation, ModelError
from src.gpt.model import GptModel, model_from_json
from src.gpt.objects import Channel, Measurement, State, StateEnsemble

SIGNIFICANT_DIGITS = 12


def load_json(path: Union[str, Path]) -> Any:
    """
    Read and decode a JSON file.

    Raises:
        ModelError: Missing file or malformed JSON, with line and column
    """
    source = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelError(f"cannot read file: {exc.strerror or exc}", source) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(exc.msg, source, exc.lineno, exc.colno) from exc


def _located(source: str, exc: ContractViolation) -> ModelError:
    if isinstance(exc, ModelError) and exc.source is not None:
        return exc
    return ModelError(str(exc), source)


def load_model(path: Union[str, Path]) -> GptModel:
    try:
        return model_from_json(load_json(path))
    except ContractViolation as exc:
        raise _located(str(path), exc) from exc


def canonical(value: Any) -> Any:
    """Plain JSON data with floats rounded to 12 significant digits."""
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, np.ndarray):
        return canonical(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        x = float(f"{x:.{SIGNIFICANT_DIGITS}g}")
        return 0.0 if x == 0.0 else x
    return value


def dumps(report: Any) -> str:
    """Canonical JSON text of a report."""
    return json.dumps(canonical(report), sort_keys=True, indent=2) + "\n"


def write_json(path: Union[str, Path], report: Any) -> None:
    Path(path).write_text(dumps(report), encoding="utf-8")


def _untag(data: Any, key: str) -> Any:
    if isinstance(data, dict):
        if key not in data:
            raise ModelError(f"object file has no {key!r} entry (found {sorted(data)})")
        return data[key]
    return data


def object_kind(data: Any) -> str:
    """Tag of an object description; bare matrices are "matrix" and read by the caller."""
    if isinstance(data, dict):
        for key in ("state", "measurement", "channel", "ensemble", "channels"):
            if key in data:
                return key
        raise ModelError(f"unrecognized object description with keys {sorted(data)}")
    if not isinstance(data, list) or not data:
        raise ModelError("an object is a nonempty array or a tagged object")
    return "matrix" if isinstance(data[0], list) else "state"


def parse_state(model: GptModel, data: Any, tol: float = 1e-9) -> np.ndarray:
    return State(model, _untag(data, "state"), tol).vector


def parse_measurement(model: GptModel, data: Any, tol: float = 1e-9) -> Measurement:
    return Measurement(model, _untag(data, "measurement"), tol)


def parse_channel(model: GptModel, data: Any, tol: float = 1e-9) -> Channel:
    """A channel from model to itself, or to the "model_out" of the description."""
    model_out = model
    if isinstance(data, dict) and "model_out" in data:
        model_out = model_from_json(data["model_out"])
    return Channel(model, model_out, np.asarray(_untag(data, "channel"), dtype=float), tol)


def parse_ensemble(model: GptModel, data: Any, tol: float = 1e-9) -> StateEnsemble:
    body = _untag(data, "ensemble")
    if not isinstance(body, dict):
        raise ModelError("an ensemble is an object with probs and states")
    try:
        states = body["states"]
        probs = body.get("probs") or [1.0 / len(states)] * len(states)
        return StateEnsemble(model, probs, states, tol)
    except KeyError as exc:
        raise ModelError(f"ensemble is missing field {exc}") from exc


def parse_channel_ensemble(model: GptModel, data: Any, tol: float = 1e-9) -> Tuple[List[float], List[Channel]]:
    body = _untag(data, "channels")
    if not isinstance(body, dict) or "matrices" not in body:
        raise ModelError("a channel ensemble is an object with probs and matrices")
    matrices = body["matrices"]
    probs = body.get("probs") or [1.0 / len(matrices)] * len(matrices)
    return [float(p) for p in probs], [Channel(model, model, np.asarray(m, dtype=float), tol) for m in matrices]


def load_object(path: Union[str, Path], parser, *args) -> Any:
    """Apply a parser to a JSON file, attaching the file name to any error."""
    data = load_json(path)
    try:
        return parser(*args, data)
    except ContractViolation as exc:
        raise _located(str(path), exc) from exc


def write_csv(path: Union[str, Path], rows: List[Dict[str, Any]], columns: Optional[List[str]] = None) -> None:
    """Rows of a sweep as CSV, numbers in the same 12-digit form as the JSON reports."""
    columns = columns or (list(rows[0].keys()) if rows else [])
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([canonical(row.get(c)) for c in columns])


def parse_measurement_list(model: GptModel, data: Any, tol: float = 1e-9) -> List[Measurement]:
    """{"measurements": [...]} or a bare list of effect lists."""
    body = data.get("measurements") if isinstance(data, dict) else data
    if not isinstance(body, list) or not body:
        raise ModelError("a measurement list is a nonempty array of measurements")
    return [parse_measurement(model, m, tol) for m in body]
