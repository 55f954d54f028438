"""
Bundled example instances.

Each example is a small set of JSON files (model, free set, objects) plus
the command line that exercises it. The files are generated from the
library's own constructors, so they parse back to the same canonical form.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Union

import numpy as np

from src.core.types import ContractViolation
from src.cones.hermitian import herm_to_vec
from src.gpt.channels import HADAMARD, ket_state, replacer_channel, unitary_channel
from src.gpt.model import GptModel, classical_model, model_from_json, quantum_model
from src.gpt.objects import Channel, Measurement
from src.monotones.operations import doubly_stochastic, operations_from_json
from src.robustness.free_sets import (
    ReplacerChannels,
    diagonal_states,
    free_channels_from_json,
    free_effects_from_json,
    free_set_from_json,
    interval_set,
    trivial_effects,
    uniform_point
)
from .io import canonical, write_json

logger = logging.getLogger(__name__)


@dataclass
class Example:
    """
    A bundled instance.

    Attributes:
        name: Library key
        description: One-line summary with the expected outcome
        files: File name -> JSON data
        commands: Suggested invocations, file names relative to the export directory
    """
    name: str
    description: str
    files: Dict[str, Any]
    commands: List[List[str]] = field(default_factory=list)

    def export(self, directory: Union[str, Path]) -> List[Path]:
        """Write the files under directory/name and return their paths."""
        target = Path(directory) / self.name
        target.mkdir(parents=True, exist_ok=True)
        paths = []
        for file_name, data in sorted(self.files.items()):
            path = target / file_name
            write_json(path, data)
            paths.append(path)
        logger.info("exported example %s to %s", self.name, target)
        return paths

    def to_json(self) -> Dict[str, Any]:
        return {"name": self.name, "description": self.description,
                "files": sorted(self.files), "commands": [" ".join(c) for c in self.commands]}


def _model_file(model: GptModel) -> Dict[str, Any]:
    return {"model": model.to_json()}


def _classical_uniform() -> Example:
    model = classical_model(3)
    return Example(
        "classical-uniform",
        "three-level point mass against the uniform distribution: generalized robustness 2, ratio 3",
        {
            "model.json": _model_file(model),
            "free.json": uniform_point(model).to_json(),
            "object.json": {"state": [1.0, 0.0, 0.0]}
        },
        [["robustness", "--kind", "state", "--model", "model.json", "--free", "free.json", "--object", "object.json"],
         ["advantage", "--theorem", "1", "--model", "model.json", "--free", "free.json", "--object", "object.json"]]
    )


def _classical_interval() -> Example:
    model = classical_model(2)
    return Example(
        "classical-interval",
        "(1, 0) against q in [1/3, 2/3]: standard robustness 1, gain ratio 3; against the uniform point it diverges",
        {
            "model.json": _model_file(model),
            "free.json": interval_set(model, 1.0 / 3.0, 2.0 / 3.0).to_json(),
            "divergent.json": uniform_point(model).to_json(),
            "object.json": {"state": [1.0, 0.0]}
        },
        [["robustness", "--kind", "standard", "--model", "model.json", "--free", "free.json", "--object", "object.json"],
         ["robustness", "--kind", "standard", "--model", "model.json", "--free", "divergent.json",
          "--object", "object.json"],
         ["advantage", "--theorem", "7", "--model", "model.json", "--free", "free.json", "--object", "object.json"]]
    )


def _coherence(d: int) -> Example:
    model = quantum_model(d)
    plus = ket_state(model, np.ones(d) / np.sqrt(d))
    name = {2: "qubit", 3: "qutrit"}.get(d, f"d{d}")
    files = {
        "model.json": _model_file(model),
        "free.json": diagonal_states(model).to_json(),
        "object.json": {"state": plus.tolist()}
    }
    commands = [["robustness", "--kind", "state", "--model", "model.json", "--free", "free.json",
                 "--object", "object.json"],
                ["advantage", "--theorem", "1", "--model", "model.json", "--free", "free.json",
                 "--object", "object.json"]]
    if d == 2:
        files["hadamard.json"] = {"channel": unitary_channel(model, HADAMARD).matrix.tolist()}
        commands.append(["robustness", "--kind", "genpower", "--model", "model.json", "--free", "free.json",
                         "--object", "hadamard.json"])
    return Example(f"{name}-coherence",
                   f"maximally coherent {name} against incoherent states: robustness {d - 1}",
                   files, commands)


def _informativeness() -> Example:
    model = quantum_model(3)
    return Example(
        "trivial-effect-informativeness",
        "qutrit computational-basis measurement against trivial effects: robustness 2, gain log2(3)",
        {
            "model.json": _model_file(model),
            "free-effects.json": trivial_effects(model).to_json(),
            "measurement.json": {"measurement": Measurement.computational(model).matrix().tolist()}
        },
        [["robustness", "--kind", "measurement", "--model", "model.json", "--free", "free-effects.json",
          "--object", "measurement.json"],
         ["accinfo", "--model", "model.json", "--measurement", "measurement.json",
          "--free-effects", "free-effects.json"]]
    )


def _replacer_channels() -> Example:
    model = quantum_model(2)
    identity = Channel.identity(model)
    replacer = replacer_channel(model, model, herm_to_vec(np.eye(2) / 2.0))
    return Example(
        "replacer-channels",
        "qubit identity against replacer channels: robustness 3, ratio 4; ensemble with a replacer keeps 3",
        {
            "model.json": _model_file(model),
            "free.json": ReplacerChannels(model, model).to_json(),
            "object.json": {"channel": identity.matrix.tolist()},
            "ensemble.json": {"channels": {"probs": [0.5, 0.5],
                                           "matrices": [identity.matrix.tolist(), replacer.matrix.tolist()]}}
        },
        [["robustness", "--kind", "channel", "--model", "model.json", "--free", "free.json", "--object", "object.json"],
         ["advantage", "--theorem", "5", "--model", "model.json", "--free", "free.json", "--object", "object.json"],
         ["advantage", "--theorem", "6", "--model", "model.json", "--free", "free.json",
          "--object", "ensemble.json"]]
    )


def _doubly_stochastic() -> Example:
    ops = doubly_stochastic(2)
    return Example(
        "doubly-stochastic",
        "(0.9, 0.1) converts to (0.6, 0.4) under doubly stochastic maps; the reverse fails with margin 0.3",
        {
            "model.json": _model_file(ops.model_in),
            "ops.json": ops.to_json(),
            "sharp.json": {"state": [0.9, 0.1]},
            "flat.json": {"state": [0.6, 0.4]}
        },
        [["convert", "--model", "model.json", "--ops", "ops.json", "--from", "sharp.json", "--to", "flat.json"],
         ["convert", "--model", "model.json", "--ops", "ops.json", "--from", "flat.json", "--to", "sharp.json",
          "--witness", "witness.json"]]
    )


BUILDERS: Dict[str, Callable[[], Example]] = {
    "classical-uniform": _classical_uniform,
    "classical-interval": _classical_interval,
    "qubit-coherence": lambda: _coherence(2),
    "qutrit-coherence": lambda: _coherence(3),
    "trivial-effect-informativeness": _informativeness,
    "replacer-channels": _replacer_channels,
    "doubly-stochastic": _doubly_stochastic
}


def example_names() -> List[str]:
    return list(BUILDERS)


def get_example(name: str) -> Example:
    """
    Raises:
        ContractViolation: Unknown example name
    """
    if name not in BUILDERS:
        raise ContractViolation(f"unknown example {name!r}; available: {', '.join(BUILDERS)}")
    return BUILDERS[name]()


def all_examples() -> List[Example]:
    return [builder() for builder in BUILDERS.values()]


def export_library(directory: Union[str, Path]) -> List[Path]:
    """Write every bundled example below directory."""
    paths: List[Path] = []
    for example in all_examples():
        paths.extend(example.export(directory))
    return paths


def reparse(example: Example) -> Dict[str, Any]:
    """
    Parse every file of an example and serialize it again.

    Model, free-set and operation-set files are rebuilt from their parsed
    objects; object files are returned as read. Input is the canonical form
    written by export.
    """
    files = canonical(example.files)
    model = model_from_json(files["model.json"])
    out: Dict[str, Any] = {"model.json": _model_file(model)}
    for file_name, data in files.items():
        if file_name == "model.json":
            continue
        kind = data.get("kind") if isinstance(data, dict) else None
        if kind is None:
            out[file_name] = data
        elif file_name == "ops.json":
            out[file_name] = operations_from_json(data, model).to_json()
        elif kind in ("replacer", "choi", "incoherent"):
            out[file_name] = free_channels_from_json(model, model, data).to_json()
        elif file_name.startswith("free-effects"):
            out[file_name] = free_effects_from_json(model, data).to_json()
        else:
            out[file_name] = free_set_from_json(model, data).to_json()
    return out


def round_trips(example: Example) -> bool:
    """Whether parse -> serialize reproduces the canonical form of every file."""
    return canonical(reparse(example)) == canonical(example.files)
