"""
Result type shared by every robustness quantifier.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np

from src.solver.program import Certificate

Witness = Union[np.ndarray, List[np.ndarray], None]


def json_number(x: float) -> Union[float, str]:
    """Floats as-is, +inf as "inf"."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def json_witness(w: Any) -> Any:
    if w is None:
        return None
    if isinstance(w, np.ndarray):
        return w.tolist()
    if isinstance(w, (list, tuple)):
        return [json_witness(v) for v in w]
    if isinstance(w, dict):
        return {k: json_witness(v) for k, v in w.items()}
    if isinstance(w, (np.floating, np.integer)):
        return w.item()
    return w


@dataclass
class RobustnessResult:
    """
    Value and dual witness of a robustness computation.

    Attributes:
        kind: Which quantifier produced the result
        value: Robustness r >= 0, or math.inf
        witness: Dual optimal point (X, Y, X' or the tuple of {w_i} and eta)
        certificate: Re-verification of the underlying solve
        gap: Absolute primal-dual gap of the solve (0 for closed forms)
        infeasibility: Ray certifying divergence when value is infinite
        details: Extra report fields (argmax index, free state, net resolution, ...)
    """
    kind: str
    value: float
    witness: Witness = None
    certificate: Optional[Certificate] = None
    gap: float = 0.0
    infeasibility: Optional[np.ndarray] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return not math.isinf(self.value)

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "kind": self.kind,
            "value": json_number(self.value),
            "witness": json_witness(self.witness),
            "gap": json_number(self.gap),
            "certificate": self.certificate.to_json() if self.certificate is not None else None
        }
        if self.infeasibility is not None:
            out["infeasibility"] = json_witness(self.infeasibility)
        if self.details:
            out["details"] = json_witness(self.details)
        return out
