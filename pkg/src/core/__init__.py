"""
Core module containing the shared contracts, exceptions and tolerances.
"""

from .types import (
    DEFAULT_TOL,
    VALIDATION_TOL,
    SOLVER_OBJECT_TOL,
    ResourceForgeError,
    ContractViolation,
    ModelError,
    UnsupportedOperation,
    SolverFailure,
    InternalError,
    AbstractCone,
    as_vector,
    scaled_tol
)

__all__ = [
    'DEFAULT_TOL',
    'VALIDATION_TOL',
    'SOLVER_OBJECT_TOL',
    'ResourceForgeError',
    'ContractViolation',
    'ModelError',
    'UnsupportedOperation',
    'SolverFailure',
    'InternalError',
    'AbstractCone',
    'as_vector',
    'scaled_tol'
]
