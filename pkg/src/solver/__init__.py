"""
Solver module: conic program types, the ADMM engine, explicit duals,
certificates and the program builder used by every measure.
"""

from .program import (
    SolveStatus,
    SolverSettings,
    ConicProgram,
    Solution,
    Certificate,
    CertificateFailure
)
from .engine import ConicSolver, solve
from .duality import dual_of
from .certify import certify, slater_check
from .builder import ProgramBuilder, Variable, BuiltSolution

__all__ = [
    'SolveStatus',
    'SolverSettings',
    'ConicProgram',
    'Solution',
    'Certificate',
    'CertificateFailure',
    'ConicSolver',
    'solve',
    'dual_of',
    'certify',
    'slater_check',
    'ProgramBuilder',
    'Variable',
    'BuiltSolution'
]
