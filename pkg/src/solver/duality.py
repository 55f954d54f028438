"""
Explicit Lagrangian dual of a conic program.

For the primal

    minimize <c, x> + offset  s.t.  A x = b,  x in R^f x K_1 x ... x K_p

the dual is maximize <b, z> + offset s.t. c - A^T z in {0}^f x K_1* x ... x K_p*.
``dual_of`` writes it back in standard form (minimize the negated objective),
so the returned program's optimum is the negative of the dual optimum.
"""

from typing import List

import numpy as np

from src.core.types import AbstractCone
from src.cones.generated import GeneratedCone
from src.cones.orthant import OrthantCone
from src.cones.product import ProductCone
from .program import ConicProgram


def dual_of(program: ConicProgram) -> ConicProgram:
    """
    Build the dual of a program in standard form.

    Variables of the returned program, in order: z (free, one per primal row),
    q_b (free, one block per generated factor), then Q_b in K_b for every
    orthant or PSD factor and w_b >= 0 for every generated factor.

    Rows:
        A_f^T z = c_f                       (free primal block)
        A_b^T z + Q_b = c_b                 (self-dual factors)
        A_b^T z + q_b = c_b,  G_b^T q_b - w_b = 0   (generated factors)

    Args:
        program: Primal program

    Returns:
        The dual, as a minimization of -<b, z> - offset
    """
    a = program.constraint_matrix
    m = program.n_constraints
    cone = program.cone
    blocks = cone.blocks()

    generated = [(s, t, f) for (s, t, f) in blocks if isinstance(f, GeneratedCone)]
    n_free = m + sum(t - s for (s, t, _) in generated)

    factors: List[AbstractCone] = []
    names: List[str] = []
    for (s, t, f), name in zip(blocks, cone.names):
        if not isinstance(f, GeneratedCone):
            factors.append(f)
            names.append(f"dual {name}")
    for (s, t, f), name in zip(blocks, cone.names):
        if isinstance(f, GeneratedCone):
            factors.append(OrthantCone(f.n_generators))
            names.append(f"dual {name} generator pairings")
    dual_cone = ProductCone(n_free, factors, names)
    n = dual_cone.ambient_dim

    rows: List[np.ndarray] = []
    rhs: List[float] = []
    labels: List[str] = []

    def new_row() -> np.ndarray:
        return np.zeros(n)

    # Stationarity rows, one per primal variable
    free_pos = m
    factor_pos = n_free
    gen_slots = {}
    for (s, t, f) in generated:
        gen_slots[s] = free_pos
        free_pos += t - s
    q_slots = {}
    for (s, t, f) in blocks:
        if not isinstance(f, GeneratedCone):
            q_slots[s] = factor_pos
            factor_pos += t - s
    w_slots = {}
    for (s, t, f) in generated:
        w_slots[s] = factor_pos
        factor_pos += f.n_generators

    for j in range(cone.free_dim):
        row = new_row()
        row[:m] = a[:, j]
        rows.append(row)
        rhs.append(program.objective[j])
        labels.append(f"stationarity free[{j}]")
    for (s, t, f), name in zip(blocks, cone.names):
        slot = gen_slots.get(s, q_slots.get(s))
        for j in range(s, t):
            row = new_row()
            row[:m] = a[:, j]
            row[slot + j - s] = 1.0
            rows.append(row)
            rhs.append(program.objective[j])
            labels.append(f"stationarity {name}[{j - s}]")

    # Halfspace form of generated duals
    for (s, t, f), name in zip(blocks, cone.names):
        if not isinstance(f, GeneratedCone):
            continue
        g = f.generators
        for k in range(f.n_generators):
            row = new_row()
            row[gen_slots[s]:gen_slots[s] + t - s] = g[:, k]
            row[w_slots[s] + k] = -1.0
            rows.append(row)
            rhs.append(0.0)
            labels.append(f"dual {name} generator[{k}]")

    objective = np.zeros(n)
    objective[:m] = -program.rhs
    matrix = np.array(rows) if rows else np.zeros((0, n))
    return ConicProgram(
        objective=objective,
        constraint_matrix=matrix,
        rhs=np.array(rhs),
        cone=dual_cone,
        offset=-program.offset,
        row_labels=labels
    )
