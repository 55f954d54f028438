"""
Channel constructions: Choi matrices, measure-and-prepare maps, dual maps,
quantum helpers and seeded random objects.

Choi convention: J = sum_ij E_ij (x) L(E_ij), input factor first, so
J has trace d_in for a trace-preserving L, Tr_out J = I_in for such L and
L(rho) = Tr_in[(rho^T (x) I) J].
"""

from typing import Optional, Sequence

import numpy as np
from scipy.linalg import sqrtm, qr

from src.core.types import ContractViolation, UnsupportedOperation
from src.cones.hermitian import coordinates, herm_to_vec, vec_to_herm, linear_map_matrix
from src.cones.orthant import OrthantCone
from src.cones.generated import GeneratedCone
from .model import GptModel, classical_model
from .objects import Channel, Measurement, ensure_measurement, vectors_of

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


def _require_quantum(*models: GptModel) -> None:
    for m in models:
        if not m.is_quantum:
            raise UnsupportedOperation(f"operation needs quantum models, got {m!r}")


def apply_complex(matrix: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Complex-linear extension of a coordinate map to an arbitrary square matrix."""
    return vec_to_herm(matrix @ coordinates(m))


def choi_of_matrix(matrix: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Choi coordinates of a coordinate map between d_in and d_out matrices."""
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for a in range(d_in):
        for b in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[a, b] = 1.0
            j += np.kron(e, apply_complex(matrix, e))
    return herm_to_vec(j)


def choi(channel: Channel) -> np.ndarray:
    """
    Choi matrix J = (id (x) L)(|Phi~><Phi~|) in Hermitian coordinates of size
    d_in * d_out.

    Raises:
        UnsupportedOperation: If either model is not quantum
    """
    _require_quantum(channel.model_in, channel.model_out)
    return choi_of_matrix(channel.matrix, channel.model_in.size, channel.model_out.size)


def matrix_from_choi(j: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Coordinate matrix of the map with Choi coordinates j."""
    j4 = vec_to_herm(np.asarray(j, dtype=float)).reshape(d_in, d_out, d_in, d_out)
    return linear_map_matrix(lambda rho: np.einsum("ab,aibj->ij", rho, j4), d_in, d_out)


def channel_from_choi(
    j: np.ndarray,
    model_in: GptModel,
    model_out: GptModel,
    validate: bool = True,
    tol: float = 1e-9
) -> Channel:
    """
    Channel with Choi coordinates j.

    Raises:
        UnsupportedOperation: For non-quantum models
        ContractViolation: If validation fails
    """
    _require_quantum(model_in, model_out)
    return Channel(model_in, model_out, matrix_from_choi(j, model_in.size, model_out.size), tol, validate)


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    """
    Partial trace of a bipartite matrix.

    Args:
        m: Matrix of size d0*d1
        dims: (d0, d1)
        keep: Subsystem kept (0 or 1)
    """
    d0, d1 = dims
    m4 = np.asarray(m).reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("aibi->ab", m4)
    if keep == 1:
        return np.einsum("iaib->ab", m4)
    raise ContractViolation("keep must be 0 or 1")


def partial_trace_out(j: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Tr_out of a Choi coordinate vector, as a d_in x d_in matrix."""
    return partial_trace(vec_to_herm(j), (d_in, d_out), keep=0)


def partial_trace_in(j: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Tr_in of a Choi coordinate vector, as a d_out x d_out matrix."""
    return partial_trace(vec_to_herm(j), (d_in, d_out), keep=1)


def partial_transpose(m: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Transpose of the second tensor factor."""
    d0, d1 = dims
    return np.asarray(m).reshape(d0, d1, d0, d1).transpose(0, 3, 2, 1).reshape(d0 * d1, d0 * d1)


def ket_state(model: GptModel, ket: Sequence[complex]) -> np.ndarray:
    """Coordinates of |v><v| / <v|v>."""
    _require_quantum(model)
    v = np.asarray(ket, dtype=complex)
    if v.shape != (model.size,):
        raise ContractViolation(f"ket has shape {v.shape}, expected ({model.size},)")
    v = v / np.linalg.norm(v)
    return herm_to_vec(np.outer(v, v.conj()))


def bloch_state(model: GptModel, r: Sequence[float]) -> np.ndarray:
    """Qubit state (I + r . sigma) / 2; |r| > 1 gives a non-positive matrix."""
    _require_quantum(model)
    if model.size != 2:
        raise ContractViolation("Bloch vectors describe qubit states only")
    rx, ry, rz = r
    return herm_to_vec((np.eye(2) + rx * PAULI_X + ry * PAULI_Y + rz * PAULI_Z) / 2.0)


def max_entangled_state(d: int) -> np.ndarray:
    """|Phi+><Phi+| on C^d (x) C^d, in quantum_model(d*d) coordinates."""
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    return herm_to_vec(np.outer(phi, phi))


def tensor_states(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coordinates of A (x) B."""
    return herm_to_vec(np.kron(vec_to_herm(a), vec_to_herm(b)))


def apply_id_tensor(channel: Channel, rho_ab: np.ndarray, d_a: int) -> np.ndarray:
    """
    (id_A (x) L)(rho_AB), in quantum_model(d_a * d_out) coordinates.
    """
    _require_quantum(channel.model_in, channel.model_out)
    d_in, d_out = channel.model_in.size, channel.model_out.size
    r4 = vec_to_herm(rho_ab).reshape(d_a, d_in, d_a, d_in)
    out = np.zeros((d_a, d_out, d_a, d_out), dtype=complex)
    for a in range(d_a):
        for b in range(d_a):
            out[a, :, b, :] = apply_complex(channel.matrix, r4[a, :, b, :])
    return herm_to_vec(out.reshape(d_a * d_out, d_a * d_out))


def unitary_channel(model: GptModel, u: np.ndarray) -> Channel:
    """rho -> U rho U^dagger."""
    _require_quantum(model)
    u = np.asarray(u, dtype=complex)
    if not np.allclose(u @ u.conj().T, np.eye(model.size), atol=1e-10):
        raise ContractViolation("matrix is not unitary")
    d = model.size
    return Channel(model, model, linear_map_matrix(lambda r: u @ r @ u.conj().T, d, d))


def depolarizing_channel(model: GptModel, p: float) -> Channel:
    """rho -> (1 - p) rho + p tr(rho) I / d."""
    _require_quantum(model)
    d = model.size
    return Channel(model, model, linear_map_matrix(
        lambda r: (1 - p) * r + p * np.trace(r) * np.eye(d) / d, d, d))


def transpose_map(model: GptModel) -> Channel:
    """Matrix transposition; positive and trace preserving but not completely positive."""
    _require_quantum(model)
    d = model.size
    return Channel(model, model, linear_map_matrix(lambda r: r.T, d, d), validate=False)


def replacer_channel(model_in: GptModel, model_out: GptModel, sigma) -> Channel:
    """x -> <U, x> sigma."""
    s = model_out.check(sigma, "state")
    return Channel(model_in, model_out, np.outer(s, model_in.unit_effect))


def measure_and_prepare(
    measurement,
    prepared: Sequence,
    model_out: Optional[GptModel] = None,
    model_in: Optional[GptModel] = None
) -> Channel:
    """
    L(x) = sum_i <M_i, x> w'_i.

    Args:
        measurement: Measurement (or effect list together with model_in)
        prepared: One output state per outcome
        model_out: Output model (defaults to the prepared states' model)
        model_in: Input model, needed when measurement is a raw effect list

    Raises:
        ContractViolation: On a length mismatch
    """
    if not isinstance(measurement, Measurement):
        if model_in is None:
            raise ContractViolation("model_in is required for raw effect lists")
        measurement = ensure_measurement(model_in, measurement)
    if model_out is None:
        model_out = getattr(prepared[0], "model", None)
        if model_out is None:
            raise ContractViolation("model_out is required for raw prepared vectors")
    states = vectors_of(prepared)
    if len(states) != measurement.n_outcomes:
        raise ContractViolation(
            f"{measurement.n_outcomes} outcomes but {len(states)} prepared states"
        )
    matrix = sum(np.outer(model_out.check(w), m) for w, m in zip(states, measurement.effects))
    return Channel(measurement.model, model_out, matrix)


def measurement_channel(measurement: Measurement) -> Channel:
    """L_M(x) = sum_j <M_j, x> |j><j| into the classical model with one level per outcome."""
    n = max(2, measurement.n_outcomes)
    out = classical_model(n)
    effects = list(measurement.effects) + [np.zeros(measurement.model.dim)] * (n - measurement.n_outcomes)
    padded = Measurement(measurement.model, effects)
    return measure_and_prepare(padded, [np.eye(n)[j] for j in range(n)], out)


def dual_map(channel: Channel) -> np.ndarray:
    """
    Matrix of the dual map on effects: <E, L x> = <L* E, x>.

    In the self-dual coordinates this is the transpose.
    """
    return channel.matrix.T.copy()


def classical_post_processing(measurement: Measurement, stochastic: np.ndarray) -> Measurement:
    """
    Coarse-grained measurement M'_b = sum_a p(b|a) M_a.

    Args:
        measurement: Measurement with n outcomes
        stochastic: Column-stochastic array of shape (n_out, n)
    """
    p = np.asarray(stochastic, dtype=float)
    if p.ndim != 2 or p.shape[1] != measurement.n_outcomes:
        raise ContractViolation(f"post-processing has shape {p.shape}, expected (*, {measurement.n_outcomes})")
    if np.min(p) < -1e-12 or not np.allclose(p.sum(axis=0), 1.0, atol=1e-12):
        raise ContractViolation("post-processing matrix must be column stochastic")
    effects = p @ measurement.matrix()
    return Measurement(measurement.model, list(effects))


# Random objects


def random_density_matrix(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.real(np.trace(rho))


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2.0


def random_state(model: GptModel, rng: np.random.Generator) -> np.ndarray:
    """A random normalized state of any supported model."""
    cone = model.state_cone
    if model.is_quantum:
        return herm_to_vec(random_density_matrix(model.size, rng))
    if isinstance(cone, (OrthantCone, GeneratedCone)):
        verts = np.array(model.extreme_states())
        return rng.dirichlet(np.ones(len(verts))) @ verts
    x = herm_to_vec(random_density_matrix(cone.d, rng))
    return x / model.normalization(x)


def random_measurement(model: GptModel, n_outcomes: int, rng: np.random.Generator) -> Measurement:
    """
    A random measurement: random POVM (PSD cones), random partition of the
    unit effect per coordinate (orthant), random coarse trivial measurement
    (generated cones).
    """
    cone = model.state_cone
    if model.is_quantum:
        d = model.size
        parts = [random_density_matrix(d, rng) * rng.uniform(0.1, 1.0) for _ in range(n_outcomes)]
        s = sum(parts)
        s_inv = np.linalg.inv(sqrtm(s))
        effects = [herm_to_vec(s_inv @ a @ s_inv.conj().T) for a in parts]
        return Measurement.repair(model, effects, tol=1e-8)
    if isinstance(cone, OrthantCone):
        p = rng.dirichlet(np.ones(n_outcomes), size=model.dim).T
        return Measurement.repair(model, [row * model.unit_effect for row in p], tol=1e-9)
    w = rng.dirichlet(np.ones(n_outcomes))
    return Measurement.repair(model, [wi * model.unit_effect for wi in w], tol=1e-9)


def random_effect(model: GptModel, rng: np.random.Generator) -> np.ndarray:
    return random_measurement(model, 2, rng).effects[0]


def random_channel(model_in: GptModel, model_out: GptModel, rng: np.random.Generator, kraus: int = 2) -> Channel:
    """
    A random channel: Stinespring isometry (quantum to quantum), random
    column-stochastic matrix (classical to classical), random
    measure-and-prepare otherwise.
    """
    if model_in.is_quantum and model_out.is_quantum:
        d_in, d_out = model_in.size, model_out.size
        g = rng.standard_normal((d_out * kraus, d_in)) + 1j * rng.standard_normal((d_out * kraus, d_in))
        v, _ = qr(g, mode="economic")
        ks = [v[i * d_out:(i + 1) * d_out, :] for i in range(kraus)]
        matrix = linear_map_matrix(lambda r: sum(k @ r @ k.conj().T for k in ks), d_in, d_out)
        return Channel(model_in, model_out, matrix, tol=1e-8)
    if model_in.is_classical and model_out.is_classical:
        t = rng.dirichlet(np.ones(model_out.dim), size=model_in.dim).T
        return Channel(model_in, model_out, t)
    n = max(2, model_out.dim)
    meas = random_measurement(model_in, n, rng)
    prepared = [random_state(model_out, rng) for _ in range(n)]
    return measure_and_prepare(meas, prepared, model_out)

