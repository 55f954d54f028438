"""
Real orthonormal basis of the Hermitian d x d matrices.

Basis order: E_ii for i = 0..d-1, then (E_ij + E_ji)/sqrt(2) for i < j, then
i(E_ij - E_ji)/sqrt(2) for i < j. In these d^2 real coordinates the
Hilbert-Schmidt inner product of two Hermitian matrices is the dot product.
Real symmetric matrices are the Hermitian matrices whose antisymmetric
coordinates vanish.
"""

from functools import lru_cache
from typing import Callable

import numpy as np


@lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """
    Return the basis as a read-only complex array of shape (d*d, d, d).

    Args:
        d: Matrix size

    Returns:
        Stacked basis matrices in the module's fixed order
    """
    basis = np.zeros((d * d, d, d), dtype=complex)
    k = 0
    for i in range(d):
        basis[k, i, i] = 1.0
        k += 1
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            basis[k, i, j] = inv_sqrt2
            basis[k, j, i] = inv_sqrt2
            k += 1
    for i in range(d):
        for j in range(i + 1, d):
            basis[k, i, j] = 1j * inv_sqrt2
            basis[k, j, i] = -1j * inv_sqrt2
            k += 1
    basis.setflags(write=False)
    return basis


def matrix_size(n: int) -> int:
    """Matrix size d for a coordinate dimension n = d^2."""
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise ValueError(f"{n} is not a perfect square")
    return d


def coordinates(m: np.ndarray) -> np.ndarray:
    """
    Complex coordinates tr(B_k m) of an arbitrary square matrix.

    For Hermitian m the result is real; for general m these are the
    coefficients of its complex-linear expansion in the Hermitian basis.
    """
    m = np.asarray(m)
    basis = hermitian_basis(m.shape[0])
    return np.einsum("kij,ji->k", basis, m)


def herm_to_vec(h: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix."""
    return np.real(coordinates(h))


def vec_to_herm(v: np.ndarray) -> np.ndarray:
    """
    Matrix with the given coordinates.

    Real coordinates give a Hermitian matrix; complex coordinates give the
    complex-linear combination of basis matrices.
    """
    v = np.asarray(v)
    basis = hermitian_basis(matrix_size(v.shape[0]))
    return np.einsum("k,kij->ij", v, basis)


def linear_map_matrix(fn: Callable[[np.ndarray], np.ndarray], d_in: int, d_out: int) -> np.ndarray:
    """
    Real matrix of a Hermiticity-preserving linear map in Hermitian coordinates.

    Args:
        fn: Map from d_in x d_in matrices to d_out x d_out matrices
        d_in: Input matrix size
        d_out: Output matrix size

    Returns:
        Array of shape (d_out^2, d_in^2)
    """
    basis = hermitian_basis(d_in)
    cols = [herm_to_vec(fn(b)) for b in basis]
    out = np.array(cols).T
    return out.reshape(d_out * d_out, d_in * d_in)
