"""
Cones module: orthant, PSD and finitely generated cones plus the product
layout used by conic programs.
"""

from .hermitian import (
    hermitian_basis,
    herm_to_vec,
    vec_to_herm,
    coordinates,
    linear_map_matrix,
    matrix_size
)
from .orthant import OrthantCone
from .psd import PsdCone
from .generated import GeneratedCone
from .product import ProductCone
from .operations import member, dual_member, project, cone_to_json, cone_from_json

__all__ = [
    'hermitian_basis',
    'herm_to_vec',
    'vec_to_herm',
    'coordinates',
    'linear_map_matrix',
    'matrix_size',
    'OrthantCone',
    'PsdCone',
    'GeneratedCone',
    'ProductCone',
    'member',
    'dual_member',
    'project',
    'cone_to_json',
    'cone_from_json'
]
