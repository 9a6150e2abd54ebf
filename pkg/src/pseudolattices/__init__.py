"""Exact pseudolattice computations: mutations, surface-like structure, spherical homs,
quasi del Pezzo classification and genus-one Lefschetz fibrations."""

from .errors import PseudolatticeError
from .lattice import E, Pseudolattice, apply_moves, mutate_basis
from .lefschetz import classify_lg, hurwitz, total_monodromy
from .linalg import Matrix
from .qdp import QdpInstance, check_qdp, classify
from .spherical import Hom, glue, right_adjoint, twist, z_of
from .surface import neron_severi, surface_data

__all__ = [
    "E",
    "Hom",
    "Matrix",
    "Pseudolattice",
    "PseudolatticeError",
    "QdpInstance",
    "apply_moves",
    "check_qdp",
    "classify",
    "classify_lg",
    "glue",
    "hurwitz",
    "mutate_basis",
    "neron_severi",
    "right_adjoint",
    "surface_data",
    "total_monodromy",
    "twist",
    "z_of",
]

__version__ = "0.1.0"
