"""bornlab: executable numerics for question lattices, transition
probabilities, Gleason density-matrix reconstruction, unitary dynamics,
and ancilla-derived POVMs, each with independent verification checks."""

from . import born, config, dynamics, gleason, lattice, linalg, povm, serialize
from .config import DEFAULT, Tolerances
from .gleason import GleasonDensityEstimator
from .linalg import (
    mat_exp_hermitian,
    partial_trace,
    tensor_product,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "born",
    "config",
    "dynamics",
    "gleason",
    "lattice",
    "linalg",
    "povm",
    "serialize",
    "DEFAULT",
    "Tolerances",
    "GleasonDensityEstimator",
    "tensor_product",
    "partial_trace",
    "mat_exp_hermitian",
    "validate",
]
