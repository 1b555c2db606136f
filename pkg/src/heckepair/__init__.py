"""Exact arithmetic for a semidirect-product Hecke pair over the rationals.

Modules: exact_core (integer/rational 2x2 normal forms), lattice (rank-2
lattices in Q^2), coset (double cosets and the modular function), hecke
(convolution algebra), spectral (truncated operator models), kms
(equilibrium states and partition functions), cli (command-line driver).
"""

from .exact_core import IMat2, ModMat, QMat2, hnf, padic_snf, snf
from .coset import DoubleCoset, SemidirectElement, semidirect_delta
from .hecke import HeckeElement, convolve, hecke_class, u_class, v_class
from .kms import Beta, kms_residual, partition_global, partition_prime, sigma1
from .lattice import ZSQUARED, Lattice, superlattices
from .spectral import AdelicPoint, SparseOperator, TruncationWindow

__all__ = [
    "AdelicPoint",
    "Beta",
    "DoubleCoset",
    "HeckeElement",
    "IMat2",
    "Lattice",
    "ModMat",
    "QMat2",
    "SemidirectElement",
    "SparseOperator",
    "TruncationWindow",
    "ZSQUARED",
    "convolve",
    "hecke_class",
    "hnf",
    "kms_residual",
    "padic_snf",
    "partition_global",
    "partition_prime",
    "semidirect_delta",
    "sigma1",
    "snf",
    "superlattices",
    "u_class",
    "v_class",
]

__version__ = "0.1.0"
