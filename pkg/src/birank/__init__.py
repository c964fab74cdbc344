"""Rank-2 biscaled wavelets: Haar families, Meyer-type profiles, transforms."""

from .filters import (
    check_unitarity,
    commuting_lattice_residual,
    complete_constant,
    complete_pointwise,
    coset_matrix,
    detail_filters_dyadic,
    intertwine_residual,
    tensor_filters,
    translation_matrix,
)
from .latin import HaarFamily, haar_family, latin_square_family, verify_family
from .lattice import DigitSet, DilationPair, FreqGrid, coset_index, digits_for
from .meyer import MeyerCornerSpec, build_profile, solve_corner_values, synthesize_wavelet, verify_bmra
from .separability import check_intertwining, fuzz_intertwining, is_univariate, nonseparability_score, separability_certificate
from .transform import BiscaledHaarTransform, SubbandTree, analyze, synthesize
from .trigpoly import TrigPoly2

__version__ = "0.1.0"

__all__ = [
    "BiscaledHaarTransform",
    "DigitSet",
    "DilationPair",
    "FreqGrid",
    "HaarFamily",
    "MeyerCornerSpec",
    "SubbandTree",
    "TrigPoly2",
    "analyze",
    "build_profile",
    "check_intertwining",
    "check_unitarity",
    "commuting_lattice_residual",
    "complete_constant",
    "complete_pointwise",
    "coset_index",
    "coset_matrix",
    "detail_filters_dyadic",
    "digits_for",
    "fuzz_intertwining",
    "haar_family",
    "intertwine_residual",
    "is_univariate",
    "latin_square_family",
    "nonseparability_score",
    "separability_certificate",
    "solve_corner_values",
    "synthesize",
    "synthesize_wavelet",
    "tensor_filters",
    "translation_matrix",
    "verify_bmra",
    "verify_family",
]
