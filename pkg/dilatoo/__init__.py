"""
dilatoo - Total and monotone dilations of matrices
==================================================

dilatoo builds dilations of finite matrices: a larger matrix whose diagonal
blocks (total dilations) or whose compressions onto a common subspace
(monotone dilations) reproduce the given operators, and which belongs to a
prescribed class such as normal, unitary or positive.

The package provides:
- Total dilations by normal, unitary, orthogonal and equal-diagonal matrices
- Halving of an arbitrary matrix into two copies of one operator
- Simultaneous monotone dilations of positive and hermitian families
- Independent checkers for every property a construction claims
- Seeded random ensembles, JSON matrix files and a command line tool
"""

from ._version import __version__

# Core types
from .core.errors import (
    DilationError, ConfigurationError, DimensionMismatch, PreconditionViolated,
    CommutationFailure, ConvergenceError, ContainmentError, VerificationFailed,
    MatrixFileError,
)
from .core.tolerance import TolerancePolicy
from .core.matrix import Operator, HermitianMatrix, UnitaryMatrix, Isometry
from .core.result import (
    Check, VerificationReport, MonotoneCertificate, MonotoneFailure,
    DilationResult, TotalDilationResult, TotalFamilyResult, HalvingResult,
    MonotoneFamilyResult, SuiteReport,
)

# Constructions (importing the package fills the registry)
from .constructions import (
    Construction, register, available_constructions, get_construction,
    ConditionSpec, Triangle,
    halving_total_dilation, normal_total_dilation, unitary_total_dilation,
    equal_diagonal_unitary, antisymmetric_canonical, circulant_family_dilation,
    orthogonal_total_dilation, equal_singular_halving,
    monotone_pair, monotone_family, hermitian_monotone_family,
    numerical_range_pair, economical_monotone_family,
)

# Verification
from .verify import (
    is_total_dilation, is_monotone_family, is_antimonotone_pair, check_class,
    check_mutual_annihilation, check_compression_inequalities,
)

# Processing
from .processing.suite import ConstructionSuite, run_ensemble
from .processing.builder import SuiteBuilder

# Utilities
from .utils.data import load_matrix, save_matrix, generate

__all__ = [
    # Version
    "__version__",

    # Errors
    "DilationError", "ConfigurationError", "DimensionMismatch", "PreconditionViolated",
    "CommutationFailure", "ConvergenceError", "ContainmentError", "VerificationFailed",
    "MatrixFileError",

    # Core
    "TolerancePolicy", "Operator", "HermitianMatrix", "UnitaryMatrix", "Isometry",
    "Check", "VerificationReport", "MonotoneCertificate", "MonotoneFailure",
    "DilationResult", "TotalDilationResult", "TotalFamilyResult", "HalvingResult",
    "MonotoneFamilyResult", "SuiteReport",

    # Constructions
    "Construction", "register", "available_constructions", "get_construction",
    "ConditionSpec", "Triangle",
    "halving_total_dilation", "normal_total_dilation", "unitary_total_dilation",
    "equal_diagonal_unitary", "antisymmetric_canonical", "circulant_family_dilation",
    "orthogonal_total_dilation", "equal_singular_halving",
    "monotone_pair", "monotone_family", "hermitian_monotone_family",
    "numerical_range_pair", "economical_monotone_family",

    # Verification
    "is_total_dilation", "is_monotone_family", "is_antimonotone_pair", "check_class",
    "check_mutual_annihilation", "check_compression_inequalities",

    # Processing
    "ConstructionSuite", "run_ensemble", "SuiteBuilder",

    # Utilities
    "load_matrix", "save_matrix", "generate",
]
