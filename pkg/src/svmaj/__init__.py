"""svmaj: high-precision checks of singular-value majorisation inequalities.

The package verifies, at configurable decimal precision, the weak
majorisation relations between sigma(B^p A^p) and sigma((BA)^p) for PSD
matrices, the supporting lemmas (FitzGerald-Horn positivity, the A = SS*,
AB = S Lambda S^-1 decomposition), and runs reproducible counterexample
searches outside the proven parameter ranges.
"""

from .numerics import (PrecisionConfig, DEFAULT_CONFIG, RngStream, Scalar,
                       DomainError, SingularityError, NumericError,
                       real_power, draw_uniform, draw_complex_normal,
                       to_exact_decimal, scalar_to_json, scalar_from_json)
from .quadrature import gauss_legendre, integrate_adaptive
from .linalg import (Matrix, EigResult, SingularValues, ContractViolation,
                     SingularMatrixError, identity, diagonal_matrix,
                     hermitian_eig, svd_values, operator_norm, psd_power,
                     similarity_power, loewner_leq, inverse, hadamard, compound,
                     HERMITIAN, PSD, POSITIVE_DEFINITE, DIAGONAL, NONNEG_DIAGONAL)
from .majorize import MajorisationReport, weak_majorisation_leq, weyl_crosscheck

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
