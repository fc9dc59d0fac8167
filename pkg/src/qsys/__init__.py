"""Linear Pfaffian and Fuchsian systems over Q: exact construction and
certification, numerical monodromy, zero counting and explicit bounds."""

from .algebra import GaussianRational, Polynomial, RationalFunction, parse_polynomial, parse_rational
from .pfaffian import (
    ComplexityReport,
    FuchsianSystem,
    MatrixOneForm,
    NotFuchsianError,
    complexity,
    flatness_residual,
    is_flat,
    rho,
    singular_locus,
    to_fuchsian,
)
from .constructions import (
    AlgebraicSpec,
    ConstructionError,
    RationalMapSpec,
    direct_sum,
    euler,
    from_algebraic,
    hypergeometric,
    monomial_extension,
    pullback,
    tensor,
)
from .spectral import QuasiunipotenceCertificate, certify, certify_general, certify_matrix
from .bounds import BoundReport, BoundsConfig, euler_bound, field_extension_bound, q_bound, rho_bound

__version__ = "0.1.0"
