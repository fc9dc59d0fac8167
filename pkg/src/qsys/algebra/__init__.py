from .numbers import GaussianRational, as_exact, exact_to_complex
from .poly import Polynomial, gcd, lcm, poly_gcd, squarefree_part, coprime_squarefree_basis
from .ratfunc import RationalFunction
from .parse import ParseError, parse_rational, parse_polynomial, parse_gaussian, parse_number
from .elim import resultant, bezout_cofactors, eliminate_on_hypersurface, coefficient_bits
from .linalg import char_poly, char_poly_coeffs, rational_roots, real_root_count, gaussian_roots

__all__ = [
    "GaussianRational",
    "as_exact",
    "exact_to_complex",
    "Polynomial",
    "gcd",
    "lcm",
    "poly_gcd",
    "squarefree_part",
    "coprime_squarefree_basis",
    "RationalFunction",
    "ParseError",
    "parse_rational",
    "parse_polynomial",
    "parse_gaussian",
    "parse_number",
    "resultant",
    "bezout_cofactors",
    "eliminate_on_hypersurface",
    "coefficient_bits",
    "char_poly",
    "char_poly_coeffs",
    "rational_roots",
    "real_root_count",
    "gaussian_roots",
]
