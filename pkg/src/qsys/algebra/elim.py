"""Sylvester resultants and reduction of rational functions on a hypersurface."""

from __future__ import annotations

from .poly import Polynomial, _content_in, _sorted_vars
from .ratfunc import RationalFunction

__all__ = [
    "sylvester_matrix",
    "bareiss_det",
    "resultant",
    "bezout_cofactors",
    "eliminate_on_hypersurface",
    "coefficient_bits",
]


def sylvester_matrix(p: Polynomial, q: Polynomial, var: str) -> list[list[Polynomial]]:
    """Sylvester matrix with the ``deg q`` shifted rows of ``p`` first.

    Column ``c`` holds the coefficient of ``var**(N-1-c)``, ``N = deg p + deg q``.
    """
    dp, dq = p.degree(var), q.degree(var)
    vs = _sorted_vars(p.variables + q.variables)
    zero = Polynomial(vs)
    cp, cq = p.coeffs_in(var), q.coeffs_in(var)
    n = dp + dq
    rows = []
    for shift in range(dq - 1, -1, -1):
        rows.append([cp.get(n - 1 - c - shift, zero).with_variables(vs) for c in range(n)])
    for shift in range(dp - 1, -1, -1):
        rows.append([cq.get(n - 1 - c - shift, zero).with_variables(vs) for c in range(n)])
    return rows


def bareiss_det(matrix, exact_div=None):
    """Fraction-free determinant (Bareiss) over an integral domain.

    ``exact_div(a, b)`` must return ``a / b`` when the division is exact; the
    default uses ``Polynomial.exact_div`` or ``/``.
    """
    if exact_div is None:
        def exact_div(a, b):
            return a.exact_div(b) if isinstance(a, Polynomial) else a / b
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = None
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return m[k][k] * 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num if prev is None else exact_div(num, prev)
            m[i][k] = m[i][k] * 0
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def resultant(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """Res_var(p, q) as the Sylvester determinant (rows of ``p`` first)."""
    if p.degree(var) <= 0 or q.degree(var) <= 0:
        raise ValueError("resultant needs both degrees positive")
    return bareiss_det(sylvester_matrix(p, q, var))


def bezout_cofactors(p: Polynomial, q: Polynomial, var: str):
    """Return ``(res, a, b)`` with ``a*p + b*q == res``.

    ``deg a < deg q`` and ``deg b < deg p`` in ``var``. The coefficients of
    ``a, b`` are the last-column cofactors of the Sylvester matrix.
    """
    syl = sylvester_matrix(p, q, var)
    n = len(syl)
    dp, dq = p.degree(var), q.degree(var)
    vs = _sorted_vars(p.variables + q.variables)
    x = Polynomial.var(var, vs)
    res = bareiss_det(syl)
    a = Polynomial(vs)
    b = Polynomial(vs)
    for i in range(n):
        minor = [row[:-1] for r, row in enumerate(syl) if r != i]
        cof = bareiss_det(minor) if minor else Polynomial.constant(1, vs)
        if (i + n - 1) % 2:
            cof = -cof
        if not cof:
            continue
        if i < dq:
            a = a + cof * x ** (dq - 1 - i)
        else:
            b = b + cof * x ** (dp - 1 - (i - dq))
    return res, a, b


def eliminate_on_hypersurface(R: RationalFunction, S: Polynomial, x: str):
    """Rewrite ``R = A/B`` on ``{S = 0}`` as ``U/Q`` with ``Q`` free of ``x``.

    ``deg_x U <= deg_x S - 1`` and ``S`` divides ``U*B - Q*A``. The reduction
    runs on the primitive part of ``S`` in ``x``; ``U`` and ``Q`` are then
    scaled by the content so the divisibility holds for ``S`` itself.
    """
    R = RationalFunction.coerce(R)
    d = S.degree(x)
    if d <= 0:
        raise ValueError("hypersurface must have positive degree in the eliminated variable")
    content = _content_in(S, x)
    S = S.exact_div(content)
    A, B = R.numerator, R.denominator
    vs = _sorted_vars(A.variables + B.variables + S.variables + (x,))
    A, B, S = A.with_variables(vs), B.with_variables(vs), S.with_variables(vs)
    if B.degree(x) <= 0:
        Q0, b = B, Polynomial.constant(1, vs)
    else:
        if S.divides(B):
            raise ValueError("denominator vanishes identically on hypersurface")
        Q0, _, b = bezout_cofactors(S, B, x)
        if not Q0:
            raise ValueError("denominator vanishes identically on hypersurface")
    k, _, U = (A * b).pseudo_divmod(S, x)
    Q = Q0 * S.lc_in(x) ** k
    reduced = RationalFunction(U, Q)
    U, Q = reduced.numerator, reduced.denominator
    if U.degree(x) > d - 1 or Q.degree(x) > 0:
        raise AssertionError("elimination produced an out-of-range representation")
    if not content.is_constant():
        U, Q = U * content.with_variables(U.variables), Q * content.with_variables(Q.variables)
    return U, Q


def coefficient_bits(*polys: Polynomial) -> int:
    """Largest bit length among the integer coefficients of ``polys``."""
    bits = 0
    for p in polys:
        for c in p.terms.values():
            bits = max(bits, abs(c.numerator).bit_length(), c.denominator.bit_length())
    return bits
