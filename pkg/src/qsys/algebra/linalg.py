"""Exact spectral helpers: characteristic polynomials and root location."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .numbers import GaussianRational
from .poly import Polynomial

__all__ = [
    "char_poly",
    "char_poly_coeffs",
    "rational_roots",
    "RationalRoots",
    "real_root_count",
    "gaussian_roots",
    "uni_eval",
    "uni_divmod",
]

# Dense univariate polynomials over a field are ascending coefficient lists.
# The elements may be Fractions or GaussianRationals.


def _trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _uni_add(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _uni_sub(p, q):
    return _uni_add(p, [-c for c in q])


def _uni_mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _trim(out)


def uni_divmod(p, q):
    p, q = _trim(p), _trim(q)
    if not q:
        raise ZeroDivisionError("division by zero polynomial")
    rem = list(p)
    quot = [0] * max(len(p) - len(q) + 1, 0)
    lead = q[-1]
    while len(rem) >= len(q) and rem:
        shift = len(rem) - len(q)
        c = rem[-1] / lead
        quot[shift] = c
        for i, b in enumerate(q):
            rem[shift + i] = rem[shift + i] - c * b
        rem = _trim(rem[:-1]) if not rem[-1] else _trim(rem)
    return _trim(quot), _trim(rem)


def _uni_exact_div(p, q):
    quot, rem = uni_divmod(p, q)
    if rem:
        raise ArithmeticError("inexact univariate division")
    return quot


def uni_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _uni_gcd(p, q):
    p, q = _trim(p), _trim(q)
    while q:
        p, q = q, uni_divmod(p, q)[1]
    if not p:
        return p
    return [c / p[-1] for c in p]


def _uni_diff(p):
    return _trim([c * k for k, c in enumerate(p)][1:])


def char_poly_coeffs(M: Sequence[Sequence]) -> list:
    """Ascending coefficients of det(lam*I - M) by fraction-free elimination.

    Works for entries in any exact field (Fraction, GaussianRational).
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("characteristic polynomial of a non-square matrix")
    if n == 0:
        return [Fraction(1)]
    one = Fraction(1)
    A = [[_trim([-M[i][j], one] if i == j else [-M[i][j]]) for j in range(n)] for i in range(n)]
    sign = 1
    prev = None
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((r for r in range(k + 1, n) if A[r][k]), None)
            if swap is None:
                return []
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _uni_sub(_uni_mul(A[i][j], A[k][k]), _uni_mul(A[i][k], A[k][j]))
                A[i][j] = num if prev is None else _uni_exact_div(num, prev)
            A[i][k] = []
        prev = A[k][k]
    det = A[n - 1][n - 1]
    det = det if sign > 0 else [-c for c in det]
    lead = det[-1]
    return [c / lead for c in det]


def char_poly(M: Sequence[Sequence], var: str = "lam") -> Polynomial:
    """Monic det(var*I - M) for a rational matrix."""
    coeffs = char_poly_coeffs([[Fraction(x) for x in row] for row in M])
    return Polynomial.from_univariate(coeffs, var)


# ----------------------------------------------------------------------------
# rational roots
# ----------------------------------------------------------------------------

def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _factor(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    while f * f <= n and f < 10_000:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m)
        stack.extend((d, m // d))
    return out


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in _factor(n).items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


class RationalRoots(NamedTuple):
    roots: list  # [(Fraction, multiplicity)], ascending
    splits: bool
    cofactor: list  # ascending coefficients of the rational-root-free part


def _as_coeffs(p) -> list[Fraction]:
    if isinstance(p, Polynomial):
        return [Fraction(c) for c in p.univariate_coeffs()]
    return [Fraction(c) for c in p]


def rational_roots(p) -> RationalRoots:
    """All rational roots with multiplicities (candidate test plus deflation)."""
    coeffs = _trim(_as_coeffs(p))
    if not coeffs:
        raise ValueError("rational roots of the zero polynomial")
    degree = len(coeffs) - 1
    found: dict[Fraction, int] = {}
    zeros = 0
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
        zeros += 1
    if zeros:
        found[Fraction(0)] = zeros
    if len(coeffs) > 1:
        lcd = math.lcm(*(c.denominator for c in coeffs))
        ints = [int(c * lcd) for c in coeffs]
        g = math.gcd(*ints)
        ints = [c // g for c in ints]
        cands = set()
        for a in _divisors(ints[0]):
            for b in _divisors(ints[-1]):
                cands.add(Fraction(a, b))
                cands.add(Fraction(-a, b))
        work = [Fraction(c) for c in ints]
        for r in sorted(cands):
            while len(work) > 1 and uni_eval(work, r) == 0:
                work = _uni_exact_div(work, [-r, Fraction(1)])
                found[r] = found.get(r, 0) + 1
        coeffs = work
    roots = sorted(found.items())
    total = sum(m for _, m in roots)
    lead = coeffs[-1]
    return RationalRoots(roots, total == degree, [c / lead for c in coeffs])


def real_root_count(p) -> int:
    """Number of distinct real roots via a Sturm sequence."""
    coeffs = _trim(_as_coeffs(p))
    if not coeffs:
        raise ValueError("real roots of the zero polynomial")
    if len(coeffs) == 1:
        return 0
    d = _uni_diff(coeffs)
    g = _uni_gcd(coeffs, d)
    sqf = _uni_exact_div(coeffs, g) if len(g) > 1 else coeffs
    seq = [sqf, _uni_diff(sqf)]
    while len(seq[-1]) > 1:
        r = uni_divmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])

    def changes(signs):
        signs = [s for s in signs if s != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    at_pos = [1 if q[-1] > 0 else -1 for q in seq]
    at_neg = [(1 if q[-1] > 0 else -1) * (-1) ** (len(q) - 1) for q in seq]
    return changes(at_neg) - changes(at_pos)


# ----------------------------------------------------------------------------
# Gaussian-rational roots (exactly verified numeric candidates)
# ----------------------------------------------------------------------------

def gaussian_roots(p):
    """Roots of a rational polynomial lying in Q(i), with multiplicities.

    Returns ``(roots, cofactor)``: ``roots`` is a list of
    ``(Fraction | GaussianRational, multiplicity)`` and ``cofactor`` the
    ascending coefficients of the part with no root in Q(i).
    """
    rr = rational_roots(p)
    roots = list(rr.roots)
    work = rr.cofactor
    if len(work) > 1:
        lcd = math.lcm(*(c.denominator for c in work))
        L = abs(int(work[-1] * lcd))
        bound = max(2 * L, 2)
        numeric = np.roots([float(c) for c in reversed(work)])
        for z in sorted(numeric, key=lambda z: (round(z.real, 6), -z.imag)):
            if z.imag <= 0:
                continue
            a = Fraction(z.real).limit_denominator(bound)
            b = Fraction(z.imag).limit_denominator(bound)
            if b == 0:
                continue
            quad = [a * a + b * b, -2 * a, Fraction(1)]
            mult = 0
            while len(work) > 2:
                q, r = uni_divmod(work, quad)
                if r:
                    break
                work = q
                mult += 1
            if mult:
                roots.append((GaussianRational(a, b), mult))
                roots.append((GaussianRational(a, -b), mult))
    return roots, work
