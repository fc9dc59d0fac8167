"""Builders for Q-systems: algebraic functions, Euler and hypergeometric
systems, direct sums, tensor products, monomial extensions and pullbacks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra.elim import eliminate_on_hypersurface, resultant
from .algebra.numbers import as_exact
from .algebra.poly import Polynomial
from .algebra.ratfunc import RationalFunction
from .pfaffian import FuchsianSystem, MatrixOneForm, complexity

__all__ = [
    "AlgebraicSpec",
    "RationalMapSpec",
    "ConstructionError",
    "from_algebraic",
    "euler",
    "hypergeometric",
    "hypergeometric_exponents",
    "direct_sum",
    "tensor",
    "monomial_extension",
    "pullback",
    "construction_report",
]


class ConstructionError(ValueError):
    pass


def _zero():
    return RationalFunction(0)


@dataclass(frozen=True)
class AlgebraicSpec:
    """Algebraic function ``y(t)`` defined by ``P(t, y) = 0``."""

    P: Polynomial
    y: str = "y"

    def __post_init__(self):
        if self.P.degree(self.y) < 1:
            raise ConstructionError(f"P must have positive degree in {self.y}")

    @property
    def d(self) -> int:
        return self.P.degree(self.y)

    @property
    def parameters(self) -> tuple[str, ...]:
        return tuple(v for v in self.P.free_variables() if v != self.y)

    def discriminant(self) -> Polynomial:
        """Res_y(P, dP/dy)."""
        dP = self.P.diff(self.y)
        if dP.degree(self.y) <= 0:
            # linear in y: the resultant with a y-free derivative is that derivative
            return dP
        return resultant(self.P, dP, self.y)


def from_algebraic(spec: AlgebraicSpec, variables: Sequence[str] | None = None) -> MatrixOneForm:
    """Linear Pfaffian system for ``x_j = y**(j-1)``.

    Uses ``max(d, 2)`` components so that ``y`` itself is always a solution
    component (for ``d = 1`` the function is rational in ``t``).
    """
    P, y = spec.P, spec.y
    ts = tuple(variables) if variables is not None else spec.parameters
    if not ts:
        raise ConstructionError("P has no parameters besides the algebraic variable")
    if y in ts:
        raise ConstructionError("the algebraic variable cannot be a parameter")
    delta = spec.discriminant()
    if not delta:
        raise ConstructionError("P not squarefree in y")
    d = spec.d
    size = max(d, 2)
    dP = P.diff(y)
    ypoly = Polynomial.var(y)
    entries = [[[_zero() for _ in ts] for _ in range(size)] for _ in range(size)]
    for k, tk in enumerate(ts):
        Pk = P.diff(tk)
        if not Pk:
            continue
        for j in range(1, size):
            # d(y^j) = -j y^(j-1) P_k / P' dt_k, reduced on P = 0
            R = RationalFunction(-j * ypoly ** (j - 1) * Pk, dP)
            U, Q = eliminate_on_hypersurface(R, P, y)
            for l, coeff in U.coeffs_in(y).items():
                entries[j][l][k] = RationalFunction(coeff, Q)
    return MatrixOneForm(ts, entries)


def euler(A: Sequence[Sequence]) -> FuchsianSystem:
    """Euler system ``dX/dt = (A/t) X``; its residue at infinity is ``-A``."""
    A = tuple(tuple(as_exact(x) for x in row) for row in A)
    if all(x == 0 for row in A for x in row):
        raise ConstructionError("Euler system with zero residue is degenerate")
    return FuchsianSystem((Fraction(0),), (A,))


def hypergeometric(a, b, c) -> FuchsianSystem:
    """Gauss equation ``t(1-t)y'' + [c-(a+b+1)t]y' - ab y = 0`` in the basis
    ``(y, t y')``.

    Residue at 0 has spectrum {0, 1-c}; at infinity {a, b}; at 1 the
    spectrum is {0, c-a-b-1}, the exponent c-a-b shifted by the integer -1
    (residue traces of a Fuchsian system must sum to zero).
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    R0 = ((Fraction(0), Fraction(1)), (Fraction(0), 1 - c))
    R1 = ((Fraction(0), Fraction(0)), (-a * b, c - a - b - 1))
    if all(x == 0 for row in R1 for x in row):
        raise ConstructionError("hypergeometric data degenerate at t = 1 (ab = 0 and c = a + b + 1)")
    return FuchsianSystem((Fraction(0), Fraction(1)), (R0, R1))


def hypergeometric_exponents(a, b, c) -> dict:
    """Local exponents of the Gauss equation at 0, 1 and infinity."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    return {"0": (Fraction(0), 1 - c), "1": (Fraction(0), c - a - b), "inf": (a, b)}


def _check_same_vars(omega: MatrixOneForm, theta: MatrixOneForm):
    if omega.variables != theta.variables:
        raise ConstructionError(
            f"variable mismatch: {omega.variables} vs {theta.variables}; align variables first"
        )


def direct_sum(omega: MatrixOneForm, theta: MatrixOneForm) -> MatrixOneForm:
    _check_same_vars(omega, theta)
    n, p, m = omega.n, theta.n, omega.m
    zero = tuple(_zero() for _ in range(m))
    entries = [[zero] * (n + p) for _ in range(n + p)]
    for i in range(n):
        for j in range(n):
            entries[i][j] = omega.entries[i][j]
    for i in range(p):
        for j in range(p):
            entries[n + i][n + j] = theta.entries[i][j]
    return MatrixOneForm(omega.variables, entries)


def tensor(omega: MatrixOneForm, theta: MatrixOneForm) -> MatrixOneForm:
    """``Omega (x) I + I (x) Theta`` in the basis ``z_ij = x_i y_j`` (index
    ``i * dim(Theta) + j``)."""
    _check_same_vars(omega, theta)
    n, p, m = omega.n, theta.n, omega.m
    N = n * p
    entries = [[[_zero() for _ in range(m)] for _ in range(N)] for _ in range(N)]
    for i in range(n):
        for j in range(p):
            row = i * p + j
            for k in range(n):
                col = k * p + j
                entries[row][col] = [entries[row][col][q] + omega.entries[i][k][q] for q in range(m)]
            for l in range(p):
                col = i * p + l
                entries[row][col] = [entries[row][col][q] + theta.entries[j][l][q] for q in range(m)]
    return MatrixOneForm(omega.variables, entries)


def _monomials(nsym: int, degree: int):
    out = []
    for total in range(degree + 1):
        level = []
        for combo in itertools.combinations_with_replacement(range(nsym), total):
            e = [0] * nsym
            for s in combo:
                e[s] += 1
            level.append(tuple(e))
        level.sort(reverse=True)
        out.extend(level)
    return out


def monomial_extension(omega: MatrixOneForm, delta: int):
    """System satisfied by all ``t^alpha X^beta`` with ``|alpha|+|beta| <= delta``.

    ``X`` is a fundamental matrix (``n*n`` entries, row-major). Returns
    ``(form, index)`` where ``index[(alpha, beta)]`` is the coordinate of
    that monomial; monomials are in graded lexicographic order.
    """
    if delta < 1:
        raise ConstructionError("extension degree must be >= 1")
    n, m = omega.n, omega.m
    nsym = m + n * n
    monos = _monomials(nsym, delta)
    index = {(e[:m], e[m:]): i for i, e in enumerate(monos)}
    N = len(monos)
    acc: list[dict] = [dict() for _ in range(N)]

    def add(row, col, k, val):
        key = (col, k)
        acc[row][key] = acc[row].get(key, 0) + val

    for row, e in enumerate(monos):
        alpha, beta = e[:m], list(e[m:])
        for k in range(m):
            if alpha[k]:
                a2 = list(alpha)
                a2[k] -= 1
                add(row, index[(tuple(a2), tuple(beta))], k, RationalFunction(alpha[k]))
        for i in range(n):
            for j in range(n):
                bij = beta[i * n + j]
                if not bij:
                    continue
                for l in range(n):
                    cell = omega.entries[i][l]
                    if all(c.is_zero() for c in cell):
                        continue
                    b2 = list(beta)
                    b2[i * n + j] -= 1
                    b2[l * n + j] += 1
                    col = index[(alpha, tuple(b2))]
                    for k in range(m):
                        if not cell[k].is_zero():
                            add(row, col, k, cell[k] * bij)
    entries = [[[_zero() for _ in range(m)] for _ in range(N)] for _ in range(N)]
    for row in range(N):
        for (col, k), val in acc[row].items():
            entries[row][col][k] = RationalFunction.coerce(val)
    return MatrixOneForm(omega.variables, entries), index


@dataclass(frozen=True)
class RationalMapSpec:
    """Rational map ``s -> t`` given by ``components[t_k] = f_k(s)``."""

    source: tuple[str, ...]
    components: Mapping[str, RationalFunction]

    def __post_init__(self):
        comps = {k: RationalFunction.coerce(v) for k, v in dict(self.components).items()}
        for name, f in comps.items():
            extra = set(f.free_variables()) - set(self.source)
            if extra:
                raise ConstructionError(f"component {name} uses non-source variables {sorted(extra)}")
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "components", comps)

    @property
    def target(self) -> tuple[str, ...]:
        return tuple(self.components)


def pullback(omega: MatrixOneForm, f: RationalMapSpec) -> MatrixOneForm:
    """``f^* Omega = sum_k (R_ijk o f) d f_k`` expressed in the source variables."""
    missing = set(omega.variables) - set(f.components)
    if missing:
        raise ConstructionError(f"map does not define target variables {sorted(missing)}")
    src = f.source
    jac = {tk: [f.components[tk].diff(s) for s in src] for tk in omega.variables}
    n = omega.n
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = [_zero() for _ in src]
            for k, tk in enumerate(omega.variables):
                R = omega.entries[i][j][k]
                if R.is_zero():
                    continue
                try:
                    Rf = R.compose(f.components)
                except ZeroDivisionError:
                    raise ConstructionError(
                        f"image of the map lies inside the singular locus (denominator of entry [{i}][{j}] vanishes)"
                    ) from None
                for l in range(len(src)):
                    if not jac[tk][l].is_zero():
                        acc[l] = acc[l] + Rf * jac[tk][l]
            row.append(acc)
        entries.append(row)
    return MatrixOneForm(src, entries)


def construction_report(inputs: Sequence[MatrixOneForm], output: MatrixOneForm) -> dict:
    """Complexity (s, d, n, m) of the inputs and of the result."""
    def rep(om):
        c = complexity(om)
        return {"s": str(c.s), "d": c.d, "n": c.n, "m": c.m}

    return {"inputs": [rep(om) for om in inputs], "output": rep(output)}
