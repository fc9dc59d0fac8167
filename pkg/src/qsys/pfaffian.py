"""Pfaffian systems ``dX = Omega X`` over Q and Fuchsian systems on the line."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .algebra.linalg import gaussian_roots
from .algebra.numbers import GaussianRational, as_exact
from .algebra.poly import Polynomial, _sorted_vars, coprime_squarefree_basis, var_key
from .algebra.ratfunc import RationalFunction

__all__ = [
    "MatrixOneForm",
    "FuchsianSystem",
    "ComplexityReport",
    "SingularLocusDescription",
    "NotFuchsianError",
    "flatness_residual",
    "is_flat",
    "to_fuchsian",
    "complexity",
    "rho",
    "singular_locus",
]


class NotFuchsianError(ValueError):
    """Raised when a one-form is not of the shape sum_j A_j dt/(t - a_j)."""


def _zero():
    return RationalFunction(0)


@dataclass(frozen=True)
class MatrixOneForm:
    """``Omega = sum_k Omega_k dt_k``; ``entries[i][j][k]`` is the coefficient
    of ``dt_k`` in ``Omega_ij``."""

    variables: tuple[str, ...]
    entries: tuple

    def __post_init__(self):
        vs = tuple(self.variables)
        if not vs:
            raise ValueError("a one-form needs at least one variable")
        if len(set(vs)) != len(vs):
            raise ValueError("duplicate variables")
        rows = tuple(
            tuple(tuple(RationalFunction.coerce(c) for c in cell) for cell in row)
            for row in self.entries
        )
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("entries must form a non-empty square matrix")
        for row in rows:
            for cell in row:
                if len(cell) != len(vs):
                    raise ValueError("each entry needs one coefficient per variable")
                extra = set(itertools.chain.from_iterable(c.free_variables() for c in cell)) - set(vs)
                if extra:
                    raise ValueError(f"coefficients use undeclared variables {sorted(extra)}")
        object.__setattr__(self, "variables", vs)
        object.__setattr__(self, "entries", rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.variables)

    @classmethod
    def from_components(cls, variables: Sequence[str], components: Sequence) -> "MatrixOneForm":
        """Build from ``m`` matrices: ``components[k]`` multiplies ``dt_k``."""
        variables = tuple(variables)
        if len(components) != len(variables):
            raise ValueError("one component matrix per variable is required")
        n = len(components[0])
        entries = [
            [[components[k][i][j] for k in range(len(variables))] for j in range(n)]
            for i in range(n)
        ]
        return cls(variables, entries)

    @classmethod
    def zero(cls, n: int, variables: Sequence[str]) -> "MatrixOneForm":
        variables = tuple(variables)
        return cls(variables, [[[_zero()] * len(variables) for _ in range(n)] for _ in range(n)])

    def component(self, k) -> list[list[RationalFunction]]:
        """Matrix coefficient of ``dt_k`` (index or variable name)."""
        if isinstance(k, str):
            k = self.variables.index(k)
        return [[cell[k] for cell in row] for row in self.entries]

    def coefficients(self) -> Iterable[RationalFunction]:
        for row in self.entries:
            for cell in row:
                yield from cell

    def map_coefficients(self, fn) -> "MatrixOneForm":
        return MatrixOneForm(self.variables, [[[fn(c) for c in cell] for cell in row] for row in self.entries])

    def permuted(self, perm: Sequence[int]) -> "MatrixOneForm":
        """Conjugate by the permutation matrix sending basis ``perm[i]`` to ``i``."""
        return MatrixOneForm(self.variables, [[self.entries[perm[i]][perm[j]] for j in range(self.n)] for i in range(self.n)])

    def relabeled(self, mapping: dict[str, str]) -> "MatrixOneForm":
        new_vars = tuple(mapping.get(v, v) for v in self.variables)
        subst = {v: RationalFunction(Polynomial.var(mapping[v])) for v in self.variables if v in mapping}
        return MatrixOneForm(new_vars, [[[c.compose(subst) for c in cell] for cell in row] for row in self.entries])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients())

    def __str__(self):
        lines = []
        for i, row in enumerate(self.entries):
            for j, cell in enumerate(row):
                terms = [f"({c}) d{v}" for c, v in zip(cell, self.variables) if not c.is_zero()]
                if terms:
                    lines.append(f"Omega[{i}][{j}] = " + " + ".join(terms))
        return "\n".join(lines) or "Omega = 0"


def _matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = _zero()
            for l in range(k):
                if A[i][l] and B[l][j]:
                    acc = acc + A[i][l] * B[l][j]
            row.append(acc)
        out.append(row)
    return out


def flatness_residual(omega: MatrixOneForm) -> dict[tuple[str, str], list[list[RationalFunction]]]:
    """Coefficients of ``dOmega - Omega^Omega`` on ``dt_k ^ dt_l`` (k < l).

    The coefficient is ``d_k Omega_l - d_l Omega_k - [Omega_k, Omega_l]``.
    """
    out = {}
    comps = [omega.component(k) for k in range(omega.m)]
    for k, l in itertools.combinations(range(omega.m), 2):
        vk, vl = omega.variables[k], omega.variables[l]
        AB = _matmul(comps[k], comps[l])
        BA = _matmul(comps[l], comps[k])
        out[(vk, vl)] = [
            [comps[l][i][j].diff(vk) - comps[k][i][j].diff(vl) - (AB[i][j] - BA[i][j]) for j in range(omega.n)]
            for i in range(omega.n)
        ]
    return out


def is_flat(omega: MatrixOneForm) -> bool:
    return all(c.is_zero() for mat in flatness_residual(omega).values() for row in mat for c in row)


# ----------------------------------------------------------------------------
# Fuchsian systems
# ----------------------------------------------------------------------------

def _exact_sort_key(a):
    g = GaussianRational.coerce(a)
    return (g.real, g.imag)


@dataclass(frozen=True)
class FuchsianSystem:
    """``dX/dt = (sum_j A_j / (t - a_j)) X`` with exact poles in Q(i)."""

    poles: tuple
    residues: tuple

    def __post_init__(self):
        poles = tuple(as_exact(a) for a in self.poles)
        residues = tuple(tuple(tuple(as_exact(x) for x in row) for row in A) for A in self.residues)
        if not poles:
            raise ValueError("a Fuchsian system needs at least one pole")
        if len(poles) != len(residues):
            raise ValueError("one residue matrix per pole is required")
        if len(set(poles)) != len(poles):
            raise ValueError("poles must be pairwise distinct")
        n = len(residues[0])
        for a, A in zip(poles, residues):
            if len(A) != n or any(len(row) != n for row in A):
                raise ValueError("residues must be square matrices of a common size")
            if all(x == 0 for row in A for x in row):
                raise ValueError(f"zero residue at pole {a} (degenerate pole)")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residues", residues)

    @property
    def n(self) -> int:
        return len(self.residues[0])

    @property
    def residue_at_infinity(self) -> tuple:
        n = self.n
        return tuple(
            tuple(as_exact(-sum((A[i][j] for A in self.residues), Fraction(0))) for j in range(n))
            for i in range(n)
        )

    @property
    def infinity_is_singular(self) -> bool:
        return any(x != 0 for row in self.residue_at_infinity for x in row)

    def is_rational(self) -> bool:
        return all(not isinstance(x, GaussianRational) for x in self.poles) and all(
            not isinstance(x, GaussianRational) for A in self.residues for row in A for x in row
        )

    def to_one_form(self, variable: str = "t") -> MatrixOneForm:
        """Expand to a MatrixOneForm over Q.

        Non-real poles must come in conjugate pairs with conjugate residues;
        otherwise the system is not defined over Q and ValueError is raised.
        """
        n = self.n
        t = Polynomial.var(variable)
        acc = [[_zero() for _ in range(n)] for _ in range(n)]
        done = set()
        for idx, (a, A) in enumerate(zip(self.poles, self.residues)):
            if idx in done:
                continue
            if not isinstance(a, GaussianRational):
                den = t - a
                for i in range(n):
                    for j in range(n):
                        x = A[i][j]
                        if isinstance(x, GaussianRational):
                            raise ValueError(f"residue at real pole {a} has non-real entries")
                        if x:
                            acc[i][j] = acc[i][j] + RationalFunction(Polynomial.constant(x), den)
                continue
            partner = next((k for k, b in enumerate(self.poles) if b == a.conjugate()), None)
            if partner is None:
                raise ValueError(f"pole {a} has no conjugate partner; system is not defined over Q")
            B = self.residues[partner]
            done.update((idx, partner))
            re, im = a.real, a.imag
            den = t * t - 2 * re * t + (re * re + im * im)
            for i in range(n):
                for j in range(n):
                    x = GaussianRational.coerce(A[i][j])
                    y = GaussianRational.coerce(B[i][j])
                    if y != x.conjugate():
                        raise ValueError(f"residues at {a} and its conjugate are not conjugate")
                    lin = x + y  # coefficient of t
                    const = -(x * a.conjugate() + y * a)
                    if lin.imag or const.imag:
                        raise AssertionError("conjugate-pair combination is not real")
                    num = t * lin.real + const.real
                    if num:
                        acc[i][j] = acc[i][j] + RationalFunction(num, den)
        return MatrixOneForm((variable,), [[[acc[i][j]] for j in range(n)] for i in range(n)])

    def __str__(self):
        parts = [f"pole {a}: {[[str(x) for x in row] for row in A]}" for a, A in zip(self.poles, self.residues)]
        return "FuchsianSystem(" + "; ".join(parts) + ")"


def to_fuchsian(omega: MatrixOneForm) -> FuchsianSystem:
    """Read off poles and residues of a one-variable form.

    Succeeds iff every entry is ``sum_j r_j/(t - a_j)`` with simple poles in
    Q(i) and no polynomial part (so infinity is at worst a simple pole).
    """
    if omega.m != 1:
        raise NotFuchsianError("to_fuchsian needs a one-variable form")
    var = omega.variables[0]
    n = omega.n
    found: dict = {}
    for i, row in enumerate(omega.entries):
        for j, cell in enumerate(row):
            R = cell[0]
            if R.is_zero():
                continue
            N, D = R.numerator, R.denominator
            if N.degree(var) >= D.degree(var):
                order = N.degree(var) - D.degree(var) + 2
                raise NotFuchsianError(f"entry [{i}][{j}] has a pole of order {order} at infinity")
            roots, cofactor = gaussian_roots(D.with_variables((var,)) if D.free_variables() else D)
            if len(cofactor) > 1:
                rest = Polynomial.from_univariate(cofactor, var)
                raise NotFuchsianError(f"pole not in Q(i): entry [{i}][{j}] has poles at roots of {rest}")
            dD = D.diff(var)
            for a, mult in roots:
                if mult > 1:
                    raise NotFuchsianError(f"entry [{i}][{j}] has a pole of order {mult} at {a}")
                r = N.evaluate({var: a}) / dD.evaluate({var: a})
                found.setdefault(a, {})[(i, j)] = as_exact(r)
    poles = sorted(found, key=_exact_sort_key)
    if not poles:
        raise NotFuchsianError("form is holomorphic on the affine line (no poles)")
    residues = [
        [[found[a].get((i, j), Fraction(0)) for j in range(n)] for i in range(n)]
        for a in poles
    ]
    return FuchsianSystem(tuple(poles), tuple(map(lambda A: tuple(map(tuple, A)), residues)))


# ----------------------------------------------------------------------------
# complexity, rho, singular locus
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexityReport:
    s: int
    d: int
    n: int
    m: int

    def __post_init__(self):
        if self.s < 1 or self.d < 0:
            raise ValueError("complexity needs s >= 1 and d >= 0")

    def to_dict(self):
        return {"s": str(self.s), "d": self.d, "n": self.n, "m": self.m}


def complexity(omega: MatrixOneForm) -> ComplexityReport:
    """Largest absolute integer in the canonical representation (floored at 2)
    and the maximal degree of numerators/denominators."""
    s, d = 2, 0
    for c in omega.coefficients():
        ints = c.integer_coefficients()
        if ints:
            s = max(s, max(abs(x) for x in ints))
        if not c.is_zero():
            d = max(d, c.degree())
    return ComplexityReport(s=s, d=d, n=omega.n, m=omega.m)


def _abs_mp(x):
    g = GaussianRational.coerce(x)
    re = mpmath.mpf(g.real.numerator) / g.real.denominator
    im = mpmath.mpf(g.imag.numerator) / g.imag.denominator
    return mpmath.sqrt(re * re + im * im)


def rho(F: FuchsianSystem, dps: int = 50):
    """``2 + sum_j |A_j| + sum_{i != j} 1/|a_i - a_j|`` with the max-abs entry
    norm and the pair sum over ordered pairs."""
    with mpmath.workdps(dps):
        total = mpmath.mpf(2)
        for A in F.residues:
            total += max(_abs_mp(x) for row in A for x in row)
        for i, a in enumerate(F.poles):
            for j, b in enumerate(F.poles):
                if i != j:
                    total += 1 / _abs_mp(GaussianRational.coerce(a) - b)
        return +total


@dataclass(frozen=True)
class SingularLocusDescription:
    components: tuple[Polynomial, ...] = field(default_factory=tuple)

    def is_empty(self) -> bool:
        return not self.components

    def __str__(self):
        return "{" + ", ".join(str(c) for c in self.components) + "}"


def singular_locus(omega: MatrixOneForm) -> SingularLocusDescription:
    """Squarefree, pairwise coprime factors of the lcm of all denominators."""
    dens = [c.denominator for c in omega.coefficients() if not c.denominator.is_constant()]
    return SingularLocusDescription(tuple(coprime_squarefree_basis(dens)))


def canonical_variables(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(names, key=var_key))
