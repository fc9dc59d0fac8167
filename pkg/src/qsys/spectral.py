"""Certificates of quasiunipotence from residue spectra."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra.linalg import _uni_diff, _uni_exact_div, _uni_gcd, char_poly_coeffs, rational_roots, real_root_count
from .algebra.numbers import GaussianRational, as_exact
from .algebra.poly import Polynomial
from .algebra.ratfunc import RationalFunction
from .pfaffian import FuchsianSystem, MatrixOneForm, singular_locus

__all__ = [
    "PoleCertificate",
    "QuasiunipotenceCertificate",
    "ResidueProbe",
    "LoopProbe",
    "certify",
    "certify_matrix",
    "certify_general",
    "residue_on_component",
    "find_smooth_point",
]

QUASI = "certified-quasiunipotent"
WEAK = "certified-weak-only"
REJECTED = "rejected"
INCONCLUSIVE = "inconclusive"
INCONCLUSIVE_NUMERIC = "inconclusive-numeric"


@dataclass
class PoleCertificate:
    pole: str
    verdict: str
    eigenvalues: list  # exact rationals with multiplicity, as strings
    char_poly: list  # ascending coefficients, strings
    splits: bool
    real_spectrum: bool
    orders: list
    resonant: bool = False
    method: str = "residue"
    candidate_orders: list | None = None

    def to_dict(self):
        return {
            "pole": self.pole,
            "verdict": self.verdict,
            "eigenvalues": list(self.eigenvalues),
            "char_poly": list(self.char_poly),
            "splits": self.splits,
            "real_spectrum": self.real_spectrum,
            "orders": list(self.orders),
            "resonant": self.resonant,
            "method": self.method,
            "candidate_orders": self.candidate_orders,
        }


@dataclass
class QuasiunipotenceCertificate:
    verdict: str
    poles: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def orders(self) -> list:
        return [q for p in self.poles for q in p.orders]

    def to_dict(self):
        return {"verdict": self.verdict, "poles": [p.to_dict() for p in self.poles], "notes": list(self.notes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data) -> "QuasiunipotenceCertificate":
        poles = [PoleCertificate(**p) for p in data["poles"]]
        return cls(data["verdict"], poles, list(data.get("notes", [])))


def _combine(verdicts: Sequence[str]) -> str:
    if not verdicts:
        return QUASI
    if REJECTED in verdicts:
        return REJECTED
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    if INCONCLUSIVE_NUMERIC in verdicts:
        return INCONCLUSIVE_NUMERIC
    if WEAK in verdicts:
        return WEAK
    return QUASI


def certify_matrix(A, label: str = "") -> PoleCertificate:
    """Classify one residue matrix by its characteristic polynomial."""
    coeffs = char_poly_coeffs([[as_exact(x) for x in row] for row in A])
    cp = [str(as_exact(c)) for c in coeffs]
    if any(isinstance(as_exact(c), GaussianRational) for c in coeffs):
        return PoleCertificate(label, REJECTED, [], cp, False, False, [],
                               method="residue: characteristic polynomial not real")
    coeffs = [Fraction(as_exact(c)) for c in coeffs]
    rr = rational_roots(coeffs)
    eig = [r for r, mult in rr.roots for _ in range(mult)]
    resonant = any(
        a != b and (a - b).denominator == 1 for (a, _), (b, _) in itertools.combinations(rr.roots, 2)
    )
    if rr.splits:
        orders = [r.denominator for r in eig]
        return PoleCertificate(label, QUASI, [str(r) for r in eig], cp, True, True, orders, resonant)
    cof = rr.cofactor
    # all roots of the cofactor are real iff its squarefree part has deg-many real roots
    g = _uni_gcd(cof, _uni_diff(cof))
    sqf = _uni_exact_div(cof, g) if len(g) > 1 else cof
    real = real_root_count(sqf) == len(sqf) - 1
    verdict = WEAK if real else REJECTED
    orders = [r.denominator for r in eig]
    return PoleCertificate(label, verdict, [str(r) for r in eig], cp, False, real, orders, resonant)


def certify(F: FuchsianSystem) -> QuasiunipotenceCertificate:
    """Quasiunipotence of a Fuchsian system from its residue spectra.

    Rational spectra at every pole (infinity included) certify
    quasiunipotence with monodromy orders equal to the eigenvalue
    denominators; real spectra certify weak quasiunipotence only.
    """
    poles = []
    for a, A in zip(F.poles, F.residues):
        poles.append(certify_matrix(A, f"t = {a}"))
    notes = []
    if F.infinity_is_singular:
        poles.append(certify_matrix(F.residue_at_infinity, "t = infinity"))
    else:
        notes.append("infinity is not singular (residues sum to zero)")
    if any(p.resonant for p in poles):
        notes.append("resonant spectrum: orders certified for eigenvalues, Jordan structure not asserted")
    return QuasiunipotenceCertificate(_combine([p.verdict for p in poles]), poles, notes)


# ----------------------------------------------------------------------------
# several variables
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidueProbe:
    """Transversal line ``point + tau * direction`` through a smooth point."""

    point: Mapping[str, Fraction]
    direction: Mapping[str, Fraction]


@dataclass(frozen=True)
class LoopProbe:
    """Numeric small loop (a closed PathSpec in C^m) around a component."""

    loop: object
    qmax: int = 60


_SMALL = [Fraction(1, 3), Fraction(2, 7), Fraction(3, 5), Fraction(-1, 2), Fraction(5, 3), Fraction(-4, 7),
          Fraction(7, 11), Fraction(2), Fraction(-3), Fraction(1, 13)]


def find_smooth_point(component: Polynomial, others: Sequence[Polynomial], variables: Sequence[str]):
    """A rational point of ``{component = 0}`` off the other components with a
    transversal coordinate direction, or None."""
    variables = tuple(variables)
    free = [v for v in variables if component.degree(v) > 0]
    for v in free:
        rest = [w for w in variables if w != v]
        for assignment in itertools.islice(itertools.product(_SMALL, repeat=len(rest)), 400):
            point = dict(zip(rest, assignment))
            g = component.subs(point) if point else component
            if g.degree(v) <= 0:
                continue
            for r, mult in rational_roots(g.univariate_coeffs()).roots:
                if mult != 1:
                    continue
                full = dict(point)
                full[v] = r
                if any(Fraction(as_exact(o.evaluate(full))) == 0 for o in others):
                    continue
                if component.diff(v).evaluate(full) == 0:
                    continue
                direction = {w: Fraction(int(w == v)) for w in variables}
                return ResidueProbe(full, direction)
    return None


def _pole_order_at_zero(R: RationalFunction, tau: str) -> int:
    den = R.denominator
    k = 0
    coeffs = den.with_variables((tau,)).univariate_coeffs() if den.free_variables() else [den.constant_value()]
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    return k


def residue_on_component(omega: MatrixOneForm, probe: ResidueProbe):
    """Residue at ``tau = 0`` of ``Omega`` restricted to the probe line.

    Returns ``(matrix, max pole order)``; the matrix is None when some entry
    has a pole of order >= 2.
    """
    tau = "_tau"
    while tau in omega.variables:
        tau += "_"
    T = Polynomial.var(tau)
    subs = {
        v: RationalFunction(Polynomial.constant(probe.point[v]) + T * probe.direction.get(v, 0))
        for v in omega.variables
    }
    n = omega.n
    order = 0
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = RationalFunction(0)
            for k, v in enumerate(omega.variables):
                c = omega.entries[i][j][k]
                dv = Fraction(probe.direction.get(v, 0))
                if c.is_zero() or dv == 0:
                    continue
                acc = acc + c.compose(subs) * dv
            ordr = 0 if acc.is_zero() else _pole_order_at_zero(acc, tau)
            order = max(order, ordr)
            if ordr == 1:
                num = acc.numerator.evaluate({tau: Fraction(0)}) if acc.numerator.free_variables() else acc.numerator.constant_value()
                den = Polynomial.from_univariate(
                    acc.denominator.with_variables((tau,)).univariate_coeffs()[1:], tau
                )
                row.append(as_exact(num / den.evaluate({tau: Fraction(0)})))
            else:
                row.append(Fraction(0))
        rows.append(row)
    return (rows if order <= 1 else None), order


def certify_general(omega: MatrixOneForm, strategy: Mapping | None = None) -> QuasiunipotenceCertificate:
    """Per-component certification for a system in several variables.

    ``strategy`` maps a component (its string form or index) to a
    ResidueProbe or LoopProbe; components without an entry get an
    automatically chosen rational smooth point. Numeric loops can only
    reject or report candidate orders (``inconclusive-numeric``).
    """
    strategy = dict(strategy or {})
    comps = singular_locus(omega).components
    if not comps:
        return QuasiunipotenceCertificate(QUASI, [], ["empty singular locus: certified vacuously"])
    results = []
    notes = []
    for idx, f in enumerate(comps):
        label = f"{{{f} = 0}}"
        probe = strategy.get(str(f), strategy.get(idx))
        others = [g for g in comps if g is not f]
        if probe is None:
            probe = find_smooth_point(f, others, omega.variables)
            if probe is None:
                results.append(PoleCertificate(label, INCONCLUSIVE, [], [], False, False, [],
                                               method="no rational smooth point found; supply a numeric loop"))
                continue
        if isinstance(probe, ResidueProbe):
            res, order = residue_on_component(omega, probe)
            if res is None:
                loop = strategy.get(("loop", str(f)))
                if isinstance(loop, LoopProbe):
                    probe = loop
                else:
                    results.append(PoleCertificate(label, INCONCLUSIVE, [], [], False, False, [],
                                                   method=f"pole of order {order} and no numeric loop supplied"))
                    continue
            else:
                pc = certify_matrix(res, label)
                pt = ", ".join(f"{k}={v}" for k, v in probe.point.items())
                pc.method = f"residue on transversal line through ({pt})"
                results.append(pc)
                continue
        if isinstance(probe, LoopProbe):
            results.append(_numeric_component(omega, label, probe))
            continue
        raise TypeError(f"unknown probe type {type(probe).__name__}")
    if any(p.resonant for p in results):
        notes.append("resonant spectrum: orders certified for eigenvalues, Jordan structure not asserted")
    return QuasiunipotenceCertificate(_combine([p.verdict for p in results]), results, notes)


def _numeric_component(omega, label, probe: LoopProbe) -> PoleCertificate:
    from .analytic.monodromy import monodromy, root_of_unity_test

    res = monodromy(omega, probe.loop, qmax=None)
    ev = res.eigenvalues
    off = [abs(abs(z) - 1) > 1e-4 for z in ev]
    cands = root_of_unity_test(ev, probe.qmax, 1e-6)
    eig = [f"{z.real:.12g}{z.imag:+.12g}i" for z in ev]
    verdict = REJECTED if any(off) else INCONCLUSIVE_NUMERIC
    return PoleCertificate(label, verdict, eig, [], False, not any(off), [], method="numeric small loop",
                           candidate_orders=cands)
