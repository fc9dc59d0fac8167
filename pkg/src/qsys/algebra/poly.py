"""Sparse multivariate polynomials over Q.

Terms are stored as ``{exponent tuple: Fraction}`` against a variable tuple kept
in natural-sort order, so two polynomials in the same variables always share
a representation. Zero coefficients are never stored.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

__all__ = [
    "Polynomial",
    "poly_gcd",
    "gcd",
    "lcm",
    "var_key",
]

_DIGITS = re.compile(r"(\d+)")


def var_key(name: str):
    """Natural sort key: ``t2`` sorts before ``t10``."""
    return tuple(int(p) if p.isdigit() else p for p in _DIGITS.split(name))


def _sorted_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=var_key))


class Polynomial:
    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Iterable[str] = (), terms: Mapping | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        canon = _sorted_vars(variables)
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            if canon != variables:
                perm = [variables.index(v) for v in canon]
            else:
                perm = None
            for exps, c in terms.items():
                if len(exps) != len(variables):
                    raise ValueError("exponent tuple length does not match variables")
                c = Fraction(c)
                if c == 0:
                    continue
                key = tuple(exps[i] for i in perm) if perm else tuple(exps)
                if any(e < 0 for e in key):
                    raise ValueError("negative exponent")
                clean[key] = clean.get(key, Fraction(0)) + c
                if clean[key] == 0:
                    del clean[key]
        object.__setattr__(self, "variables", canon)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # constructors -----------------------------------------------------------
    @classmethod
    def constant(cls, c, variables: Iterable[str] = ()) -> "Polynomial":
        variables = _sorted_vars(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Iterable[str] = ()) -> "Polynomial":
        variables = _sorted_vars(list(variables) + [name])
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    @classmethod
    def from_univariate(cls, coeffs: Iterable, var: str = "x") -> "Polynomial":
        """Build from coefficients in ascending degree order."""
        return cls((var,), {(k,): c for k, c in enumerate(coeffs)})

    # basic queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def free_variables(self) -> tuple[str, ...]:
        used = set()
        for exps in self.terms:
            for v, e in zip(self.variables, exps):
                if e:
                    used.add(v)
        return tuple(v for v in self.variables if v in used)

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree when ``var`` is None); -1 for zero."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.variables:
            return 0
        i = self.variables.index(var)
        return max(e[i] for e in self.terms)

    def leading_term(self):
        """Leading (exponents, coefficient) in graded lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=lambda e: (sum(e), e))
        return exps, self.terms[exps]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    def integer_coefficients(self) -> list[int]:
        """Coefficients as ints; raises if any coefficient is non-integral."""
        out = []
        for c in self.terms.values():
            if c.denominator != 1:
                raise ValueError("polynomial has non-integer coefficients")
            out.append(c.numerator)
        return out

    # variable handling --------------------------------------------------------
    def with_variables(self, variables: Iterable[str]) -> "Polynomial":
        variables = _sorted_vars(variables)
        missing = set(self.free_variables()) - set(variables)
        if missing:
            raise ValueError(f"cannot drop variables in use: {sorted(missing)}")
        idx = [self.variables.index(v) if v in self.variables else None for v in variables]
        terms = {tuple(e[i] if i is not None else 0 for i in idx): c for e, c in self.terms.items()}
        return Polynomial(variables, terms)

    def pruned(self) -> "Polynomial":
        return self.with_variables(self.free_variables())

    def _aligned(self, other: "Polynomial"):
        if self.variables == other.variables:
            return self.variables, self.terms, other.terms
        vs = _sorted_vars(self.variables + other.variables)
        return vs, self.with_variables(vs).terms, other.with_variables(vs).terms

    @staticmethod
    def _coerce(x, variables=()) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, (int, Fraction)):
            return Polynomial.constant(x, variables)
        raise TypeError(f"cannot coerce {type(x).__name__} to Polynomial")

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        try:
            other = Polynomial._coerce(other, self.variables)
        except TypeError:
            return NotImplemented
        vs, a, b = self._aligned(other)
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(vs, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = Polynomial._coerce(other, self.variables)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(self.variables, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        vs, a, b = self._aligned(other)
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return Polynomial(vs, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Polynomial.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        _, a, b = self._aligned(other)
        return a == b

    def __hash__(self):
        h = self._hash
        if h is None:
            p = self.pruned()
            h = hash((p.variables, frozenset(p.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return bool(self.terms)

    # calculus / evaluation ---------------------------------------------------
    def diff(self, var: str) -> "Polynomial":
        if var not in self.variables:
            return Polynomial(self.variables)
        i = self.variables.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Polynomial(self.variables, out)

    def evaluate(self, point: Mapping):
        """Substitute values (any ring elements) for all free variables."""
        missing = set(self.free_variables()) - set(point)
        if missing:
            raise ValueError(f"no value for variables {sorted(missing)}")
        total = 0
        powers: dict = {}
        for e, c in self.terms.items():
            term = c
            for v, k in zip(self.variables, e):
                if k:
                    key = (v, k)
                    if key not in powers:
                        powers[key] = point[v] ** k
                    term = term * powers[key]
            total = total + term
        return total

    def subs(self, mapping: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Polynomial composition: replace variables by polynomials."""
        keep = [v for v in self.variables if v not in mapping]
        result = Polynomial.constant(0, keep)
        powers: dict = {}
        for e, c in self.terms.items():
            rest = tuple(k for v, k in zip(self.variables, e) if v not in mapping)
            term = Polynomial(keep, {rest: c})
            for v, k in zip(self.variables, e):
                if k and v in mapping:
                    key = (v, k)
                    if key not in powers:
                        powers[key] = Polynomial._coerce(mapping[v]) ** k
                    term = term * powers[key]
            result = result + term
        return result

    # univariate views ---------------------------------------------------------
    def coeffs_in(self, var: str) -> dict[int, "Polynomial"]:
        """View as polynomial in ``var``: ``{k: coefficient of var**k}``."""
        if var not in self.variables:
            return {0: self} if self.terms else {}
        i = self.variables.index(var)
        buckets: dict[int, dict] = {}
        for e, c in self.terms.items():
            ne = list(e)
            ne[i] = 0
            buckets.setdefault(e[i], {})[tuple(ne)] = c
        return {k: Polynomial(self.variables, t) for k, t in buckets.items()}

    def lc_in(self, var: str) -> "Polynomial":
        cs = self.coeffs_in(var)
        if not cs:
            return Polynomial(self.variables)
        return cs[max(cs)]

    def univariate_coeffs(self) -> list[Fraction]:
        """Ascending coefficient list of a polynomial in at most one variable."""
        free = self.free_variables()
        if len(free) > 1:
            raise ValueError(f"polynomial is not univariate: {free}")
        if not self.terms:
            return []
        if not free:
            return [self.constant_value()]
        i = self.variables.index(free[0])
        deg = self.degree(free[0])
        out = [Fraction(0)] * (deg + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return out

    # normalization ------------------------------------------------------------
    def primitive(self) -> tuple[Fraction, "Polynomial"]:
        """Split ``self = scale * prim`` with ``prim`` integral, content 1 and
        positive leading coefficient."""
        if not self.terms:
            return Fraction(0), self
        den = reduce(math.lcm, (c.denominator for c in self.terms.values()), 1)
        nums = [int(c * den) for c in self.terms.values()]
        g = reduce(math.gcd, (abs(x) for x in nums), 0)
        scale = Fraction(g, den)
        if self.leading_coefficient() < 0:
            scale = -scale
        return scale, Polynomial(self.variables, {e: c / scale for e, c in self.terms.items()})

    def normalized(self) -> "Polynomial":
        return self.primitive()[1]

    # division -----------------------------------------------------------------
    def divmod_lex(self, other: "Polynomial"):
        """Multivariate division by a single divisor (lex order)."""
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        vs, a, b = self._aligned(other)
        lead_b = max(b)
        cb = b[lead_b]
        rem = dict(a)
        quot: dict = {}
        out_rem: dict = {}
        while rem:
            e = max(rem)
            c = rem[e]
            if all(x >= y for x, y in zip(e, lead_b)):
                qe = tuple(x - y for x, y in zip(e, lead_b))
                qc = c / cb
                quot[qe] = quot.get(qe, 0) + qc
                for eb, c2 in b.items():
                    te = tuple(x + y for x, y in zip(qe, eb))
                    nv = rem.get(te, 0) - qc * c2
                    if nv == 0:
                        rem.pop(te, None)
                    else:
                        rem[te] = nv
            else:
                out_rem[e] = c
                del rem[e]
        return Polynomial(vs, quot), Polynomial(vs, out_rem)

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = self.divmod_lex(other)
        if r.terms:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def divides(self, other: "Polynomial") -> bool:
        """True when ``self`` divides ``other`` exactly."""
        return not other.divmod_lex(self)[1].terms

    def pseudo_divmod(self, other: "Polynomial", var: str):
        """``lc(other)**k * self = q * other + r`` with ``deg_var r < deg_var other``.

        Returns ``(k, q, r)``.
        """
        db = other.degree(var)
        if db < 0:
            raise ZeroDivisionError("pseudo-division by zero polynomial")
        lc = other.lc_in(var)
        x = Polynomial.var(var, self.variables + other.variables)
        r = self
        q = Polynomial.constant(0, r.variables)
        k = 0
        while r.terms and r.degree(var) >= db:
            shift = r.degree(var) - db
            t = r.lc_in(var) * x ** shift
            q = q * lc + t
            r = r * lc - t * other
            k += 1
        return k, q, r

    def prem(self, other: "Polynomial", var: str) -> "Polynomial":
        return self.pseudo_divmod(other, var)[2]

    # display ------------------------------------------------------------------
    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[e]
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.variables, e) if k
            )
            if not mono:
                s = str(abs(c))
            elif abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+", s))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out


# ----------------------------------------------------------------------------
# gcd machinery
# ----------------------------------------------------------------------------

def _content_in(p: Polynomial, var: str) -> Polynomial:
    return reduce(gcd, p.coeffs_in(var).values(), Polynomial(p.variables))


def _specialize(p: Polynomial, keep: str, point: Mapping[str, int]) -> Polynomial:
    """Univariate polynomial in ``keep`` after substituting integers for the
    other variables."""
    i = p.variables.index(keep)
    out: dict = {}
    for e, c in p.terms.items():
        val = c
        for v, k in zip(p.variables, e):
            if k and v != keep:
                val *= point[v] ** k
        out[(e[i],)] = out.get((e[i],), 0) + val
    return Polynomial((keep,), out)


def _coprime_in(a: Polynomial, b: Polynomial, v: str, others) -> bool:
    """Exact sufficient test for ``deg_v gcd(a, b) = 0``.

    At a point where neither leading coefficient in ``v`` vanishes, the gcd
    specialises to a divisor of the specialised gcd of the same degree in
    ``v``; a constant specialised gcd therefore proves coprimality in ``v``.
    """
    la, lb = a.lc_in(v), b.lc_in(v)
    for k in range(1, 8):
        point = {w: (k * (j + 2) + j * j) * (-1) ** (k + j) for j, w in enumerate(others)}
        if la.evaluate(point) == 0 or lb.evaluate(point) == 0:
            continue
        return gcd(_specialize(a, v, point), _specialize(b, v, point)).degree(v) <= 0
    return False


def _int_terms(p: Polynomial) -> dict:
    return {e: int(c) for e, c in p.terms.items()}


def _heu(f: dict, g: dict, nv: int):
    """Heuristic gcd of integer polynomials given as exponent dicts.

    Evaluates the last variable at a large integer ``xi``, recurses, and
    rebuilds a candidate from the symmetric ``xi``-adic digits of the
    result. Returns a candidate or None; callers verify it by division.
    """
    if nv == 0:
        return {(): math.gcd(f[()], g[()])}
    nf = max(abs(c) for c in f.values())
    ng = max(abs(c) for c in g.values())
    xi = 2 * min(nf, ng) + 29
    for _ in range(6):
        ff: dict = {}
        gg: dict = {}
        for src, dst in ((f, ff), (g, gg)):
            for e, c in src.items():
                k = e[:-1]
                dst[k] = dst.get(k, 0) + c * xi ** e[-1]
            for k in [k for k, c in dst.items() if c == 0]:
                del dst[k]
        if ff and gg:
            h = _heu(ff, gg, nv - 1)
            if h is not None:
                out: dict = {}
                for e, c in h.items():
                    k = 0
                    while c:
                        d = c % xi
                        if d > xi // 2:
                            d -= xi
                        if d:
                            out[e + (k,)] = d
                        c = (c - d) // xi
                        k += 1
                return out
        xi = xi * 73794 // 27011
    return None


def _heuristic_gcd(a: Polynomial, b: Polynomial):
    """Verified heuristic gcd of primitive integral polynomials, or None."""
    vs = a.variables
    h = _heu(_int_terms(a), _int_terms(b), len(vs))
    if not h:
        return None
    H = Polynomial(vs, h).normalized()
    if H.divides(a) and H.divides(b):
        return H
    return None


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Full gcd over Q, normalized (integral, content 1, positive lead).

    Subresultant pseudo-remainder sequence in the first variable that occurs;
    contents are handled by recursion on the remaining variables.
    """
    vs = _sorted_vars(p.variables + q.variables)
    p, q = p.with_variables(vs), q.with_variables(vs)
    if not p.terms:
        return q.normalized() if q.terms else q
    if not q.terms:
        return p.normalized()
    present = [v for v in vs if p.degree(v) > 0 or q.degree(v) > 0]
    if not present:
        return Polynomial.constant(1, vs)
    pa, pb = p.primitive(), q.primitive()
    if len(present) > 1:
        # integer evaluation is much cheaper than remainder sequences over Q
        H = _heuristic_gcd(pa[1], pb[1])
        if H is not None:
            return H
    v = present[0]
    if p.degree(v) == 0:
        return gcd(p, _content_in(q, v))
    if q.degree(v) == 0:
        return gcd(_content_in(p, v), q)
    cp, cq = _content_in(p, v), _content_in(q, v)
    a, b = p.exact_div(cp).primitive()[1], q.exact_div(cq).primitive()[1]
    if a.degree(v) < b.degree(v):
        a, b = b, a
    others = [w for w in present if w != v]
    if others and _coprime_in(a, b, v, others):
        return gcd(cp, cq).normalized()
    # subresultant remainder sequence: exact divisions keep coefficient growth
    # polynomial without recomputing contents at every step
    g = h = Polynomial.constant(1, vs)
    while True:
        delta = a.degree(v) - b.degree(v)
        k, _, r = a.pseudo_divmod(b, v)
        if not r.terms:
            break
        if r.degree(v) == 0:
            b = Polynomial.constant(1, vs)
            break
        r = r * b.lc_in(v) ** (delta + 1 - k)  # the sequence needs lc^(delta+1) exactly
        a, b = b, r.exact_div(g * h ** delta)
        g = a.lc_in(v)
        if delta:
            h = (g ** delta).exact_div(h ** (delta - 1))
    g = b.exact_div(_content_in(b, v)) if b.degree(v) > 0 else Polynomial.constant(1, vs)
    return (gcd(cp, cq) * g).normalized()


def lcm(p: Polynomial, q: Polynomial) -> Polynomial:
    if not p.terms or not q.terms:
        return Polynomial(_sorted_vars(p.variables + q.variables))
    return (p * q).exact_div(gcd(p, q)).normalized()


def poly_gcd(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """Gcd in ``var`` over the fraction field of the remaining variables.

    The result is the primitive part (in ``var``) of the full gcd, normalized
    to integer coefficients with content 1 and positive leading coefficient.
    A polynomial of degree 0 in ``var`` is a unit there, so the gcd is 1.
    """
    if not p.terms and not q.terms:
        raise ValueError("gcd of zeros")
    g = gcd(p, q)
    if g.degree(var) <= 0:
        return Polynomial.constant(1, g.variables)
    return g.exact_div(_content_in(g, var)).normalized()


def squarefree_part(p: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors of ``p`` (up to units)."""
    if not p.terms or p.is_constant():
        return Polynomial.constant(1, p.variables) if p.terms else p
    g = p
    for v in p.free_variables():
        g = gcd(g, p.diff(v))
    return p.exact_div(g).normalized()


def coprime_squarefree_basis(polys: Iterable[Polynomial]) -> list[Polynomial]:
    """Pairwise coprime, squarefree, non-constant polynomials whose product has
    the same zero set as the product of ``polys``."""
    basis: list[Polynomial] = []
    for p in polys:
        p = squarefree_part(p) if p.terms else p
        if not p.terms or p.is_constant():
            continue
        pending = [p]
        while pending:
            f = pending.pop()
            if f.is_constant():
                continue
            for i, b in enumerate(basis):
                g = gcd(f, b)
                if not g.is_constant():
                    basis.pop(i)
                    for piece in (g, b.exact_div(g), f.exact_div(g)):
                        if not piece.is_constant():
                            pending.append(piece.normalized())
                    break
            else:
                basis.append(f.normalized())
    basis.sort(key=lambda b: (b.degree(), str(b)))
    return basis
