"""Floating-point evaluators for Pfaffian systems.

Every evaluator exposes ``n``, ``m``, ``coeffs(point)`` returning the stack
of matrices ``Omega_k(point)`` with shape ``(m, n, n)``, and
``nearest_singular(point)`` returning ``(distance, label)``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..algebra.numbers import exact_to_complex
from ..algebra.poly import Polynomial
from ..pfaffian import FuchsianSystem, MatrixOneForm, singular_locus

__all__ = [
    "NumericFuchsian",
    "CompiledForm",
    "RestrictedSystem",
    "as_numeric",
]


class NumericFuchsian:
    """``sum_j A_j / (t - a_j)`` with complex poles and residues."""

    m = 1

    def __init__(self, poles: Sequence[complex], residues):
        self.poles = np.asarray(poles, dtype=complex).reshape(-1)
        self.residues = np.asarray(residues, dtype=complex)
        if self.residues.ndim != 3 or self.residues.shape[0] != self.poles.size:
            raise ValueError("residues must have shape (poles, n, n)")
        if self.residues.shape[1] != self.residues.shape[2]:
            raise ValueError("residues must be square")
        self.n = self.residues.shape[1]

    @classmethod
    def from_exact(cls, F: FuchsianSystem) -> "NumericFuchsian":
        poles = [exact_to_complex(a) for a in F.poles]
        res = [[[exact_to_complex(x) for x in row] for row in A] for A in F.residues]
        return cls(poles, res)

    @property
    def residue_at_infinity(self) -> np.ndarray:
        return -self.residues.sum(axis=0)

    def singular_points(self) -> np.ndarray:
        return self.poles

    def coeffs(self, point) -> np.ndarray:
        t = complex(np.ravel(point)[0])
        w = 1.0 / (t - self.poles)
        return np.tensordot(w, self.residues, axes=1)[None]

    def trace(self, point) -> complex:
        t = complex(np.ravel(point)[0])
        return complex(np.sum(np.trace(self.residues, axis1=1, axis2=2) / (t - self.poles)))

    def nearest_singular(self, point):
        t = complex(np.ravel(point)[0])
        d = np.abs(t - self.poles)
        k = int(np.argmin(d))
        return float(d[k]), f"t = {_fmt(self.poles[k])}"


def _fmt(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


class _PolyBank:
    """A list of polynomials evaluated together through a shared monomial table."""

    def __init__(self, polys: Sequence[Polynomial], variables: tuple[str, ...]):
        exps: dict[tuple, int] = {}
        rows = []
        for p in polys:
            row = {}
            pos = [variables.index(v) if v in variables else None for v in p.variables]
            for e, c in p.terms.items():
                full = [0] * len(variables)
                for k, ek in zip(pos, e):
                    if k is not None:
                        full[k] = ek
                    elif ek:
                        raise ValueError("polynomial uses a variable outside the system")
                key = tuple(full)
                idx = exps.setdefault(key, len(exps))
                row[idx] = row.get(idx, 0.0) + float(c)
            rows.append(row)
        self.exponents = np.array(list(exps), dtype=int).reshape(len(exps), len(variables))
        self.coef = np.zeros((len(polys), len(exps)))
        for i, row in enumerate(rows):
            for j, c in row.items():
                self.coef[i, j] = c
        self.maxdeg = int(self.exponents.max()) if self.exponents.size else 0

    def __call__(self, t: np.ndarray) -> np.ndarray:
        if not len(self.exponents):
            return np.zeros(self.coef.shape[0], dtype=complex)
        # powers[k, e] = t_k ** e
        powers = t[:, None] ** np.arange(self.maxdeg + 1)[None, :]
        mono = np.prod(powers[np.arange(len(t))[None, :], self.exponents], axis=1)
        return self.coef @ mono


class CompiledForm:
    """Numeric evaluator of an exact MatrixOneForm."""

    def __init__(self, omega: MatrixOneForm):
        self.omega = omega
        self.variables = omega.variables
        self.n, self.m = omega.n, omega.m
        index, nums, dens = [], [], []
        for i, row in enumerate(omega.entries):
            for j, cell in enumerate(row):
                for k, c in enumerate(cell):
                    if not c.is_zero():
                        index.append((k, i, j))
                        nums.append(c.numerator)
                        dens.append(c.denominator)
        self._index = tuple(np.array(x, dtype=int) for x in zip(*index)) if index else None
        self._num = _PolyBank(nums, self.variables)
        self._den = _PolyBank(dens, self.variables)
        self.locus = singular_locus(omega).components
        self._locus_bank = _PolyBank(self.locus, self.variables) if self.locus else None
        self._grad_banks = (
            [_PolyBank([f.diff(v) for f in self.locus], self.variables) for v in self.variables]
            if self.locus
            else None
        )
        self._roots = None
        if self.m == 1 and self.locus:
            roots = []
            for f in self.locus:
                coeffs = [float(c) for c in reversed(f.with_variables(self.variables).univariate_coeffs())]
                roots.extend(np.roots(coeffs))
            self._roots = np.array(roots, dtype=complex)

    def singular_points(self) -> np.ndarray:
        if self.m != 1:
            raise ValueError("singular points are listed only for one-variable forms")
        return self._roots if self._roots is not None else np.zeros(0, dtype=complex)

    def coeffs(self, point) -> np.ndarray:
        t = np.atleast_1d(np.asarray(point, dtype=complex))
        out = np.zeros((self.m, self.n, self.n), dtype=complex)
        if self._index is not None:
            out[self._index] = self._num(t) / self._den(t)
        return out

    def nearest_singular(self, point):
        if self._locus_bank is None:
            return math.inf, "none"
        t = np.atleast_1d(np.asarray(point, dtype=complex))
        if self._roots is not None:
            d = np.abs(t[0] - self._roots)
            k = int(np.argmin(d))
            return float(d[k]), f"{self.variables[0]} = {_fmt(self._roots[k])}"
        vals = np.abs(self._locus_bank(t))
        grads = np.sqrt(sum(np.abs(g(t)) ** 2 for g in self._grad_banks))
        with np.errstate(divide="ignore", invalid="ignore"):
            est = np.where(grads > 0, vals / grads, np.where(vals == 0, 0.0, math.inf))
        k = int(np.argmin(est))
        return float(est[k]), f"component {self.locus[k]} = 0"


class RestrictedSystem:
    """Restriction of an m-variable evaluator to the line ``u -> p0 + u v``."""

    m = 1

    def __init__(self, system, p0, v):
        self.base = system
        self.p0 = np.atleast_1d(np.asarray(p0, dtype=complex))
        self.v = np.atleast_1d(np.asarray(v, dtype=complex))
        if self.p0.shape != (system.m,) or self.v.shape != (system.m,):
            raise ValueError("line point and direction must have one entry per variable")
        if not np.any(self.v):
            raise ValueError("zero line direction")
        self.n = system.n
        self._scale = float(np.linalg.norm(self.v))

    def coeffs(self, point) -> np.ndarray:
        u = complex(np.ravel(point)[0])
        C = self.base.coeffs(self.p0 + u * self.v)
        return np.tensordot(self.v, C, axes=1)[None]

    def nearest_singular(self, point):
        u = complex(np.ravel(point)[0])
        d, label = self.base.nearest_singular(self.p0 + u * self.v)
        return d / self._scale, label

    def singular_points(self) -> np.ndarray:
        base = self.base
        if not isinstance(base, CompiledForm) or base._locus_bank is None:
            return np.zeros(0, dtype=complex)
        # interpolate each restricted component on roots of unity
        pts = []
        for f in base.locus:
            deg = max(f.degree(), 1)
            N = deg + 1
            w = np.exp(2j * np.pi * np.arange(N) / N)
            vals = np.array([_PolyBank([f], base.variables)(self.p0 + u * self.v)[0] for u in w])
            coeffs = np.fft.fft(vals) / N  # coefficient of u^k at index k
            c = np.trim_zeros(np.where(np.abs(coeffs) > 1e-12 * np.max(np.abs(coeffs)), coeffs, 0), "b")
            if len(c) > 1:
                pts.extend(np.roots(c[::-1]))
        return np.array(pts, dtype=complex)


def as_numeric(system):
    """Accept a FuchsianSystem, MatrixOneForm or an evaluator."""
    if isinstance(system, FuchsianSystem):
        return NumericFuchsian.from_exact(system)
    if isinstance(system, MatrixOneForm):
        return CompiledForm(system)
    if hasattr(system, "coeffs") and hasattr(system, "nearest_singular"):
        return system
    raise TypeError(f"cannot evaluate {type(system).__name__} numerically")
