"""Explicit zero-count bounds: the Euler bound, the double-exponential bound in
rho, the complexity bound and its monomial-extension variant.

Huge bounds are carried as ``log2`` and ``log2 log2`` magnitudes. Polynomial
constants that are not printed in the literature are configuration values
(default 1) and every report marks them ``configurable-default``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath

from .algebra.numbers import GaussianRational, as_exact
from .algebra.parse import parse_number
from .pfaffian import ComplexityReport, FuchsianSystem, rho

__all__ = [
    "BoundReport",
    "BoundsConfig",
    "euler_bound",
    "rho_bound",
    "q_bound",
    "field_extension_bound",
    "poly_nm",
    "within_bound",
]

PUBLISHED = "published-explicit"
DEFAULT = "configurable-default"


@dataclass
class BoundsConfig:
    """Coefficients of the unprinted polynomials.

    ``rho_poly_coeffs`` maps ``"a,b"`` to the coefficient of ``n^a m^b``
    (missing monomials use ``rho_poly_default``); ``*_override`` replaces
    the polynomial value outright.
    """

    rho_poly_coeffs: dict = field(default_factory=dict)
    rho_poly_default: float = 1.0
    rho_poly_override: float | None = None
    q_poly_K: float = 1.0
    q_poly_override: float | None = None
    field_ext_poly: list = field(default_factory=lambda: [0.0, 1.0])

    @classmethod
    def from_dict(cls, data: Mapping | None) -> "BoundsConfig":
        data = dict(data or {})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown bound configuration keys {sorted(unknown)}")
        return cls(**data)


@dataclass
class BoundReport:
    kind: str
    value: str | None  # decimal rendering when the bound is representable
    log2: float | None
    log2log2: float | None
    inputs: dict
    constants: list  # [{"name", "value", "provenance"}]
    formula: str
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BoundReport":
        return cls(**json.loads(text))

    @property
    def value_float(self) -> float | None:
        return None if self.value is None else float(self.value)


def within_bound(count: int, report: BoundReport) -> bool:
    """``count <= bound``, compared in log space."""
    if count <= 0:
        return True
    if report.log2 is not None:
        return math.log2(count) <= report.log2 + 1e-12
    # log2 not representable: the bound exceeds 2^(1e308)
    return report.log2log2 is not None and report.log2log2 > 0


def _log_fields(log2_value):
    """(value, log2, log2log2) from an mpmath log2 magnitude."""
    lv = mpmath.mpf(log2_value)
    l2 = float(lv) if mpmath.isfinite(lv) and abs(lv) < 1e308 else None
    l2l2 = float(mpmath.log(lv, 2)) if lv > 0 else None
    value = None
    if l2 is not None and l2 < 1000:
        value = mpmath.nstr(mpmath.power(2, lv), 17)
    return value, l2, l2l2


def euler_bound(spectrum: Sequence) -> BoundReport:
    """``(n - 1) + 2 pi |lambda_1 - lambda_n|`` for a real spectrum."""
    lam = []
    for x in spectrum:
        if isinstance(x, str):
            x = parse_number(x)
        if isinstance(x, complex) and x.imag != 0:
            raise ValueError("Euler bound requires real spectrum")
        if isinstance(x, GaussianRational) and x.imag != 0:
            raise ValueError("Euler bound requires real spectrum")
        lam.append(as_exact(x) if not isinstance(x, float) else Fraction(x))
    if not lam:
        raise ValueError("empty spectrum")
    lam = sorted(lam)
    n = len(lam)
    spread = abs(lam[-1] - lam[0])
    with mpmath.workdps(40):
        v = (n - 1) + 2 * mpmath.pi * (mpmath.mpf(spread.numerator) / spread.denominator)
        value = mpmath.nstr(v, 17)
        l2 = float(mpmath.log(v, 2)) if v > 0 else None
        l2l2 = float(mpmath.log(mpmath.log(v, 2), 2)) if v > 2 else None
    return BoundReport(
        kind="euler",
        value=value,
        log2=l2,
        log2log2=l2l2,
        inputs={"n": n, "spectrum": [str(x) for x in lam]},
        constants=[{"name": "2*pi", "value": "2*pi", "provenance": PUBLISHED}],
        formula=f"({n} - 1) + 2*pi*|{lam[0]} - {lam[-1]}|",
        extra={"spread": str(spread), "exact": f"{n - 1} + 2*pi*{spread}"},
    )


def poly_nm(n: int, m: int, config: BoundsConfig) -> tuple[float, int]:
    """Full polynomial in ``n, m`` of degree ``1 + m n^2 + m``."""
    deg = 1 + m * n * n + m
    total = 0.0
    for a in range(deg + 1):
        for b in range(deg + 1 - a):
            c = config.rho_poly_coeffs.get(f"{a},{b}", config.rho_poly_default)
            total += float(c) * float(n) ** a * float(m) ** b
    return total, deg


def rho_bound(F: FuchsianSystem, config: BoundsConfig | None = None, m: int = 1) -> BoundReport:
    """``rho^(2^Poly(n, m))``."""
    config = config or BoundsConfig()
    r = rho(F)
    n = F.n
    if config.rho_poly_override is not None:
        P, deg = float(config.rho_poly_override), None
        consts = [{"name": "Poly(n,m)", "value": P, "provenance": DEFAULT}]
    else:
        P, deg = poly_nm(n, m, config)
        consts = [
            {"name": "Poly(n,m) coefficients", "value": config.rho_poly_coeffs or config.rho_poly_default,
             "provenance": DEFAULT},
        ]
    consts.append({"name": "matrix norm", "value": "max-abs entry", "provenance": DEFAULT})
    with mpmath.workdps(40):
        log2 = mpmath.power(2, P) * mpmath.log(r, 2)
        value, l2, l2l2 = _log_fields(log2)
        if l2l2 is None or mpmath.isinf(log2):
            l2l2 = float(P + mpmath.log(mpmath.log(r, 2), 2))
    return BoundReport(
        kind="rho-double-exponential",
        value=value,
        log2=l2,
        log2log2=l2l2,
        inputs={"n": n, "m": m, "rho": mpmath.nstr(r, 20), "poly_degree": deg, "poly_value": P},
        constants=consts,
        formula="rho^(2^Poly(n,m))",
    )


def q_bound(C: ComplexityReport, config: BoundsConfig | None = None) -> BoundReport:
    """``s^(2^Poly(d,n,m))`` with ``Poly = K d^5 m^5 n^20``."""
    config = config or BoundsConfig()
    if C.s < 2:
        raise ValueError("q_bound requires s >= 2")
    if config.q_poly_override is not None:
        P = float(config.q_poly_override)
        consts = [{"name": "Poly(d,n,m)", "value": P, "provenance": DEFAULT}]
    else:
        P = float(config.q_poly_K) * float(C.d) ** 5 * float(C.m) ** 5 * float(C.n) ** 20
        consts = [{"name": "K", "value": config.q_poly_K, "provenance": DEFAULT}]
    with mpmath.workdps(40):
        log2 = mpmath.power(2, P) * mpmath.log(C.s, 2)
        value, l2, l2l2 = _log_fields(log2)
        if l2l2 is None or mpmath.isinf(log2):
            l2l2 = float(P + mpmath.log(mpmath.log(C.s, 2), 2))
    return BoundReport(
        kind="q-complexity",
        value=value,
        log2=l2,
        log2log2=l2l2,
        inputs={"s": str(C.s), "d": C.d, "n": C.n, "m": C.m, "poly_value": P},
        constants=consts,
        formula="s^(2^(K*d^5*m^5*n^20))",
    )


def field_extension_bound(C: ComplexityReport, delta: int, config: BoundsConfig | None = None,
                          extension: ComplexityReport | None = None) -> BoundReport:
    """q_bound of the monomial-extension system of degree ``delta``.

    Without an explicit ``extension`` report the extension's parameters are
    taken from the construction: ``n' = C(m + n^2 + delta, delta)``
    coordinates, the same degree ``d`` and ``s' = max(2, delta * s)``.
    """
    if delta < 1:
        raise ValueError("field_extension_bound requires delta >= 1")
    config = config or BoundsConfig()
    if extension is None:
        n_ext = math.comb(C.m + C.n * C.n + delta, delta)
        extension = ComplexityReport(s=max(2, delta * C.s), d=C.d, n=n_ext, m=C.m)
    rep = q_bound(extension, config)
    P_delta = sum(float(c) * float(delta) ** k for k, c in enumerate(config.field_ext_poly))
    direct_log2log2 = P_delta  # log2 log2 of 2^(2^Poly(delta))
    rep.kind = "field-extension"
    rep.formula = "q_bound(monomial extension of degree delta); direct shape 2^(2^Poly(delta))"
    rep.inputs = dict(rep.inputs, delta=delta, base={"s": str(C.s), "d": C.d, "n": C.n, "m": C.m})
    rep.constants = rep.constants + [{"name": "Poly(delta) coefficients", "value": list(config.field_ext_poly),
                                      "provenance": DEFAULT}]
    rep.extra = {"extension": {"s": str(extension.s), "d": extension.d, "n": extension.n, "m": extension.m},
                 "direct_log2log2": direct_log2log2}
    return rep
