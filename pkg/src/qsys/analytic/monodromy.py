"""Monodromy of loops, spiders of small loops and root-of-unity tests.

Conventions: a loop ``gamma`` transports the fundamental matrix as
``X -> T_gamma X``; with ``X0`` at the basepoint the monodromy is
``M = X0^-1 T_gamma X0``, so that the continued solution equals ``X M``.
Hence ``M`` of a concatenation ``gamma1 gamma2`` is ``M_2 M_1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .integrator import DEFAULT_TOL, IntegrationError, integrate
from .numeric import NumericFuchsian, as_numeric
from .paths import Arc, Line, PathSpec, lasso

__all__ = [
    "MonodromyResult",
    "SpiderResult",
    "monodromy",
    "monodromy_all",
    "root_of_unity_test",
    "spider",
]


def root_of_unity_test(M, qmax: int = 60, tol: float = 1e-8) -> list:
    """Smallest ``q <= qmax`` with ``|nu^q - 1| < tol`` per eigenvalue, or None.

    ``M`` may be a matrix or a sequence of eigenvalues.
    """
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    arr = np.asarray(M, dtype=complex)
    eig = np.linalg.eigvals(arr) if arr.ndim == 2 else arr.reshape(-1)
    out = []
    for nu in eig:
        if abs(abs(nu) - 1) > tol:
            out.append(None)
            continue
        order = None
        power = 1 + 0j
        for q in range(1, qmax + 1):
            power *= nu
            if abs(power - 1) < tol * q:
                order = q
                break
        out.append(order)
    return out


@dataclass
class MonodromyResult:
    matrix: np.ndarray
    loop: PathSpec
    error_estimate: float
    eigenvalues: np.ndarray
    unit_circle_deviation: np.ndarray
    orders: list | None = None
    label: str = ""
    abel_residual: float | None = None

    def to_dict(self):
        return {
            "label": self.label,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "unit_circle_deviation": [float(x) for x in self.unit_circle_deviation],
            "orders": self.orders,
            "error_estimate": self.error_estimate,
            "abel_residual": self.abel_residual,
        }


def _sorted_eigs(M):
    ev = np.linalg.eigvals(M)
    return ev[np.lexsort((np.round(ev.imag, 9), np.round(ev.real, 9)))]


def monodromy(system, loop: PathSpec, X0=None, tol: float = DEFAULT_TOL, qmax: int | None = 60,
              label: str = "", check_abel: bool = True) -> MonodromyResult:
    if not loop.closed:
        raise ValueError("monodromy needs a closed loop")
    system = as_numeric(system)
    n = system.n
    X0 = np.eye(n, dtype=complex) if X0 is None else np.array(X0, dtype=complex)
    res = integrate(system, loop, X0, tol=tol, check_abel=check_abel)
    M = np.linalg.solve(X0, res.X)
    if abs(np.linalg.det(M)) == 0:
        raise IntegrationError("singular monodromy matrix")
    ev = _sorted_eigs(M)
    dev = np.abs(np.abs(ev) - 1)
    orders = root_of_unity_test(ev, qmax, 1e-6) if qmax else None
    return MonodromyResult(M, loop, res.error_estimate, ev, dev, orders, label, res.abel_residual)


@dataclass
class SpiderResult:
    basepoint: complex
    poles: list
    loops: list  # MonodromyResult per finite pole, in spider order
    infinity: MonodromyResult
    product_residual: float
    order: list = field(default_factory=list)  # indices into the pole list


def _seg_point_distance(p, q, z):
    d = q - p
    L2 = abs(d) ** 2
    u = 0.0 if L2 == 0 else max(0.0, min(1.0, ((z - p) * d.conjugate()).real / L2))
    return abs(p + u * d - z)


RADIUS_FRACTIONS = (0.5, 0.35, 0.25)


def _radii(poles, frac=0.5):
    r = []
    for k, a in enumerate(poles):
        others = [abs(a - b) for j, b in enumerate(poles) if j != k]
        r.append(frac * min(others) if others else None)
    return r


def _admissible(base, poles, radii):
    for k, a in enumerate(poles):
        if abs(base - a) <= 1.5 * radii[k]:
            return False
    for k, a in enumerate(poles):
        for j, b in enumerate(poles):
            if j != k and _seg_point_distance(base, a, b) <= 1.2 * radii[j]:
                return False
    return True


def spider(poles, basepoint=None):
    """Basepoint, loop radii, lasso order and cut direction for ``poles``.

    Small-loop radius is half the distance to the nearest other pole (for a
    single pole, a quarter of its distance to the basepoint); when no
    basepoint admits spokes clear of the other loops at that radius, the
    fractions 0.35 and 0.25 are tried. Lassos are ordered counterclockwise
    by argument seen from the basepoint, starting after the cut ray, which
    bisects the widest angular gap.
    """
    poles = [complex(a) for a in poles]
    c = sum(poles) / len(poles)
    spread = max(abs(a - c) for a in poles)
    if basepoint is None:
        R = 1.0 + 1.5 * spread
        # deterministic search: a ring of angles at growing distances
        candidates = [c + f * R * cmath.exp(1j * (-math.pi / 2 + 0.3 + 0.7 * k))
                      for f in (1.0, 1.6, 2.5, 4.0) for k in range(48)]
        found = None
        for frac in RADIUS_FRACTIONS:
            for b in candidates:
                rad = [0.25 * abs(b - poles[0])] if len(poles) == 1 else _radii(poles, frac)
                if _admissible(b, poles, rad):
                    found = b, rad
                    break
            if found:
                break
        if found is None:
            raise ValueError("no admissible basepoint found for the spider")
        basepoint, radii = found
    else:
        basepoint = complex(basepoint)
        for frac in RADIUS_FRACTIONS:
            radii = [0.25 * abs(basepoint - poles[0])] if len(poles) == 1 else _radii(poles, frac)
            if _admissible(basepoint, poles, radii):
                break
        else:
            raise ValueError("basepoint too close to a pole or spokes cross another loop")
    args = [cmath.phase(a - basepoint) for a in poles]
    srt = sorted(args)
    gaps = [(srt[(k + 1) % len(srt)] - srt[k]) % (2 * math.pi) or 2 * math.pi for k in range(len(srt))]
    k = int(np.argmax(gaps))
    cut = srt[k] + gaps[k] / 2
    order = sorted(range(len(poles)), key=lambda j: (args[j] - cut) % (2 * math.pi))
    return basepoint, radii, order, cut


def _infinity_loop(basepoint, poles, radii, cut):
    R = max(abs(a - basepoint) + r for a, r in zip(poles, radii)) + 1.0
    out = basepoint + R * cmath.exp(1j * cut)
    spoke = Line([basepoint], [out])
    big = Arc([basepoint], R, cut, cut - 2 * math.pi)  # clockwise: positive around infinity
    return PathSpec([spoke, big, spoke.reversed()])


def monodromy_all(F, basepoint=None, X0=None, tol: float = DEFAULT_TOL, qmax: int | None = 60) -> SpiderResult:
    """Small-loop monodromies of a Fuchsian system on a common spider.

    The product residual is ``|| M_inf M_p ... M_1 - I ||`` (max-abs) with
    lassos in spider order: the loops concatenated in that order followed
    by the clockwise loop around infinity are null-homotopic.
    """
    sys = as_numeric(F)
    if not isinstance(sys, NumericFuchsian):
        poles = list(sys.singular_points())
    else:
        poles = list(sys.poles)
    base, radii, order, cut = spider(poles, basepoint)
    loops = []
    for j in order:
        loop = lasso(base, poles[j], radii[j])
        loops.append(monodromy(sys, loop, X0, tol, qmax, label=f"pole {poles[j]:.6g}"))
    inf = monodromy(sys, _infinity_loop(base, poles, radii, cut), X0, tol, qmax, label="infinity")
    n = sys.n
    P = np.eye(n, dtype=complex)
    for r in loops:
        P = r.matrix @ P
    P = inf.matrix @ P
    resid = float(np.max(np.abs(P - np.eye(n))))
    return SpiderResult(base, [poles[j] for j in order], loops, inf, resid, order)
