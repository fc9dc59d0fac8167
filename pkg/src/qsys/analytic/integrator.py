"""Adaptive Dormand-Prince 5(4) transport of fundamental matrices along paths.

The step size is capped by ``dist(gamma(s), locus) / (4 |gamma'(s)|)`` so
that steps stay well resolved where the coefficients blow up.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sp_integrate

from .numeric import as_numeric
from .paths import PathSpec

__all__ = [
    "IntegrationError",
    "IntegrationResult",
    "integrate",
    "transport_segment",
    "trace_integral",
]

# Dormand-Prince 5(4) tableau; the solution is advanced with the 5th order
# weights (local extrapolation), the error uses the difference to the 4th.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_BSTAR = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _BSTAR

DEFAULT_TOL = 1e-12


class IntegrationError(RuntimeError):
    """Step-size collapse or an invalid initial condition."""

    def __init__(self, message, point=None, nearest=None):
        super().__init__(message)
        self.point = point
        self.nearest = nearest


@dataclass
class IntegrationResult:
    X: np.ndarray
    error_estimate: float  # sum of accepted local error estimates (relative)
    max_local_error: float
    steps: int
    rejected: int
    trace_integral: complex | None = None
    abel_residual: float | None = None  # |det X - det X0 exp(int tr Omega)|
    abel_relative: float | None = None


def _pulled_back(system, seg):
    """``W(s) = sum_k Omega_k(gamma(s)) gamma_k'(s)`` for one segment."""
    coeffs = system.coeffs

    def W(s):
        C = coeffs(seg.point(s))
        return np.tensordot(seg.deriv(s), C, axes=1)

    return W


def _ceiling(system, seg, s):
    dist, label = system.nearest_singular(seg.point(s))
    speed = float(np.linalg.norm(seg.deriv(s)))
    if speed == 0:
        return math.inf, dist, label
    return dist / (4 * speed), dist, label


def transport_segment(system, seg, s0, s1, Y, tol=DEFAULT_TOL, h0=None, max_steps=200_000):
    """Advance ``Y`` along ``seg`` from parameter ``s0`` to ``s1 > s0``.

    Returns ``(Y, err_sum, err_max, steps, rejected, h_last)``.
    """
    system = as_numeric(system)
    W = _pulled_back(system, seg)
    s = float(s0)
    span = float(s1) - s
    if span < 0:
        raise ValueError("transport_segment integrates forward in the parameter")
    Y = np.array(Y, dtype=complex)
    if span == 0:
        return Y, 0.0, 0.0, 0, 0, h0
    cap, dist, label = _ceiling(system, seg, s)
    if dist == 0:
        raise IntegrationError(f"path starts on the singular locus ({label})", seg.point(s), label)
    # collapse threshold: relative for short spans, never below a few ulps of s1
    floor = max(min(1e-14 * max(1.0, span), 1e-3 * span), 4 * float(np.spacing(abs(float(s1)))))
    h = max(min(span, cap, h0 if h0 else 0.02 * span), min(span, 10 * floor))
    err_sum = err_max = 0.0
    steps = rejected = 0
    K = [None] * 7
    K[0] = W(s) @ Y
    while s < s1:
        if s1 - s <= floor:
            # rounding remainder below the step floor
            break
        if steps + rejected > max_steps:
            raise IntegrationError(
                f"step budget exhausted near s={s:.6g} (nearest singular point: {label})",
                seg.point(s), label,
            )
        cap, dist, label = _ceiling(system, seg, s)
        h = min(h, cap, s1 - s)
        if h < floor:
            raise IntegrationError(
                f"step size collapsed at {seg.point(s).tolist()} (nearest singular point: {label}, distance {dist:.3g})",
                seg.point(s), label,
            )
        for i in range(1, 7):
            acc = Y.copy()
            for j, a in enumerate(_A[i]):
                if a:
                    acc = acc + (h * a) * K[j]
            K[i] = W(s + _C[i] * h) @ acc
        Ynew = acc  # row 7 of the tableau equals the 5th order weights
        errv = h * sum(e * k for e, k in zip(_E, K) if e)
        scale = max(float(np.max(np.abs(Y))), float(np.max(np.abs(Ynew))), 1e-300)
        err = float(np.max(np.abs(errv))) / scale
        if not np.isfinite(err) or not np.all(np.isfinite(Ynew)):
            rejected += 1
            h *= 0.2
            continue
        if err <= tol:
            s = s + h if s + h < s1 else s1
            Y = Ynew
            K[0] = K[6]
            err_sum += err
            err_max = max(err_max, err)
            steps += 1
            fac = 5.0 if err == 0 else min(5.0, 0.9 * (tol / err) ** 0.2)
            h = h * max(fac, 0.2)
        else:
            rejected += 1
            h = h * max(0.2, 0.9 * (tol / err) ** 0.2)
    return Y, err_sum, err_max, steps, rejected, h


def trace_integral(system, path: PathSpec) -> complex:
    """``int_path tr Omega`` by adaptive quadrature (independent of the ODE solver)."""
    system = as_numeric(system)
    total = 0j
    for seg in path.segments:
        W = _pulled_back(system, seg)

        def tr(s, part):
            v = complex(np.trace(W(s)))
            return v.real if part == 0 else v.imag

        with warnings.catch_warnings():
            # roundoff warnings only mean the requested 1e-14 is out of reach
            warnings.simplefilter("ignore", _sp_integrate.IntegrationWarning)
            re = _sp_integrate.quad(tr, 0.0, 1.0, args=(0,), epsabs=1e-14, epsrel=1e-13, limit=400)[0]
            im = _sp_integrate.quad(tr, 0.0, 1.0, args=(1,), epsabs=1e-14, epsrel=1e-13, limit=400)[0]
        total += complex(re, im)
    return total


def integrate(system, path: PathSpec, X0=None, tol: float = DEFAULT_TOL, check_abel: bool = True) -> IntegrationResult:
    """Continue the fundamental matrix ``X0`` along ``path``.

    ``tol`` is the local relative tolerance per step. When ``check_abel``
    is set the Abel identity ``det X = det X0 exp(int tr Omega)`` is
    evaluated with an independent quadrature of the trace.
    """
    system = as_numeric(system)
    n = system.n
    X0 = np.eye(n, dtype=complex) if X0 is None else np.array(X0, dtype=complex)
    if X0.shape != (n, n):
        raise IntegrationError(f"initial matrix must be {n}x{n}")
    d0 = np.linalg.det(X0)
    if not np.isfinite(d0) or abs(d0) < 1e-300 or np.linalg.cond(X0) > 1e14:
        raise IntegrationError("initial matrix is not invertible")
    if path.dim != system.m:
        raise IntegrationError(f"path lives in C^{path.dim} but the system has {system.m} variables")
    Y = X0
    err_sum = err_max = 0.0
    steps = rejected = 0
    h = None
    for seg in path.segments:
        Y, es, em, st, rj, h = transport_segment(system, seg, 0.0, 1.0, Y, tol, h0=None)
        err_sum += es
        err_max = max(err_max, em)
        steps += st
        rejected += rj
    res = IntegrationResult(Y, err_sum, err_max, steps, rejected)
    if check_abel:
        ti = trace_integral(system, path)
        expected = d0 * np.exp(ti)
        resid = abs(np.linalg.det(Y) - expected)
        res.trace_integral = ti
        res.abel_residual = float(resid)
        res.abel_relative = float(resid / abs(expected)) if expected != 0 else math.inf
    return res
