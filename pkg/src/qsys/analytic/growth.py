"""Growth exponent of ``|X| + |X^-1|`` approaching a singular point."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .integrator import DEFAULT_TOL, IntegrationError, transport_segment
from .numeric import as_numeric
from .paths import Line

__all__ = ["GrowthEstimate", "growth_exponent"]

OVERFLOW = 1e250


@dataclass
class GrowthEstimate:
    exponent: float | None
    super_polynomial: bool
    distances: np.ndarray
    log_size: np.ndarray
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "exponent": self.exponent,
            "super_polynomial": self.super_polynomial,
            "distances": [float(x) for x in self.distances],
            "log_size": [float(x) for x in self.log_size],
            "notes": list(self.notes),
        }


def _fit(x, y):
    if len(x) < 2:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


def growth_exponent(system, target: complex, start: complex, window=(1e-1, 1e-5), samples: int = 25,
                    tol: float = DEFAULT_TOL) -> GrowthEstimate:
    """Least-squares slope of ``log(|X| + |X^-1|)`` against ``-log dist``.

    ``X`` is continued along the straight ray from ``start`` to the singular
    point ``target`` (``X = I`` at ``start``) and sampled at geometrically
    spaced distances between ``window[0]`` and ``window[1]``. Overflow or a
    slope that keeps growing across the window flags super-polynomial growth.
    """
    system = as_numeric(system)
    if system.m != 1:
        raise ValueError("growth_exponent works on one-variable systems (restrict to a line first)")
    target, start = complex(target), complex(start)
    r0 = abs(start - target)
    hi, lo = float(window[0]), float(window[1])
    if not (r0 * (1 + 1e-12) >= hi > lo > 0):
        raise ValueError("window must satisfy |start - target| >= window[0] > window[1] > 0")
    u = (start - target) / r0
    radii = np.geomspace(hi, lo, samples)
    X = np.eye(system.n, dtype=complex)
    pos = start
    xs, ys = [], []
    notes = []
    flagged = False
    for r in radii:
        nxt = target + r * u
        if nxt != pos:
            try:
                X = transport_segment(system, Line([pos], [nxt]), 0.0, 1.0, X, tol)[0]
            except IntegrationError as exc:
                notes.append(f"integration stopped at distance {r:.3g}: {exc}")
                flagged = True
                break
        pos = nxt
        if not np.all(np.isfinite(X)):
            notes.append(f"overflow at distance {r:.3g}")
            flagged = True
            break
        with np.errstate(all="ignore"):
            nx = np.linalg.norm(X, 2)
            try:
                ninv = np.linalg.norm(np.linalg.inv(X), 2)
            except np.linalg.LinAlgError:
                ninv = math.inf
        size = nx + ninv
        if not math.isfinite(size) or size > OVERFLOW:
            notes.append(f"|X| + |X^-1| exceeds {OVERFLOW:.0e} at distance {r:.3g}")
            flagged = True
            break
        xs.append(-math.log(r))
        ys.append(math.log(size))
        if len(xs) >= 9:
            third = len(xs) // 3
            s_first = _fit(xs[:third], ys[:third])
            s_last = _fit(xs[-third:], ys[-third:])
            if s_last > 2 * abs(s_first) + 1 and s_last > 5:
                notes.append("slope keeps increasing across the window")
                flagged = True
                break
    xs, ys = np.array(xs), np.array(ys)
    exponent = None if flagged else _fit(xs, ys)
    if flagged:
        notes.insert(0, "super-polynomial growth suspected (irregular singularity)")
    return GrowthEstimate(exponent, flagged, np.exp(-xs) if len(xs) else xs, ys, notes)
