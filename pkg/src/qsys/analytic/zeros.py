"""Zero counting of ``f = sum c_ij X_ij`` inside arc triangles by the argument
principle (zeros counted with multiplicity)."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .integrator import DEFAULT_TOL, transport_segment
from .numeric import RestrictedSystem, as_numeric
from .paths import Line, Triangle

__all__ = ["ZeroCount", "BoundaryError", "count_zeros", "count_zeros_many", "BoundaryTransport"]

PHASE_STEP = math.pi / 2
FLOOR = 1e-10
MAX_DEPTH = 40
BASE_SAMPLES = 32


class BoundaryError(ValueError):
    """A zero of the combination sits on the triangle boundary."""


@dataclass
class ZeroCount:
    count: int
    winding_residual: float
    refinement_depth: int
    combination: np.ndarray
    reliable: bool
    dilations: int = 0
    samples: int = 0
    min_abs_ratio: float = 0.0
    convention: str = "with-multiplicity"
    notes: list = field(default_factory=list)

    def to_dict(self):
        c = np.asarray(self.combination, dtype=complex)
        return {
            "count": self.count,
            "winding_residual": self.winding_residual,
            "refinement_depth": self.refinement_depth,
            "combination": [[[float(z.real), float(z.imag)] for z in row] for row in c],
            "reliable": self.reliable,
            "dilations": self.dilations,
            "samples": self.samples,
            "min_abs_ratio": self.min_abs_ratio,
            "convention": self.convention,
            "notes": list(self.notes),
        }


def _check_triangle(system, T: Triangle):
    try:
        pts = system.singular_points()
    except (AttributeError, ValueError):
        pts = []
    scale = max(abs(v) for v in T.vertices) + 1.0
    for p in np.atleast_1d(pts):
        p = complex(p)
        if T.boundary_distance(p) < 1e-9 * scale:
            raise ValueError(f"triangle boundary touches the singular point {p:.6g}")
        if T.contains(p):
            raise ValueError(f"triangle contains the singular point {p:.6g}")


def _edge_grid(system, edge, base_samples):
    """Uniform grid refined so that no spacing exceeds a quarter of the
    distance to the singular locus."""
    grid = [0.0]
    s = 0.0
    while s < 1.0:
        dist, _ = system.nearest_singular(edge.point(s))
        speed = float(np.linalg.norm(edge.deriv(s)))
        h = 1.0 / base_samples
        if speed > 0 and math.isfinite(dist):
            h = min(h, max(dist / (4 * speed), 1e-6))
        s = min(1.0, s + h)
        grid.append(s)
    return np.array(grid)


class BoundaryTransport:
    """Fundamental matrix along the boundary of ``T`` with cached samples.

    Samples are refined lazily; every new value is integrated from the
    nearest cached point on its left, so combinations share the work.
    """

    def __init__(self, system, T: Triangle, X0=None, basepoint=None, tol=DEFAULT_TOL,
                 base_samples=BASE_SAMPLES):
        self.system = system
        self.T = T
        self.tol = tol
        n = system.n
        X = np.eye(n, dtype=complex) if X0 is None else np.array(X0, dtype=complex)
        if X.shape != (n, n) or abs(np.linalg.det(X)) == 0:
            raise ValueError("initial matrix must be an invertible n x n matrix")
        if basepoint is not None and abs(complex(basepoint) - T.vertices[0]) > 1e-12:
            b = complex(basepoint)
            if not T.contains(b):
                raise ValueError("basepoint must lie in the triangle")
            for u in np.linspace(0, 1, 65)[1:-1]:
                if not T.contains(b + u * (T.vertices[0] - b)):
                    raise ValueError("segment from basepoint to vertex 0 leaves the triangle")
            X = transport_segment(system, Line([b], [T.vertices[0]]), 0.0, 1.0, X, tol)[0]
        self.s = []
        self.X = []
        for edge in T.edges:
            ss, xs = [0.0], [X]
            grid = _edge_grid(system, edge, base_samples)
            for a, b in zip(grid, grid[1:]):
                X = transport_segment(system, edge, a, b, X, tol)[0]
                ss.append(float(b))
                xs.append(X)
            self.s.append(ss)
            self.X.append(xs)
        # starting grid for each winding; refinements only populate the cache
        self.grid = [list(ss) for ss in self.s]

    def value(self, e: int, s: float) -> np.ndarray:
        ss = self.s[e]
        k = bisect.bisect_left(ss, s)
        if k < len(ss) and ss[k] == s:
            return self.X[e][k]
        left = k - 1
        X = transport_segment(self.system, self.T.edges[e], ss[left], s, self.X[e][left], self.tol)[0]
        ss.insert(k, s)
        self.X[e].insert(k, X)
        return X

    def combination_values(self, c: np.ndarray, points):
        return np.array([np.sum(c * self.value(e, s)) for e, s in points])


def _increments(f):
    return np.angle(f[1:] / f[:-1])


def _winding(bt: BoundaryTransport, c: np.ndarray):
    """Raw phase integral along the boundary.

    Intervals are bisected while a phase increment reaches pi/2 or while
    splitting an interval changes its increment (aliased windings).
    """
    points = [(e, s) for e in range(3) for s in bt.grid[e][:-1]] + [(2, 1.0)]
    vals = [np.sum(c * bt.value(e, s)) for e, s in points]
    depth = 0
    check = np.ones(len(points) - 1, dtype=bool)
    while True:
        f = np.array(vals)
        dphi = _increments(f)
        new_points, new_vals, new_check = [], [], []
        changed = False
        for k in range(len(points) - 1):
            new_points.append(points[k])
            new_vals.append(vals[k])
            if not check[k]:
                new_check.append(False)
                continue
            (e0, s0), (e1, s1) = points[k], points[k + 1]
            if e1 != e0:
                s1 = 1.0
            mid = (e0, 0.5 * (s0 + s1))
            fm = np.sum(c * bt.value(*mid))
            split = np.angle(fm / vals[k]) + np.angle(vals[k + 1] / fm)
            if abs(dphi[k]) < PHASE_STEP and abs(split - dphi[k]) < 1e-6:
                new_check.append(False)
                continue
            changed = True
            new_points.append(mid)
            new_vals.append(fm)
            new_check.extend([True, True])
        new_points.append(points[-1])
        new_vals.append(vals[-1])
        points, vals, check = new_points, new_vals, np.array(new_check, dtype=bool)
        if not changed:
            break
        depth += 1
        if depth > MAX_DEPTH:
            return None, depth, np.array(vals)
    f = np.array(vals)
    total = float(np.sum(_increments(f)))
    return total, depth, f


def _count_once(bt: BoundaryTransport, c: np.ndarray):
    total, depth, f = _winding(bt, c)
    absf = np.abs(f)
    ratio = float(absf.min() / absf.max()) if absf.max() > 0 else 0.0
    if total is None or ratio < FLOOR:
        return None, depth, ratio, len(f)
    count = int(round(total / (2 * math.pi)))
    resid = abs(total - 2 * math.pi * count)
    return (count, resid), depth, ratio, len(f)


def _prepare(system, line):
    system = as_numeric(system)
    if line is not None:
        system = RestrictedSystem(system, *line)
    elif system.m != 1:
        raise ValueError("systems in several variables are counted along a line: pass line=(p0, v)")
    return system


def count_zeros_many(system, combinations, T: Triangle, basepoint=None, X0=None,
                     tol: float = DEFAULT_TOL, line=None) -> list[ZeroCount]:
    """Zero counts for several combinations sharing one boundary transport."""
    system = _prepare(system, line)
    cs = [np.asarray(c, dtype=complex) for c in combinations]
    for c in cs:
        if c.shape != (system.n, system.n):
            raise ValueError(f"combination must be {system.n}x{system.n}")
        if not np.any(c):
            raise ValueError("zero combination")
    results: list = [None] * len(cs)
    pending = list(range(len(cs)))
    tri = T
    # dilated triangles keep the original basepoint so the function is unchanged
    bp = T.vertices[0] if basepoint is None else complex(basepoint)
    for dil in range(4):
        if dil:
            tri = T.dilated(1 + 2.0 ** (-dil))
        _check_triangle(system, tri)
        bt = BoundaryTransport(system, tri, X0, bp, tol)
        still = []
        for i in pending:
            out, depth, ratio, nsamp = _count_once(bt, cs[i])
            if out is None:
                still.append(i)
                continue
            count, resid = out
            zc = ZeroCount(count, resid, depth, cs[i], resid < 0.1 * 2 * math.pi, dil, nsamp, ratio)
            if dil:
                zc.notes.append(f"boundary zero avoided by dilating the triangle by {1 + 2.0 ** (-dil)}")
            if not zc.reliable:
                zc.notes.append("winding residual too large: continued combination is not single-valued on the boundary")
            results[i] = zc
        pending = still
        if not pending:
            break
    if pending:
        raise BoundaryError("zero on boundary: persists after 3 dilations")
    return results


def count_zeros(system, c, T: Triangle, basepoint=None, X0=None, tol: float = DEFAULT_TOL, line=None) -> ZeroCount:
    """Number of zeros (with multiplicity) of ``sum c_ij X_ij`` inside ``T``.

    ``X`` is the fundamental matrix equal to ``X0`` (default identity) at
    the basepoint (default: the first vertex). For systems in several
    variables pass ``line=(p0, v)``; the triangle then lives in the
    parameter ``u`` of ``p0 + u v``.
    """
    return count_zeros_many(system, [c], T, basepoint, X0, tol, line)[0]
