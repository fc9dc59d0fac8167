"""Piecewise paths in C^m: straight segments and circular arcs, closed loops
and arc triangles."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "Line",
    "Arc",
    "PathSpec",
    "Triangle",
    "circle",
    "polyline",
    "lasso",
    "arc_between",
]


def _vec(z) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=complex)).copy()


@dataclass(frozen=True, eq=False)
class Line:
    """Segment ``start + s (end - start)``, ``s`` in [0, 1]."""

    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "start", _vec(self.start))
        object.__setattr__(self, "end", _vec(self.end))
        if self.start.shape != self.end.shape:
            raise ValueError("segment endpoints of different dimension")

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return self.start + np.multiply.outer(s, self.end - self.start)

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        return np.broadcast_to(self.end - self.start, s.shape + self.start.shape).copy()

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def reversed(self) -> "Line":
        return Line(self.end, self.start)

    def scaled(self, center, factor) -> "Line":
        c = _vec(center)
        return Line(c + factor * (self.start - c), c + factor * (self.end - c))

    def to_dict(self):
        return {"type": "line", "start": _cplx_list(self.start), "end": _cplx_list(self.end)}


@dataclass(frozen=True, eq=False)
class Arc:
    """``center + direction * radius * exp(i theta)``, theta from ``theta0``
    to ``theta1`` (``theta1 > theta0`` runs counterclockwise).

    With ``anchor`` (the exact start point) points are evaluated as
    ``anchor + direction * radius * exp(i theta0) * (exp(i phi) - 1)``,
    which stays accurate for nearly flat arcs of huge radius.
    """

    center: np.ndarray
    radius: float
    theta0: float
    theta1: float
    direction: np.ndarray = field(default=None)
    anchor: np.ndarray = field(default=None)

    def __post_init__(self):
        c = _vec(self.center)
        object.__setattr__(self, "center", c)
        d = np.ones_like(c) if self.direction is None else _vec(self.direction)
        if d.shape != c.shape:
            raise ValueError("arc direction and center of different dimension")
        object.__setattr__(self, "direction", d)
        if self.anchor is not None:
            a = _vec(self.anchor)
            if a.shape != c.shape:
                raise ValueError("arc anchor and center of different dimension")
            object.__setattr__(self, "anchor", a)
        if not self.radius > 0:
            raise ValueError("arc radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "theta0", float(self.theta0))
        object.__setattr__(self, "theta1", float(self.theta1))

    def point(self, s):
        s = np.asarray(s, dtype=float)
        if self.anchor is None:
            th = self.theta0 + s * (self.theta1 - self.theta0)
            return self.center + np.multiply.outer(self.radius * np.exp(1j * th), self.direction)
        phi = s * (self.theta1 - self.theta0)
        # exp(i phi) - 1 without cancellation
        step = 2j * np.sin(phi / 2) * np.exp(0.5j * phi)
        return self.anchor + np.multiply.outer(self.radius * np.exp(1j * self.theta0) * step, self.direction)

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        dth = self.theta1 - self.theta0
        th = self.theta0 + s * dth
        return np.multiply.outer(1j * dth * self.radius * np.exp(1j * th), self.direction)

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(1.0)

    @property
    def length(self) -> float:
        return abs(self.theta1 - self.theta0) * self.radius * float(np.linalg.norm(self.direction))

    def reversed(self) -> "Arc":
        anchor = None if self.anchor is None else self.end
        return Arc(self.center, self.radius, self.theta1, self.theta0, self.direction, anchor)

    def scaled(self, center, factor) -> "Arc":
        c = _vec(center)
        anchor = None if self.anchor is None else c + factor * (self.anchor - c)
        return Arc(c + factor * (self.center - c), self.radius * factor, self.theta0, self.theta1, self.direction,
                   anchor)

    def to_dict(self):
        out = {
            "type": "arc",
            "center": _cplx_list(self.center),
            "radius": self.radius,
            "theta0": self.theta0,
            "theta1": self.theta1,
            "direction": _cplx_list(self.direction),
        }
        if self.anchor is not None:
            out["anchor"] = _cplx_list(self.anchor)
        return out


def _cplx_list(v):
    return [[float(z.real), float(z.imag)] for z in np.atleast_1d(v)]


def _close(a, b, scale) -> bool:
    return float(np.max(np.abs(a - b))) <= 1e-9 * max(1.0, scale)


class PathSpec:
    """Concatenation of segments; ``basepoint`` is the start of the first one."""

    def __init__(self, segments: Sequence, margin: float = 0.0):
        segments = tuple(segments)
        if not segments:
            raise ValueError("empty path")
        dim = segments[0].start.shape
        scale = max(float(np.max(np.abs(seg.start))) for seg in segments) + 1.0
        for a, b in zip(segments, segments[1:]):
            if a.end.shape != dim or b.start.shape != dim:
                raise ValueError("path segments of different dimension")
            if not _close(a.end, b.start, scale):
                raise ValueError("path segments are not contiguous")
        self.segments = segments
        self.margin = float(margin)
        self._scale = scale

    @property
    def dim(self) -> int:
        return self.segments[0].start.shape[0]

    @property
    def basepoint(self) -> np.ndarray:
        return self.segments[0].start

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    @property
    def closed(self) -> bool:
        return _close(self.start, self.end, self._scale)

    @property
    def length(self) -> float:
        return sum(seg.length for seg in self.segments)

    def __add__(self, other: "PathSpec") -> "PathSpec":
        return PathSpec(self.segments + other.segments, min(self.margin, other.margin))

    def reversed(self) -> "PathSpec":
        return PathSpec([seg.reversed() for seg in reversed(self.segments)], self.margin)

    def sample(self, per_segment: int = 64) -> np.ndarray:
        """Points along the path (shape ``(K, m)``), endpoints included once."""
        s = np.linspace(0.0, 1.0, per_segment + 1)
        pts = [seg.point(s[:-1]) for seg in self.segments]
        pts.append(self.segments[-1].point(np.array([1.0])))
        return np.concatenate(pts, axis=0)

    def to_dict(self):
        return {"segments": [seg.to_dict() for seg in self.segments], "margin": self.margin}

    @classmethod
    def from_dict(cls, data) -> "PathSpec":
        segs = []
        for d in data["segments"]:
            if d["type"] == "line":
                segs.append(Line(_from_pairs(d["start"]), _from_pairs(d["end"])))
            elif d["type"] == "arc":
                direction, anchor = d.get("direction"), d.get("anchor")
                segs.append(
                    Arc(
                        _from_pairs(d["center"]),
                        d["radius"],
                        d["theta0"],
                        d["theta1"],
                        None if direction is None else _from_pairs(direction),
                        None if anchor is None else _from_pairs(anchor),
                    )
                )
            else:
                raise ValueError(f"unknown segment type {d['type']!r}")
        return cls(segs, data.get("margin", 0.0))

    def __repr__(self):
        kinds = ",".join(type(s).__name__ for s in self.segments)
        return f"PathSpec([{kinds}], closed={self.closed})"


def _from_pairs(v):
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        return np.array([complex(v[0], v[1])])
    return v[:, 0] + 1j * v[:, 1]


def circle(center, radius: float, start_angle: float = 0.0, turns: int = 1) -> PathSpec:
    """Counterclockwise circle (clockwise for negative ``turns``)."""
    if turns == 0:
        raise ValueError("circle with zero turns")
    return PathSpec([Arc(center, radius, start_angle, start_angle + 2 * math.pi * turns)])


def polyline(points: Sequence) -> PathSpec:
    pts = [_vec(p) for p in points]
    if len(pts) < 2:
        raise ValueError("polyline needs two points")
    return PathSpec([Line(a, b) for a, b in zip(pts, pts[1:])])


def lasso(base: complex, center: complex, radius: float) -> PathSpec:
    """Straight spoke from ``base`` to the circle ``|t - center| = radius``,
    one counterclockwise turn, and back along the spoke."""
    base, center = complex(base), complex(center)
    if abs(base - center) <= radius:
        raise ValueError("lasso basepoint inside the loop")
    ang = cmath.phase(base - center)
    entry = center + radius * cmath.exp(1j * ang)
    spoke = Line([base], [entry])
    loop = Arc([center], radius, ang, ang + 2 * math.pi)
    return PathSpec([spoke, loop, spoke.reversed()])


def arc_between(p: complex, q: complex, sweep: float) -> Line | Arc:
    """Edge from ``p`` to ``q`` turning by the signed angle ``sweep``.

    ``sweep > 0`` bends counterclockwise (centre to the left of the chord
    for ``sweep < pi``); ``|sweep| < 1e-12`` gives a segment. ``|sweep| < 2 pi``.
    """
    p, q = complex(p), complex(q)
    if p == q:
        raise ValueError("degenerate edge")
    if abs(sweep) < 1e-12:
        # sagitta below 1e-13 of the chord
        return Line([p], [q])
    if not abs(sweep) < 2 * math.pi:
        raise ValueError("arc sweep must lie in (-2 pi, 2 pi)")
    # start angle from the chord direction, radius from the float sweep, so
    # the anchored end point reproduces q to rounding even for huge radii
    theta0 = cmath.phase(q - p) - math.copysign(math.pi / 2, sweep) - sweep / 2
    theta1 = theta0 + sweep
    radius = abs(q - p) / (2 * abs(math.sin((theta1 - theta0) / 2)))
    center = p - radius * cmath.exp(1j * theta0)
    return Arc([center], radius, theta0, theta1, anchor=[p])


def _segments_intersect(P, Q):
    """Pairwise proper intersections between polyline pieces ``P[i] -> Q[i]``."""
    a, b = P[:, None], Q[:, None]
    c, d = P[None, :], Q[None, :]

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    d1 = cross(b - a, c - a)
    d2 = cross(b - a, d - a)
    d3 = cross(d - c, a - c)
    d4 = cross(d - c, b - c)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


class Triangle:
    """Region bounded by three edges, each a segment or circular arc.

    Edges are given by signed sweep angles (see :func:`arc_between`). The
    boundary must be simple and positively oriented.
    """

    def __init__(self, vertices: Sequence[complex], sweeps: Sequence[float] = (0.0, 0.0, 0.0)):
        if len(vertices) != 3 or len(sweeps) != 3:
            raise ValueError("a triangle has three vertices and three edges")
        self.vertices = tuple(complex(v) for v in vertices)
        self.sweeps = tuple(float(s) for s in sweeps)
        self.edges = tuple(
            arc_between(self.vertices[k], self.vertices[(k + 1) % 3], self.sweeps[k]) for k in range(3)
        )
        poly = self.polygon(96)
        area = 0.5 * float(np.sum((poly.real * np.roll(poly.imag, -1)) - (np.roll(poly.real, -1) * poly.imag)))
        if area <= 0:
            raise ValueError("triangle boundary must be positively oriented (counterclockwise)")
        P, Q = poly, np.roll(poly, -1)
        hits = _segments_intersect(P, Q)
        k = len(P)
        idx = np.arange(k)
        adjacent = (np.abs(idx[:, None] - idx[None, :]) <= 1) | (np.abs(idx[:, None] - idx[None, :]) == k - 1)
        if np.any(hits & ~adjacent):
            raise ValueError("triangle boundary is not a simple closed curve")
        self.area = area

    @classmethod
    def from_curvatures(cls, vertices, curvatures=(0.0, 0.0, 0.0)) -> "Triangle":
        """Edges as minor arcs of signed curvature ``1/r`` (positive bends
        counterclockwise); 0 means a segment."""
        sweeps = []
        for k in range(3):
            p, q = complex(vertices[k]), complex(vertices[(k + 1) % 3])
            kappa = float(curvatures[k])
            half = abs(kappa) * abs(q - p) / 2
            if half > 1:
                raise ValueError(f"edge {k}: curvature too large for its chord")
            sweeps.append(math.copysign(2 * math.asin(half), kappa) if kappa else 0.0)
        return cls(vertices, sweeps)

    def boundary(self) -> PathSpec:
        return PathSpec(self.edges)

    def polygon(self, per_edge: int = 256) -> np.ndarray:
        s = np.linspace(0.0, 1.0, per_edge, endpoint=False)
        return np.concatenate([edge.point(s)[:, 0] for edge in self.edges])

    def boundary_distance(self, z: complex, per_edge: int = 2048) -> float:
        return float(np.min(np.abs(self.polygon(per_edge) - complex(z))))

    def contains(self, z: complex, per_edge: int = 2048) -> bool:
        """Point-in-region test by the winding number of the sampled boundary."""
        w = self.polygon(per_edge) - complex(z)
        ang = np.angle(np.roll(w, -1) / w)
        return abs(float(np.sum(ang))) > math.pi

    def dilated(self, factor: float) -> "Triangle":
        c = sum(self.vertices) / 3
        return Triangle([c + factor * (v - c) for v in self.vertices], self.sweeps)

    def to_dict(self):
        return {
            "vertices": [[v.real, v.imag] for v in self.vertices],
            "sweeps": list(self.sweeps),
        }

    @classmethod
    def from_dict(cls, data) -> "Triangle":
        verts = [complex(*v) for v in data["vertices"]]
        if "sweeps" in data:
            return cls(verts, data["sweeps"])
        return cls.from_curvatures(verts, data.get("curvatures", (0.0, 0.0, 0.0)))

    def __repr__(self):
        return f"Triangle({list(self.vertices)}, sweeps={list(self.sweeps)})"
