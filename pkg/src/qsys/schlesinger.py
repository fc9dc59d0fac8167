"""Schlesinger isomonodromic deformations of Fuchsian residues.

Poles move along piecewise linear trajectories ``a_i(tau)``, ``tau`` in
[0, 1]; the residues follow

    dA_i/dtau = -sum_{j != i} [A_i, A_j] (a_i' - a_j') / (a_i - a_j)

integrated with the Dormand-Prince 5(4) pair of the analytic engine.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analytic.integrator import _A, _C, _E, DEFAULT_TOL
from .analytic.monodromy import _seg_point_distance, lasso, monodromy, spider
from .analytic.numeric import NumericFuchsian
from .analytic.parallel import pmap

__all__ = [
    "ConfigurationPath",
    "FlowEvent",
    "FlowTrajectory",
    "IsomonodromyReport",
    "flow",
    "frozen_trajectory",
    "isomonodromy_check",
]

COLLISION_FACTOR = 1e-2
GROWTH_FACTOR = 10.0


def _commutator(A, B):
    return A @ B - B @ A


def _min_gap(poles) -> float:
    p = np.asarray(poles)
    if p.size < 2:
        return math.inf
    d = np.abs(p[:, None] - p[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def _resonances(residues, tol=1e-9) -> list:
    """Poles whose residue has two eigenvalues differing by a nonzero integer."""
    out = []
    for k, A in enumerate(residues):
        ev = np.linalg.eigvals(A)
        for i in range(len(ev)):
            for j in range(i + 1, len(ev)):
                d = ev[i] - ev[j]
                r = round(d.real)
                if r != 0 and abs(d - r) < tol:
                    out.append(k)
                    break
            else:
                continue
            break
    return out


class ConfigurationPath:
    """Pole trajectories plus initial residues.

    ``waypoints[i]`` lists the positions of pole ``i`` at equally spaced
    values of ``tau``; the trajectory is linear in between. Poles must stay
    pairwise distinct on [0, 1); a collision is allowed only at ``tau = 1``.
    """

    def __init__(self, waypoints: Sequence[Sequence[complex]], residues):
        self.waypoints = [np.asarray(w, dtype=complex).reshape(-1) for w in waypoints]
        if not self.waypoints:
            raise ValueError("configuration path needs at least one pole")
        if any(w.size < 2 for w in self.waypoints):
            raise ValueError("every pole trajectory needs at least two waypoints")
        A = np.asarray(residues, dtype=complex)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise ValueError("initial residues must be square matrices of equal size")
        if A.shape[0] != len(self.waypoints):
            raise ValueError(f"{len(self.waypoints)} trajectories but {A.shape[0]} residues")
        self.residues = A
        self.collision_at_end = False
        self._validate()

    @property
    def p(self) -> int:
        return len(self.waypoints)

    @property
    def n(self) -> int:
        return self.residues.shape[1]

    def knots(self) -> np.ndarray:
        ks = set()
        for w in self.waypoints:
            ks.update(np.linspace(0.0, 1.0, w.size).tolist())
        return np.array(sorted(ks))

    def positions(self, tau: float) -> np.ndarray:
        out = np.empty(self.p, dtype=complex)
        for i, w in enumerate(self.waypoints):
            u = min(max(tau, 0.0), 1.0) * (w.size - 1)
            k = min(int(u), w.size - 2)
            out[i] = w[k] + (u - k) * (w[k + 1] - w[k])
        return out

    def velocities(self, tau: float) -> np.ndarray:
        """Right derivative (left derivative at ``tau = 1``)."""
        out = np.empty(self.p, dtype=complex)
        for i, w in enumerate(self.waypoints):
            u = min(max(tau, 0.0), 1.0) * (w.size - 1)
            k = min(int(u), w.size - 2)
            out[i] = (w[k + 1] - w[k]) * (w.size - 1)
        return out

    def _validate(self):
        p0 = self.positions(0.0)
        if _min_gap(p0) == 0:
            i, j = self._closest(p0)
            raise ValueError(f"poles {i} and {j} collide at tau = 0")
        # on each knot interval the differences a_i - a_j are linear in tau
        ks = self.knots()
        for t0, t1 in zip(ks, ks[1:]):
            P0, P1 = self.positions(t0), self.positions(0.5 * (t0 + t1))
            for i in range(self.p):
                for j in range(i + 1, self.p):
                    d0 = P0[i] - P0[j]
                    dv = 2 * ((P1[i] - P1[j]) - d0)
                    # minimise |d0 + u dv| over u in [0, 1]
                    L2 = abs(dv) ** 2
                    u = 0.0 if L2 == 0 else max(0.0, min(1.0, -(d0 * dv.conjugate()).real / L2))
                    if abs(d0 + u * dv) <= 1e-14 * max(1.0, abs(d0)):
                        tau = t0 + u * (t1 - t0)
                        if tau < 1.0 - 1e-12:
                            raise ValueError(f"poles {i} and {j} collide at tau = {tau:.6g}")
                        self.collision_at_end = True

    @staticmethod
    def _closest(P):
        best = (math.inf, 0, 1)
        for i in range(len(P)):
            for j in range(i + 1, len(P)):
                best = min(best, (abs(P[i] - P[j]), i, j))
        return best[1], best[2]

    def reversed(self, residues=None) -> "ConfigurationPath":
        return ConfigurationPath([w[::-1] for w in self.waypoints],
                                 self.residues if residues is None else residues)

    def system(self, tau: float = 0.0, residues=None) -> NumericFuchsian:
        return NumericFuchsian(self.positions(tau), self.residues if residues is None else residues)

    def to_dict(self):
        return {
            "waypoints": [[[float(z.real), float(z.imag)] for z in w] for w in self.waypoints],
            "residues": _cplx_tensor(self.residues),
        }

    @classmethod
    def from_dict(cls, data) -> "ConfigurationPath":
        wp = [[_cplx(z) for z in w] for w in data["waypoints"]]
        return cls(wp, _tensor_from(data["residues"]))


def _cplx(z) -> complex:
    if isinstance(z, (list, tuple)):
        if len(z) != 2:
            raise ValueError(f"complex number must be [re, im], got {z!r}")
        return complex(float(z[0]), float(z[1]))
    return complex(z)


def _tensor_from(data) -> np.ndarray:
    return np.array([[[_cplx(x) for x in row] for row in A] for A in data], dtype=complex)


def _cplx_tensor(A) -> list:
    return [[[[float(x.real), float(x.imag)] for x in row] for row in M] for M in np.asarray(A)]


@dataclass
class FlowEvent:
    kind: str  # near-collision | norm-growth | step-failure | resonance
    tau: float
    message: str

    def to_dict(self):
        return {"kind": self.kind, "tau": self.tau, "message": self.message}


@dataclass
class FlowTrajectory:
    path: ConfigurationPath
    taus: list
    residues: list  # (p, n, n) arrays at the checkpoints
    events: list = field(default_factory=list)
    completed: bool = True
    steps: int = 0
    rejected: int = 0
    history: list = field(default_factory=list)  # (tau, min gap, max |A_i|) per accepted step

    @property
    def systems(self) -> list:
        return [self.path.system(t, A) for t, A in zip(self.taus, self.residues)]

    def final(self) -> np.ndarray:
        return self.residues[-1]

    def max_norms(self) -> np.ndarray:
        return np.array([np.max(np.abs(A)) for A in self.residues])

    def to_jsonl(self) -> str:
        lines = []
        for t, A in zip(self.taus, self.residues):
            P = self.path.positions(t)
            lines.append(json.dumps({
                "type": "checkpoint",
                "tau": float(t),
                "poles": [[float(z.real), float(z.imag)] for z in P],
                "residues": _cplx_tensor(A),
            }, sort_keys=True))
        for e in self.events:
            lines.append(json.dumps(dict(e.to_dict(), type="event"), sort_keys=True))
        lines.append(json.dumps({"type": "summary", "completed": self.completed, "steps": self.steps,
                                 "rejected": self.rejected}, sort_keys=True))
        return "\n".join(lines) + "\n"


def _rhs(path: ConfigurationPath, tau: float, A: np.ndarray, vel: np.ndarray) -> np.ndarray:
    P = path.positions(tau)
    out = np.zeros_like(A)
    p = len(P)
    for i in range(p):
        for j in range(i + 1, p):
            w = (vel[i] - vel[j]) / (P[i] - P[j])
            if w == 0:
                continue
            C = w * _commutator(A[i], A[j])
            out[i] -= C
            out[j] += C  # [A_j, A_i] = -[A_i, A_j], same weight
    return out


def flow(path: ConfigurationPath, tol: float = 1e-10, checkpoints: int | Sequence[float] = 11,
         collision_factor: float = COLLISION_FACTOR, growth_factor: float = GROWTH_FACTOR,
         max_steps: int = 200_000) -> FlowTrajectory:
    """Integrate the Schlesinger equations along ``path``.

    ``tol`` is the local relative error per step. The trajectory stores the
    residues at the checkpoints (an integer count of equally spaced values
    of ``tau``, or an explicit increasing list). When the step size
    collapses the partial trajectory is returned with a step-failure event.
    """
    if isinstance(checkpoints, int):
        if checkpoints < 2:
            raise ValueError("need at least two checkpoints")
        cps = np.linspace(0.0, 1.0, checkpoints)
    else:
        cps = np.asarray(sorted(set(float(c) for c in checkpoints)))
        if cps.size == 0 or cps[0] < 0 or cps[-1] > 1:
            raise ValueError("checkpoints must lie in [0, 1]")
    A = path.residues.copy()
    events = []
    res = _resonances(A)
    if res:
        events.append(FlowEvent("resonance", 0.0, f"resonant initial residues at poles {res}: "
                                                  "isomonodromic residues need not be unique"))
    gap0 = _min_gap(path.positions(0.0))
    norm0 = max(float(np.max(np.abs(A))), 1e-300)
    next_growth = growth_factor
    collided = False
    traj = FlowTrajectory(path, [], [], events)
    stops = sorted(set(cps.tolist()) | set(path.knots().tolist()))
    checkset = set(cps.tolist())
    tau = 0.0
    if 0.0 in checkset:
        traj.taus.append(0.0)
        traj.residues.append(A.copy())
    traj.history.append((0.0, gap0, norm0))
    h = None
    for stop in stops[1:]:
        vel = path.velocities(tau)  # constant on (tau, stop): stops include every knot
        while tau < stop:
            P = path.positions(tau)
            gap = _min_gap(P)
            rel = max((abs(vel[i] - vel[j]) for i in range(path.p) for j in range(i + 1, path.p)), default=0.0)
            cap = gap / (4 * rel) if rel > 0 else math.inf
            if h is None:
                h = min(stop - tau, cap, 0.01)
            h = min(h, cap, stop - tau)
            if h < 1e-14 or traj.steps + traj.rejected > max_steps:
                traj.events.append(FlowEvent(
                    "step-failure", tau,
                    f"step size collapsed at tau = {tau:.9g} (min pole gap {gap:.3g}, "
                    f"max |A_i| {np.max(np.abs(A)):.3g}): explosion of the residues",
                ))
                traj.completed = False
                traj.taus.append(tau)
                traj.residues.append(A.copy())
                return traj
            K = [None] * 7
            K[0] = _rhs(path, tau, A, vel)
            for i in range(1, 7):
                acc = A.copy()
                for j, a in enumerate(_A[i]):
                    if a:
                        acc = acc + (h * a) * K[j]
                K[i] = _rhs(path, tau + _C[i] * h, acc, vel)
            Anew = acc
            errv = h * sum(e * k for e, k in zip(_E, K) if e)
            scale = max(float(np.max(np.abs(A))), float(np.max(np.abs(Anew))), 1e-300)
            err = float(np.max(np.abs(errv))) / scale
            if not np.isfinite(err) or not np.all(np.isfinite(Anew)):
                traj.rejected += 1
                h *= 0.2
                continue
            if err > tol:
                traj.rejected += 1
                h *= max(0.2, 0.9 * (tol / err) ** 0.2)
                continue
            tau = tau + h if tau + h < stop else stop
            A = Anew
            traj.steps += 1
            h *= 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (tol / err) ** 0.2))
            gap = _min_gap(path.positions(tau))
            nrm = float(np.max(np.abs(A)))
            traj.history.append((tau, gap, nrm))
            if not collided and gap < collision_factor * gap0:
                collided = True
                traj.events.append(FlowEvent("near-collision", tau,
                                             f"min pole gap {gap:.3g} below {collision_factor:g} x initial {gap0:.3g}"))
            while nrm > next_growth * norm0:
                traj.events.append(FlowEvent("norm-growth", tau,
                                             f"max |A_i| = {nrm:.3g} exceeds {next_growth:g} x initial {norm0:.3g}"))
                next_growth *= growth_factor
        if stop in checkset:
            traj.taus.append(stop)
            traj.residues.append(A.copy())
    return traj


def frozen_trajectory(path: ConfigurationPath, checkpoints: int = 11) -> FlowTrajectory:
    """Poles moved along ``path`` with the residues held fixed.

    Not isomonodromic in general; serves as a negative control.
    """
    cps = np.linspace(0.0, 1.0, checkpoints)
    return FlowTrajectory(path, cps.tolist(), [path.residues.copy() for _ in cps],
                          [FlowEvent("frozen", 0.0, "residues frozen: not a Schlesinger flow")])


@dataclass
class IsomonodromyReport:
    taus: list
    basepoint: complex
    order: list  # pole indices in lasso order
    invariants: list  # per checkpoint: {label: char-poly coefficients}
    drift: float  # max abs change of any char-poly coefficient
    trace_drift: float  # max abs change of any trace
    per_invariant: dict

    def to_dict(self):
        return {
            "taus": [float(t) for t in self.taus],
            "basepoint": [self.basepoint.real, self.basepoint.imag],
            "order": list(self.order),
            "drift": self.drift,
            "trace_drift": self.trace_drift,
            "per_invariant": dict(self.per_invariant),
        }


def _check_loops(path: ConfigurationPath, base: complex, order, taus, frac: float = 0.5, samples: int = 400):
    """Raise if the spider from ``base`` changes its homotopy class on [0, taus[-1]]."""
    grid = np.union1d(np.linspace(0.0, taus[-1], samples), np.asarray(taus))
    for t in grid:
        P = path.positions(t)
        if np.min(np.abs(P - base)) < 1e-12:
            raise ValueError(f"a pole passes through the basepoint at tau = {t:.6g}")
        radii = frac * np.array([min(abs(P[k] - P[j]) for j in range(len(P)) if j != k) for k in range(len(P))]) \
            if len(P) > 1 else np.array([0.25 * abs(P[0] - base)])
        for k in range(len(P)):
            for j in range(len(P)):
                if j != k and _seg_point_distance(base, P[k], P[j]) <= radii[j]:
                    raise ValueError(f"loop around pole {k} crosses moving pole {j} at tau = {t:.6g}")
        args = np.angle(P - base)
        # adjacent-pair loops keep their class while the cyclic order is unchanged
        cyc = [int(i) for i in order]
        cur = sorted(range(len(P)), key=lambda i: (args[i] - args[cyc[0]]) % (2 * math.pi))
        if cur != cyc:
            raise ValueError(f"pole order around the basepoint changes at tau = {t:.6g}")


def _invariants(sys: NumericFuchsian, base, order, tol, frac: float = 0.5):
    P = sys.poles
    p = len(P)
    if p > 1:
        radii = [frac * min(abs(P[k] - P[j]) for j in range(p) if j != k) for k in range(p)]
    else:
        radii = [0.25 * abs(P[0] - base)]
    Ms = [monodromy(sys, lasso(base, P[k], radii[k]), tol=tol, qmax=None, check_abel=False).matrix
          for k in order]
    out = {}
    for k, M in zip(order, Ms):
        out[f"M{k}"] = np.poly(M)[1:]
    for a in range(len(order) - 1):
        M = Ms[a + 1] @ Ms[a]
        out[f"M{order[a + 1]}M{order[a]}"] = np.poly(M)[1:]
    return out


def isomonodromy_check(trajectory: FlowTrajectory, basepoint=None, order=None, tol: float = DEFAULT_TOL,
                       workers: int | None = None) -> IsomonodromyReport:
    """Compare monodromy conjugacy invariants across the checkpoints.

    Loops are lassos from a fixed basepoint in the spider order of the
    first checkpoint. Invariants are the characteristic polynomial
    coefficients of each small-loop monodromy and of the products of
    adjacent pairs.
    """
    path = trajectory.path
    taus = list(trajectory.taus)
    if not taus:
        raise ValueError("trajectory has no checkpoints")
    P0 = path.positions(taus[0])
    base, radii, sp_order, _ = spider(P0, basepoint)
    frac = 0.5 if len(P0) < 2 else radii[0] / min(abs(P0[0] - b) for b in P0[1:])
    order = list(sp_order if order is None else order)
    _check_loops(path, base, order, taus, frac)
    systems = trajectory.systems
    inv = pmap(lambda s: _invariants(s, base, order, tol, frac), systems, workers)
    per = {}
    drift = trace_drift = 0.0
    for key in inv[0]:
        ref = inv[0][key]
        d = max(float(np.max(np.abs(v[key] - ref))) for v in inv)
        td = max(abs(v[key][0] - ref[0]) for v in inv)
        per[key] = d
        drift = max(drift, d)
        trace_drift = max(trace_drift, float(td))
    return IsomonodromyReport(taus, complex(base), order, inv, drift, trace_drift, per)
