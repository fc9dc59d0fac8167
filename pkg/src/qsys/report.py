"""Aggregate reports: the Q-system checklist and bound-versus-count campaigns."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .analytic.growth import growth_exponent
from .analytic.numeric import RestrictedSystem, as_numeric
from .analytic.parallel import pmap
from .analytic.paths import Triangle
from .analytic.zeros import count_zeros_many
from .bounds import BoundsConfig, euler_bound, q_bound, rho_bound, within_bound
from .pfaffian import (
    FuchsianSystem,
    NotFuchsianError,
    complexity,
    flatness_residual,
    rho,
    singular_locus,
    to_fuchsian,
)
from .spectral import QUASI, REJECTED, certify, certify_general, find_smooth_point

__all__ = ["analyze", "BoundsRefused", "bounds_for", "campaign", "COMPARE_SCHEMA", "COMPARE_HEADER", "default_triangles"]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
PROBE_ANGLE = 0.37  # generic direction for growth probes


class BoundsRefused(ValueError):
    """Bound requested for a system outside the theorem's hypotheses."""


def _as_pair(system):
    """(one-form or None, Fuchsian or None, reason the form is unavailable)."""
    if isinstance(system, FuchsianSystem):
        try:
            return system.to_one_form(), system, None
        except ValueError as exc:
            return None, system, str(exc)
    if system.m == 1:
        try:
            return system, to_fuchsian(system), None
        except NotFuchsianError:
            return system, None, None
    return system, None, None


def _growth_probes(num, points, tol):
    """Growth exponents along four rays into each singular point."""
    pts = [complex(p) for p in points]
    out = []
    for k, a in enumerate(pts):
        others = [abs(a - b) for j, b in enumerate(pts) if j != k]
        r0 = min(1.0, 0.4 * min(others)) if others else 1.0
        rays = []
        for q in range(4):
            u = cmath.exp(1j * (PROBE_ANGLE + q * math.pi / 2))
            g = growth_exponent(num, a, a + r0 * u, window=(r0, r0 * 1e-4), samples=17, tol=tol)
            rays.append({"direction": u, "exponent": g.exponent, "super_polynomial": g.super_polynomial,
                         "notes": g.notes})
        out.append({"point": a, "rays": rays, "super_polynomial": any(r["super_polynomial"] for r in rays)})
    return out


def analyze(system, tol: float = 1e-10) -> dict:
    """Checklist of the four conditions defining a Q-system.

    1. linear monodromy (structural once the system is flat);
    2. quasiunipotence of small-loop monodromy (exact residue spectra);
    3. regularity (Fuchsian form, plus numeric growth probes);
    4. the matrix is defined over Q.
    """
    omega, F, over_q_reason = _as_pair(system)
    rep: dict = {"n": system.n, "m": 1 if isinstance(system, FuchsianSystem) else system.m}
    checklist = []

    # 1. flatness -> X -> XM
    if omega is None or omega.m == 1:
        checklist.append({"condition": "linear monodromy", "verdict": PASS,
                          "method": "one variable: flatness holds identically"})
        rep["flat"] = True
    else:
        res = flatness_residual(omega)
        flat = all(c.is_zero() for M in res.values() for row in M for c in row)
        rep["flat"] = flat
        bad = [f"d{a}^d{b}" for (a, b), M in res.items() if any(not c.is_zero() for row in M for c in row)]
        checklist.append({"condition": "linear monodromy", "verdict": PASS if flat else FAIL,
                          "method": "exact flatness residual" + ("" if flat else f" nonzero on {', '.join(bad)}")})

    # complexity and rho
    if omega is not None:
        rep["complexity"] = complexity(omega).to_dict()
    if F is not None:
        rep["fuchsian"] = True
        rep["poles"] = [str(a) for a in F.poles]
        rep["rho"] = float(rho(F))
    else:
        rep["fuchsian"] = False

    # 2. quasiunipotence
    if F is not None:
        cert = certify(F)
    elif omega is not None and omega.m > 1:
        cert = certify_general(omega)
    else:
        cert = None
    if cert is not None:
        rep["certificate"] = cert.to_dict()
        verdict = PASS if cert.verdict == QUASI else (INCONCLUSIVE if cert.verdict.startswith("inconclusive") else FAIL)
        method = "exact residue spectra" + (f"; orders {cert.orders}" if verdict == PASS else f" ({cert.verdict})")
        checklist.append({"condition": "quasiunipotent", "verdict": verdict, "method": method,
                          "orders": cert.orders if verdict == PASS else None})
    else:
        checklist.append({"condition": "quasiunipotent", "verdict": INCONCLUSIVE,
                          "method": "not Fuchsian: residues of higher-order poles do not determine the monodromy"})

    # 3. regularity
    num = as_numeric(F if F is not None else omega)
    if num.m == 1:
        points = list(num.singular_points())
        probes = _growth_probes(num, points, tol)
    else:
        probes = []
        comps = singular_locus(omega).components
        for f in comps:
            pr = find_smooth_point(f, [g for g in comps if g is not f], omega.variables)
            if pr is None:
                continue
            p0 = [complex(pr.point[v]) for v in omega.variables]
            v = [complex(pr.direction[w]) for w in omega.variables]
            line = RestrictedSystem(num, p0, v)
            for item in _growth_probes(line, [0.0] + [u for u in line.singular_points() if abs(u) > 1e-9], tol)[:1]:
                item["component"] = str(f)
                probes.append(item)
    rep["growth_probes"] = probes
    flagged = [p for p in probes if p["super_polynomial"]]
    if flagged:
        where = ", ".join(f"{p['point']:.6g}" for p in flagged)
        checklist.append({"condition": "regular", "verdict": FAIL, "super_polynomial": True,
                          "method": f"growth probes: super-polynomial growth at {where}"})
    elif F is not None:
        checklist.append({"condition": "regular", "verdict": PASS, "super_polynomial": False,
                          "method": "Fuchsian (simple poles); growth probes polynomial"})
    else:
        checklist.append({"condition": "regular", "verdict": PASS if probes else INCONCLUSIVE,
                          "super_polynomial": False,
                          "method": "numeric growth probes polynomial (no exact certificate for non-Fuchsian form)"})

    # 4. defined over Q
    if omega is not None:
        checklist.append({"condition": "defined over Q", "verdict": PASS,
                          "method": "exact rational coefficients"})
    else:
        checklist.append({"condition": "defined over Q", "verdict": FAIL, "method": over_q_reason})

    rep["checklist"] = checklist
    rep["q_system"] = all(c["verdict"] == PASS for c in checklist)
    return rep


# ----------------------------------------------------------------------------
# bounds and campaigns
# ----------------------------------------------------------------------------

def bounds_for(system, which=("euler", "rho", "q"), config: BoundsConfig | None = None) -> dict:
    """Evaluate the requested bounds; refuses systems that are certified rejected.

    The Euler bound needs a single pole at 0 with a split rational spectrum.
    """
    omega, F, _ = _as_pair(system)
    if F is not None:
        cert = certify(F)
    elif omega is not None and omega.m > 1:
        cert = certify_general(omega)
    else:
        raise BoundsRefused("system is not Fuchsian: the bounds assume a regular quasiunipotent system")
    if cert.verdict == REJECTED:
        raise BoundsRefused("system certified not quasiunipotent (rejected): "
                            "the zero-count bounds do not apply and counts can be unbounded")
    out = {}
    for w in which:
        if w == "euler":
            if F is None or len(F.poles) != 1 or F.poles[0] != 0 or not cert.poles[0].splits:
                raise BoundsRefused("Euler bound applies to Euler systems A dt/t with rational spectrum")
            out["euler"] = euler_bound(cert.poles[0].eigenvalues)
        elif w == "rho":
            if F is None:
                raise BoundsRefused("rho bound needs a Fuchsian system")
            out["rho"] = rho_bound(F, config)
        elif w == "q":
            if omega is None:
                raise BoundsRefused("q bound needs a system defined over Q")
            out["q"] = q_bound(complexity(omega), config)
        else:
            raise ValueError(f"unknown bound {w!r}")
    return out


COMPARE_SCHEMA = "qsys-compare v1: count = zeros with multiplicity; bounds as log2; margin_log2 = min bound log2 - log2(max(count, 1))"
COMPARE_HEADER = ["triangle", "combination", "count", "reliable", "euler_bound", "rho_log2", "q_log2",
                  "margin_log2", "within"]


def _bound_log2(b) -> float:
    if b.log2 is not None:
        return b.log2
    if b.value is not None:  # a zero bound
        return -math.inf
    return math.inf


def _random_combinations(rng, n, k):
    return [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(k)]


def campaign(system, triangles, seed: int = 0, per_triangle: int = 10, which=("euler", "rho", "q"),
             config=None, X0=None, tol: float = 1e-10, workers=None):
    """Empirical counts for random combinations against the evaluated bounds.

    Returns ``(rows, bounds)``; combinations are drawn from a seeded
    generator up front, so results do not depend on scheduling.
    """
    bounds = bounds_for(system, which, config)
    rng = np.random.default_rng(seed)
    jobs = [(ti, T, _random_combinations(rng, system.n, per_triangle)) for ti, T in enumerate(triangles)]

    def run(job):
        ti, T, cs = job
        return ti, count_zeros_many(system, cs, T, X0=X0, tol=tol)

    results = pmap(run, jobs, workers)
    min_log = min((_bound_log2(b) for b in bounds.values()), default=math.inf)
    rows = []
    for ti, zcs in results:
        for ci, zc in enumerate(zcs):
            margin = min_log - math.log2(max(zc.count, 1))
            within = all(within_bound(zc.count, b) for b in bounds.values())
            rows.append([
                ti, ci, zc.count, zc.reliable,
                bounds["euler"].value if "euler" in bounds else "",
                bounds["rho"].log2 if "rho" in bounds and bounds["rho"].log2 is not None else
                (f"2^{bounds['rho'].log2log2}" if "rho" in bounds else ""),
                bounds["q"].log2 if "q" in bounds and bounds["q"].log2 is not None else
                (f"2^{bounds['q'].log2log2}" if "q" in bounds else ""),
                margin, within,
            ])
    return rows, bounds


def default_triangles(poles, count: int = 20, seed: int = 0) -> list[Triangle]:
    """Admissible triangles scattered around (not containing) the poles."""
    rng = np.random.default_rng(seed)
    pts = [complex(p) for p in poles]
    out = []
    while len(out) < count:
        c = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        r = rng.uniform(0.3, 1.5)
        ang = rng.uniform(0, 2 * math.pi)
        verts = [c + r * cmath.exp(1j * (ang + 2 * math.pi * k / 3)) for k in range(3)]
        sweeps = list(rng.uniform(-0.5, 0.5, 3))
        try:
            T = Triangle(verts, sweeps)
        except ValueError:
            continue
        if any(T.contains(p) or T.boundary_distance(p) < 0.1 for p in pts):
            continue
        out.append(T)
    return out
