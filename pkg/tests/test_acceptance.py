"""End-to-end acceptance criteria.

Each test records one PASS/FAIL line (see ``criterion`` in conftest.py);
the lines are repeated in the terminal summary. Tolerances and time
limits are pinned at module level.
"""
import cmath
import math
import time
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg as sla

from qsys import (
    RationalFunction,
    RationalMapSpec,
    certify,
    from_algebraic,
    hypergeometric,
    parse_polynomial,
    parse_rational,
    pullback,
    tensor,
)
from qsys.algebra.elim import eliminate_on_hypersurface, resultant
from qsys.analytic import (
    NumericFuchsian,
    Triangle,
    circle,
    count_zeros,
    integrate,
    monodromy,
    monodromy_all,
    polyline,
    root_of_unity_test,
)
from qsys.constructions import AlgebraicSpec
from qsys.io import fixture_names, load_fixture, parse_complex, system_from_dict, triangle_from_dict
from qsys.pfaffian import FuchsianSystem, MatrixOneForm
from qsys.report import BoundsRefused, bounds_for, campaign
from qsys.schlesinger import flow, frozen_trajectory, isomonodromy_check
from qsys.spectral import REJECTED

pytestmark = pytest.mark.acceptance

TOL_EULER_EIG = 1e-8
TIME_EULER = 5.0
TIME_HORSESHOE = 30.0
TIME_CAMPAIGN = 120.0
TOL_ABEL = 1e-8
TOL_PRODUCT = 1e-6
TOL_ALG_EIG = 1e-8
TOL_ALG_SOL = 1e-10
TOL_TENSOR = 1e-7
TOL_PULLBACK = 1e-7
TOL_CHARPOLY = 1e-8
TOL_TRACE = 1e-4
FROZEN_MIN = 1e-2
TIME_SCHLESINGER = 60.0
# a Jordan block: eigenvalue error ~ sqrt(matrix error); trace and det are well conditioned
TOL_HYPER_EIG = 1e-6
TOL_HYPER_INV = 1e-10
HYPER_JORDAN_MIN = 0.1
N_ELIM = 100


def _match(a, b, tol):
    """Max distance of a greedy multiset matching, or inf on size mismatch."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        return math.inf
    worst = 0.0
    for z in a:
        k = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(k)))
    return worst


# ----------------------------------------------------------------------------
# 1. Euler systems: small-loop monodromy
# ----------------------------------------------------------------------------

def test_criterion_01_euler_monodromy(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for name, lam in [("euler_single_half", ["1/2"]), ("euler_third", ["1/3", "2/3"]),
                      ("euler_0_3", ["0", "3"])]:
        F = load_fixture(name)["parsed"]
        M = monodromy(F, circle(0, 1.0))
        want = [cmath.exp(2j * math.pi * float(Fraction(x))) for x in lam]
        worst = max(worst, _match(M.eigenvalues, want, TOL_EULER_EIG))
    dt = time.perf_counter() - t0
    ok = worst < TOL_EULER_EIG and dt < TIME_EULER
    criterion(1, ok, f"max eigenvalue error {worst:.1e} < {TOL_EULER_EIG:.0e}, {dt:.2f}s < {TIME_EULER:.0f}s")
    assert ok


# ----------------------------------------------------------------------------
# 2. horseshoe triangle around the roots of t^l - 1
# ----------------------------------------------------------------------------

def test_criterion_02_horseshoe_counts(criterion):
    rec = load_fixture("roots_of_unity")
    T = triangle_from_dict(rec["triangle"])
    t0 = time.perf_counter()
    got, want = [], []
    for case in rec["cases"]:
        F = system_from_dict(case["system"])
        X0 = np.array([[parse_complex(z) for z in row] for row in case["X0"]])
        C = np.array(case["combination"], dtype=complex)
        got.append(count_zeros(F, C, T, X0=X0, tol=1e-10).count)
        # oracle: companion-matrix roots of t^l - 1 inside the triangle
        roots = np.roots([1] + [0] * (case["l"] - 1) + [-1])
        want.append(sum(T.contains(r) for r in roots))
    dt = time.perf_counter() - t0
    ls = [c["l"] for c in rec["cases"]]
    ok = ls == list(range(2, 13)) and got == want == ls and dt < TIME_HORSESHOE
    criterion(2, ok, f"counts {got} for l = 2..12 (oracle {want}), {dt:.1f}s < {TIME_HORSESHOE:.0f}s")
    assert ok


# ----------------------------------------------------------------------------
# 3. random campaign for euler_0_3 against the Euler bound
# ----------------------------------------------------------------------------

def test_criterion_03_campaign(criterion):
    rec = load_fixture("euler_0_3")
    camp = rec["campaign"]
    tris = [triangle_from_dict(t) for t in camp["triangles"]]
    t0 = time.perf_counter()
    rows, bounds = campaign(rec["parsed"], tris, seed=camp["seed"],
                            per_triangle=camp["combinations_per_triangle"], which=tuple(camp["bounds"]))
    dt = time.perf_counter() - t0
    counts = [r[2] for r in rows]
    bound = float(bounds["euler"].value)
    ok = (len(tris) == 20 and len(counts) == 200 and max(counts) == 3
          and all(c <= bound for c in counts) and all(r[8] for r in rows) and dt < TIME_CAMPAIGN)
    criterion(3, ok, f"{len(counts)} counts, max {max(counts)} == 3, all <= {bound:.4f}, "
                     f"{dt:.1f}s < {TIME_CAMPAIGN:.0f}s")
    assert ok


# ----------------------------------------------------------------------------
# 4. cos(ln t): not quasiunipotent, no uniform bound
# ----------------------------------------------------------------------------

def _cos_ln_count(k):
    """Zeros of cos(ln t) in a thin triangle around ln t in [pi/2 - 0.1, (2k + 1/2) pi + 0.1]."""
    F = load_fixture("cos_ln_t")["parsed"]
    a = math.exp(math.pi / 2 - 0.1)
    b = math.exp((2 * k + 0.5) * math.pi + 0.1)
    T = Triangle([0.95 * a - 0.6j * a, 1.05 * b, 0.95 * a + 0.6j * a])
    A = np.array([[0, 1], [-1, 0]], dtype=complex)
    # X = exp(A log t), so X_00 = cos(ln t)
    X0 = sla.expm(A * cmath.log(T.vertices[0]))
    C = np.array([[1, 0], [0, 0]], dtype=complex)
    got = count_zeros(F, C, T, X0=X0, tol=1e-10).count
    oracle = sum(T.contains(math.exp(math.pi / 2 + j * math.pi)) for j in range(-2, 2 * k + 4))
    return got, oracle


@pytest.fixture(scope="module")
def cos_ln_counts():
    return [_cos_ln_count(k) for k in range(3)]


@pytest.mark.xfail(strict=True, reason=(
    "cos(ln t) vanishes at ln t = pi/2 + j pi; the interval [pi/2 - 0.1, (2k + 1/2) pi + 0.1] "
    "holds 2k + 1 of them, so the stated count k + 1 cannot hold for k >= 1"))
def test_criterion_04_cos_ln_t(criterion, cos_ln_counts):
    counts = [c for c, _ in cos_ln_counts]
    stated = [k + 1 for k in range(3)]
    rejected = certify(load_fixture("cos_ln_t")["parsed"]).verdict == REJECTED
    ok = counts == stated and rejected
    criterion(4, ok, f"counts {counts} vs stated k+1 = {stated} (k = 0, 1, 2); "
                     f"zeros of cos ln t are pi apart in ln t, so the true count is 2k+1")
    assert ok


def test_criterion_04_growth_without_bound(criterion, cos_ln_counts):
    counts = [c for c, _ in cos_ln_counts]
    oracle = [o for _, o in cos_ln_counts]
    rejected = certify(load_fixture("cos_ln_t")["parsed"]).verdict == REJECTED
    try:
        bounds_for(load_fixture("cos_ln_t")["parsed"])
        refused = False
    except BoundsRefused:
        refused = True
    ok = counts == oracle == [2 * k + 1 for k in range(3)] and rejected and refused
    criterion("4b", ok, f"counts {counts} == oracle 2k+1 {oracle}, grow without bound; "
                        f"certificate REJECTED, bounds refused")
    assert ok


# ----------------------------------------------------------------------------
# 5. Abel identity on fixture integrations
# ----------------------------------------------------------------------------

OPEN_PATHS = {
    "irregular": [1.0, 2.0 + 1.0j, 0.5 + 1.5j, -1.0 + 1.0j],
    "algebraic_sqrt": [1.0, 2.0 + 1.0j, -1.0 + 2.0j, -2.0 - 0.5j],
}


def _fixture_systems():
    for name in fixture_names():
        p = load_fixture(name).get("parsed")
        if isinstance(p, (FuchsianSystem, MatrixOneForm)):
            yield name, p
        elif p is not None and hasattr(p, "residues"):
            yield name, NumericFuchsian(p.positions(0.0), p.residues)


def test_criterion_05_abel(criterion):
    worst, n = 0.0, 0
    for name, p in _fixture_systems():
        if isinstance(p, MatrixOneForm):
            res = integrate(p, polyline(OPEN_PATHS[name]))
            worst, n = max(worst, res.abel_residual), n + 1
            continue
        sp = monodromy_all(p)
        for m in sp.loops + [sp.infinity]:
            worst, n = max(worst, m.abel_residual), n + 1
        res = integrate(p, polyline([sp.basepoint, sp.basepoint + 0.3 + 0.2j]))
        worst, n = max(worst, res.abel_residual), n + 1
    ok = worst < TOL_ABEL
    criterion(5, ok, f"max |det X - det X0 exp(int tr)| = {worst:.1e} < {TOL_ABEL:.0e} over {n} integrations")
    assert ok


# ----------------------------------------------------------------------------
# 6. product relation on Fuchsian fixtures
# ----------------------------------------------------------------------------

def test_criterion_06_product_relation(criterion):
    names = [n for n in fixture_names() if n.startswith("fuchsian_")]
    residuals = {}
    for name in names:
        F = load_fixture(name)["parsed"]
        assert 2 <= len(F.poles) <= 4 and F.n in (2, 3)
        residuals[name] = monodromy_all(F).product_residual
    worst = max(residuals.values())
    ok = len(names) == 4 and worst < TOL_PRODUCT
    criterion(6, ok, f"max product residual {worst:.1e} < {TOL_PRODUCT:.0e} on {sorted(residuals)}")
    assert ok


# ----------------------------------------------------------------------------
# 7. algebraic function y^2 = t
# ----------------------------------------------------------------------------

def test_criterion_07_algebraic_sqrt(criterion):
    om = from_algebraic(AlgebraicSpec(parse_polynomial("y^2 - t"), "y"))
    # columns (1, y) for the two branches y = +-sqrt(t) at t = 1
    X0 = np.array([[1, 1], [1, -1]], dtype=complex)
    M = monodromy(om, circle(0, 1.0), X0=X0)
    eig_err = _match(M.eigenvalues, [1, -1], TOL_ALG_EIG)
    verts = [1.0, 2.0 + 1.0j, -1.0 + 2.0j, -2.0 - 0.5j, -0.5 - 2.0j]
    sol_err = 0.0
    for k in range(1, len(verts)):
        for s in np.linspace(0.2, 1.0, 5):
            end = verts[k - 1] + s * (verts[k] - verts[k - 1])
            X = integrate(om, polyline(verts[:k] + [end]), X0).X
            sol_err = max(sol_err, float(np.max(np.abs(X[1] ** 2 - end))), float(np.max(np.abs(X[0] - 1))))
    ok = eig_err < TOL_ALG_EIG and sol_err < TOL_ALG_SOL
    criterion(7, ok, f"loop eigenvalue error {eig_err:.1e} < {TOL_ALG_EIG:.0e}; "
                     f"max |x2^2 - t| = {sol_err:.1e} < {TOL_ALG_SOL:.0e}")
    assert ok


# ----------------------------------------------------------------------------
# 8. tensor products
# ----------------------------------------------------------------------------

def test_criterion_08_tensor(criterion):
    loop = circle(0, 0.5)
    worst = 0.0
    for a, b in [("euler_half", "euler_third"), ("hypergeometric_third", "fuchsian_3pole_2x2")]:
        A = load_fixture(a)["parsed"].to_one_form()
        B = load_fixture(b)["parsed"].to_one_form()
        ea = monodromy(A, loop).eigenvalues
        eb = monodromy(B, loop).eigenvalues
        et = monodromy(tensor(A, B), loop).eigenvalues
        worst = max(worst, _match(et, [x * y for x in ea for y in eb], TOL_TENSOR))
    ok = worst < TOL_TENSOR
    criterion(8, ok, f"tensor eigenvalues vs pairwise products: max error {worst:.1e} < {TOL_TENSOR:.0e}")
    assert ok


# ----------------------------------------------------------------------------
# 9. pullback kills the monodromy of sqrt(t)
# ----------------------------------------------------------------------------

def test_criterion_09_pullback(criterion):
    F = load_fixture("euler_single_half")["parsed"]
    G = pullback(F.to_one_form(), RationalMapSpec(("s",), {"t": parse_rational("s^2")}))
    M = monodromy(G, circle(0, 1.0)).matrix
    err = float(np.linalg.norm(M - np.eye(1)))
    before = float(np.linalg.norm(monodromy(F, circle(0, 1.0)).matrix - np.eye(1)))
    ok = err < TOL_PULLBACK and before > 1.0
    criterion(9, ok, f"||M - I|| = {err:.1e} < {TOL_PULLBACK:.0e} after t = s^2 (before: {before:.3f})")
    assert ok


# ----------------------------------------------------------------------------
# 10. Schlesinger isomonodromic flow
# ----------------------------------------------------------------------------

def test_criterion_10_schlesinger(criterion):
    path = load_fixture("schlesinger_generic")["parsed"]
    t0 = time.perf_counter()
    traj = flow(path, tol=1e-10)
    ref = [np.poly(A) for A in traj.residues[0]]
    drift = max(float(np.max(np.abs(np.poly(A) - c))) / max(1.0, float(np.max(np.abs(c))))
                for R in traj.residues for A, c in zip(R, ref))
    iso = isomonodromy_check(traj)
    frozen = isomonodromy_check(frozen_trajectory(path))
    dt = time.perf_counter() - t0
    ok = (traj.completed and drift < TOL_CHARPOLY and iso.trace_drift < TOL_TRACE
          and frozen.trace_drift > FROZEN_MIN and dt < TIME_SCHLESINGER)
    criterion(10, ok, f"char-poly drift {drift:.1e} < {TOL_CHARPOLY:.0e}, trace drift {iso.trace_drift:.1e} "
                      f"< {TOL_TRACE:.0e}, frozen {frozen.trace_drift:.2f} > {FROZEN_MIN:.0e}, "
                      f"{dt:.1f}s < {TIME_SCHLESINGER:.0f}s")
    assert ok


# ----------------------------------------------------------------------------
# 11. hypergeometric local monodromy at 0
# ----------------------------------------------------------------------------

def test_criterion_11_hypergeometric(criterion):
    half = Fraction(1, 2)
    loop = circle(0, 0.5)
    M = monodromy(hypergeometric(half, half, 1), loop)
    eig_err = _match(M.eigenvalues, [1, 1], TOL_HYPER_EIG)
    spread = abs(M.eigenvalues[0] - M.eigenvalues[1])
    inv_err = max(abs(np.trace(M.matrix) - 2), abs(np.linalg.det(M.matrix) - 1))
    jordan = float(np.linalg.norm(M.matrix - np.eye(2)))
    N = monodromy(hypergeometric(half, half, Fraction(1, 3)), loop)
    target = cmath.exp(4j * math.pi / 3)
    hit = int(np.argmin(np.abs(N.eigenvalues - target)))
    order = root_of_unity_test([N.eigenvalues[hit]], 60, 1e-6)
    ok = eig_err < TOL_HYPER_EIG and spread < TOL_HYPER_EIG and inv_err < TOL_HYPER_INV and jordan > HYPER_JORDAN_MIN and order == [3] \
        and abs(N.eigenvalues[hit] - target) < 1e-8
    criterion(11, ok, f"c = 1: eigenvalues 1, 1 (error {eig_err:.1e}, spread {spread:.1e} < {TOL_HYPER_EIG:.0e}, "
                      f"tr/det error {inv_err:.1e}), ||M - I|| = {jordan:.2f} > "
                      f"{HYPER_JORDAN_MIN}; c = 1/3: exp(4 pi i/3) detected with order {order}")
    assert ok


# ----------------------------------------------------------------------------
# 12. elimination on a hypersurface and resultants
# ----------------------------------------------------------------------------

def _rand_poly(rng, vars_degs):
    terms = []
    for _ in range(rng.integers(2, 6)):
        mono = "*".join(f"{v}^{rng.integers(0, d + 1)}" for v, d in vars_degs)
        terms.append(f"({int(rng.integers(-5, 6))})*{mono}")
    return " + ".join(terms)


def test_criterion_12_elimination(criterion):
    rng = np.random.default_rng(20240611)
    done = skipped = 0
    failures = []
    while done < N_ELIM:
        dS = int(rng.integers(1, 5))
        S = parse_polynomial(_rand_poly(rng, [("x", dS), ("t", 2)]) + f" + x^{dS}")
        A = parse_polynomial(_rand_poly(rng, [("x", 3), ("t", 2)]))
        B = parse_polynomial(_rand_poly(rng, [("x", 3), ("t", 2)]) + " + 1")
        if S.degree("x") < 1 or not A or not B:
            continue
        try:
            U, Q = eliminate_on_hypersurface(RationalFunction(A, B), S, "x")
        except ValueError:
            skipped += 1
            continue
        done += 1
        vs = tuple(sorted(set(S.variables) | set(U.variables) | set(Q.variables)
                          | set(A.variables) | set(B.variables)))
        lhs = U.with_variables(vs) * B.with_variables(vs) - Q.with_variables(vs) * A.with_variables(vs)
        if not (S.with_variables(vs).divides(lhs) and U.degree("x") <= S.degree("x") - 1
                and Q.degree("x") <= 0):
            failures.append(str(S))
    # resultants: half the pairs share a root by construction
    agree = 0
    for i in range(N_ELIM):
        p = np.poly1d(rng.integers(-4, 5, int(rng.integers(1, 4)) + 1))
        q = np.poly1d(rng.integers(-4, 5, int(rng.integers(1, 4)) + 1))
        if p.order < 1 or q.order < 1 or p.coeffs[0] == 0 or q.coeffs[0] == 0:
            p, q = np.poly1d([1, 1]), np.poly1d([1, -2])
        if i % 2 == 0:
            r = int(rng.integers(-3, 4))
            p, q = p * np.poly1d([1, -r]), q * np.poly1d([1, -r])
        P = parse_polynomial(" + ".join(f"({int(c)})*x^{k}" for k, c in enumerate(p.coeffs[::-1])))
        Qp = parse_polynomial(" + ".join(f"({int(c)})*x^{k}" for k, c in enumerate(q.coeffs[::-1])))
        vanishes = resultant(P, Qp, "x").is_zero()
        gap = min(abs(a - b) for a in np.roots(p.coeffs) for b in np.roots(q.coeffs))
        agree += vanishes == (gap < 1e-6)
    ok = not failures and agree == N_ELIM
    criterion(12, ok, f"{done} eliminations ({skipped} degenerate redrawn), {len(failures)} failures; "
                      f"resultant vs numeric common root agree on {agree}/{N_ELIM}")
    assert ok
