import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from qsys import FuchsianSystem, MatrixOneForm, euler, parse_rational
from qsys.analytic import (
    Arc,
    IntegrationError,
    Line,
    NumericFuchsian,
    PathSpec,
    Triangle,
    arc_between,
    circle,
    count_zeros,
    count_zeros_many,
    growth_exponent,
    integrate,
    lasso,
    monodromy,
    monodromy_all,
    pmap,
    polyline,
    root_of_unity_test,
    spider,
    trace_integral,
)
from qsys.io import load_fixture

# ----------------------------------------------------------------------------
# paths and triangles
# ----------------------------------------------------------------------------


@given(st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5),
       st.floats(-6.0, 6.0))
def test_arc_between_endpoints(p, q, sweep):
    if abs(p - q) < 1e-3:
        return
    e = arc_between(p, q, sweep)
    assert abs(complex(e.point(0.0)[0]) - p) < 1e-9 * (1 + abs(p))
    assert abs(complex(e.point(1.0)[0]) - q) < 1e-9 * (1 + abs(q))


def test_path_roundtrip_and_closure():
    loop = lasso(2.0, 0.0, 0.5)
    assert loop.closed
    again = PathSpec.from_dict(loop.to_dict())
    assert np.allclose(again.sample(16), loop.sample(16))
    assert not polyline([0, 1, 1j]).closed
    assert circle(0, 1).length == pytest.approx(2 * math.pi)
    with pytest.raises(ValueError):
        PathSpec([Line([0], [1]), Line([2], [3])])
    with pytest.raises(ValueError):
        lasso(0.1, 0.0, 0.5)


def test_triangle_orientation_and_membership():
    T = Triangle([0, 1, 1j])
    assert T.contains(0.25 + 0.25j) and not T.contains(1 + 1j)
    assert T.area == pytest.approx(0.5, rel=1e-3)
    with pytest.raises(ValueError, match="positively oriented"):
        Triangle([0, 1j, 1])
    # positive curvature turns the tangent counterclockwise: edge 0 -> 1 bulges outward
    bulged = Triangle.from_curvatures([0, 1, 1j], [1.0, 0.0, 0.0])
    assert bulged.contains(0.5 - 0.1j)
    pinched = Triangle.from_curvatures([0, 1, 1j], [-1.0, 0.0, 0.0])
    assert not pinched.contains(0.5 + 0.05j)
    assert Triangle.from_dict(bulged.to_dict()).sweeps == pytest.approx(bulged.sweeps)


# ----------------------------------------------------------------------------
# integrator
# ----------------------------------------------------------------------------

def _same_multiset(a, b, tol):
    b = list(b)
    for z in a:
        k = int(np.argmin([abs(z - w) for w in b]))
        if abs(z - b[k]) > tol:
            return False
        b.pop(k)
    return not b


def _euler_num(A):
    return NumericFuchsian([0], [np.asarray(A, dtype=complex)])


@pytest.mark.parametrize("A", [
    [[0.5, 0], [0, -1 / 3]],
    [[0.5, 1], [0, -0.25]],
    [[0, 1], [-2, 0.3]],
])
def test_integrator_matches_matrix_exponential(A):
    # dX/dt = A X / t has X(t) = exp(A log t) for X(1) = I
    path = polyline([1.0, 2.0 + 1.0j, 0.3 + 2.0j])
    res = integrate(_euler_num(A), path)
    want = sla.expm(np.asarray(A) * cmath.log(0.3 + 2.0j))
    assert np.max(np.abs(res.X - want)) < 1e-9
    assert res.abel_residual < 1e-10


@given(st.fractions(-3, 3, max_denominator=7))
@settings(max_examples=10)
def test_full_circle_multiplies_by_exponent(lam):
    res = integrate(_euler_num([[float(lam)]]), circle(0, 1.0))
    assert abs(res.X[0, 0] - cmath.exp(2j * math.pi * float(lam))) < 1e-9


def test_abel_identity_on_fuchsian_fixture():
    F = load_fixture("fuchsian_3pole_2x2")["parsed"]
    path = polyline([3 + 3j, -2 + 2.5j, -2.5 - 2j])
    res = integrate(F, path)
    assert res.abel_residual < 1e-8
    assert res.trace_integral == pytest.approx(trace_integral(F, path), abs=1e-14)


def test_trace_integral_around_pole():
    sys = _euler_num([[0.25, 0], [3, 0.5]])
    assert trace_integral(sys, circle(0, 2.0)) == pytest.approx(2j * math.pi * 0.75, abs=1e-10)


def test_integrator_refuses_singular_start_and_dimension():
    sys = _euler_num([[1]])
    with pytest.raises(IntegrationError, match="singular"):
        integrate(sys, polyline([0, 1]))
    with pytest.raises(IntegrationError):
        integrate(sys, polyline([1, 2]), X0=[[0]])
    two = MatrixOneForm.from_components(("x", "y"), [[[parse_rational("1/x")]], [[parse_rational("1/y")]]])
    with pytest.raises(IntegrationError, match="variables"):
        integrate(two, polyline([1, 2]))


def test_two_variable_path():
    om = MatrixOneForm.from_components(
        ("x", "y"), [[[parse_rational("1/(2*x)")]], [[parse_rational("1/(3*y)")]]])
    p0, p1 = np.array([1.0, 1.0]), np.array([2.0 + 1j, 0.5 - 0.5j])
    res = integrate(om, PathSpec([Line(p0, p1)]))
    want = (p1[0] ** 0.5) * (p1[1] ** (1 / 3))
    assert abs(res.X[0, 0] - want) < 1e-10


# ----------------------------------------------------------------------------
# monodromy
# ----------------------------------------------------------------------------

def test_root_of_unity_test():
    ev = [cmath.exp(2j * math.pi / 3), -1, 1, 2, cmath.exp(2j * math.pi * math.sqrt(2))]
    assert root_of_unity_test(ev, 60, 1e-10) == [3, 2, 1, None, None]
    assert root_of_unity_test(np.diag([1j, -1j])) == [4, 4]
    with pytest.raises(ValueError):
        root_of_unity_test([1], 0)


def test_monodromy_of_concatenation():
    # M of gamma1 gamma2 is M2 M1 with the convention X -> X M
    F = NumericFuchsian([0, 1], [[[0.3, 1], [0, -0.2]], [[0.1, 0], [0.5, 0.4]]])
    base = 0.5 - 1j
    l0, l1 = lasso(base, 0, 0.4), lasso(base, 1, 0.4)
    M0 = monodromy(F, l0).matrix
    M1 = monodromy(F, l1).matrix
    M01 = monodromy(F, l0 + l1).matrix
    assert np.max(np.abs(M01 - M1 @ M0)) < 1e-9


def test_monodromy_conjugates_with_initial_matrix(rng):
    F = NumericFuchsian([0], [[[0.5, 1], [0, 0.25]]])
    X0 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    M = monodromy(F, circle(0, 1)).matrix
    MX = monodromy(F, circle(0, 1), X0=X0).matrix
    assert np.max(np.abs(MX - np.linalg.solve(X0, M @ X0))) < 1e-9


def test_monodromy_rejects_open_path():
    with pytest.raises(ValueError, match="closed"):
        monodromy(_euler_num([[1]]), polyline([1, 2]))


def test_spider_layout():
    base, radii, order, cut = spider([0, 1, 2j])
    assert radii == [0.5, 0.5, 1.0]
    assert sorted(order) == [0, 1, 2]
    args = [(cmath.phase([0, 1, 2j][k] - base) - cut) % (2 * math.pi) for k in order]
    assert args == sorted(args)
    with pytest.raises(ValueError):
        spider([0, 1], basepoint=0.1)


@pytest.mark.parametrize("name", ["fuchsian_3pole_2x2", "fuchsian_4pole_2x2", "fuchsian_2pole_3x3",
                                  "fuchsian_3pole_3x3"])
def test_product_relation_on_fixtures(name):
    res = monodromy_all(load_fixture(name)["parsed"])
    assert res.product_residual < 1e-6


def test_spider_eigenvalues_match_residue_exponents():
    F = load_fixture("fuchsian_3pole_2x2")["parsed"]
    res = monodromy_all(F)
    for r, j in zip(res.loops, res.order):
        want = np.exp(2j * np.pi * np.linalg.eigvals(np.array(F.residues[j], dtype=float)))
        assert _same_multiset(r.eigenvalues, want, 1e-8)


# ----------------------------------------------------------------------------
# zero counting
# ----------------------------------------------------------------------------

def _poly_count_oracle(coeffs, T):
    roots = np.roots(coeffs)
    return sum(T.contains(r) for r in roots)


def test_count_polynomial_solution(rng):
    # Euler diag(0, 3) with X0 = I at vertex 0: X = diag(1, (t/v0)^3)
    sys = _euler_num([[0, 0], [0, 3]])
    T = Triangle([1 - 1j, 2 + 0.5j, -1 + 2j])
    v0 = T.vertices[0]
    for _ in range(4):
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        zc = count_zeros(sys, [[a, 0], [0, b]], T)
        assert zc.reliable
        assert zc.count == _poly_count_oracle([b / v0 ** 3, 0, 0, a], T)


def test_count_many_shares_transport(rng):
    sys = _euler_num([[0, 0], [0, 2]])
    T = Triangle.from_curvatures([0.5 - 1j, 2, 0.5 + 1.5j], [0.3, 0.0, -0.2])
    cs = [np.diag(rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(6)]
    many = count_zeros_many(sys, cs, T)
    single = [count_zeros(sys, c, T).count for c in cs]
    assert [z.count for z in many] == single


def test_count_refuses_singular_point_inside():
    with pytest.raises(ValueError, match="contains the singular point"):
        count_zeros(_euler_num([[1]]), [[1]], Triangle([-1 - 1j, 1 - 1j, 1j]))
    with pytest.raises(ValueError, match="zero combination"):
        count_zeros(_euler_num([[1]]), [[0]], Triangle([1, 2, 1 + 1j]))


def test_boundary_zero_triggers_dilation():
    # X = diag(1, t) so f = t - 1.5 vanishes on the bottom edge
    sys = NumericFuchsian([0], [[[0, 0], [0, 1]]])
    T = Triangle([1.2, 1.8, 1.5 + 1j])
    zc = count_zeros(sys, [[-1.5, 0], [0, 1]], T, X0=[[1, 0], [0, 1.2]])
    assert zc.dilations >= 1 and zc.count == 1


def test_count_in_two_variables_along_line():
    om = MatrixOneForm.from_components(
        ("x", "y"), [[[parse_rational("2/x")]], [[parse_rational("0")]]])
    # along x = 1 + u, y = 1: X = (1 + u)^2, double zero at u = -1
    T = Triangle([-1.5 - 0.5j, -0.5 - 0.5j, -1 + 0.5j])
    with pytest.raises(ValueError):
        count_zeros(om, [[1]], T)
    T2 = Triangle([-0.2 - 0.5j, 0.8 - 0.5j, 0.3 + 0.5j])
    zc = count_zeros(om, [[1]], T2, line=([1, 1], [1, 0]))
    assert zc.count == 0


# ----------------------------------------------------------------------------
# growth and parallel map
# ----------------------------------------------------------------------------

def test_growth_exponent_regular():
    g = growth_exponent(_euler_num([[0.5, 0], [0, -0.25]]), 0, 1.0)
    assert not g.super_polynomial
    # X = diag(r^(1/2), r^(-1/4)) exactly, so |X| + |X^-1| = r^(-1/4) + r^(-1/2)
    r = np.geomspace(1e-1, 1e-5, 25)
    want = np.polyfit(-np.log(r), np.log(r ** -0.25 + r ** -0.5), 1)[0]
    assert g.exponent == pytest.approx(want, abs=1e-6)
    assert np.allclose(g.log_size, np.log(r ** -0.25 + r ** -0.5), atol=1e-8)


def test_growth_exponent_irregular():
    om = MatrixOneForm(("t",), [[[parse_rational("1/t^2")]]])
    g = growth_exponent(om, 0, -1.0)
    assert g.super_polynomial and g.exponent is None


def test_growth_window_validation():
    with pytest.raises(ValueError, match="window"):
        growth_exponent(_euler_num([[1]]), 0, 0.01)


def test_pmap_keeps_order():
    assert pmap(lambda x: x * x, range(20), workers=4) == [x * x for x in range(20)]
    assert pmap(str, [], workers=3) == []


def test_euler_exponent_map_from_exact():
    F = euler([[Fraction(1, 3), 0], [0, Fraction(2, 3)]])
    res = monodromy(F, circle(0, 1))
    want = np.exp(2j * np.pi * np.array([1 / 3, 2 / 3]))
    assert _same_multiset(res.eigenvalues, want, 1e-8)
    assert sorted(res.orders) == [3, 3]


def test_fuchsian_system_accepted_directly():
    F = FuchsianSystem((0, 1), (((Fraction(1, 2),),), ((Fraction(1, 2),),)))
    res = monodromy(F, circle(0.5, 1.0))
    assert abs(res.matrix[0, 0] - 1) < 1e-9
    assert isinstance(Arc([0], 1, 0, 1).reversed(), Arc)
