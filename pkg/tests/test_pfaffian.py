from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import assume, given, strategies as st

from qsys import (
    FuchsianSystem,
    MatrixOneForm,
    NotFuchsianError,
    complexity,
    flatness_residual,
    is_flat,
    rho,
    singular_locus,
    to_fuchsian,
)
from qsys.algebra import GaussianRational, parse_rational

fracs = st.fractions(min_value=-3, max_value=3, max_denominator=5)


def R(text):
    return parse_rational(text)


def matrices(n):
    return st.lists(st.lists(fracs, min_size=n, max_size=n), min_size=n, max_size=n)


@st.composite
def fuchsian_systems(draw, n=None):
    n = n or draw(st.integers(1, 3))
    poles = draw(st.lists(st.integers(-4, 4), min_size=1, max_size=3, unique=True))
    residues = []
    for _ in poles:
        A = draw(matrices(n))
        assume(any(x != 0 for row in A for x in row))
        residues.append(A)
    return FuchsianSystem(tuple(Fraction(a) for a in poles), tuple(residues))


@given(fuchsian_systems())
def test_fuchsian_roundtrip_through_one_form(F):
    G = to_fuchsian(F.to_one_form())
    assert dict(zip(G.poles, G.residues)) == dict(zip(F.poles, F.residues))


@given(fuchsian_systems())
def test_residue_at_infinity_is_minus_sum(F):
    n = F.n
    for i in range(n):
        for j in range(n):
            assert F.residue_at_infinity[i][j] == -sum(A[i][j] for A in F.residues)


def test_conjugate_pair_expands_over_q():
    i = GaussianRational(0, 1)
    F = FuchsianSystem((i, -i), (((1,),), ((1,),)))
    om = F.to_one_form()
    assert om.entries[0][0][0] == R("2*t/(t^2 + 1)")
    G = to_fuchsian(om)
    assert set(G.poles) == {i, -i}


def test_unpaired_complex_pole_is_not_over_q():
    with pytest.raises(ValueError, match="conjugate"):
        FuchsianSystem((GaussianRational(0, 1),), (((1,),),)).to_one_form()


def test_degenerate_data_rejected():
    with pytest.raises(ValueError):
        FuchsianSystem((0,), (((0,),),))
    with pytest.raises(ValueError):
        FuchsianSystem((0, 0), (((1,),), ((1,),)))


@pytest.mark.parametrize("text, message", [
    ("1/t^2", "order 2"),
    ("t", "infinity"),
    ("1/(t^2 - 2)", "not in Q"),
])
def test_not_fuchsian(text, message):
    with pytest.raises(NotFuchsianError, match=message):
        to_fuchsian(MatrixOneForm(("t",), [[[R(text)]]]))


# ----------------------------------------------------------------------------
# flatness
# ----------------------------------------------------------------------------

def _two_var(A, B):
    to = lambda M, v: [[R(f"({x})/{v}") for x in row] for row in M]
    return MatrixOneForm.from_components(("x", "y"), [to(A, "x"), to(B, "y")])


@given(matrices(2), matrices(2))
def test_flatness_of_constant_logarithmic_forms(A, B):
    # A dx/x + B dy/y is flat iff A and B commute
    om = _two_var(A, B)
    commute = sp.Matrix(A) * sp.Matrix(B) == sp.Matrix(B) * sp.Matrix(A)
    assert is_flat(om) == commute


def test_flatness_residual_sign():
    # dX = Omega X needs d Omega = Omega ^ Omega; here d Omega = 0 and the
    # residual is -(A B - B A)/(x y) on dx ^ dy
    om = _two_var([[1, 0], [0, 0]], [[0, 1], [0, 0]])
    res = flatness_residual(om)[("x", "y")]
    assert res[0][1] == R("-1/(x*y)")
    assert all(c.is_zero() for k, row in enumerate(res) for l, c in enumerate(row) if (k, l) != (0, 1))


def test_one_variable_is_always_flat():
    assert is_flat(MatrixOneForm(("t",), [[[R("1/t")]]]))


# ----------------------------------------------------------------------------
# complexity, rho, singular locus
# ----------------------------------------------------------------------------

def test_complexity_values():
    om = MatrixOneForm.from_components(["t"], [[[R("1/(2*t)"), R("0")], [R("1/(t-1)"), R("-3/(t-1)")]]])
    c = complexity(om)
    assert (c.s, c.d, c.n, c.m) == (3, 1, 2, 1)
    assert complexity(MatrixOneForm(("t",), [[[R("1/t")]]])).s == 2


@given(fuchsian_systems())
def test_rho_against_direct_sum(F):
    mp = lambda x: mpmath.mpf(x.numerator) / x.denominator
    with mpmath.workdps(50):
        want = mpmath.mpf(2)
        for A in F.residues:
            want += max(abs(mp(Fraction(x))) for row in A for x in row)
        for a in F.poles:
            for b in F.poles:
                if a != b:
                    want += 1 / abs(mp(a - b))
        assert abs(rho(F) - want) < 1e-30


def test_rho_explicit_value():
    F = FuchsianSystem((0, 1), ((((Fraction(1, 2)),),), ((-2,),)))
    assert rho(F) == pytest.approx(6.5, abs=1e-40)


@given(fuchsian_systems())
def test_rho_permutation_invariant(F):
    G = FuchsianSystem(F.poles[::-1], F.residues[::-1])
    with mpmath.workdps(50):
        assert abs(rho(F) - rho(G)) < 1e-30


def test_singular_locus_components():
    om = MatrixOneForm.from_components(["t"], [[[R("1/(t^2 - t)"), R("1/t^2")], [R("0"), R("1/(t-1)")]]])
    assert sorted(str(c) for c in singular_locus(om).components) == ["t", "t - 1"]
    om2 = _two_var([[1]], [[1]])
    assert sorted(str(c) for c in singular_locus(om2).components) == ["x", "y"]
