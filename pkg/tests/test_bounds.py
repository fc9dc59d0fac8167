import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from qsys import BoundReport, BoundsConfig, FuchsianSystem, euler_bound, field_extension_bound, q_bound, rho_bound
from qsys.bounds import DEFAULT, PUBLISHED, poly_nm, within_bound
from qsys.io import load_fixture
from qsys.pfaffian import ComplexityReport, rho
from qsys.report import BoundsRefused, bounds_for

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=9)


def test_euler_bound_value():
    rep = euler_bound([0, 3])
    with mpmath.workdps(30):
        want = 1 + 6 * mpmath.pi
    assert float(rep.value) == pytest.approx(float(want), rel=1e-15)
    assert rep.value.startswith("19.849555921538")
    assert rep.constants[0]["provenance"] == PUBLISHED


@given(st.lists(fracs, min_size=1, max_size=5))
def test_euler_bound_formula(lam):
    rep = euler_bound([str(x) for x in lam])
    want = (len(lam) - 1) + 2 * math.pi * float(max(lam) - min(lam))
    assert float(rep.value) == pytest.approx(want, rel=1e-12, abs=1e-12)
    assert rep.inputs["n"] == len(lam)


def test_euler_bound_rejects_complex_and_empty():
    with pytest.raises(ValueError, match="real"):
        euler_bound([1j, -1j])
    with pytest.raises(ValueError, match="real"):
        euler_bound(["i", "-i"])
    with pytest.raises(ValueError):
        euler_bound([])


def test_poly_nm_default_is_full_polynomial():
    val, deg = poly_nm(2, 1, BoundsConfig())
    assert deg == 1 + 1 * 4 + 1
    assert val == sum(2 ** a for a in range(deg + 1) for b in range(deg + 1 - a))
    cfg = BoundsConfig(rho_poly_coeffs={"0,0": 5.0}, rho_poly_default=0.0)
    assert poly_nm(3, 2, cfg) == (5.0, 1 + 2 * 9 + 2)


def test_rho_bound_logs():
    F = FuchsianSystem((0, 1), (((Fraction(1, 2),),), ((-2,),)))
    rep = rho_bound(F, BoundsConfig(rho_poly_override=3.0))
    # rho = 6.5; bound = 6.5^(2^3)
    assert rep.log2 == pytest.approx(8 * math.log2(6.5), rel=1e-14)
    assert float(rep.value) == pytest.approx(6.5 ** 8, rel=1e-14)
    assert rep.constants[0]["provenance"] == DEFAULT


def test_rho_bound_default_is_huge():
    F = load_fixture("fuchsian_3pole_2x2")["parsed"]
    rep = rho_bound(F)
    P, _ = poly_nm(2, 1, BoundsConfig())
    with mpmath.workdps(40):
        want = P + mpmath.log(mpmath.log(rho(F), 2), 2)
    assert rep.log2 is None or rep.log2 > 1000
    assert rep.log2log2 == pytest.approx(float(want), rel=1e-12)
    assert rep.value is None


def test_q_bound_shape():
    C = ComplexityReport(s=3, d=1, n=2, m=1)
    rep = q_bound(C)
    assert rep.inputs["poly_value"] == 2.0 ** 20
    assert rep.log2log2 == pytest.approx(2 ** 20 + math.log2(math.log2(3)), rel=1e-12)
    small = q_bound(C, BoundsConfig(q_poly_override=2.0))
    assert float(small.value) == pytest.approx(3.0 ** 4, rel=1e-14)
    with pytest.raises(ValueError):
        q_bound(ComplexityReport(s=1, d=1, n=1, m=1))


def test_field_extension_parameters():
    C = ComplexityReport(s=3, d=2, n=2, m=1)
    rep = field_extension_bound(C, 2, BoundsConfig(q_poly_override=1.0))
    ext = rep.extra["extension"]
    assert ext["n"] == math.comb(1 + 4 + 2, 2) and ext["s"] == "6"
    assert rep.extra["direct_log2log2"] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        field_extension_bound(C, 0)


@given(st.integers(0, 10 ** 6), st.floats(0.5, 2000))
def test_within_bound_consistent_with_value(count, log2):
    rep = BoundReport("x", None, log2, math.log2(log2), {}, [], "")
    assert within_bound(count, rep) == (count == 0 or math.log2(count) <= log2)


def test_within_bound_unrepresentable():
    rep = BoundReport("x", None, None, 1e6, {}, [], "")
    assert within_bound(10 ** 100, rep)


def test_report_json_roundtrip():
    rep = euler_bound(["1/2", "-1/3"])
    assert BoundReport.from_json(rep.to_json()) == rep


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        BoundsConfig.from_dict({"nope": 1})
    assert BoundsConfig.from_dict({"q_poly_K": 2}).q_poly_K == 2


def test_bounds_refused_for_rejected_system():
    with pytest.raises(BoundsRefused, match="not quasiunipotent"):
        bounds_for(load_fixture("cos_ln_t")["parsed"])
    with pytest.raises(BoundsRefused, match="Euler"):
        bounds_for(load_fixture("hypergeometric_third")["parsed"], ("euler",))


def test_bounds_for_euler_fixture():
    out = bounds_for(load_fixture("euler_0_3")["parsed"])
    assert set(out) == {"euler", "rho", "q"}
    assert out["euler"].value.startswith("19.8495559")
