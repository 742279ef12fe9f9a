import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifurc import hopf, model
from bifurc.jets import Jet2, PlanarJetSystem


def test_jordan_reduce_first_quadratic_term():
    m, n, R = F(2), F(5, 11), F(1727, 1280)
    sys = hopf.jordan_reduce(m, n, R, mode="float", degree=3)
    Q1, Q2, _, _ = hopf.q_factors(n, R)
    assert sys.constant_terms() == (0, 0)
    assert sys.f1.coeff((2, 0)) == pytest.approx(float(-1 / (m * (n + 1) * Q1 * Q2**2)), rel=1e-12)


def test_omega_squared_positive_on_fig1_branch():
    m, n, eps = 2, F(1, 3), F(5, 4)
    for R in model.hopf_R_values(m, n, eps):
        assert float(hopf.omega_squared(n, R)) > 0


def test_normal_form_of_textbook_focus():
    # u' = v + u (u^2 + v^2), v' = -u + v (u^2 + v^2): first focus value 1
    u, v = Jet2.variables(("u", "v"), 5, mode="float")
    r2 = u * u + v * v
    fv = hopf.focus_values_generic(PlanarJetSystem(v + u * r2, -u + v * r2), K=2)
    assert fv.v1 == pytest.approx(1.0, abs=1e-12)
    assert fv.v2 == pytest.approx(0.0, abs=1e-12)


def test_oracle_at_R_bar():
    fv = hopf.focus_values_oracle(F(3), F(1, 2), F(23, 18))
    assert fv.v1 == F(3240, 17303) / 9


def test_v1a_vanishes_at_R_minus():
    for n in (F(2, 5), F(5, 11), F(9, 20)):
        Rm, _ = hopf.R_pm(n)
        assert hopf.v1a_poly(n, Rm) == 0


def test_window_errors_name_bound():
    n = F(5, 11)
    with pytest.raises(hopf.HopfError) as exc:
        hopf.focus_values_oracle(2, n, (n + 2) / (n + 1) ** 2)
    assert exc.value.code == "R-below-window"
    with pytest.raises(hopf.HopfError) as exc:
        hopf.focus_values_oracle(2, n, model.R_bt(n))
    assert exc.value.code == "BT-candidate"


def test_classify_hopf_criticality():
    sub = hopf.classify_hopf(model.parse_number("11.07825"), model.parse_number("0.4771"), model.parse_number("0.995"))
    sup = hopf.classify_hopf(model.parse_number("10.5"), model.parse_number("0.4771"), model.parse_number("0.43"))
    assert sub.criticality == "subcritical"
    assert sup.criticality == "supercritical"
    assert float(sub.eps_star) == pytest.approx(0.485004, abs=1e-6)
    assert float(sup.eps_star) == pytest.approx(0.511714, abs=1e-6)


def test_small_n_is_supercritical():
    c = hopf.classify_hopf(2, F(1, 4), F(3, 2))
    assert c.criticality == "supercritical"
    assert all(pt.criticality == "supercritical" for pt in c.points)


def test_codim2_domain():
    with pytest.raises(hopf.HopfError):
        hopf.codim2_locus(2, F(3, 5))


def test_R_minus_tends_to_window_edge():
    n = F(1, 3) + F(1, 10**6)
    lo, _ = model.R_window(2, n)
    Rm, _ = hopf.R_pm(n)
    assert abs(float(Rm) - float(lo)) < 1e-4


def test_resultant_factor():
    r = hopf.resultant_check()
    assert r.divisible_by_reference
    assert r.common_R_at_root == [F(14, 9)]


def test_predict_amplitudes_trivial():
    assert hopf.predict_amplitudes(0, F(-1), F(4)) == [F(1, 2)]
    assert hopf.predict_amplitudes(F(1), F(1), F(1)) == []


@given(st.integers(5, 200), st.integers(1, 99), st.integers(1, 999))
@settings(max_examples=60, deadline=None)
def test_generic_v1_matches_oracle(mi, ni, ri):
    m, n = F(mi, 10), F(ni, 100)
    lo, hi = model.R_window(m, n)
    R = lo + (hi - lo) * F(ri, 1000)
    try:
        o = hopf.focus_values_oracle(m, n, R)
    except hopf.HopfError:
        return
    g = hopf.focus_values(float(m), float(n), float(R), K=1)
    assert math.isclose(g.v1, float(o.v1), rel_tol=1e-9)


@pytest.mark.parametrize("n", [F(7, 20), F(2, 5), F(9, 20)])
def test_generic_v2_matches_oracle_on_bautin_locus(n):
    # v2 is an invariant only where v1 vanishes
    Rm, _ = hopf.R_pm(n)
    o = hopf.focus_values_oracle(F(3), n, Rm)
    g = hopf.focus_values(3.0, float(n), float(Rm), K=2, mode="extended")
    assert abs(float(g.v1)) < 1e-12
    assert math.isclose(float(g.v2), float(o.v2), rel_tol=1e-9)
