import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifurc import bt, model
from bifurc.jets import Jet2, PlanarJetSystem


@pytest.mark.parametrize("m", [F(1), F(2), F(7, 3)])
def test_bt_point_at_half(m):
    p = bt.bt_point(m, F(1, 2))
    assert (p.k_c, p.eps_c, p.x, p.y) == (F(9, 16) / m, F(9, 2) / m, 2 * m / 9, 14 * m / 9)
    assert p.codim == 3


def test_bt_point_generic():
    p = bt.bt_point(2, F(2, 5))
    assert p.k_c == F(147, 625)
    assert p.eps_c == F(49, 30)
    assert (p.trace, p.det) == (0, 0)
    assert p.codim == 2
    assert all(r == 0 for r in model.vector_field(p.x, p.y, p.m, p.n, p.eps_c, p.k_c))


def test_bt_point_domain():
    with pytest.raises(bt.BTError) as exc:
        bt.bt_point(2, F(3, 2))
    assert exc.value.code == "n-domain"


def test_nilpotent_frame_is_exact():
    sys = bt.nilpotent_system(F(2), F(2, 5), degree=3, mode="rational")
    u, v = Jet2.variables(sys.vars, 3)
    assert sys.f1 == v
    assert sys.f2.coeff((1, 0)) == 0 and sys.f2.coeff((0, 1)) == 0


def test_closed_form_signs():
    assert bt.snf_coeffs_closed(2, F(1, 4)).c11 > 0
    c = bt.snf_coeffs_closed(2, F(2, 5))
    assert c.c11 == F(343, 3125)


def test_solver_fixed_point_on_normal_form():
    y1, y2 = Jet2.variables(("y1", "y2"), 5, mode="float")
    s = bt.snf_coeffs_homological(PlanarJetSystem(y2, -0.7 * y1 * y1 + 0.3 * y1 * y2))
    assert s.c20 == pytest.approx(-0.7, abs=1e-13)
    assert s.c11 == pytest.approx(0.3, abs=1e-13)
    assert abs(s.c31) < 1e-12


@given(st.sampled_from([1.0, 2.0, 5.0, 0.7]), st.floats(0.05, 0.95).filter(lambda n: abs(n - 0.5) > 1e-3))
@settings(max_examples=25, deadline=None)
def test_solver_matches_closed_form(m, n):
    c = bt.snf_coeffs_closed(m, n)
    s = bt.snf_coeffs_homological(bt.nilpotent_system(m, n))
    assert s.c20 == pytest.approx(c.c20, rel=1e-10)
    assert s.c11 == pytest.approx(c.c11, rel=1e-10)
    assert s.c31 == pytest.approx(c.c31, rel=1e-10)


@pytest.mark.parametrize("n, expected", [(F(2, 5), F(-5, 4)), (F(3, 4), F(8, 9))])
def test_codim2_psnf_corrected(n, expected):
    r = bt.verify_psnf_codim2(F(2), n)
    assert r.passed
    assert r.max_residual == 0
    assert r.coefficients["y1*y2"] == expected


def test_codim2_psnf_printed_sign_fails():
    r = bt.verify_psnf_codim2(F(2), F(2, 5), corrected=False)
    assert not r.passed
    assert r.offending == ["y1' y2*b2", "y2' b1*b2"]


@pytest.fixture(scope="module")
def codim3():
    return {m: bt.verify_psnf_codim3(m) for m in (1.0, 2.0)}


def test_codim3_det_scaling(codim3):
    assert codim3[1.0].solved_det / codim3[2.0].solved_det == pytest.approx(4.0, rel=1e-12)
    assert codim3[2.0].solved_det == pytest.approx(-(27 / 256) * 72 ** 0.2, rel=1e-12)


def test_codim3_printed_mu2_leading_term(codim3):
    assert codim3[2.0].printed_linear_map[1][0] == pytest.approx(-9 * 72 ** 0.2 / 2, rel=1e-12)


def test_codim3_printed_map_is_singular(codim3):
    # the printed parameter map has no b3 column
    assert codim3[2.0].printed_det == 0


def test_codim2_curves_meet_at_origin_and_ratio():
    n = F(2, 5)
    objs = {(o.kind, o.space): o for o in bt.codim2_curves(2, n, samples=11)}
    h, hl = objs[("H", "beta")], objs[("HL", "beta")]
    for obj in (h, hl):
        assert obj.max_sample_residual() < 1e-12
    # same b2 sample on both curves
    (b1h, b2h), (b1l, b2l) = h.samples[-1], hl.samples[-1]
    assert b2h == pytest.approx(b2l)
    assert b1l / b1h == pytest.approx(49 / 25)
    assert b1h == pytest.approx(-0.64 * b2h**2)


def test_gh_curve_lies_on_hopf_surface():
    objs = {o.kind: o for o in bt.codim3_objects(samples=9)}
    for p in objs["GH"].samples:
        assert abs(bt._res_h(p)) < 1e-14
    for p in objs["DHL"].samples:
        assert abs(bt._res_hl(p)) < 1e-14
    assert objs["double-LC"].samples == []


def test_melnikov_zero_sets():
    b1, b3 = -0.04, 0.02
    s = math.sqrt(-b1)
    c = bt.melnikov_coeffs(b1, (5 / 7 * b3 - 103 / 77 * b1) * s, b3)
    assert abs(c.C0) < 1e-15
    c = bt.melnikov_coeffs(b1, -(b3 - b1) * s, b3)
    assert abs(c.C1) < 1e-15
    with pytest.raises(bt.BTError):
        bt.melnikov_coeffs(0.01, 0, 0)


def test_melnikov_numeric_zero_with_closed_form_zero():
    # the bracket and the integral vanish together (closed form and quadrature)
    nb, nu3 = 0.3, 0.4
    nu2 = 5 / 7 * nb * nu3 + 103 / 77 * nb**3
    assert bt.melnikov_closed_form(nb, nu2, nu3) == pytest.approx(0.0, abs=1e-15)
    assert bt.melnikov_integral_numeric(nb, nu2, nu3).M_homoclinic == pytest.approx(0.0, abs=1e-12)


def test_melnikov_small_orbit_sign():
    nb = 0.3
    for nu2, nu3 in ((0.2, 0.1), (-0.2, 0.1), (0.05, -0.5)):
        s = bt.melnikov_integral_numeric(nb, nu2, nu3, h_values=[-2 / 3 * nb**2 * (1 - 1e-6)])
        assert math.copysign(1, s.M[0]) == math.copysign(1, s.center_density)


def test_psnf_hopf_example():
    c = bt.psnf_hopf_check(-0.01, 0.02)
    assert c.generic.v1 == pytest.approx(-0.00625, abs=1e-8)
    assert c.v1_closed == pytest.approx(-0.00625, abs=1e-15)


def test_psnf_equilibria_types():
    eqs = bt.psnf_equilibria(-0.04, 0.0, 0.0)
    assert [e["label"] for e in eqs] == ["E+", "E-"]
    assert eqs[0]["det"] < 0 < eqs[1]["det"]
    assert bt.psnf_equilibria(0.01, 0, 0) == []


def test_sphere_atlas_on_sphere():
    a = bt.sphere_atlas(0.05)
    for p in a.points.values():
        assert math.fsum(x * x for x in p) == pytest.approx(0.05**2, rel=1e-12)
