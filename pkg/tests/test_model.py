import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifurc import model
from bifurc.model import ModelError, Params, Surd

FIG1 = dict(m=2, n=F(1, 3), eps=F(5, 4))


def kinds(p):
    return [e.kind for e in model.equilibria(p)]


def test_fig1_thresholds_exact():
    t = model.thresholds(Params(k=F(1, 4), **FIG1))
    assert t.kStar == F(640, 3243)
    assert t.kSN == F(320, 1587)
    assert t.kT == F(2, 9)
    assert t.kHminus == Surd(F(4035, 19044), F(-17, 19044), 105)
    assert t.kHplus == Surd(F(4035, 19044), F(17, 19044), 105)


def test_fig3_thresholds_exact():
    t = model.thresholds(Params(2, F(5, 11), F(320, 99), F(1, 4)))
    assert t.kSN == F(57600, 290521)
    assert t.kHplus == F(1280, 5929)
    assert t.kT == F(40, 121)


def test_equilibria_around_saddle_node():
    kSN = F(320, 1587)
    assert kinds(Params(k=kSN + F(1, 10**6), **FIG1)) == ["E1", "E2minus", "E2plus"]
    assert kinds(Params(k=kSN - F(1, 10**6), **FIG1)) == ["E1"]
    # double root
    eqs = model.equilibria(Params(k=kSN, **FIG1))
    assert [e.kind for e in eqs] == ["E1", "E2minus"]
    assert eqs[1].det == 0


def test_bt_point_has_double_zero():
    p = Params(2, F(1, 2), F(9, 4), F(9, 32))
    (a, b), (c, d) = model.jacobian(p, (F(4, 9), F(28, 9)))
    assert (a + d, a * d - b * c) == (0, 0)


def test_e1_linearization():
    p = Params(2, F(1, 3), F(5, 4), F(1, 4))
    e1 = model.equilibria(p)[0]
    (a, b), (c, d) = model.jacobian(p, (e1.x, e1.y))
    assert b == 0 or c == 0
    assert {a, d} == {p.k * p.m / p.n - (p.n + 1), -p.n}


def test_case_labels():
    assert model.classify_case(Params(k=F(1, 4), **FIG1)).label == "2d"
    c = model.classify_case(Params(2, F(5, 11), F(320, 99), F(1280, 5929)))
    assert c.label == "2c(ii)"
    assert c.hopf_count == 1
    low = model.classify_case(Params(2, F(1, 3), F(1, 2), F(1, 4)))
    assert low.label == "1a"
    assert low.hopf_count == 0


def test_case_boundary_is_explicit():
    # eps = eps3 separates 2b/2c from 2d
    rep = model.classify_case(Params(2, F(2, 5), F(49, 30), F(1, 4)))
    assert rep.label == "boundary"
    assert rep.boundaries == ["eps=eps3"]


def test_kH_of_R_examples():
    assert model.kH_of_R(2, F(5, 11), F(1727, 1280)) == F(1280, 5929)
    n = F(2, 7)
    assert model.kH_of_R(3, n, (n + 2) / (n + 1) ** 2) == 0
    with pytest.raises(ModelError):
        model.kH_of_R(3, n, 1 / (n + 1))


@pytest.mark.parametrize("text, value", [("0.4771", F(4771, 10000)), ("5/11", F(5, 11)), ("2", F(2))])
def test_parse_number_is_exact(text, value):
    assert model.parse_number(text) == value


def test_params_reject_nonpositive():
    with pytest.raises(ModelError):
        Params(0, F(1, 2), 1, 1)


@given(st.integers(1, 40), st.integers(1, 19), st.integers(1, 80), st.integers(1, 200))
@settings(max_examples=60, deadline=None)
def test_equilibrium_residual_exact(mi, ni, ei, ki):
    p = Params(F(mi, 4), F(ni, 20), F(ei, 8), F(ki, 100))
    for e in model.equilibria(p):
        assert all(r == 0 for r in e.residual(p))


@given(st.floats(0.5, 20), st.floats(0.05, 0.95), st.floats(0.1, 10), st.floats(0.01, 2))
@settings(max_examples=60, deadline=None)
def test_float_equilibrium_residual_small(m, n, e, k):
    p = Params(m, n, e, k)
    for eq in model.equilibria(p):
        dx, dy = eq.residual(p)
        scale = max(1.0, abs(float(eq.x)), abs(float(eq.y)))
        assert abs(dx) <= 1e-9 * scale ** 3 * max(1.0, k * e) and abs(dy) <= 1e-9 * scale


def test_surd_arithmetic():
    s = model.sqrt_exact(F(8))
    assert s * s == 8
    assert math.isclose(float(s), math.sqrt(8))
