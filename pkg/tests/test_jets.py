from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifurc.jets import DenseRing, Jet2, JetError, PlanarJetSystem, jet_substitute, taylor_expand

VARS = ("x", "y")
D = 4

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=7)
exps = st.tuples(st.integers(0, D), st.integers(0, D)).filter(lambda e: sum(e) <= D)
jets = st.dictionaries(exps, coeff, max_size=8).map(lambda t: Jet2(VARS, D, t))


@given(jets, jets, jets)
@settings(max_examples=60, deadline=None)
def test_ring_axioms_exact(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(jets, jets)
@settings(max_examples=40, deadline=None)
def test_product_rule(a, b):
    # derivatives lose one degree, so compare below the truncation edge
    lhs = (a * b).partial("x").truncate(D - 2)
    rhs = (a.partial("x") * b + a * b.partial("x")).truncate(D - 2)
    assert lhs == rhs


@given(jets)
@settings(max_examples=40, deadline=None)
def test_json_roundtrip(a):
    assert Jet2.from_json(a.to_json()) == a


def test_truncation_drops_high_degree():
    x, y = Jet2.variables(VARS, 3)
    p = (x + y) ** 4
    assert p.is_zero()
    assert ((x + y) ** 3).coeff((2, 1)) == 3


def test_reciprocal_series():
    x, _ = Jet2.variables(VARS, 5)
    r = (1 - x).reciprocal()
    assert all(r.coeff((i, 0)) == 1 for i in range(6))
    assert ((1 - x) * r) == Jet2.constant(VARS, 5, 1)


def test_reciprocal_needs_unit():
    x, _ = Jet2.variables(VARS, 3)
    with pytest.raises(JetError) as exc:
        x.reciprocal()
    assert exc.value.code == "not-invertible"


def test_substitution_composes():
    x, y = Jet2.variables(VARS, 4)
    p = x * x + y
    q = jet_substitute(p, {"x": x + y, "y": x * y})
    assert q == x * x + 3 * x * y + y * y


def test_mixed_vars_rejected():
    a = Jet2.variable(VARS, "x", 3)
    b = Jet2.variable(("u", "v"), "u", 3)
    with pytest.raises(JetError):
        a + b


def test_float_mode_evaluate_matches_polynomial():
    x, y = Jet2.variables(VARS, 6, mode="float")
    p = (x - 2 * y) ** 3 + x * y
    assert p.evaluate((0.3, -0.1)) == pytest.approx((0.5) ** 3 - 0.03, rel=1e-14)


def test_taylor_expand_linear_part():
    def rhs(X, Y, mu):
        return Y, -X + X * X

    sys = taylor_expand(rhs, (F(0), F(0)), 3)
    tr, det = sys.trace_det()
    assert (tr, det) == (0, 1)
    assert sys.classify_linear() == "rotation"
    assert sys.f2.coeff((2, 0)) == 1


def test_dense_ring_agrees_with_jet2():
    ring = DenseRing(VARS, 4)
    x, y = Jet2.variables(VARS, 4, mode="float")
    a, b = 1 + x - 2 * y * x, y * y + 0.5 * x
    prod = ring.to_jet(ring.mul(ring.from_jet(a), ring.from_jet(b)))
    assert np.allclose([prod.coeff(e) for e in ring.monomials], [(a * b).coeff(e) for e in ring.monomials])


def test_planar_system_equilibrium_flag():
    x, y = Jet2.variables(VARS, 3)
    assert PlanarJetSystem(y, -x).is_equilibrium()
    assert not PlanarJetSystem(y + 1, -x).is_equilibrium()
