import math
from fractions import Fraction as F

import numpy as np
import pytest

from bifurc import dynamics as D
from bifurc import hopf
from bifurc.model import Params

FIG3B = Params(2, F(5, 11), F(3407490109063040, 1096763591581219), F(203821518599, 924070050000))


def test_energy_drift_default_integrator():
    assert D.energy_drift() < 1e-8


def test_rk45_is_selectable():
    drift = D.energy_drift(periods=10, method="RK45")
    assert drift < 1e-7


def test_bad_tolerance_rejected():
    with pytest.raises(D.DynamicsError):
        D.integrate(FIG3B, (0.5, 1.0), (0, 1), tol=0.0)


def test_time_reversal_returns_to_start():
    p = Params(2.0, 0.4, 1.6, 0.25)
    z0 = np.array([0.6, 3.0])
    fwd = D.integrate(p, z0, (0.0, 5.0))
    back = D.integrate(p, fwd.final, (5.0, 0.0))
    assert np.allclose(back.final, z0, atol=1e-7)


def test_jordan_frame_roundtrip():
    fr = D.jordan_frame(FIG3B)
    X, Y = fr.to_state(0.03, -0.02)
    assert fr.to_frame(X, Y) == pytest.approx((0.03, -0.02), abs=1e-14)
    assert fr.omega > 0


def test_jordan_frame_needs_e2():
    with pytest.raises(D.DynamicsError) as exc:
        D.jordan_frame(Params(2, F(1, 3), F(5, 4), F(1, 10)))
    assert exc.value.code == "no-E2"


def test_poincare_fixed_point_is_cycle():
    fr = D.jordan_frame(FIG3B)
    c = D.find_limit_cycles(FIG3B)[0]
    s_next, period = D.poincare_map(FIG3B, fr, c.amplitude)
    assert s_next == pytest.approx(c.amplitude, rel=1e-7)
    assert period == pytest.approx(c.period, rel=1e-6)


def test_cycles_agree_in_both_time_directions():
    fwd = D.find_limit_cycles(FIG3B)
    bwd = D.find_limit_cycles(FIG3B, direction=-1)
    assert [c.stability for c in fwd] == ["stable", "unstable"]
    assert [c.amplitude for c in bwd] == pytest.approx([c.amplitude for c in fwd], rel=1e-5)


def test_hopf_amplitude_square_root_scaling():
    c = hopf.classify_hopf(2, F(1, 4), F(3, 2))
    kH = float(c.points[-1].kH)
    amps = []
    for d in (1e-4, 4e-4):
        cycles = D.find_limit_cycles(Params(2.0, 0.25, 1.5, kH - d))
        assert [x.stability for x in cycles] == ["stable"]
        amps.append(cycles[0].amplitude)
    assert amps[1] / amps[0] == pytest.approx(2.0, rel=0.05)
    assert D.find_limit_cycles(Params(2.0, 0.25, 1.5, kH + 1e-4)) == []


def test_splitting_changes_sign_across_loop():
    fam = lambda e: Params(2, F(2, 5), e, (90 - 11 * e) / 300)  # noqa: E731
    lo, hi = D.splitting(fam(1.66)), D.splitting(fam(1.69))
    assert lo.value * hi.value < 0


def test_homoclinic_needs_sign_change():
    fam = lambda e: Params(2, F(2, 5), e, (90 - 11 * e) / 300)  # noqa: E731
    with pytest.raises(D.DynamicsError) as exc:
        D.find_homoclinic(fam, (1.50, 1.55))
    assert exc.value.code == "no-sign-change"


@pytest.mark.slow
def test_fig11c_loop():
    r = D.find_homoclinic(lambda e: Params(2, F(5, 12), e, 0.2439), (1.85, 1.9))
    assert r.parameter == pytest.approx(1.871268, abs=1e-3)
    assert r.stability == "stable"


@pytest.mark.slow
def test_two_cycle_portrait():
    rep = D.classify_portrait(Params(2, F(5, 12), 3.13, 0.2))
    assert rep.label == "2-LC"
    assert [c.stability for c in rep.cycles] == ["stable", "unstable"]
    assert rep.label in D.PORTRAIT_LABELS
    assert not math.isnan(rep.e2_trace)
