"""Acceptance criteria, one test each.

Every test records its outcome through the ``record`` fixture; the terminal
summary then prints one PASS/FAIL line per criterion.
"""

import math
import random
from fractions import Fraction as F

import pytest

from bifurc import bt, dynamics, hopf, model
from bifurc.cli import snf_grid_check
from bifurc.jets import Jet2
from bifurc.model import Params


def close(a, b, tol):
    return abs(float(a) - float(b)) <= tol


def rel(a, b):
    return abs(float(a) - float(b)) / abs(float(b))


FOCUS_TABLE = [
    ((1.6, 0.30, 1.50, 0.25), -0.082227),
    ((2.0, 0.25, 1.50, 0.15625), -0.038194),
    ((1.5, 0.30, 1.55, 0.25), -0.135503),
    ((11.07825, 0.4771, 0.995, 0.0295), 0.001773),
    ((10.5, 0.4771, 0.43, 0.0509), -0.000831),
]

# Generalized Hopf point at m = 2, n = 5/11 moved slightly into the two-cycle region
FIG3B = Params(2, F(5, 11), F(3407490109063040, 1096763591581219), F(203821518599, 924070050000))
FIG3B_V = (
    F(4299, 220000000),
    F(-216980684800000, 83938145042658897),
    F(14817759528898477514254458827898880000000, 200973840260810036901676626005378422866729),
)


def test_c01_focus_value_table(record):
    checks = {}
    for tup, expected in FOCUS_TABLE:
        fv, _, _ = hopf.focus_values_at_params(Params(*map(str, tup)))
        checks[f"v1{tup} = {fv.v1:.6f} vs {expected}"] = close(fv.v1, expected, 1e-5)
    for m, expected in (("11.07825", 0.485004), ("10.5", 0.511714)):
        es = hopf.eps_star(model.parse_number(m), model.parse_number("0.4771"))
        checks[f"eps*(m={m}) = {float(es):.7f} vs {expected}"] = close(es, expected, 1e-6)
    record(1, checks)


def test_c02_codim2_locus(record):
    c = hopf.codim2_locus(F(2), F(5, 11))
    v2 = F(46661632000, 845676707337)
    record(2, {
        "R- exact": c.R_minus == F(1727, 1280),
        "kH exact": c.kH == F(1280, 5929),
        "eps* exact": c.eps_star == F(320, 99),
        "v2 oracle exact": c.v2_oracle == v2,
        f"v2 generic rel err {rel(c.v2_generic, v2):.2e}": rel(c.v2_generic, v2) <= 1e-7,
    })


@pytest.mark.slow
def test_c03_amplitudes_and_simulation(record):
    radii = hopf.predict_amplitudes(*FIG3B_V)
    checks = {
        f"inner radius {float(radii[0]):.8f}": close(radii[0], 0.105015, 1e-6),
        f"outer radius {float(radii[1]):.8f}": close(radii[1], 0.155024, 1e-6),
    }
    cycles = dynamics.find_limit_cycles(FIG3B)
    checks[f"two cycles found ({len(cycles)})"] = len(cycles) == 2
    for c, r, stab in zip(cycles, radii, ("stable", "unstable")):
        err = rel(c.amplitude, r)
        checks[f"cycle {c.amplitude:.5f} vs {float(r):.5f} within 10% (err {err:.1%})"] = err <= 0.10
        checks[f"cycle {c.amplitude:.5f} is {stab} ({c.stability})"] = c.stability == stab
    record(3, checks)


def test_c04_resultant(record):
    r = hopf.resultant_check()
    record(4, {
        f"one root in (0,1) (got {r.root_count_in_unit_interval})": r.root_count_in_unit_interval == 1,
        "root is 1/2": r.roots_in_unit_interval == [F(1, 2)],
        "R bar = 23/18": r.R_bar == F(23, 18),
        "v1 m^2 = 3240/17303": r.v1_at_R_bar_times_m2 == F(3240, 17303),
    })


def test_c05_bt_snf(record):
    grid = snf_grid_check()
    checks = {
        f"grid points {len(grid['rows']) // 3}": len(grid["rows"]) == 3 * 27,
        f"grid max rel err {grid['max_rel_error']:.2e}": grid["passed"],
    }
    for m in (F(1), F(2), F(7, 3)):
        c = bt.snf_coeffs_closed(m, F(1, 2))
        checks[f"n=1/2 m={m}"] = (c.c20, c.c11, c.c31) == (F(-27, 64) / m, 0, F(-729, 1024) / m**3)
    s = bt.snf_coeffs_homological(bt.nilpotent_system(2.0, 0.5))
    checks["n=1/2 solver"] = (close(s.c20, -27 / 128, 1e-12) and abs(s.c11) < 1e-12
                              and close(s.c31, -729 / 8192, 1e-12))
    record(5, checks)


def test_c06_psnf_verification(record):
    checks = {}
    for n in (F(2, 5), F(3, 4)):
        r = bt.verify_psnf_codim2(F(2), n)
        checks[f"codim-2 n={n} max residual {r.max_residual:.1e}"] = r.passed
    c3 = bt.verify_psnf_codim3(2.0)
    off = ", ".join(c3.printed.offending)
    checks[f"codim-3 displayed residuals (offending: {off or 'none'})"] = c3.passed_residuals
    ref = -(27 / 64 / 4) * 72 ** 0.2
    checks[f"codim-3 det {c3.solved_det:.16g} vs {ref:.16g}"] = rel(c3.solved_det, ref) <= 1e-12
    record(6, checks)


def test_c07_psnf_hopf(record):
    rng = random.Random(20240607)
    worst1 = worst2 = 0.0
    for _ in range(20):
        b1 = -rng.uniform(0.01, 0.5)
        b3 = rng.uniform(-1.0, 1.0)
        c = bt.psnf_hopf_check(b1, b3, K=1)
        worst1 = max(worst1, abs(c.generic.v1 - c.v1_closed))
        c = bt.psnf_hopf_check(b1, -3 * b1, K=2)
        worst2 = max(worst2, abs(c.generic.v2 - c.v2_closed))
    record(7, {f"v1 max err {worst1:.1e}": worst1 <= 1e-8, f"v2 max err {worst2:.1e}": worst2 <= 1e-8})


def test_c08_melnikov(record):
    checks = {}
    for nb, nu2, nu3 in ((0.3, 0.1, 0.2), (0.5, -0.2, 0.7), (0.1, 0.05, -1.0)):
        s = bt.melnikov_integral_numeric(nb, nu2, nu3)
        checks[f"M(0)/C0 = {s.ratio:.12f} at {(nb, nu2, nu3)}"] = abs(s.ratio - 1) <= 1e-6
        near = s.M[-1]
        checks[f"M(h->0-) continuous at {(nb, nu2, nu3)}"] = abs(near - s.M_homoclinic) <= 1e-4 * abs(s.M_homoclinic)
    for b1 in (F(-1, 100), F(-1, 4), F(-9, 16)):
        b3, P = bt.melnikov_joint_zero(b1)
        root = F(math.isqrt(-b1.numerator), math.isqrt(b1.denominator))
        b2 = P * root
        checks[f"joint zero b1={b1}"] = b3 == F(15, 11) * b1 and b2 == -F(4, 11) * b1 * root
    atlas = bt.sphere_atlas(0.05)
    expected = {"GH": (-0.015617, 0.007807, 0.046852), "DHL": (-0.029548, 0.001847, -0.040293),
                "C": (-0.031337, 0.012103, 0.037034)}
    for name, pt in expected.items():
        got = atlas.points[name]
        checks[f"atlas {name}"] = all(abs(a - b) <= 1e-5 for a, b in zip(got, pt))
    record(8, checks)


@pytest.mark.slow
def test_c09_homoclinic_shooting(record):
    r1 = dynamics.find_homoclinic(lambda e: Params(2, F(2, 5), e, (90 - 11 * e) / 300), (1.66, 1.69))
    r2 = dynamics.find_homoclinic(lambda k: Params(2, F(3, 4), 8, k), (0.2342, 0.2344))
    r3 = dynamics.find_homoclinic(lambda e: Params(2, F(5, 12), e, 0.16202), (4.45, 4.55))
    record(9, {
        f"eps {r1.parameter:.7f}": close(r1.parameter, 1.676171875, 1e-3),
        f"k {r2.parameter:.8f}": close(r2.parameter, 0.23426542, 1e-4),
        f"eps {r3.parameter:.7f}": close(r3.parameter, 4.485125, 1e-3),
    })


PORTRAIT_POINTS = [
    # (m, n, eps, k, label)
    *[(2, F(2, 5), e, (90 - 11 * e) / 300, lab) for e, lab in
      ((1.55, "stable-E2-"), (1.60, "stable-LC"), (1.676171875, "stable-HL"), (1.80, "unstable-E2-"))],
    *[(2, F(3, 4), 8, k, lab) for k, lab in
      ((0.2336, "unstable-E2-"), (0.23395, "unstable-LC"), (0.23426542, "unstable-HL"), (0.2345, "stable-E2-"))],
    *[(2, F(5, 12), e, k, lab) for k, e, lab in
      ((0.2439, 2.2, "stable-E2-"), (0.2439, 1.95, "stable-LC"), (0.2439, 1.871268, "stable-HL"),
       (0.2, 3.13, "2-LC"), (0.16202, 4.2, "unstable-E2-"), (0.16202, 4.44, "unstable-LC"),
       (0.16202, 4.485125, "unstable-HL"), (0.16202, 4.6, "stable-E2-"))],
]


@pytest.mark.slow
def test_c10_portraits(record):
    checks = {}
    for m, n, e, k, lab in PORTRAIT_POINTS:
        got = dynamics.classify_portrait(Params(m, n, e, k)).label
        checks[f"(n={n}, eps={e:.6g}, k={k:.8g}) {got} vs {lab}"] = got == lab
    record(10, checks)


def _ring_axioms(rng: random.Random, trials: int = 30) -> bool:
    names = ("x", "y")

    def rand_jet():
        terms = {(i, j): F(rng.randint(-9, 9), rng.randint(1, 9))
                 for i in range(5) for j in range(5 - i) if rng.random() < 0.6}
        return Jet2(names, 4, terms)

    one = Jet2.constant(names, 4, 1)
    zero = Jet2.zero(names, 4)
    for _ in range(trials):
        a, b, c = rand_jet(), rand_jet(), rand_jet()
        ok = (a + b == b + a and a * b == b * a and (a + b) + c == a + (b + c)
              and (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c
              and a * one == a and a + zero == a and (a - a).is_zero())
        if not ok:
            return False
    return True


def _oracle_worst(rng: random.Random, count: int = 120) -> float:
    worst = 0.0
    done = 0
    while done < count:
        m = F(rng.randint(5, 200), 10)
        n = F(rng.randint(1, 99), 100)
        lo, hi = model.R_window(m, n)
        R = lo + (hi - lo) * F(rng.randint(1, 999), 1000)
        try:
            o = hopf.focus_values_oracle(m, n, R)
        except hopf.HopfError:
            continue
        g = hopf.focus_values(float(m), float(n), float(R), K=1)
        worst = max(worst, rel(g.v1, o.v1))
        done += 1
    return worst


def _equilibrium_residuals_zero(rng: random.Random, count: int = 40) -> bool:
    for _ in range(count):
        p = Params(F(rng.randint(1, 40), 4), F(rng.randint(1, 19), 20), F(rng.randint(1, 80), 8),
                   F(rng.randint(1, 200), 100))
        for e in model.equilibria(p):
            if any(r != 0 for r in e.residual(p)):
                return False
    return True


def test_c11_property_suites(record):
    rng = random.Random(11)
    worst = _oracle_worst(rng)
    drift = dynamics.energy_drift()
    record(11, {
        "jet ring axioms": _ring_axioms(rng),
        f"oracle v1 max rel err {worst:.1e}": worst <= 1e-9,
        f"energy drift {drift:.2e}": drift < 1e-8,
        "equilibrium residuals exactly zero": _equilibrium_residuals_zero(rng),
    })
