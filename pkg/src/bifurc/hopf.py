"""Hopf bifurcation analysis on the positive equilibrium branch.

The branch point ``Y2 = R m`` together with ``k = kH(R)`` and ``eps = eps(R)``
is a Hopf point; :func:`jordan_reduce` expands the model there in a frame
whose linear part is the rotation block ``[[0, w], [-w, 0]]``.
:func:`focus_values_generic` computes focus values of any such planar jet by a
complex normal-form recursion, and :func:`focus_values_oracle` evaluates the
known closed forms for the epidemic model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import mpmath

from .jets import EXTENDED_DPS, Jet2, JetError, PlanarJetSystem, taylor_expand
from .model import (
    ModelError,
    Params,
    Surd,
    _cmp,
    _exact,
    classify_case,
    eps_of_R,
    hopf_R_values,
    kH_of_R,
    R_bt,
    sqrt_exact,
    vector_field,
)

__all__ = [
    "HopfError",
    "FocusValues",
    "HopfPoint",
    "HopfClassification",
    "Codim2Point",
    "ResultantReport",
    "q_factors",
    "omega_squared",
    "v1a_poly",
    "v2a_poly",
    "R_pm",
    "R_min",
    "eps_star",
    "jordan_reduce",
    "focus_values_generic",
    "focus_values_oracle",
    "focus_values",
    "focus_values_at_params",
    "classify_hopf",
    "codim2_locus",
    "resultant_check",
    "predict_amplitudes",
]

V1_ZERO_TOL = 1e-9
EXTENDED_TRIGGER = 1e-6
HOPF_SNAP_RTOL = 1e-3


class HopfError(ValueError):
    """Domain error of the Hopf analysis; ``code`` names the violated condition."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def _num(v):
    if isinstance(v, (Fraction, Surd)):
        return {"exact": str(v), "value": float(v)}
    if v is None:
        return None
    return {"value": float(v)}


@dataclass(frozen=True)
class FocusValues:
    """Rotation frequency and focus values ``v_1..v_K`` at a Hopf point."""

    omega_c: Any
    v: tuple
    source: str  # "generic-normal-form" or "closed-form-oracle"
    K: int
    precision: str = "float"

    def __post_init__(self):
        if not float(self.omega_c) > 0:
            raise HopfError("bad-omega", f"omega_c must be positive, got {self.omega_c}")
        if len(self.v) != self.K:
            raise HopfError("bad-length", "focus value list length differs from K")

    @property
    def v1(self):
        return self.v[0]

    @property
    def v2(self):
        return self.v[1] if self.K > 1 else None

    def to_dict(self) -> dict:
        return {"omega_c": _num(self.omega_c), "v": [_num(x) for x in self.v], "source": self.source,
                "K": self.K, "precision": self.precision}


# ---------------------------------------------------------------------------
# closed-form ingredients

def q_factors(n, R):
    """``(Q1, Q2, Q3, W)`` with ``W = n + 1 - n Q3``; all positive inside the Hopf window."""
    Q1 = 1 - n * R
    Q2 = (n + 1) * R - 1
    Q3 = (n + 1) ** 2 * R - n
    return Q1, Q2, Q3, n + 1 - n * Q3


def omega_squared(n, R):
    return (n * n + n + 1 - n * (n + 1) ** 2 * R) / ((n + 1) * R - 1)


def v1a_poly(n, R):
    return n * (n + 1) ** 4 * R**2 - 2 * (n * n + n + 1) * (n + 1) ** 2 * R + (n**3 + 2 * n**2 + 5 * n + 3)


_V2A_COEFFS = (
    # (power of R, prefactor power of (n+1), extra power of n, polynomial in n low->high), sign
    (7, 12, 3, (27, 28), +1),
    (6, 10, 2, (108, 267, 350, 196), -1),
    (5, 8, 1, (135, 672, 1683, 2101, 1533, 588), +1),
    (4, 6, 0, (54, 602, 2567, 5620, 7711, 6500, 3360, 980), -1),
    (3, 4, 0, (169, 1400, 5215, 11680, 16730, 16174, 10330, 4165, 980), +1),
    (2, 2, 0, (192, 1443, 5563, 13397, 21409, 23190, 17466, 8995, 2982, 588), -1),
    (1, 1, 0, (-36, 84, 1470, 4886, 8410, 8961, 6349, 3138, 959, 196), +1),
    (0, 0, 0, (189, 517, 334, -460, -1291, -1470, -979, -474, -132, -28), +1),
)


def _horner(coeffs, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def v2a_coefficients(n) -> list:
    """Coefficients of ``v2a`` as a polynomial in ``R`` (index = power)."""
    out = [0] * 8
    for power, p1, pn, poly, sign in _V2A_COEFFS:
        out[power] = sign * (n + 1) ** p1 * n**pn * _horner(poly, n)
    return out


def v2a_poly(n, R):
    return _horner(v2a_coefficients(n), R)


def v1a_coefficients(n) -> list:
    return [n**3 + 2 * n**2 + 5 * n + 3, -2 * (n * n + n + 1) * (n + 1) ** 2, n * (n + 1) ** 4]


def R_pm(n):
    """Roots ``(R-, R+)`` of ``v1a`` in ``R`` (need ``n <= 1/2``)."""
    ex = _exact(n)
    disc = (1 - 2 * n) * (n + 1)
    if _cmp(disc, 0, ex) < 0:
        raise HopfError("n-domain", "R+- are real only for n <= 1/2")
    s = sqrt_exact(disc) if ex else math.sqrt(disc)
    base = n * n + n + 1
    den = n * (n + 1) ** 2
    return (base - s) / den, (base + s) / den


def R_min(n):
    """Minimizer of ``eps(R)`` on the branch."""
    return (2 * n * n + 4 * n + 1) / (2 * n * (n + 1) ** 2)


def eps_star(m, n):
    """Critical incidence nonlinearity separating super- and subcritical Hopf points.

    Defined for ``1/3 < n < 1/2``; equals ``eps(R-)``.
    """
    ex = _exact(m, n)
    if not (_cmp(Fraction(1, 3), n, ex) < 0 and _cmp(n, Fraction(1, 2), ex) < 0):
        raise HopfError("n-domain", "eps* is defined for 1/3 < n < 1/2")
    s = sqrt_exact((1 + n) * (1 - 2 * n)) if ex else math.sqrt((1 + n) * (1 - 2 * n))
    return n * (n + 1) ** 2 / (m * ((1 - 2 * n) * s + (n * n + 2 * n - 1)))


def _check_window(m, n, R):
    ex = _exact(m, n, R)
    if not (_cmp(0, n, ex) < 0 and _cmp(n, 1, ex) < 0):
        raise HopfError("n-domain", f"Hopf points need 0 < n < 1, got n={n}")
    if _cmp(R, R_bt(n), ex) == 0:
        raise HopfError("BT-candidate", f"R = 1/n - 1/(n+1)^2 = {R} is the double-zero point")
    lo = (n + 2) / (n + 1) ** 2
    if _cmp(R, lo, ex) <= 0:
        raise HopfError("R-below-window", f"R={float(R):.12g} must exceed R_* = (n+2)/(n+1)^2 = {float(lo):.12g}")
    if _cmp(R, R_bt(n), ex) > 0:
        raise HopfError("R-above-window", f"R={float(R):.12g} must be below 1/n - 1/(n+1)^2 = {float(R_bt(n)):.12g}")
    kH = kH_of_R(m, n, R)
    cap = 1 / (n + 1) + 1 / (m * kH)
    if _cmp(R, cap, ex) >= 0:
        raise HopfError("R-above-window", f"R={float(R):.12g} must be below 1/(n+1) + 1/(m kH) = {float(cap):.12g}")


# ---------------------------------------------------------------------------
# Jordan reduction

def _sqrt_mode(x, mode):
    if mode == "rational":
        r = sqrt_exact(x)
        if isinstance(r, Surd):
            raise HopfError("irrational-omega", f"omega_c = sqrt({x}) is irrational; use float mode")
        return r
    if mode == "extended":
        with mpmath.workdps(EXTENDED_DPS):
            return mpmath.sqrt(_to_mode(x, mode))
    return math.sqrt(float(x))


def _to_mode(x, mode):
    if mode == "rational":
        return Fraction(x) if not isinstance(x, Surd) else x
    if mode == "extended":
        with mpmath.workdps(EXTENDED_DPS):
            if isinstance(x, Fraction):
                return mpmath.mpf(x.numerator) / x.denominator
            if isinstance(x, Surd):
                return (mpmath.mpf(x.a.numerator) / x.a.denominator
                        + mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(x.d))
            return mpmath.mpf(x)
    return float(x)


def jordan_reduce(m, n, R, mode: str = "float", degree: int = 7) -> PlanarJetSystem:
    """Expand the model at the Hopf point ``Y2 = R m`` in the rotation frame.

    ``k = kH(R)`` and ``eps = eps(R)``; the frame is
    ``X = X2 + u`` and ``Y = Y2 + a u + b v`` with
    ``a = n Q2/((n+1)(nR-1))`` and ``b = -w Q2/((n+1)(nR-1))`` so that the
    linear part is ``[[0, w], [-w, 0]]``.

    Raises
    ------
    HopfError
        ``R`` outside the admissible window, or at the double-zero point.
    """
    _check_window(m, n, R)
    with mpmath.workdps(EXTENDED_DPS):
        mm, nn, RR = (_to_mode(x, mode) for x in (m, n, R))
        w = _sqrt_mode(omega_squared(n, R), mode)
        kH = kH_of_R(mm, nn, RR)
        eps = eps_of_R(mm, nn, RR)
        Q2 = (nn + 1) * RR - 1
        a = nn * Q2 / ((nn + 1) * (nn * RR - 1))
        b = -w * Q2 / ((nn + 1) * (nn * RR - 1))
        X0 = mm * (1 - nn * RR)
        Y0 = mm * RR

        def rhs(X, Y, mu):
            return vector_field(X, Y, mm, nn, eps, kH)

        sys = taylor_expand(rhs, (X0, Y0), degree, frame=((1, 0), (a, b)), mode=mode)
    # the expansion point is an equilibrium: clear round-off in the constant terms
    f1 = _drop_constant(sys.f1)
    f2 = _drop_constant(sys.f2)
    return PlanarJetSystem(f1, f2, sys.origin)


def _drop_constant(f: Jet2) -> Jet2:
    terms = {e: c for e, c in f.terms.items() if sum(e) > 0}
    return Jet2(f.vars, f.max_degree, terms, f.mode)


# ---------------------------------------------------------------------------
# generic focus values (complex normal form)

def _csum(values, extended: bool):
    """Compensated sum of complex numbers (exact rounding of each part in float mode)."""
    if extended:
        return mpmath.fsum(values)
    re = math.fsum(v.real for v in values)
    im = math.fsum(v.imag for v in values)
    return complex(re, im)


def _pmul(a: dict, b: dict, D: int, extended: bool) -> dict:
    buckets: dict = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            if i + j + k + l <= D:
                buckets.setdefault((i + k, j + l), []).append(x * y)
    return {key: _csum(vals, extended) for key, vals in buckets.items()}


def _padd(*polys) -> dict:
    buckets: dict = {}
    for p in polys:
        for key, x in p.items():
            buckets.setdefault(key, []).append(x)
    return buckets


def _finish(buckets: dict, extended: bool) -> dict:
    return {key: _csum(vals, extended) for key, vals in buckets.items()}


def _pscale(a: dict, c) -> dict:
    return {key: c * x for key, x in a.items()}


def _pconj(a: dict, extended: bool) -> dict:
    conj = mpmath.conj if extended else (lambda z: z.conjugate())
    return {(k, j): conj(x) for (j, k), x in a.items()}


def _pderiv(a: dict, var: int) -> dict:
    out = {}
    for (j, k), x in a.items():
        if var == 0 and j:
            out[(j - 1, k)] = j * x
        if var == 1 and k:
            out[(j, k - 1)] = k * x
    return out


def _compose(g: dict, Z: dict, Zb: dict, D: int, extended: bool) -> dict:
    pz = {0: {(0, 0): 1}}
    pzb = {0: {(0, 0): 1}}
    maxj = max((j for j, _ in g), default=0)
    maxk = max((k for _, k in g), default=0)
    for i in range(1, maxj + 1):
        pz[i] = _pmul(pz[i - 1], Z, D, extended)
    for i in range(1, maxk + 1):
        pzb[i] = _pmul(pzb[i - 1], Zb, D, extended)
    buckets: dict = {}
    for (j, k), c in g.items():
        if j + k > D:
            continue
        for key, x in _pmul(pz[j], pzb[k], D, extended).items():
            buckets.setdefault(key, []).append(c * x)
    return _finish(buckets, extended)


def _state_terms(f: Jet2) -> dict:
    out = {}
    for e, c in f.terms.items():
        if any(e[2:]):
            continue
        out[(e[0], e[1])] = c
    return out


def focus_values_generic(sys: PlanarJetSystem, K: int = 3) -> FocusValues:
    """Focus values ``v_1..v_K`` of a planar jet with rotation linear part.

    The system is written in ``z = u + i v``; a near-identity change
    ``z = w + h(w, conj w)`` is solved degree by degree and the resonant
    coefficients ``G[j+1, j]`` of ``w' = -i w_c w + sum G w^(j+1) conj(w)^j``
    are kept, so that ``v_j = Re G[j+1, j]``.  Non-resonant parts of ``h`` are
    determined uniquely; the resonant parts of ``h`` are set to zero.

    Parameters
    ----------
    sys : PlanarJetSystem
        Linear part ``[[0, w], [-w, 0]]`` with ``w > 0``; parameter variables,
        if present, are set to zero.  Jet degree must be at least ``2K + 1``.
    K : int
        Number of focus values.
    """
    try:
        w = sys.omega()
    except JetError as exc:
        raise HopfError("not-jordan", str(exc)) from exc
    D = 2 * K + 1
    if sys.max_degree < D:
        raise HopfError("degree-too-low", f"need jet degree >= {D}, got {sys.max_degree}")
    extended = sys.mode == "extended"
    ctx = mpmath.workdps(EXTENDED_DPS) if extended else _nullctx()
    with ctx:
        if extended:
            half, ihalf, I = mpmath.mpf(1) / 2, mpmath.mpc(0, 0.5), mpmath.mpc(0, 1)
        elif sys.mode == "rational":
            raise HopfError("bad-mode", "generic focus values need float or extended mode")
        else:
            half, ihalf, I = 0.5, 0.5j, 1j
        f1 = _state_terms(sys.f1)
        f2 = _state_terms(sys.f2)
        # u = (z + zb)/2, v = (z - zb)/(2i); z' = u' + i v'
        U = {(1, 0): half, (0, 1): half}
        V = {(1, 0): -ihalf, (0, 1): ihalf}
        g_b: dict = {}
        for coeffs, factor in ((f1, 1), (f2, I)):
            for (i, j), c in coeffs.items():
                term = {(0, 0): 1}
                for _ in range(i):
                    term = _pmul(term, U, D, extended)
                for _ in range(j):
                    term = _pmul(term, V, D, extended)
                for key, x in term.items():
                    g_b.setdefault(key, []).append(factor * c * x)
        g = _finish(g_b, extended)
        lam = g.get((1, 0), 0)
        lam_c = lam.conjugate() if not extended else mpmath.conj(lam)
        h = {(1, 0): 1}
        G = {(1, 0): lam}
        for d in range(2, D + 1):
            lhs = _compose(g, h, _pconj(h, extended), d, extended)
            t1 = _pmul(_pderiv(h, 0), G, d, extended)
            t2 = _pmul(_pderiv(h, 1), _pconj(G, extended), d, extended)
            res = _finish(_padd(lhs, _pscale(t1, -1), _pscale(t2, -1)), extended)
            for (j, k), c in res.items():
                if j + k != d:
                    continue
                if j == k + 1:
                    G[(j, k)] = c
                else:
                    h[(j, k)] = c / (lam * j + lam_c * k - lam)
        vs = []
        for j in range(1, K + 1):
            c = G.get((j + 1, j), 0)
            vs.append(c.real if not extended else mpmath.re(c))
    return FocusValues(w, tuple(vs), "generic-normal-form", K, "extended" if extended else "float")


class _nullctx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def focus_values_oracle(m, n, R) -> FocusValues:
    """Closed-form ``v1`` and ``v2`` of the epidemic model at branch point ``R``.

    Exact for rational input; ``omega_c`` is returned exactly as a
    :class:`Surd` when irrational.
    """
    _check_window(m, n, R)
    Q1, Q2, Q3, W = q_factors(n, R)
    v1 = v1a_poly(n, R) / (8 * m**2 * (n + 1) * Q1 * Q2**3 * W)
    v2 = -v2a_poly(n, R) / (192 * m**4 * (n + 1) ** 3 * Q1**3 * Q2**6 * W**3)
    w2 = omega_squared(n, R)
    w = sqrt_exact(w2) if _exact(w2) and not isinstance(w2, Surd) else math.sqrt(float(w2))
    return FocusValues(w, (v1, v2), "closed-form-oracle", 2, "rational" if _exact(v1) else "float")


def focus_values(m, n, R, K: int = 3, mode: str | None = None) -> FocusValues:
    """Generic focus values at branch point ``R``.

    Runs in double precision and repeats the computation with extended
    precision when ``|v1| < 1e-6``, where cancellation in ``v2`` is severe.
    ``mode`` forces a precision (``"float"`` or ``"extended"``).
    """
    from .jets import default_float_mode

    mode = mode or default_float_mode()
    fv = focus_values_generic(jordan_reduce(m, n, R, mode=mode, degree=2 * K + 1), K)
    if mode == "float" and abs(fv.v1) < EXTENDED_TRIGGER:
        fv = focus_values_generic(jordan_reduce(m, n, R, mode="extended", degree=2 * K + 1), K)
    return fv


def focus_values_at_params(p: Params, K: int = 3):
    """Focus values associated with a concrete parameter tuple.

    If ``k`` is within 0.1% of a Hopf value for the given ``(m, n, eps)`` the
    Hopf point itself is used.  Otherwise the branch point is taken from the
    current position of ``E2-``, i.e. ``R = Y2-/m``.

    Returns
    -------
    (FocusValues, R, rule)
        ``rule`` is ``"hopf-point"`` or ``"equilibrium"``.
    """
    from .model import equilibria

    fp = p.as_float()
    for R in hopf_R_values(fp.m, fp.n, fp.eps):
        kH = kH_of_R(fp.m, fp.n, R)
        if abs(kH - fp.k) <= HOPF_SNAP_RTOL * abs(fp.k):
            return focus_values(fp.m, fp.n, R, K), R, "hopf-point"
    eqs = [e for e in equilibria(fp) if e.kind == "E2minus"]
    if not eqs:
        raise HopfError("no-E2", "E2- does not exist for these parameters")
    R = float(eqs[0].y) / fp.m
    return focus_values(fp.m, fp.n, R, K), R, "equilibrium"


# ---------------------------------------------------------------------------
# classification

@dataclass
class HopfPoint:
    R: Any
    kH: Any
    v1: Any
    criticality: str


@dataclass
class HopfClassification:
    """Criticality and codimension of the Hopf points for fixed ``(m, n, eps)``."""

    criticality: str  # supercritical, subcritical, degenerate
    codimension: int
    R_minus: Any
    R_plus: Any
    eps_star: Any
    cycle_bound: int
    points: list = field(default_factory=list)
    case: str = ""
    rule: str = ""

    def to_dict(self) -> dict:
        return {
            "criticality": self.criticality,
            "codimension": self.codimension,
            "R_minus": _num(self.R_minus),
            "R_plus": _num(self.R_plus),
            "eps_star": _num(self.eps_star),
            "cycle_bound": self.cycle_bound,
            "case": self.case,
            "rule": self.rule,
            "points": [
                {"R": _num(h.R), "kH": _num(h.kH), "v1": _num(h.v1), "criticality": h.criticality}
                for h in self.points
            ],
        }


def classify_hopf(m, n, eps) -> HopfClassification:
    """Super/subcritical decision for the Hopf points at fixed ``(m, n, eps)``.

    The decision uses ``n`` and the threshold ``eps*``: supercritical for
    ``n <= 1/3``, subcritical for ``n >= 1/2`` and, in between, supercritical
    iff ``eps < eps*``.  At ``eps = eps*`` the first focus value vanishes, the
    second is positive, and the point is a codimension-two (Bautin) point.
    Focus values at each Hopf point are computed as a cross-check.
    """
    ex = _exact(m, n, eps)
    Rs = hopf_R_values(m, n, eps)
    if not Rs:
        raise HopfError("no-hopf", f"no Hopf point on the E2- branch for m={m}, n={n}, eps={eps}")
    third, half = Fraction(1, 3), Fraction(1, 2)
    Rm = Rp = es = None
    if _cmp(n, half, ex) <= 0:
        Rm, Rp = R_pm(n)
    codim = 1
    if _cmp(n, third, ex) <= 0:
        crit = "supercritical"
    elif _cmp(n, half, ex) >= 0:
        crit = "subcritical"
    else:
        es = eps_star(m, n)
        c = _cmp(eps, es, ex)
        crit = "supercritical" if c < 0 else ("subcritical" if c > 0 else "degenerate")
        if c == 0:
            codim = 2
    points = []
    for R in Rs:
        Rf = float(R)
        fv = focus_values(float(m), float(n), Rf, K=2)
        v1 = fv.v1
        if abs(v1) < V1_ZERO_TOL:
            pc = "degenerate"
        else:
            pc = "supercritical" if v1 < 0 else "subcritical"
        points.append(HopfPoint(R, kH_of_R(m, n, R), v1, pc))
    if codim == 2:
        v2 = focus_values_oracle(m, n, Rs[0]).v2
        if not float(v2) > 0:
            raise HopfError("codim-check", "v2 must be positive at the codimension-two point")
    label = ""
    try:
        label = classify_case(Params(m, n, eps, points[-1].kH if not isinstance(points[-1].kH, Surd) else float(points[-1].kH))).label
    except ModelError:
        label = ""
    return HopfClassification(crit, codim, Rm, Rp, es, 2 if codim == 2 else 1, points, label, "theorem")


@dataclass
class Codim2Point:
    """Generalized Hopf point on the branch for ``1/3 < n < 1/2``."""

    m: Any
    n: Any
    R_minus: Any
    kH: Any
    eps_star: Any
    v2_oracle: Any
    v2_generic: float
    v1_generic: float
    case: str

    def to_dict(self) -> dict:
        return {"m": _num(self.m), "n": _num(self.n), "R_minus": _num(self.R_minus), "kH": _num(self.kH),
                "eps_star": _num(self.eps_star), "v2_oracle": _num(self.v2_oracle),
                "v2_generic": self.v2_generic, "v1_generic": self.v1_generic, "case": self.case}


def codim2_locus(m, n) -> Codim2Point:
    """Locate the generalized Hopf point ``R = R-`` and check ``v2 > 0`` there."""
    ex = _exact(m, n)
    if not (_cmp(Fraction(1, 3), n, ex) < 0 and _cmp(n, Fraction(1, 2), ex) < 0):
        raise HopfError("n-domain", "two limit cycles require 1/3 < n < 1/2")
    Rm, _ = R_pm(n)
    kH = kH_of_R(m, n, Rm)
    es = eps_of_R(m, n, Rm)
    orc = focus_values_oracle(m, n, Rm)
    if not float(orc.v2) > 0:
        raise HopfError("codim-check", f"v2 at v1 = 0 is not positive: {orc.v2}")
    gen = focus_values(float(m), float(n), float(Rm), K=2, mode="extended")
    exact_all = all(isinstance(x, Fraction) for x in (m, n, kH, es))
    p = Params(m, n, es, kH) if exact_all else Params(float(m), float(n), float(es), float(kH))
    return Codim2Point(m, n, Rm, kH, es, orc.v2, float(gen.v2), float(gen.v1), classify_case(p).label)


# ---------------------------------------------------------------------------
# resultant of v1a and v2a in R

def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list):
    a = [Fraction(x) for x in a]
    b = _poly_trim([Fraction(x) for x in b])
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        q[shift] = c
        for i, x in enumerate(b):
            a[i + shift] -= c * x
        a.pop()
    return _poly_trim(q), _poly_trim(a)


def _poly_eval(p, x):
    return _horner(p, x)


def _poly_deriv(p):
    return [i * c for i, c in enumerate(p)][1:]


def _poly_gcd(a, b):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a] if a else a


def _sylvester_det(f: list, g: list) -> Fraction:
    """Resultant of two univariate polynomials (coefficient lists, low to high)."""
    f, g = _poly_trim(list(f)), _poly_trim(list(g))
    df, dg = len(f) - 1, len(g) - 1
    N = df + dg
    rows = []
    for i in range(dg):
        row = [Fraction(0)] * N
        for j, c in enumerate(reversed(f)):
            row[i + j] = Fraction(c)
        rows.append(row)
    for i in range(df):
        row = [Fraction(0)] * N
        for j, c in enumerate(reversed(g)):
            row[i + j] = Fraction(c)
        rows.append(row)
    det = Fraction(1)
    for col in range(N):
        piv = next((r for r in range(col, N) if rows[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        pv = rows[col][col]
        det *= pv
        for r in range(col + 1, N):
            if rows[r][col] != 0:
                fac = rows[r][col] / pv
                rows[r] = [x - fac * y for x, y in zip(rows[r], rows[col])]
    return det


def _interpolate(xs, ys) -> list:
    """Exact Newton interpolation; returns coefficients low to high."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)]
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        new = [Fraction(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            new[k + 1] += c
            new[k] -= c * xs[i]
        new[0] += coef[i]
        poly = new
    return _poly_trim(poly)


def _sturm_count(p: list, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of ``p`` in ``(a, b]``."""
    p = _poly_trim([Fraction(c) for c in p])
    g = _poly_gcd(p, _poly_deriv(p))
    sq, _ = _poly_divmod(p, g) if len(g) > 1 else (p, [])
    chain = [sq, _poly_deriv(sq)]
    while len(chain[-1]) > 1:
        _, r = _poly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])

    def changes(x):
        vals = [v for v in (_poly_eval(q, x) for q in chain) if v != 0]
        return sum(1 for s, t in zip(vals, vals[1:]) if (s > 0) != (t > 0))

    return changes(a) - changes(b)


@dataclass
class ResultantReport:
    """Outcome of eliminating ``R`` from ``v1a = v2a = 0``."""

    resultant: list  # coefficients in n, low to high
    degree: int
    divisible_by_reference: bool
    roots_in_unit_interval: list
    root_count_in_unit_interval: int
    R_bar: Fraction
    v1_at_R_bar_times_m2: Fraction
    common_R_at_root: list

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "divisible_by_reference": self.divisible_by_reference,
            "roots_in_unit_interval": [str(r) for r in self.roots_in_unit_interval],
            "root_count_in_unit_interval": self.root_count_in_unit_interval,
            "R_bar": str(self.R_bar),
            "v1_at_R_bar_times_m2": str(self.v1_at_R_bar_times_m2),
            "common_R_at_root": [str(r) for r in self.common_R_at_root],
        }


def reference_resultant_factor() -> list:
    """``n (2n+1)(3n^2-11n+11)(2n-1)`` as coefficients low to high."""
    p = [Fraction(0), Fraction(1)]
    for f in ([1, 2], [11, -11, 3], [-1, 2]):
        out = [Fraction(0)] * (len(p) + len(f) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(f):
                out[i + j] += a * b
        p = out
    return p


def R_bar(n):
    """Closed-form candidate common root of ``v1a`` and ``v2a``."""
    num = 23 + (1 - 2 * n) * ((1 - 2 * n) * (1 + 14 * n + 24 * n * n) + 46 * n**3)
    den = 4 * (4 + n) + 2 * n * (1 - 2 * n) * ((1 - 2 * n) * (6 + 15 * n + 28 * n * n) + 55 * n**3)
    return num / den


def resultant_check(samples: int = 48) -> ResultantReport:
    """Eliminate ``R`` from ``v1a = v2a = 0`` exactly.

    The Sylvester resultant is evaluated at ``samples`` integer values of
    ``n`` and interpolated exactly; ``samples`` must exceed the true degree
    (39), which is confirmed by an extra evaluation point.
    """
    xs = [Fraction(i) for i in range(1, samples + 1)]
    ys = [_sylvester_det(v1a_coefficients(x), v2a_coefficients(x)) for x in xs]
    res = _interpolate(xs, ys)
    probe = Fraction(samples + 7, 3)
    if _poly_eval(res, probe) != _sylvester_det(v1a_coefficients(probe), v2a_coefficients(probe)):
        raise HopfError("interpolation", "too few samples to interpolate the resultant")
    ref = reference_resultant_factor()
    _, rem = _poly_divmod(res, ref)
    divisible = not rem
    # strip the root at n = 0 before counting in (0, 1)
    stripped = list(res)
    while stripped and stripped[0] == 0:
        stripped.pop(0)
    count = _sturm_count(stripped, Fraction(0), Fraction(1))
    if _poly_eval(stripped, Fraction(1)) == 0:
        count -= 1
    roots = []
    for cand in (Fraction(1, 2),):
        if _poly_eval(res, cand) == 0:
            roots.append(cand)
    half = Fraction(1, 2)
    rb = R_bar(half)
    Q1, Q2, Q3, W = q_factors(half, rb)
    v1m2 = v1a_poly(half, rb) / (8 * (half + 1) * Q1 * Q2**3 * W)
    common = []
    g = _poly_gcd(v1a_coefficients(half), v2a_coefficients(half))
    if len(g) == 2:
        common = [-g[0] / g[1]]
    elif len(g) == 3:
        disc = g[1] ** 2 - 4 * g[2] * g[0]
        if disc == 0:
            common = [-g[1] / (2 * g[2])]
    return ResultantReport(res, len(res) - 1, divisible, roots, count, rb, v1m2, common)


# ---------------------------------------------------------------------------
# amplitudes

def predict_amplitudes(v0, v1, v2) -> list:
    """Positive radii ``r`` with ``v0 + v1 r^2 + v2 r^4 = 0``, ascending.

    Rational input is handled exactly up to the final square roots.
    """
    if v2 == 0:
        raise HopfError("v2-zero", "the quartic amplitude equation needs v2 != 0")
    disc = v1 * v1 - 4 * v2 * v0
    if disc < 0:
        return []
    s = math.sqrt(disc) if not isinstance(disc, Fraction) else float(sqrt_exact(disc))
    out = []
    for sgn in (-1, 1):
        r2 = (-float(v1) + sgn * s) / (2 * float(v2))
        if r2 > 0:
            out.append(math.sqrt(r2))
    return sorted(set(out))
