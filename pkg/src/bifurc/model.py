"""SI epidemic model with nonlinear incidence.

The scaled model is

    X' = X [k (1 + eps X) (Y - X) - (n + 1)]
    Y' = m - n Y - X

with the infected fraction ``X``, the total population ``Y`` and four positive
parameters ``(m, n, eps, k)``.  This module provides parameter handling,
threshold values, equilibria with linear classification, the stability case
classifier and the branch parametrization ``Y2 = R m`` used by the Hopf
analysis.

Exact arithmetic is used whenever the parameters are rational.  Square roots
of rationals are carried as :class:`Surd` values ``a + b sqrt(d)`` so that
equilibria and the Hopf thresholds stay exact.
"""

from __future__ import annotations

import dataclasses
import math
import numbers
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

__all__ = [
    "ModelError",
    "Surd",
    "sqrt_exact",
    "parse_number",
    "Params",
    "Thresholds",
    "Equilibrium",
    "CaseReport",
    "BranchPoint",
    "vector_field",
    "thresholds",
    "equilibria",
    "classify_linear",
    "classify_case",
    "jacobian",
    "trace_det_on_branch",
    "branch_eps",
    "kH_of_R",
    "eps_of_R",
    "hopf_R_values",
    "R_window",
    "R_bt",
    "to_float",
]

BOUNDARY_RTOL = 1e-10


class ModelError(ValueError):
    """Domain error with a short machine-readable ``code``."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


# ---------------------------------------------------------------------------
# quadratic surds

def _squarefree_split(n: int, limit: int = 10**6) -> tuple[int, int]:
    """Return ``(s, d)`` with ``n = s**2 * d``; ``d`` is squarefree up to ``limit``."""
    s, d = 1, n
    r = math.isqrt(d)
    if r * r == d:
        return r, 1
    p = 2
    while p * p <= d and p <= limit:
        while d % (p * p) == 0:
            d //= p * p
            s *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(d)
    if r * r == d:
        return s * r, 1
    return s, d


@dataclass(frozen=True)
class Surd:
    """Exact number ``a + b*sqrt(d)`` with rational ``a, b`` and integer ``d > 1``.

    Only values sharing the same radicand combine; mixing two different
    radicands raises :class:`ModelError`.  Operations return a plain
    :class:`~fractions.Fraction` when the irrational part cancels.
    """

    a: Fraction
    b: Fraction
    d: int

    @staticmethod
    def make(a, b, d):
        a, b = Fraction(a), Fraction(b)
        if b == 0 or d == 1:
            return a + (b if d == 1 else 0)
        return Surd(a, b, d)

    def _parts(self, other):
        if isinstance(other, Surd):
            if other.d != self.d:
                raise ModelError("surd-mismatch", f"sqrt({self.d}) and sqrt({other.d}) cannot be combined")
            return other.a, other.b
        if isinstance(other, numbers.Rational):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return float(self) + other
        return Surd.make(self.a + p[0], self.b + p[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return float(self) * other
        c, e = p
        return Surd.make(self.a * c + self.b * e * self.d, self.a * e + self.b * c, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return float(self) / other
        if p[1] == 0:
            if p[0] == 0:
                raise ZeroDivisionError("division by zero")
            return Surd.make(self.a / p[0], self.b / p[0], self.d)
        o = Surd(p[0], p[1], self.d)
        return self * o.conjugate() / o.norm()

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return other / float(self)
        return Surd.make(p[0], p[1], self.d) / self if p[1] else (self.conjugate() * p[0]) / self.norm()

    def __pow__(self, k: int):
        out: Any = Fraction(1)
        for _ in range(k):
            out = out * self
        return out

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare magnitudes squared
        diff = self.a * self.a - self.b * self.b * self.d
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def _cmp(self, other) -> int:
        return _sign(self - other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, Surd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        return False

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __abs__(self):
        return self if self.sign() >= 0 else -self

    def __str__(self):
        # common denominator form: (p + q sqrt(d))/r
        den = math.lcm(self.a.denominator, self.b.denominator)
        p, q = self.a * den, self.b * den
        op = "-" if q < 0 else "+"
        body = f"{int(p)} {op} {abs(int(q))}*sqrt({self.d})" if p else f"{int(q)}*sqrt({self.d})"
        return f"({body})/{den}" if den != 1 else f"({body})"


def _sign(x) -> int:
    if isinstance(x, Surd):
        return x.sign()
    return (x > 0) - (x < 0)


def sqrt_exact(x):
    """Square root of a non-negative rational as a Fraction or :class:`Surd`.

    Inexact inputs fall back to :func:`math.sqrt`.
    """
    if isinstance(x, numbers.Rational) and not isinstance(x, bool):
        x = Fraction(x)
        if x < 0:
            raise ModelError("negative-radicand", f"sqrt of {x}")
        num = x.numerator * x.denominator
        s, d = _squarefree_split(num)
        return Surd.make(0, Fraction(s, x.denominator), d)
    if isinstance(x, Surd):
        return math.sqrt(float(x))
    return math.sqrt(x)


def to_float(x) -> float:
    return float(x)


def _exact(*xs) -> bool:
    return all(isinstance(x, (numbers.Rational, Surd)) and not isinstance(x, bool) for x in xs)


def _cmp(a, b, exact: bool) -> int:
    """Three-way comparison; float mode treats relative gaps below 1e-10 as ties."""
    if exact:
        return _sign(a - b)
    fa, fb = float(a), float(b)
    if abs(fa - fb) <= BOUNDARY_RTOL * max(abs(fa), abs(fb), 1e-300):
        return 0
    return 1 if fa > fb else -1


# ---------------------------------------------------------------------------
# parameters

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")


def parse_number(text: str | numbers.Number):
    """Parse ``"p/q"`` or a decimal literal into an exact :class:`Fraction`.

    Decimal literals are exact rationals (``"1.55"`` is ``31/20``); values
    already numeric pass through unchanged.
    """
    if isinstance(text, numbers.Number):
        return text
    s = str(text).strip()
    mt = _RATIONAL.match(s)
    if mt:
        den = int(mt.group(2))
        if den == 0:
            raise ModelError("bad-number", f"zero denominator in {s!r}")
        return Fraction(int(mt.group(1)), den)
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelError("bad-number", f"cannot parse {s!r}") from exc


@dataclass(frozen=True)
class Params:
    """Model parameters ``(m, n, eps, k)``; all strictly positive.

    Rational inputs are stored as :class:`Fraction` so downstream computations
    run exactly.
    """

    m: Any
    n: Any
    eps: Any
    k: Any

    def __post_init__(self):
        for name in ("m", "n", "eps", "k"):
            v = getattr(self, name)
            if isinstance(v, str):
                v = parse_number(v)
            if isinstance(v, numbers.Rational) and not isinstance(v, Fraction):
                v = Fraction(v)
            if not isinstance(v, (numbers.Real, Surd)):
                raise ModelError("bad-param", f"{name} must be real, got {v!r}")
            if not (float(v) > 0) or not math.isfinite(float(v)):
                raise ModelError("bad-param", f"{name} must be positive and finite, got {v}")
            object.__setattr__(self, name, v)

    @property
    def exact(self) -> bool:
        return _exact(self.m, self.n, self.eps, self.k)

    def replace(self, **kw) -> "Params":
        return dataclasses.replace(self, **kw)

    def as_float(self) -> "Params":
        return Params(float(self.m), float(self.n), float(self.eps), float(self.k))

    def to_dict(self) -> dict:
        return {name: _num_str(getattr(self, name)) for name in ("m", "n", "eps", "k")}

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "Params":
        missing = [key for key in ("m", "n", "eps", "k") if key not in data]
        if missing:
            raise ModelError("bad-config", f"missing keys {missing}")
        return cls(*(parse_number(data[key]) for key in ("m", "n", "eps", "k")))

    @classmethod
    def from_config(cls, source: str | Path) -> "Params":
        """Load from a flat ``key = value`` (or ``key: value``) file."""
        return cls.from_mapping(read_config(source))


def read_config(source: str | Path) -> dict:
    """Parse a flat key-value config file into a dict of raw strings."""
    path = Path(source)
    text = path.read_text() if path.exists() else str(source)
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, val = line.split(sep, 1)
                break
        else:
            raise ModelError("bad-config", f"line {lineno}: expected key = value, got {raw!r}")
        out[key.strip()] = val.strip()
    return out


def _num_str(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


# ---------------------------------------------------------------------------
# vector field and thresholds

def vector_field(X, Y, m, n, eps, k):
    """Right-hand side of the model; works on numbers, arrays and jets."""
    dX = X * (k * (1 + eps * X) * (Y - X) - (n + 1))
    dY = m - n * Y - X
    return dX, dY


@dataclass(frozen=True)
class Thresholds:
    """Critical parameter values at fixed ``(m, n, eps)`` and the given ``k``.

    Entries that are undefined for the given parameters are ``None``.
    """

    eps1: Any
    eps2: Any
    eps3: Any
    eps4: Any
    eps_minus: Any
    eps_plus: Any
    kT: Any
    kSN: Any
    kStar: Any
    kHminus: Any
    kHplus: Any
    Y2L: Any
    Y2U: Any
    Y2SN: Any
    Y2T: Any
    R0: Any

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                out[f.name] = None
            elif isinstance(v, (Fraction, Surd)):
                out[f.name] = {"exact": str(v), "value": float(v)}
            else:
                out[f.name] = {"value": float(v)}
        return out


def thresholds(p: Params) -> Thresholds:
    """Threshold values of the model (exact for rational parameters)."""
    m, n, e, k = p.m, p.n, p.eps, p.k
    exact = p.exact
    one = Fraction(1) if exact else 1.0
    eps1 = (n + 1) / m
    eps2 = 4 * n * (n + 1) ** 2 / m
    eps3 = (n + 1) ** 2 / (m * (1 - n)) if _cmp(n, 1, exact) < 0 else None
    eps4 = (n + 1) ** 2 / (m * n)
    eps_minus = eps_plus = None
    if _cmp(n, one / 3, exact) <= 0:
        s = sqrt_exact((n + 1) * (1 - 3 * n)) if exact else math.sqrt(max((n + 1) * (1 - 3 * n), 0.0))
        eps_minus = (n + 1) / (2 * n * m) * (n + 1 - s)
        eps_plus = (n + 1) / (2 * n * m) * (n + 1 + s)
    kT = n * eps1
    kSN = e * eps2 / (m * (e + eps1) ** 2)
    kStar = 2 * n * e * eps1 * eps4 / ((e + eps1) * (e + eps4))
    kHm = kHp = None
    disc = e * (e - eps2)
    if _cmp(disc, 0, exact) >= 0:
        s = sqrt_exact(disc) if exact else math.sqrt(max(disc, 0.0))
        base = e * (n * (e + eps4) + eps2)
        den = 2 * m * (e + eps1) ** 2
        kHm = (base - n * (eps4 - e) * s) / den
        kHp = (base + n * (eps4 - e) * s) / den
    Y2L = m / (n + 1)
    Y2U = m / n + 1 / (e * n)
    Y2SN = m * (2 * n + 1) / (2 * n * (n + 1)) + 1 / (2 * n * e)
    Y2T = m / n
    return Thresholds(eps1, eps2, eps3, eps4, eps_minus, eps_plus, kT, kSN, kStar, kHm, kHp,
                      Y2L, Y2U, Y2SN, Y2T, k / kT)


# ---------------------------------------------------------------------------
# equilibria and linearization

def jacobian(p: Params, at) -> tuple:
    """Jacobian matrix of the model at ``at = (X, Y)`` as nested tuples."""
    X, Y = at
    m, n, e, k = p.m, p.n, p.eps, p.k
    j11 = k * (Y - 2 * X + e * X * (2 * Y - 3 * X)) - (n + 1)
    j12 = k * X * (1 + e * X)
    return ((j11, j12), (-1 + 0 * X, -n + 0 * X))


LINEAR_CLASSES = (
    "stable-node", "stable-focus", "unstable-node", "unstable-focus",
    "saddle", "center-candidate", "BT-candidate", "saddle-node",
)


def classify_linear(trace, det, exact: bool = True, tol: float = 1e-12) -> str:
    """Name the linear type from trace and determinant.

    ``center-candidate`` means a purely imaginary pair, ``BT-candidate`` a
    double zero eigenvalue and ``saddle-node`` a single zero eigenvalue.
    """
    if exact:
        st, sd = _sign(trace), _sign(det)
    else:
        scale = max(abs(float(trace)), abs(float(det)), 1.0)
        st = 0 if abs(float(trace)) <= tol * scale else (1 if float(trace) > 0 else -1)
        sd = 0 if abs(float(det)) <= tol * scale else (1 if float(det) > 0 else -1)
    if sd < 0:
        return "saddle"
    if sd == 0:
        return "BT-candidate" if st == 0 else "saddle-node"
    if st == 0:
        return "center-candidate"
    disc = trace * trace - 4 * det
    focus = _sign(disc) < 0 if exact else float(disc) < 0
    side = "stable" if st < 0 else "unstable"
    return f"{side}-{'focus' if focus else 'node'}"


@dataclass(frozen=True)
class Equilibrium:
    """An equilibrium with its linearization summary."""

    x: Any
    y: Any
    kind: str  # "E1", "E2plus", "E2minus"
    trace: Any
    det: Any
    linear_class: str

    def residual(self, p: Params):
        return vector_field(self.x, self.y, p.m, p.n, p.eps, p.k)

    def to_dict(self) -> dict:
        def enc(v):
            return {"exact": str(v), "value": float(v)} if isinstance(v, (Fraction, Surd)) else {"value": float(v)}
        return {"kind": self.kind, "x": enc(self.x), "y": enc(self.y), "trace": enc(self.trace),
                "det": enc(self.det), "linear_class": self.linear_class}


def _make_eq(p: Params, x, y, kind: str) -> Equilibrium:
    (a, b), (c, d) = jacobian(p, (x, y))
    tr, det = a + d, a * d - b * c
    return Equilibrium(x, y, kind, tr, det, classify_linear(tr, det, p.exact))


def equilibria(p: Params) -> list[Equilibrium]:
    """All biologically meaningful equilibria (``X >= 0``).

    Always contains the infection-free point; the positive branch points
    come from the quadratic ``F2 = 0`` and are dropped when ``X2 < 0`` or the
    discriminant is negative.
    """
    m, n, e, k = p.m, p.n, p.eps, p.k
    exact = p.exact
    out = [_make_eq(p, 0 * m, m / n, "E1")]
    delta = k * (e * m + n + 1) ** 2 * (k - 4 * e * n * (n + 1) ** 2 / (e * m + n + 1) ** 2)
    sd = _cmp(delta, 0, exact)
    if sd < 0:
        return out
    root = (sqrt_exact(delta) if exact else math.sqrt(max(float(delta), 0.0))) if sd > 0 else 0 * m
    base = k * ((2 * n + 1) * m * e + n + 1)
    den = 2 * k * e * n * (n + 1)
    cands = [((base + root) / den, "E2plus"), ((base - root) / den, "E2minus")]
    if sd == 0:
        cands = [cands[1]]
    for y, kind in reversed(cands):
        x = m - n * y
        if _cmp(x, 0, exact) < 0:
            continue
        out.append(_make_eq(p, x, y, kind))
    return out


# ---------------------------------------------------------------------------
# case classification

SQRT2_BOUND = Surd(Fraction(-1, 2), Fraction(1, 2), 2)  # (sqrt2 - 1)/2
SQRT5_BOUND = Surd(Fraction(-1, 4), Fraction(1, 4), 5)  # (sqrt5 - 1)/4


@dataclass
class CaseReport:
    """Stability case of the positive equilibrium ``E2-`` and what it predicts.

    Attributes
    ----------
    label : str
        ``"1a"``, ``"1b"``, ``"2a(i)"``, ``"2a(ii)"``, ``"2a(iii)"``, ``"2b"``,
        ``"2c(i)"``, ``"2c(ii)"``, ``"2d"``, ``"boundary"``, ``"no-E2"`` or
        ``"unclassified"``.
    hopf_points : list
        Hopf values of ``k`` predicted along the ``E2-`` branch.
    stable_intervals, unstable_intervals : list of (lo, hi)
        ``k`` intervals where ``E2-`` is stable or unstable (``None`` = infinity).
    type1, type2 : bool
        Coexistence of two stable equilibria / of a stable equilibrium and a
        stable limit cycle.
    """

    label: str
    hopf_points: list = field(default_factory=list)
    stable_intervals: list = field(default_factory=list)
    unstable_intervals: list = field(default_factory=list)
    type1: bool = False
    type2: bool = False
    boundaries: list = field(default_factory=list)

    @property
    def hopf_count(self) -> int:
        return len(self.hopf_points)

    def to_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            return {"exact": str(v), "value": float(v)} if isinstance(v, (Fraction, Surd)) else {"value": float(v)}
        return {
            "label": self.label,
            "hopf_points": [enc(v) for v in self.hopf_points],
            "stable_intervals": [[enc(a), enc(b)] for a, b in self.stable_intervals],
            "unstable_intervals": [[enc(a), enc(b)] for a, b in self.unstable_intervals],
            "type1": self.type1,
            "type2": self.type2,
            "boundaries": self.boundaries,
        }


def classify_case(p: Params) -> CaseReport:
    """Stability/Hopf case of ``E2-`` for the given parameters.

    Each case is an explicit conjunction of strict or non-strict inequalities.
    When no case holds strictly but one would hold after relaxing an equality
    the result is ``"boundary"`` with the touching conditions listed.
    """
    m, n, e, k = p.m, p.n, p.eps, p.k
    ex = p.exact
    t = thresholds(p)

    def lt(a, b):
        return _cmp(a, b, ex) < 0

    def le(a, b):
        return _cmp(a, b, ex) <= 0

    def eq(a, b):
        return _cmp(a, b, ex) == 0

    half = Fraction(1, 2) if ex else 0.5
    third = Fraction(1, 3) if ex else 1 / 3
    sq2 = SQRT2_BOUND if ex else float(SQRT2_BOUND)
    sq5 = SQRT5_BOUND if ex else float(SQRT5_BOUND)
    e1, e2, e3, e4 = t.eps1, t.eps2, t.eps3, t.eps4
    kSN, kS, kT = t.kSN, t.kStar, t.kT
    n_lt_1 = lt(n, 1)

    cases = []
    if le(e, e1):
        if le(e, min(e1, e2, key=float)):
            cases.append("1a")
        if le(n, sq2) and lt(e2, e) and le(e, e1):
            cases.append("1b")
    else:
        if le(e4, e) and lt(max(kSN, kS, key=float), k):
            cases.append("2a(i)")
        if n_lt_1 and lt(max(e3, e4, key=float), e) and eq(k, kS):
            cases.append("2a(ii)")
        if le(sq2, n) and lt(e1, e) and lt(e, min(e2, e4, key=float)) and lt(kSN, k):
            cases.append("2a(iii)")
        if lt(n, half) and lt(e3, e) and le(e, e4) and lt(kSN, k) and le(k, kS):
            cases.append("2b")
        if lt(n, half) and lt(e3, e) and lt(e, e4) and lt(kS, k):
            cases.append("2c(i)")
        if n_lt_1 and lt(max(e3, e4, key=float), e) and lt(kSN, k) and lt(k, kS):
            cases.append("2c(ii)")
        if lt(n, half) and lt(max(e1, e2, key=float), e) and e3 is not None and lt(e, e3) and le(kSN, k):
            cases.append("2d")

    touching = _touching_boundaries(p, t)
    if len(cases) != 1 or (touching and not ex and cases[0] not in ("1a",)):
        if not cases:
            if not ex or not touching:
                if lt(k, kSN) or (le(e, e1) and lt(k, kT)):
                    return CaseReport("no-E2", boundaries=touching)
            if touching:
                return CaseReport("boundary", boundaries=touching)
            return CaseReport("unclassified")
        if len(cases) > 1:
            return CaseReport("boundary", boundaries=touching + [f"overlap {cases}"])
    label = cases[0]
    rep = CaseReport(label, boundaries=touching)
    if label == "1a":
        rep.stable_intervals = [(kT, None)]
    elif label == "1b":
        rep.hopf_points = [t.kHminus, t.kHplus]
        rep.stable_intervals = [(kT, t.kHminus), (t.kHplus, None)]
        rep.unstable_intervals = [(t.kHminus, t.kHplus)]
    elif label.startswith("2a"):
        rep.stable_intervals = [(max(kSN, kS, key=float), None)]
        rep.type1 = True
    elif label == "2b":
        rep.unstable_intervals = [(kSN, kS)]
    elif label in ("2c(i)", "2c(ii)"):
        rep.hopf_points = [t.kHplus]
        rep.stable_intervals = [(t.kHplus, None)]
        rep.unstable_intervals = [(kSN, t.kHplus)]
        rep.type1 = True
        if label == "2c(ii)":
            rep.type2 = True
        else:
            rep.type2 = le(third, n) or (t.eps_plus is not None and lt(n, third) and lt(t.eps_plus, e))
    elif label == "2d":
        rep.hopf_points = [t.kHminus, t.kHplus]
        rep.stable_intervals = [(kSN, t.kHminus), (t.kHplus, None)]
        rep.unstable_intervals = [(t.kHminus, t.kHplus)]
        rep.type1 = True
        em = t.eps_minus
        hm_below = (le(sq5, n) and lt(n, half) and lt(e2, e) and lt(e, e3)) or (
            lt(n, sq5) and em is not None and lt(em, e) and lt(e, e3))
        hp_below = (le(sq5, n) and lt(n, third) and em is not None and lt(e2, e) and lt(e, em)) or (
            le(third, n) and lt(n, half) and lt(e2, e) and lt(e, e3))
        rep.type2 = bool(hm_below or hp_below)
    return rep


def _touching_boundaries(p: Params, t: Thresholds) -> list:
    """Names of case-defining equalities that hold at ``p``."""
    ex = p.exact
    checks = {
        "eps=eps1": (p.eps, t.eps1),
        "eps=eps2": (p.eps, t.eps2),
        "eps=eps3": (p.eps, t.eps3),
        "eps=eps4": (p.eps, t.eps4),
        "k=kSN": (p.k, t.kSN),
        "k=kStar": (p.k, t.kStar),
        "n=1/2": (p.n, Fraction(1, 2)),
        "n=(sqrt2-1)/2": (p.n, SQRT2_BOUND if ex else float(SQRT2_BOUND)),
    }
    out = []
    for name, (a, b) in checks.items():
        if b is None:
            continue
        if _cmp(a, b, ex) == 0:
            out.append(name)
    return out


# ---------------------------------------------------------------------------
# branch parametrization Y2 = R m

def branch_eps(m, n, k, Y2):
    """``eps`` that places a positive equilibrium at ``Y2`` for the given ``k``."""
    Y2L, Y2T = m / (n + 1), m / n
    den = n * (Y2T - Y2) * (Y2 - Y2L)
    if den == 0:
        raise ModelError("branch-domain", "Y2 must lie strictly between Y2L and Y2T")
    return (Y2L + 1 / k - Y2) / den


@dataclass(frozen=True)
class BranchPoint:
    """Linearization at a point of the positive branch."""

    eps: Any
    trace: Any
    det: Any
    kH: Any
    R: Any


def trace_det_on_branch(m, n, k, Y2) -> BranchPoint:
    """Trace, determinant and Hopf value of ``k`` at the branch point ``Y2``.

    ``eps`` follows from ``F2 = 0``.  ``Y2`` must satisfy
    ``Y2L < Y2 < min(Y2T, Y2L + 1/k)`` so that ``eps > 0``.
    """
    Y2L, Y2T = m / (n + 1), m / n
    hi = min(Y2T, Y2L + 1 / k, key=float)
    if not (float(Y2L) < float(Y2) < float(hi)) or not (Y2L < Y2 < hi):
        raise ModelError(
            "branch-domain",
            f"Y2={Y2} outside ({Y2L}, {hi}); eps = (Y2L + 1/k - Y2)/(n (Y2T - Y2)(Y2 - Y2L)) must be positive",
        )
    e = branch_eps(m, n, k, Y2)
    p = Params(m, n, e, k)
    (a, b), (c, d) = jacobian(p, (m - n * Y2, Y2))
    R = Y2 / m
    return BranchPoint(e, a + d, a * d - b * c, kH_of_R(m, n, R), R)


def kH_of_R(m, n, R):
    """Hopf value of ``k`` on the branch point ``Y2 = R m``."""
    den = 1 - (n + 1) * R
    if den == 0:
        raise ModelError("R-domain", "R = 1/(n+1) makes the Hopf value singular")
    return ((n + 1) ** 2 * R - (n + 2)) / (m * den * den)


def eps_of_R(m, n, R):
    """``eps`` at the Hopf point with ``Y2 = R m``."""
    den = m * (1 - R * n) * (R * (n + 1) ** 2 - (n + 2))
    if den == 0:
        raise ModelError("R-domain", "eps(R) is singular at R = 1/n or R = (n+2)/(n+1)^2")
    return 1 / den


def R_window(m, n, kH=None):
    """Admissible Hopf window ``(R_*, R^*)`` on the positive branch.

    ``R^*`` is ``min(1/n - 1/(n+1)^2, 1/(n+1) + 1/(m kH))``; the second entry
    only applies when a Hopf value ``kH`` is supplied.
    """
    lo = (n + 2) / (n + 1) ** 2
    hi = 1 / n - 1 / (n + 1) ** 2
    if kH is not None:
        hi = min(hi, 1 / (n + 1) + 1 / (m * kH), key=float)
    return lo, hi


def R_bt(n):
    """Branch position of the double-zero point."""
    return 1 / n - 1 / (n + 1) ** 2


def hopf_R_values(m, n, eps) -> list:
    """Branch positions ``R`` of the Hopf points for fixed ``(m, n, eps)``.

    Solves ``eps(R) = eps``; only roots inside the admissible window are kept.
    Results are ascending and exact (Fraction or :class:`Surd`) for rational
    input.
    """
    ex = _exact(m, n, eps)
    a = -n * (n + 1) ** 2
    b = (n + 1) ** 2 + n * (n + 2)
    c = -(n + 2) - 1 / (m * eps)
    disc = b * b - 4 * a * c
    if _cmp(disc, 0, ex) < 0:
        return []
    s = sqrt_exact(disc) if ex else math.sqrt(max(disc, 0.0))
    roots = sorted({(-b + s) / (2 * a), (-b - s) / (2 * a)}, key=float)
    lo, hi = R_window(m, n)
    out = []
    for R in roots:
        if _cmp(lo, R, ex) < 0 and _cmp(R, hi, ex) < 0:
            if _cmp(1 / (n + 1) + 1 / (m * kH_of_R(m, n, R)), R, ex) > 0:
                out.append(R)
    return out
