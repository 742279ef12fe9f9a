"""Truncated multivariate polynomial jets.

A :class:`Jet2` is an immutable sparse polynomial in an ordered list of
variables, truncated at a fixed total degree.  Coefficients live in one of
three arithmetic modes:

``rational``
    exact :class:`fractions.Fraction` coefficients;
``float``
    double precision (``float`` or ``complex``);
``extended``
    :mod:`mpmath` multiprecision (``mpf`` or ``mpc``).

Jets of different modes never mix.  State variables come first in ``vars``
and unfolding parameters after them; terms are ordered graded-lexicographically
so that iteration and serialization are deterministic.
"""

from __future__ import annotations

import json
import numbers
import os
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import itertools

import mpmath
import numpy as np

__all__ = [
    "JetError",
    "Jet2",
    "PlanarJetSystem",
    "MODES",
    "FLOAT_ZERO_THRESHOLD",
    "default_float_mode",
    "coerce",
    "jet_add",
    "jet_mul",
    "jet_substitute",
    "jet_partial",
    "taylor_expand",
    "DenseRing",
]

MODES = ("rational", "float", "extended")
FLOAT_ZERO_THRESHOLD = 1e-13
EXTENDED_DPS = 40


class JetError(ValueError):
    """Structured error for invalid jet operations.

    Attributes
    ----------
    code : str
        Short machine-readable reason, e.g. ``"mode-mismatch"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def default_float_mode() -> str:
    """Return the inexact mode selected by ``BIFURC_PRECISION``."""
    value = os.environ.get("BIFURC_PRECISION", "double").strip().lower()
    if value == "extended":
        return "extended"
    if value in ("double", ""):
        return "float"
    raise JetError("bad-precision", f"BIFURC_PRECISION must be double or extended, got {value!r}")


def coerce(value, mode: str):
    """Convert a scalar into the coefficient type of ``mode``."""
    if mode == "rational":
        if isinstance(value, Fraction):
            return value
        if isinstance(value, numbers.Integral):
            return Fraction(int(value))
        if isinstance(value, numbers.Rational):
            return Fraction(value.numerator, value.denominator)
        raise JetError("mode-mismatch", f"cannot use inexact value {value!r} in rational mode")
    if mode == "float":
        if isinstance(value, (mpmath.mpc, complex)) or (
            isinstance(value, numbers.Complex) and not isinstance(value, numbers.Real)
        ):
            c = complex(value)
            return c if c.imag != 0.0 else c.real
        return float(value)
    if mode == "extended":
        with mpmath.workdps(max(mpmath.mp.dps, EXTENDED_DPS)):
            if isinstance(value, Fraction):
                return mpmath.mpf(value.numerator) / value.denominator
            if isinstance(value, (complex, mpmath.mpc)):
                c = mpmath.mpc(value)
                return c if c.imag != 0 else c.real
            return mpmath.mpf(value)
    raise JetError("bad-mode", f"unknown mode {mode!r}")


def _is_zero(c) -> bool:
    return c == 0


def _abs(c) -> float:
    return float(abs(c))


def _grlex_key(exp: tuple) -> tuple:
    return (sum(exp), tuple(-e for e in exp))


class Jet2:
    """Immutable truncated polynomial.

    Parameters
    ----------
    vars : sequence of str
        Variable names; state variables first, then parameters.
    max_degree : int
        Total-degree truncation bound.
    terms : mapping, optional
        Exponent tuple -> coefficient.
    mode : {"rational", "float", "extended"}
    """

    __slots__ = ("_vars", "_max_degree", "_mode", "_terms")

    def __init__(self, vars: Sequence[str], max_degree: int, terms: Mapping | None = None, mode: str = "rational"):
        if mode not in MODES:
            raise JetError("bad-mode", f"unknown mode {mode!r}")
        if max_degree < 0:
            raise JetError("bad-degree", "max_degree must be non-negative")
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise JetError("bad-vars", f"duplicate variable names in {vars}")
        nv = len(vars)
        raw = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nv or any(e < 0 for e in exp):
                raise JetError("bad-exponent", f"exponent {exp} does not fit vars {vars}")
            if sum(exp) > max_degree:
                continue
            c = coerce(c, mode)
            raw[exp] = raw.get(exp, 0) + c if exp in raw else c
        object.__setattr__(self, "_vars", vars)
        object.__setattr__(self, "_max_degree", int(max_degree))
        object.__setattr__(self, "_mode", mode)
        object.__setattr__(self, "_terms", _canonical(raw, mode))

    @classmethod
    def _raw(cls, vars, max_degree, terms, mode) -> "Jet2":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_vars", vars)
        object.__setattr__(obj, "_max_degree", max_degree)
        object.__setattr__(obj, "_mode", mode)
        object.__setattr__(obj, "_terms", _canonical(terms, mode))
        return obj

    def __setattr__(self, key, value):
        raise AttributeError("Jet2 is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, vars, max_degree, mode="rational") -> "Jet2":
        return cls(vars, max_degree, {}, mode)

    @classmethod
    def constant(cls, vars, max_degree, value, mode="rational") -> "Jet2":
        return cls(vars, max_degree, {(0,) * len(tuple(vars)): value}, mode)

    @classmethod
    def variable(cls, vars, name, max_degree, mode="rational") -> "Jet2":
        vars = tuple(vars)
        if name not in vars:
            raise JetError("unknown-var", f"{name!r} not in {vars}")
        exp = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, max_degree, {exp: 1}, mode)

    @classmethod
    def monomial(cls, vars, exp, coeff, max_degree, mode="rational") -> "Jet2":
        return cls(vars, max_degree, {tuple(exp): coeff}, mode)

    @classmethod
    def variables(cls, vars, max_degree, mode="rational") -> tuple:
        """All coordinate jets of ``vars`` at once."""
        return tuple(cls.variable(vars, v, max_degree, mode) for v in vars)

    # -- accessors ----------------------------------------------------
    @property
    def vars(self) -> tuple:
        return self._vars

    @property
    def max_degree(self) -> int:
        return self._max_degree

    @property
    def mode(self) -> str:
        return self._mode

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in graded-lexicographic order."""
        return [(e, self._terms[e]) for e in sorted(self._terms, key=_grlex_key)]

    def coeff(self, exp) -> object:
        return self._terms.get(tuple(exp), coerce(0, self._mode))

    def __getitem__(self, exp):
        return self.coeff(exp)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def order(self) -> int:
        """Lowest total degree present (``max_degree + 1`` for the zero jet)."""
        return min((sum(e) for e in self._terms), default=self._max_degree + 1)

    def constant_term(self):
        return self.coeff((0,) * len(self._vars))

    def homogeneous(self, d: int) -> "Jet2":
        return Jet2._raw(self._vars, self._max_degree, {e: c for e, c in self._terms.items() if sum(e) == d}, self._mode)

    def truncate(self, d: int) -> "Jet2":
        d = min(d, self._max_degree)
        return Jet2._raw(self._vars, d, {e: c for e, c in self._terms.items() if sum(e) <= d}, self._mode)

    def with_max_degree(self, d: int) -> "Jet2":
        """Same terms, new truncation bound (terms above ``d`` dropped)."""
        return Jet2._raw(self._vars, d, {e: c for e, c in self._terms.items() if sum(e) <= d}, self._mode)

    def max_abs(self) -> float:
        return max((_abs(c) for c in self._terms.values()), default=0.0)

    # -- conversions --------------------------------------------------
    def to_mode(self, mode: str) -> "Jet2":
        if mode == self._mode:
            return self
        if self._mode != "rational" and mode == "rational":
            raise JetError("mode-mismatch", "inexact jets cannot be converted to rational mode")
        return Jet2(self._vars, self._max_degree, self._terms, mode)

    def map_coeffs(self, fn: Callable) -> "Jet2":
        return Jet2(self._vars, self._max_degree, {e: fn(c) for e, c in self._terms.items()}, self._mode)

    def conjugate(self) -> "Jet2":
        if self._mode == "rational":
            return self
        if self._mode == "extended":
            return self.map_coeffs(mpmath.conj)
        return self.map_coeffs(lambda c: c.conjugate())

    def rename(self, vars: Sequence[str]) -> "Jet2":
        vars = tuple(vars)
        if len(vars) != len(self._vars):
            raise JetError("bad-vars", "rename must keep the variable count")
        return Jet2._raw(vars, self._max_degree, dict(self._terms), self._mode)

    def extend_vars(self, vars: Sequence[str]) -> "Jet2":
        """Embed into a larger variable list containing the current one."""
        vars = tuple(vars)
        try:
            idx = [vars.index(v) for v in self._vars]
        except ValueError as exc:
            raise JetError("bad-vars", f"{self._vars} not contained in {vars}") from exc
        terms = {}
        for e, c in self._terms.items():
            new = [0] * len(vars)
            for i, k in zip(idx, e):
                new[i] = k
            terms[tuple(new)] = c
        return Jet2._raw(vars, self._max_degree, terms, self._mode)

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "Jet2"):
        if not isinstance(other, Jet2):
            raise JetError("type", f"expected Jet2, got {type(other).__name__}")
        if other._mode != self._mode:
            raise JetError("mode-mismatch", f"{self._mode} vs {other._mode}")
        if other._vars != self._vars:
            raise JetError("var-mismatch", f"{self._vars} vs {other._vars}")

    def _lift(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            return other
        if isinstance(other, (numbers.Number, mpmath.mpf, mpmath.mpc)):
            return Jet2.constant(self._vars, self._max_degree, coerce(other, self._mode), self._mode)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        d = min(self._max_degree, other._max_degree)
        terms = {e: c for e, c in self._terms.items() if sum(e) <= d}
        for e, c in other._terms.items():
            if sum(e) <= d:
                terms[e] = terms[e] + c if e in terms else c
        return Jet2._raw(self._vars, d, terms, self._mode)

    __radd__ = __add__

    def __neg__(self):
        return Jet2._raw(self._vars, self._max_degree, {e: -c for e, c in self._terms.items()}, self._mode)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, s) -> "Jet2":
        s = coerce(s, self._mode)
        return Jet2._raw(self._vars, self._max_degree, {e: s * c for e, c in self._terms.items()}, self._mode)

    def __mul__(self, other):
        if isinstance(other, (numbers.Number, mpmath.mpf, mpmath.mpc)) and not isinstance(other, Jet2):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        d = min(self._max_degree, other._max_degree)
        a = [(e, sum(e), c) for e, c in self._terms.items()]
        b = [(e, sum(e), c) for e, c in other._terms.items()]
        out: dict = {}
        for ea, da, ca in a:
            if da > d:
                continue
            room = d - da
            for eb, db, cb in b:
                if db > room:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                out[e] = out[e] + v if e in out else v
        return Jet2._raw(self._vars, d, out, self._mode)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if self._mode == "rational":
            return self.scale(Fraction(1) / coerce(other, "rational"))
        return self.scale(1 / coerce(other, self._mode))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        if not isinstance(k, numbers.Integral) or k < 0:
            raise JetError("bad-power", "only non-negative integer powers are supported")
        result = Jet2.constant(self._vars, self._max_degree, 1, self._mode)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Jet2):
            return NotImplemented
        return (
            self._vars == other._vars
            and self._mode == other._mode
            and self._max_degree == other._max_degree
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self._vars, self._mode, self._max_degree, frozenset(self._terms.items())))

    def mul_monomial(self, exp, coeff=1) -> "Jet2":
        """Multiply by ``coeff * x**exp`` (fast exponent shift)."""
        exp = tuple(exp)
        coeff = coerce(coeff, self._mode)
        d = self._max_degree
        out = {}
        for e, c in self._terms.items():
            ne = tuple(x + y for x, y in zip(e, exp))
            if sum(ne) <= d:
                out[ne] = c * coeff
        return Jet2._raw(self._vars, d, out, self._mode)

    def reciprocal(self) -> "Jet2":
        """Truncated power series of ``1/self``; needs a nonzero constant term."""
        c0 = self.constant_term()
        if _is_zero(c0):
            raise JetError("not-invertible", "reciprocal needs a nonzero constant term")
        inv0 = (Fraction(1) / c0) if self._mode == "rational" else 1 / c0
        r = (self - c0).scale(-inv0)
        result = Jet2.constant(self._vars, self._max_degree, 1, self._mode)
        power = result
        for _ in range(max(self._max_degree, 0)):
            power = power * r
            if power.is_zero():
                break
            result = result + power
        return result.scale(inv0)

    # -- calculus and composition ------------------------------------
    def partial(self, var) -> "Jet2":
        if var not in self._vars:
            raise JetError("unknown-var", f"{var!r} not in {self._vars}")
        i = self._vars.index(var)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        d = max(self._max_degree - 1, 0)
        return Jet2._raw(self._vars, d, out, self._mode)

    def substitute(self, bindings: Mapping[str, "Jet2"], max_degree: int | None = None) -> "Jet2":
        return jet_substitute(self, bindings, max_degree)

    def evaluate(self, values: Mapping[str, object] | Sequence):
        """Evaluate at a point given by name mapping or positional sequence."""
        if isinstance(values, Mapping):
            try:
                point = [values[v] for v in self._vars]
            except KeyError as exc:
                raise JetError("unbound-var", f"no value for {exc.args[0]!r}") from exc
        else:
            point = list(values)
            if len(point) != len(self._vars):
                raise JetError("bad-point", "point dimension does not match vars")
        total = 0
        for e, c in self._terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x**k
            total = total + t
        return total

    # -- serialization ------------------------------------------------
    def to_dict(self) -> dict:
        terms = []
        for e, c in self.items():
            if self._mode == "rational":
                terms.append({"exp": list(e), "num": c.numerator, "den": c.denominator})
            elif self._mode == "float":
                if isinstance(c, complex):
                    terms.append({"exp": list(e), "val": [c.real, c.imag]})
                else:
                    terms.append({"exp": list(e), "val": c})
            else:
                if isinstance(c, mpmath.mpc):
                    terms.append({"exp": list(e), "val": [mpmath.nstr(c.real, 40), mpmath.nstr(c.imag, 40)]})
                else:
                    terms.append({"exp": list(e), "val": mpmath.nstr(c, 40)})
        return {"vars": list(self._vars), "max_degree": self._max_degree, "mode": self._mode, "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "Jet2":
        try:
            vars = data["vars"]
            max_degree = int(data["max_degree"])
            mode = data.get("mode", "rational")
            raw = data["terms"]
        except (KeyError, TypeError) as exc:
            raise JetError("bad-json", f"missing field {exc}") from exc
        terms = {}
        for t in raw:
            exp = tuple(t["exp"])
            if mode == "rational":
                c = Fraction(int(t["num"]), int(t.get("den", 1)))
            else:
                v = t["val"]
                if isinstance(v, list):
                    c = complex(float(v[0]), float(v[1])) if mode == "float" else mpmath.mpc(v[0], v[1])
                else:
                    c = float(v) if mode == "float" else mpmath.mpf(v)
            terms[exp] = c
        return cls(vars, max_degree, terms, mode)

    @classmethod
    def from_json(cls, text: str) -> "Jet2":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        if not self._terms:
            return f"Jet2(0; {','.join(self._vars)}; deg<={self._max_degree}; {self._mode})"
        parts = []
        for e, c in self.items():
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self._vars, e) if k)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"Jet2({' + '.join(parts)}; deg<={self._max_degree}; {self._mode})"


def _canonical(terms: dict, mode: str) -> dict:
    if mode == "rational":
        return {e: c for e, c in terms.items() if c != 0}
    if not terms:
        return {}
    big = max(_abs(c) for c in terms.values())
    if big == 0:
        return {}
    if mode == "float":
        cut = FLOAT_ZERO_THRESHOLD * big
    else:
        cut = big * float(mpmath.mpf(10) ** (-(max(mpmath.mp.dps, EXTENDED_DPS) - 5)))
    return {e: c for e, c in terms.items() if _abs(c) >= cut and c != 0}


# -- functional API ----------------------------------------------------

def jet_add(a: Jet2, b: Jet2) -> Jet2:
    """Sum of two jets; truncation is the smaller of the two bounds."""
    a._check(b)
    return a + b


def jet_mul(a: Jet2, b: Jet2) -> Jet2:
    """Truncated product of two jets."""
    a._check(b)
    return a * b


def jet_partial(p: Jet2, var: str) -> Jet2:
    """Formal partial derivative."""
    return p.partial(var)


def jet_substitute(target: Jet2, bindings: Mapping[str, Jet2], max_degree: int | None = None) -> Jet2:
    """Compose ``target`` with ``bindings`` (one jet per target variable).

    Every target variable must be bound; all bindings share variables and
    mode.  Products of bindings are memoized per exponent so each distinct
    monomial costs one multiplication.
    """
    missing = [v for v in target.vars if v not in bindings]
    if missing:
        raise JetError("unbound-var", f"no binding for {missing}")
    bound = [bindings[v] for v in target.vars]
    ref = bound[0] if bound else None
    if ref is None:
        raise JetError("unbound-var", "target has no variables")
    for b in bound[1:]:
        ref._check(b)
    if ref.mode != target.mode:
        raise JetError("mode-mismatch", f"target {target.mode} vs bindings {ref.mode}")
    d = min(b.max_degree for b in bound) if max_degree is None else max_degree
    bound = [b.with_max_degree(d) if b.max_degree != d else b for b in bound]
    orders = [b.order() for b in bound]
    one = Jet2.constant(ref.vars, d, 1, ref.mode)
    cache: dict = {(0,) * len(bound): one}

    def product(exp):
        if exp in cache:
            return cache[exp]
        i = max(j for j, k in enumerate(exp) if k)
        prev = list(exp)
        prev[i] -= 1
        val = product(tuple(prev)) * bound[i]
        cache[exp] = val
        return val

    acc: dict = {}
    for e, c in target.items():
        if sum(k * o for k, o in zip(e, orders)) > d:
            continue
        for te, tc in product(e)._terms.items():
            v = c * tc
            acc[te] = acc[te] + v if te in acc else v
    return Jet2._raw(ref.vars, d, acc, ref.mode)


# -- planar systems ----------------------------------------------------

class PlanarJetSystem:
    """Planar vector field as two jets about an expansion point.

    Parameters
    ----------
    f1, f2 : Jet2
        Right-hand sides; the first two variables are the state.
    origin : pair
        Expansion point in original coordinates.
    """

    __slots__ = ("f1", "f2", "origin", "linear_part")

    def __init__(self, f1: Jet2, f2: Jet2, origin=(0, 0)):
        f1._check(f2)
        if len(f1.vars) < 2:
            raise JetError("bad-vars", "a planar system needs two state variables")
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)
        object.__setattr__(self, "origin", tuple(origin))
        nv = len(f1.vars)
        units = [tuple(1 if j == i else 0 for j in range(nv)) for i in range(2)]
        lin = tuple(tuple(f.coeff(u) for u in units) for f in (f1, f2))
        object.__setattr__(self, "linear_part", lin)

    def __setattr__(self, key, value):
        raise AttributeError("PlanarJetSystem is immutable")

    @property
    def vars(self) -> tuple:
        return self.f1.vars

    @property
    def mode(self) -> str:
        return self.f1.mode

    @property
    def max_degree(self) -> int:
        return min(self.f1.max_degree, self.f2.max_degree)

    def constant_terms(self) -> tuple:
        return (self.f1.constant_term(), self.f2.constant_term())

    def is_equilibrium(self, tol: float = 1e-10) -> bool:
        c = self.constant_terms()
        if self.mode == "rational":
            return all(x == 0 for x in c)
        return all(abs(x) <= tol for x in c)

    def trace_det(self) -> tuple:
        (a, b), (c, d) = self.linear_part
        return a + d, a * d - b * c

    def classify_linear(self, tol: float = 1e-12) -> str:
        """Name the linear part: ``rotation``, ``nilpotent``, ``zero`` or ``generic``."""
        (a, b), (c, d) = self.linear_part
        exact = self.mode == "rational"

        def z(x):
            return x == 0 if exact else abs(x) <= tol * max(1.0, self._scale())

        if all(z(x) for x in (a, b, c, d)):
            return "zero"
        if z(a) and z(d) and z(c) and not z(b):
            return "nilpotent"
        if z(a) and z(d) and z(b + c) and not z(b):
            re_b = b.real if isinstance(b, complex) else b
            if re_b > 0:
                return "rotation"
        return "generic"

    def _scale(self) -> float:
        return max(abs(x) for row in self.linear_part for x in row)

    def omega(self):
        """Rotation frequency of a Jordan-form linear part."""
        if self.classify_linear() != "rotation":
            raise JetError("not-jordan", f"linear part {self.linear_part} is not [[0, w], [-w, 0]]")
        return self.linear_part[0][1]

    def to_mode(self, mode: str) -> "PlanarJetSystem":
        return PlanarJetSystem(self.f1.to_mode(mode), self.f2.to_mode(mode), self.origin)

    def truncate(self, d: int) -> "PlanarJetSystem":
        return PlanarJetSystem(self.f1.truncate(d), self.f2.truncate(d), self.origin)

    def linear_change(self, matrix, names: Sequence[str] | None = None) -> "PlanarJetSystem":
        """New system in coordinates ``w`` with ``x = matrix @ w`` (state only)."""
        (p, q), (r, s) = matrix
        mode = self.mode
        det = p * s - q * r
        if det == 0:
            raise JetError("singular", "linear change of variables is singular")
        vars = tuple(names) + self.vars[2:] if names else self.vars
        d = self.max_degree
        w = Jet2.variables(vars, d, mode)
        x1 = w[0].scale(p) + w[1].scale(q)
        x2 = w[0].scale(r) + w[1].scale(s)
        bind = {self.vars[0]: x1, self.vars[1]: x2}
        for old, new in zip(self.vars[2:], w[2:]):
            bind[old] = new
        g1 = jet_substitute(self.f1, bind, d)
        g2 = jet_substitute(self.f2, bind, d)
        inv = (
            (s / det, -q / det),
            (-r / det, p / det),
        ) if mode != "rational" else (
            (Fraction(s) / det, Fraction(-q) / det),
            (Fraction(-r) / det, Fraction(p) / det),
        )
        h1 = g1.scale(inv[0][0]) + g2.scale(inv[0][1])
        h2 = g1.scale(inv[1][0]) + g2.scale(inv[1][1])
        return PlanarJetSystem(h1, h2, self.origin)

    def __repr__(self):
        return f"PlanarJetSystem(f1={self.f1!r}, f2={self.f2!r}, origin={self.origin})"


def _matrix_inverse_jets(a11: Jet2, a12: Jet2, a21: Jet2, a22: Jet2):
    det = a11 * a22 - a12 * a21
    inv = det.reciprocal()
    return a22 * inv, -a12 * inv, -a21 * inv, a11 * inv


def taylor_expand(
    rhs: Callable,
    point,
    max_degree: int,
    *,
    frame=None,
    mode: str = "rational",
    names: Sequence[str] = ("u", "v"),
    params: Sequence[str] = (),
) -> PlanarJetSystem:
    """Expand a closed-form planar vector field into a :class:`PlanarJetSystem`.

    Parameters
    ----------
    rhs : callable
        ``rhs(X, Y, mu) -> (Xdot, Ydot)`` written with ``+``, ``-``, ``*`` so
        it accepts jets; ``mu`` is a tuple with one jet per name in
        ``params`` (empty when there is no unfolding).
    point : pair
        Expansion point ``(X0, Y0)``.
    max_degree : int
        Truncation bound, at least 2.
    frame : 2x2 matrix or callable, optional
        Either a constant matrix ``A`` giving ``(X, Y) = point + A (u, v)``,
        or ``frame(u, v, mu) -> (X, Y)`` returning jets affine in ``(u, v)``.
        The returned system is in the new coordinates, i.e. the velocity is
        multiplied by the (possibly parameter dependent) inverse of ``A``.
    mode : str
        Coefficient mode of the result.
    names, params : sequences of str
        State and unfolding-parameter variable names.

    Notes
    -----
    Polynomial right-hand sides expand exactly up to the truncation.
    """
    if max_degree < 2:
        raise JetError("bad-degree", "taylor_expand needs max_degree >= 2")
    vars = tuple(names) + tuple(params)
    allv = Jet2.variables(vars, max_degree, mode)
    u, v = allv[0], allv[1]
    mu = tuple(allv[2:])
    x0 = coerce(point[0], mode)
    y0 = coerce(point[1], mode)
    if frame is None:
        frame = ((1, 0), (0, 1))
    if callable(frame):
        X, Y = frame(u, v, mu)
        if not isinstance(X, Jet2):
            X = Jet2.constant(vars, max_degree, X, mode)
        if not isinstance(Y, Jet2):
            Y = Jet2.constant(vars, max_degree, Y, mode)
        su = tuple(1 if i == 0 else 0 for i in range(len(vars)))
        sv = tuple(1 if i == 1 else 0 for i in range(len(vars)))
        for J in (X, Y):
            for e in J.terms:
                if e[0] + e[1] > 1:
                    raise JetError("bad-frame", "frame must be affine in the state variables")
        a11 = _coefficient_jet(X, su)
        a12 = _coefficient_jet(X, sv)
        a21 = _coefficient_jet(Y, su)
        a22 = _coefficient_jet(Y, sv)
        i11, i12, i21, i22 = _matrix_inverse_jets(a11, a12, a21, a22)
    else:
        (p, q), (r, s) = frame
        X = u.scale(p) + v.scale(q) + x0
        Y = u.scale(r) + v.scale(s) + y0
        det = coerce(p, mode) * coerce(s, mode) - coerce(q, mode) * coerce(r, mode)
        if det == 0:
            raise JetError("singular", "frame matrix is singular")
        one = coerce(1, mode)
        inv = one / det
        i11 = Jet2.constant(vars, max_degree, coerce(s, mode) * inv, mode)
        i12 = Jet2.constant(vars, max_degree, -coerce(q, mode) * inv, mode)
        i21 = Jet2.constant(vars, max_degree, -coerce(r, mode) * inv, mode)
        i22 = Jet2.constant(vars, max_degree, coerce(p, mode) * inv, mode)
    dX, dY = rhs(X, Y, mu)
    if not isinstance(dX, Jet2):
        dX = Jet2.constant(vars, max_degree, dX, mode)
    if not isinstance(dY, Jet2):
        dY = Jet2.constant(vars, max_degree, dY, mode)
    f1 = i11 * dX + i12 * dY
    f2 = i21 * dX + i22 * dY
    return PlanarJetSystem(f1, f2, (point[0], point[1]))


def _coefficient_jet(J: Jet2, unit) -> Jet2:
    """Coefficient of the state monomial ``unit`` as a jet in the parameters."""
    out = {}
    for e, c in J.terms.items():
        if e[0] == unit[0] and e[1] == unit[1]:
            out[(0, 0) + e[2:]] = c
    return Jet2(J.vars, J.max_degree, out, J.mode)


def linear_jets(vars: Sequence[str], max_degree: int, rows: Iterable, mode: str = "rational"):
    """Jets ``sum_j rows[i][j] * vars[j]`` for each row (helper for linear maps)."""
    allv = Jet2.variables(vars, max_degree, mode)
    out = []
    for row in rows:
        acc = Jet2.zero(vars, max_degree, mode)
        for c, x in zip(row, allv):
            if c != 0:
                acc = acc + x.scale(c)
        out.append(acc)
    return tuple(out)


# -- dense vectorized ring ---------------------------------------------

class DenseRing:
    """Truncated polynomials stored as dense coefficient vectors.

    A vectorized counterpart of :class:`Jet2` for Newton solvers that
    evaluate the same composition hundreds of times.  Coefficients may be
    real or complex (the latter supports complex-step differentiation).

    Parameters
    ----------
    vars : sequence of str
        Variable names.
    max_degree : int
        Truncation bound.
    """

    def __init__(self, vars: Sequence[str], max_degree: int):
        self.vars = tuple(vars)
        self.max_degree = int(max_degree)
        nv = len(self.vars)
        mons = []
        for d in range(self.max_degree + 1):
            layer = [e for e in itertools.product(range(d + 1), repeat=nv) if sum(e) == d]
            mons.extend(sorted(layer, reverse=True))
        self.monomials = mons
        self.index = {e: i for i, e in enumerate(mons)}
        self.size = len(mons)
        self.degrees = np.array([sum(e) for e in mons])
        I, J, K = [], [], []
        for i, a in enumerate(mons):
            for j, b in enumerate(mons):
                if self.degrees[i] + self.degrees[j] <= self.max_degree:
                    I.append(i)
                    J.append(j)
                    K.append(self.index[tuple(x + y for x, y in zip(a, b))])
        self._I, self._J, self._K = np.array(I), np.array(J), np.array(K)
        self._partials = []
        for v in range(nv):
            src, dst, fac = [], [], []
            for i, e in enumerate(mons):
                if e[v]:
                    lower = list(e)
                    lower[v] -= 1
                    src.append(i)
                    dst.append(self.index[tuple(lower)])
                    fac.append(e[v])
            self._partials.append((np.array(src, dtype=int), np.array(dst, dtype=int), np.array(fac, float)))

    def zeros(self, dtype=float) -> np.ndarray:
        return np.zeros(self.size, dtype)

    def const(self, c) -> np.ndarray:
        out = self.zeros(complex if isinstance(c, complex) else float)
        out[0] = c
        return out

    def var(self, name, c=1.0) -> np.ndarray:
        e = tuple(1 if v == name else 0 for v in self.vars)
        out = self.zeros()
        out[self.index[e]] = c
        return out

    def from_terms(self, terms: Mapping) -> np.ndarray:
        """Vector from ``{exponent: coefficient}``; terms past the bound are dropped."""
        out = self.zeros()
        for e, c in terms.items():
            if sum(e) <= self.max_degree:
                out[self.index[tuple(e)]] += float(c)
        return out

    def from_jet(self, jet: Jet2) -> np.ndarray:
        if tuple(jet.vars) != self.vars:
            raise JetError("var-mismatch", f"{jet.vars} vs {self.vars}")
        return self.from_terms(dict(jet.items()))

    def to_jet(self, a: np.ndarray, tol: float = 0.0) -> Jet2:
        terms = {e: float(a[i]) for i, e in enumerate(self.monomials) if abs(a[i]) > tol}
        return Jet2(self.vars, self.max_degree, terms, "float")

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p = a[self._I] * b[self._J]
        if np.iscomplexobj(p):
            return (np.bincount(self._K, p.real, self.size)
                    + 1j * np.bincount(self._K, p.imag, self.size))
        return np.bincount(self._K, p, self.size)

    def partial(self, a: np.ndarray, var) -> np.ndarray:
        v = self.vars.index(var) if isinstance(var, str) else var
        src, dst, fac = self._partials[v]
        out = np.zeros(self.size, a.dtype)
        out[dst] = a[src] * fac
        return out

    def coeff(self, a: np.ndarray, exp) -> float:
        return a[self.index[tuple(exp)]]
