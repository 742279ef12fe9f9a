"""Trajectory integration, limit cycles, homoclinic loops and portrait labels.

Integration uses :func:`scipy.integrate.solve_ivp` (embedded Runge-Kutta
with dense output and event location).  Every cycle and loop computation
works in the real Jordan frame of ``E2-``: ``X = X0 + u``,
``Y = Y0 + a u + b v`` with the linearization ``[[alpha, w], [-w, alpha]]``.
At a Hopf point this is the frame in which the focus values are computed,
so cycle amplitudes compare directly with normal-form radii.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .model import Params, equilibria, jacobian

__all__ = [
    "DynamicsError",
    "Trajectory",
    "JordanFrame",
    "LimitCycleEstimate",
    "HomoclinicResult",
    "Splitting",
    "PortraitReport",
    "integrate",
    "integrate_field",
    "jordan_frame",
    "poincare_map",
    "find_limit_cycle",
    "find_limit_cycles",
    "splitting",
    "find_homoclinic",
    "bracket_homoclinic",
    "classify_portrait",
    "energy_drift",
    "PORTRAIT_LABELS",
]

DEFAULT_TOL = 1e-10
CYCLE_TOL = 1e-8
DEFAULT_METHOD = "DOP853"
SEARCH_METHOD = DEFAULT_METHOD
PORTRAIT_LABELS = ("stable-E2-", "stable-LC", "stable-HL", "2-LC", "unstable-E2-", "unstable-LC",
                   "unstable-HL", "indeterminate")


class DynamicsError(RuntimeError):
    """Integration or search failure; ``code`` names the condition."""

    def __init__(self, code: str, message: str, data: dict | None = None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.data = data or {}


def _fp(p: Params) -> tuple:
    q = p.as_float()
    return q.m, q.n, q.eps, q.k


def _field(p: Params, sign: float = 1.0) -> Callable:
    m, n, eps, k = _fp(p)

    def f(t, z):
        X, Y = z
        inc = k * (1 + eps * X) * X
        return [sign * (inc * (Y - X) - (n + 1) * X), sign * (m - n * Y - X)]

    return f


# ---------------------------------------------------------------------------
# integration

@dataclass
class Trajectory:
    """Sampled solution with event log.

    ``events`` holds ``(name, t, X, Y)`` tuples; ``left_quadrant`` is set
    when ``X`` became negative (integration continues regardless).
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    tol: float
    method: str
    events: list = field(default_factory=list)
    left_quadrant: bool = False
    nfev: int = 0

    @property
    def samples(self) -> list:
        return list(zip(self.t.tolist(), self.x.tolist(), self.y.tolist()))

    @property
    def final(self) -> tuple:
        return float(self.x[-1]), float(self.y[-1])

    def csv_rows(self) -> list:
        return [[float(a), float(b), float(c)] for a, b, c in zip(self.t, self.x, self.y)]

    def to_dict(self) -> dict:
        return {"tol": self.tol, "method": self.method, "n_samples": len(self.t), "final": list(self.final),
                "left_quadrant": self.left_quadrant, "nfev": self.nfev,
                "events": [list(e) for e in self.events]}


def _check_tol(tol: float):
    if not 1e-13 <= tol <= 1e-3:
        raise DynamicsError("bad-tolerance", f"tol must lie in [1e-13, 1e-3], got {tol}")


def integrate_field(f: Callable, z0, t_span, tol: float = DEFAULT_TOL, method: str = DEFAULT_METHOD,
                    events=None, t_eval=None, dense_output: bool = False):
    """Thin wrapper over ``solve_ivp`` with uniform tolerances and failure reporting."""
    _check_tol(tol)
    sol = solve_ivp(f, t_span, list(map(float, z0)), method=method, rtol=tol, atol=tol * 1e-2,
                    events=events, t_eval=t_eval, dense_output=dense_output)
    if sol.status == -1:
        raise DynamicsError("step-underflow", sol.message,
                            {"t": float(sol.t[-1]), "state": [float(v) for v in sol.y[:, -1]]})
    return sol


def integrate(p: Params, x0, t_span, tol: float = DEFAULT_TOL, method: str = DEFAULT_METHOD,
              section: Callable | None = None, n_samples: int | None = None) -> Trajectory:
    """Integrate the model from ``x0`` over ``t_span``.

    Parameters
    ----------
    section : callable, optional
        ``g(X, Y)``; zero crossings are logged as ``"section"`` events.
    n_samples : int, optional
        Evaluate the dense output on a uniform grid instead of returning
        the accepted steps.

    Raises
    ------
    DynamicsError
        ``bad-tolerance`` outside ``[1e-13, 1e-3]``; ``step-underflow``
        when the integrator fails, with the last state in ``data``.
    """
    f = _field(p)

    def exit_q(t, z):
        return z[0]

    evs = [exit_q]
    if section is not None:
        evs.append(lambda t, z: section(z[0], z[1]))
    t_eval = np.linspace(t_span[0], t_span[1], n_samples) if n_samples else None
    sol = integrate_field(f, x0, t_span, tol, method, events=evs, t_eval=t_eval)
    log = []
    left = False
    for t, z in zip(sol.t_events[0], sol.y_events[0]):
        log.append(("X=0", float(t), float(z[0]), float(z[1])))
        left = True
    if section is not None:
        for t, z in zip(sol.t_events[1], sol.y_events[1]):
            log.append(("section", float(t), float(z[0]), float(z[1])))
    if float(np.min(sol.y[0])) < 0 and x0[0] >= 0:
        left = True
    if left:
        warnings.warn("trajectory left X >= 0; integration continued", RuntimeWarning, stacklevel=2)
    log.sort(key=lambda e: e[1])
    return Trajectory(sol.t, sol.y[0], sol.y[1], tol, method, log, left, int(sol.nfev))


def energy_drift(periods: int = 100, tol: float = DEFAULT_TOL, method: str = DEFAULT_METHOD) -> float:
    """Maximum relative drift of ``x^2 + y^2`` for ``x' = y, y' = -x``."""
    sol = integrate_field(lambda t, z: [z[1], -z[0]], (1.0, 0.0), (0.0, 2 * math.pi * periods), tol, method)
    e = sol.y[0] ** 2 + sol.y[1] ** 2
    return float(np.abs(e - 1.0).max())


# ---------------------------------------------------------------------------
# Jordan frame and Poincare map

@dataclass(frozen=True)
class JordanFrame:
    """Real Jordan frame of a focus: ``X = X0 + u``, ``Y = Y0 + a u + b v``."""

    x0: float
    y0: float
    a: float
    b: float
    alpha: float
    omega: float

    def to_state(self, u, v):
        return self.x0 + u, self.y0 + self.a * u + self.b * v

    def to_frame(self, X, Y):
        u = X - self.x0
        return u, (Y - self.y0 - self.a * u) / self.b

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega


def _e2minus(p: Params):
    for e in equilibria(p):
        if e.kind == "E2minus":
            return e
    return None


def _saddle(p: Params):
    for e in equilibria(p):
        if e.kind == "E2plus":
            return e
    return None


def jordan_frame(p: Params) -> JordanFrame:
    """Jordan frame at ``E2-``.

    Raises
    ------
    DynamicsError
        ``no-E2`` if ``E2-`` does not exist, ``not-focus`` if its
        eigenvalues are real.
    """
    e = _e2minus(p)
    if e is None:
        raise DynamicsError("no-E2", "E2- does not exist")
    x0, y0 = float(e.x), float(e.y)
    (j11, j12), (j21, j22) = jacobian(p.as_float(), (x0, y0))
    tr, det = j11 + j22, j11 * j22 - j12 * j21
    disc = det - tr * tr / 4
    if disc <= 0:
        raise DynamicsError("not-focus", f"E2- has real eigenvalues (trace {tr:.3g}, det {det:.3g})")
    alpha, omega = tr / 2, math.sqrt(disc)
    return JordanFrame(x0, y0, (alpha - j11) / j12, omega / j12, alpha, omega)


def poincare_map(p: Params, frame: JordanFrame, s: float, direction: int = 1, tol: float = DEFAULT_TOL,
                 method: str = SEARCH_METHOD, max_turn: float = 60.0):
    """One return to the ray ``{v = 0, u > 0}`` starting from ``u = s``.

    Returns ``(s_next, return_time)`` or ``None`` when the orbit does not
    come back (escape, or no return within ``max_turn`` linear periods).
    ``direction = -1`` integrates the time-reversed field.
    """
    f = _field(p, float(direction))
    cross_sign = -1 if direction > 0 else 1  # sign of v' on the positive u-axis (clockwise rotation)

    def v_of(t, z):
        return (z[1] - frame.y0 - frame.a * (z[0] - frame.x0)) / frame.b

    bound = 20 * (abs(frame.x0) + abs(frame.y0))

    def escape(t, z):
        return min(z[0] + 0.5 * frame.x0, bound - abs(z[0]) - abs(z[1]))

    escape.terminal = True
    half = lambda t, z: v_of(t, z)  # noqa: E731
    half.terminal = True
    half.direction = -cross_sign
    full = lambda t, z: v_of(t, z)  # noqa: E731
    full.terminal = True
    full.direction = cross_sign
    tmax = max_turn * frame.period
    z0 = frame.to_state(s, 0.0)
    sol = integrate_field(f, z0, (0.0, tmax), tol, method, events=[half, escape])
    if sol.status != 1 or len(sol.t_events[0]) == 0:
        return None
    t1 = float(sol.t_events[0][0])
    z1 = sol.y_events[0][0]
    if z1[0] - frame.x0 >= 0:
        return None
    sol = integrate_field(f, z1, (t1, tmax), tol, method, events=[full, escape])
    if sol.status != 1 or len(sol.t_events[0]) == 0:
        return None
    z2 = sol.y_events[0][0]
    u2 = float(z2[0] - frame.x0)
    if u2 <= 0:
        return None
    return u2, float(sol.t_events[0][0])


@dataclass
class LimitCycleEstimate:
    """A periodic orbit crossing the positive ``u`` ray at ``u = amplitude``.

    ``multiplier`` is the derivative of the forward-time return map, so
    ``|multiplier| < 1`` iff the cycle is stable.
    """

    amplitude: float
    period: float
    stability: str
    section_point: tuple
    multiplier: float
    revisit_error: float
    direction: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["section_point"] = list(self.section_point)
        return d


def _refine_cycle(p, frame, lo, hi, direction, tol, method, xtol):
    def d(s):
        r = poincare_map(p, frame, s, direction, tol, method)
        if r is None:
            raise DynamicsError("no-return", f"orbit from u={s} did not return")
        return r[0] - s

    s = brentq(d, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    s_next, T = poincare_map(p, frame, s, direction, tol, method)
    h = max(1e-6 * s, 1e-9)
    a = poincare_map(p, frame, s + h, direction, tol, method)
    b = poincare_map(p, frame, s - h, direction, tol, method)
    slope = (a[0] - b[0]) / (2 * h) if a and b else float("nan")
    mult = slope if direction > 0 else 1.0 / slope
    stability = "stable" if abs(mult) < 1 else "unstable"
    X, Y = frame.to_state(s, 0.0)
    return LimitCycleEstimate(s, T, stability, (X, Y), mult, abs(s_next - s), direction)


def _scan(p, frame, direction, tol, method, s_lo, s_hi, n):
    grid = np.geomspace(s_lo, s_hi, n)
    out = []
    for s in grid:
        r = poincare_map(p, frame, float(s), direction, tol, method)
        if r is None:
            break
        out.append((float(s), r[0] - float(s)))
    return out


def find_limit_cycles(p: Params, direction: int = 1, tol: float = DEFAULT_TOL, cycle_tol: float = CYCLE_TOL,
                      method: str = SEARCH_METHOD, s_range: tuple | None = None, n_scan: int = 48) -> list:
    """All cycles around ``E2-`` detected by a displacement scan along the section ray.

    The displacement ``P(s) - s`` of the return map is sampled on a
    geometric grid until orbits stop returning; every sign change is
    refined by a bracketed root finder.  Cycles are sorted by amplitude.
    """
    try:
        frame = jordan_frame(p)
    except DynamicsError:
        return []
    scale = abs(frame.x0) + abs(frame.y0)
    lo, hi = s_range or (1e-4 * scale, 2.0 * scale)
    pts = _scan(p, frame, direction, tol, method, lo, hi, n_scan)
    cycles = []
    for (s0, d0), (s1, d1) in zip(pts, pts[1:]):
        if d0 == 0:
            cycles.append(_refine_cycle(p, frame, s0 * (1 - 1e-9), s0 * (1 + 1e-9), direction, tol, method, cycle_tol))
        elif d0 * d1 < 0:
            try:
                cycles.append(_refine_cycle(p, frame, s0, s1, direction, tol, method, cycle_tol * 1e-2))
            except (DynamicsError, ValueError):
                continue
    return sorted(cycles, key=lambda c: c.amplitude)


def find_limit_cycle(p: Params, seed: float | None = None, direction: int = 1, tol: float = DEFAULT_TOL,
                     cycle_tol: float = CYCLE_TOL, method: str = SEARCH_METHOD):
    """The cycle nearest to ``seed`` (an amplitude in the Jordan frame), or ``None``.

    ``direction = -1`` works on the time-reversed field, where unstable
    cycles become attracting; reported stability always refers to forward
    time.
    """
    cycles = find_limit_cycles(p, direction, tol, cycle_tol, method)
    if not cycles:
        return None
    if seed is None:
        return cycles[0]
    return min(cycles, key=lambda c: abs(c.amplitude - seed))


# ---------------------------------------------------------------------------
# homoclinic loops

@dataclass
class Splitting:
    """Signed separatrix splitting at one parameter point.

    ``value = s_unstable - s_stable`` where both are distances from ``E2-``
    along the ray pointing away from the saddle.
    """

    value: float
    s_unstable: float
    s_stable: float
    saddle: tuple
    saddle_trace: float

    def to_dict(self) -> dict:
        return asdict(self)


def _manifold_hit(f, start, ray_origin, ray_dir, tmax, tol, method):
    """First time the orbit crosses the ray ``origin + s dir, s > 0``; returns ``s``."""
    nx, ny = -ray_dir[1], ray_dir[0]

    def g(t, z):
        return nx * (z[0] - ray_origin[0]) + ny * (z[1] - ray_origin[1])

    bound = 20 * (abs(ray_origin[0]) + abs(ray_origin[1]))

    def escape(t, z):
        return min(z[0] + 0.5 * abs(ray_origin[0]), bound - abs(z[0]) - abs(z[1]))

    escape.terminal = True
    try:
        sol = integrate_field(f, start, (0.0, tmax), tol, method, events=[g, escape])
    except DynamicsError:
        return None
    for t, z in zip(sol.t_events[0], sol.y_events[0]):
        s = (z[0] - ray_origin[0]) * ray_dir[0] + (z[1] - ray_origin[1]) * ray_dir[1]
        if s > 0:
            return float(s), float(t)
    return None


def splitting(p: Params, delta: float | None = None, tol: float = DEFAULT_TOL,
              method: str = SEARCH_METHOD) -> Splitting:
    """Separatrix splitting between the saddle ``E2+`` and the loop around ``E2-``.

    Manifolds are seeded at distance ``delta`` along the saddle
    eigenvectors (default ``1e-7`` times the equilibrium scale).  Of the two
    branches of each manifold the one reaching the far ray first is used.

    Raises
    ------
    DynamicsError
        ``no-saddle`` when ``E2+`` or ``E2-`` is missing; ``no-crossing``
        when no branch reaches the ray.
    """
    sd, foc = _saddle(p), _e2minus(p)
    if sd is None or foc is None:
        raise DynamicsError("no-saddle", "both E2+ and E2- are required")
    xs, ys = float(sd.x), float(sd.y)
    xf, yf = float(foc.x), float(foc.y)
    J = np.array(jacobian(p.as_float(), (xs, ys)), dtype=float)
    lam, vec = np.linalg.eig(J)
    if np.iscomplexobj(lam) and np.abs(lam.imag).max() > 0 or lam.real.min() >= 0 or lam.real.max() <= 0:
        raise DynamicsError("no-saddle", f"E2+ is not a saddle (eigenvalues {lam})")
    lam = lam.real
    iu, istab = int(np.argmax(lam)), int(np.argmin(lam))
    scale = abs(xs) + abs(ys)
    delta = delta or 1e-7 * scale
    d = np.array([xf - xs, yf - ys])
    d /= np.linalg.norm(d)
    period = 2 * math.pi / max(1e-12, math.sqrt(abs(np.linalg.det(np.array(jacobian(p.as_float(), (xf, yf)))))))
    tmax = 3 * math.log(scale / delta) / min(lam[iu], -lam[istab]) + 40 * period
    hits = {}
    for name, idx, sign in (("unstable", iu, 1.0), ("stable", istab, -1.0)):
        f = _field(p, sign)
        best = None
        for br in (1.0, -1.0):
            start = (xs + br * delta * vec[0, idx].real, ys + br * delta * vec[1, idx].real)
            h = _manifold_hit(f, start, (xf, yf), d, tmax, tol, method)
            if h is not None and (best is None or h[1] < best[1]):
                best = h
        if best is None:
            raise DynamicsError("no-crossing", f"no {name} branch reaches the section")
        hits[name] = best[0]
    return Splitting(hits["unstable"] - hits["stable"], hits["unstable"], hits["stable"], (xs, ys),
                     float(J[0, 0] + J[1, 1]))


@dataclass
class HomoclinicResult:
    """Critical parameter of a homoclinic loop in a one-parameter family."""

    parameter: float
    bracket: tuple
    splitting_low: float
    splitting_high: float
    stability: str
    saddle_trace: float
    iterations: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bracket"] = list(self.bracket)
        return d


def find_homoclinic(family: Callable[[float], Params], bracket: Sequence[float], width: float = 1e-6,
                    tol: float = DEFAULT_TOL, method: str = SEARCH_METHOD, max_iter: int = 80) -> HomoclinicResult:
    """Bisect the splitting along ``family`` until the bracket is narrower than ``width``.

    The loop is stable when the saddle trace is negative.

    Raises
    ------
    DynamicsError
        ``no-sign-change`` with both splitting values when the bracket
        does not straddle a zero.
    """
    a, b = map(float, bracket)
    sa, sb = splitting(family(a), tol=tol, method=method), splitting(family(b), tol=tol, method=method)
    if sa.value * sb.value > 0:
        raise DynamicsError("no-sign-change", f"splitting {sa.value:.6g} at {a} and {sb.value:.6g} at {b}",
                            {"low": sa.value, "high": sb.value})
    fa = sa.value
    it = 0
    while abs(b - a) > width and it < max_iter:
        c = 0.5 * (a + b)
        sc = splitting(family(c), tol=tol, method=method).value
        if sc == 0:
            a = b = c
            break
        if sc * fa < 0:
            b = c
        else:
            a, fa = c, sc
        it += 1
    mid = 0.5 * (a + b)
    tr = splitting(family(mid), tol=tol, method=method).saddle_trace
    return HomoclinicResult(mid, (a, b), sa.value, sb.value, "stable" if tr < 0 else "unstable", tr, it)


# ---------------------------------------------------------------------------
# portraits

@dataclass
class PortraitReport:
    """Label with the evidence used to produce it."""

    label: str
    e2_trace: float | None
    cycles: list
    splitting: float | None
    hl_distance: float | None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"label": self.label, "e2_trace": self.e2_trace, "cycles": [c.to_dict() for c in self.cycles],
                "splitting": self.splitting, "hl_distance": self.hl_distance, "notes": self.notes}


def classify_portrait(p: Params, hl_rtol: float = 1e-5, tol: float = DEFAULT_TOL,
                      method: str = SEARCH_METHOD) -> PortraitReport:
    """Label the phase portrait near ``E2-``.

    A homoclinic label is given when the splitting, divided by its
    derivative with respect to ``eps``, puts a loop within ``hl_rtol *
    eps`` of the given point; its stability is the sign of the saddle
    trace.  Otherwise the cycles found by scanning the return map decide:
    two cycles give ``2-LC``, one gives ``stable-LC`` or ``unstable-LC``,
    none gives the stability of ``E2-``.
    """
    foc = _e2minus(p)
    if foc is None:
        return PortraitReport("indeterminate", None, [], None, None, ["E2- does not exist"])
    tr = float(foc.trace)
    notes = []
    split = dist = None
    if _saddle(p) is not None:
        try:
            sp = splitting(p, tol=tol, method=method)
            split = sp.value
            eps = float(p.eps)
            h = max(1e-4 * eps, 1e-7)
            s_hi = splitting(p.replace(eps=eps + h), tol=tol, method=method).value
            s_lo = splitting(p.replace(eps=eps - h), tol=tol, method=method).value
            slope = (s_hi - s_lo) / (2 * h)
            if slope != 0:
                dist = abs(split / slope)
                if dist <= hl_rtol * eps:
                    label = "stable-HL" if sp.saddle_trace < 0 else "unstable-HL"
                    return PortraitReport(label, tr, [], split, dist, notes)
        except DynamicsError as exc:
            notes.append(f"splitting unavailable: {exc}")
    if tr == 0:
        return PortraitReport("indeterminate", tr, [], split, dist, notes + ["E2- is non-hyperbolic"])
    cycles = find_limit_cycles(p, 1, tol, CYCLE_TOL, method)
    if len(cycles) >= 2:
        label = "2-LC"
        if len(cycles) > 2:
            notes.append(f"{len(cycles)} cycles detected")
    elif len(cycles) == 1:
        label = f"{cycles[0].stability}-LC"
    else:
        label = "stable-E2-" if tr < 0 else "unstable-E2-"
    return PortraitReport(label, tr, cycles, split, dist, notes)


def bracket_homoclinic(family: Callable[[float], Params], start: float, step: float, max_steps: int = 40,
                       width: float = 1e-6, tol: float = DEFAULT_TOL, method: str = SEARCH_METHOD):
    """Step outward from ``start`` in both directions until the splitting changes sign, then bisect.

    Returns a :class:`HomoclinicResult` or ``None`` when no sign change is
    met within ``max_steps`` steps on either side.
    """
    def val(x):
        try:
            return splitting(family(x), tol=tol, method=method).value
        except (DynamicsError, ValueError):
            return None

    prev = {1: (start, val(start)), -1: (start, val(start))}
    for j in range(1, max_steps + 1):
        for side in (1, -1):
            x = start + side * j * step
            v = val(x)
            x0, v0 = prev[side]
            if v is not None and v0 is not None and v * v0 < 0:
                lo, hi = sorted((x0, x))
                return find_homoclinic(family, (lo, hi), width, tol, method)
            prev[side] = (x, v)
    return None
