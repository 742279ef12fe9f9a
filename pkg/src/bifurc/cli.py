"""Command-line front end.

Every command prints a JSON report (or a CSV table with ``--format csv``).
With ``--out DIR`` the tables, the report and a ``manifest.json`` holding
checksums of every output are written to ``DIR``.  Exit codes: 0 success,
1 verification failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from . import bt, dynamics, hopf
from .jets import JetError, default_float_mode
from .model import (ModelError, Params, Surd, classify_case, eps_of_R, equilibria, kH_of_R, parse_number,
                    read_config, thresholds, R_window, R_bt)

FIGURES = ("1", "3", "4", "5", "7", "9", "10")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
F101 = Fraction(1001, 1000)


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# formatting

def fmt(x) -> str:
    """Fixed 17-significant-digit rendering for CSV cells."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, float, Fraction, Surd)) or hasattr(x, "__float__"):
        try:
            return f"{float(x):.17g}"
        except (TypeError, ValueError):
            pass
    return str(x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return {"exact": str(x), "value": float(x)}
    if isinstance(x, Surd):
        return {"exact": str(x), "value": float(x)}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    if hasattr(x, "item") and callable(x.item):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False)


@dataclass
class Table:
    header: list
    rows: list = field(default_factory=list)

    def text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([fmt(c) for c in r])
        return buf.getvalue()


@dataclass
class Result:
    report: dict
    tables: dict = field(default_factory=dict)
    scripts: dict = field(default_factory=dict)
    status: int = EXIT_OK


@dataclass
class RunManifest:
    """Provenance of one command invocation."""

    command: list
    config: dict
    version: str
    outputs: list
    duration_s: float
    status: int

    def to_dict(self) -> dict:
        return {"command": self.command, "config": self.config, "version": self.version,
                "outputs": self.outputs, "duration_s": self.duration_s, "status": self.status}


def _digest(text: str) -> dict:
    data = text.encode()
    return {"sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)}


# ---------------------------------------------------------------------------
# parameter handling

def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise InputError(f"config file {path!r} not found")
    if p.suffix == ".json":
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON config: {exc}") from exc
        data = data.get("params", data)
        out = {}
        for k, v in data.items():
            out[k] = v["exact"] if isinstance(v, dict) and "exact" in v else (
                v["value"] if isinstance(v, dict) else v)
        return {k: str(v) for k, v in out.items()}
    return read_config(p)


def _config(args) -> dict:
    cfg = _load_config(getattr(args, "config", None))
    for key in ("m", "n", "eps", "k"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _num(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise InputError(f"missing parameter {key!r}")
        return default
    return parse_number(cfg[key])


def _params(cfg) -> Params:
    return Params.from_mapping(cfg)


def _add_params(sp, keys=("m", "n", "eps", "k")):
    sp.add_argument("--config", help="flat key = value file (or a JSON report to re-ingest)")
    for key in keys:
        sp.add_argument(f"--{key}", help=f"{key} (decimal or p/q)")


def _add_common(sp):
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", help="directory for tables, report and manifest")
    sp.add_argument("--tol", type=float, default=dynamics.DEFAULT_TOL, help="integration tolerance")


# ---------------------------------------------------------------------------
# equilibria / scan

def _eq_rows(eqs):
    return [[e.kind, e.x, e.y, e.trace, e.det, e.linear_class] for e in eqs]


def cmd_equilibria(args) -> Result:
    cfg = _config(args)
    p = _params(cfg)
    eqs = equilibria(p)
    report = {"params": p.to_dict(), "case": classify_case(p), "equilibria": eqs, "thresholds": thresholds(p)}
    return Result(report, {"equilibria": Table(["kind", "X", "Y", "trace", "det", "linear_class"], _eq_rows(eqs))})


_SCAN_HEADER = ["k", "k_exact", "branch", "X2", "Y2", "trace", "det", "stability", "mark"]


def _scan_point(args):
    m, n, eps, k = args
    rows = []
    for e in equilibria(Params(m, n, eps, k)):
        if e.kind == "E1":
            continue
        rows.append([k, str(k) if isinstance(k, Fraction) else "", e.kind, e.x, e.y, e.trace, e.det,
                     e.linear_class, ""])
    return rows


def scan_table(m, n, eps, k_min, k_max, N: int, jobs: int = 1) -> Table:
    """Positive-equilibrium branches over a ``k`` grid plus marked critical values."""
    table = Table(list(_SCAN_HEADER))
    if N <= 0 or k_max < k_min:
        return table
    ks = [k_min + (k_max - k_min) * Fraction(i, max(N - 1, 1)) if isinstance(k_min, Fraction)
          and isinstance(k_max, Fraction) else k_min + (k_max - k_min) * i / max(N - 1, 1) for i in range(N)]
    work = [(m, n, eps, k) for k in ks]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_scan_point, work, chunksize=max(1, N // (4 * jobs))))
    else:
        parts = [_scan_point(w) for w in work]
    for part in parts:
        table.rows.extend(part)
    p0 = Params(m, n, eps, ks[0])
    t = thresholds(p0)
    case = classify_case(p0)
    for k in [t.kSN * F101 if t.kSN else None, *ks]:
        if case.hopf_points or k is None:
            break
        case = classify_case(Params(m, n, eps, k))
    marks = [("kSN", t.kSN), ("kT", t.kT), ("kStar", t.kStar)]
    marks += [(f"kH{i + 1}", h) for i, h in enumerate(case.hopf_points)]
    for name, val in marks:
        if val is None or not float(k_min) <= float(val) <= float(k_max):
            continue
        kval = val
        try:
            pts = [e for e in equilibria(Params(m, n, eps, kval)) if e.kind != "E1"]
        except ModelError:
            pts = []
        if name.startswith("kH"):
            pts = [e for e in pts if e.kind == "E2minus"]
        if name == "kSN" and pts:
            pts = pts[:1]
        if not pts:
            table.rows.append([kval, str(kval), "mark", None, None, None, None, "", name])
        for e in pts:
            table.rows.append([kval, str(kval), "mark", e.x, e.y, e.trace, e.det, e.linear_class, name])
    return table


def cmd_scan(args) -> Result:
    cfg = _config(args)
    m, n, eps = _num(cfg, "m"), _num(cfg, "n"), _num(cfg, "eps")
    k_min, k_max = parse_number(args.k_min), parse_number(args.k_max)
    Params(m, n, eps, 1)  # validates
    table = scan_table(m, n, eps, k_min, k_max, args.N, args.jobs)
    marks = [r for r in table.rows if r[2] == "mark"]
    report = {"params": {"m": str(m), "n": str(n), "eps": str(eps)}, "k_range": [str(k_min), str(k_max)],
              "N": args.N, "rows": len(table.rows),
              "marks": [{"name": r[8], "k": r[1], "value": float(r[0])} for r in marks]}
    return Result(report, {"scan": table})


# ---------------------------------------------------------------------------
# hopf

def cmd_hopf(args) -> Result:
    cfg = _config(args)
    action = args.action
    if action == "analyze":
        m, n, eps = _num(cfg, "m"), _num(cfg, "n"), _num(cfg, "eps")
        report = {"classification": hopf.classify_hopf(m, n, eps)}
        if "k" in cfg:
            fv, R, rule = hopf.focus_values_at_params(_params(cfg), K=args.K)
            report["focus_values"] = {"R": R, "rule": rule, **fv.to_dict()}
        return Result(report)
    if action == "locus":
        m, n = _num(cfg, "m"), _num(cfg, "n")
        return Result({"codim2": hopf.codim2_locus(m, n)})
    if action == "resultant":
        return Result({"resultant": hopf.resultant_check()})
    if action == "amplitudes":
        v = [parse_number(x) for x in (args.v0, args.v1, args.v2)]
        return Result({"radii": hopf.predict_amplitudes(*v)})
    # scan over R
    m, n = _num(cfg, "m"), _num(cfg, "n")
    lo, hi = R_window(m, n)
    hi = min(float(hi), float(R_bt(n)))
    R_min = float(parse_number(args.R_min)) if args.R_min else float(lo)
    R_max = float(parse_number(args.R_max)) if args.R_max else hi
    table = Table(["n", "R", "kH", "omega_c", "v1", "v2", "criticality"])
    N = args.N
    for i in range(N):
        R = R_min + (R_max - R_min) * (i + 0.5) / N
        try:
            fv = hopf.focus_values(float(m), float(n), R, K=2)
        except hopf.HopfError:
            continue
        crit = "degenerate" if abs(fv.v1) < hopf.V1_ZERO_TOL else ("supercritical" if fv.v1 < 0 else "subcritical")
        table.rows.append([n, R, kH_of_R(float(m), float(n), R), fv.omega_c, fv.v1, fv.v2, crit])
    return Result({"m": str(m), "n": str(n), "rows": len(table.rows)}, {"hopf_scan": table})


# ---------------------------------------------------------------------------
# bt / melnikov

def cmd_bt(args) -> Result:
    cfg = _config(args)
    m, n = _num(cfg, "m"), _num(cfg, "n")
    point = bt.bt_point(m, n)
    closed = bt.snf_coeffs_closed(m, n)
    solved = bt.snf_coeffs_homological(bt.nilpotent_system(m, n))
    rel = {}
    for key in ("c20", "c11", "c31"):
        a, b = float(getattr(closed, key)), getattr(solved, key)
        rel[key] = abs(a - b) / max(abs(a), 1e-300) if a != 0 else abs(b)
    report = {"bt_point": point, "snf_closed": closed, "snf_solver": solved, "snf_rel_diff": rel}
    if point.codim == 3:
        report["codim3_parameter_map_reference_det"] = bt.reference_codim3_det(m)
    return Result(report)


def _atlas_table(atlas) -> Table:
    t = Table(["kind", "space", "coord1", "coord2", "coord3", "tag"])
    for kind, pts in atlas.curves.items():
        for p in pts:
            t.rows.append([kind, "beta", *p, "curve"])
    for name, p in atlas.points.items():
        t.rows.append([name, "beta", *p, "point"])
    return t


def cmd_melnikov(args) -> Result:
    report: dict[str, Any] = {}
    tables = {}
    if args.sigma is not None:
        atlas = bt.sphere_atlas(float(parse_number(args.sigma)), args.samples)
        report["sphere_atlas"] = {"sigma": atlas.sigma, "points": atlas.points}
        tables["sphere_atlas"] = _atlas_table(atlas)
    if args.beta:
        b = [parse_number(x) for x in args.beta.split(",")]
        if len(b) != 3:
            raise InputError("--beta needs three comma-separated values")
        report["coefficients"] = bt.melnikov_coeffs(*b, eps=float(parse_number(args.scale)))
    if args.joint is not None:
        b1 = parse_number(args.joint)
        b3, P = bt.melnikov_joint_zero(b1)
        report["joint_zero"] = {"beta1": b1, "beta3": b3, "beta2_over_sqrt_minus_beta1": P,
                                "beta2": float(P) * math.sqrt(-float(b1))}
    if args.nubar is not None:
        s = bt.melnikov_integral_numeric(float(parse_number(args.nubar)), float(parse_number(args.nu2)),
                                         float(parse_number(args.nu3)))
        report["abelian_integral"] = s
        tables["abelian_integral"] = Table(["h", "M", "error"], [list(r) for r in zip(s.h, s.M, s.errors)])
    if not report:
        raise InputError("give at least one of --sigma, --beta, --joint, --nubar")
    return Result(report, tables)


# ---------------------------------------------------------------------------
# simulate

def cmd_simulate(args) -> Result:
    cfg = _config(args)
    p = _params(cfg)
    report: dict[str, Any] = {"params": p.to_dict()}
    tables = {}
    if args.x0:
        x0 = [float(parse_number(v)) for v in args.x0]
        tr = dynamics.integrate(p, x0, (0.0, float(args.t_end)), tol=args.tol, n_samples=args.samples)
        report["trajectory"] = tr
        tables["trajectory"] = Table(["t", "X", "Y"], tr.csv_rows())
    if args.vary:
        fixed = p

        def family(x, key=args.vary):
            return fixed.replace(**{key: x})

        lo, hi = (float(parse_number(v)) for v in args.bracket)
        report["homoclinic"] = dynamics.find_homoclinic(family, (lo, hi), tol=args.tol)
    if not args.no_portrait:
        rep = dynamics.classify_portrait(p, tol=args.tol)
        report["portrait"] = rep
        tables["cycles"] = Table(["amplitude", "period", "stability", "multiplier", "X", "Y"],
                                 [[c.amplitude, c.period, c.stability, c.multiplier, *c.section_point]
                                  for c in rep.cycles])
    return Result(report, tables)


# ---------------------------------------------------------------------------
# verify-nf

SNF_GRID_M = (1, 2, 5)
SNF_GRID_N = tuple(Fraction(i, 10) for i in range(1, 10))


def snf_grid_check(ms=SNF_GRID_M, ns=SNF_GRID_N, rtol: float = 1e-10) -> dict:
    """Homological solver against the closed forms on an ``(m, n)`` grid."""
    worst = 0.0
    rows = []
    for m in ms:
        for n in ns:
            c = bt.snf_coeffs_closed(m, n)
            s = bt.snf_coeffs_homological(bt.nilpotent_system(m, n))
            for key in ("c20", "c11", "c31"):
                a, b = float(getattr(c, key)), getattr(s, key)
                scale = max(abs(a), abs(float(c.c20)) if key == "c11" else 0.0)
                err = abs(a - b) / scale
                worst = max(worst, err)
                rows.append([m, n, key, a, b, err])
    return {"max_rel_error": worst, "tolerance": rtol, "passed": worst <= rtol, "rows": rows}


def cmd_verify_nf(args) -> Result:
    cfg = _config(args)
    m = _num(cfg, "m", Fraction(2))
    ns = [parse_number(x) for x in args.n_values]
    report: dict[str, Any] = {"codim2": [], "codim3": None, "snf_grid": None}
    ok = True
    for n in ns:
        r = bt.verify_psnf_codim2(m, n)
        report["codim2"].append(r)
        ok &= r.passed
    c3 = bt.verify_psnf_codim3(m)
    report["codim3"] = c3
    ok &= c3.passed
    grid = snf_grid_check()
    rows = grid.pop("rows")
    report["snf_grid"] = grid
    ok &= grid["passed"]
    report["passed"] = ok
    tables = {"snf_grid": Table(["m", "n", "coefficient", "closed_form", "solver", "rel_error"], rows)}
    return Result(report, tables, status=EXIT_OK if ok else EXIT_FAIL)


# ---------------------------------------------------------------------------
# figures

_PLOT_TEMPLATE = '''"""Plot {title}; reads the CSV files next to this script (needs matplotlib)."""
import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
PANELS = {panels!r}

fig, axes = plt.subplots(1, len(PANELS), figsize=(6 * len(PANELS), 5), squeeze=False)
for ax, (fname, xcol, ycol, group, xlabel, ylabel) in zip(axes[0], PANELS):
    series = defaultdict(lambda: ([], []))
    with open(os.path.join(HERE, fname)) as fh:
        for row in csv.DictReader(fh):
            if row[xcol] == "" or row[ycol] == "":
                continue
            key = " ".join(row[g] for g in group)
            series[key][0].append(float(row[xcol]))
            series[key][1].append(float(row[ycol]))
    for key, (xs, ys) in sorted(series.items()):
        style = "o" if ("point" in key or "mark" in key or len(xs) < 3) else "-"
        ax.plot(xs, ys, style, ms=4, label=key)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(HERE, "{name}.png"), dpi=150)
'''


def _plot_script(name, title, panels) -> str:
    return _PLOT_TEMPLATE.format(title=title, panels=panels, name=name)


def _curve_table(objs, extra=()) -> Table:
    t = Table(["kind", "space", "coord1", "coord2", "tag"])
    for o in objs:
        for pt in o.samples:
            t.rows.append([o.kind, o.space, *pt[:2], o.tag])
    for row in extra:
        t.rows.append(list(row))
    return t


def _model_curves(m, n, eps_range, N=200) -> list:
    """SN and Hopf curves of the model in ``(k, eps)``."""
    rows = []
    e0, e1 = eps_range
    for i in range(N):
        e = e0 + (e1 - e0) * i / (N - 1)
        rows.append(["SN", "model", thresholds(Params(m, n, e, 1.0)).kSN, e, "saddle-node"])
    lo, hi = R_window(m, n)
    lo, hi = float(lo), float(R_bt(n))
    for i in range(1, N):
        R = lo + (hi - lo) * i / N
        try:
            kH, eH = kH_of_R(m, n, R), eps_of_R(m, n, R)
        except ModelError:
            continue
        if kH <= 0 or eH <= 0 or not e0 <= eH <= e1 or R >= 1 / (n + 1) + 1 / (m * kH):
            continue
        rows.append(["H", "model", kH, eH, "Hopf"])
    return rows


def _portrait_rows(points, m, n, tol):
    rows = []
    for k, e in points:
        rep = dynamics.classify_portrait(Params(m, n, e, k), tol=tol)
        rows.append(["point", "model", k, e, rep.label])
    return rows


def _hl_model_points(m, n, ks, tol, width=1e-5):
    rows = []
    for k in ks:
        # Hopf eps on this k as the search start
        start = None
        lo, hi = float(R_window(m, n)[0]), float(R_bt(n))
        for i in range(1, 400):
            R = lo + (hi - lo) * i / 400
            try:
                if abs(kH_of_R(m, n, R) - k) < 1e-3 * k:
                    start = eps_of_R(m, n, R)
                    break
            except ModelError:
                continue
        if start is None:
            continue
        res = dynamics.bracket_homoclinic(lambda e, k=k: Params(m, n, e, k), start, 0.005 * start, width=width, tol=tol)
        if res is not None:
            rows.append(["HL", "model", k, res.parameter, res.stability])
    return rows


def figure(fig: str, tol: float = dynamics.DEFAULT_TOL, jobs: int = 1) -> Result:
    """Data and plot script for one figure."""
    F = Fraction
    if fig == "1":
        t = scan_table(F(2), F(1, 3), F(5, 4), F(19, 100), F(23, 100), 400, jobs)
        return Result({"figure": 1, "marks": [[r[8], r[1]] for r in t.rows if r[2] == "mark"]}, {"scan": t},
                      {"plot_fig1.py": _plot_script("fig1", "branch diagram (k, Y2)",
                                                    [("scan.csv", "k", "Y2", ["branch", "stability"], "k", "Y2")])})
    if fig == "3":
        t = scan_table(F(2), F(5, 11), F(320, 99), F(19, 100), F(36, 100), 400, jobs)
        p = Params(2, F(5, 11), F(3407490109063040, 1096763591581219), F(203821518599, 924070050000))
        cyc = dynamics.find_limit_cycles(p, tol=tol)
        pred = hopf.predict_amplitudes(F(4299, 220000000), F(-216980684800000, 83938145042658897),
                                       F(14817759528898477514254458827898880000000,
                                         200973840260810036901676626005378422866729))
        fr = dynamics.jordan_frame(p)
        traj = Table(["cycle", "t", "X", "Y", "u", "v"])
        for i, c in enumerate(cyc):
            tr = dynamics.integrate(p, c.section_point, (0.0, c.period), tol=tol, n_samples=400)
            for tt, X, Y in tr.samples:
                u, v = fr.to_frame(X, Y)
                traj.rows.append([f"cycle{i + 1}-{c.stability}", tt, X, Y, u, v])
        report = {"figure": 3, "marks": [[r[8], r[1]] for r in t.rows if r[2] == "mark"],
                  "predicted_radii": pred, "cycles": cyc}
        return Result(report, {"scan": t, "cycles": traj},
                      {"plot_fig3.py": _plot_script("fig3", "branch diagram and two cycles",
                                                    [("scan.csv", "k", "Y2", ["branch", "stability"], "k", "Y2"),
                                                     ("cycles.csv", "u", "v", ["cycle"], "u", "v")])})
    if fig == "4":
        t = Table(["n", "kind", "coord1", "coord2", "tag"])
        for n in (F(2, 5), F(3, 4)):
            for o in bt.codim2_curves(2, n):
                if o.space == "beta":
                    t.rows.extend([[str(n), o.kind, *pt, o.tag] for pt in o.samples])
        return Result({"figure": 4}, {"curves": t},
                      {"plot_fig4.py": _plot_script("fig4", "codim-2 unfolding in beta",
                                                    [("curves.csv", "coord1", "coord2", ["n", "kind"], "b1", "b2")])})
    if fig in ("5", "7"):
        n = F(2, 5) if fig == "5" else F(3, 4)
        objs = bt.codim2_curves(2, n, beta2_max=0.05 if fig == "5" else 0.02, samples=60)
        if fig == "5":
            pts = [((90 - 11 * e) / 300, e) for e in (1.55, 1.60, 1.676171875, 1.80)]
            e_rng = (1.4, 2.0)
        else:
            pts = [(k, 8.0) for k in (0.2336, 0.23395, 0.23426542, 0.2345)]
            e_rng = (5.0, 12.0)
        rows = _model_curves(2.0, float(n), e_rng) + _portrait_rows(pts, 2, n, tol)
        t = _curve_table([o for o in objs if o.space in ("beta", "model")], rows)
        report = {"figure": int(fig), "points": [[r[2], r[3], r[4]] for r in rows if r[0] == "point"]}
        if fig == "5":
            b1 = -0.0015
            c = n ** 4 / (1 - 2 * n) ** 2
            report["line_b1"] = {"b1": b1, "H_b2": -math.sqrt(-b1 / float(c)),
                                 "HL_b2": -math.sqrt(-b1 / (49 / 25 * float(c)))}
        return Result(report, {"curves": t},
                      {f"plot_fig{fig}.py": _plot_script(f"fig{fig}", "codim-2 curves",
                                                         [("curves.csv", "coord1", "coord2", ["space", "kind"],
                                                           "b1 / k", "b2 / eps")])})
    if fig == "9":
        atlas = bt.sphere_atlas(0.05, 120)
        return Result({"figure": 9, "points": atlas.points}, {"sphere_atlas": _atlas_table(atlas)},
                      {"plot_fig9.py": _plot_script("fig9", "sphere atlas",
                                                    [("sphere_atlas.csv", "coord2", "coord3", ["kind"], "b2", "b3")])})
    if fig == "10":
        n = F(5, 12)
        rows = _model_curves(2.0, float(n), (1.6, 5.0))
        rows += _hl_model_points(2.0, float(n), [0.17, 0.19, 0.2, 0.22, 0.2439], tol)
        pts = [(0.2439, 2.2), (0.2439, 1.95), (0.2439, 1.871268), (0.2, 3.13), (0.16202, 4.2), (0.16202, 4.44),
               (0.16202, 4.485125), (0.16202, 4.6)]
        rows += _portrait_rows(pts, 2, n, tol)
        t = _curve_table([], rows)
        return Result({"figure": 10, "points": [[r[2], r[3], r[4]] for r in rows if r[0] == "point"],
                       "HL": [[r[2], r[3], r[4]] for r in rows if r[0] == "HL"]}, {"curves": t},
                      {"plot_fig10.py": _plot_script("fig10", "codim-3 neighbourhood in (k, eps)",
                                                     [("curves.csv", "coord1", "coord2", ["kind"], "k", "eps")])})
    raise InputError(f"unknown figure {fig!r}; choose from {', '.join(FIGURES)}")


def cmd_reproduce(args) -> Result:
    return figure(args.figure, args.tol, args.jobs)


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bifurc", description="Hopf and Bogdanov-Takens analysis of the SI model.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("equilibria", help="equilibria, thresholds and stability case")
    _add_params(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_equilibria)

    sp = sub.add_parser("scan", help="branch diagram over a k range (CSV)")
    _add_params(sp, ("m", "n", "eps"))
    _add_common(sp)
    sp.add_argument("--k-min", required=True)
    sp.add_argument("--k-max", required=True)
    sp.add_argument("--N", type=int, default=200)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("hopf", help="Hopf criticality, focus values, codim-2 locus")
    sp.add_argument("action", choices=("analyze", "scan", "locus", "resultant", "amplitudes"))
    _add_params(sp)
    _add_common(sp)
    sp.add_argument("--K", type=int, default=3)
    sp.add_argument("--R-min")
    sp.add_argument("--R-max")
    sp.add_argument("--N", type=int, default=50)
    sp.add_argument("--v0")
    sp.add_argument("--v1")
    sp.add_argument("--v2")
    sp.set_defaults(func=cmd_hopf)

    sp = sub.add_parser("bt", help="double-zero point and simplest normal form")
    _add_params(sp, ("m", "n"))
    _add_common(sp)
    sp.set_defaults(func=cmd_bt)

    sp = sub.add_parser("melnikov", help="Melnikov coefficients and sphere atlas")
    _add_common(sp)
    sp.add_argument("--sigma")
    sp.add_argument("--samples", type=int, default=60)
    sp.add_argument("--beta", metavar="B1,B2,B3", help="comma-separated, e.g. --beta=-1/100,0.001,0.02")
    sp.add_argument("--scale", default="1", help="scaling parameter of the coefficients")
    sp.add_argument("--joint", help="beta1 at which to solve C0 = C1 = 0")
    sp.add_argument("--nubar")
    sp.add_argument("--nu2", default="0")
    sp.add_argument("--nu3", default="0")
    sp.set_defaults(func=cmd_melnikov)

    sp = sub.add_parser("simulate", help="trajectories, cycles, homoclinic loops, portrait label")
    _add_params(sp)
    _add_common(sp)
    sp.add_argument("--x0", nargs=2, metavar=("X", "Y"))
    sp.add_argument("--t-end", default="200")
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--vary", choices=("eps", "k"))
    sp.add_argument("--bracket", nargs=2, metavar=("LO", "HI"))
    sp.add_argument("--no-portrait", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify-nf", help="verify both parametric normal forms and the SNF solver")
    _add_params(sp, ("m",))
    _add_common(sp)
    sp.add_argument("--n-values", nargs="+", default=["2/5", "3/4"])
    sp.set_defaults(func=cmd_verify_nf)

    sp = sub.add_parser("reproduce-figure", help="data files and plot script for a figure")
    sp.add_argument("figure", choices=FIGURES)
    _add_common(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_reproduce)
    return ap


def _emit(args, argv, cfg, res: Result, t0: float) -> None:
    out_dir = getattr(args, "out", None)
    files = {}
    for name, table in res.tables.items():
        files[f"{name}.csv"] = table.text()
    files.update(res.scripts)
    report_text = dumps(res.report) + "\n"
    files["report.json"] = report_text
    outputs = [{"name": k, **_digest(v)} for k, v in sorted(files.items())]
    manifest = RunManifest(list(argv), cfg, __version__, outputs, round(time.time() - t0, 6), res.status)
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (d / name).write_text(text)
        (d / "manifest.json").write_text(dumps(manifest) + "\n")
        print(dumps({"out": str(d), "status": res.status, "outputs": outputs}))
        return
    if args.format == "csv":
        if res.tables:
            sys.stdout.write(next(iter(res.tables.values())).text())
        else:
            flat = Table(["key", "value"], [[k, json.dumps(_jsonable(v))] for k, v in res.report.items()])
            sys.stdout.write(flat.text())
        return
    payload = dict(res.report)
    payload["manifest"] = manifest
    sys.stdout.write(dumps(payload) + "\n")


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.time()
    try:
        default_float_mode()
        tol = getattr(args, "tol", None)
        if tol is not None and not 1e-13 <= tol <= 1e-3:
            raise InputError(f"--tol must lie in [1e-13, 1e-3], got {tol}")
        cfg = _config(args) if hasattr(args, "config") else {}
        res = args.func(args)
    except (InputError, ModelError, JetError, hopf.HopfError, bt.BTError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except dynamics.DynamicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT if exc.code == "bad-tolerance" else EXIT_FAIL
    _emit(args, argv, cfg, res, t0)
    return res.status


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
