"""Parameter sweeps, rate fits and CSV output for the command-line harness.

Every experiment produces a list of :class:`SweepRecord` rows with a fixed,
versioned column set, and a summary of verdicts computed from those rows
(plus the config) only.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from .asymptotics import ExpansionProblem
from .bvp import make_h, neumann_integral, solve_background, solve_with_inclusion
from .config import ExperimentConfig
from .emt import compute_emt, rotate_tensor
from .freespace import density_norm, energy_J, solve_limit, solve_transmission
from .geometry import BoundaryGrid, min_distance
from .material import ContrastPair, InadmissibleContrastWarning, LameParams

SCHEMA = "lametrans-csv/1"

COLUMNS = {
    "mu_sweep": ("mu", "lambda", "r", "r_scaled", "energy", "cond", "admissible", "status"),
    "soft_sweep": ("s", "r", "r_scaled", "energy", "cond", "admissible", "status"),
    "epsilon_sweep": ("epsilon", "error", "error_leading", "C", "status"),
    "uniformity_sweep": ("index", "lambda", "mu", "epsilon", "error", "C", "admissible", "status"),
    "emt": ("a1", "a2", "b1", "b2", "j", "p", "value", "status"),
    "bvp_check": ("mu", "two_route", "energy", "h_sup", "trace_diff", "trace_scaled", "status"),
}

# verdict thresholds
RATIO_BOUND = 1.5
ENERGY_RATIO = 10.0
SLOPE_MIN = 3.5
UNIFORMITY_RATIO = 20.0
H_RATIO = 3.0
TWO_ROUTE_TOL = 1e-6
SYMMETRY_TOL = 1e-8


@dataclass
class SweepRecord:
    values: dict
    status: str = "ok"

    def __getitem__(self, key):
        return self.status if key == "status" else self.values[key]

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class Verdict:
    name: str
    value: float
    threshold: float
    passed: bool

    def line(self) -> str:
        return f"{self.name}: {self.value:.6g} (threshold {self.threshold:g}) {'PASS' if self.passed else 'FAIL'}"


@dataclass
class ExperimentResult:
    kind: str
    records: list
    verdicts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts) and all(r.ok for r in self.records)

    def summary(self) -> str:
        lines = [f"{self.kind}: {len(self.records)} rows"]
        lines += ["  " + v.line() for v in self.verdicts]
        bad = [r for r in self.records if not r.ok]
        if bad:
            lines.append(f"  {len(bad)} row(s) failed: " + "; ".join(r.status for r in bad))
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)

    def to_csv(self) -> str:
        return format_csv(self.kind, self.records)


def fit_rate(records, x: str, y: str):
    """Least-squares line through ``(log x, log y)``; returns ``(slope, intercept)``."""
    rows = [r for r in records if getattr(r, "ok", True)]
    if len(rows) < 3:
        raise ValueError(f"need at least 3 records to fit a rate, got {len(rows)}")
    xs = np.array([float(r[x]) for r in rows])
    ys = np.array([float(r[y]) for r in rows])
    if np.any(xs <= 0) or np.any(ys <= 0) or not np.all(np.isfinite(xs * ys)):
        raise ValueError("rate fits need positive finite values")
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(intercept)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def format_csv(kind: str, records) -> str:
    cols = COLUMNS[kind]
    buf = io.StringIO()
    buf.write(f"# {SCHEMA} kind={kind}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([_fmt(r.status if c == "status" else r.values.get(c, math.nan)) for c in cols])
    return buf.getvalue()


def read_csv(text: str):
    """Parse CSV written by :func:`format_csv`; returns ``(kind, records)``."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(f"# {SCHEMA}"):
        raise ValueError("not a lametrans CSV file (missing schema header)")
    kind = lines[0].split("kind=", 1)[1].strip()
    rd = csv.reader(lines[1:])
    cols = next(rd)
    recs = []
    for row in rd:
        vals = {}
        status = "ok"
        for c, v in zip(cols, row):
            if c == "status":
                status = v
            else:
                try:
                    vals[c] = float(v)
                except ValueError:
                    vals[c] = v
        recs.append(SweepRecord(vals, status))
    return kind, recs


def _run_rows(cfg, keys, fn):
    """Evaluate ``fn(key)`` for every key; failures become error rows."""

    def safe(key):
        try:
            return SweepRecord(fn(key))
        except Exception as err:  # recorded per row, the sweep continues
            return SweepRecord({}, f"error: {type(err).__name__}: {err}")

    # the warning filter is process-wide, so it is set once around all
    # workers; rows report admissibility themselves.  BLAS is pinned to one
    # thread so a row's last digits do not depend on the worker count.
    with warnings.catch_warnings(), threadpool_limits(limits=1, user_api="blas"):
        warnings.simplefilter("ignore", InadmissibleContrastWarning)
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
                return list(ex.map(safe, keys))
        return [safe(k) for k in keys]


def _estimate(cond):
    # LAPACK's estimate varies in its last bits with buffer alignment;
    # six digits keep the CSV reproducible
    return float(f"{cond:.6e}")


def _grids(cfg):
    return [BoundaryGrid(c, cfg.n) for c in cfg.inclusions]


def _ok_values(records, key):
    return np.array([r[key] for r in records if r.ok], dtype=float)


def mu_sweep(cfg: ExperimentConfig) -> ExperimentResult:
    p0, h, grids = cfg.background, cfg.data_field, _grids(cfg)
    lam = cfg.lam[0]
    hard = solve_limit(p0, grids, h, "hard")

    def row(mu):
        pair = ContrastPair(p0, LameParams(lam, mu))
        sol = solve_transmission(pair, grids, h)
        r = density_norm(sol, hard)
        return {"mu": mu, "lambda": lam, "r": r, "r_scaled": r * math.sqrt(mu),
                "energy": energy_J(sol), "cond": _estimate(sol.cond), "admissible": int(pair.admissible)}

    recs = _run_rows(cfg, sorted(cfg.mu), row)
    return ExperimentResult("mu_sweep", recs, summarize("mu_sweep", recs))


def soft_sweep(cfg: ExperimentConfig) -> ExperimentResult:
    p0, h, grids = cfg.background, cfg.data_field, _grids(cfg)
    soft = solve_limit(p0, grids, h, "soft")

    def row(s):
        pair = ContrastPair(p0, LameParams.from_kappa_mu(s, s))
        sol = solve_transmission(pair, grids, h)
        r = density_norm(sol, soft)
        return {"s": s, "r": r, "r_scaled": r * (2 * s) ** -0.25,
                "energy": energy_J(sol), "cond": _estimate(sol.cond), "admissible": int(pair.admissible)}

    recs = _run_rows(cfg, sorted(cfg.soft, reverse=True), row)
    return ExperimentResult("soft_sweep", recs, summarize("soft_sweep", recs))


def _omega_data(cfg):
    omega = BoundaryGrid(cfg.omega, cfg.n_omega)
    g = cfg.data_field.traction(cfg.background, omega)
    return omega, g


def epsilon_sweep(cfg: ExperimentConfig) -> ExperimentResult:
    omega, g = _omega_data(cfg)
    pair = ContrastPair(cfg.background, LameParams(cfg.lam[0], cfg.mu[0]))
    prob = ExpansionProblem(pair, omega, cfg.reference, cfg.z0, g, n_inclusion=cfg.n)

    def row(eps):
        err = prob.error(eps)
        return {"epsilon": eps, "error": err, "error_leading": prob.error(eps, ((1, 1),)),
                "C": err / eps**4}

    recs = _run_rows(cfg, sorted(cfg.epsilon, reverse=True), row)
    return ExperimentResult("epsilon_sweep", recs, summarize("epsilon_sweep", recs))


def uniformity_sweep(cfg: ExperimentConfig) -> ExperimentResult:
    omega, g = _omega_data(cfg)
    eps = cfg.epsilon[0]
    pairs = [LameParams(cfg.lam[0], m) for m in cfg.mu]
    pairs += [LameParams.from_kappa_mu(s, s) for s in cfg.soft]

    def row(i):
        p1 = pairs[i]
        pair = ContrastPair(cfg.background, p1)
        prob = ExpansionProblem(pair, omega, cfg.reference, cfg.z0, g, n_inclusion=cfg.n)
        err = prob.error(eps)
        return {"index": i, "lambda": p1.lam, "mu": p1.mu, "epsilon": eps, "error": err,
                "C": err / eps**4, "admissible": int(pair.admissible)}

    recs = _run_rows(cfg, list(range(len(pairs))), row)
    return ExperimentResult("uniformity_sweep", recs, summarize("uniformity_sweep", recs))


def emt_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    pair = ContrastPair(cfg.background, LameParams(cfg.lam[0], cfg.mu[0]))
    grid = BoundaryGrid(cfg.inclusions[0], cfg.n)
    try:
        table = compute_emt(pair, grid)
        recs = [
            SweepRecord({"a1": a[0], "a2": a[1], "b1": b[0], "b2": b[1], "j": j, "p": p, "value": v})
            for a, b, j, p, v in table.records()
        ]
    except Exception as err:
        recs = [SweepRecord({}, f"error: {type(err).__name__}: {err}")]
    isotropic = cfg.inclusions[0].kind == "circle"
    return ExperimentResult("emt", recs, summarize("emt", recs, isotropic=isotropic))


def _interior_test_points(omega: BoundaryGrid, grids, seed: int, count: int = 20):
    rng = np.random.default_rng(seed)
    lo, hi = omega.points.min(axis=0), omega.points.max(axis=0)
    margin = 0.1 * float(np.max(hi - lo))
    pts = []
    while len(pts) < count:
        cand = rng.uniform(lo, hi, size=(64, 2))
        ok = omega.curve.contains(cand) & (min_distance(cand, omega) > margin)
        for gr in grids:
            ok &= ~gr.curve.contains(cand) & (min_distance(cand, gr) > margin)
        pts.extend(cand[ok])
    return np.array(pts[:count])


def bvp_check(cfg: ExperimentConfig) -> ExperimentResult:
    p0 = cfg.background
    omega, g = _omega_data(cfg)
    grids = _grids(cfg)
    U = solve_background(p0, omega, g)
    U_trace = U.boundary_trace()
    hard = solve_with_inclusion(p0, omega, grids, g, mode="hard")
    hard_trace = hard.boundary_trace()
    test_pts = _interior_test_points(omega, grids, cfg.seed)

    def row(mu):
        sol = solve_with_inclusion(ContrastPair(p0, LameParams(cfg.lam[0], mu)), omega, grids, g)
        u = sol.boundary_trace()
        alt = U_trace - sum(neumann_integral(p0, omega, gr, f) for gr, f in zip(grids, sol.phi))
        diff = float(np.max(np.abs(u - hard_trace)))
        return {
            "mu": mu,
            "two_route": float(np.max(np.abs(u - alt)) / np.max(np.abs(u))),
            "energy": sol.energy(),
            "h_sup": float(np.max(np.abs(make_h(sol).value(test_pts)))),
            "trace_diff": diff,
            "trace_scaled": diff * math.sqrt(mu),
        }

    recs = _run_rows(cfg, sorted(cfg.mu), row)
    return ExperimentResult("bvp_check", recs, summarize("bvp_check", recs))


def _bounded_by_first(vals):
    return float(np.max(vals) / vals[0]) if len(vals) else math.nan


def summarize(kind: str, records, isotropic: bool = False) -> list:
    """Verdicts recomputed from the emitted rows."""
    ok = [r for r in records if r.ok]
    out = []
    if kind in ("mu_sweep", "soft_sweep"):
        r = _ok_values(ok, "r")
        rs = _ok_values(ok, "r_scaled")
        J = _ok_values(ok, "energy")
        dec = float(np.max(np.diff(r) / r[:-1])) if len(r) > 1 else math.nan
        out.append(Verdict("r strictly decreasing (max relative step)", dec, 0.0, bool(dec < 0)))
        ratio = _bounded_by_first(rs)
        out.append(Verdict("scaled r / first value", ratio, RATIO_BOUND, bool(ratio <= RATIO_BOUND)))
        er = float(J.max() / J.min()) if len(J) and J.min() > 0 else math.inf
        out.append(Verdict("energy max/min", er, ENERGY_RATIO, bool(er <= ENERGY_RATIO)))
    elif kind == "epsilon_sweep":
        slope, _ = fit_rate(ok, "epsilon", "error") if len(ok) >= 3 else (math.nan, None)
        out.append(Verdict("error slope", slope, SLOPE_MIN, bool(slope >= SLOPE_MIN)))
    elif kind == "uniformity_sweep":
        C = _ok_values(ok, "C")
        ratio = float(C.max() / C.min()) if len(C) and C.min() > 0 else math.inf
        out.append(Verdict("C max/min", ratio, UNIFORMITY_RATIO, bool(ratio <= UNIFORMITY_RATIO)))
    elif kind == "emt":
        if ok:
            m = np.zeros((2, 2, 2, 2))
            for r in ok:
                a = (int(r["a1"]), int(r["a2"]))
                b = (int(r["b1"]), int(r["b2"]))
                if sum(a) == 1 and sum(b) == 1:
                    m[a.index(1), int(r["j"]), int(r["p"]), b.index(1)] = r["value"]
            scale = max(float(np.max(np.abs(m))), 1e-300)
            sym = float(np.max(np.abs(m - m.transpose(2, 3, 0, 1)))) / scale
            out.append(Verdict("major symmetry (relative)", sym, SYMMETRY_TOL, bool(sym <= SYMMETRY_TOL)))
            if isotropic:
                rot = float(np.max(np.abs(rotate_tensor(m, np.pi / 2) - m))) / scale
                out.append(Verdict("90-degree rotation invariance (relative)", rot, SYMMETRY_TOL,
                                   bool(rot <= SYMMETRY_TOL)))
    elif kind == "bvp_check":
        tr = _ok_values(ok, "two_route")
        worst = float(tr.max()) if len(tr) else math.inf
        out.append(Verdict("two-route trace agreement (max relative)", worst, TWO_ROUTE_TOL,
                           bool(worst <= TWO_ROUTE_TOL)))
        J = _ok_values(ok, "energy")
        er = float(J.max() / J.min()) if len(J) and J.min() > 0 else math.inf
        out.append(Verdict("energy max/min", er, ENERGY_RATIO, bool(er <= ENERGY_RATIO)))
        hs = _ok_values(ok, "h_sup")
        hr = float(hs.max() / hs.min()) if len(hs) and hs.min() > 0 else math.inf
        out.append(Verdict("h sup max/min", hr, H_RATIO, bool(hr <= H_RATIO)))
        ts = _ok_values(ok, "trace_scaled")
        ratio = _bounded_by_first(ts)
        out.append(Verdict("scaled trace difference / first value", ratio, RATIO_BOUND,
                           bool(ratio <= RATIO_BOUND)))
    return out


RUNNERS = {
    "mu_sweep": mu_sweep,
    "soft_sweep": soft_sweep,
    "epsilon_sweep": epsilon_sweep,
    "uniformity_sweep": uniformity_sweep,
    "emt": emt_experiment,
    "bvp_check": bvp_check,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.kind](cfg)


def emt_text(cfg: ExperimentConfig) -> str:
    """EMT table export for the configured pair and first inclusion curve."""
    pair = ContrastPair(cfg.background, LameParams(cfg.lam[0], cfg.mu[0]))
    return compute_emt(pair, BoundaryGrid(cfg.inclusions[0], cfg.n)).export()


__all__ = [
    "SweepRecord",
    "Verdict",
    "ExperimentResult",
    "fit_rate",
    "format_csv",
    "read_csv",
    "run_experiment",
    "summarize",
]
