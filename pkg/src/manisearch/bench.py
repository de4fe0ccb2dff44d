"""Run aggregation: convergence test, result tables, data/performance profiles.

A run on problem p is declared solved at accuracy tau once its best
objective value passes ``f <= f_L + tau * (f0 - f_L)`` where f_L is the
best value achieved by any solver on that problem instance; ``t_ps`` is
the number of evaluations needed to get there.  Profiles summarise a
table of such results:

    performance profile  rho_s(a) = fraction of problems solved within
                         a times the best solver's evaluation count
    data profile         d_s(kappa) = fraction of problems solved within
                         kappa * (n_p + 1) evaluations

Problems unsolved by a solver never enter its counts but always count in
the denominator.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import EmptyInput, InvalidBaseline

CSV_HEADER = ("problem", "n_p", "seed", "solver", "tau",
              "t_ps", "f0", "f_best", "evals_used")

SIZE_BUCKETS = {"small": (2, 15), "medium": (16, 50), "large": (51, 200)}


def converged(f_k: float, f0: float, f_l: float, tau: float) -> bool:
    """Relative-accuracy stopping test ``f_k <= f_L + tau (f0 - f_L)``."""
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    if f_l > f0:
        raise InvalidBaseline(f"f_L ({f_l}) exceeds f0 ({f0})")
    return f_k <= f_l + tau * (f0 - f_l)


def evals_to_converge(trace, f0: float, f_l: float, tau: float) -> Optional[int]:
    """Smallest evaluation index whose best value passes the test, else None.

    ``trace`` is a RunTrace or a raw list of (eval_index, best_f) pairs.
    """
    history = getattr(trace, "history", trace)
    if not history:
        raise EmptyInput("empty trace")
    for idx, best in history:
        if converged(best, f0, f_l, tau):
            return int(idx)
    return None


@dataclass(frozen=True)
class ResultRow:
    problem: str
    n_p: int
    seed: int
    solver: str
    tau: float
    t_ps: Optional[int]  # None when unsolved
    f0: float
    f_best: float
    evals_used: int

    def key(self):
        return (self.problem, self.n_p, self.seed)


@dataclass
class ResultTable:
    """Rows of per-(instance, solver, tau) outcomes."""

    rows: list

    def solvers(self):
        return sorted({r.solver for r in self.rows})

    def taus(self):
        return sorted({r.tau for r in self.rows})

    def filter(self, tau=None, bucket=None) -> "ResultTable":
        rows = self.rows
        if tau is not None:
            rows = [r for r in rows if r.tau == tau]
        if bucket is not None and bucket != "all":
            lo, hi = SIZE_BUCKETS[bucket]
            rows = [r for r in rows if lo <= r.n_p <= hi]
        return ResultTable(list(rows))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([
                r.problem, r.n_p, r.seed, r.solver, repr(r.tau),
                "" if r.t_ps is None else r.t_ps,
                repr(r.f0), repr(r.f_best), r.evals_used,
            ])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise EmptyInput(f"bad or missing header, expected {','.join(CSV_HEADER)}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            rows.append(ResultRow(
                problem=rec[0], n_p=int(rec[1]), seed=int(rec[2]), solver=rec[3],
                tau=float(rec[4]), t_ps=None if rec[5] == "" else int(rec[5]),
                f0=float(rec[6]), f_best=float(rec[7]), evals_used=int(rec[8]),
            ))
        return cls(rows)


def assemble_results(records, taus) -> ResultTable:
    """Build a table from raw run records, sharing f_L across solvers.

    ``records`` is an iterable of dicts with keys problem, n_p, seed,
    solver, history, f0, evals_used.  For each (problem, n_p, seed) the
    baseline f_L is the smallest best value any solver reached.
    """
    records = list(records)
    if not records:
        raise EmptyInput("no run records")
    f_l = {}
    for rec in records:
        key = (rec["problem"], rec["n_p"], rec["seed"])
        best = rec["history"][-1][1]
        f_l[key] = min(f_l.get(key, best), best)
    rows = []
    for rec in records:
        key = (rec["problem"], rec["n_p"], rec["seed"])
        for tau in taus:
            rows.append(ResultRow(
                problem=rec["problem"], n_p=rec["n_p"], seed=rec["seed"],
                solver=rec["solver"], tau=tau,
                t_ps=evals_to_converge(rec["history"], rec["f0"], f_l[key], tau),
                f0=rec["f0"], f_best=rec["history"][-1][1],
                evals_used=rec["evals_used"],
            ))
    return ResultTable(rows)


@dataclass(frozen=True)
class ProfileCurve:
    """Right-continuous step curve for one solver.

    ``points`` pairs a strictly increasing abscissa with non-decreasing
    values in [0, 1]; the curve value at a query is the value of the
    largest breakpoint not exceeding it (0 before the first).
    """

    solver: str
    kind: str
    tau: float
    points: tuple

    def value_at(self, a: float) -> float:
        val = 0.0
        for x, y in self.points:
            if x <= a:
                val = y
            else:
                break
        return val


def _collect(table: ResultTable, tau: float):
    rows = [r for r in table.rows if r.tau == tau]
    if not rows:
        raise EmptyInput(f"no rows at tau={tau}")
    keys = sorted({r.key() for r in rows})
    solvers = sorted({r.solver for r in rows})
    t = {(r.key(), r.solver): r.t_ps for r in rows}
    return rows, keys, solvers, t


def _float_points(breakpoints, achieved, n_problems):
    """Exact rational counts rendered as float points.

    Two exact breakpoints that round to the same float merge into one
    point keeping the later (larger) count.
    """
    pts = []
    for a in breakpoints:
        value = sum(1 for r in achieved if r <= a) / n_problems
        fa = float(a)
        if pts and pts[-1][0] == fa:
            pts[-1] = (fa, max(pts[-1][1], value))
        else:
            pts.append((fa, value))
    return tuple(pts)


def performance_profile(table: ResultTable, tau: float) -> list:
    """Per-solver fractions of problems solved within a ratio of the best.

    The ratio base for a problem is the smallest t over solvers that
    solved it; problems no solver solved still count in the denominator.
    Curves are evaluated on the sorted set of achieved ratios plus 1,
    with the ratio comparisons done in exact rational arithmetic.
    """
    rows, keys, solvers, t = _collect(table, tau)
    n_problems = len(keys)
    ratios = {s: [] for s in solvers}
    for key in keys:
        solved = [t[(key, s)] for s in solvers
                  if (key, s) in t and t[(key, s)] is not None]
        if not solved:
            continue
        best = min(solved)
        for s in solvers:
            tps = t.get((key, s))
            if tps is not None:
                ratios[s].append(Fraction(tps, best))
    breakpoints = sorted({Fraction(1)} | {r for rs in ratios.values() for r in rs})
    return [
        ProfileCurve(solver=s, kind="performance", tau=tau,
                     points=_float_points(breakpoints, ratios[s], n_problems))
        for s in solvers
    ]


def data_profile(table: ResultTable, tau: float,
                 kappa_max: Optional[float] = None) -> list:
    """Per-solver fractions solved within kappa * (n_p + 1) evaluations.

    Curves are evaluated at 0, every achieved kappa, and ``kappa_max``
    when given (with the standard budget, the value at multiplier 100 is
    the fraction solved at all); comparisons are exact.
    """
    rows, keys, solvers, t = _collect(table, tau)
    n_problems = len(keys)
    dims = {r.key(): r.n_p for r in rows}
    kappas = {s: [] for s in solvers}
    for key in keys:
        for s in solvers:
            tps = t.get((key, s))
            if tps is not None:
                kappas[s].append(Fraction(tps, dims[key] + 1))
    breakpoints = {Fraction(0)} | {k for ks in kappas.values() for k in ks}
    if kappa_max is not None:
        breakpoints.add(Fraction(kappa_max))
    breakpoints = sorted(breakpoints)
    return [
        ProfileCurve(solver=s, kind="data", tau=tau,
                     points=_float_points(breakpoints, kappas[s], n_problems))
        for s in solvers
    ]


def profile_curve_csv(curve: ProfileCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("solver", "kind", "tau", "abscissa", "value"))
    for a, v in curve.points:
        w.writerow((curve.solver, curve.kind, repr(curve.tau), repr(a), repr(v)))
    return buf.getvalue()
