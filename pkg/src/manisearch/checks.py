"""Desk-scale invariant suites behind the ``check`` CLI subcommand.

Each suite exercises one module's contracts on seeded inputs and reports
pass/fail with the measured margin, so a release can be gated on
``manisearch check``.  The manifold list is injectable to keep the
suites testable against deliberately broken geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .directions import DenseDirectionStream, dense_direction, measure_tau, spanning_basis
from .manifolds import (
    Euclidean,
    FixedRank,
    PositiveSimplex,
    Product,
    SpecialOrthogonal,
    Sphere,
    Stiefel,
    SymmetricPositiveDefinite,
    product_spheres,
    random_tangent,
)
from .problems import ProblemInstance
from .solvers import SolverConfig, run_rds_dd, run_rds_sb, run_rdse_sb


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail}"


def default_manifolds():
    return [
        Sphere(8),
        product_spheres([4, 5]),
        Stiefel(7, 3),
        SpecialOrthogonal(3),
        FixedRank(6, 5, 2),
        SymmetricPositiveDefinite(4),
        PositiveSimplex(3),
        Euclidean((3, 2)),
        Product([Sphere(3), Stiefel(4, 2)]),
    ]


def _sample_point(m, rng):
    # retraction bounds degrade toward the simplex boundary, so the
    # geometry suite samples weights from a compact interior subset
    if isinstance(m, PositiveSimplex):
        while True:
            p = m.random_point(rng)
            if np.min(p.value) >= 0.5 / m.k:
                return p
    return m.random_point(rng)


def geometry_checks(manifolds=None, seed=0, cases=100):
    """Projection, metric, retraction, and feasibility contracts."""
    manifolds = default_manifolds() if manifolds is None else manifolds
    results = []
    for m in manifolds:
        rng = np.random.default_rng([seed, 11])
        idem = adj = feas = bound = 0.0
        ratio_lo, ratio_hi = np.inf, 0.0
        block_gap = 0.0
        for _ in range(cases):
            x = _sample_point(m, rng)
            u_amb = rng.standard_normal(m.ambient_dim)
            w_amb = rng.standard_normal(m.ambient_dim)
            pu = m.project_tangent(x, u_amb)
            pw = m.project_tangent(x, w_amb)

            ppu = m.project_tangent(x, pu.ambient())
            idem = max(idem, np.linalg.norm(ppu.ambient() - pu.ambient())
                       / (1.0 + np.linalg.norm(u_amb)))
            adj = max(adj, abs(float(pu.ambient() @ w_amb)
                               - float(u_amb @ pw.ambient())))

            t_dir = random_tangent(x, rng, unit=False)
            nrm = t_dir.ambient_norm()
            if nrm > 1e-12:
                big = t_dir.scaled(rng.uniform(0.1, 10.0) / nrm)
                feas = max(feas, m.retract(x, big).residual())
                unit = t_dir.scaled(1.0 / nrm)
                small = unit.scaled(rng.uniform(0.1, 1.0))
                moved = m.retract(x, small).ambient() - x.ambient()
                bound = max(bound, np.linalg.norm(moved)
                            / small.ambient_norm())
                for t in (1e-2, 1e-3):
                    e1 = np.linalg.norm(
                        m.retract(x, unit.scaled(t)).ambient()
                        - (x.ambient() + t * unit.ambient()))
                    e2 = np.linalg.norm(
                        m.retract(x, unit.scaled(t / 2)).ambient()
                        - (x.ambient() + (t / 2) * unit.ambient()))
                    if e1 >= 1e-14 and e2 >= 1e-14:
                        ratio_lo = min(ratio_lo, e1 / e2)
                        ratio_hi = max(ratio_hi, e1 / e2)

            if isinstance(m, Product):
                manual = tuple(
                    b._project(xb, s)
                    for b, xb, s in zip(m.blocks, x.value, m._split(u_amb))
                )
                got = m.project_tangent(x, u_amb).value
                for a, b in zip(got, manual):
                    ga = a[0] if isinstance(a, tuple) else a
                    gb = b[0] if isinstance(b, tuple) else b
                    if not np.array_equal(np.asarray(ga), np.asarray(gb)):
                        block_gap = 1.0

        name = m.spec_string()
        results.append(CheckResult(
            f"geometry/idempotence {name}", idem <= 1e-10, f"max {idem:.2e}"))
        results.append(CheckResult(
            f"geometry/self-adjoint {name}", adj <= 1e-10, f"max {adj:.2e}"))
        results.append(CheckResult(
            f"geometry/feasibility {name}", feas <= 1e-8, f"max residual {feas:.2e}"))
        results.append(CheckResult(
            f"geometry/bounded-step {name}", bound <= 2.0, f"max |R-x|/|d| {bound:.3f}"))
        if np.isfinite(ratio_lo):
            ok = 3.5 <= ratio_lo and ratio_hi <= 4.5
            results.append(CheckResult(
                f"geometry/retraction-order {name}", ok,
                f"ratios in [{ratio_lo:.3f}, {ratio_hi:.3f}]"))
        else:
            results.append(CheckResult(
                f"geometry/retraction-order {name}", True, "exact (skipped)"))
        if isinstance(m, Product):
            results.append(CheckResult(
                f"geometry/blockwise {name}", block_gap == 0.0, "exact equality"))
    return results


def direction_checks(manifolds=None, seed=0, points=50, trials=200):
    """Spanning-basis and dense-direction contracts."""
    manifolds = default_manifolds() if manifolds is None else manifolds
    results = []
    for m in manifolds:
        rng = np.random.default_rng([seed, 23])
        tangency = 0.0
        max_norm = 0.0
        tau_min = np.inf
        for i in range(points):
            x = _sample_point(m, rng)
            basis = spanning_basis(x)
            for v in basis.vectors:
                tangency = max(tangency, m.tangency_residual(x, v))
                max_norm = max(max_norm, v.ambient_norm())
            tau_min = min(tau_min, measure_tau(basis, trials, [seed, 29, i]))
        name = m.spec_string()
        results.append(CheckResult(
            f"directions/tangency {name}", tangency <= 1e-10, f"max {tangency:.2e}"))
        results.append(CheckResult(
            f"directions/norm-bound {name}", max_norm <= 1 + 1e-12,
            f"max {max_norm:.12f}"))
        results.append(CheckResult(
            f"directions/cosine-measure {name}", tau_min > 0,
            f"min tau estimate {tau_min:.4f}"))

    s1 = DenseDirectionStream(seed=3, ambient_dim=7)
    s2 = DenseDirectionStream(seed=3, ambient_dim=7)
    same = all(np.array_equal(s1.next_ambient(), s2.next_ambient())
               for _ in range(50))
    results.append(CheckResult(
        "directions/stream-determinism", same, "50 emissions identical"))

    sph = Sphere(5)
    x = sph.random_point(np.random.default_rng(seed))
    stream = DenseDirectionStream(seed=7, ambient_dim=5)
    norms = [dense_direction(stream, x).norm() for _ in range(100)]
    ok = all(n == 0.0 or abs(n - 1.0) <= 1e-10 for n in norms)
    results.append(CheckResult(
        "directions/dense-unit-norm", ok,
        f"norms within 1e-10 of {{0, 1}} over {len(norms)} draws"))
    return results


def _constant_problem(man, level=1.0, seed=0):
    start = man.random_point(np.random.default_rng([seed, 41]))

    def f_val(v):
        return float(level)

    return ProblemInstance(
        name="constant", manifold=man, ambient_dim=man.ambient_dim,
        requested_dim=man.ambient_dim, seed=seed, smooth=True, data={},
        start=start, f0=float(level), known_opt=float(level),
        _value_f=f_val, _ambient_f=lambda a: float(level),
        _grad_f=lambda v: np.zeros(man.ambient_dim),
    )


def solver_checks(seed=0):
    """Stepsize dynamics, budget accounting, and determinism contracts."""
    results = []
    man = Sphere(6)
    prob = _constant_problem(man, seed=seed)
    k_iters = 5
    n_dirs = 2 * man.ambient_dim

    cfg = SolverConfig(gamma=0.77, gamma1=0.61, gamma2=1.0, alpha0=1.0,
                       budget=1 + k_iters * n_dirs, seed=seed)
    trace = run_rds_sb(prob, cfg)
    expected = cfg.alpha0
    for _ in range(k_iters):
        expected *= cfg.gamma1
    results.append(CheckResult(
        "solvers/rds-sb-geometric-decay", trace.final_alpha == expected,
        f"alpha {trace.final_alpha!r} vs expected {expected!r}"))
    results.append(CheckResult(
        "solvers/rds-sb-budget", trace.evals_used == cfg.budget,
        f"{trace.evals_used} of {cfg.budget}"))

    cfg_dd = SolverConfig(gamma=1.0, gamma1=0.95, gamma2=2.0, alpha0=1.0,
                          budget=1 + k_iters, seed=seed)
    trace_dd = run_rds_dd(prob, cfg_dd)
    expected = cfg_dd.alpha0
    for _ in range(trace_dd.iterations):
        expected *= cfg_dd.gamma1
    results.append(CheckResult(
        "solvers/rds-dd-geometric-decay", trace_dd.final_alpha == expected,
        f"alpha {trace_dd.final_alpha!r} after {trace_dd.iterations} iterations"))

    cfg_e = SolverConfig(gamma=0.11, gamma1=0.81, gamma2=3.12, alpha0=1.0,
                         budget=1 + n_dirs, seed=seed)
    trace_e = run_rdse_sb(prob, cfg_e)
    slot_alphas = np.array(list(trace_e.final_alpha_by_slot.values()))
    one_shrink = cfg_e.gamma1 * cfg_e.alpha0
    results.append(CheckResult(
        "solvers/rdse-sb-sweep-shrink",
        bool(np.all(slot_alphas == one_shrink)),
        f"all {len(slot_alphas)} slots at gamma1*alpha0 after one sweep"))

    mono_ok = all(
        t.history[i][1] >= t.history[i + 1][1]
        for t in (trace, trace_dd, trace_e)
        for i in range(len(t.history) - 1)
    )
    results.append(CheckResult(
        "solvers/monotone-history", mono_ok, "best_f non-increasing"))

    t1 = run_rds_sb(prob, cfg)
    t2 = run_rds_sb(prob, cfg)
    results.append(CheckResult(
        "solvers/determinism", t1.history == t2.history,
        f"{len(t1.history)} evaluations identical"))
    return results


def run_all(seed=0, cases=100, points=50, trials=200):
    results = []
    results += geometry_checks(seed=seed, cases=cases)
    results += direction_checks(seed=seed, points=points, trials=trials)
    results += solver_checks(seed=seed)
    return results
