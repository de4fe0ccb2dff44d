"""Batch front end: run solver/problem grids, emit profiles, run checks.

Subcommands
-----------
run      execute a problems x dims x seeds x solvers grid, write the
         result table CSV plus one trace CSV per run
profile  turn a result table into data/performance profile curves
         (CSV per solver, optional SVG plot)
check    run the invariant suites and exit nonzero on any failure

Configuration is a flat ``key = value`` text file (comma-separated
lists, ``#`` comments, ``<solver>.<param>`` for per-solver overrides);
command-line flags override file values.  Exit status: 0 success,
1 validation error, 2 check failure.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import bench
from .errors import CliError, ManisearchError
from .problems import NONSMOOTH_PROBLEMS, PROBLEM_NAMES, build_instance
from .solvers import DEFAULT_MU, SOLVER_NAMES, default_config, run_solver

_CONFIG_KEYS = ("problems", "dims", "seeds", "solvers", "budget_mult", "taus", "out")
_SOLVER_PARAM_KEYS = ("gamma", "gamma1", "gamma2", "alpha0", "alpha_eps",
                      "drop_tol", "mu")


def stable_seed(*parts) -> int:
    """Platform-independent seed derived from string parts."""
    text = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:4], "big")


def parse_config_file(path: Path) -> dict:
    """Flat key=value config; dotted keys collect per-solver overrides."""
    out = {"solver_overrides": {}}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if "." in key:
            solver, param = key.split(".", 1)
            if param not in _SOLVER_PARAM_KEYS:
                raise CliError(f"{path}:{lineno}: unknown solver parameter '{param}'")
            out["solver_overrides"].setdefault(solver, {})[param] = float(value)
        elif key in _CONFIG_KEYS:
            out[key] = value
        else:
            raise CliError(f"{path}:{lineno}: unknown key '{key}'")
    return out


def _split_list(value: str) -> list:
    return [s.strip() for s in str(value).split(",") if s.strip()]


def _resolve_run_settings(args) -> dict:
    cfg = {"solver_overrides": {}}
    if args.config:
        cfg.update(parse_config_file(Path(args.config)))
    for key, flag in (("problems", args.problems), ("dims", args.dims),
                      ("seeds", args.seeds), ("solvers", args.solvers),
                      ("budget_mult", args.budget_mult), ("taus", args.tau),
                      ("out", args.out)):
        if flag is not None:
            cfg[key] = flag
    problems = _split_list(cfg.get("problems", ",".join(PROBLEM_NAMES)))
    solvers = _split_list(cfg.get("solvers", "rds-sb,rdse-sb"))
    for p in problems:
        if p not in PROBLEM_NAMES:
            raise CliError(f"unknown problem '{p}'")
    for s in solvers:
        if s not in SOLVER_NAMES:
            raise CliError(f"unknown solver '{s}'")
    if "zo-rgd" in solvers:
        bad = [p for p in problems if p in NONSMOOTH_PROBLEMS]
        if bad:
            raise CliError(
                f"zo-rgd applies to smooth problems only, not {', '.join(bad)}"
            )
    try:
        dims = [int(d) for d in _split_list(cfg.get("dims", "2,10"))]
        seeds = [int(s) for s in _split_list(cfg.get("seeds", "0"))]
        taus = [float(t) for t in _split_list(cfg.get("taus", "0.1,0.001"))]
        budget_mult = int(cfg.get("budget_mult", 100))
    except ValueError as exc:
        raise CliError(f"bad numeric value in configuration: {exc}") from None
    if budget_mult < 1:
        raise CliError("budget_mult must be >= 1")
    for t in taus:
        if not 0 < t < 1:
            raise CliError(f"tau must lie in (0, 1), got {t}")
    return dict(
        problems=problems, dims=dims, seeds=seeds, solvers=solvers,
        budget_mult=budget_mult, taus=taus,
        out=Path(cfg.get("out", "results")),
        solver_overrides=cfg["solver_overrides"],
    )


def _make_config(solver: str, budget: int, seed: int, overrides: dict) -> tuple:
    params = dict(overrides.get(solver, {}))
    mu = params.pop("mu", DEFAULT_MU)
    return default_config(solver, budget, seed, **params), mu


def cmd_run(args) -> int:
    settings = _resolve_run_settings(args)
    out = settings["out"]
    traces_dir = out / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)
    records = []
    seen = set()
    for problem in settings["problems"]:
        for dim in settings["dims"]:
            for seed in settings["seeds"]:
                inst = build_instance(problem, dim, seed)
                n_p = inst.ambient_dim
                if (problem, n_p, seed) in seen:
                    # distinct requested dims can resolve to the same shapes,
                    # and rerunning an identical instance would only double it
                    print(f"note: {problem} dim {dim} resolves to n_p={n_p}, "
                          "already run; skipping duplicate")
                    continue
                seen.add((problem, n_p, seed))
                budget = settings["budget_mult"] * (n_p + 1)
                for solver in settings["solvers"]:
                    run_seed = stable_seed(problem, n_p, seed, solver)
                    cfg, mu = _make_config(
                        solver, budget, run_seed, settings["solver_overrides"]
                    )
                    trace = run_solver(solver, inst, cfg, mu=mu)
                    records.append(dict(
                        problem=problem, n_p=n_p, seed=seed, solver=solver,
                        history=trace.history, f0=inst.f0,
                        evals_used=trace.evals_used,
                    ))
                    lines = ["eval_index,best_f"]
                    lines += [f"{i},{v!r}" for i, v in trace.history]
                    trace_path = traces_dir / f"{problem}__{n_p}__{seed}__{solver}.csv"
                    trace_path.write_text("\n".join(lines) + "\n")
    table = bench.assemble_results(records, settings["taus"])
    (out / "results.csv").write_text(table.to_csv())
    n_keys = len({(r["problem"], r["n_p"], r["seed"]) for r in records})
    for solver in settings["solvers"]:
        parts = []
        for tau in settings["taus"]:
            solved = sum(1 for r in table.rows
                         if r.solver == solver and r.tau == tau
                         and r.t_ps is not None)
            parts.append(f"tau={tau:g}: {solved}/{n_keys}")
        print(f"{solver}: solved " + ", ".join(parts))
    print(f"wrote {out / 'results.csv'} and {len(records)} trace files")
    return 0


def cmd_profile(args) -> int:
    out = Path(args.out) if args.out else Path("results")
    table_path = out / "results.csv"
    if not table_path.exists():
        raise CliError(f"no result table at {table_path}")
    table = bench.ResultTable.from_csv(table_path.read_text())
    bucket = args.bucket or "all"
    if bucket not in ("all", *bench.SIZE_BUCKETS):
        raise CliError(f"unknown bucket '{bucket}'")
    table = table.filter(bucket=bucket)
    if not table.rows:
        raise CliError(f"no rows left after bucket filter '{bucket}'")
    taus = ([float(t) for t in _split_list(args.tau)] if args.tau
            else table.taus())
    kinds = ("performance", "data") if args.kind == "both" else (args.kind,)
    budget_mult = args.budget_mult if args.budget_mult is not None else 100
    prof_dir = out / "profiles"
    prof_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for tau in taus:
        for kind in kinds:
            if kind == "performance":
                curves = bench.performance_profile(table, tau)
            else:
                curves = bench.data_profile(table, tau, kappa_max=budget_mult)
            for curve in curves:
                name = f"{curve.solver}__{kind}__tau{tau:g}.csv"
                (prof_dir / name).write_text(bench.profile_curve_csv(curve))
                written += 1
            if args.svg:
                svg = render_profile_svg(curves, f"{kind} profile, tau={tau:g}")
                (prof_dir / f"{kind}__tau{tau:g}.svg").write_text(svg)
    print(f"wrote {written} profile curve files to {prof_dir}")
    return 0


def cmd_check(args) -> int:
    from .checks import run_all

    seed = args.seed if args.seed is not None else 0
    results = run_all(seed=seed)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(r.line())
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 2 if failed else 0


# ---------------------------------------------------------------------------
# svg step-plot emitter (CSVs are the interface of record; this is a viewer)
# ---------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf")


def render_profile_svg(curves, title: str,
                       width: int = 640, height: int = 420) -> str:
    ml, mr, mt, mb = 55, 15, 35, 40
    pw, ph = width - ml - mr, height - mt - mb
    xs = [a for c in curves for a, _ in c.points]
    x_max = max(xs) if xs else 1.0
    x_max = max(x_max, 1e-9)

    def tx(a):
        return ml + pw * (a / x_max)

    def ty(v):
        return mt + ph * (1.0 - v)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#444"/>',
        f'<text x="{ml}" y="{mt - 12}" font-size="14" font-family="sans-serif">'
        f'{title}</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = ty(frac)
        parts.append(f'<line x1="{ml - 4}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" '
                     'stroke="#444"/>')
        parts.append(f'<text x="{ml - 8}" y="{y + 4:.1f}" font-size="11" '
                     f'text-anchor="end" font-family="sans-serif">{frac:g}</text>')
    for frac in (0.0, 0.5, 1.0):
        a = frac * x_max
        x = tx(a)
        parts.append(f'<line x1="{x:.1f}" y1="{mt + ph}" x2="{x:.1f}" '
                     f'y2="{mt + ph + 4}" stroke="#444"/>')
        parts.append(f'<text x="{x:.1f}" y="{mt + ph + 16}" font-size="11" '
                     f'text-anchor="middle" font-family="sans-serif">{a:g}</text>')
    for i, curve in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        if not curve.points:
            continue
        d = [f"M {tx(curve.points[0][0]):.1f} {ty(curve.points[0][1]):.1f}"]
        prev_v = curve.points[0][1]
        for a, v in curve.points[1:]:
            d.append(f"H {tx(a):.1f}")  # hold the previous value, then jump
            if v != prev_v:
                d.append(f"V {ty(v):.1f}")
                prev_v = v
        d.append(f"H {tx(x_max):.1f}")
        parts.append(f'<path d="{" ".join(d)}" fill="none" stroke="{color}" '
                     'stroke-width="1.8"/>')
        ly = mt + 16 + 16 * i
        parts.append(f'<line x1="{ml + pw - 130}" y1="{ly - 4}" '
                     f'x2="{ml + pw - 105}" y2="{ly - 4}" stroke="{color}" '
                     'stroke-width="1.8"/>')
        parts.append(f'<text x="{ml + pw - 100}" y="{ly}" font-size="12" '
                     f'font-family="sans-serif">{curve.solver}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="manisearch",
                     description="Derivative-free direct search on manifolds")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a solver/problem grid")
    run_p.add_argument("--problems", help="comma list of problem names")
    run_p.add_argument("--dims", help="comma list of requested dimensions")
    run_p.add_argument("--seeds", help="comma list of instance seeds")
    run_p.add_argument("--solvers", help="comma list of solver names")
    run_p.add_argument("--budget-mult", dest="budget_mult", type=int,
                       help="budget = mult * (n_p + 1), default 100")
    run_p.add_argument("--tau", help="comma list of accuracies in (0,1)")
    run_p.add_argument("--out", help="output directory (default results/)")
    run_p.add_argument("--config", help="key=value configuration file")
    run_p.set_defaults(func=cmd_run)

    prof_p = sub.add_parser("profile", help="compute profile curves from a table")
    prof_p.add_argument("--out", help="directory holding results.csv")
    prof_p.add_argument("--kind", choices=("performance", "data", "both"),
                        default="both")
    prof_p.add_argument("--tau", help="comma list of accuracies (default: all in table)")
    prof_p.add_argument("--bucket", help="size filter: small, medium, large, all")
    prof_p.add_argument("--budget-mult", dest="budget_mult", type=int,
                        help="right edge of data profiles (default 100)")
    prof_p.add_argument("--svg", action="store_true", help="also render SVG plots")
    prof_p.set_defaults(func=cmd_profile)

    check_p = sub.add_parser("check", help="run the invariant suites")
    check_p.add_argument("--seed", type=int, help="suite seed (default 0)")
    check_p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CliError, ManisearchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
