import pytest

from manisearch.bench import CSV_HEADER, ResultTable
from manisearch.checks import CheckResult, geometry_checks
from manisearch.cli import main, parse_config_file, render_profile_svg, stable_seed
from manisearch.errors import CliError
from manisearch.manifolds import Sphere


RUN_ARGS = [
    "run",
    "--problems", "largest-eig,sparsest-vector",
    "--dims", "4",
    "--seeds", "0,1",
    "--solvers", "rds-sb,rdse-sb",
    "--budget-mult", "6",
    "--tau", "0.1,0.5",
]


def test_stable_seed_is_deterministic():
    assert stable_seed("a", 1, "b") == stable_seed("a", 1, "b")
    assert stable_seed("a", 1, "b") != stable_seed("a", 1, "c")
    assert 0 <= stable_seed("x") < 2**32


def test_run_writes_table_and_traces(tmp_path, capsys):
    out = tmp_path / "res"
    assert main(RUN_ARGS + ["--out", str(out)]) == 0
    text = (out / "results.csv").read_text()
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    table = ResultTable.from_csv(text)
    # 2 problems x 1 dim x 2 seeds x 2 solvers x 2 taus
    assert len(table.rows) == 16
    traces = sorted(p.name for p in (out / "traces").iterdir())
    assert len(traces) == 8
    assert traces[0] == "largest-eig__4__0__rds-sb.csv"
    captured = capsys.readouterr().out
    assert "rds-sb: solved" in captured
    assert "rdse-sb: solved" in captured


def test_run_budget_respected_in_trace_files(tmp_path):
    out = tmp_path / "res"
    main(RUN_ARGS + ["--out", str(out)])
    for trace_file in (out / "traces").iterdir():
        lines = trace_file.read_text().splitlines()
        assert lines[0] == "eval_index,best_f"
        n_p = int(trace_file.name.split("__")[1])
        budget = 6 * (n_p + 1)
        indices = [int(line.split(",")[0]) for line in lines[1:]]
        assert max(indices) <= budget
        assert indices == sorted(indices)
        best = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(b >= a for a, b in zip(best[1:], best[:-1]))


def test_rerun_is_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(RUN_ARGS + ["--out", str(out1)])
    main(RUN_ARGS + ["--out", str(out2)])
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
    for p1 in sorted((out1 / "traces").iterdir()):
        p2 = out2 / "traces" / p1.name
        assert p1.read_bytes() == p2.read_bytes()


def test_unknown_names_fail_with_diagnostic(tmp_path, capsys):
    assert main(["run", "--solvers", "xyz", "--out", str(tmp_path)]) == 1
    assert "xyz" in capsys.readouterr().err
    assert main(["run", "--problems", "nope", "--out", str(tmp_path)]) == 1
    assert "nope" in capsys.readouterr().err
    assert main(["run", "--dims", "1", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "n_p" in err or "dimension" in err.lower()


def test_gradient_baseline_rejected_on_nonsmooth(tmp_path, capsys):
    assert main(["run", "--problems", "sparsest-vector", "--solvers", "zo-rgd",
                 "--out", str(tmp_path)]) == 1
    assert "smooth" in capsys.readouterr().err


def test_bad_solver_override_fails_cleanly(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("rds-sb.gamma1 = 1.5\n")
    assert main(["run", "--problems", "largest-eig", "--dims", "4",
                 "--solvers", "rds-sb", "--budget-mult", "2",
                 "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "gamma1" in capsys.readouterr().err


def test_profile_command(tmp_path):
    out = tmp_path / "res"
    main(RUN_ARGS + ["--out", str(out)])
    assert main(["profile", "--out", str(out), "--tau", "0.1",
                 "--budget-mult", "6", "--svg"]) == 0
    prof = out / "profiles"
    names = sorted(p.name for p in prof.iterdir())
    assert "rds-sb__data__tau0.1.csv" in names
    assert "rdse-sb__performance__tau0.1.csv" in names
    assert "data__tau0.1.svg" in names
    curve_text = (prof / "rds-sb__data__tau0.1.csv").read_text()
    assert curve_text.splitlines()[0] == "solver,kind,tau,abscissa,value"


def test_profile_bucket_filter_can_empty(tmp_path, capsys):
    out = tmp_path / "res"
    main(RUN_ARGS + ["--out", str(out)])
    assert main(["profile", "--out", str(out), "--bucket", "large"]) == 1
    assert "bucket" in capsys.readouterr().err


def test_profile_missing_table(tmp_path):
    assert main(["profile", "--out", str(tmp_path / "nothing")]) == 1


def test_config_file_roundtrip(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text(
        "# comment\n"
        "problems = largest-eig\n"
        "dims = 4\n"
        "seeds = 0\n"
        "solvers = rds-sb\n"
        "budget_mult = 5\n"
        "taus = 0.1\n"
        "rds-sb.gamma1 = 0.5\n"
    )
    parsed = parse_config_file(cfg)
    assert parsed["problems"] == "largest-eig"
    assert parsed["solver_overrides"]["rds-sb"]["gamma1"] == 0.5
    out = tmp_path / "res"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "results.csv").exists()


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    with pytest.raises(CliError):
        parse_config_file(cfg)
    cfg.write_text("rds-sb.bogus = 1\n")
    with pytest.raises(CliError):
        parse_config_file(cfg)


def test_usage_error_maps_to_exit_one():
    assert main(["frobnicate"]) == 1


def test_check_command_passes(capsys):
    # desk-scale pass through the library API with reduced case counts
    from manisearch.checks import run_all

    results = run_all(seed=0, cases=10, points=5, trials=20)
    assert all(r.passed for r in results), [r.line() for r in results if not r.passed]


def test_check_detects_broken_retraction():
    class BrokenSphere(Sphere):
        def _retract(self, x, t):
            return x + t  # skips the normalisation

    results = geometry_checks([BrokenSphere(6)], seed=0, cases=20)
    failed = [r for r in results if not r.passed]
    assert any("feasibility" in r.name for r in failed)


def test_check_cli_exit_codes(tmp_path, monkeypatch):
    import manisearch.checks as checks_mod

    monkeypatch.setattr(
        checks_mod, "run_all",
        lambda seed=0, **kw: [CheckResult("stub", True, "ok")],
    )
    assert main(["check"]) == 0
    monkeypatch.setattr(
        checks_mod, "run_all",
        lambda seed=0, **kw: [CheckResult("stub", False, "broken")],
    )
    assert main(["check"]) == 2


def test_svg_emitter_renders_step_curves():
    from manisearch.bench import ProfileCurve

    curves = [
        ProfileCurve("s1", "data", 0.1, ((0.0, 0.0), (2.0, 0.5), (5.0, 1.0))),
        ProfileCurve("s2", "data", 0.1, ((0.0, 0.0), (3.0, 1.0))),
    ]
    svg = render_profile_svg(curves, "data profile")
    assert svg.startswith("<svg")
    assert svg.count("<path") == 2
    assert "s1" in svg and "s2" in svg
