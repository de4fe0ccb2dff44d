import numpy as np
import pytest

from manisearch.errors import BudgetExhausted, InvalidDimension, UnknownProblem, Unsupported
from manisearch.manifolds import random_point, random_tangent
from manisearch.problems import (
    NONSMOOTH_PROBLEMS,
    PROBLEM_NAMES,
    SMOOTH_PROBLEMS,
    build_instance,
    smooth_l1,
)

DIMS = (2, 10, 50)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def test_registry_layout():
    assert len(PROBLEM_NAMES) == 10
    assert len(SMOOTH_PROBLEMS) == 8
    assert set(NONSMOOTH_PROBLEMS) == {"sparsest-vector", "nonsmooth-mc"}


def test_unknown_name_and_bad_dimension():
    with pytest.raises(UnknownProblem):
        build_instance("xyz", 10, 0)
    with pytest.raises(InvalidDimension):
        build_instance("largest-eig", 1, 0)


def test_every_instance_feasible_and_reproducible():
    for name in PROBLEM_NAMES:
        for n_p in DIMS:
            a = build_instance(name, n_p, 3)
            b = build_instance(name, n_p, 3)
            assert a.start.residual() <= 1e-8
            assert np.isfinite(a.f0)
            assert a.f0 == b.f0
            assert a.ambient_dim == a.manifold.ambient_dim
            assert a.smooth == (name in SMOOTH_PROBLEMS)
            # payload and start identical across rebuilds
            assert np.array_equal(a.start.ambient(), b.start.ambient())


def test_manifold_kinds_match_problem():
    assert build_instance("largest-eig", 10, 0).manifold.kind == "sphere"
    assert build_instance("largest-sv", 10, 0).manifold.kind == "product-spheres"
    assert build_instance("matrix-completion", 10, 0).manifold.kind == "fixed-rank"
    assert build_instance("procrustes", 10, 0).manifold.kind == "stiefel"
    gmm = build_instance("gmm", 10, 0).manifold
    assert [b.kind for b in gmm.blocks] == ["spd", "spd", "simplex"]


def test_seeds_change_payload():
    a = build_instance("largest-eig", 10, 0)
    b = build_instance("largest-eig", 10, 1)
    assert not np.array_equal(a.data["a"], b.data["a"])


# ---------------------------------------------------------------------------
# evaluation semantics
# ---------------------------------------------------------------------------

def test_counter_and_budget():
    inst = build_instance("largest-eig", 5, 0).fresh(budget=3)
    for expected in (1, 2, 3):
        inst.evaluate(inst.start.value)
        assert inst.counter == expected
    with pytest.raises(BudgetExhausted):
        inst.evaluate(inst.start.value)
    assert inst.counter == 3


def test_fresh_resets_counter_but_shares_payload():
    inst = build_instance("largest-eig", 5, 0)
    inst.evaluate(inst.start.value)
    clone = inst.fresh(budget=10)
    assert clone.counter == 0
    assert clone.data["a"] is inst.data["a"]


def test_reevaluation_bitwise_equal():
    for name in PROBLEM_NAMES:
        inst = build_instance(name, 10, 2)
        x = random_point(inst.manifold, 5)
        assert inst.raw_f(x.value) == inst.raw_f(x.value)


def test_largest_eig_matches_quadratic_form():
    inst = build_instance("largest-eig", 8, 1)
    a = inst.data["a"]
    x = random_point(inst.manifold, 9)
    assert inst.raw_f(x.value) == pytest.approx(-(x.value @ a @ x.value), rel=1e-14)
    # diagonal oracle: with A = diag(1, 2, 3) the value at e3 is -3
    e3 = np.array([0.0, 0.0, 1.0])
    assert float(-(e3 @ np.diag([1.0, 2.0, 3.0]) @ e3)) == -3.0


def test_matrix_completion_truth_point_scores_zero():
    inst = build_instance("matrix-completion", 10, 4)
    truth = (inst.data["u_bar"], inst.data["s_bar"], inst.data["v_bar"])
    assert inst.raw_f(truth) == pytest.approx(0.0, abs=1e-20)
    inst_ns = build_instance("nonsmooth-mc", 10, 4)
    truth = (inst_ns.data["u_bar"], inst_ns.data["s_bar"], inst_ns.data["v_bar"])
    assert inst_ns.raw_f(truth) == pytest.approx(0.0, abs=1e-12)


def test_sparsest_vector_matches_l1_formula():
    inst = build_instance("sparsest-vector", 6, 3)
    q = inst.data["q"]
    x = random_point(inst.manifold, 11)
    assert inst.raw_f(x.value) == pytest.approx(np.abs(q @ x.value).sum(), rel=1e-14)
    # hand value: with Q = I2 and x = (1, 1)/sqrt(2) the objective is sqrt(2)
    x2 = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert np.abs(np.eye(2) @ x2).sum() == pytest.approx(np.sqrt(2.0), rel=1e-15)


def test_smooth_l1_values():
    assert smooth_l1(np.zeros((2, 2)), 0.001) == pytest.approx(0.004, rel=1e-12)
    assert smooth_l1(np.array([[3.0]]), 1e-9) == pytest.approx(3.0, rel=1e-9)
    assert smooth_l1(np.array([[-4.0]]), 0.003) == pytest.approx(
        np.sqrt(16.0 + 9e-6), rel=1e-14
    )
    with pytest.raises(ValueError):
        smooth_l1(np.zeros((2, 2)), 0.0)


def test_smooth_l1_dominates_l1():
    rng = np.random.default_rng(0)
    c = rng.standard_normal((4, 6))
    assert smooth_l1(c, 0.01) >= np.abs(c).sum()


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

def test_nonsmooth_gradient_unsupported():
    inst = build_instance("sparsest-vector", 6, 0)
    with pytest.raises(Unsupported):
        inst.euclidean_gradient(inst.start.value)


def test_gradients_match_central_differences():
    rng = np.random.default_rng(13)
    for name in SMOOTH_PROBLEMS:
        inst = build_instance(name, 10, 1)
        for pseed in range(5):
            x = random_point(inst.manifold, pseed)
            g = inst.euclidean_gradient(x.value)
            flat = inst.manifold.point_ambient(x.value)
            idx = rng.choice(flat.size, size=min(12, flat.size), replace=False)
            scale = 1e-5 * (1 + np.linalg.norm(g))
            for i in idx:
                e = np.zeros(flat.size)
                e[i] = 1e-6
                fd = (inst.raw_ambient(flat + e) - inst.raw_ambient(flat - e)) / 2e-6
                assert abs(fd - g[i]) <= scale, (name, pseed, i)


def test_projected_gradient_matches_directional_derivative():
    # <P grad, d> (ambient pairing) against (f(R(x, t d)) - f(x)) / t
    for name in SMOOTH_PROBLEMS:
        inst = build_instance(name, 10, 2)
        m = inst.manifold
        rng = np.random.default_rng(17)
        for _ in range(3):
            x = random_point(m, int(rng.integers(1 << 30)))
            d = random_tangent(x, rng, unit=True)
            pg = m.project_tangent(x, inst.euclidean_gradient(x.value))
            pairing = float(pg.ambient() @ d.ambient())
            t = 1e-6
            fd = (inst.raw_f(m.retract(x, d.scaled(t)).value) - inst.raw_f(x.value)) / t
            tol = 1e-3 * (1 + abs(pairing)) + 1e-4 * (1 + abs(inst.f0))
            assert abs(fd - pairing) <= tol, (name, fd, pairing)


def test_retraction_decrease_bounded_by_fitted_quadratic():
    # f(R(x, d)) <= f(x) + <P grad, d> + L_hat |d|^2 with L_hat fitted as
    # twice the worst observed quotient on a pilot sample
    for name in SMOOTH_PROBLEMS:
        inst = build_instance(name, 10, 3)
        m = inst.manifold
        rng = np.random.default_rng(19)
        cases = []
        for _ in range(20):
            x = random_point(m, int(rng.integers(1 << 30)))
            d = random_tangent(x, rng, unit=True).scaled(rng.uniform(0.01, 0.1))
            fx = inst.raw_f(x.value)
            fr = inst.raw_f(m.retract(x, d).value)
            pg = m.project_tangent(x, inst.euclidean_gradient(x.value))
            lin = float(pg.ambient() @ d.ambient())
            cases.append((fr - fx - lin, d.ambient_norm() ** 2))
        l_hat = 2 * max(q / n2 for q, n2 in cases)
        l_hat = max(l_hat, 1e-12)
        for q, n2 in cases:
            assert q <= l_hat * n2 + 1e-12


# ---------------------------------------------------------------------------
# known optima
# ---------------------------------------------------------------------------

def test_known_opt_lower_bounds_feasible_values():
    rng = np.random.default_rng(23)
    for name in ("largest-eig", "largest-sv", "top-sv", "sync-rotations",
                 "matrix-completion", "nonsmooth-mc"):
        inst = build_instance(name, 10, 5)
        assert inst.known_opt is not None
        lo = inst.known_opt
        worst_gap = 0.0
        for _ in range(1000):
            x = inst.manifold.random_point(rng)
            worst_gap = min(worst_gap, inst.raw_f(x.value) - lo)
        assert worst_gap >= -1e-9, (name, worst_gap)


def test_largest_eig_known_opt_is_eigenvalue():
    inst = build_instance("largest-eig", 12, 7)
    assert inst.known_opt == pytest.approx(
        -np.linalg.eigvalsh(inst.data["a"])[-1], rel=1e-14
    )


def test_identity_subspace_l1_floor():
    # with an identity measurement matrix the sphere's l1 minimum is 1,
    # attained at the signed coordinate vectors
    rng = np.random.default_rng(101)
    for _ in range(1000):
        x = rng.standard_normal(6)
        x /= np.linalg.norm(x)
        assert np.abs(x).sum() >= 1.0 - 1e-12
    assert np.abs(np.eye(6)[0]).sum() == 1.0


# ---------------------------------------------------------------------------
# shape schedule
# ---------------------------------------------------------------------------

def test_shape_schedule_spot_values():
    assert build_instance("largest-eig", 50, 0).ambient_dim == 50
    assert build_instance("largest-sv", 50, 0).ambient_dim == 50
    assert build_instance("sync-rotations", 50, 0).ambient_dim == 50
    assert build_instance("matrix-completion", 50, 0).ambient_dim == 49
    assert build_instance("gmm", 10, 0).ambient_dim == 10
    assert build_instance("gmm", 50, 0).ambient_dim == 52
    assert build_instance("procrustes", 50, 0).ambient_dim == 50
    assert build_instance("dict-learning", 50, 0).ambient_dim == 75
    assert build_instance("sparsest-vector", 50, 0).ambient_dim == 50


def test_gmm_objective_finite_and_positive_weights():
    inst = build_instance("gmm", 10, 1)
    s1, s2, w = inst.start.value
    assert np.all(np.linalg.eigvalsh(s1) > 0)
    assert np.all(np.linalg.eigvalsh(s2) > 0)
    assert np.min(w) > 0
    assert np.isfinite(inst.f0)
