"""Seeded benchmark problem instances on manifolds.

Eight smooth and two nonsmooth problems, each generated deterministically
from ``(name, n_p, seed)``.  Every objective is posed as a minimisation
(maximisation problems are negated).  ``n_p`` is a requested ambient
dimension; each problem maps it to concrete shapes through a fixed
schedule (below) and records the resulting true ambient dimension, which
is what budgets and profiles use.

    name               manifold                     shapes from n_p
    ----------------   --------------------------   -------------------------------
    largest-eig        sphere(n)                    n = n_p
    largest-sv         product-spheres(m,h)         m = max(2, ceil(n_p/2)), h = max(2, floor(n_p/2))
    top-sv             stiefel(m,r) x stiefel(h,r)  m = h = max(2, round(n_p/4)); r = 2, or r = 1
                                                    with m = h = max(2, round(n_p/2)) when that m < 3
    dict-learning      spheres(d)^h x R^{h x k}     d = h = max(2, round(sqrt(n_p/2))), k = 2h
    sync-rotations     so(d) x so(d)                d = max(2, round(sqrt(n_p/2)))
    matrix-completion  fixed-rank(m,h,r)            m = max(2, round(sqrt(n_p))), h = max(2, round(n_p/m)),
                                                    r = 2 if min(m,h) >= 3 else 1
    gmm                spd(d+1)^2 x simplex(2)      d minimises |2(d+1)^2 + 2 - n_p|
    procrustes         stiefel(n,p)                 p = 2, n = max(p, round(n_p/2)), l = n + 5
    sparsest-vector    sphere(n)                    n = n_p, with a 4n x n orthonormal Q
    nonsmooth-mc       fixed-rank(m,h,r)            as matrix-completion
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from . import kernels
from .errors import BudgetExhausted, InvalidDimension, UnknownProblem, Unsupported
from .manifolds import (
    Euclidean,
    FixedRank,
    Manifold,
    ManifoldPoint,
    PositiveSimplex,
    Product,
    SpecialOrthogonal,
    Sphere,
    Stiefel,
    SymmetricPositiveDefinite,
    product_spheres,
    random_point,
)

DICT_LAMBDA = 0.01
DICT_EPS = 0.001


def smooth_l1(c, eps: float) -> float:
    """Smoothed entrywise absolute sum: sum of sqrt(c_ij^2 + eps^2).

    Smooth everywhere and bounded below by the plain absolute sum.
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    arr = np.ascontiguousarray(np.atleast_2d(np.asarray(c, dtype=float)))
    return float(kernels.smooth_l1_sum(arr, float(eps)))


@dataclass
class ProblemInstance:
    """One seeded benchmark instance: manifold, objective, start point.

    ``evaluate`` increments the evaluation counter and enforces the
    budget when one is registered; ``raw_f`` and ``raw_ambient`` are
    uncounted helpers for diagnostics (``raw_ambient`` accepts slightly
    off-manifold flat vectors, which finite-difference checks need).
    """

    name: str
    manifold: Manifold
    ambient_dim: int
    requested_dim: int
    seed: int
    smooth: bool
    data: dict
    start: ManifoldPoint
    f0: float
    known_opt: Optional[float]
    _value_f: Callable = field(repr=False)
    _ambient_f: Callable = field(repr=False)
    _grad_f: Optional[Callable] = field(repr=False, default=None)
    counter: int = 0
    budget: Optional[int] = None

    def fresh(self, budget: Optional[int] = None) -> "ProblemInstance":
        """Clone sharing the payload, with a zeroed counter and new budget."""
        return replace(self, counter=0, budget=budget)

    def start_point(self) -> ManifoldPoint:
        return self.start

    def evaluate(self, value) -> float:
        if self.budget is not None and self.counter >= self.budget:
            raise BudgetExhausted(
                f"budget of {self.budget} evaluations spent on {self.name}"
            )
        self.counter += 1
        return self._value_f(value)

    def raw_f(self, value) -> float:
        return self._value_f(value)

    def raw_ambient(self, flat) -> float:
        return self._ambient_f(np.asarray(flat, dtype=float).ravel())

    def euclidean_gradient(self, value) -> np.ndarray:
        """Analytic ambient gradient, flattened (smooth problems only)."""
        if self._grad_f is None:
            raise Unsupported(f"{self.name} has no smooth gradient")
        return self._grad_f(value)


def _round(x: float) -> int:
    return int(math.floor(x + 0.5))


def _tag(name: str) -> int:
    return zlib.crc32(name.encode())


def _payload_rng(name: str, seed: int) -> np.random.Generator:
    return np.random.default_rng([seed, _tag(name)])


def _sym(a):
    return 0.5 * (a + a.T)


def _qr_cols(rng, m, n):
    q, r = np.linalg.qr(rng.standard_normal((m, n)))
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _build_largest_eig(n_p, seed):
    n = n_p
    rng = _payload_rng("largest-eig", seed)
    a = _sym(rng.standard_normal((n, n)))
    man = Sphere(n)

    def f_val(x):
        return float(-(x @ a @ x))

    def f_amb(flat):
        return f_val(flat)

    def grad(x):
        return -2.0 * (a @ x)

    known = float(-np.linalg.eigvalsh(a)[-1])
    return man, dict(a=a), True, f_val, f_amb, grad, known


def _build_largest_sv(n_p, seed):
    m = max(2, math.ceil(n_p / 2))
    h = max(2, n_p // 2)
    rng = _payload_rng("largest-sv", seed)
    a = rng.standard_normal((m, h))
    man = product_spheres([m, h])

    def f_val(v):
        x, y = v
        return float(-(x @ a @ y))

    def f_amb(flat):
        return f_val((flat[:m], flat[m:]))

    def grad(v):
        x, y = v
        return np.concatenate([-(a @ y), -(a.T @ x)])

    known = float(-np.linalg.svd(a, compute_uv=False)[0])
    return man, dict(a=a), True, f_val, f_amb, grad, known


def _build_top_sv(n_p, seed):
    m = max(2, _round(n_p / 4))
    if m >= 3:
        r = 2
    else:
        r = 1
        m = max(2, _round(n_p / 2))
    h = m
    rng = _payload_rng("top-sv", seed)
    a = rng.standard_normal((m, h))
    man = Product([Stiefel(m, r), Stiefel(h, r)])

    def f_val(v):
        x, y = v
        return float(-np.sum(x * (a @ y)))

    def f_amb(flat):
        return f_val((flat[: m * r].reshape(m, r), flat[m * r:].reshape(h, r)))

    def grad(v):
        x, y = v
        return np.concatenate([-(a @ y).ravel(), -(a.T @ x).ravel()])

    known = float(-np.sum(np.linalg.svd(a, compute_uv=False)[:r]))
    return man, dict(a=a, r=r), True, f_val, f_amb, grad, known


def _build_dict_learning(n_p, seed):
    h = max(2, _round(math.sqrt(n_p / 2)))
    d, k = h, 2 * h
    rng = _payload_rng("dict-learning", seed)
    d_bar = rng.standard_normal((d, h))
    d_bar /= np.linalg.norm(d_bar, axis=0)
    mask = rng.random((h, k)) < 0.3
    if not mask.any():
        mask.flat[0] = True
    c_bar = np.where(mask, rng.standard_normal((h, k)), 0.0)
    y = d_bar @ c_bar
    man = Product([product_spheres([d] * h), Euclidean((h, k))])

    def f_val(v):
        cols, c = v
        dm = np.column_stack(cols)
        resid = float(np.linalg.norm(y - dm @ c))
        return resid + DICT_LAMBDA * kernels.smooth_l1_sum(
            np.ascontiguousarray(c), DICT_EPS
        )

    def f_amb(flat):
        dm = flat[: d * h].reshape(d, h, order="F")  # column blocks are contiguous
        c = flat[d * h:].reshape(h, k)
        resid = float(np.linalg.norm(y - dm @ c))
        return resid + DICT_LAMBDA * kernels.smooth_l1_sum(
            np.ascontiguousarray(c), DICT_EPS
        )

    def grad(v):
        cols, c = v
        dm = np.column_stack(cols)
        rsd = dm @ c - y
        nr = float(np.linalg.norm(rsd))
        if nr > 0:
            g_d = (rsd @ c.T) / nr
            g_c = (dm.T @ rsd) / nr
        else:
            g_d = np.zeros_like(dm)
            g_c = np.zeros_like(c)
        g_c = g_c + DICT_LAMBDA * c / np.sqrt(c * c + DICT_EPS * DICT_EPS)
        return np.concatenate([g_d.ravel(order="F"), g_c.ravel()])

    payload = dict(y=y, d_bar=d_bar, c_bar=c_bar, lam=DICT_LAMBDA, eps=DICT_EPS)
    return man, payload, True, f_val, f_amb, grad, None


def _build_sync_rotations(n_p, seed):
    d = max(2, _round(math.sqrt(n_p / 2)))
    rng = _payload_rng("sync-rotations", seed)
    man = Product([SpecialOrthogonal(d), SpecialOrthogonal(d)])
    r1 = man.blocks[0]._random_point(rng)
    r2 = man.blocks[1]._random_point(rng)
    g = rng.standard_normal((d, d))
    noise = scipy.linalg.expm(0.1 * (g - g.T) / 2.0)
    h_meas = r1 @ r2.T @ noise

    def f_val(v):
        a, b = v
        diff = a - h_meas @ b
        return float(np.sum(diff * diff))

    def f_amb(flat):
        return f_val((flat[: d * d].reshape(d, d), flat[d * d:].reshape(d, d)))

    def grad(v):
        a, b = v
        diff = a - h_meas @ b
        return np.concatenate([(2.0 * diff).ravel(), (-2.0 * h_meas.T @ diff).ravel()])

    sv = np.linalg.svd(h_meas, compute_uv=False)
    known = float(d + np.sum(h_meas * h_meas) - 2.0 * np.sum(sv))
    return man, dict(h=h_meas), True, f_val, f_amb, grad, known


def _mc_shapes(n_p):
    m = max(2, _round(math.sqrt(n_p)))
    h = max(2, _round(n_p / m))
    r = 2 if min(m, h) >= 3 else 1
    return m, h, r


def _build_completion(name, n_p, seed, absolute):
    m, h, r = _mc_shapes(n_p)
    rng = _payload_rng(name, seed)
    u_bar = _qr_cols(rng, m, r)
    v_bar = _qr_cols(rng, h, r)
    s_bar = np.sort(rng.uniform(0.5, 2.0, r))[::-1].copy()
    m_true = (u_bar * s_bar) @ v_bar.T
    mask = rng.random((m, h)) < 0.5
    if not mask.any():
        mask[0, 0] = True
    rows, cols = (idx.astype(np.int64) for idx in np.nonzero(mask))
    vals = np.ascontiguousarray(m_true[rows, cols])
    man = FixedRank(m, h, r)
    kernel = kernels.masked_residual_abs if absolute else kernels.masked_residual_sq

    def f_val(v):
        u, s, vt = v
        return float(kernel(np.ascontiguousarray(u), np.ascontiguousarray(s),
                            np.ascontiguousarray(vt), rows, cols, vals))

    def f_amb(flat):
        z = flat.reshape(m, h)
        diff = z[rows, cols] - vals
        if absolute:
            return float(np.abs(diff).sum())
        return float(diff @ diff)

    if absolute:
        grad = None
    else:
        def grad(v):
            u, s, vt = v
            pred = ((u[rows] * s) * vt[cols]).sum(axis=1)
            g = np.zeros((m, h))
            g[rows, cols] = 2.0 * (pred - vals)
            return g.ravel()

    payload = dict(m_true=m_true, rows=rows, cols=cols, vals=vals,
                   u_bar=u_bar, s_bar=s_bar, v_bar=v_bar, rank=r)
    return man, payload, not absolute, f_val, f_amb, grad, 0.0


def _build_matrix_completion(n_p, seed):
    return _build_completion("matrix-completion", n_p, seed, absolute=False)


def _build_nonsmooth_mc(n_p, seed):
    return _build_completion("nonsmooth-mc", n_p, seed, absolute=True)


def _gmm_base_dim(n_p):
    def size(d):
        return 2 * (d + 1) ** 2 + 2

    d = 1
    while size(d + 1) <= n_p:
        d += 1
    if abs(size(d + 1) - n_p) < abs(size(d) - n_p):
        return d + 1
    return d


def _build_gmm(n_p, seed):
    d = _gmm_base_dim(n_p)
    dd = d + 1
    rng = _payload_rng("gmm", seed)
    n_obs = 10 * dd
    w_bar = np.array([0.6, 0.4])
    means = 3.0 * rng.standard_normal((2, d))
    covs = []
    for _ in range(2):
        b = rng.standard_normal((d, d))
        covs.append(np.eye(d) + b @ b.T / d)
    labels = (rng.random(n_obs) >= w_bar[0]).astype(int)
    chols = [np.linalg.cholesky(c) for c in covs]
    noise = rng.standard_normal((n_obs, d))
    xs = np.empty((n_obs, d))
    for k in range(2):
        idx = labels == k
        xs[idx] = means[k] + noise[idx] @ chols[k].T
    y_aug = np.vstack([xs.T, np.ones(n_obs)])  # (d+1) x n_obs, columns (x; 1)
    log_c = 0.5 + (1.0 - dd / 2.0) * math.log(2.0 * math.pi)
    man = Product([SymmetricPositiveDefinite(dd), SymmetricPositiveDefinite(dd),
                   PositiveSimplex(2)])

    def _log_q(s_mat):
        sign, logdet = np.linalg.slogdet(s_mat)
        if sign <= 0 or not np.isfinite(logdet):
            return None
        w = np.linalg.solve(s_mat, y_aug)
        quad = np.sum(y_aug * w, axis=0)
        return log_c - 0.5 * logdet - 0.5 * quad

    def f_val(v):
        s1, s2, w = v
        if np.min(w) <= 0:
            return np.inf
        lq1, lq2 = _log_q(s1), _log_q(s2)
        if lq1 is None or lq2 is None:
            return np.inf
        ll = np.logaddexp(np.log(w[0]) + lq1, np.log(w[1]) + lq2)
        return float(-ll.sum())

    def f_amb(flat):
        s1 = flat[: dd * dd].reshape(dd, dd)
        s2 = flat[dd * dd: 2 * dd * dd].reshape(dd, dd)
        w = flat[2 * dd * dd:]
        return f_val((s1, s2, w))

    def grad(v):
        s1, s2, w = v
        lqs = [_log_q(s1), _log_q(s2)]
        a = np.vstack([np.log(w[0]) + lqs[0], np.log(w[1]) + lqs[1]])
        ll = np.logaddexp(a[0], a[1])
        resp = np.exp(a - ll)  # 2 x n_obs
        parts = []
        for k, s_mat in enumerate((s1, s2)):
            inv = np.linalg.inv(s_mat)
            wk = np.linalg.solve(s_mat, y_aug)
            g = 0.5 * (resp[k].sum() * inv - (wk * resp[k]) @ wk.T)
            parts.append(g.ravel())
        parts.append(-resp.sum(axis=1) / w)
        return np.concatenate(parts)

    payload = dict(observations=xs, y_aug=y_aug, w_bar=w_bar, means=means,
                   covs=covs, base_dim=d)
    return man, payload, True, f_val, f_amb, grad, None


def _build_procrustes(n_p, seed):
    p = 2
    n = max(p, _round(n_p / p))
    l = n + 5
    rng = _payload_rng("procrustes", seed)
    a = rng.standard_normal((l, n))
    x_bar = _qr_cols(rng, n, p)
    b = a @ x_bar + 0.01 * rng.standard_normal((l, p))
    man = Stiefel(n, p)

    def f_val(x):
        diff = a @ x - b
        return float(np.sum(diff * diff))

    def f_amb(flat):
        return f_val(flat.reshape(n, p))

    def grad(x):
        return (2.0 * a.T @ (a @ x - b)).ravel()

    return man, dict(a=a, b=b, x_bar=x_bar), True, f_val, f_amb, grad, None


def _build_sparsest_vector(n_p, seed):
    n = n_p
    rng = _payload_rng("sparsest-vector", seed)
    # subspace fraction n/m = 1/4: tall enough that the l1 relaxation
    # landscape is informative rather than saturated with spurious basins
    q = _qr_cols(rng, 4 * n, n)
    man = Sphere(n)

    def f_val(x):
        return float(np.abs(q @ x).sum())

    def f_amb(flat):
        return f_val(flat)

    return man, dict(q=q), False, f_val, f_amb, None, None


_BUILDERS = {
    "largest-eig": _build_largest_eig,
    "largest-sv": _build_largest_sv,
    "top-sv": _build_top_sv,
    "dict-learning": _build_dict_learning,
    "sync-rotations": _build_sync_rotations,
    "matrix-completion": _build_matrix_completion,
    "gmm": _build_gmm,
    "procrustes": _build_procrustes,
    "sparsest-vector": _build_sparsest_vector,
    "nonsmooth-mc": _build_nonsmooth_mc,
}

PROBLEM_NAMES = tuple(_BUILDERS)
SMOOTH_PROBLEMS = tuple(n for n in PROBLEM_NAMES
                        if n not in ("sparsest-vector", "nonsmooth-mc"))
NONSMOOTH_PROBLEMS = ("sparsest-vector", "nonsmooth-mc")


def build_instance(name: str, n_p: int, seed: int) -> ProblemInstance:
    """Build the seeded instance of ``name`` at requested dimension ``n_p``.

    The start point is a seeded random manifold point and ``f0`` its
    objective value (uncounted).  Raises ``UnknownProblem`` for names
    outside the registry and ``InvalidDimension`` for ``n_p < 2``.
    """
    if name not in _BUILDERS:
        raise UnknownProblem(f"unknown problem '{name}'")
    if int(n_p) != n_p or n_p < 2:
        raise InvalidDimension(f"n_p must be an integer >= 2, got {n_p}")
    man, payload, smooth, f_val, f_amb, grad, known = _BUILDERS[name](int(n_p), seed)
    start = random_point(man, seed)
    inst = ProblemInstance(
        name=name,
        manifold=man,
        ambient_dim=man.ambient_dim,
        requested_dim=int(n_p),
        seed=seed,
        smooth=smooth,
        data=payload,
        start=start,
        f0=float(f_val(start.value)),
        known_opt=known,
        _value_f=f_val,
        _ambient_f=f_amb,
        _grad_f=grad,
    )
    return inst
