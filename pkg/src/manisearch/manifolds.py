"""Embedded manifolds: tangent projections, metrics, retractions, sampling.

Every manifold here is a submanifold of some flat ambient space R^n.
Points and tangent vectors are stored in a per-kind native layout
(vectors, matrices, factor triples, or tuples of blocks for products),
while a single flat ambient coordinate vector of length ``ambient_dim``
is the common currency for direction generation: coordinate directions
and random ambient directions enter through ``project_tangent`` and the
resulting tangent vectors are moved along with ``retract``.

Supported kinds and their stable names:

    sphere(n)            unit vectors in R^n
    product-spheres(...) product of unit spheres
    stiefel(n,p)         n-by-p matrices with orthonormal columns
    so(d)                rotation matrices (det +1)
    fixed-rank(m,h,r)    m-by-h matrices of rank r, stored factored (U, s, V)
    spd(d)               symmetric positive definite matrices, affine-invariant metric
    simplex(K)           strictly positive weights summing to one, Fisher metric
    euclidean(...)       an unconstrained block (used inside products)
    product(...)         direct product of any of the above
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BaseMismatch, InvalidShape


# ---------------------------------------------------------------------------
# tangent-value trees (ndarray, or nested tuples of ndarrays for products)
# ---------------------------------------------------------------------------

def tree_scale(value, c: float):
    if isinstance(value, tuple):
        return tuple(tree_scale(b, c) for b in value)
    return value * c


def tree_add(a, b):
    if isinstance(a, tuple):
        return tuple(tree_add(x, y) for x, y in zip(a, b))
    return a + b


def tree_equal(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(tree_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def tree_is_zero(value) -> bool:
    if isinstance(value, tuple):
        return all(tree_is_zero(b) for b in value)
    return not np.any(value)


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A feasible point, stored in the manifold's native layout."""

    manifold: "Manifold"
    value: object

    def ambient(self) -> np.ndarray:
        """Flat ambient coordinates of the point."""
        return self.manifold.point_ambient(self.value)

    def residual(self) -> float:
        """Constraint violation of the stored value (0 within rounding iff feasible)."""
        return self.manifold.point_residual(self.value)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector tagged with its base point."""

    point: ManifoldPoint
    value: object

    @property
    def manifold(self) -> "Manifold":
        return self.point.manifold

    def scaled(self, c: float) -> "TangentVector":
        return TangentVector(self.point, tree_scale(self.value, c))

    def __neg__(self) -> "TangentVector":
        return self.scaled(-1.0)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        if not _same_point(self.point, other.point):
            raise BaseMismatch("cannot add tangent vectors with different base points")
        return TangentVector(self.point, tree_add(self.value, other.value))

    def norm(self) -> float:
        """Riemannian norm at the base point."""
        m = self.manifold
        return float(np.sqrt(max(0.0, m._inner(self.point.value, self.value, self.value))))

    def ambient(self) -> np.ndarray:
        """Flat ambient coordinates of the tangent vector."""
        return self.manifold.embed_tangent(self.point.value, self.value)

    def ambient_norm(self) -> float:
        return self.manifold.tangent_ambient_norm(self.point.value, self.value)

    def is_zero(self) -> bool:
        return tree_is_zero(self.value)


def _same_point(a: ManifoldPoint, b: ManifoldPoint) -> bool:
    if a is b:
        return True
    return a.manifold is b.manifold and tree_equal(a.value, b.value)


# ---------------------------------------------------------------------------
# base class
# ---------------------------------------------------------------------------

class Manifold:
    """Common surface for all manifold kinds.

    Subclasses implement the raw-value geometry (single underscore
    methods); this class adds validation and the point/tangent wrappers
    used by the solvers.  All operations are pure functions of their
    inputs and instances are immutable after construction, so a manifold
    may be shared freely between concurrent runs.
    """

    kind: str = "abstract"
    ambient_dim: int
    intrinsic_dim: int
    feasibility_tol: float = 1e-10

    # ---- raw geometry, per kind ------------------------------------

    def _project(self, x, a_flat: np.ndarray):
        raise NotImplementedError

    def _retract(self, x, t):
        raise NotImplementedError

    def _inner(self, x, u, v) -> float:
        raise NotImplementedError

    def _embed(self, x, t) -> np.ndarray:
        raise NotImplementedError

    def _point_ambient(self, x) -> np.ndarray:
        raise NotImplementedError

    def _point_residual(self, x) -> float:
        raise NotImplementedError

    def _ambient_residual(self, a_flat: np.ndarray) -> float:
        # default: interpret the flat vector as a point value
        return self._point_residual(self._from_flat(a_flat))

    def _tangent_residual(self, x, t) -> float:
        raise NotImplementedError

    def _random_point(self, rng: np.random.Generator):
        raise NotImplementedError

    def _zero_tangent(self, x):
        raise NotImplementedError

    def _from_flat(self, a_flat: np.ndarray):
        raise NotImplementedError

    # ---- public surface ---------------------------------------------

    def spec_string(self) -> str:
        raise NotImplementedError

    def point(self, value, validate: bool = True) -> ManifoldPoint:
        """Wrap a native-layout value as a point, checking feasibility."""
        p = ManifoldPoint(self, value)
        if validate:
            r = self.point_residual(value)
            if not r <= 10 * self.feasibility_tol:
                raise InvalidShape(
                    f"value is not on {self.spec_string()} (residual {r:.3e})"
                )
        return p

    def project_tangent(self, x: ManifoldPoint, a) -> TangentVector:
        """Orthogonal projection of a flat ambient vector onto T_x.

        Parameters
        ----------
        x : ManifoldPoint
        a : array-like of length ``ambient_dim``

        Returns
        -------
        TangentVector at ``x``.  The projection is idempotent and
        self-adjoint with respect to the ambient inner product.
        """
        a_flat = np.asarray(a, dtype=float).ravel()
        if a_flat.size != self.ambient_dim:
            raise InvalidShape(
                f"expected ambient dimension {self.ambient_dim}, got {a_flat.size}"
            )
        return TangentVector(x, self._project(x.value, a_flat))

    def retract(self, x: ManifoldPoint, d: TangentVector) -> ManifoldPoint:
        """Move from ``x`` along tangent ``d`` and land back on the manifold.

        Agrees with ``x + d`` to first order; ``retract(x, 0)`` returns
        ``x`` unchanged.
        """
        if not _same_point(d.point, x):
            raise BaseMismatch("tangent vector is rooted at a different point")
        if tree_is_zero(d.value):
            return x
        return ManifoldPoint(self, self._retract(x.value, d.value))

    def inner(self, x: ManifoldPoint, u: TangentVector, v: TangentVector) -> float:
        """Riemannian scalar product of two tangent vectors at ``x``."""
        if not (_same_point(u.point, x) and _same_point(v.point, x)):
            raise BaseMismatch("inner product requires tangents based at x")
        return float(self._inner(x.value, u.value, v.value))

    def norm(self, x: ManifoldPoint, u: TangentVector) -> float:
        return float(np.sqrt(max(0.0, self.inner(x, u, u))))

    def constraint_residual(self, a) -> float:
        """Feasibility residual of a flat ambient vector (0 iff on the manifold)."""
        a_flat = np.asarray(a, dtype=float).ravel()
        if a_flat.size != self.ambient_dim:
            raise InvalidShape(
                f"expected ambient dimension {self.ambient_dim}, got {a_flat.size}"
            )
        return float(self._ambient_residual(a_flat))

    def point_residual(self, value) -> float:
        return float(self._point_residual(value))

    def tangency_residual(self, x: ManifoldPoint, t: TangentVector) -> float:
        return float(self._tangent_residual(x.value, t.value))

    def point_ambient(self, value) -> np.ndarray:
        return self._point_ambient(value)

    def embed_tangent(self, x_value, t_value) -> np.ndarray:
        return self._embed(x_value, t_value)

    def tangent_ambient_norm(self, x_value, t_value) -> float:
        return float(np.linalg.norm(self._embed(x_value, t_value)))

    def zero_tangent(self, x: ManifoldPoint) -> TangentVector:
        return TangentVector(x, self._zero_tangent(x.value))

    def random_point(self, rng: np.random.Generator) -> ManifoldPoint:
        return ManifoldPoint(self, self._random_point(rng))


# ---------------------------------------------------------------------------
# concrete kinds
# ---------------------------------------------------------------------------

def _qr_fixed(a: np.ndarray) -> np.ndarray:
    """Thin QR factor with the sign convention diag(R) >= 0."""
    q, r = np.linalg.qr(a)
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


class Sphere(Manifold):
    """Unit sphere in R^n with the induced metric."""

    kind = "sphere"

    def __init__(self, n: int, feasibility_tol: float = 1e-10):
        if n < 2:
            raise InvalidShape("sphere needs ambient dimension >= 2")
        self.n = int(n)
        self.ambient_dim = self.n
        self.intrinsic_dim = self.n - 1
        self.feasibility_tol = feasibility_tol

    def spec_string(self) -> str:
        return f"sphere({self.n})"

    def _from_flat(self, a):
        return a

    def _project(self, x, a):
        return a - (a @ x) * x

    def _retract(self, x, t):
        y = x + t
        return y / np.linalg.norm(y)

    def _inner(self, x, u, v):
        return float(u @ v)

    def _embed(self, x, t):
        return t

    def _point_ambient(self, x):
        return np.asarray(x, dtype=float)

    def _point_residual(self, x):
        return abs(np.linalg.norm(x) - 1.0)

    def _tangent_residual(self, x, t):
        return abs(float(x @ t))

    def _random_point(self, rng):
        while True:
            v = rng.standard_normal(self.n)
            nrm = np.linalg.norm(v)
            if nrm > 1e-12:
                return v / nrm

    def _zero_tangent(self, x):
        return np.zeros(self.n)


class Stiefel(Manifold):
    """Matrices with orthonormal columns, embedded metric, QR retraction."""

    kind = "stiefel"

    def __init__(self, n: int, p: int, feasibility_tol: float = 1e-10):
        if not 1 <= p <= n:
            raise InvalidShape("stiefel needs 1 <= p <= n")
        self.n, self.p = int(n), int(p)
        self.ambient_dim = self.n * self.p
        self.intrinsic_dim = self.n * self.p - self.p * (self.p + 1) // 2
        self.feasibility_tol = feasibility_tol

    def spec_string(self) -> str:
        return f"stiefel({self.n},{self.p})"

    def _from_flat(self, a):
        return a.reshape(self.n, self.p)

    def _project(self, x, a):
        z = a.reshape(self.n, self.p)
        return z - x @ _sym(x.T @ z)

    def _retract(self, x, t):
        return _qr_fixed(x + t)

    def _inner(self, x, u, v):
        return float(np.sum(u * v))

    def _embed(self, x, t):
        return t.ravel()

    def _point_ambient(self, x):
        return np.asarray(x, dtype=float).ravel()

    def _point_residual(self, x):
        return float(np.linalg.norm(x.T @ x - np.eye(self.p)))

    def _tangent_residual(self, x, t):
        return float(np.linalg.norm(_sym(x.T @ t)))

    def _random_point(self, rng):
        return _qr_fixed(rng.standard_normal((self.n, self.p)))

    def _zero_tangent(self, x):
        return np.zeros((self.n, self.p))


class SpecialOrthogonal(Stiefel):
    """Rotation group: orthogonal d-by-d matrices with determinant +1."""

    kind = "so"

    def __init__(self, d: int, feasibility_tol: float = 1e-10):
        if d < 2:
            raise InvalidShape("so needs d >= 2")
        super().__init__(d, d, feasibility_tol)
        self.d = int(d)
        self.intrinsic_dim = d * (d - 1) // 2

    def spec_string(self) -> str:
        return f"so({self.d})"

    def _retract(self, x, t):
        q = _qr_fixed(x + t)
        if np.linalg.det(q) <= 0:
            # cannot happen for genuinely tangent steps x @ skew
            raise InvalidShape("so retraction left the det=+1 component")
        return q

    def _point_residual(self, x):
        r = super()._point_residual(x)
        if np.linalg.det(x) <= 0:
            r += 2.0
        return r

    def _random_point(self, rng):
        q = _qr_fixed(rng.standard_normal((self.d, self.d)))
        if np.linalg.det(q) < 0:
            q = q.copy()
            q[:, -1] = -q[:, -1]
        return q


class FixedRank(Manifold):
    """Rank-r matrices in R^{m x h}, stored factored as (U, s, V).

    ``U`` (m x r) and ``V`` (h x r) have orthonormal columns and ``s``
    holds positive singular values, so the represented matrix is
    ``(U * s) @ V.T``.  Tangent vectors are stored as the triple
    (M, Up, Vp) with ``U.T @ Up = 0`` and ``V.T @ Vp = 0``, embedding as
    ``U @ M @ V.T + Up @ V.T + U @ Vp.T``.  The retraction is the rank-r
    truncated SVD of ``X + t``, computed on a (2r x 2r) core; singular
    values that fall below ``feasibility_tol`` are clamped up to it so
    iterates never leave the rank-r set.
    """

    kind = "fixed-rank"

    def __init__(self, m: int, h: int, r: int, feasibility_tol: float = 1e-10):
        if not (1 <= r <= min(m, h)) or min(m, h) < 2:
            raise InvalidShape("fixed-rank needs 1 <= r <= min(m,h) and min(m,h) >= 2")
        self.m, self.h, self.r = int(m), int(h), int(r)
        self.ambient_dim = self.m * self.h
        self.intrinsic_dim = (self.m + self.h - self.r) * self.r
        self.feasibility_tol = feasibility_tol

    def spec_string(self) -> str:
        return f"fixed-rank({self.m},{self.h},{self.r})"

    def _from_flat(self, a):
        raise InvalidShape("fixed-rank points are factored; use constraint_residual")

    def _project(self, x, a):
        u, s, v = x
        z = a.reshape(self.m, self.h)
        zv = z @ v
        ztu = z.T @ u
        mid = u.T @ zv
        up = zv - u @ mid
        vp = ztu - v @ mid.T
        return (mid, up, vp)

    @staticmethod
    def _complement_factor(u, up):
        # qr of a rank-deficient block can emit filler columns leaking
        # into span(u); re-orthogonalise so [u, q] stays orthonormal
        q, ru = np.linalg.qr(up)
        if np.abs(u.T @ q).max() > 1e-12:
            q = q - u @ (u.T @ q)
            q, _ = np.linalg.qr(q)
            ru = q.T @ up
        return q, ru

    def _retract(self, x, t):
        u, s, v = x
        mid, up, vp = t
        r = self.r
        qu, ru = self._complement_factor(u, up)
        qv, rv = self._complement_factor(v, vp)
        core = np.zeros((2 * r, 2 * r))
        core[:r, :r] = np.diag(s) + mid
        core[:r, r:] = rv.T
        core[r:, :r] = ru
        w, sv, zt = np.linalg.svd(core)
        sv = np.maximum(sv[:r], self.feasibility_tol)
        new_u = np.hstack([u, qu]) @ w[:, :r]
        new_v = np.hstack([v, qv]) @ zt[:r, :].T
        return (new_u, sv, new_v)

    def _inner(self, x, u, v):
        return float(np.sum(u[0] * v[0]) + np.sum(u[1] * v[1]) + np.sum(u[2] * v[2]))

    def _embed(self, x, t):
        u, s, v = x
        mid, up, vp = t
        return (u @ mid @ v.T + up @ v.T + u @ vp.T).ravel()

    def tangent_ambient_norm(self, x_value, t_value):
        # the three blocks embed orthogonally, so the Frobenius norm
        # of the embedding equals the factored norm
        mid, up, vp = t_value
        return float(np.sqrt(np.sum(mid * mid) + np.sum(up * up) + np.sum(vp * vp)))

    def _point_ambient(self, x):
        u, s, v = x
        return ((u * s) @ v.T).ravel()

    def _point_residual(self, x):
        u, s, v = x
        r = float(np.linalg.norm(u.T @ u - np.eye(self.r)))
        r += float(np.linalg.norm(v.T @ v - np.eye(self.r)))
        if np.min(s) <= 0:
            return np.inf
        return r

    def _ambient_residual(self, a):
        z = a.reshape(self.m, self.h)
        sv = np.linalg.svd(z, compute_uv=False)
        tail = float(np.linalg.norm(sv[self.r:])) if sv.size > self.r else 0.0
        rank_gap = max(0.0, self.feasibility_tol - float(sv[self.r - 1]))
        return tail + rank_gap

    def _tangent_residual(self, x, t):
        u, s, v = x
        mid, up, vp = t
        return float(np.linalg.norm(u.T @ up) + np.linalg.norm(v.T @ vp))

    def _random_point(self, rng):
        u = _qr_fixed(rng.standard_normal((self.m, self.r)))
        v = _qr_fixed(rng.standard_normal((self.h, self.r)))
        s = np.sort(rng.uniform(0.5, 2.0, self.r))[::-1].copy()
        return (u, s, v)

    def _zero_tangent(self, x):
        return (
            np.zeros((self.r, self.r)),
            np.zeros((self.m, self.r)),
            np.zeros((self.h, self.r)),
        )


class SymmetricPositiveDefinite(Manifold):
    """Symmetric positive definite matrices with the affine-invariant metric.

    The tangent space is the symmetric matrices (ambient-orthogonal
    projection is the symmetric part); the metric at X is
    ``<u, v> = trace(X^-1 u X^-1 v)`` and the retraction
    ``X + t + t X^-1 t / 2`` stays positive definite for any symmetric t.
    """

    kind = "spd"

    def __init__(self, d: int, feasibility_tol: float = 1e-10):
        if d < 1:
            raise InvalidShape("spd needs d >= 1")
        self.d = int(d)
        self.ambient_dim = self.d * self.d
        self.intrinsic_dim = self.d * (self.d + 1) // 2
        self.feasibility_tol = feasibility_tol

    def spec_string(self) -> str:
        return f"spd({self.d})"

    def _from_flat(self, a):
        return a.reshape(self.d, self.d)

    def _project(self, x, a):
        return _sym(a.reshape(self.d, self.d))

    def _retract(self, x, t):
        w = np.linalg.solve(x, t)
        return _sym(x + t + 0.5 * (t @ w))

    def _inner(self, x, u, v):
        a = np.linalg.solve(x, u)
        b = np.linalg.solve(x, v)
        return float(np.sum(a * b.T))

    def _embed(self, x, t):
        return t.ravel()

    def _point_ambient(self, x):
        return np.asarray(x, dtype=float).ravel()

    def _point_residual(self, x):
        r = float(np.linalg.norm(x - x.T))
        lam = float(np.linalg.eigvalsh(_sym(x))[0])
        if lam <= 0:
            return np.inf
        return r

    def _tangent_residual(self, x, t):
        return float(np.linalg.norm(t - t.T))

    def _random_point(self, rng):
        a = rng.standard_normal((self.d, self.d))
        return a @ a.T + np.eye(self.d)

    def _zero_tangent(self, x):
        return np.zeros((self.d, self.d))


class PositiveSimplex(Manifold):
    """Strictly positive weights summing to one, with the Fisher metric.

    Metric ``<u, v> = sum(u_i v_i / w_i)``; the retraction
    ``w * exp(t / w)``, renormalised, preserves positivity.  Entries
    that underflow are clamped to ``feasibility_tol`` before the final
    renormalisation so iterates never reach the boundary.
    """

    kind = "simplex"

    def __init__(self, k: int, feasibility_tol: float = 1e-10):
        if k < 2:
            raise InvalidShape("simplex needs K >= 2")
        self.k = int(k)
        self.ambient_dim = self.k
        self.intrinsic_dim = self.k - 1
        self.feasibility_tol = feasibility_tol

    def spec_string(self) -> str:
        return f"simplex({self.k})"

    def _from_flat(self, a):
        return a

    def _project(self, x, a):
        return a - a.mean()

    def _retract(self, x, t):
        z = t / x
        z -= z.max()  # rescaling cancels in the normalisation
        w = x * np.exp(z)
        w = np.maximum(w / w.sum(), self.feasibility_tol)
        return w / w.sum()

    def _inner(self, x, u, v):
        return float(np.sum(u * v / x))

    def _embed(self, x, t):
        return t

    def _point_ambient(self, x):
        return np.asarray(x, dtype=float)

    def _point_residual(self, x):
        if np.min(x) <= 0:
            return np.inf
        return abs(float(np.sum(x)) - 1.0)

    def _tangent_residual(self, x, t):
        return abs(float(np.sum(t)))

    def _random_point(self, rng):
        w = rng.uniform(0.0, 1.0, self.k)
        w = np.maximum(w, 1e-6)
        return w / w.sum()

    def _zero_tangent(self, x):
        return np.zeros(self.k)


class Euclidean(Manifold):
    """An unconstrained block; projection is the identity."""

    kind = "euclidean"

    def __init__(self, shape, feasibility_tol: float = 1e-10):
        self.shape = tuple(int(s) for s in np.atleast_1d(shape))
        self.ambient_dim = int(np.prod(self.shape))
        if self.ambient_dim < 1:
            raise InvalidShape("euclidean block needs at least one entry")
        self.intrinsic_dim = self.ambient_dim
        self.feasibility_tol = feasibility_tol

    def spec_string(self) -> str:
        return f"euclidean({'x'.join(str(s) for s in self.shape)})"

    def _from_flat(self, a):
        return a.reshape(self.shape)

    def _project(self, x, a):
        return a.reshape(self.shape).copy()

    def _retract(self, x, t):
        return x + t

    def _inner(self, x, u, v):
        return float(np.sum(u * v))

    def _embed(self, x, t):
        return np.asarray(t, dtype=float).ravel()

    def _point_ambient(self, x):
        return np.asarray(x, dtype=float).ravel()

    def _point_residual(self, x):
        return 0.0

    def _tangent_residual(self, x, t):
        return 0.0

    def _random_point(self, rng):
        return rng.standard_normal(self.shape)

    def _zero_tangent(self, x):
        return np.zeros(self.shape)


class Product(Manifold):
    """Direct product of manifolds; every operation applies blockwise."""

    def __init__(self, blocks, kind: str = "product", feasibility_tol: float = 1e-10):
        blocks = tuple(blocks)
        if not blocks:
            raise InvalidShape("product needs at least one block")
        self.blocks = blocks
        self.kind = kind
        self.ambient_dim = sum(b.ambient_dim for b in blocks)
        self.intrinsic_dim = sum(b.intrinsic_dim for b in blocks)
        self.feasibility_tol = feasibility_tol
        self._offsets = np.cumsum([0] + [b.ambient_dim for b in blocks])

    def spec_string(self) -> str:
        inner = ",".join(b.spec_string() for b in self.blocks)
        return f"{self.kind}({inner})"

    def _split(self, a_flat):
        return [
            a_flat[self._offsets[i]: self._offsets[i + 1]]
            for i in range(len(self.blocks))
        ]

    def _from_flat(self, a):
        return tuple(b._from_flat(s) for b, s in zip(self.blocks, self._split(a)))

    def _project(self, x, a):
        return tuple(
            b._project(xb, s) for b, xb, s in zip(self.blocks, x, self._split(a))
        )

    def _retract(self, x, t):
        return tuple(
            xb if tree_is_zero(tb) else b._retract(xb, tb)
            for b, xb, tb in zip(self.blocks, x, t)
        )

    def _inner(self, x, u, v):
        return float(
            sum(b._inner(xb, ub, vb) for b, xb, ub, vb in zip(self.blocks, x, u, v))
        )

    def _embed(self, x, t):
        return np.concatenate(
            [b._embed(xb, tb) for b, xb, tb in zip(self.blocks, x, t)]
        )

    def _point_ambient(self, x):
        return np.concatenate([b._point_ambient(xb) for b, xb in zip(self.blocks, x)])

    def _point_residual(self, x):
        return float(sum(b._point_residual(xb) for b, xb in zip(self.blocks, x)))

    def _ambient_residual(self, a):
        return float(
            sum(b._ambient_residual(s) for b, s in zip(self.blocks, self._split(a)))
        )

    def _tangent_residual(self, x, t):
        return float(
            sum(b._tangent_residual(xb, tb) for b, xb, tb in zip(self.blocks, x, t))
        )

    def _random_point(self, rng):
        return tuple(b._random_point(rng) for b in self.blocks)

    def _zero_tangent(self, x):
        return tuple(b._zero_tangent(xb) for b, xb in zip(self.blocks, x))


def product_spheres(dims) -> Product:
    """Product of unit spheres with the dedicated kind name."""
    return Product([Sphere(n) for n in dims], kind="product-spheres")


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def project_tangent(x: ManifoldPoint, a) -> TangentVector:
    """Project a flat ambient vector onto the tangent space at ``x``."""
    return x.manifold.project_tangent(x, a)


def retract(x: ManifoldPoint, d: TangentVector) -> ManifoldPoint:
    """Retract the tangent step ``d`` from ``x`` onto the manifold."""
    return x.manifold.retract(x, d)


def inner(x: ManifoldPoint, u: TangentVector, v: TangentVector) -> float:
    """Riemannian scalar product at ``x``."""
    return x.manifold.inner(x, u, v)


def constraint_residual(m: Manifold, a) -> float:
    """Feasibility residual of a flat ambient vector for manifold ``m``."""
    return m.constraint_residual(a)


def random_point(m: Manifold, seed) -> ManifoldPoint:
    """Deterministic seeded sample from ``m``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return m.random_point(rng)


def random_tangent(
    x: ManifoldPoint, rng: np.random.Generator, unit: bool = True
) -> TangentVector:
    """Seeded tangent vector at ``x``: projected ambient normal, optionally unit."""
    m = x.manifold
    while True:
        t = m.project_tangent(x, rng.standard_normal(m.ambient_dim))
        if not unit:
            return t
        nrm = t.norm()
        if nrm > 1e-12:
            return t.scaled(1.0 / nrm)
