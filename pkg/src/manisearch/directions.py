"""Search-direction generation: projected coordinate bases and dense streams.

Two direction sources feed the solvers.  For smooth problems, the signed
ambient coordinate directions (+e_1..+e_n, -e_1..-e_n) are projected onto
the current tangent space, which yields a positive spanning set of that
space whenever the point is non-degenerate.  For nonsmooth problems, a
deterministic stream of random unit ambient vectors (dense in the unit
sphere with probability one) is projected and normalised one direction
per iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateBasis, InvalidShape
from .manifolds import ManifoldPoint, TangentVector, random_tangent

DEFAULT_DROP_TOL = 1e-12


@dataclass(frozen=True)
class SpanningBasis:
    """Projected signed coordinate directions spanning T_x positively.

    ``vectors[i]`` is the projection of the signed ambient coordinate
    direction identified by ``slots[i]`` (slot s < n means +e_s, slot
    n + s means -e_s).  ``measured_b`` is the largest ambient norm among
    the kept vectors; it never exceeds 1 because orthogonal projection
    contracts ambient norms.
    """

    base: ManifoldPoint
    vectors: tuple
    slots: tuple
    measured_b: float
    drop_tol: float

    def __len__(self) -> int:
        return len(self.vectors)


def spanning_basis(x: ManifoldPoint, drop_tol: float = DEFAULT_DROP_TOL) -> SpanningBasis:
    """Project the signed ambient coordinate basis onto T_x.

    Directions whose projection has ambient norm at most ``drop_tol``
    are discarded (their negatives drop with them); the survivors keep
    the order +e_1..+e_n, -e_1..-e_n.

    Raises
    ------
    DegenerateBasis
        If every projection is dropped.
    """
    if not 0.0 < drop_tol < 1.0:
        raise ValueError("drop_tol must lie in (0, 1)")
    m = x.manifold
    n = m.ambient_dim
    e = np.zeros(n)
    kept = []
    for i in range(n):
        e[i] = 1.0
        t = m._project(x.value, e)
        e[i] = 0.0
        nrm = m.tangent_ambient_norm(x.value, t)
        if nrm > drop_tol:
            kept.append((i, t, nrm))
    if not kept:
        raise DegenerateBasis(
            f"all {2 * n} projected coordinate directions fell below {drop_tol}"
        )
    plus = [TangentVector(x, t) for _, t, _ in kept]
    minus = [v.scaled(-1.0) for v in plus]
    slots = tuple(i for i, _, _ in kept) + tuple(n + i for i, _, _ in kept)
    measured_b = max(nrm for _, _, nrm in kept)
    return SpanningBasis(
        base=x,
        vectors=tuple(plus + minus),
        slots=slots,
        measured_b=measured_b,
        drop_tol=drop_tol,
    )


def measure_tau(basis: SpanningBasis, trials: int, seed) -> float:
    """Lower estimate of the basis' cosine measure.

    Draws ``trials`` random unit tangent directions r at the base point
    and returns the smallest observed ``max_j <r, p_j>`` (Riemannian
    inner products; r has unit Riemannian norm).  Positive values
    certify that some basis direction correlates with every sampled
    direction; this is a diagnostic, not an enforced bound.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    x = basis.base
    m = x.manifold
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    worst = np.inf
    for _ in range(trials):
        r = random_tangent(x, rng, unit=True)
        best = max(m._inner(x.value, r.value, p.value) for p in basis.vectors)
        worst = min(worst, best)
    return float(worst)


@dataclass
class DenseDirectionStream:
    """Deterministic stream of unit ambient directions.

    The k-th emitted direction depends only on ``(seed, k, ambient_dim)``:
    a standard normal vector keyed on the pair, normalised to unit
    ambient norm.  Streams are owned by a single solver run.
    """

    seed: int
    ambient_dim: int
    counter: int = field(default=0)

    def next_ambient(self) -> np.ndarray:
        attempt = 0
        while True:
            rng = np.random.default_rng([self.seed, self.counter, attempt])
            d = rng.standard_normal(self.ambient_dim)
            nrm = np.linalg.norm(d)
            if nrm > 1e-12:
                self.counter += 1
                return d / nrm
            attempt += 1


def dense_direction(
    stream: DenseDirectionStream,
    x: ManifoldPoint,
    drop_tol: float = DEFAULT_DROP_TOL,
) -> TangentVector:
    """Next stream direction projected onto T_x, unit Riemannian norm.

    Returns the zero tangent vector when the projection's ambient norm
    does not exceed ``drop_tol`` (the stream direction was normal to
    the tangent space).
    """
    m = x.manifold
    if stream.ambient_dim != m.ambient_dim:
        raise InvalidShape(
            f"stream dimension {stream.ambient_dim} != ambient {m.ambient_dim}"
        )
    d_bar = stream.next_ambient()
    t = m.project_tangent(x, d_bar)
    if t.ambient_norm() <= drop_tol:
        return m.zero_tangent(x)
    return t.scaled(1.0 / t.norm())
