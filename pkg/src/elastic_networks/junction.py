"""Algebra at the movable junction x = 0.

Covers the non-collinearity functional, the q x q system for the junction
tangential speeds, and the frozen-coefficient boundary linearization
(projection matrices E_i and right-hand side vector b).
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonCollinearError, RegularityError
from .geometry import SPEED_FLOOR

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True)
class JunctionFrame:
    """Unit tangents and second covariant curvature derivatives at x = 0."""

    tangents: np.ndarray  # (q, n), unit rows
    a_vectors: np.ndarray  # (q, n)

    def __post_init__(self):
        t = np.atleast_2d(np.asarray(self.tangents, dtype=float))
        a = np.atleast_2d(np.asarray(self.a_vectors, dtype=float))
        object.__setattr__(self, "tangents", t)
        object.__setattr__(self, "a_vectors", a)
        if t.shape != a.shape:
            raise ValueError("tangents and a_vectors must have matching shapes")
        norms = np.linalg.norm(t, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise ValueError("junction tangents must be unit vectors")

    @property
    def q(self):
        return self.tangents.shape[0]

    @property
    def n(self):
        return self.tangents.shape[1]


@dataclass(frozen=True)
class JunctionLinearization:
    """Frozen boundary operators for the third-order junction condition."""

    e_matrices: np.ndarray  # (q, n, n)
    d_vectors: np.ndarray  # (q, n)
    coefficients: np.ndarray  # (q,) values 1/|f'| at x = 0
    b: np.ndarray  # (n,)


def nc_value(tangents):
    """1 minus the product of pairwise absolute tangent inner products."""
    t = np.atleast_2d(np.asarray(tangents, dtype=float))
    gram = t @ t.T
    iu = np.triu_indices(t.shape[0], k=1)
    return 1.0 - float(np.prod(np.abs(gram[iu])))


def span_dimension(tangents, tol=DEFAULT_RANK_TOL):
    """Dimension of the span of the tangents; tol is relative to the largest singular value."""
    t = np.atleast_2d(np.asarray(tangents, dtype=float))
    sv = np.linalg.svd(t, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def build_Q(tangents):
    """Junction matrix with diagonal q-1 and off-diagonal -<T_i, T_j>."""
    t = np.atleast_2d(np.asarray(tangents, dtype=float))
    q = t.shape[0]
    mat = -(t @ t.T)
    np.fill_diagonal(mat, q - 1.0)
    return mat


def junction_phi(frame, rank_tol=DEFAULT_RANK_TOL):
    """Junction tangential speeds solving the Q-system; needs span >= 2."""
    if span_dimension(frame.tangents, rank_tol) < 2:
        raise NonCollinearError(
            "junction tangents are collinear: Q-system is singular"
        )
    q_mat = build_Q(frame.tangents)
    total = frame.a_vectors.sum(axis=0)
    # rhs_i = -< sum_{j != i} A_j, T_i >
    rhs = -np.einsum("ij,ij->i", total[None, :] - frame.a_vectors, frame.tangents)
    return np.linalg.solve(q_mat, rhs)


def _projector_complement(direction):
    return np.eye(direction.size) - np.outer(direction, direction)


def linearize_boundary(frozen, current, lambdas):
    """Frozen E_i matrices, tangents d_i and the boundary vector b.

    frozen and current are per-curve DerivativeBundle objects; only their
    values at node 0 (the junction) are used.  b couples the frozen
    operators with the current iterate.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    q = len(frozen)
    n = frozen[0].d1.shape[1]
    e_matrices = np.empty((q, n, n))
    d_vectors = np.empty((q, n))
    coefficients = np.empty(q)
    b = np.zeros(n)
    for i in range(q):
        s0 = frozen[i].speed[0]
        s_cur = current[i].speed[0]
        if s0 < SPEED_FLOOR or s_cur < SPEED_FLOOR:
            raise RegularityError("degenerate speed at the junction", curve=i, node=0)
        coefficients[i] = 1.0 / s0
        d_vectors[i] = frozen[i].d1[0] / s0
        e_matrices[i] = coefficients[i]**3 * _projector_complement(d_vectors[i])

        t_cur = current[i].d1[0] / s_cur
        e_bar = _projector_complement(t_cur) / s_cur**3
        b += (e_matrices[i] - e_bar) @ current[i].d3[0] + lambdas[i] * t_cur
    return JunctionLinearization(
        e_matrices=e_matrices, d_vectors=d_vectors, coefficients=coefficients, b=b
    )
