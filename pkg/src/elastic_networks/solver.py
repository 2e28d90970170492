"""Implicit time stepping for the penalized elastic flow of networks.

Each step solves the frozen-coefficient linearization of the parabolic
form of the flow with an implicit Euler discretization in time, and
iterates that linear solve (Picard) until the step is self-consistent.
The junction conditions enter as boundary rows of the same sparse
system: concurrency, vanishing second derivatives, fixed outer ends and
the linearized third-order balance.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import geometry, junction, wellposed
from .errors import (
    ConfigurationError,
    NonCollinearError,
    RegularityError,
    StepError,
)
from .geometry import CurveSamples, boundary_offsets, stencil_weights

LINEAR_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class NetworkState:
    """All curves of the network at one instant."""

    curves: list
    time: float = 0.0

    def __post_init__(self):
        if not self.curves:
            raise ConfigurationError("a network needs at least one curve")
        shape = self.curves[0].nodes.shape
        for c in self.curves[1:]:
            if c.nodes.shape != shape:
                raise ConfigurationError(
                    "all curves must share the node count and ambient dimension"
                )

    @property
    def q(self):
        return len(self.curves)

    @property
    def n(self):
        return self.curves[0].n

    @property
    def N(self):
        return self.curves[0].N


@dataclass(frozen=True)
class FlowParams:
    """Fixed outer endpoints and per-curve length penalties."""

    endpoints: np.ndarray  # (q, n), the values f_i(1)
    lam: np.ndarray  # (q,), nonnegative

    def __post_init__(self):
        ends = np.atleast_2d(np.asarray(self.endpoints, dtype=float))
        lam = np.atleast_1d(np.asarray(self.lam, dtype=float))
        object.__setattr__(self, "endpoints", ends)
        object.__setattr__(self, "lam", lam)
        if ends.shape[0] != lam.shape[0]:
            raise ConfigurationError("endpoints and lam must list the same curves")
        if np.any(lam < 0):
            raise ConfigurationError("length penalties must be nonnegative")


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-6
    t_end: float = 1e-4
    picard_tol: float = 1e-12
    picard_max: int = 60
    # accept a stalled iteration once the update is this small; on fine
    # grids the linear solves carry rounding noise that puts a floor on
    # the reachable fixed-point accuracy
    picard_floor: float = 1e-7
    delta_guard_factor: float = 0.5
    relinearize_every_step: bool = True
    store_every: int = 1

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigurationError("dt and t_end must be positive")
        if self.picard_max < 1 or self.store_every < 1:
            raise ConfigurationError("picard_max and store_every must be >= 1")


@dataclass(frozen=True)
class LinearStepSystem:
    """One assembled implicit step: sparse matrix, right-hand side, layout."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    q: int
    N: int
    n: int

    def index(self, curve, node, component):
        return (curve * (self.N + 1) + node) * self.n + component

    def solve(self):
        x = spsolve(self.matrix, self.rhs)
        residual = np.max(np.abs(self.matrix @ x - self.rhs))
        scale = 1.0 + np.max(np.abs(self.rhs))
        if residual > LINEAR_RESIDUAL_TOL * scale:
            raise StepError(f"linear step residual {residual:.3e} too large")
        return [
            x[i * (self.N + 1) * self.n:(i + 1) * (self.N + 1) * self.n]
            .reshape(self.N + 1, self.n)
            for i in range(self.q)
        ]


def _idx(i, k, j, N, n):
    return (i * (N + 1) + k) * n + j


def _step_matrix(frozen, frozen_bundles, params, dt):
    """Sparse matrix of one implicit step; depends only on the frozen state."""
    q, N, n = frozen.q, frozen.N, frozen.n
    h = frozen.curves[0].h
    size = q * (N + 1) * n
    rows, cols, vals = [], [], []

    w4 = stencil_weights(range(-2, 3), 4) / h**4
    offs2_lo = boundary_offsets(0, 2, N + 1)
    w2_lo = stencil_weights(offs2_lo, 2) / h**2
    offs2_hi = boundary_offsets(N, 2, N + 1)
    w2_hi = stencil_weights(offs2_hi, 2) / h**2
    offs3 = boundary_offsets(0, 3, N + 1)
    w3 = stencil_weights(offs3, 3) / h**3

    interior = np.arange(2, N - 1)
    for i in range(q):
        d_pow4 = 1.0 / frozen_bundles[i].speed**4

        # interior rows: f/dt + D^4 f'''' = forcing
        for j in range(n):
            r = _idx(i, interior, j, N, n)
            rows.append(r)
            cols.append(r)
            vals.append(np.full(interior.size, 1.0 / dt))
            for m, off in enumerate(range(-2, 3)):
                rows.append(r)
                cols.append(_idx(i, interior + off, j, N, n))
                vals.append(d_pow4[interior] * w4[m])

        for j in range(n):
            # node N: pinned outer endpoint
            r = _idx(i, N, j, N, n)
            rows.append([r])
            cols.append([r])
            vals.append([1.0])
            # node N-1 slot: f''(1) = 0 with the one-sided stencil
            r = _idx(i, N - 1, j, N, n)
            rows.append(np.full(offs2_hi.size, r))
            cols.append(_idx(i, N + offs2_hi, j, N, n))
            vals.append(w2_hi)
            # node 1 slot: f''(0) = 0
            r = _idx(i, 1, j, N, n)
            rows.append(np.full(offs2_lo.size, r))
            cols.append(_idx(i, offs2_lo, j, N, n))
            vals.append(w2_lo)

        # node 0 slot
        if q == 1:
            for j in range(n):
                r = _idx(i, 0, j, N, n)
                rows.append([r])
                cols.append([r])
                vals.append([1.0])
        elif i >= 1:
            for j in range(n):
                r = _idx(i, 0, j, N, n)
                rows.append([r, r])
                cols.append([r, _idx(0, 0, j, N, n)])
                vals.append([1.0, -1.0])

    if q >= 2:
        # third-order junction balance, written into curve 0's node-0 slot;
        # the projectors E_i come from the frozen state only
        lin = junction.linearize_boundary(frozen_bundles, frozen_bundles, params.lam)
        for j in range(n):
            r = _idx(0, 0, j, N, n)
            for i in range(q):
                for l in range(n):
                    rows.append(np.full(offs3.size, r))
                    cols.append(_idx(i, offs3, l, N, n))
                    vals.append(lin.e_matrices[i, j, l] * w3)

    rows = np.concatenate([np.atleast_1d(a) for a in rows])
    cols = np.concatenate([np.atleast_1d(a) for a in cols])
    vals = np.concatenate([np.atleast_1d(np.asarray(a, dtype=float)) for a in vals])
    return sp.csr_matrix(sp.coo_matrix((vals, (rows, cols)), shape=(size, size)))


def _step_rhs(frozen, frozen_bundles, current, base, params, dt):
    """Right-hand side of one implicit step for the given Picard iterate."""
    q, N, n = frozen.q, frozen.N, frozen.n
    size = q * (N + 1) * n
    rhs = np.zeros(size)
    current_bundles = [geometry.finite_differences(c) for c in current.curves]

    interior = np.arange(2, N - 1)
    for i in range(q):
        cb = current_bundles[i]
        d_pow4 = 1.0 / frozen_bundles[i].speed**4
        remainder = (d_pow4 - 1.0 / cb.speed**4)[:, None] * cb.d4
        lower = geometry.h_lower(cb, params.lam[i])
        forcing = base.curves[i].nodes / dt + remainder + lower
        for j in range(n):
            rhs[_idx(i, interior, j, N, n)] = forcing[interior, j]
            rhs[_idx(i, N, j, N, n)] = params.endpoints[i, j]
        if q == 1:
            for j in range(n):
                rhs[_idx(i, 0, j, N, n)] = frozen.curves[i].nodes[0, j]

    if q >= 2:
        lin = junction.linearize_boundary(frozen_bundles, current_bundles, params.lam)
        for j in range(n):
            rhs[_idx(0, 0, j, N, n)] = lin.b[j]
    return rhs


def assemble_step(frozen, current, params, dt, base=None):
    """Assemble one implicit Euler step of the linearized flow.

    frozen supplies the coefficients of the fourth-order operator and the
    junction projectors, current is the Picard iterate feeding the
    lower-order terms, and base is the state at the beginning of the time
    step (defaults to current, which is exact on the first iterate).
    """
    if base is None:
        base = current
    frozen_bundles = [geometry.finite_differences(c) for c in frozen.curves]
    matrix = _step_matrix(frozen, frozen_bundles, params, dt)
    rhs = _step_rhs(frozen, frozen_bundles, current, base, params, dt)
    return LinearStepSystem(matrix=matrix, rhs=rhs, q=current.q, N=current.N,
                            n=current.n)


def picard_step(state, params, config, frozen=None):
    """Advance one time step, iterating the linearization to a fixed point."""
    if frozen is None:
        frozen = state
    q, N, n = state.q, state.N, state.n
    frozen_bundles = [geometry.finite_differences(c) for c in frozen.curves]
    matrix = _step_matrix(frozen, frozen_bundles, params, config.dt)
    lu = sp.linalg.splu(matrix.tocsc())
    current = state
    previous_change = np.inf
    for _ in range(config.picard_max):
        rhs = _step_rhs(frozen, frozen_bundles, current, params=params,
                        base=state, dt=config.dt)
        x = lu.solve(rhs)
        # two rounds of iterative refinement keep the boundary rows exact
        # to rounding even when the step matrix is badly conditioned
        for _refine in range(2):
            x += lu.solve(rhs - matrix @ x)
        residual = np.max(np.abs(matrix @ x - rhs))
        if residual > LINEAR_RESIDUAL_TOL * (1.0 + np.max(np.abs(rhs))):
            raise StepError(f"linear step residual {residual:.3e} too large",
                            time=state.time + config.dt)
        new_nodes = [
            x[i * (N + 1) * n:(i + 1) * (N + 1) * n].reshape(N + 1, n)
            for i in range(q)
        ]
        change = max(
            float(np.max(np.abs(nodes - c.nodes)))
            for nodes, c in zip(new_nodes, current.curves)
        )
        current = NetworkState(
            curves=[CurveSamples(nodes) for nodes in new_nodes],
            time=state.time + config.dt,
        )
        if change <= config.picard_tol:
            return current
        if change <= config.picard_floor and change > 0.5 * previous_change:
            # contraction has hit the rounding floor of the linear solver
            return current
        previous_change = change
    raise StepError(
        f"Picard iteration stalled (last change {change:.3e})",
        time=state.time + config.dt,
    )


def regularity_guard(state, initial_margin, config):
    """Raise once uniform parabolicity degrades past the configured factor."""
    speeds = [geometry.finite_differences(c).speed for c in state.curves]
    margin = wellposed.parabolicity_margin(speeds)
    if margin < config.delta_guard_factor * initial_margin:
        raise RegularityError(
            f"parabolicity margin {margin:.3e} fell below "
            f"{config.delta_guard_factor} of its initial value {initial_margin:.3e}"
        )
    return margin


def evolve(state, params, config, observers=(), preflight="strict"):
    """Run the flow from state to t_end; returns the stored trajectory.

    preflight is "strict" (reject incompatible data), "warn", or "skip".
    On a mid-run failure the raised exception carries the trajectory
    computed so far in its .trajectory attribute.
    """
    if preflight not in ("strict", "warn", "skip"):
        raise ConfigurationError("preflight must be strict, warn or skip")
    if preflight != "skip":
        if state.q >= 2:
            tangents = np.stack([
                b.d1[0] / b.speed[0]
                for b in (geometry.finite_differences(c) for c in state.curves)
            ])
            if junction.span_dimension(tangents) < 2:
                message = ("non-collinearity condition (NC) violated: the "
                           "junction tangents are collinear")
                if preflight == "strict":
                    raise NonCollinearError(message)
                warnings.warn(message)
        report = wellposed.check_compat_order0(state, params)
        if not report.passed:
            lines = ", ".join(
                f"{r.condition}[curve {r.curve}] = {r.residual:.3e}"
                for r in report.failing()
            )
            if preflight == "strict":
                raise ConfigurationError(
                    f"initial network violates the boundary conditions: {lines}"
                )
            warnings.warn(f"incompatible initial network: {lines}")

    initial_margin = wellposed.parabolicity_margin(
        [geometry.finite_differences(c).speed for c in state.curves]
    )
    num_steps = int(round(config.t_end / config.dt))
    trajectory = [state]
    frozen = state
    try:
        for step in range(num_steps):
            if config.relinearize_every_step:
                frozen = state
            state = picard_step(state, params, config, frozen=frozen)
            regularity_guard(state, initial_margin, config)
            if (step + 1) % config.store_every == 0 or step == num_steps - 1:
                trajectory.append(state)
            for obs in observers:
                obs(state)
    except (StepError, RegularityError) as err:
        err.trajectory = trajectory
        raise
    return trajectory
