"""Reparametrization, recovered diffeomorphisms and the equivalence certificate."""

import numpy as np
import pytest

from elastic_networks import fixtures, repar, solver
from elastic_networks.errors import ConfigurationError, DiffeoBreakdownError
from elastic_networks.geometry import CurveSamples
from elastic_networks.solver import SolverConfig


def test_diffeomorphism_validation_and_inverse():
    grid = np.linspace(0.0, 1.0, 17)
    phi = repar.Diffeomorphism(grid=grid, values=0.5 * (grid + grid**2))
    x = np.linspace(0.0, 1.0, 50)
    assert np.allclose(phi.inverse(phi(x)), x, atol=5e-4)
    with pytest.raises(DiffeoBreakdownError):
        repar.Diffeomorphism(grid=grid, values=np.zeros(17))
    with pytest.raises(ConfigurationError):
        repar.Diffeomorphism(grid=grid, values=grid[:5])


def test_resample_exact_on_cubics():
    # the local 4-point Lagrange interpolant reproduces cubics exactly
    x = np.linspace(0.0, 1.0, 33)
    nodes = np.stack([1.0 + x - x**3, x**2 + 0.5 * x**3], axis=1)
    y = np.linspace(0.0, 1.0, 101)
    out = repar.resample(nodes, y)
    assert np.allclose(out[:, 0], 1.0 + y - y**3, atol=1e-12)
    assert np.allclose(out[:, 1], y**2 + 0.5 * y**3, atol=1e-12)
    # scalar fields keep their shape
    assert repar.resample(x**2, y).shape == y.shape


def test_arclength_map_exact_oracle():
    # f(x) = P (x^2 + x)/2 has |f'| = |P|(x + 1/2): the trapezoidal rule
    # and the centered stencils are exact, so the normalized arclength is
    # exactly (x^2 + x)/ 2 / (value at 1) = (x^2 + x)/1.5... computed below
    x = np.linspace(0.0, 1.0, 65)
    profile = 0.5 * (x**2 + x)
    nodes = np.outer(profile, [3.0, 4.0])
    phi = repar.arclength_map(CurveSamples(nodes))
    exact = profile / profile[-1]
    assert np.allclose(phi.values, exact, atol=1e-10)


def test_const_speed_reparam_properties():
    state, _ = fixtures.triod_bent_skewed(N=128)
    curve = state.curves[0]
    resampled, phi = repar.const_speed_reparam(curve)
    # endpoints preserved
    assert np.allclose(resampled.nodes[0], curve.nodes[0], atol=1e-12)
    assert np.allclose(resampled.nodes[-1], curve.nodes[-1], atol=1e-12)
    # the resampled curve has nearly uniform speed
    from elastic_networks import geometry
    speed = geometry.finite_differences(resampled).speed
    assert np.max(speed) / np.min(speed) < 1.0 + 1e-3
    # phi is the arclength map of the original curve
    assert np.all(np.diff(phi.values) > 0)


def test_tangential_ode_identity_case():
    # same trajectory on both sides with the identity initial map: the
    # recovered diffeomorphisms stay the identity
    state, params = fixtures.triod_bent(N=48)
    config = SolverConfig(dt=1e-5, t_end=1e-4)
    trajectory = solver.evolve(state, params, config)
    times = [s.time for s in trajectory]
    fields = [repar._tangential_speed_fields(s, params.lam) for s in trajectory]
    grid = np.linspace(0.0, 1.0, 49)
    history = repar.tangential_ode(times, fields, fields, grid)
    assert np.max(np.abs(history - grid[None, :])) < 1e-12


def test_tangential_ode_breakdown_reported():
    # an artificial field with a huge tangential-speed mismatch destroys
    # monotonicity within one step and must raise with the failure time
    N = 32
    grid = np.linspace(0.0, 1.0, N + 1)
    speed = np.ones(N + 1)
    push = np.sin(2.0 * np.pi * grid) * 50.0
    fields_a = [[(np.zeros(N + 1), speed)]] * 2
    fields_b = [[(push, speed)]] * 2
    with pytest.raises(DiffeoBreakdownError) as exc_info:
        repar.tangential_ode([0.0, 0.1], fields_a, fields_b, grid)
    assert exc_info.value.time == pytest.approx(0.1)


def test_geometric_equivalence_identical_runs():
    state, params = fixtures.triod_bent(N=48)
    config = SolverConfig(dt=1e-5, t_end=1e-4)
    trajectory = solver.evolve(state, params, config)
    cert, maps = repar.geometric_equivalence(trajectory, trajectory, params.lam)
    assert cert < 1e-10
    assert maps.shape == (3, len(trajectory), 49)


def test_geometric_equivalence_validates_frames():
    state, params = fixtures.triod_bent(N=48)
    config = SolverConfig(dt=1e-5, t_end=1e-4)
    trajectory = solver.evolve(state, params, config)
    with pytest.raises(ConfigurationError):
        repar.geometric_equivalence(trajectory, trajectory[:-1], params.lam)


def test_geometric_equivalence_constant_speed_pair():
    # a short raw/reparametrized pair: the certificate must beat the raw
    # parametrization mismatch by a wide margin
    state, params = fixtures.triod_bent_skewed(N=64)
    config = SolverConfig(dt=1e-5, t_end=2e-4)
    traj_a = solver.evolve(state, params, config, preflight="warn")
    resampled = solver.NetworkState(
        [repar.const_speed_reparam(c)[0] for c in state.curves])
    traj_b = solver.evolve(resampled, params, config, preflight="warn")
    cert, _ = repar.geometric_equivalence(traj_a, traj_b, params.lam)
    raw = max(
        float(np.max(np.linalg.norm(a.nodes - b.nodes, axis=1)))
        for a, b in zip(traj_a[-1].curves, traj_b[-1].curves)
    )
    assert raw > 1e-2  # the parametrizations genuinely differ
    assert cert < raw / 10.0
    assert cert < 2e-3
