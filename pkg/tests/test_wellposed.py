"""Compatibility checks, symbol roots and complementary conditions."""

import numpy as np
import pytest

from elastic_networks import fixtures, junction, wellposed
from elastic_networks.errors import RegularityError
from elastic_networks.geometry import CurveSamples
from elastic_networks.solver import NetworkState


def test_order0_accepts_admissible_fixtures():
    for state, params in (fixtures.triod_equilibrium(N=48),
                          fixtures.triod_bent(N=64),
                          fixtures.q4_spatial(N=48),
                          fixtures.single_clamped(N=48)):
        report = wellposed.check_compat_order0(state, params)
        assert report.passed, report.failing()


def test_order0_detects_moved_endpoint():
    state, params = fixtures.triod_equilibrium(N=48)
    nodes = state.curves[0].nodes.copy()
    nodes[-1] += [0.0, 1e-3]
    bad = NetworkState([CurveSamples(nodes)] + list(state.curves[1:]))
    report = wellposed.check_compat_order0(bad, params)
    failing = {r.condition for r in report.failing()}
    assert "endpoint-pin" in failing


def test_order0_detects_broken_concurrency():
    state, params = fixtures.triod_equilibrium(N=48)
    nodes = state.curves[1].nodes.copy()
    nodes[0] += [1e-4, 0.0]
    bad = NetworkState([state.curves[0], CurveSamples(nodes), state.curves[2]])
    report = wellposed.check_compat_order0(bad, params)
    failing = {r.condition for r in report.failing()}
    assert "concurrency" in failing


def test_order0_detects_curved_end():
    # bend a curve near its pinned end: the second-derivative condition trips
    state, params = fixtures.single_clamped(N=48)
    nodes = state.curves[0].nodes.copy()
    x = np.linspace(0.0, 1.0, 49)
    nodes[:, 1] += 0.01 * x**2
    bad = NetworkState([CurveSamples(nodes)])
    report = wellposed.check_compat_order0(bad, params)
    failing = {r.condition for r in report.failing()}
    assert "second-derivative" in failing


def test_order0_detects_unbalanced_junction():
    # unequal length penalties break the third-order sum of the triod
    state, params = fixtures.triod_equilibrium(N=48)
    from elastic_networks.solver import FlowParams
    unbalanced = FlowParams(endpoints=params.endpoints,
                            lam=np.array([1.0, 1.0, 3.0]))
    report = wellposed.check_compat_order0(state, unbalanced)
    failing = {r.condition for r in report.failing()}
    assert "third-order-sum" in failing


def test_order1_passes_on_equilibrium():
    state, params = fixtures.triod_equilibrium(N=48)
    report = wellposed.check_compat_order1(state, params)
    assert report.passed, report.failing()


def test_order1_rejects_bent_triod():
    # the bent fixture satisfies order zero but genuinely violates the
    # first derivative layer (the velocity is curved at the ends)
    state, params = fixtures.triod_bent(N=64)
    report = wellposed.check_compat_order1(state, params)
    assert not report.passed
    failing = {r.condition for r in report.failing()}
    assert "second-derivative-of-velocity" in failing


def test_report_serialization():
    state, params = fixtures.triod_equilibrium(N=48)
    report = wellposed.check_compat_order0(state, params)
    rows = report.to_records()
    assert all(set(r) == {"condition", "curve", "endpoint", "residual", "pass"}
               for r in rows)
    assert all(r["pass"] for r in rows)


def test_parabolicity_margin():
    assert wellposed.parabolicity_margin([np.full(5, 2.0)]) == pytest.approx(
        1.0 / 16.0)
    # the minimum is taken across all curves
    assert wellposed.parabolicity_margin(
        [np.full(5, 1.0), np.full(5, 2.0)]) == pytest.approx(1.0 / 16.0)
    with pytest.raises(RegularityError):
        wellposed.parabolicity_margin([np.array([1.0, 0.0, 1.0])])


def test_positive_roots_reference_case():
    # p = 1, D = 1: quarter-circle roots e^{i pi/4} and e^{3 i pi/4}
    roots = wellposed.positive_roots(1.0, 1.0)
    expected = np.exp(1j * np.array([np.pi / 4.0, 3.0 * np.pi / 4.0]))
    assert np.allclose(roots.roots_pos[0], expected, atol=1e-14)
    assert np.allclose(roots.roots_neg[0], -expected, atol=1e-14)
    assert roots.radii[0] == pytest.approx(1.0)


def test_positive_roots_are_quartic_roots_with_positive_imag():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = complex(rng.uniform(0.0, 3.0), rng.uniform(-3.0, 3.0))
        if p == 0:
            continue
        D = rng.uniform(0.3, 2.0, size=3)
        roots = wellposed.positive_roots(p, D)
        for i in range(3):
            for tau in roots.roots_pos[i]:
                assert tau.imag > 0
                assert abs(D[i] ** 4 * tau**4 + p) < 1e-10 * abs(p)
            for tau in roots.roots_neg[i]:
                assert tau.imag < 0


def test_positive_roots_validation():
    with pytest.raises(ValueError):
        wellposed.positive_roots(0.0, 1.0)
    with pytest.raises(ValueError):
        wellposed.positive_roots(-1.0, 1.0)
    with pytest.raises(ValueError):
        wellposed.positive_roots(1.0, 0.0)


def _random_tangents(rng, collinear):
    q = int(rng.integers(2, 6))
    n = int(rng.integers(2, 5))
    if collinear:
        d = rng.normal(size=n)
        d /= np.linalg.norm(d)
        return np.array([s * d for s in rng.choice([-1.0, 1.0], q)])
    while True:
        t = rng.normal(size=(q, n))
        t /= np.linalg.norm(t, axis=1)[:, None]
        if junction.span_dimension(t) >= 2:
            return t


def test_junction_complementary_matches_span_criterion():
    rng = np.random.default_rng(42)
    for trial in range(60):
        t = _random_tangents(rng, collinear=(trial % 3 == 0))
        D = rng.uniform(0.5, 2.0, size=t.shape[0])
        expected = junction.span_dimension(t) >= 2
        for p in (1.0, 1j, 1 + 1j):
            assert wellposed.junction_complementary(t, D, p) is expected


def test_fixed_end_complementary_always_holds():
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = complex(rng.uniform(0.0, 4.0), rng.uniform(-4.0, 4.0))
        if p == 0:
            continue
        assert wellposed.fixed_end_complementary(rng.uniform(0.2, 3.0), p)
    with pytest.raises(ValueError):
        wellposed.fixed_end_complementary(1.0, 0.0)
    with pytest.raises(ValueError):
        wellposed.fixed_end_complementary(-1.0, 1.0)
