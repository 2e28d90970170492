"""Certify that two differently parametrized runs trace the same shapes.

The flow is a PDE for parametrized curves, but its content is geometric:
starting the solver from the same triod traced at different speeds must
give the same evolving network, just labeled differently.  This script
runs the flow twice -- once from a deliberately skewed parametrization,
once from its constant-speed resampling -- recovers the family of
reparametrization maps by integrating the tangential-speed ODE, and
measures how well one run warps onto the other.
"""

import numpy as np

from elastic_networks import fixtures, repar, solver
from elastic_networks.solver import NetworkState, SolverConfig

state, params = fixtures.triod_bent_skewed(N=128, skew=0.4)
config = SolverConfig(dt=5e-6, t_end=2e-3, store_every=2)

run_a = solver.evolve(state, params, config, preflight="warn")
resampled = NetworkState([repar.const_speed_reparam(c)[0]
                          for c in state.curves])
run_b = solver.evolve(resampled, params, config, preflight="warn")

raw = max(
    float(np.max(np.linalg.norm(a.nodes - b.nodes, axis=1)))
    for sa, sb in zip(run_a, run_b)
    for a, b in zip(sa.curves, sb.curves)
)
print(f"raw node-by-node mismatch of the two runs: {raw:.3e}")
print("(the two solutions are genuinely different as parametrized curves)")

certificate, maps = repar.geometric_equivalence(run_a, run_b, params.lam)
print(f"geometric-equivalence certificate: {certificate:.3e}")
print("(after composing with the recovered diffeomorphisms the runs agree)")

phi_final = maps[0, -1]
grid = np.linspace(0.0, 1.0, phi_final.size)
print(f"recovered map of curve 0 at the final time deviates from the "
      f"identity by {np.max(np.abs(phi_final - grid)):.3f}")
assert certificate < raw / 10.0
