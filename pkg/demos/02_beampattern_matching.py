"""
Shaping the transmit beampattern
================================

Fill the power left over by the precoder with a null-space signal whose
beampattern matches three rectangular beams at -40, 0 and 40 degrees.
"""

import numpy as np

from sdisac import (AngleGrid, QosConfig, beampattern_on_grid,
                    build_beampattern_problem, compute_null_space_basis,
                    generate_symbols, min_power_precoder,
                    mm_beampattern_optimize, peak_sidelobe_ratio,
                    rayleigh_channel, reference_pattern)
from sdisac.beampattern import energy_matched_scale, rescale_reference
from sdisac.core import random_sphere_point

K, Nt, L = 4, 20, 64
H = rayleigh_channel(K, Nt, seed=0)
pre = min_power_precoder(H, QosConfig.uniform(K, 10.0))
X_c = pre.F @ generate_symbols(K, L, seed=0).S
Delta = compute_null_space_basis(H)
budget = L * (1.0 - pre.comm_power)

# random start on the sphere ||B||_F^2 = budget
B0 = random_sphere_point((Nt - K, L), budget, rng=0)

# the reference gets the same total energy as the starting waveform
grid = AngleGrid.uniform(360)
ref = reference_pattern((-40, 0, 40), 10.0, grid)
ref = rescale_reference(ref, energy_matched_scale(X_c + Delta @ B0, ref))
print("reference height:", round(ref.scale, 1))

problem = build_beampattern_problem(X_c, Delta, ref, budget)
res = mm_beampattern_optimize(problem, B0=B0)
print("iterations:", res.iterations, "converged:", res.converged)
print("cost: %.1f -> %.1f" % (res.costs[0], res.cost))

X = X_c + Delta @ res.B
G = beampattern_on_grid(X, grid)
print("PSLR: %.2f dB" % (10 * np.log10(peak_sidelobe_ratio(X, ref))))

# a coarse text plot, one row every 5 degrees
for theta, g in zip(grid.angles[::10], G[::10]):
    print(f"{theta:6.1f} {'#' * int(g / G.max() * 50)}")

# radar-only reference point: all Nt dimensions and all the power
radar = build_beampattern_problem(np.zeros((Nt, L)), np.eye(Nt), ref, float(L))
print("radar-only cost: %.1f" % mm_beampattern_optimize(radar, rng=0).cost)
