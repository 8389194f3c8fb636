"""
Low range sidelobes
===================

Use the null-space signal to push down the auto- and cross-correlations of
the transmitted block at lags 1..15.
"""

import numpy as np

from sdisac import (QosConfig, build_isl_problem, compute_null_space_basis,
                    generate_symbols, isl, min_power_precoder,
                    per_lag_sidelobes, rayleigh_channel, rcg_optimize)
from sdisac.sidelobe import correlation_matrix

K, Nt, L, P = 4, 20, 64, 16
H = rayleigh_channel(K, Nt, seed=4)
pre = min_power_precoder(H, QosConfig.uniform(K, 10.0))
X_c = pre.F @ generate_symbols(K, L, seed=4).S
Delta = compute_null_space_basis(H)

problem = build_isl_problem(X_c, Delta, budget=L * (1 - pre.comm_power),
                            max_lag=P, max_iter=300)
res = rcg_optimize(problem, rng=4)
print("ISL %.2f -> %.4f after %d iterations" % (res.isl_trace[0], res.isl, res.iterations))
print("gradient norm at the end: %.2e" % res.grad_norms[-1])

X = problem.waveform(res.B)
zero_lag = np.linalg.norm(correlation_matrix(X, 0)) ** 2
for tau, level in enumerate(per_lag_sidelobes(X, P), start=1):
    print(f"lag {tau:2d}: {10 * np.log10(level / zero_lag):7.2f} dB below lag 0")

# the communication part alone, for comparison
print("ISL of X_c alone: %.2f" % isl(X_c, P))
