"""
Communication part and the space left over
==========================================

Draw one downlink channel, build the cheapest precoder that meets every
user's SINR target, and check that anything sent through the channel's
null space is invisible to the users.
"""

import numpy as np

from sdisac import (QosConfig, achieved_sinr, compute_null_space_basis,
                    db2lin, generate_symbols, min_power_precoder, power_split,
                    rayleigh_channel)

# 4 single-antenna users, 20 transmit antennas, blocks of 64 symbols
K, Nt, L = 4, 20, 64
H = rayleigh_channel(K, Nt, seed=1)

qos = QosConfig.uniform(K, db2lin(10.0), noise_var=0.01, block_len=L)
pre = min_power_precoder(H, qos)
print("SINR per user      :", np.round(achieved_sinr(H, pre.F, qos), 6))
print("communication power:", round(pre.comm_power, 5))

split = power_split(1.0, pre.comm_power)
print("left for sensing   :", round(split.added, 5), "(beta = %.4f)" % split.ratio)

# the null space has Nt - K dimensions
Delta = compute_null_space_basis(H)
print("null space shape   :", Delta.shape)
print("|H Delta|_F        :", np.linalg.norm(H @ Delta))

# any B on the power sphere, pushed through Delta, leaves the users alone
S = generate_symbols(K, L, seed=2).S
X_c = pre.F @ S
B = np.random.default_rng(3).standard_normal((Nt - K, L)) + 0j
B *= np.sqrt(L * split.added) / np.linalg.norm(B)
X = X_c + Delta @ B
print("SINR with B added  :", np.round(achieved_sinr(H, pre.F, qos, added=Delta @ B), 6))
print("|H X - H X_c|_F    :", np.linalg.norm(H @ X - H @ X_c))

# raising the target costs power quickly
for g_db in (0, 5, 10, 15, 20):
    p = min_power_precoder(H, QosConfig.uniform(K, db2lin(g_db))).comm_power
    print(f"gamma = {g_db:2d} dB -> P_c = {p:.4f}")
