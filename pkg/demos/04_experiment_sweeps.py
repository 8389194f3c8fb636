"""
Monte-Carlo sweeps through the harness
======================================

The same runs the command line does, from Python, at toy trial counts.
``python -m sdisac tradeoff --trials 200 --workers 4 --out results/tradeoff``
is the full-size equivalent.
"""

import numpy as np

from sdisac import load_config, run_scenario, write_outputs

# beampattern cost and sum rate versus the power split, two user counts
cfg = load_config(mode="tradeoff", trials=3, betas=[0.1, 0.5, 0.9], users=[2, 4])
result = run_scenario(cfg)
for row in result.summary:
    print("K=%d beta=%.1f  cost %.0f  rate %.2f  PSLR %.2f dB" % (
        row["num_users"], row["beta"], row["bp_cost_mean"],
        row["sum_rate_mean"], row["pslr_mean_db"]))

# imperfect CSI: weight between pattern matching and leakage
cfg = load_config(mode="imperfect-csi", trials=3, betas=[0.5], mus=[0.3],
                  omegas=[0.1, 0.5, 0.9])
result = run_scenario(cfg)
for row in result.summary:
    print("omega=%.1f  rate %.3f  interference %.3f" % (
        row["omega"], row["sum_rate_mean"], row["interference_mean"]))

paths = write_outputs(result, "demo_output")
print("\n".join(paths))
