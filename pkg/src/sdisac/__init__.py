"""Sensing waveforms superimposed in the null space of a multi-user downlink.

The transmit block is ``X = X_c + Delta @ B``: ``X_c`` carries user data
through a minimum-power QoS precoder and ``Delta @ B`` lives in the right
null space of the channel, so users see no extra interference while ``B``
is shaped for radar (beampattern matching or low range sidelobes).
"""
from .beampattern import (AngleGrid, BeampatternProblem, MMResult,
                          ReferenceBeampattern, beampattern_cost,
                          beampattern_on_grid, build_beampattern_problem,
                          mm_beampattern_optimize,
                          mm_beampattern_optimize_imperfect,
                          peak_sidelobe_ratio, reference_pattern,
                          steering_matrix, steering_vector)
from .channels import (CorrelationMatrix, CsiModel, exponential_correlation,
                       gauss_markov_realization, rayleigh_channel, trial_rng)
from .core import (PowerSplit, TransmitWaveform, compose_waveform,
                   compute_null_space_basis, power_split, shift_matrix)
from .errors import *  # noqa: F401,F403
from .harness import ScenarioConfig, load_config, run_scenario, write_outputs
from .precoding import (Precoder, QosConfig, achieved_sinr, db2lin,
                        effective_interference_energy, generate_symbols,
                        lin2db, min_power_precoder, min_power_precoder_sdr,
                        sum_rate)
from .sidelobe import (IslProblem, RcgResult, build_isl_problem, isl,
                       isl_gradient, per_lag_sidelobes, rcg_optimize)
from .trust_region import solve_trust_region

__version__ = "0.1.0"
