"""Seeded Monte-Carlo scenario runner and CSV emission.

A scenario is a :class:`ScenarioConfig`.  It expands into sweep points, the
cartesian product of ``users x gamma_db x betas x mus x omegas``.  Each
(point, trial) pair is evaluated independently from random streams keyed
by ``(master_seed, trial, stream)``, so results do not depend on the
evaluation order or on the number of worker processes.  Different points
share the same trial streams, which pairs their realizations.
"""
import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from functools import lru_cache
from itertools import product
from typing import List, Optional, Tuple

import numpy as np
import yaml

from . import beampattern as bp
from . import sidelobe as sl
from .channels import (CsiModel, complex_normal, exponential_correlation,
                       gauss_markov_realization, rayleigh_channel, trial_rng)
from .core import compute_null_space_basis, power_split, random_sphere_point
from .errors import ConfigError, PowerBudgetExceeded, SdIsacError
from .precoding import (QosConfig, achieved_sinr, db2lin,
                        effective_interference_energy, generate_symbols,
                        min_power_precoder, scale_to_power, waveform_sinr)

__all__ = ["MODES", "ScenarioConfig", "TrialRecord", "ScenarioResult",
           "load_config", "run_scenario", "run_trial", "emit_csv",
           "emit_summary", "emit_curves", "read_csv", "write_outputs"]

MODES = ("beampattern", "isl", "tradeoff", "imperfect-csi", "radar-only")

_DEFAULT_TRIALS = {"beampattern": 1000, "isl": 200, "tradeoff": 1000,
                   "imperfect-csi": 1000, "radar-only": 1000}


@dataclass(frozen=True)
class ScenarioConfig:
    """Experiment description; defaults reproduce the base simulation setup."""

    mode: str = "beampattern"
    num_tx: int = 20
    num_users: int = 4
    block_len: int = 64
    total_power: float = 1.0
    noise_var: float = 0.01
    gamma_db: float = 10.0
    # When set, the precoder is scaled up to beta * P_t instead of using the
    # minimum QoS power.
    beta: Optional[float] = None
    targets: Tuple[float, ...] = (-40.0, 0.0, 40.0)
    beam_width: float = 10.0
    grid_size: int = 360
    # Height of the rectangular reference; None matches the radiated energy
    # of each trial's initial waveform.
    reference_scale: Optional[float] = None
    max_lag: int = 16
    rho: float = 0.6
    mu: float = 0.0
    omega: float = 1.0
    mm_tol: float = 1e-4
    mm_max_iter: int = 500
    rcg_tol: float = 1e-4
    rcg_max_iter: int = 1000
    # Objective used by tradeoff and radar-only modes.
    objective: str = "beampattern"
    radar_only_baseline: bool = True
    interference_draws: int = 2000
    trials: Optional[int] = None
    master_seed: int = 0
    workers: int = 1
    # Sweep lists; None falls back to the scalar field above.
    users: Optional[Tuple[int, ...]] = None
    gammas_db: Optional[Tuple[float, ...]] = None
    betas: Optional[Tuple[float, ...]] = None
    mus: Optional[Tuple[float, ...]] = None
    omegas: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.objective not in ("beampattern", "isl"):
            raise ConfigError(f"unknown objective {self.objective!r}")
        for name in ("targets", "users", "gammas_db", "betas", "mus", "omegas"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(np.atleast_1d(value).tolist()))
        if self.total_power <= 0 or self.noise_var <= 0:
            raise ConfigError("powers must be positive")
        if self.max_lag < 2 or self.max_lag - 1 > self.block_len:
            raise ConfigError("max_lag must satisfy 1 <= P - 1 <= L")
        for K in self.user_list:
            if not 1 <= K < self.num_tx:
                raise ConfigError(f"need 1 <= K < Nt, got K={K}, Nt={self.num_tx}")
        for b in self.beta_list:
            if b is not None and not 0.0 <= b <= 1.0:
                raise ConfigError(f"beta={b} outside [0, 1]")
        for x in self.mu_list + self.omega_list:
            if not 0.0 <= x <= 1.0:
                raise ConfigError(f"mu/omega value {x} outside [0, 1]")
        if abs(self.rho) > 1:
            raise ConfigError(f"|rho|={abs(self.rho)} exceeds 1")
        if self.workers < 1:
            raise ConfigError("workers must be positive")

    @property
    def num_trials(self):
        return _DEFAULT_TRIALS[self.mode] if self.trials is None else int(self.trials)

    @property
    def user_list(self):
        return tuple(int(k) for k in (self.users or (self.num_users,)))

    @property
    def beta_list(self):
        return self.betas or (self.beta,)

    @property
    def mu_list(self):
        return self.mus or (self.mu,)

    @property
    def omega_list(self):
        return self.omegas or (self.omega,)

    @property
    def gamma_list(self):
        return self.gammas_db or (self.gamma_db,)

    def points(self):
        """Sweep points as dicts, in a fixed order."""
        keys = ("num_users", "gamma_db", "beta", "mu", "omega")
        combos = product(self.user_list, self.gamma_list, self.beta_list,
                         self.mu_list, self.omega_list)
        return [dict(zip(keys, c)) for c in combos]

    @property
    def effective_objective(self):
        if self.mode == "isl":
            return "isl"
        if self.mode in ("beampattern", "imperfect-csi"):
            return "beampattern"
        return self.objective


def _defaults_for_mode(mode):
    if mode == "tradeoff":
        return {"betas": (0.1, 0.3, 0.5, 0.7, 0.9), "users": (2, 4, 6)}
    if mode == "imperfect-csi":
        return {"betas": (0.2, 0.5), "mus": (0.1, 0.3),
                "omegas": tuple(round(0.1 * i, 1) for i in range(1, 10))}
    return {}


def load_config(path=None, mode=None, **overrides):
    """Build a config from a flat YAML mapping plus keyword overrides.

    ``None`` overrides are ignored.  Mode-specific sweep defaults apply to
    sweep fields that neither the file nor the overrides set.
    """
    values = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {path} must be a flat key-value mapping")
        values.update(loaded)
    values.update({k: v for k, v in overrides.items() if v is not None})
    if mode is not None:
        values["mode"] = mode
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    # A scalar override of a swept quantity replaces the mode's sweep.
    scalar_for = {"betas": "beta", "mus": "mu", "omegas": "omega",
                  "users": "num_users", "gammas_db": "gamma_db"}
    for key, value in _defaults_for_mode(values.get("mode", "beampattern")).items():
        if key not in values and scalar_for[key] not in overrides_set(overrides):
            values[key] = value
    return ScenarioConfig(**values)


def overrides_set(overrides):
    return {k for k, v in overrides.items() if v is not None}


@dataclass
class TrialRecord:
    """Per-(point, trial) outcome.  Absent quantities are ``None``."""

    point: int
    trial: int
    seed: int
    num_users: int
    gamma_db: float
    beta_target: Optional[float]
    mu: float
    omega: float
    status: str = "ok"
    comm_power: Optional[float] = None
    beta: Optional[float] = None
    sinr: Optional[List[float]] = None
    sum_rate: Optional[float] = None
    audit_sinr_error: Optional[float] = None
    bp_cost: Optional[float] = None
    pslr: Optional[float] = None
    mm_iterations: Optional[int] = None
    mm_converged: Optional[bool] = None
    mm_max_increase: Optional[float] = None
    mm_feasibility_error: Optional[float] = None
    isl: Optional[float] = None
    per_lag: Optional[List[float]] = None
    rcg_iterations: Optional[int] = None
    rcg_converged: Optional[bool] = None
    rcg_max_increase: Optional[float] = None
    rcg_feasibility_error: Optional[float] = None
    interference: Optional[float] = None
    interference_mc: Optional[float] = None
    leakage: Optional[float] = None
    ref_scale: Optional[float] = None
    radar_bp_cost: Optional[float] = None
    radar_ref_scale: Optional[float] = None
    radar_isl: Optional[float] = None
    # Not written to the trial CSV: wall time varies between runs and the
    # arrays feed the curve files.
    wall_time: float = 0.0
    pattern: Optional[np.ndarray] = field(default=None, repr=False)
    radar_pattern: Optional[np.ndarray] = field(default=None, repr=False)
    radar_per_lag: Optional[List[float]] = field(default=None, repr=False)


_UNWRITTEN = ("wall_time", "pattern", "radar_pattern", "radar_per_lag")
_LIST_FIELDS = ("sinr", "per_lag")


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    records: List[TrialRecord]
    summary: List[dict]

    def point_records(self, point, ok_only=True):
        return [r for r in self.records
                if r.point == point and (r.status == "ok" or not ok_only)]

    def values(self, name, point=None):
        recs = self.records if point is None else self.point_records(point)
        return np.array([getattr(r, name) for r in recs
                         if r.status == "ok" and getattr(r, name) is not None],
                        dtype=float)


def _reference(cfg):
    grid = bp.AngleGrid.uniform(cfg.grid_size)
    scale = 1.0 if cfg.reference_scale is None else cfg.reference_scale
    return bp.reference_pattern(cfg.targets, cfg.beam_width, grid, scale)


def _trial_reference(cfg, X_init):
    ref = _reference(cfg)
    if cfg.reference_scale is None:
        ref = bp.rescale_reference(ref, bp.energy_matched_scale(X_init, ref))
    return ref


def _max_increase(trace):
    return float(np.max(np.diff(trace))) if len(trace) > 1 else 0.0


@lru_cache(maxsize=64)
def _radar_only(cfg, trial, ref_scale=None):
    """Radar-only baseline: ``X = B`` with the full power budget.

    ``ref_scale`` pins the reference height so the baseline is scored on the
    same reference as the waveform it is compared with.  The run does not
    depend on the channel, so sweep points that share a trial and reference
    reuse one result.
    """
    Nt, L = cfg.num_tx, cfg.block_len
    budget = L * cfg.total_power
    X_c = np.zeros((Nt, L), dtype=complex)
    Delta = np.eye(Nt, dtype=complex)
    out = {}
    if cfg.effective_objective == "beampattern":
        B0 = random_sphere_point((Nt, L), budget,
                                 trial_rng(cfg.master_seed, trial, "radar_init"))
        if ref_scale is None:
            ref = _trial_reference(cfg, B0)
        else:
            ref = bp.rescale_reference(_reference(cfg), ref_scale)
        prob = bp.build_beampattern_problem(X_c, Delta, ref, budget,
                                            cfg.mm_tol, cfg.mm_max_iter)
        res = bp.mm_beampattern_optimize(prob, B0=B0)
        out["radar_bp_cost"] = res.cost
        out["radar_ref_scale"] = ref.scale
        out["radar_pattern"] = bp.beampattern_on_grid(res.B, ref.grid)
    else:
        prob = sl.build_isl_problem(X_c, Delta, budget, cfg.max_lag,
                                    cfg.rcg_tol, cfg.rcg_max_iter)
        res = sl.rcg_optimize(prob, rng=trial_rng(cfg.master_seed, trial, "radar_init"))
        out["radar_isl"] = res.isl
        out["radar_per_lag"] = sl.per_lag_sidelobes(res.B, cfg.max_lag).tolist()
    return out, res


def run_trial(cfg, point_index, point, trial):
    """Evaluate one (point, trial) pair; errors become a status tag."""
    t0 = time.perf_counter()
    K = int(point["num_users"])
    rec = TrialRecord(point=point_index, trial=trial, seed=cfg.master_seed,
                      num_users=K, gamma_db=float(point["gamma_db"]),
                      beta_target=point["beta"], mu=float(point["mu"]),
                      omega=float(point["omega"]))
    try:
        if cfg.mode == "radar-only":
            out, res = _radar_only(cfg, trial)
            for k, v in out.items():
                setattr(rec, k, v)
            rec.comm_power, rec.beta = 0.0, 0.0
            if cfg.effective_objective == "beampattern":
                rec.bp_cost = rec.radar_bp_cost
                rec.pattern = rec.radar_pattern
                rec.pslr = bp.peak_sidelobe_ratio(res.B, _reference(cfg))
                rec.ref_scale = rec.radar_ref_scale
                rec.mm_iterations, rec.mm_converged = res.iterations, res.converged
                rec.mm_max_increase = _max_increase(res.costs)
            else:
                rec.isl, rec.per_lag = rec.radar_isl, rec.radar_per_lag
                rec.rcg_iterations, rec.rcg_converged = res.iterations, res.converged
                rec.rcg_max_increase = _max_increase(res.isl_trace)
        else:
            _sd_isac_trial(cfg, point, trial, rec)
    except SdIsacError as exc:
        rec.status = type(exc).__name__
    rec.wall_time = time.perf_counter() - t0
    return rec


def _sd_isac_trial(cfg, point, trial, rec):
    K = rec.num_users
    Nt, L = cfg.num_tx, cfg.block_len
    mu = rec.mu
    ch_rng = trial_rng(cfg.master_seed, trial, "channel")
    H_hat = rayleigh_channel(K, Nt, ch_rng)
    R = None
    if cfg.mode == "imperfect-csi":
        R = exponential_correlation(Nt, cfg.rho)
        model = CsiModel(H_hat, mu, R)
        H_true, H_est = gauss_markov_realization(
            model, trial_rng(cfg.master_seed, trial, "csi_error"))
    else:
        H_true = H_est = H_hat
    qos = QosConfig.uniform(K, float(db2lin(rec.gamma_db)), cfg.noise_var, L)
    pre = min_power_precoder(H_est, qos)
    if rec.beta_target is not None:
        target = rec.beta_target * cfg.total_power
        if pre.comm_power > target * (1 + 1e-12):
            raise PowerBudgetExceeded(
                f"QoS needs P_c={pre.comm_power:.6g} > beta P_t={target:.6g}")
        pre = scale_to_power(H_est, pre, target, qos)
    split = power_split(cfg.total_power, min(pre.comm_power, cfg.total_power))
    rec.comm_power, rec.beta = split.comm, split.ratio
    budget = L * split.added
    S = generate_symbols(K, L, trial_rng(cfg.master_seed, trial, "symbols")).S
    X_c = pre.F @ S
    Delta = compute_null_space_basis(H_est)
    init_rng = trial_rng(cfg.master_seed, trial, "init")
    objective = cfg.effective_objective
    B = np.zeros((Nt - K, L), dtype=complex)
    ref = _trial_reference(cfg, X_c)
    if budget > 0 and objective == "beampattern":
        B0 = random_sphere_point((Nt - K, L), budget, init_rng)
        ref = _trial_reference(cfg, X_c + Delta @ B0)
        prob = bp.build_beampattern_problem(X_c, Delta, ref, budget,
                                            cfg.mm_tol, cfg.mm_max_iter)
        if cfg.mode == "imperfect-csi":
            res = bp.mm_beampattern_optimize_imperfect(prob, R, mu, rec.omega,
                                                       B0=B0)
        else:
            res = bp.mm_beampattern_optimize(prob, B0=B0)
        B = res.B
        rec.bp_cost = bp.beampattern_cost(B, prob)
        rec.mm_iterations, rec.mm_converged = res.iterations, res.converged
        rec.mm_max_increase = _max_increase(res.costs)
        rec.mm_feasibility_error = abs(np.linalg.norm(B) ** 2 / budget - 1.0)
    elif budget > 0:
        prob = sl.build_isl_problem(X_c, Delta, budget, cfg.max_lag,
                                    cfg.rcg_tol, cfg.rcg_max_iter)
        res = sl.rcg_optimize(prob, rng=init_rng)
        B = res.B
        rec.rcg_iterations, rec.rcg_converged = res.iterations, res.converged
        rec.rcg_max_increase = _max_increase(res.isl_trace)
        rec.rcg_feasibility_error = abs(np.linalg.norm(B) ** 2 / budget - 1.0)
    added = Delta @ B
    X = X_c + added
    sinr = achieved_sinr(H_true, pre.F, qos, added=added)
    rec.sinr = sinr.tolist()
    rec.sum_rate = float(np.sum(np.log2(1.0 + sinr)))
    if mu == 0.0:
        full = waveform_sinr(H_true, pre.F, S, X, qos)
        comm_only = waveform_sinr(H_true, pre.F, S, X_c, qos)
        rec.audit_sinr_error = float(np.max(np.abs(full / comm_only - 1.0)))
    else:
        rec.interference = effective_interference_energy(X, R, mu)
        # Each draw is a full K x Nt error matrix; the closed form is the
        # expected energy per user, so the sampled total is divided by K.
        E = complex_normal(trial_rng(cfg.master_seed, trial, "interference"),
                           (cfg.interference_draws, K, Nt))
        draws = np.sum(np.abs(mu * (E @ (R.sqrt @ X))) ** 2, axis=(1, 2)) / K
        rec.interference_mc = float(draws.mean())
        rec.leakage = float(np.mean(np.sum(np.abs(H_true @ added) ** 2, axis=1)))
    if objective == "beampattern":
        rec.ref_scale = ref.scale
        rec.pattern = bp.beampattern_on_grid(X, ref.grid)
        rec.pslr = bp.peak_sidelobe_ratio(X, ref)
        if rec.bp_cost is None:
            prob = bp.build_beampattern_problem(X_c, Delta, ref, 1.0)
            rec.bp_cost = bp.beampattern_cost(B, prob)
    rec.isl = sl.isl(X, cfg.max_lag)
    rec.per_lag = sl.per_lag_sidelobes(X, cfg.max_lag).tolist()
    if cfg.radar_only_baseline and cfg.mode in ("beampattern", "isl", "tradeoff"):
        out, _ = _radar_only(cfg, trial, rec.ref_scale)
        for k, v in out.items():
            setattr(rec, k, v)


def _run_task(args):
    cfg, point_index, point, trial = args
    return run_trial(cfg, point_index, point, trial)


_SUMMARY_METRICS = ("comm_power", "beta", "sum_rate", "bp_cost", "pslr", "isl",
                    "mm_iterations", "rcg_iterations", "interference",
                    "interference_mc", "leakage", "radar_bp_cost", "radar_isl")


def _summarize(cfg, records):
    rows = []
    for i, point in enumerate(cfg.points()):
        recs = [r for r in records if r.point == i]
        ok = [r for r in recs if r.status == "ok"]
        row = {"point": i, **point, "trials": len(recs), "ok": len(ok),
               "excluded": len(recs) - len(ok)}
        for name in _SUMMARY_METRICS:
            vals = np.array([getattr(r, name) for r in ok
                             if getattr(r, name) is not None], dtype=float)
            if vals.size == 0:
                row[f"{name}_mean"] = None
                row[f"{name}_stderr"] = None
                continue
            mean = float(np.mean(vals))
            row[f"{name}_mean"] = mean
            row[f"{name}_stderr"] = (float(np.std(vals, ddof=1) / math.sqrt(vals.size))
                                     if vals.size > 1 else 0.0)
            if name in ("pslr", "isl", "bp_cost", "interference", "radar_isl",
                        "radar_bp_cost") and mean > 0:
                row[f"{name}_mean_db"] = 10.0 * math.log10(mean)
        rows.append(row)
    return rows


def run_scenario(cfg, workers=None):
    """Run every (point, trial) pair of ``cfg`` and aggregate per point."""
    workers = cfg.workers if workers is None else workers
    tasks = [(cfg, i, p, t) for i, p in enumerate(cfg.points())
             for t in range(cfg.num_trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(tasks) // (4 * workers))
            records = list(pool.map(_run_task, tasks, chunksize=chunk))
    else:
        records = [_run_task(t) for t in tasks]
    records.sort(key=lambda r: (r.point, r.trial))
    return ScenarioResult(config=cfg, records=records,
                          summary=_summarize(cfg, records))


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(repr(float(v)) for v in value)
    return str(value)


def _trial_columns():
    return [f.name for f in fields(TrialRecord) if f.name not in _UNWRITTEN]


def _open_for_write(path):
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _write_rows(path, header, rows):
    with _open_for_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def emit_csv(records, path):
    """One row per trial record; floats are written with full precision."""
    if not records:
        raise ValueError("no records to write")
    cols = _trial_columns()
    return _write_rows(path, cols, ([getattr(r, c) for c in cols] for r in records))


def emit_summary(summary, path):
    header = []
    for row in summary:
        for k in row:
            if k not in header:
                header.append(k)
    return _write_rows(path, header, ([row.get(k) for k in header] for row in summary))


def _parse(value, name):
    if value == "":
        return None
    if name in _LIST_FIELDS:
        return [float(v) for v in value.split()]
    if value in ("true", "false"):
        return value == "true"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def read_csv(path):
    """Parse a CSV written by this module into a list of dicts."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: _parse(v, k) for k, v in row.items()} for row in reader]


def _db(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def emit_curves(result, out_dir):
    """Write the figure-data files for ``result``; returns their paths."""
    cfg = result.config
    paths = []
    ref = _reference(cfg)
    points = cfg.points()
    for i, _ in enumerate(points):
        ok = result.point_records(i)
        if not ok:
            continue
        patterns = [r.pattern for r in ok if r.pattern is not None]
        if patterns:
            mean = np.mean(patterns, axis=0)
            radar = [r.radar_pattern for r in ok if r.radar_pattern is not None]
            rmean = np.mean(radar, axis=0) if radar else [None] * len(mean)
            scales = [r.ref_scale for r in ok if r.ref_scale is not None]
            height = float(np.mean(scales)) if scales else ref.scale
            rows = [(a, g, gd, height * m, rg, None if rg is None else float(_db(rg)))
                    for a, g, gd, m, rg in zip(ref.grid.angles, mean, _db(mean),
                                               ref.mainlobe, rmean)]
            paths.append(_write_rows(
                os.path.join(out_dir, f"beampattern_curve_{i}.csv"),
                ["angle_deg", "gain", "gain_db", "reference", "radar_only_gain",
                 "radar_only_gain_db"], rows))
        lags = [r.per_lag for r in ok if r.per_lag is not None]
        if lags and cfg.effective_objective == "isl":
            mean = np.mean(lags, axis=0)
            radar = [r.radar_per_lag for r in ok if r.radar_per_lag is not None]
            rmean = np.mean(radar, axis=0) if radar else [None] * len(mean)
            rows = [(tau, v, vd, rv, None if rv is None else float(_db(rv)))
                    for tau, v, vd, rv in zip(range(1, cfg.max_lag), mean,
                                              _db(mean), rmean)]
            paths.append(_write_rows(
                os.path.join(out_dir, f"sidelobe_curve_{i}.csv"),
                ["lag", "sidelobe", "sidelobe_db", "radar_only_sidelobe",
                 "radar_only_sidelobe_db"], rows))
    summ = result.summary
    if cfg.mode == "tradeoff":
        metric = "bp_cost" if cfg.effective_objective == "beampattern" else "isl"
        rows = [(s["num_users"], s["beta"], s.get(f"{metric}_mean"),
                 s.get(f"{metric}_mean_db"), s.get(f"{metric}_stderr"),
                 s.get(f"radar_{metric}_mean"), s.get("sum_rate_mean"))
                for s in summ]
        paths.append(_write_rows(
            os.path.join(out_dir, f"{metric}_vs_beta.csv"),
            ["num_users", "beta", metric, f"{metric}_db", f"{metric}_stderr",
             f"radar_only_{metric}", "sum_rate"], rows))
        if cfg.effective_objective == "beampattern":
            rows = [(s["num_users"], s["beta"], s.get("sum_rate_mean"),
                     s["sum_rate_mean"] / s["num_users"] if s.get("sum_rate_mean") is not None else None,
                     s.get("pslr_mean"), s.get("pslr_mean_db")) for s in summ]
            paths.append(_write_rows(
                os.path.join(out_dir, "rate_vs_pslr.csv"),
                ["num_users", "beta", "sum_rate", "rate_per_user", "pslr",
                 "pslr_db"], rows))
    if cfg.mode == "imperfect-csi":
        rows = [(s["beta"], s["mu"], s["omega"], s.get("sum_rate_mean"),
                 s.get("pslr_mean"), s.get("pslr_mean_db"),
                 s.get("interference_mean"), s.get("leakage_mean")) for s in summ]
        paths.append(_write_rows(
            os.path.join(out_dir, "rate_pslr_vs_omega.csv"),
            ["beta", "mu", "omega", "sum_rate", "pslr", "pslr_db",
             "interference", "leakage"], rows))
    return paths


def write_outputs(result, out_dir):
    """Trial CSV, summary CSV and curve files for one run."""
    paths = [emit_csv(result.records, os.path.join(out_dir, "trials.csv")),
             emit_summary(result.summary, os.path.join(out_dir, "summary.csv"))]
    return paths + emit_curves(result, out_dir)
