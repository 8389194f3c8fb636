"""Seeded channel generation: Rayleigh, transmit-correlated, Gauss-Markov CSI.

Every generator takes a ``seed`` that may be an int, a
:class:`numpy.random.SeedSequence` or a :class:`numpy.random.Generator`.
Use :func:`trial_rng` to derive independent, order-free streams for Monte
Carlo trials.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidRho

__all__ = [
    "STREAMS", "trial_rng", "complex_normal", "rayleigh_channel",
    "CorrelationMatrix", "exponential_correlation", "CsiModel",
    "gauss_markov_realization",
]

# Fixed integer tags so that adding a stream never renumbers existing ones.
STREAMS = {
    "channel": 0,
    "csi_error": 1,
    "symbols": 2,
    "init": 3,
    "radar_init": 4,
    "interference": 5,
}


def trial_rng(master_seed, trial, stream):
    """Generator keyed by ``(master_seed, trial, stream)``.

    Streams for different trials (or tags) are statistically independent and
    do not depend on the order in which trials are evaluated.
    """
    tag = STREAMS[stream] if isinstance(stream, str) else int(stream)
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=(int(trial), tag))
    return np.random.default_rng(ss)


def complex_normal(rng, shape):
    """I.i.d. CN(0, 1) samples."""
    rng = np.random.default_rng(rng)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def rayleigh_channel(K, Nt, seed):
    """``K x Nt`` channel with i.i.d. CN(0, 1) entries."""
    if K < 1 or Nt < 1:
        raise DimensionMismatch("K and Nt must be positive")
    if K > Nt:
        raise DimensionMismatch(f"K={K} exceeds Nt={Nt}")
    return complex_normal(seed, (K, Nt))


@dataclass(frozen=True)
class CorrelationMatrix:
    """Transmit correlation ``R`` and its principal square root."""

    entries: np.ndarray
    sqrt: np.ndarray
    rho: complex = 0.0

    @property
    def num_tx(self):
        return self.entries.shape[0]


def hermitian_sqrt(R):
    """Principal square root of a Hermitian PSD matrix (negative eigenvalues clipped)."""
    R = 0.5 * (R + R.conj().T)
    w, V = np.linalg.eigh(R)
    w = np.clip(w, 0.0, None)
    root = (V * np.sqrt(w)) @ V.conj().T
    return 0.5 * (root + root.conj().T)


def exponential_correlation(Nt, rho=0.6):
    """Exponential model ``R[i, j] = rho ** |i - j|``.

    For complex ``rho`` the lower triangle uses ``conj(rho)`` so that ``R``
    stays Hermitian; for real ``rho`` this is the plain formula.
    """
    if abs(rho) > 1:
        raise InvalidRho(f"|rho|={abs(rho):.6g} exceeds 1")
    idx = np.arange(Nt)
    lag = idx[None, :] - idx[:, None]
    upper = np.power(complex(rho), np.abs(lag))
    R = np.where(lag >= 0, upper, upper.conj())
    if np.isrealobj(rho) or np.imag(rho) == 0:
        R = R.real.astype(complex)
    return CorrelationMatrix(entries=R, sqrt=hermitian_sqrt(R), rho=rho)


@dataclass(frozen=True)
class CsiModel:
    """Gauss-Markov CSI model around a whitened estimate ``H_hat``.

    ``error_level`` is ``mu``: 0 is perfect CSI, 1 is no CSI.
    """

    estimate: np.ndarray
    error_level: float
    correlation: CorrelationMatrix = field(default=None)

    def __post_init__(self):
        if not 0.0 <= self.error_level <= 1.0:
            raise ValueError(f"mu={self.error_level} outside [0, 1]")
        if self.correlation is None:
            object.__setattr__(
                self, "correlation",
                exponential_correlation(self.estimate.shape[1], 0.0))
        if self.correlation.num_tx != self.estimate.shape[1]:
            raise DimensionMismatch("correlation size does not match Nt")


def gauss_markov_realization(model, seed):
    """Draw ``(H_true, H_est)`` from the Gauss-Markov error model.

    ``H_est = sqrt(1 - mu^2) H_hat R^{1/2}`` is what the transmitter uses for
    precoding and the null space; ``H_true`` adds ``mu E R^{1/2}`` with
    ``E`` i.i.d. CN(0, 1).
    """
    mu = model.error_level
    H_hat = np.asarray(model.estimate)
    E = complex_normal(seed, H_hat.shape)
    R_half = model.correlation.sqrt
    H_tilde = np.sqrt(1.0 - mu**2) * H_hat
    H_est = H_tilde @ R_half
    H_true = (H_tilde + mu * E) @ R_half
    return H_true, H_est
