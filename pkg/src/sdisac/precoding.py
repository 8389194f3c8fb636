"""Minimum-power SINR-constrained precoding and communication metrics.

The SINR of user ``k`` for precoder ``F`` (columns ``f_k``) is::

    |h_k^H f_k|^2 / (sum_{j != k} |h_k^H f_j|^2 + L * sigma_c^2)

with ``h_k^H`` the ``k``-th row of the ``K x Nt`` channel.  The ``L`` factor
pairs with symbol rows of unit energy (``E[S S^H] = I_K``), so the
communication power is ``P_c = ||F||_F^2 / L``.
"""
from dataclasses import dataclass

import numpy as np

from .channels import CorrelationMatrix, hermitian_sqrt
from .core import TransmitWaveform
from .errors import DimensionMismatch, SolverNotConverged

__all__ = [
    "QosConfig", "Precoder", "SymbolBlock", "min_power_precoder",
    "min_power_precoder_sdr", "single_user_precoder", "generate_symbols",
    "achieved_sinr", "sum_rate", "waveform_sinr",
    "effective_interference_energy", "scale_to_power", "db2lin", "lin2db",
]


def db2lin(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def lin2db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class QosConfig:
    """Per-user SINR targets (linear), noise variance and block length."""

    sinr_targets: np.ndarray
    noise_var: float = 0.01
    block_len: int = 64

    def __post_init__(self):
        targets = np.atleast_1d(np.asarray(self.sinr_targets, dtype=float))
        if np.any(targets <= 0):
            raise ValueError("SINR targets must be positive")
        if self.noise_var <= 0:
            raise ValueError("noise variance must be positive")
        if self.block_len < 1:
            raise ValueError("block length must be positive")
        object.__setattr__(self, "sinr_targets", targets)

    @classmethod
    def uniform(cls, K, gamma, noise_var=0.01, block_len=64):
        """Same linear target ``gamma`` for all ``K`` users."""
        return cls(np.full(K, float(gamma)), noise_var, block_len)

    @property
    def noise_energy(self):
        """Noise energy over one block, ``L * sigma_c^2``."""
        return self.block_len * self.noise_var


@dataclass(frozen=True)
class Precoder:
    F: np.ndarray
    block_len: int
    sinr: np.ndarray
    iterations: int = 0

    @property
    def comm_power(self):
        return float(np.linalg.norm(self.F) ** 2 / self.block_len)


@dataclass(frozen=True)
class SymbolBlock:
    S: np.ndarray
    constellation: str = "qpsk"


def _check_targets(H, qos):
    H = np.atleast_2d(np.asarray(H))
    K = H.shape[0]
    gamma = qos.sinr_targets
    if gamma.size == 1 and K > 1:
        gamma = np.full(K, gamma[0])
    if gamma.size != K:
        raise DimensionMismatch(f"{gamma.size} SINR targets for {K} users")
    return H, gamma


def single_user_precoder(h, gamma, noise_energy):
    """Closed-form minimum-power beamformer for one user (matched filter).

    ``h`` is the user's channel row; returns ``f`` with
    ``|h f|^2 = gamma * noise_energy``.
    """
    h = np.asarray(h).ravel()
    return np.sqrt(gamma * noise_energy) / np.vdot(h, h).real * h.conj()


def _downlink_powers(H, W, gamma, noise):
    """Powers making every downlink SINR equal to its target for beams ``W``."""
    G = np.abs(H @ W) ** 2
    M = -G
    M[np.diag_indices_from(M)] = np.diag(G) / gamma
    return np.linalg.solve(M, np.full(len(gamma), noise))


def min_power_precoder(H, qos, tol=1e-9, max_iter=10_000):
    """Minimum ``||F||_F^2`` precoder meeting every SINR target.

    Solved through uplink-downlink duality: the dual uplink powers follow
    the fixed point ``q_k = gamma_k / ((1 + gamma_k) h_k^H Sigma(q)^{-1} h_k)``
    with ``Sigma(q) = L sigma^2 I + sum_j q_j h_j h_j^H``.  The MMSE
    receive filters at the fixed point are the optimal downlink beam
    directions; the downlink powers then follow from a ``K x K`` linear
    system that makes every constraint active.

    Raises
    ------
    SolverNotConverged
        If the relative change of the total dual power stays above ``tol``
        after ``max_iter`` iterations, or the final downlink powers are not
        positive.
    """
    H, gamma = _check_targets(H, qos)
    K, Nt = H.shape
    noise = qos.noise_energy
    Hh = H.conj().T  # columns h_k
    q = np.zeros(K)
    total = 0.0
    converged = False
    for it in range(1, max_iter + 1):
        Sigma = noise * np.eye(Nt) + (Hh * q) @ H
        SiH = np.linalg.solve(Sigma, Hh)
        quad = np.einsum("kn,nk->k", H, SiH).real
        q = gamma / ((1.0 + gamma) * quad)
        new_total = q.sum()
        if abs(new_total - total) <= tol * new_total:
            converged = True
            break
        total = new_total
    if not converged:
        raise SolverNotConverged(
            f"duality fixed point not converged after {max_iter} iterations")
    W = SiH / np.linalg.norm(SiH, axis=0)
    p = _downlink_powers(H, W, gamma, noise)
    if np.any(p <= 0) or not np.all(np.isfinite(p)):
        raise SolverNotConverged("downlink power system has no positive solution")
    F = W * np.sqrt(p)
    sinr = _sinr(H, F, noise)
    if np.any(sinr < gamma * (1 - 1e-6)):
        raise SolverNotConverged("SINR constraints not met to tolerance")
    return Precoder(F=F, block_len=qos.block_len, sinr=sinr, iterations=it)


def min_power_precoder_sdr(H, qos, solver="CLARABEL"):
    """Same problem solved through its semidefinite relaxation with cvxpy.

    The relaxation is tight for this problem class; each beamformer is
    recovered from the principal eigenvector of its covariance and the
    powers are then re-fitted so that every SINR constraint is active.
    """
    import cvxpy as cp

    H, gamma = _check_targets(H, qos)
    K, Nt = H.shape
    noise = qos.noise_energy
    T = [cp.Variable((Nt, Nt), hermitian=True) for _ in range(K)]
    cons = [t >> 0 for t in T]
    for k in range(K):
        hk = H[k]
        gain = [cp.real(hk @ T[j] @ hk.conj()) for j in range(K)]
        interf = sum(gain[j] for j in range(K) if j != k) if K > 1 else 0
        cons.append(gain[k] / gamma[k] - interf >= noise)
    prob = cp.Problem(cp.Minimize(cp.real(sum(cp.trace(t) for t in T))), cons)
    prob.solve(solver=solver)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise SolverNotConverged(f"SDR solver status {prob.status}")
    W = np.empty((Nt, K), dtype=complex)
    for k in range(K):
        w, V = np.linalg.eigh(T[k].value)
        W[:, k] = V[:, -1]
    p = _downlink_powers(H, W, gamma, noise)
    F = W * np.sqrt(np.clip(p, 0, None))
    return Precoder(F=F, block_len=qos.block_len, sinr=_sinr(H, F, noise))


def scale_to_power(H, precoder, power, qos):
    """Scale ``F`` up so that ``||F||_F^2 / L == power``.

    A common scale factor larger than one raises every SINR, so the QoS
    stays satisfied.
    """
    F = precoder.F * np.sqrt(power / precoder.comm_power)
    return Precoder(F=F, block_len=precoder.block_len,
                    sinr=achieved_sinr(H, F, qos),
                    iterations=precoder.iterations)


def generate_symbols(K, L, seed):
    """QPSK block with entries ``(+-1 +- 1j) / sqrt(2 L)``."""
    if K < 1 or L < 1:
        raise ValueError("K and L must be positive")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(2, K, L))
    S = ((2 * bits[0] - 1) + 1j * (2 * bits[1] - 1)) / np.sqrt(2.0 * L)
    return SymbolBlock(S=S)


def _sinr(H, F, noise, leakage=None):
    gains = np.abs(H @ F) ** 2
    desired = np.diag(gains).copy()
    interf = gains.sum(axis=1) - desired
    if leakage is not None:
        interf = interf + leakage
    return desired / (interf + noise)


def achieved_sinr(H, F, qos, added=None):
    """Linear SINR of every user.

    ``added`` is an optional ``Nt x L`` added-signal block (``Delta @ B``);
    its energy at each user, ``||h_k^H Delta B||^2``, counts as interference.
    """
    H = np.atleast_2d(np.asarray(H))
    F = np.asarray(F)
    if H.shape[1] != F.shape[0] or F.shape[1] != H.shape[0]:
        raise DimensionMismatch(f"H {H.shape} and F {F.shape} are inconsistent")
    leakage = None
    if added is not None:
        leakage = np.sum(np.abs(H @ np.asarray(added)) ** 2, axis=1)
    return _sinr(H, F, qos.noise_energy, leakage)


def sum_rate(H, F, qos, added=None):
    """Sum of ``log2(1 + SINR_k)`` in bit/s/Hz."""
    return float(np.sum(np.log2(1.0 + achieved_sinr(H, F, qos, added))))


def waveform_sinr(H, F, S, X, qos):
    """Per-user SINR measured on one realized block ``X``.

    The desired part of user ``k`` is ``h_k^H f_k s_k``; everything else user
    ``k`` receives from ``X`` counts as interference.
    """
    H = np.atleast_2d(np.asarray(H))
    X = X.entries if isinstance(X, TransmitWaveform) else np.asarray(X)
    desired = (H @ F)[np.arange(H.shape[0]), np.arange(H.shape[0])][:, None] * S
    received = H @ X
    sig = np.sum(np.abs(desired) ** 2, axis=1)
    interf = np.sum(np.abs(received - desired) ** 2, axis=1)
    return sig / (interf + qos.noise_energy)


def effective_interference_energy(X, R, mu):
    """Expected interference energy per user from the CSI error.

    Returns ``mu^2 * ||R^{1/2} X||_F^2``, the mean of
    ``||mu * e^T R^{1/2} X||^2`` over an error row ``e`` with i.i.d. CN(0, 1)
    entries.  Summed over ``K`` users the expectation is ``K`` times larger.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu={mu} outside [0, 1]")
    X = X.entries if isinstance(X, TransmitWaveform) else np.asarray(X)
    R_half = R.sqrt if isinstance(R, CorrelationMatrix) else hermitian_sqrt(np.asarray(R))
    if R_half.shape[1] != X.shape[0]:
        raise DimensionMismatch("correlation size does not match the waveform")
    return float(mu**2 * np.linalg.norm(R_half @ X) ** 2)
