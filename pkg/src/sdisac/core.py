"""Null-space extraction, shift matrices and waveform composition.

Matrices are plain complex :class:`numpy.ndarray` objects.  The channel ``H``
is ``K x Nt`` (row ``k`` is what user ``k`` sees), the communication signal
``X_c`` is ``Nt x L`` and the added signal ``B`` is ``(Nt - K) x L``.

Power values are linear throughout.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (DelayOutOfRange, DimensionMismatch, NullSpaceEmpty,
                     PowerBudgetExceeded, RankDeficient)

__all__ = [
    "RANK_TOL", "PowerSplit", "TransmitWaveform", "compute_null_space_basis",
    "shift_matrix", "shift_columns", "compose_waveform", "power_split",
    "random_sphere_point",
]

#: Singular values below ``RANK_TOL * sigma_max`` are treated as zero.
RANK_TOL = 1e-8


@dataclass(frozen=True)
class PowerSplit:
    """Split of the total power ``P_t`` between communication and added signal."""

    total: float
    comm: float

    @property
    def added(self) -> float:
        return self.total - self.comm

    @property
    def ratio(self) -> float:
        """Power split ratio ``beta = P_c / P_t``."""
        return self.comm / self.total


@dataclass(frozen=True)
class TransmitWaveform:
    """Composite waveform ``X = X_c + Delta @ B`` with both parts kept."""

    comm_part: np.ndarray
    added_part: np.ndarray

    @property
    def entries(self) -> np.ndarray:
        return self.comm_part + self.added_part

    @property
    def num_tx(self) -> int:
        return self.comm_part.shape[0]

    @property
    def block_len(self) -> int:
        return self.comm_part.shape[1]


def compute_null_space_basis(H, rank_tol=RANK_TOL):
    """Orthonormal basis of the right null space of ``H``.

    Parameters
    ----------
    H : array_like, shape (K, Nt)
        Channel matrix with ``K < Nt``.
    rank_tol : float
        Relative threshold on the singular values.

    Returns
    -------
    ndarray, shape (Nt, Nt - K)
        Semi-unitary ``Delta`` with ``H @ Delta == 0``.

    Raises
    ------
    NullSpaceEmpty
        If ``K >= Nt``.
    RankDeficient
        If ``H`` has fewer than ``K`` significant singular values.  The
        exception carries the larger basis in ``.basis``.
    """
    H = np.atleast_2d(np.asarray(H))
    K, Nt = H.shape
    if K >= Nt:
        raise NullSpaceEmpty(f"no null space for a {K}x{Nt} channel")
    _, s, Vh = np.linalg.svd(H)
    rank = int(np.sum(s > rank_tol * s[0])) if s[0] > 0 else 0
    V = Vh.conj().T
    if rank < K:
        raise RankDeficient(
            f"channel rank {rank} < {K} users", basis=V[:, rank:], rank=rank)
    return V[:, K:]


def shift_matrix(tau, L):
    """``L x L`` shift matrix with ones where ``j - i == tau``.

    ``X @ shift_matrix(tau, L)`` moves the columns of ``X`` ``tau`` places to
    the right, filling with zeros.
    """
    tau = int(tau)
    if L < 1:
        raise ValueError("L must be positive")
    if abs(tau) >= L:
        raise DelayOutOfRange(f"|tau|={abs(tau)} must be below L={L}")
    return np.eye(L, k=tau)


def shift_columns(X, tau):
    """Compute ``X @ shift_matrix(tau, L)`` without forming the matrix."""
    X = np.asarray(X)
    L = X.shape[-1]
    if abs(tau) >= L:
        raise DelayOutOfRange(f"|tau|={abs(tau)} must be below L={L}")
    out = np.zeros_like(X)
    if tau >= 0:
        out[..., tau:] = X[..., :L - tau]
    else:
        out[..., :L + tau] = X[..., -tau:]
    return out


def compose_waveform(X_c, Delta, B):
    """Superimpose the null-space signal ``Delta @ B`` on ``X_c``."""
    X_c = np.asarray(X_c)
    Delta = np.asarray(Delta)
    B = np.asarray(B)
    if Delta.shape[0] != X_c.shape[0] or Delta.shape[1] != B.shape[0] \
            or B.shape[1] != X_c.shape[1]:
        raise DimensionMismatch(
            f"X_c {X_c.shape}, Delta {Delta.shape}, B {B.shape} are inconsistent")
    return TransmitWaveform(comm_part=X_c, added_part=Delta @ B)


def power_split(total, comm):
    if total <= 0:
        raise ValueError("total power must be positive")
    if comm < 0:
        raise ValueError("communication power must be nonnegative")
    if comm > total:
        raise PowerBudgetExceeded(
            f"communication power {comm:.6g} exceeds the budget {total:.6g}")
    return PowerSplit(total=float(total), comm=float(comm))


def random_sphere_point(shape, budget, rng):
    """Uniform random point on ``{B : ||B||_F^2 = budget}``."""
    rng = np.random.default_rng(rng)
    B = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return np.sqrt(budget) * B / np.linalg.norm(B)
