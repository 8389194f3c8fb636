"""Sphere-constrained quadratic subproblem solved by a 1-D secular search.

The problem is::

    minimize  Tr(B^H M B) - 2 Re Tr(B^H G)   subject to  ||B||_F^2 = budget

with ``M`` Hermitian PSD.  Its KKT point is ``B = (M + lam I)^{-1} G`` with
``lam > -min eig(M)`` picked so that ``P(lam) = ||B||_F^2`` hits the budget.
After diagonalizing ``M = Q diag(ev) Q^H``::

    P(lam) = sum_{i,j} |[Q^H G]_{ij}|^2 / (ev_i + lam)^2

which decreases monotonically on ``(-min ev, inf)``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketingFailed

__all__ = ["TrustRegionResult", "eig_hermitian", "secular_norm",
           "solve_trust_region", "solve_trust_region_eig"]


@dataclass(frozen=True)
class TrustRegionResult:
    B: np.ndarray
    lam: float
    hard_case: bool = False


def eig_hermitian(M):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    M = 0.5 * (M + M.conj().T)
    return np.linalg.eigh(M)


def secular_norm(lam, weights, eigvals):
    """``P(lam)`` given the row energies ``weights_i = sum_j |[Q^H G]_ij|^2``."""
    return float(np.sum(weights / (eigvals + lam) ** 2))


def _bracket(weights, eigvals, budget):
    ev_min = eigvals[0]
    lo = -ev_min + 1e-12 * (1.0 + abs(ev_min))
    width = 1.0
    hi = lo + width
    for _ in range(2000):
        if secular_norm(hi, weights, eigvals) < budget:
            return lo, hi
        width *= 2.0
        hi = lo + width
    raise BracketingFailed("could not find an upper bracket for the multiplier")


def solve_trust_region_eig(G, eigvals, Q, budget):
    """Solve the subproblem with ``M`` given through its eigendecomposition."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    QG = Q.conj().T @ G
    weights = np.sum(np.abs(QG) ** 2, axis=1)
    ev_min = eigvals[0]
    lo = -ev_min + 1e-12 * (1.0 + abs(ev_min))
    if secular_norm(lo, weights, eigvals) < budget:
        # Hard case: G has (almost) no energy along the bottom eigenspace, so
        # P never reaches the budget; fill the gap along that eigenspace.
        bottom = eigvals <= ev_min + 1e-12 * (1.0 + abs(ev_min))
        part = np.zeros_like(QG)
        rest = ~bottom
        part[rest] = QG[rest] / (eigvals[rest] - ev_min)[:, None]
        missing = budget - float(np.sum(np.abs(part) ** 2))
        if missing < 0:
            raise BracketingFailed("hard case with an infeasible residual norm")
        i0 = np.flatnonzero(bottom)[0]
        row = QG[i0]
        nrm = np.linalg.norm(row)
        if nrm > 0:
            part[i0] = row / nrm * np.sqrt(missing)
        else:
            part[i0, 0] = np.sqrt(missing)
        return TrustRegionResult(B=Q @ part, lam=float(-ev_min), hard_case=True)
    lo, hi = _bracket(weights, eigvals, budget)

    # 1/sqrt(P) is close to linear in lam, which keeps the root find well
    # conditioned over the many decades P spans.
    target = 1.0 / np.sqrt(budget)

    def f(lam):
        return 1.0 / np.sqrt(secular_norm(lam, weights, eigvals)) - target

    lam = brentq(f, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    B = Q @ (QG / (eigvals + lam)[:, None])
    return TrustRegionResult(B=B, lam=float(lam))


def solve_trust_region(G, A, budget, eig=None):
    """Solve the subproblem with ``M = A A^H``.

    Parameters
    ----------
    G : ndarray, shape (n, L)
        Linear term; the solution is ``(A A^H + lam I)^{-1} G``.
    A : ndarray, shape (n, U)
        Steering matrix projected on the null space.
    budget : float
        Required ``||B||_F^2``.
    eig : tuple, optional
        Precomputed ``(eigvals, Q)`` of ``A A^H``.
    """
    if eig is None:
        eig = eig_hermitian(A @ A.conj().T)
    eigvals, Q = eig
    return solve_trust_region_eig(np.asarray(G), eigvals, Q, budget)
