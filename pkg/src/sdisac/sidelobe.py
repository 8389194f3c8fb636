"""Range-sidelobe (ISL) suppression of the added signal on the power sphere.

For a waveform ``X`` the lag-``tau`` correlation matrix is
``Omega_tau = X J_tau X^H = sum_m x_m x_{m+tau}^H`` and the integrated
sidelobe level over lags ``0 < |tau| < P`` is
``r = sum_{tau != 0} ||Omega_tau||_F^2 = 2 sum_{tau=1}^{P-1} ||Omega_tau||_F^2``.

Gradients use the real inner product ``<U, V> = Re Tr(U^H V)``: the
Euclidean gradient ``grad r`` returned here satisfies
``r(B + t V) = r(B) + t <grad r, V> + O(t^2)``.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import TransmitWaveform, random_sphere_point, shift_columns
from .errors import DelayOutOfRange, DimensionMismatch, ZeroPoint

__all__ = [
    "IslProblem", "RcgResult", "LineSearchWarning", "correlation_matrix",
    "correlation_stack", "isl", "per_lag_sidelobes", "isl_gradient",
    "tangent_project", "retract", "rcg_optimize", "build_isl_problem",
]


class LineSearchWarning(RuntimeWarning):
    pass


def _entries(X):
    return X.entries if isinstance(X, TransmitWaveform) else np.asarray(X)


def correlation_matrix(X, tau):
    """``Omega_tau = X J_tau X^H`` for ``|tau| < L``."""
    X = _entries(X)
    return shift_columns(X, tau) @ X.conj().T


def _left_shifts(X, P):
    """Stack ``Y_tau[:, m] = X[:, m + tau]`` (zero filled), ``tau = 1..P-1``."""
    Nt, L = X.shape
    padded = np.concatenate([X, np.zeros((Nt, P), dtype=X.dtype)], axis=1)
    idx = np.arange(1, P)[:, None] + np.arange(L)[None, :]
    return padded[:, idx].transpose(1, 0, 2)


def _right_shifts(X, P):
    """Stack ``W_tau[:, m] = X[:, m - tau]`` (zero filled), ``tau = 1..P-1``."""
    Nt, L = X.shape
    padded = np.concatenate([np.zeros((Nt, P), dtype=X.dtype), X], axis=1)
    idx = P - np.arange(1, P)[:, None] + np.arange(L)[None, :]
    return padded[:, idx].transpose(1, 0, 2)


def correlation_stack(X, P):
    """``Omega_tau`` for ``tau = 1..P-1`` as an array of shape ``(P-1, Nt, Nt)``."""
    X = _entries(X)
    if P - 1 > X.shape[1] or P < 2:
        raise DelayOutOfRange(f"max lag P={P} needs 1 <= P - 1 <= L={X.shape[1]}")
    return X @ _left_shifts(X, P).conj().transpose(0, 2, 1)


def per_lag_sidelobes(X, P):
    """``||Omega_tau||_F^2`` for ``tau = 1..P-1``."""
    Om = correlation_stack(X, P)
    return np.sum(np.abs(Om) ** 2, axis=(1, 2))


def isl(X, P):
    """Integrated sidelobe level over lags ``0 < |tau| <= P - 1``."""
    return float(2.0 * per_lag_sidelobes(X, P).sum())


def _isl_wirtinger(X, P):
    """``d r / d X^*`` (Wirtinger) of the ISL at ``X``."""
    Y = _left_shifts(X, P)
    W = _right_shifts(X, P)
    Om = X @ Y.conj().transpose(0, 2, 1)
    G = np.matmul(Om, Y).sum(axis=0) + np.matmul(Om.conj().transpose(0, 2, 1), W).sum(axis=0)
    return 2.0 * G


@dataclass(frozen=True)
class IslProblem:
    X_c: np.ndarray
    Delta: np.ndarray
    max_lag: int = 16
    budget: float = 64.0
    tol: float = 1e-4
    max_iter: int = 1000

    @property
    def shape(self):
        return self.Delta.shape[1], self.X_c.shape[1]

    def waveform(self, B):
        return self.X_c + self.Delta @ B


def build_isl_problem(X_c, Delta, budget, max_lag=16, tol=1e-4, max_iter=1000):
    X_c = np.asarray(X_c)
    Delta = np.asarray(Delta)
    if Delta.shape[0] != X_c.shape[0]:
        raise DimensionMismatch(f"X_c {X_c.shape} and Delta {Delta.shape}")
    if max_lag < 2 or max_lag - 1 > X_c.shape[1]:
        raise DelayOutOfRange(f"max lag P={max_lag} needs 1 <= P - 1 <= L")
    if budget <= 0:
        raise ValueError("added-signal budget must be positive")
    return IslProblem(X_c=X_c, Delta=Delta, max_lag=int(max_lag),
                      budget=float(budget), tol=tol, max_iter=max_iter)


def isl_gradient(B, problem):
    """Euclidean gradient of ``r(B) = isl(X_c + Delta B)``.

    Equals ``2 sum_{tau != 0} Delta^H (X J X^H X J^T + X J^T X^H X J)``,
    i.e. twice the Wirtinger derivative ``d r / d B^*``.
    """
    X = problem.waveform(B)
    return 2.0 * (problem.Delta.conj().T @ _isl_wirtinger(X, problem.max_lag))


def _inner(U, V):
    return float(np.real(np.vdot(U, V)))


def tangent_project(B, G, budget=None):
    """Project ``G`` on the tangent space of the sphere through ``B``.

    ``budget`` is the squared radius ``L P_a``; it defaults to ``||B||_F^2``.
    """
    radius2 = _inner(B, B) if budget is None else budget
    return G - (_inner(B, G) / radius2) * B


def retract(B, budget):
    """Map ``B`` to the nearest point of ``{||B||_F^2 = budget}``."""
    nrm = np.linalg.norm(B)
    if nrm < 1e-14:
        raise ZeroPoint("cannot retract a zero matrix onto the sphere")
    return np.sqrt(budget) * B / nrm


def _line_quartic(problem, X0, V):
    """Coefficients (highest first) of ``a -> isl(X0 + a V)``."""
    P = problem.max_lag
    Y0 = _left_shifts(X0, P).conj().transpose(0, 2, 1)
    Yv = _left_shifts(V, P).conj().transpose(0, 2, 1)
    C0 = X0 @ Y0
    C1 = X0 @ Yv + V @ Y0
    C2 = V @ Yv

    def ip(a, b):
        return float(np.real(np.vdot(a, b)))

    c4 = ip(C2, C2)
    c3 = 2 * ip(C1, C2)
    c2 = ip(C1, C1) + 2 * ip(C0, C2)
    c1 = 2 * ip(C0, C1)
    c0 = ip(C0, C0)
    return 2.0 * np.array([c4, c3, c2, c1, c0])


def _quartic_step(coeffs, fallback):
    """Smallest-value positive stationary point of the quartic."""
    roots = np.roots(np.polyder(coeffs))
    scale = max(1.0, float(np.max(np.abs(roots)))) if roots.size else 1.0
    real = roots[np.abs(roots.imag) <= 1e-8 * scale].real
    real = real[real > 0]
    if real.size == 0:
        return fallback
    return float(real[np.argmin(np.polyval(coeffs, real))])


@dataclass
class RcgResult:
    B: np.ndarray
    isl_trace: list
    grad_norms: list
    iterations: int
    converged: bool
    line_search_failures: int = 0
    steps: list = field(default_factory=list)

    @property
    def isl(self):
        return self.isl_trace[-1]


def rcg_optimize(problem, B0=None, rng=None, initial_step="quartic",
                 armijo_c=1e-4, contraction=0.5, max_backtracks=50,
                 callback=None):
    """Riemannian conjugate gradient (Polak-Ribiere) for the ISL.

    Each iteration moves along ``Phi_t`` with an Armijo backtracking step,
    retracts to the sphere, and updates
    ``Phi_{t+1} = -grad_{t+1} + eta P(Phi_t)`` with the Polak-Ribiere
    coefficient clamped at 0.  The first trial step of each backtracking
    search is the exact minimizer of the quartic ``a -> r(B + a Phi)`` when
    ``initial_step == "quartic"``, otherwise the given float.

    Stops when ``||grad||_F <= problem.tol`` or after ``problem.max_iter``
    iterations.  ``callback(t, B)``, if given, sees every iterate including
    the starting point.
    """
    n, L = problem.shape
    budget = problem.budget
    P = problem.max_lag
    if B0 is None:
        B = random_sphere_point((n, L), budget, rng)
    else:
        B = retract(np.array(B0, dtype=complex), budget)

    def f(Bx):
        return isl(problem.waveform(Bx), P)

    def rgrad(Bx):
        return tangent_project(Bx, isl_gradient(Bx, problem), budget)

    if callback is not None:
        callback(0, B)
    fval = f(B)
    g = rgrad(B)
    gnorm = np.linalg.norm(g)
    Phi = -g
    trace, gnorms, steps = [fval], [gnorm], []
    failures = 0
    converged = False
    last_step = 1.0
    t = 0
    while True:
        if gnorm <= problem.tol:
            converged = True
            break
        if t >= problem.max_iter:
            break
        slope = _inner(g, Phi)
        if slope >= 0:
            Phi, slope = -g, -gnorm**2
        accepted = None
        for direction_try in range(2):
            if initial_step == "quartic":
                coeffs = _line_quartic(problem, problem.waveform(B),
                                       problem.Delta @ Phi)
                a = _quartic_step(coeffs, last_step)
            else:
                a = float(initial_step)
            for _ in range(max_backtracks + 1):
                if a < 1e-16:
                    break
                Bn = retract(B + a * Phi, budget)
                fn = f(Bn)
                if fn <= fval + armijo_c * a * slope:
                    accepted = (a, Bn, fn)
                    break
                a *= contraction
            if accepted is not None:
                break
            failures += 1
            Phi, slope = -g, -gnorm**2
        if accepted is None:
            warnings.warn("Armijo search failed along steepest descent; "
                          "returning the last iterate", LineSearchWarning)
            break
        a, Bn, fn = accepted
        last_step = a
        gn = rgrad(Bn)
        gprev_t = tangent_project(Bn, g, budget)
        eta = max(0.0, _inner(gn, gn - gprev_t) / gnorm**2)
        Phi = -gn + eta * tangent_project(Bn, Phi, budget)
        B, fval, g = Bn, fn, gn
        gnorm = np.linalg.norm(g)
        t += 1
        if callback is not None:
            callback(t, B)
        trace.append(fval)
        gnorms.append(gnorm)
        steps.append(a)
    return RcgResult(B=B, isl_trace=trace, grad_norms=gnorms, iterations=t,
                     converged=converged, line_search_failures=failures,
                     steps=steps)
