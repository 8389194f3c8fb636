"""Beampattern matching of the added signal by majorization-minimization.

The transmit beampattern of ``X = X_c + Delta B`` at angle ``theta`` is
``G = ||X^H a(theta)||^2 = ||B^H abar + r||^2`` with ``abar = Delta^H a`` and
``r = X_c^H a``.  The matching cost over a grid is::

    g(B) = sum_u (||B^H abar_u + r_u|| - sqrt(d_u))^2

Each MM step majorizes the ``-2 sqrt(d_u) ||.||`` terms by a linear function
(Cauchy-Schwarz) and minimizes the resulting quadratic on the power sphere
``||B||_F^2 = L P_a`` with :mod:`sdisac.trust_region`.
"""
from dataclasses import dataclass, field

import numpy as np

from .core import TransmitWaveform, random_sphere_point
from .errors import DimensionMismatch, NoMainlobeRegion, NoSidelobeRegion
from .trust_region import eig_hermitian, solve_trust_region_eig

__all__ = [
    "AngleGrid", "ReferenceBeampattern", "BeampatternProblem", "MMResult",
    "steering_vector", "steering_matrix", "beampattern", "beampattern_on_grid",
    "reference_pattern", "build_beampattern_problem", "beampattern_cost",
    "beampattern_cost_expanded", "majorizer_matrix", "surrogate_cost",
    "linear_term", "energy_matched_scale", "rescale_reference",
    "mm_beampattern_optimize",
    "mm_beampattern_optimize_imperfect", "weighted_objective",
    "peak_sidelobe_ratio",
]

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class AngleGrid:
    """Uniform angle grid in degrees."""

    angles: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.size < 2 or np.any(np.diff(a) <= 0):
            raise ValueError("angle grid needs at least two increasing angles")
        object.__setattr__(self, "angles", a)

    @classmethod
    def uniform(cls, U=360, lo=-90.0, hi=90.0):
        """``U`` angles from ``lo`` in steps of ``(hi - lo) / U``.

        The default gives a 0.5 degree grid ``-90, -89.5, ..., 89.5`` that
        contains the default target angles exactly.
        """
        step = (hi - lo) / U
        return cls(lo + step * np.arange(U))

    @property
    def size(self):
        return self.angles.size

    @property
    def resolution(self):
        return float(self.angles[1] - self.angles[0])


@dataclass(frozen=True)
class ReferenceBeampattern:
    """Rectangular reference: ``scale`` inside each mainlobe, 0 elsewhere."""

    target_angles: np.ndarray
    beam_width: float
    values: np.ndarray
    scale: float
    grid: AngleGrid

    @property
    def mainlobe(self):
        return self.values > 0


def steering_vector(theta, N):
    """Half-wavelength ULA response, element ``n`` is ``exp(j pi n sin theta)``."""
    n = np.arange(N)
    return np.exp(1j * np.pi * n * np.sin(np.deg2rad(theta)))


def steering_matrix(grid, N):
    """``N x U`` matrix whose columns are steering vectors over ``grid``."""
    angles = grid.angles if isinstance(grid, AngleGrid) else np.asarray(grid)
    return np.exp(1j * np.pi * np.outer(np.arange(N), np.sin(np.deg2rad(angles))))


def _entries(X):
    return X.entries if isinstance(X, TransmitWaveform) else np.asarray(X)


def beampattern(X, theta):
    """Radiated energy ``||X^H a(theta)||^2`` toward ``theta`` (degrees)."""
    X = _entries(X)
    a = steering_vector(theta, X.shape[0])
    return float(np.linalg.norm(X.conj().T @ a) ** 2)


def beampattern_on_grid(X, grid):
    X = _entries(X)
    At = steering_matrix(grid, X.shape[0])
    return np.sum(np.abs(X.conj().T @ At) ** 2, axis=0)


def reference_pattern(targets=(-40.0, 0.0, 40.0), beam_width=10.0, grid=None,
                      scale=1.0):
    """Rectangular reference beampattern over ``grid``.

    Grid points within ``beam_width / 2`` of any target (closed interval)
    get ``scale``; all others get 0.
    """
    grid = AngleGrid.uniform() if grid is None else grid
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    lo, hi = grid.angles[0], grid.angles[-1]
    if np.any(targets < lo) or np.any(targets > hi):
        raise ValueError("target angles fall outside the grid")
    half = beam_width / 2.0 + 1e-9
    inside = np.any(np.abs(grid.angles[:, None] - targets[None, :]) <= half,
                    axis=1)
    return ReferenceBeampattern(target_angles=targets, beam_width=float(beam_width),
                                values=np.where(inside, float(scale), 0.0),
                                scale=float(scale), grid=grid)


def energy_matched_scale(X, reference):
    """Scale ``c`` that gives the reference the radiated energy of ``X``.

    Solves ``sum_u c d(theta_u) = sum_u G(X, theta_u)`` where ``d`` is the
    unit-height version of ``reference`` on its own grid.
    """
    unit = reference.values > 0
    if not unit.any():
        raise NoMainlobeRegion("reference has no mainlobe grid points")
    return float(beampattern_on_grid(X, reference.grid).sum() / unit.sum())


def rescale_reference(reference, scale):
    """Same mainlobes and grid, new height."""
    return ReferenceBeampattern(
        target_angles=reference.target_angles, beam_width=reference.beam_width,
        values=np.where(reference.values > 0, float(scale), 0.0),
        scale=float(scale), grid=reference.grid)


@dataclass(frozen=True)
class BeampatternProblem:
    """Precomputed data for one beampattern-matching instance.

    ``A`` (``abar_u`` as columns) and ``Z`` (``r_u`` as columns) do not
    change across MM iterations, and neither does the eigendecomposition of
    ``A A^H``; they are computed once here.
    """

    X_c: np.ndarray
    Delta: np.ndarray
    A: np.ndarray
    Z: np.ndarray
    sqrt_d: np.ndarray
    budget: float
    tol: float = 1e-4
    max_iter: int = 500
    reference: ReferenceBeampattern = None
    AZh: np.ndarray = field(default=None, repr=False)
    eig: tuple = field(default=None, repr=False)

    @property
    def shape(self):
        return self.A.shape[0], self.X_c.shape[1]


def build_beampattern_problem(X_c, Delta, reference, budget, tol=1e-4,
                              max_iter=500):
    X_c = np.asarray(X_c)
    Delta = np.asarray(Delta)
    if Delta.shape[0] != X_c.shape[0]:
        raise DimensionMismatch(f"X_c {X_c.shape} and Delta {Delta.shape}")
    if budget <= 0:
        raise ValueError("added-signal budget must be positive")
    At = steering_matrix(reference.grid, X_c.shape[0])
    A = Delta.conj().T @ At
    Z = X_c.conj().T @ At
    return BeampatternProblem(
        X_c=X_c, Delta=Delta, A=A, Z=Z, sqrt_d=np.sqrt(reference.values),
        budget=float(budget), tol=tol, max_iter=max_iter, reference=reference,
        AZh=A @ Z.conj().T, eig=eig_hermitian(A @ A.conj().T))


def _residual_norms(B, problem):
    V = B.conj().T @ problem.A + problem.Z
    return V, np.linalg.norm(V, axis=0)


def beampattern_cost(B, problem):
    """Square-root matching cost ``sum_u (sqrt(G_u) - sqrt(d_u))^2``."""
    _, nv = _residual_norms(B, problem)
    return float(np.sum((nv - problem.sqrt_d) ** 2))


def beampattern_cost_expanded(B, problem):
    """The same cost as ``||B^H A + Z||_F^2 - 2 sum sqrt(d) ||.|| + sum d``."""
    V, nv = _residual_norms(B, problem)
    return float(np.linalg.norm(V) ** 2 - 2.0 * np.dot(problem.sqrt_d, nv)
                 + np.sum(problem.sqrt_d ** 2))


def majorizer_matrix(B_t, problem):
    """Linear-majorizer matrix ``D_t`` at ``B_t``.

    Returns ``(D_t, n_degenerate)``.  Angles where ``||B_t^H abar_u + r_u||``
    vanishes while ``d_u > 0`` contribute nothing and are counted in
    ``n_degenerate``.
    """
    V, nv = _residual_norms(B_t, problem)
    sd = problem.sqrt_d
    degenerate = (nv < DEGENERATE_TOL) & (sd > 0)
    w = np.zeros_like(nv)
    ok = (sd > 0) & ~degenerate
    w[ok] = 2.0 * sd[ok] / nv[ok]
    D = (problem.A * w) @ V.conj().T
    return D, int(degenerate.sum())


def surrogate_cost(B, B_t, problem):
    """Quadratic majorizer of ``g`` built at ``B_t``, tight at ``B = B_t``.

    The constant is fixed by requiring equality at ``B_t``.
    """
    D, _ = majorizer_matrix(B_t, problem)

    def quad(Bx):
        V = Bx.conj().T @ problem.A + problem.Z
        return np.linalg.norm(V) ** 2 - np.real(np.vdot(Bx, D))

    const = beampattern_cost(B_t, problem) - quad(B_t)
    return float(quad(B) + const)


def linear_term(D, problem):
    """Linear term of the sphere subproblem for majorizer matrix ``D``.

    Minimizing ``||B^H A + Z||^2 - Re Tr(B^H D)`` on the sphere gives
    ``(A A^H + lam I) B = D / 2 - A Z^H``.
    """
    return 0.5 * D - problem.AZh


@dataclass
class MMResult:
    B: np.ndarray
    costs: list
    iterations: int
    converged: bool
    degenerate_terms: int = 0
    multipliers: list = field(default_factory=list)

    @property
    def cost(self):
        return self.costs[-1]


def _mm_loop(problem, B0, rng, objective, linear, eig):
    n, L = problem.shape
    if B0 is None:
        B = random_sphere_point((n, L), problem.budget, rng)
    else:
        B = np.array(B0, dtype=complex)
        if B.shape != (n, L):
            raise DimensionMismatch(f"B0 has shape {B.shape}, expected {(n, L)}")
    eigvals, Q = eig
    costs = [objective(B)]
    lams = []
    degenerate = 0
    converged = False
    t = 0
    while t < problem.max_iter:
        D, nd = majorizer_matrix(B, problem)
        degenerate += nd
        res = solve_trust_region_eig(linear(D, B), eigvals, Q, problem.budget)
        B = res.B
        lams.append(res.lam)
        costs.append(objective(B))
        t += 1
        if abs(costs[-1] - costs[-2]) <= problem.tol:
            converged = True
            break
    return MMResult(B=B, costs=costs, iterations=t, converged=converged,
                    degenerate_terms=degenerate, multipliers=lams)


def mm_beampattern_optimize(problem, B0=None, rng=None):
    """MM-LineSearch: minimize ``g(B)`` on the power sphere.

    Stops when the cost changes by at most ``problem.tol`` between
    iterations or after ``problem.max_iter`` updates; ``converged`` is False
    in the latter case and ``B`` is the last iterate.
    """
    return _mm_loop(problem, B0, rng,
                    objective=lambda B: beampattern_cost(B, problem),
                    linear=lambda D, B: linear_term(D, problem),
                    eig=problem.eig)


def weighted_objective(B, problem, R, mu, omega):
    """``omega g(B) + (1 - omega) mu^2 ||R^{1/2}(X_c + Delta B)||_F^2``."""
    R_mat = R.entries if hasattr(R, "entries") else np.asarray(R)
    X = problem.X_c + problem.Delta @ B
    interf = np.real(np.vdot(X, R_mat @ X))
    return float(omega * beampattern_cost(B, problem)
                 + (1.0 - omega) * mu**2 * interf)


def mm_beampattern_optimize_imperfect(problem, R, mu, omega, B0=None, rng=None):
    """MM-LineSearch on the interference-weighted objective.

    The surrogate stays a sphere-constrained quadratic with
    ``M = omega A A^H + (1 - omega) mu^2 Delta^H R Delta`` and linear term
    ``omega (D_t / 2 - A Z^H) - (1 - omega) mu^2 Delta^H R X_c``.
    """
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega={omega} outside [0, 1]")
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu={mu} outside [0, 1]")
    if omega == 1.0 or mu == 0.0:
        # Interference term vanishes; scaling g by omega keeps the same
        # subproblem minimizers, only the traced objective is scaled.
        return _mm_loop(
            problem, B0, rng,
            objective=lambda B: omega * beampattern_cost(B, problem),
            linear=lambda D, B: linear_term(D, problem),
            eig=problem.eig)
    R_mat = R.entries if hasattr(R, "entries") else np.asarray(R)
    c = (1.0 - omega) * mu**2
    Delta = problem.Delta
    M = omega * (problem.A @ problem.A.conj().T) + c * (Delta.conj().T @ R_mat @ Delta)
    lin_extra = c * (Delta.conj().T @ (R_mat @ problem.X_c))
    return _mm_loop(
        problem, B0, rng,
        objective=lambda B: weighted_objective(B, problem, R_mat, mu, omega),
        linear=lambda D, B: omega * linear_term(D, problem) - lin_extra,
        eig=eig_hermitian(M))


def peak_sidelobe_ratio(X, reference):
    """Peak beampattern outside all mainlobes over the peak inside them."""
    G = beampattern_on_grid(X, reference.grid)
    main = reference.mainlobe
    if not main.any():
        raise NoMainlobeRegion("reference has no mainlobe grid points")
    if main.all():
        raise NoSidelobeRegion("reference covers the whole grid")
    return float(G[~main].max() / G[main].max())
