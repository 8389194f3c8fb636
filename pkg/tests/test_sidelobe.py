import numpy as np
import pytest

from sdisac.core import compute_null_space_basis, random_sphere_point, shift_matrix
from sdisac.errors import DelayOutOfRange, ZeroPoint
from sdisac.sidelobe import (build_isl_problem, correlation_matrix,
                             correlation_stack, isl, isl_gradient,
                             per_lag_sidelobes, rcg_optimize, retract,
                             tangent_project, _line_quartic)

from conftest import crandn


def explicit_isl(X, P):
    L = X.shape[1]
    total = 0.0
    for tau in range(-P + 1, P):
        if tau and abs(tau) < L:  # a lag of L or more has no overlap
            total += np.linalg.norm(X @ shift_matrix(tau, L) @ X.conj().T) ** 2
    return total


def random_problem(rng, Nt=8, K=2, L=16, P=4):
    H = crandn(rng, K, Nt)
    X_c = 0.3 * crandn(rng, Nt, L)
    return build_isl_problem(X_c, compute_null_space_basis(H), budget=0.7 * L,
                             max_lag=P)


def test_correlation_examples(rng):
    X = crandn(rng, 5, 12)
    Om0 = correlation_matrix(X, 0)
    assert np.allclose(Om0, X @ X.conj().T)
    assert np.all(np.linalg.eigvalsh(Om0) >= -1e-12)
    for tau in range(1, 12):
        assert np.linalg.norm(correlation_matrix(X, -tau) - correlation_matrix(X, tau).conj().T) <= 1e-12
        assert np.allclose(correlation_matrix(X, tau), X @ shift_matrix(tau, 12) @ X.conj().T)
    x = np.array([[1, 1j]])
    assert correlation_matrix(x, 1)[0, 0] == pytest.approx(-1j)
    with pytest.raises(DelayOutOfRange):
        correlation_matrix(X, 12)


def test_isl_examples(rng):
    assert isl(np.array([[1, 1j]]), 2) == pytest.approx(2.0)
    X = np.zeros((3, 10), dtype=complex)
    X[:, 4] = crandn(rng, 3)
    assert all(isl(X, P) == 0 for P in range(2, 11))
    X = crandn(rng, 6, 20)
    for P in (2, 5, 16, 21):
        assert isl(X, P) == pytest.approx(explicit_isl(X, P), rel=1e-12)
        assert 2 * per_lag_sidelobes(X, P).sum() == pytest.approx(isl(X, P), rel=1e-10)
    with pytest.raises(DelayOutOfRange):
        isl(X, 22)


def test_per_lag_examples():
    lags = per_lag_sidelobes(np.ones((1, 4)), 4)
    assert lags[0] == pytest.approx(9.0)
    assert np.all(per_lag_sidelobes(np.zeros((3, 8)), 5) == 0)
    assert correlation_stack(np.ones((2, 4)), 3).shape == (2, 2, 2)


def test_gradient_shape_and_origin(rng):
    prob = build_isl_problem(np.zeros((8, 16)), compute_null_space_basis(crandn(rng, 2, 8)),
                             budget=4.0, max_lag=4)
    assert np.all(isl_gradient(np.zeros((6, 16)), prob) == 0)
    prob = random_problem(rng)
    g = isl_gradient(crandn(rng, 6, 16), prob)
    assert g.shape == (6, 16) and np.all(np.isfinite(g))


@pytest.mark.parametrize("dims", [(8, 2, 16, 4), (20, 4, 64, 16)])
def test_gradient_matches_finite_differences(rng, dims):
    prob = random_problem(rng, *dims)
    f = lambda B: isl(prob.waveform(B), prob.max_lag)
    for _ in range(10):
        B = crandn(rng, *prob.shape)
        V = crandn(rng, *prob.shape)
        g = isl_gradient(B, prob)
        h = 1e-4
        # Richardson-extrapolated central difference
        d1 = (f(B + h * V) - f(B - h * V)) / (2 * h)
        d2 = (f(B + h / 2 * V) - f(B - h / 2 * V)) / h
        fd = (4 * d2 - d1) / 3
        assert np.real(np.vdot(g, V)) == pytest.approx(fd, rel=1e-5)


def test_line_quartic_matches_direct_evaluation(rng):
    prob = random_problem(rng)
    X0 = prob.waveform(crandn(rng, *prob.shape))
    V = prob.Delta @ crandn(rng, *prob.shape)
    c = _line_quartic(prob, X0, V)
    for a in (-1.3, 0.0, 0.2, 2.0):
        assert np.polyval(c, a) == pytest.approx(isl(X0 + a * V, prob.max_lag), rel=1e-10)


def test_tangent_projection(rng):
    B = random_sphere_point((6, 16), 5.0, rng)
    assert np.linalg.norm(tangent_project(B, B, 5.0)) <= 1e-12 * np.linalg.norm(B)
    G = crandn(rng, 6, 16)
    T = tangent_project(B, G, 5.0)
    assert abs(np.real(np.vdot(B, T))) <= 1e-10 * np.linalg.norm(G) * np.linalg.norm(B)
    assert np.linalg.norm(tangent_project(B, T, 5.0) - T) <= 1e-12 * np.linalg.norm(G)


def test_retraction(rng):
    B = random_sphere_point((6, 16), 5.0, rng)
    assert np.allclose(retract(B, 5.0), B, rtol=0, atol=1e-12)
    C = crandn(rng, 6, 16)
    assert np.linalg.norm(retract(C, 5.0)) ** 2 == pytest.approx(5.0, rel=1e-12)
    assert np.allclose(retract(3.7 * C, 5.0), retract(C, 5.0), atol=1e-12)
    with pytest.raises(ZeroPoint):
        retract(np.zeros((2, 2)), 1.0)


def test_basis_rotation_invariance(rng):
    prob = random_problem(rng)
    Q, _ = np.linalg.qr(crandn(rng, 6, 6))
    B = crandn(rng, 6, 16)
    X1 = prob.X_c + prob.Delta @ B
    X2 = prob.X_c + (prob.Delta @ Q) @ (Q.conj().T @ B)
    assert isl(X2, 4) == pytest.approx(isl(X1, 4), rel=1e-10)


@pytest.mark.parametrize("initial_step", ["quartic", 1.0])
def test_rcg_descends_on_the_sphere(rng, initial_step):
    prob = random_problem(rng)
    prob = build_isl_problem(prob.X_c, prob.Delta, prob.budget, prob.max_lag, max_iter=150)
    res = rcg_optimize(prob, rng=0, initial_step=initial_step)
    assert np.all(np.diff(res.isl_trace) <= 0)
    assert res.isl < res.isl_trace[0]
    assert np.linalg.norm(res.B) ** 2 == pytest.approx(prob.budget, rel=1e-8)
    assert len(res.isl_trace) == res.iterations + 1


def test_rcg_iterates_stay_feasible(rng):
    prob = random_problem(rng)
    for cap in (1, 5, 20):
        p = build_isl_problem(prob.X_c, prob.Delta, prob.budget, prob.max_lag, max_iter=cap)
        B = rcg_optimize(p, rng=1).B
        assert np.linalg.norm(B) ** 2 == pytest.approx(prob.budget, rel=1e-8)


def test_rcg_radar_only_reaches_tolerance():
    # Small radar-only instance: enough freedom for the gradient to vanish.
    prob = build_isl_problem(np.zeros((4, 16)), np.eye(4), budget=16.0, max_lag=4)
    res = rcg_optimize(prob, rng=2)
    assert res.converged and res.grad_norms[-1] <= 1e-4
