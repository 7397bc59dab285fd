from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.polynomial import legendre as npleg

from logspec.errors import DomainError
from logspec.fracops import caputo_power_oracle
from logspec.solvers import SolverConfig
from logspec.spacetime import (
    DiffusionProblem,
    assemble_diffusion,
    decoupling_residual,
    l2_error,
    legendre_difference_eval,
    legendre_galerkin_1d,
    solve_diffusion,
    solve_diffusion_system,
    spatial_load,
)


def manufactured(nu: float, mu: float = 0.6):
    def u(x1, x2, t):
        return (t**mu + t ** (2 * mu)) * np.sin(np.pi * x1) * np.sin(np.pi * x2)

    d1, d2 = caputo_power_oracle(nu, mu), caputo_power_oracle(nu, 2 * mu)

    def f(x1, x2, t):
        s = np.sin(np.pi * x1) * np.sin(np.pi * x2)
        return (d1(t) + d2(t)) * s + 2 * np.pi**2 * u(x1, x2, t)

    return u, f


# {{{ space discretization


def test_problem_validation() -> None:
    with pytest.raises(DomainError):
        DiffusionProblem(1.0, lambda x1, x2, t: 0 * t)
    with pytest.raises(DomainError):
        DiffusionProblem(0.5, lambda x1, x2, t: 0 * t, T=0.0)
    with pytest.raises(ValueError):
        legendre_galerkin_1d(1)


def test_basis_vanishes_at_ends() -> None:
    psi = legendre_difference_eval(10, np.array([-1.0, 1.0]))
    assert psi.shape == (11, 2)
    assert np.allclose(psi, 0, atol=1e-14)


@pytest.mark.parametrize("N_x", [2, 8, 20])
def test_matrices_vs_quadrature(N_x: int) -> None:
    op = legendre_galerkin_1d(N_x)
    K = op.size
    assert K == N_x - 1

    x, w = npleg.leggauss(64)
    psi = legendre_difference_eval(K - 1, x)
    dV = np.array([npleg.legval(x, npleg.legder(np.eye(K + 2)[n])) for n in range(K + 2)])
    dpsi = dV[:-2] - dV[2:]

    A = (dpsi * w) @ dpsi.T
    B = (psi * w) @ psi.T
    assert np.allclose(op.stiffness, A, rtol=0, atol=1e-12 * np.max(A))
    assert np.allclose(op.mass, B, rtol=0, atol=1e-13)

    k = np.arange(K)
    assert np.allclose(np.diag(op.stiffness), 2 * (2 * k + 3))
    assert np.allclose(op.stiffness, np.diag(np.diag(op.stiffness)))
    i, j = np.nonzero(np.abs(op.mass) > 1e-15)
    assert set(np.abs(i - j)) <= {0, 2}
    assert np.allclose(op.mass, op.mass.T)


@pytest.mark.parametrize("N_x", [4, 16, 32])
def test_eigendecomposition(N_x: int) -> None:
    op = legendre_galerkin_1d(N_x)
    E, lam = op.eigvecs, op.eigvals
    assert np.allclose(E.T @ op.mass @ E, np.eye(op.size), atol=1e-10)
    assert np.allclose(op.stiffness @ E, op.mass @ E * lam, atol=1e-8 * lam.max())
    assert np.all(lam > 0)


def test_smallest_eigenvalue() -> None:
    lam = legendre_galerkin_1d(32).eigvals
    assert lam[0] == pytest.approx(math.pi**2 / 4, abs=1e-6)
    assert lam[1] == pytest.approx(math.pi**2, abs=1e-6)


def test_spatial_load_reports_nonfinite() -> None:
    op = legendre_galerkin_1d(6)
    with pytest.raises(ArithmeticError, match="not finite"):
        spatial_load(lambda x1, x2, t: np.where(x1 > 0.5, np.nan, 1.0), op, np.array([0.5]))


# }}}


# {{{ solves


def test_zero_forcing() -> None:
    p = DiffusionProblem(0.5, lambda x1, x2, t: np.zeros_like(t))
    sol = solve_diffusion(p, 8, SolverConfig(N=8))
    assert np.all(sol.coeffs == 0)


@pytest.mark.parametrize("nu", [0.3, 0.7])
def test_decoupling_residual(nu: float) -> None:
    _, f = manufactured(nu)
    system = assemble_diffusion(DiffusionProblem(nu, f), 12, SolverConfig(N=16))
    sol = solve_diffusion_system(system)
    assert decoupling_residual(system, sol) < 1e-8
    assert np.isfinite(sol.cond)

    # modes are independent, so solving twice is bitwise reproducible
    again = solve_diffusion_system(system)
    assert np.array_equal(sol.coeffs, again.coeffs)


def test_symmetry() -> None:
    p = DiffusionProblem(0.5, lambda x1, x2, t: np.exp(x1 * x2 * t), T=0.5)
    sol = solve_diffusion(p, 12, SolverConfig(N=16))
    U = sol.modal()
    assert np.allclose(U, U.transpose(1, 0, 2), atol=1e-10 * np.max(np.abs(U)))

    x = np.linspace(-0.9, 0.9, 5)
    G = sol.grid(x, x, np.array([0.1, 0.5]))
    assert np.allclose(G, G.transpose(1, 0, 2), atol=1e-10)


def test_boundary_and_initial_conditions() -> None:
    p = DiffusionProblem(0.7, lambda x1, x2, t: np.exp(x1 * x2 * t) * (1 + x1), T=0.5)
    sol = solve_diffusion(p, 10, SolverConfig(N=12))

    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, 20)
    t = rng.uniform(0, 0.5, 20)
    one = np.ones_like(x)
    for a, b in ((one, x), (-one, x), (x, one), (x, -one)):
        assert np.max(np.abs(sol(a, b, t))) <= 1e-12
    assert np.max(np.abs(sol(x, x[::-1], 0 * t))) <= 1e-9


def test_pointwise_and_grid_agree() -> None:
    u, f = manufactured(0.5)
    sol = solve_diffusion(DiffusionProblem(0.5, f), 10, SolverConfig(N=12))
    x = np.array([-0.3, 0.2, 0.8])
    t = np.array([0.25, 0.75])
    G = sol.grid(x, x, t)
    X1, X2, TT = np.meshgrid(x, x, t, indexing="ij")
    assert np.allclose(sol(X1, X2, TT), G, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("nu", [0.5, 0.9])
def test_manufactured_convergence(nu: float) -> None:
    u, f = manufactured(nu)
    p = DiffusionProblem(nu, f)
    errors = [l2_error(solve_diffusion(p, 16, SolverConfig(N=N)), u) for N in (8, 16, 24, 32)]
    for a, b in zip(errors, errors[1:]):
        assert b <= a / 10, errors

    # in space, at a fixed and accurate time discretization
    errors = [l2_error(solve_diffusion(p, nx, SolverConfig(N=40)), u) for nx in (6, 10, 14)]
    assert errors[0] > 10 * errors[1] > 100 * errors[2]


def test_time_scaling() -> None:
    # u = t sin(pi x1) sin(pi x2) on (0, T): the rescaled time solve must
    # reproduce the physical solution for T != 1
    nu, T = 0.5, 2.0
    d = caputo_power_oracle(nu, 1.0)

    def u(x1, x2, t):
        return t * np.sin(np.pi * x1) * np.sin(np.pi * x2)

    def f(x1, x2, t):
        return (d(t) + 2 * np.pi**2 * t) * np.sin(np.pi * x1) * np.sin(np.pi * x2)

    sol = solve_diffusion(DiffusionProblem(nu, f, T), 20, SolverConfig(N=32))
    assert l2_error(sol, u) < 1e-7


# }}}
