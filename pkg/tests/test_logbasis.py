from __future__ import annotations

import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from logspec.errors import DomainError
from logspec.laguerre import laguerre_eval_all
from logspec.logbasis import (
    BasisParams,
    Expansion,
    boundary_basis_eval,
    boundary_stencil,
    gamma_norm,
    gauss_glof,
    gauss_lof_power,
    glof_deriv,
    glof_eval,
    glof_eval_all,
    glof_scaled_deriv_all,
    pseudo_deriv_expansion,
)

params_st = st.builds(
    BasisParams,
    alpha=st.sampled_from([-0.5, 0.0, 0.7, 2.0]),
    beta=st.sampled_from([-0.5, 0.0, 1.0, 3.0, 5.0]),
    lam=st.sampled_from([-0.5, 0.0, 1.0, 2.0]),
)
# families whose basis functions vanish at 0
trial_params_st = params_st.filter(lambda p: p.beta > p.lam)


# {{{ parameters


def test_params_validation() -> None:
    with pytest.raises(DomainError):
        BasisParams(-1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        BasisParams(0.0, -1.0, 0.0)

    p = BasisParams.lof(0.5, 2.0)
    assert p.lam == p.beta and p.shift == 0.0
    assert BasisParams(0, 5, 1).shift == 2.0


# }}}


# {{{ evaluation


def test_eval_examples() -> None:
    p = BasisParams(0.0, 0.0, 0.0)
    assert np.allclose(glof_eval_all(p, 0, np.array([0.1, 0.5, 0.9])), 1.0)
    assert glof_eval(p, 1, math.exp(-1.0)) == pytest.approx(0.0, abs=1e-15)
    assert glof_eval(BasisParams(1.0, 2.0, 2.0), 2, 1.0) == pytest.approx(3.0)


@given(p=params_st, n=st.integers(0, 30), t=st.floats(1e-12, 1.0))
def test_eval_matches_laguerre(p: BasisParams, n: int, t: float) -> None:
    # evaluation in log t agrees with composing with the Laguerre recurrence
    S = glof_eval_all(p, n, t)
    y = -(p.beta + 1) * math.log(t)
    L = laguerre_eval_all(p.alpha, n, y) * t**p.shift
    scale = np.maximum(np.abs(L), t**p.shift * max(1.0, y) ** n / math.factorial(n))
    assert np.all(np.abs(S - L) <= 1e-12 * np.maximum(scale, 1e-300) * (n + 1) ** 2)


def test_eval_at_zero() -> None:
    S = glof_eval_all(BasisParams(0.0, 3.0, 1.0), 4, 0.0)
    assert np.all(S == 0.0)

    S = glof_eval_all(BasisParams(0.0, 3.0, 3.0), 2, 0.0)
    assert S[0] == 1.0 and np.all(np.isinf(S[1:]))

    with pytest.raises(DomainError):
        glof_eval_all(BasisParams(0.0, 1.0, 3.0), 2, 0.0)


def test_eval_clamps_with_warning() -> None:
    p = BasisParams(0.0, 2.0, 0.0)
    with pytest.warns(RuntimeWarning, match="clamping"):
        S = glof_eval_all(p, 2, 1e-320)
    assert np.all(np.isfinite(S))


def test_eval_rejects_outside() -> None:
    with pytest.raises(DomainError):
        glof_eval_all(BasisParams(), 2, 1.5)
    with pytest.raises(DomainError):
        glof_eval_all(BasisParams(), 2, -0.1)


# }}}


# {{{ derivatives


def test_deriv_examples() -> None:
    p = BasisParams(0.0, 0.0, 0.0)
    assert np.allclose(glof_deriv(BasisParams(0.5, 2.0, 2.0), 0, np.array([0.2, 0.7])), 0.0)
    assert glof_deriv(p, 1, 0.5) == pytest.approx(2.0)


@given(p=params_st, n=st.integers(0, 6))
def test_deriv_finite_difference(p: BasisParams, n: int) -> None:
    t, h = 0.3, 1e-6
    fd = (glof_eval(p, n, t + h) - glof_eval(p, n, t - h)) / (2 * h)
    d = glof_deriv(p, n, t)
    assert d == pytest.approx(fd, rel=1e-6, abs=1e-6)


@given(p=params_st, n=st.integers(1, 20), t=st.floats(0.01, 1.0))
def test_deriv_relation(p: BasisParams, n: int, t: float) -> None:
    # d/dt S_n = gamma S_n^(a, b, lam+2) + (b+1) S_{n-1}^(a+1, b, lam+2)
    g = p.shift
    q = p.replace(lam=p.lam + 2)
    rhs = g * glof_eval(q, n, t) + (p.beta + 1) * glof_eval(q.replace(alpha=p.alpha + 1), n - 1, t)
    d = glof_deriv(p, n, t)
    assert d == pytest.approx(rhs, rel=1e-10, abs=1e-10 * max(1.0, abs(rhs)))


@given(p=params_st, n=st.integers(1, 25), t=st.floats(1e-6, 1.0))
def test_cumulative_sum_identity(p: BasisParams, n: int, t: float) -> None:
    # S_{n-1}^(a+1, b, lam) = sum_{l<n} S_l^(a, b, lam)
    lhs = glof_eval(p.replace(alpha=p.alpha + 1), n - 1, t)
    rhs = np.sum(glof_eval_all(p, n - 1, t))
    scale = max(1.0, float(np.max(np.abs(glof_eval_all(p, n - 1, t)))))
    assert lhs == pytest.approx(rhs, abs=1e-10 * scale * n)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
@pytest.mark.parametrize("beta", [0.0, 1.0, 5.0])
@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_sturm_liouville_residual(alpha: float, beta: float, n: int) -> None:
    # (-log t)^-a t^-b d/dt((-log t)^(a+1) t^(b+2) S_n') + n (b+1) S_n = 0, with
    # S_n' = (b+1) t^-1 S_{n-1}^(a+1) and S_n'' from the same relation again
    p = BasisParams.lof(alpha, beta)
    q = BasisParams.lof(alpha + 1, beta)
    t = np.linspace(0.1, 0.9, 9)
    x = -np.log(t)

    S = glof_eval(p, n, t)
    S1 = glof_eval(q, n - 1, t)
    d1 = (beta + 1) * S1 / t
    d2 = (beta + 1) * (-S1 / t**2 + glof_deriv(q, n - 1, t) / t)

    outer = (
        (-(alpha + 1) * x**alpha / t * t ** (beta + 2) + x ** (alpha + 1) * (beta + 2) * t ** (beta + 1))
        * d1
        + x ** (alpha + 1) * t ** (beta + 2) * d2
    )
    res = outer / (x**alpha * t**beta) + n * (beta + 1) * S
    scale = n * (beta + 1) * np.maximum(np.abs(S), 1.0)
    assert np.all(np.abs(res) <= 1e-8 * scale)


@given(p=params_st, n=st.integers(0, 15), t=st.floats(1e-8, 1.0))
def test_scaled_deriv(p: BasisParams, n: int, t: float) -> None:
    # t^(1 - gamma) S_n' is a polynomial in log t
    d = glof_scaled_deriv_all(p, n, t)[-1]
    ref = t ** (1 - p.shift) * glof_deriv(p, n, t)
    assert d == pytest.approx(ref, rel=1e-9, abs=1e-9 * max(1.0, abs(ref)))


# }}}


# {{{ pseudo-derivative


def test_pseudo_deriv_examples() -> None:
    p = BasisParams(0.5, 3.0, 1.0)
    z = pseudo_deriv_expansion(Expansion(p, np.array([2.0])))
    assert np.all(z.coeffs == 0.0)

    d = pseudo_deriv_expansion(Expansion(p, np.array([0.0, 1.0])))
    assert d.params == p.replace(alpha=1.5)
    assert np.allclose(d.coeffs, [4.0])


@given(p=params_st, data=st.data())
def test_pseudo_deriv_pointwise(p: BasisParams, data: st.DataObject) -> None:
    # t^(1+g) d/dt (t^-g e) = t e' - g e
    c = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=1, max_size=8)))
    e = Expansion(p, c)
    t = np.array([0.05, 0.3, 0.8])
    lhs = t * e.deriv(t) - p.shift * e(t)
    for same in (False, True):
        d = pseudo_deriv_expansion(e, same_family=same)
        assert np.allclose(d(t), lhs, rtol=1e-9, atol=1e-9 * (1 + np.max(np.abs(lhs))))


# }}}


# {{{ norms and quadrature


def test_gamma_norm_examples() -> None:
    assert gamma_norm(0, 0.0, 0.0) == pytest.approx(1.0)
    assert gamma_norm(5, 0.0, 3.0) == pytest.approx(0.25)
    assert gamma_norm(1, 1.0, 0.0) == pytest.approx(2.0)


@given(p=params_st, n=st.integers(0, 6))
def test_gamma_norm_quadrature(p: BasisParams, n: int) -> None:
    a, lam = p.alpha, p.lam
    if lam + p.shift * 2 <= -1:
        return
    with mp.workdps(30):
        val = mp.quad(
            lambda t: float(glof_eval(p, n, float(t))) ** 2 * (-mp.log(t)) ** a * t**lam,
            [0, 1e-6, 0.01, 0.5, 1],
        )
    assert float(val) == pytest.approx(gamma_norm(n, p.alpha, p.beta), rel=1e-6)


def test_gauss_glof_examples() -> None:
    r = gauss_glof(BasisParams(0.0, 0.0, 0.0), 0)
    assert np.allclose(r.nodes, [math.exp(-1.0)]) and np.allclose(r.weights, [1.0])

    r = gauss_glof(BasisParams(1.0, 1.0, 1.0), 5)
    assert r.integrate(lambda t: np.ones_like(t)) == pytest.approx(0.25, rel=1e-14)

    r = gauss_glof(BasisParams(0.0, 0.0, 0.0), 3)
    assert r.integrate(lambda t: (-np.log(t)) ** 7) == pytest.approx(5040.0, rel=1e-13)


@given(p=params_st, N=st.integers(1, 30))
def test_discrete_orthogonality(p: BasisParams, N: int) -> None:
    r = gauss_glof(p, N)
    S = glof_eval_all(p, N, r.nodes)
    G = (S * r.weights) @ S.T
    g = gamma_norm(np.arange(N + 1), p.alpha, p.beta)
    assert np.allclose(G / np.sqrt(np.outer(g, g)), np.eye(N + 1), atol=1e-10)


@given(p=params_st, N=st.integers(1, 60))
def test_node_order(p: BasisParams, N: int) -> None:
    t = gauss_glof(p, N).nodes
    assert np.all(np.diff(t) < 0)
    assert np.all((t > 0) & (t < 1))


@pytest.mark.parametrize("N", [10, 40, 80])
def test_node_parameter_monotonicity(N: int) -> None:
    # larger beta pushes nodes away from 0, larger alpha pulls them toward 0
    betas = [0.0, 1.0, 3.0, 5.0, 10.0]
    alphas = [-0.5, 0.0, 1.0, 3.0]
    for a in alphas:
        T = np.array([gauss_glof(BasisParams(a, b, 0.0), N).nodes for b in betas])
        assert np.all(np.diff(T, axis=0) > 0)
    for b in betas:
        T = np.array([gauss_glof(BasisParams(a, b, 0.0), N).nodes for a in alphas])
        assert np.all(np.diff(T, axis=0) < 0)


def test_gauss_lof_power() -> None:
    for e in (-0.5, 0.0, 2.5):
        r = gauss_lof_power(e, 10)
        # exact for t^e (-log t)^k, k <= 21
        for k in (0, 5, 21):
            exact = math.gamma(k + 1) / (e + 1) ** (k + 1)
            val = np.sum(r.weights * (-r.log_nodes) ** k)
            assert val == pytest.approx(exact, rel=1e-12)


def test_clamped_nodes_keep_logs() -> None:
    p = BasisParams(0.0, 0.5, 0.0)
    with pytest.warns(RuntimeWarning):
        r = gauss_glof(p, 300)
    assert np.all(np.diff(r.nodes) < 0)
    assert np.allclose(np.exp(r.log_nodes[:50]), r.nodes[:50], rtol=1e-14)


# }}}


# {{{ boundary basis


@given(p=trial_params_st, n=st.integers(1, 6))
def test_boundary_values(p: BasisParams, n: int) -> None:
    assert boundary_basis_eval(p, n, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert boundary_basis_eval(p, n, 0.0) == 0.0
    assert abs(boundary_basis_eval(p, n, 1e-40)) < 1e-6


def test_boundary_example() -> None:
    p = BasisParams(0.0, 2.0, 0.0)
    t = math.exp(-1.0)
    direct = t * (3 * math.log(t) + 1) - t
    assert boundary_basis_eval(p, 1, t) == pytest.approx(direct, rel=1e-14)


def test_boundary_rejects() -> None:
    with pytest.raises(DomainError):
        boundary_basis_eval(BasisParams(0.0, 1.0, 1.0), 1, 0.5)
    with pytest.raises(DomainError):
        Expansion(BasisParams(0.0, 1.0, 2.0), np.array([1.0]), "boundary")


@given(p=trial_params_st, N=st.integers(1, 12))
def test_boundary_stencil(p: BasisParams, N: int) -> None:
    P = boundary_stencil(p, N)
    assert P.shape == (N + 1, N)
    assert np.all(np.count_nonzero(P, axis=0) == 2)

    t = np.array([0.1, 0.4, 0.9])
    S = glof_eval_all(p, N, t)
    for n in range(1, N + 1):
        assert np.allclose(P[:, n - 1] @ S, boundary_basis_eval(p, n, t), atol=1e-12)


# }}}


# {{{ expansions


def test_expansion_is_read_only() -> None:
    e = Expansion(BasisParams(), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        e.coeffs[0] = 3.0


def test_expansion_boundary_to_plain() -> None:
    p = BasisParams(0.0, 2.0, 0.0)
    e = Expansion(p, np.array([0.0, 1.0, 2.0]), "boundary")
    assert e.degree == 3
    assert np.allclose(e.to_plain().coeffs, [0.0, -1.0, -1.0, 2.0])

    t = np.linspace(0.05, 1, 7)
    assert np.allclose(e(t), e.to_plain()(t))
    assert e(1.0) == pytest.approx(0.0, abs=1e-14)


def test_no_warning_in_normal_range() -> None:
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        glof_eval_all(BasisParams(), 40, np.linspace(1e-200, 1, 50))


# }}}
