r"""Fractional integrals and derivatives on GLOF spaces.

The Caputo derivative of order :math:`\nu \in (0, 1)` is written as

.. math::

    {}^C D^\nu v(t) = \frac{t^{1 - \nu}}{\Gamma(1 - \nu)}
        \int_0^1 v'(t \tau) (1 - \tau)^{-\nu} \,\mathrm{d}\tau,

and the :math:`\tau` integral is split at :math:`1/2`. On :math:`(0, 1/2)` the
integrand only has the (log-polynomial) singularity of :math:`v'` at 0, which a
mapped Gauss rule handles; on :math:`(1/2, 1)` the kernel singularity is
absorbed into a Gauss-Jacobi weight :math:`(1 - \xi)^{-\nu}`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammaln, logsumexp, rgamma

from logspec.errors import ConvergenceError, DomainError
from logspec.laguerre import Measure, QuadratureRule, jacobi_gauss
from logspec.logbasis import (
    BasisParams,
    Expansion,
    boundary_stencil,
    gauss_lof_power,
    glof_scaled_deriv_log,
    lof_eval_log,
)

Array = np.ndarray

OrderKind = Literal[
    "caputo-left", "rl-left", "rl-right", "integral-left", "integral-right"
]


@dataclass(frozen=True)
class FracOrder:
    value: float
    kind: OrderKind = "caputo-left"

    def __post_init__(self) -> None:
        if self.kind.startswith("integral"):
            if not self.value > 0:
                raise DomainError(f"integral order must be positive: {self.value}")
        elif self.kind in ("caputo-left", "rl-left", "rl-right"):
            v = self.value
            if not (0 < v < 1 or 1 < v < 2):
                raise DomainError(f"derivative order must be in (0, 1) or (1, 2): {v}")
        else:
            raise ValueError(f"unknown operator kind: '{self.kind}'")


# {{{ Mittag-Leffler

ML_MAX_TERMS = 500
ML_RTOL = 1.0e-16
ML_MAX_ARG = 50.0


def mittag_leffler(g: float, z: float | Array) -> Array:
    """Evaluate :math:`E_g(z) = \\sum_j z^j / \\Gamma(g j + 1)` by its power series.

    The sum is compensated (Neumaier) and stops once a term falls below
    ``1e-16`` of the partial sum, after at most 500 terms. Only
    :math:`|z| \\le 50` is accepted.
    """
    if not g > 0:
        raise DomainError(f"Mittag-Leffler index must be positive: {g}")

    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > ML_MAX_ARG) or np.any(np.isnan(z)):
        raise DomainError(f"Mittag-Leffler series is only used for |z| <= {ML_MAX_ARG}")

    # fail fast when even the last allowed term is above the tolerance
    # relative to sum_j |term_j|, which bounds every partial sum
    zmax = float(np.max(np.abs(z), initial=0.0))
    if zmax > 0:
        jj = np.arange(ML_MAX_TERMS)
        log_terms = jj * math.log(zmax) - gammaln(g * jj + 1)
        if log_terms[-1] > math.log(ML_RTOL) + logsumexp(log_terms):
            raise ConvergenceError(
                f"Mittag-Leffler series E_{g}(z) with |z| = {zmax:g} cannot reach "
                f"relative tolerance {ML_RTOL:g} within {ML_MAX_TERMS} terms "
                f"(term {ML_MAX_TERMS - 1} is about 10^{log_terms[-1] / math.log(10):.1f})"
            )

    total = np.ones_like(z)
    comp = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    largest = np.ones_like(z)
    logz = np.log(np.where(z == 0, 1.0, np.abs(z)))
    sign = np.where(z < 0, -1.0, 1.0)
    term = np.zeros_like(z)

    j = 0
    while np.any(active):
        j += 1
        if j >= ML_MAX_TERMS:
            i = np.unravel_index(np.argmax(active), z.shape)
            raise ConvergenceError(
                f"Mittag-Leffler series E_{g}({float(z[i])!r}) did not converge in "
                f"{ML_MAX_TERMS} terms (partial sum {float(total[i] + comp[i])!r}, "
                f"last term {float(term[i])!r})"
            )

        term = np.where(
            z == 0, 0.0, sign**j * np.exp(j * logz - math.lgamma(g * j + 1))
        )
        term = np.where(active, term, 0.0)

        # Neumaier summation
        s = total + term
        comp += np.where(
            np.abs(total) >= np.abs(term), (total - s) + term, (term - s) + total
        )
        total = s
        largest = np.maximum(largest, np.abs(term))

        decaying = (g * j + 1) > np.abs(z) ** (1 / g) + 1
        small = np.abs(term) <= ML_RTOL * np.abs(total + comp)
        active &= ~(decaying & small)

    result = total + comp
    lost = largest > 1.0e8 * np.maximum(np.abs(result), np.finfo(float).tiny)
    if np.any(lost):
        warnings.warn(
            "cancellation in the Mittag-Leffler series loses more than 8 digits",
            RuntimeWarning,
            stacklevel=2,
        )

    return result


# }}}


# {{{ power function oracles


def frac_power_derivative(order: float, p: float) -> Callable[[Array], Array]:
    """Return :math:`t \\mapsto \\Gamma(p + 1) / \\Gamma(p + 1 - \\rho) t^{p - \\rho}`.

    This is the left Riemann-Liouville derivative of order :math:`\\rho` of
    :math:`t^p`; it coincides with the Caputo derivative whenever
    :math:`p > \\lceil \\rho \\rceil - 1`. When :math:`p + 1 - \\rho` is a
    nonpositive integer the result is identically zero.
    """
    c = math.gamma(p + 1) * float(rgamma(p + 1 - order))
    e = p - order

    if c == 0:
        return lambda t: np.zeros_like(np.asarray(t, dtype=float))

    return lambda t: c * np.asarray(t, dtype=float) ** e


def caputo_power_oracle(nu: float, p: float) -> Callable[[Array], Array]:
    """Closed-form Caputo derivative of order *nu* of :math:`t^p`."""
    if not 0 < nu < 2 or nu == 1:
        raise DomainError(f"order must be in (0, 1) or (1, 2): {nu}")
    if p < 0:
        raise DomainError(f"power must be nonnegative: {p}")

    # Caputo derivatives annihilate polynomials of degree < ceil(nu)
    if p == 0 or (nu > 1 and p == 1):
        return lambda t: np.zeros_like(np.asarray(t, dtype=float))

    if not p > nu - 1:
        raise DomainError(f"need p > nu - 1 for an integrable derivative: p = {p}")

    if float(p + 1 - nu).is_integer() and p + 1 - nu <= 0:
        warnings.warn(
            f"Gamma pole at p + 1 - nu = {p + 1 - nu:g}: derivative is zero",
            RuntimeWarning,
            stacklevel=2,
        )

    return frac_power_derivative(nu, p)


# }}}


# {{{ quadrature bundle

TestKind = Literal["value", "derivative"]


@dataclass(frozen=True)
class CaputoRules:
    """Quadrature rules for the split evaluation of a Caputo bilinear form.

    *outer* integrates in :math:`t` against :math:`t^{e}`, where
    :math:`e = \\beta - \\lambda - \\nu` when the test functions are used as
    is and :math:`e = \\beta - \\lambda - \\nu - 1` when their derivative is
    used.

    The piece :math:`\\tau = \\sigma / 2 \\in (0, 1/2)` is written with
    :math:`(1 - \\sigma / 2)^{-\\nu} = 1 + \\sigma h(\\sigma)`: *half* has the
    weight :math:`\\sigma^{\\gamma - 1}` and integrates the leading term exactly,
    *half_rem* has the weight :math:`\\sigma^{\\gamma}` and takes the smooth
    remainder. This moves the kernel singularity at :math:`\\sigma = 2` away
    from the Laguerre variable's origin. *jacobi* has the weight
    :math:`(1 - \\xi)^{-\\nu}` for the piece :math:`\\tau = (\\xi + 3) / 4`.
    """

    params: BasisParams
    nu: float
    outer: QuadratureRule
    half: QuadratureRule
    half_rem: QuadratureRule
    jacobi: QuadratureRule
    test: TestKind = "value"

    def __post_init__(self) -> None:
        p, nu = self.params, self.nu
        g = p.shift
        e = p.beta - p.lam - nu - (self.test == "derivative")

        expected = {
            "outer": Measure("glof", (0.0, e, e)),
            "half": Measure("glof", (0.0, g - 1, g - 1)),
            "half_rem": Measure("glof", (0.0, g, g)),
            "jacobi": Measure("jacobi", (-nu, 0.0)),
        }
        for name, m in expected.items():
            got = getattr(self, name).measure
            if got.kind != m.kind or not np.allclose(got.params, m.params, rtol=1e-14):
                raise ValueError(f"'{name}' rule has measure {got}, expected {m}")

    @property
    def inner_size(self) -> int:
        return len(self.jacobi) - 1


def caputo_rules(
    params: BasisParams,
    nu: float,
    N: int,
    inner_size: int | None = None,
    *,
    test: TestKind = "value",
) -> CaputoRules:
    """Build the rules for trial/test degree *N*.

    The outer rule has :math:`N + 1` points, which integrates the outer
    integral exactly; the inner rules have ``inner_size + 1`` points
    (``2 N + 16`` by default).
    """
    if not 0 < nu < 1:
        raise DomainError(f"order must be in (0, 1): {nu}")
    if not params.beta > params.lam:
        raise DomainError(f"Caputo forms need beta > lambda: {params}")

    if inner_size is None:
        inner_size = 2 * N + 16
    if inner_size < 0:
        raise ValueError(f"inner rule size must be nonnegative: {inner_size}")

    g = params.shift
    e = params.beta - params.lam - nu - (test == "derivative")
    if not e > -1:
        raise DomainError(
            f"outer weight t^{e:g} is not integrable: need beta - lambda > "
            f"{nu + (test == 'derivative') - 1:g}"
        )

    return CaputoRules(
        params=params,
        nu=nu,
        outer=gauss_lof_power(e, N, warn=False),
        half=gauss_lof_power(g - 1, inner_size, warn=False),
        half_rem=gauss_lof_power(g, inner_size, warn=False),
        jacobi=jacobi_gauss(-nu, 0.0, inner_size),
        test=test,
    )


# }}}


# {{{ bilinear forms


def caputo_inner(rules: CaputoRules, N: int, t: float | Array) -> Array:
    """Evaluate :math:`J_n(t) = \\int_0^1 \\tau^{\\gamma - 1} (1 - \\tau)^{-\\nu}
    \\tilde d_n(t \\tau) d\\tau` for :math:`n = 0, \\dots, N`, where
    :math:`\\tilde d_n(x) = x^{1 - \\gamma} S_n'(x)`.

    With this, :math:`{}^C D^\\nu S_n(t) = t^{\\gamma - \\nu} J_n(t) / \\Gamma(1 - \\nu)`.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t > 1):
        raise DomainError("points must lie in (0, 1]")

    return _caputo_inner_log(rules, N, np.log(t))


def _log_nodes(rule: QuadratureRule) -> Array:
    return rule.log_nodes if rule.log_nodes is not None else np.log(rule.nodes)


def _caputo_inner_log(rules: CaputoRules, N: int, logt: Array) -> Array:
    p, nu = rules.params, rules.nu
    g = p.shift

    def dtilde(log_tau: Array) -> Array:
        return glof_scaled_deriv_log(p, N, np.add.outer(logt, log_tau))

    # tau in (0, 1/2): tau = sigma / 2 and (1 - sigma / 2)^{-nu} = 1 + sigma h
    log_sigma = _log_nodes(rules.half)
    first = dtilde(log_sigma - math.log(2)) @ rules.half.weights

    log_sigma = _log_nodes(rules.half_rem)
    sigma = np.exp(log_sigma)
    with np.errstate(invalid="ignore", divide="ignore"):
        h = np.where(sigma > 0, np.expm1(-nu * np.log1p(-sigma / 2)) / sigma, nu / 2)
    first += dtilde(log_sigma - math.log(2)) @ (rules.half_rem.weights * h)

    # tau in (1/2, 1): tau = (xi + 3) / 4
    xi, zeta = rules.jacobi.nodes, rules.jacobi.weights
    tau = (xi + 3) / 4
    second = dtilde(np.log(tau)) @ (zeta * tau ** (g - 1))

    return 2.0 ** (-g) * first + 4.0 ** (nu - 1) * second


def caputo_stiffness(
    params: BasisParams, N: int, nu: float, rules: CaputoRules | None = None
) -> Array:
    """Matrix :math:`A_{kj} = ({}^C D^\\nu S_j, S_k)` for :math:`j, k \\le N`."""
    if rules is None:
        rules = caputo_rules(params, nu, N)
    _check_rules(rules, params, nu, "value")

    logt, chi = _log_nodes(rules.outer), rules.outer.weights
    J = _caputo_inner_log(rules, N, logt)
    # S_k(t) = t^gamma L_k, the t^{2 gamma - nu} factor is in the outer weight
    L = lof_eval_log(params, N, logt)

    return (L * chi) @ J.T * float(rgamma(1 - nu))


def rl_bvp_stiffness(
    params: BasisParams, N: int, mu: float, rules: CaputoRules | None = None
) -> Array:
    """Matrix :math:`A_{kj} = -(D^\\mu S_j, S_k)` for :math:`j, k \\le N`,
    evaluated as :math:`({}^C D^{\\mu - 1} S_j, S_k')`.

    The identity needs trial functions vanishing at 0 and test functions
    vanishing at both endpoints, so only :math:`P^T A P` with the boundary
    stencil :math:`P` is meaningful.
    """
    if not 1 < mu < 2:
        raise DomainError(f"order must be in (1, 2): {mu}")

    nu = mu - 1
    if rules is None:
        rules = caputo_rules(params, nu, N, test="derivative")
    _check_rules(rules, params, nu, "derivative")

    logt, chi = _log_nodes(rules.outer), rules.outer.weights
    J = _caputo_inner_log(rules, N, logt)
    # S_k'(t) = t^{gamma - 1} dtilde_k(t), the powers are in the outer weight
    D = glof_scaled_deriv_log(params, N, logt)

    return (D * chi) @ J.T * float(rgamma(1 - nu))


def _check_rules(rules: CaputoRules, params: BasisParams, nu: float, test: TestKind) -> None:
    if rules.params != params or not math.isclose(rules.nu, nu, rel_tol=1e-14):
        raise ValueError(
            f"rules were built for {rules.params} and order {rules.nu:g}, "
            f"not {params} and {nu:g}"
        )
    if rules.test != test:
        raise ValueError(f"rules were built for '{rules.test}' test functions")


def _plain_coeffs(e: Expansion, N: int) -> Array:
    c = e.to_plain().coeffs
    out = np.zeros(N + 1)
    out[: c.size] = c
    return out


def _common_degree(v: Expansion, w: Expansion) -> int:
    if v.params != w.params:
        raise ValueError(f"expansions live in different families: {v.params}, {w.params}")
    return max(v.to_plain().degree, w.to_plain().degree)


def caputo_bilinear(
    v: Expansion, w: Expansion, nu: float, rules: CaputoRules | None = None
) -> float:
    """Evaluate :math:`({}^C D^\\nu v, w)` for expansions in the same family."""
    N = _common_degree(v, w)
    if rules is None:
        rules = caputo_rules(v.params, nu, N)

    A = caputo_stiffness(v.params, N, nu, rules)
    return float(_plain_coeffs(w, N) @ A @ _plain_coeffs(v, N))


def rl_bilinear_bvp(
    u: Expansion, w: Expansion, mu: float, rules: CaputoRules | None = None
) -> float:
    """Evaluate :math:`-(D^\\mu u, w)` for expansions in the boundary basis."""
    if u.kind != "boundary" or w.kind != "boundary":
        raise DomainError("both arguments must be in the boundary basis")

    N = _common_degree(u, w)
    if rules is None:
        rules = caputo_rules(u.params, mu - 1, N, test="derivative")

    A = rl_bvp_stiffness(u.params, N, mu, rules)
    return float(_plain_coeffs(w, N) @ A @ _plain_coeffs(u, N))


def boundary_projection(A: Array, params: BasisParams) -> Array:
    """Transform a plain-basis matrix of size ``N + 1`` to the boundary basis."""
    P = boundary_stencil(params, A.shape[0] - 1)
    return P.T @ A @ P


# }}}


def gamma_ratio(a: float, b: float) -> float:
    """:math:`\\Gamma(a) / \\Gamma(b)` through log-gamma differences."""
    if a > 0 and b > 0:
        return math.exp(math.lgamma(a) - math.lgamma(b))
    return float(gamma_fn(a) * rgamma(b))
