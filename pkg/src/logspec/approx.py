"""Projection, interpolation and weighted norms in GLOF spaces.

Also contains closed-form expansion coefficients of the singular monomials
:math:`t^r (-\\log t)^k` and the a priori bounds on their projection error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from logspec.errors import DomainError
from logspec.laguerre import MAX_RULE_POINTS, QuadratureRule
from logspec.logbasis import (
    BasisParams,
    Expansion,
    gamma_norm,
    gauss_glof,
    glof_eval_all,
)

Array = np.ndarray
Function = Callable[[Array], Array]


@dataclass(frozen=True)
class WeightSpec:
    """The weight :math:`(-\\log t)^{a} t^{b}` with *a* = *log_exp*, *b* = *alg_exp*."""

    log_exp: float = 0.0
    alg_exp: float = 0.0

    def __post_init__(self) -> None:
        if not self.log_exp > -1:
            raise DomainError(f"log exponent must be > -1: {self.log_exp}")


@dataclass(frozen=True)
class SingularMonomial:
    """The function :math:`t^r (-\\log t)^k`."""

    r: float
    k: int = 0

    def __post_init__(self) -> None:
        if not self.r >= 0:
            raise DomainError(f"exponent must be nonnegative: {self.r}")
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"log power must be a nonnegative integer: {self.k}")

    def __call__(self, t: Array) -> Array:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            result = t**self.r * (-np.log(t)) ** self.k
        # limit at 0 is 0 unless r = k = 0
        return np.where(t == 0, float(self.r == 0 and self.k == 0), result)

    def decay(self, params: BasisParams) -> float:
        """The exponent :math:`s = (\\beta + \\lambda + 2 r + 2) / (2 \\beta + 2)`."""
        return (params.beta + params.lam + 2 * self.r + 2) / (2 * params.beta + 2)


# {{{ projection and interpolation


def _sample(f: Function, rule: QuadratureRule) -> Array:
    fx = np.asarray(f(rule.nodes), dtype=float)
    fx = np.broadcast_to(fx, rule.nodes.shape)

    bad = ~np.isfinite(fx)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise DomainError(
            f"function is not finite at quadrature node {j} "
            f"(t = {rule.nodes[j]!r}, f = {fx[j]!r})"
        )

    return fx


def _transform(params: BasisParams, N: int, rule: QuadratureRule, fx: Array) -> Array:
    S = glof_eval_all(params, N, rule.nodes)
    return (S @ (fx * rule.weights)) / gamma_norm(np.arange(N + 1), params.alpha, params.beta)


def project(
    params: BasisParams, N: int, f: Function, oversample: int | None = None
) -> Expansion:
    """Weighted :math:`L^2` projection of *f* onto :math:`S_0, \\dots, S_N`.

    The inner products are computed with the Gauss rule of ``N + 1 + oversample``
    points (``oversample = N + 16`` by default, capped by the largest
    supported rule).
    """
    if N < 0:
        raise ValueError(f"degree must be nonnegative: {N}")
    if oversample is None:
        oversample = N + 16
    if oversample < 0:
        raise ValueError(f"oversampling must be nonnegative: {oversample}")

    M = min(N + oversample, MAX_RULE_POINTS - 1)
    rule = gauss_glof(params, M)
    return Expansion(params, _transform(params, N, rule, _sample(f, rule)))


def interpolate(params: BasisParams, N: int, f: Function) -> Expansion:
    """Interpolate *f* at the :math:`N + 1` mapped Gauss nodes.

    The modal coefficients come from the discrete transform, which is exact
    since the rule integrates all products :math:`S_n S_m`, :math:`n, m \\le N`.
    """
    if N < 0:
        raise ValueError(f"degree must be nonnegative: {N}")

    rule = gauss_glof(params, N)
    return Expansion(params, _transform(params, N, rule, _sample(f, rule)))


def interpolate_values(params: BasisParams, rule: QuadratureRule, fx: Array) -> Expansion:
    """Like :func:`interpolate`, but from values *fx* given at the nodes of *rule*."""
    N = len(rule) - 1
    fx = np.asarray(fx, dtype=float)
    if fx.shape != rule.nodes.shape:
        raise ValueError(f"expected {len(rule)} values, got shape {fx.shape}")

    return Expansion(params, _transform(params, N, rule, fx))


# }}}


# {{{ norms


def weighted_norm(
    f: Function | Expansion | Array, w: WeightSpec, quad: QuadratureRule
) -> float:
    """Discrete weighted :math:`L^2` norm :math:`\\sqrt{\\sum_j f(t_j)^2 \\chi_j}`.

    *quad* must be a GLOF rule whose weight matches *w*.
    """
    kind, args = quad.measure
    if kind != "glof" or args[0] != w.log_exp or args[2] != w.alg_exp:
        raise ValueError(
            f"rule for measure {quad.measure} does not match weight "
            f"(log {w.log_exp:g}, alg {w.alg_exp:g})"
        )

    if isinstance(f, Expansion) or callable(f):
        fx = np.asarray(f(quad.nodes), dtype=float)
    else:
        fx = np.asarray(f, dtype=float)

    return math.sqrt(float(fx**2 @ quad.weights))


def weighted_error(
    f: Function, e: Expansion, *, oversample: int = 64
) -> float:
    """Weighted :math:`L^2` distance between *f* and *e* in the weight of *e*.

    Uses the Gauss rule of *e*'s family with ``degree + 1 + oversample`` points.
    """
    p = e.params
    rule = gauss_glof(p, min(e.degree + oversample, MAX_RULE_POINTS - 1))
    return weighted_norm(lambda t: f(t) - e(t), WeightSpec(p.alpha, p.lam), rule)


# }}}


# {{{ singular monomials


def _check_monomial(m: SingularMonomial, params: BasisParams) -> None:
    if not params.lam > -1 - 2 * m.r:
        raise DomainError(
            f"t^{m.r:g} (-log t)^{m.k} is not square integrable for lambda = "
            f"{params.lam:g} (need lambda > {-1 - 2 * m.r:g})"
        )


def _laguerre_moment_terms(alpha: float, n: int, k: int, s: float) -> list[float]:
    # terms of int_0^oo y^{alpha + k} e^{-s y} L_n^{(alpha)}(y) dy
    terms = []
    for j in range(min(n, k) + 1):
        p = n - j
        if s == 1 and p > 0:
            continue

        log_mag = (
            math.lgamma(k + 1)
            + math.lgamma(n + k - j + alpha + 1)
            - math.lgamma(j + 1)
            - math.lgamma(k - j + 1)
            - math.lgamma(p + 1)
            - (n + k - j + alpha + 1) * math.log(s)
        )
        sign = (-1) ** j
        if p > 0:
            log_mag += p * math.log(abs(s - 1))
            sign *= 1 if s > 1 or p % 2 == 0 else -1

        terms.append(sign * math.exp(log_mag))

    return terms


def laguerre_moment(alpha: float, n: int, k: int, s: float) -> float:
    """Evaluate :math:`\\int_0^\\infty y^{\\alpha + k} e^{-s y} L^{(\\alpha)}_n(y) dy`.

    Closed form, valid for all :math:`n, k \\ge 0` and :math:`s > 0`:

    .. math::

        \\sum_{j = 0}^{\\min(n, k)} (-1)^j \\binom{k}{j}
        \\frac{\\Gamma(n + k - j + \\alpha + 1)}{(n - j)!}
        \\frac{(s - 1)^{n - j}}{s^{n + k - j + \\alpha + 1}}.
    """
    if not s > 0:
        raise DomainError(f"decay rate must be positive: {s}")

    return math.fsum(_laguerre_moment_terms(alpha, n, k, s))


def singular_coeff(m: SingularMonomial, params: BasisParams, n: int) -> float:
    """Exact coefficient :math:`\\hat f_n` of :math:`f = t^r (-\\log t)^k` in the
    GLOF expansion of family *params*."""
    _check_monomial(m, params)
    if n < 0:
        raise ValueError(f"index must be nonnegative: {n}")

    a = params.alpha
    s = m.decay(params)
    scale = math.exp(
        math.lgamma(n + 1) - math.lgamma(n + a + 1) - m.k * math.log(params.beta + 1)
    )
    return scale * laguerre_moment(a, n, m.k, s)


def singular_coeffs(m: SingularMonomial, params: BasisParams, N: int) -> Array:
    return np.array([singular_coeff(m, params, n) for n in range(N + 1)])


def singular_projection_error(
    m: SingularMonomial, params: BasisParams, N: int, *, rtol: float = 1.0e-17
) -> float:
    """Projection error of a singular monomial from the tail of its exact coefficients.

    Evaluates :math:`(\\sum_{n > N} \\gamma_n \\hat f_n^2)^{1/2}` until the terms
    drop below *rtol* times the running sum (the tail decays geometrically).
    """
    _check_monomial(m, params)
    a, b = params.alpha, params.beta

    total = 0.0
    n = N + 1
    small = 0
    while True:
        term = gamma_norm(n, a, b) * singular_coeff(m, params, n) ** 2
        total += term
        small = small + 1 if term <= rtol * total else 0
        if small > 4 or (total == 0 and n > N + 8):
            break
        n += 1
        if n > N + 100_000:
            break

    return math.sqrt(total)


class ErrorBound(NamedTuple):
    ratio: float
    bound: float


def bound_ratio(m: SingularMonomial, params: BasisParams) -> float:
    """The ratio :math:`R = |(2 r + \\lambda - \\beta) / (2 r + 2 + \\lambda + \\beta)|`."""
    r, lam, b = m.r, params.lam, params.beta
    return abs((2 * r + lam - b) / (2 * r + 2 + lam + b))


def validity_threshold(m: SingularMonomial, params: BasisParams) -> float:
    """Degree beyond which the projection bound holds (``0`` when ``R = 0``)."""
    R = bound_ratio(m, params)
    if R == 0:
        return 0.0
    if R >= 1:
        return math.inf

    return -(2 * m.k + params.alpha + 2) / (2 * math.log(R))


def projection_error_bound(
    m: SingularMonomial, params: BasisParams, N: int
) -> ErrorBound:
    """A priori bound on :math:`\\|f - \\pi_N f\\|` for :math:`f = t^r (-\\log t)^k`.

    For :math:`\\alpha = \\lambda = 0` this is
    :math:`\\sqrt{2}^k (\\beta + 1)^{-k} k! N^k \\sqrt{2 (\\beta + 1) N} R^{N - k}`,
    otherwise :math:`c (k + 1)! N^{(\\alpha + 1) / 2 + k} R^N` with the
    (asymptotic) constant

    .. math::

        c = \\sqrt{\\frac{2^{\\alpha + 1 + k} (\\beta + 1)^{2 \\alpha + 2 - k}}
                        {(\\beta + \\lambda + 2 r + 2)^{\\alpha + 1 + k}}}.
    """
    _check_monomial(m, params)
    if not params.beta > params.lam:
        raise DomainError(f"bound requires beta > lambda: {params}")

    R = bound_ratio(m, params)
    if R >= 1:
        raise DomainError(f"no exponential convergence for ratio R = {R:g} >= 1")

    threshold = validity_threshold(m, params)
    if not N > threshold:
        raise DomainError(
            f"bound holds only for N > {threshold:.4g} (R = {R:.4g}): N = {N}"
        )

    if R == 0:
        return ErrorBound(0.0, 0.0)

    a, b, lam, r, k = params.alpha, params.beta, params.lam, m.r, m.k
    if a == 0 and lam == 0:
        log_bound = (
            0.5 * k * math.log(2)
            - k * math.log(b + 1)
            + math.lgamma(k + 1)
            + k * math.log(N)
            + 0.5 * math.log(2 * (b + 1) * N)
            + (N - k) * math.log(R)
        )
    else:
        log_c = 0.5 * (
            (a + 1 + k) * math.log(2)
            + (2 * a + 2 - k) * math.log(b + 1)
            - (a + 1 + k) * math.log(b + lam + 2 * r + 2)
        )
        log_bound = (
            log_c
            + math.lgamma(k + 2)
            + ((a + 1) / 2 + k) * math.log(N)
            + N * math.log(R)
        )

    return ErrorBound(R, math.exp(log_bound))


# }}}
