"""Generalized Laguerre polynomials and the Gauss rules built on them.

Besides Laguerre-Gauss rules on :math:`(0, \\infty)` this module also provides
Gauss-Jacobi rules on :math:`(-1, 1)`, which the fractional operators need to
integrate the :math:`(1 - \\xi)^{-\\nu}` kernel singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.special import gammaln

from logspec.errors import ConvergenceError, DomainError

Array = np.ndarray

#: Largest number of points a Gauss rule may have.
MAX_RULE_POINTS = 360

_NEWTON_MAXITER = 100
_NEWTON_RTOL = 1.0e-14
_NEWTON_STALL = 1.0e-11
_EPS = np.finfo(float).eps


class Measure(NamedTuple):
    """Descriptor of the measure a :class:`QuadratureRule` integrates exactly.

    *kind* is one of ``"laguerre"`` (params ``(alpha,)``), ``"glof"``
    (params ``(alpha, beta, lam)``) or ``"jacobi"`` (params ``(a, b)``).
    """

    kind: str
    params: tuple[float, ...]

    def __str__(self) -> str:
        args = ", ".join(f"{p:g}" for p in self.params)
        return f"{self.kind}({args})"


_DOMAINS = {
    "laguerre": (0.0, math.inf),
    "glof": (0.0, 1.0),
    "jacobi": (-1.0, 1.0),
}


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss nodes and weights together with the measure they belong to."""

    nodes: Array
    weights: Array
    measure: Measure
    log_weights: Array | None = field(default=None, repr=False, compare=False)
    log_nodes: Array | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError(
                f"nodes and weights must be 1d of equal length: "
                f"{nodes.shape} vs {weights.shape}"
            )
        if self.measure.kind not in _DOMAINS:
            raise ValueError(f"unknown measure kind: '{self.measure.kind}'")

        lo, hi = _DOMAINS[self.measure.kind]
        if nodes.size and not (np.all(nodes > lo) and np.all(nodes < hi)):
            raise ValueError(f"nodes must lie in ({lo}, {hi}) for {self.measure}")

        d = np.diff(nodes)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("nodes must be strictly monotone")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and nonnegative")

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, f: Callable[[Array], Array] | Array) -> float:
        """Apply the rule to *f* (a callable or its values at the nodes)."""
        fx = f(self.nodes) if callable(f) else np.asarray(f)
        return float(fx @ self.weights)


# {{{ evaluation


def _check_alpha(alpha: float) -> None:
    if not alpha > -1:
        raise DomainError(f"Laguerre parameter must satisfy alpha > -1: {alpha}")


def laguerre_eval_all(alpha: float, n: int, y: float | Array) -> Array:
    """Evaluate :math:`L^{(\\alpha)}_0(y), \\dots, L^{(\\alpha)}_n(y)`.

    The result has shape ``(n + 1, *np.shape(y))``.
    """
    _check_alpha(alpha)
    if n < 0:
        raise ValueError(f"degree must be nonnegative: {n}")

    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("Laguerre polynomials are evaluated on y >= 0")

    return _recurrence(alpha, n, y, np.ones_like(y))


def _recurrence(alpha: float, n: int, y: Array, start: Array) -> Array:
    out = np.empty((n + 1, *y.shape))
    out[0] = start
    if n >= 1:
        out[1] = (alpha + 1 - y) * start
    for k in range(1, n):
        out[k + 1] = (
            (2 * k + alpha + 1 - y) * out[k] - (k + alpha) * out[k - 1]
        ) / (k + 1)

    return out


# }}}


# {{{ Laguerre-Gauss


def _check_size(N: int) -> None:
    if N < 0:
        raise ValueError(f"rule index must be nonnegative: {N}")
    if N + 1 > MAX_RULE_POINTS:
        raise ValueError(
            f"rules with more than {MAX_RULE_POINTS} points are not supported: "
            f"N = {N}"
        )


def _normalized_laguerre(
    alpha: float, n: int, y: Array, scale: Array
) -> tuple[Array, Array]:
    """Return *scale* times :math:`p_n` and :math:`p_n - p_{n - 1}`, where
    :math:`p_k = L^{(\\alpha)}_k / L^{(\\alpha)}_k(0)`.

    Recurring on the differences avoids the cancellation that the plain
    three-term recurrence suffers from near small zeros.
    """
    d = -y / (alpha + 1) * scale
    p = scale + d
    for k in range(1, n):
        d = (k * d - y * p) / (k + alpha + 1)
        p = p + d

    return p, d


def _laguerre_newton(alpha: float, N: int, y: Array) -> tuple[Array, Array]:
    """Polish zeros of :math:`L_{N + 1}` and return them with :math:`\\log |L'_{N + 1} / L_{N + 1}(0)|`."""
    n = N + 1

    def newton_step(y: Array) -> Array:
        # y L_n' / L_n = n (p_n - p_{n - 1}) / p_n
        p, d = _normalized_laguerre(alpha, n, y, np.exp(-y / 4))
        return y * p / (n * d)

    prev = np.inf
    for _ in range(_NEWTON_MAXITER):
        dy = newton_step(y)
        y = y - dy

        step = np.max(np.abs(dy) / y)
        if step <= _NEWTON_RTOL:
            break
        # stalled at the roundoff level of the recurrence
        if step <= _NEWTON_STALL and step >= prev / 2:
            break
        prev = step
    else:
        j = int(np.argmax(np.abs(dy) / y))
        raise ConvergenceError(
            f"Newton iteration for the zeros of L_{n}^({alpha}) did not "
            f"converge at node {j} (y = {y[j]!r}, last step {dy[j]:.3e})"
        )

    # one more step to polish the last digits
    y = y - newton_step(y)

    # y L_n' = n L_n(0) (p_n - p_{n - 1})
    _, d = _normalized_laguerre(alpha, n, y, np.exp(-y / 4))
    return y, np.log(n * np.abs(d)) + y / 4 - np.log(y)


def _log_gamma_ratio(n: int, alpha: float) -> float:
    """Accurate :math:`\\log \\Gamma(n + \\alpha + 1) / \\Gamma(n + 1)`."""
    # the difference of two large log-gammas loses digits, take the product
    # Gamma(alpha + 1) prod_k (1 + alpha / k) instead
    k = np.arange(1, n + 1)
    return math.lgamma(alpha + 1) + math.fsum(np.log1p(alpha / k))


def laguerre_gauss(alpha: float, N: int) -> QuadratureRule:
    """Gauss rule with :math:`N + 1` points for the weight :math:`y^\\alpha e^{-y}`.

    The rule integrates polynomials of degree up to :math:`2 N + 1` exactly.
    """
    _check_alpha(alpha)
    _check_size(N)

    n = N + 1
    k = np.arange(n)
    diag = 2 * k + alpha + 1.0
    offdiag = np.sqrt(k[1:] * (k[1:] + alpha))
    seeds = eigvalsh_tridiagonal(diag, offdiag) if n > 1 else diag
    # the smallest zero is positive, clip seeds that roundoff pushed below
    seeds = np.maximum(seeds, np.finfo(float).tiny)

    y, log_dl = _laguerre_newton(alpha, N, seeds)

    # w_j = Gamma(n + alpha + 1) / (n! y_j L_n'(y_j)^2) with n = N + 1, where
    # L_n' = binom(n + alpha, n) * (the scaled derivative from Newton)
    log_w = (
        2 * math.lgamma(alpha + 1)
        - _log_gamma_ratio(n, alpha)
        - np.log(y)
        - 2 * log_dl
    )

    return QuadratureRule(
        nodes=y,
        weights=np.exp(log_w),
        measure=Measure("laguerre", (float(alpha),)),
        log_weights=log_w,
    )


# }}}


# {{{ Jacobi-Gauss


def _jacobi_eval(a: float, b: float, n: int, x: Array) -> tuple[Array, Array]:
    """Return :math:`P^{(a, b)}_n(x)` and :math:`P^{(a, b)}_{n - 1}(x)`."""
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x)

    p1 = ((a + b + 2) * x + (a - b)) / 2
    for k in range(1, n):
        c = 2 * k + a + b
        a1 = 2 * (k + 1) * (k + a + b + 1) * c
        a2 = (c + 1) * (a * a - b * b)
        a3 = c * (c + 1) * (c + 2)
        a4 = 2 * (k + a) * (k + b) * (c + 2)
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1

    return p1, p0


def _jacobi_matrix(a: float, b: float, n: int) -> tuple[Array, Array]:
    k = np.arange(n, dtype=float)
    c = 2 * k + a + b

    diag = np.empty(n)
    diag[0] = (b - a) / (a + b + 2)
    if n > 1:
        diag[1:] = (b * b - a * a) / (c[1:] * (c[1:] + 2))

    k = k[1:]
    c = c[1:]
    offdiag = np.empty(n - 1)
    if n > 1:
        # the general formula is 0/0 at k = 1 when a + b = -1
        offdiag[0] = math.sqrt(4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b)))
        kk, cc = k[1:], c[1:]
        offdiag[1:] = np.sqrt(
            4 * kk * (kk + a) * (kk + b) * (kk + a + b) / (cc**2 * (cc + 1) * (cc - 1))
        )

    return diag, offdiag


def jacobi_gauss(a: float, b: float, N: int) -> QuadratureRule:
    """Gauss rule with :math:`N + 1` points for :math:`(1 - \\xi)^a (1 + \\xi)^b`."""
    if not (a > -1 and b > -1):
        raise DomainError(f"Jacobi parameters must satisfy a, b > -1: ({a}, {b})")
    _check_size(N)

    n = N + 1
    diag, offdiag = _jacobi_matrix(a, b, n)
    x = eigvalsh_tridiagonal(diag, offdiag) if n > 1 else diag.copy()
    x = np.clip(x, -1 + _EPS, 1 - _EPS)

    prev = np.inf
    for _ in range(_NEWTON_MAXITER):
        pn, _pm = _jacobi_eval(a, b, n, x)
        dpn = (n + a + b + 1) / 2 * _jacobi_eval(a + 1, b + 1, n - 1, x)[0]
        dx = pn / dpn
        x = x - dx

        step = np.max(np.abs(dx))
        if step <= _NEWTON_RTOL or (step <= _NEWTON_STALL and step >= prev / 2):
            break
        prev = step
    else:
        j = int(np.argmax(np.abs(dx)))
        raise ConvergenceError(
            f"Newton iteration for the zeros of P_{n}^({a}, {b}) did not "
            f"converge at node {j} (x = {x[j]!r}, last step {dx[j]:.3e})"
        )

    dpn = (n + a + b + 1) / 2 * _jacobi_eval(a + 1, b + 1, n - 1, x)[0]
    log_c = (
        gammaln(n + a + 1)
        + gammaln(n + b + 1)
        - gammaln(n + a + b + 1)
        - gammaln(n + 1)
        + (a + b + 1) * math.log(2)
    )
    weights = np.exp(log_c) / ((1 - x) * (1 + x) * dpn**2)

    return QuadratureRule(
        nodes=x,
        weights=weights,
        measure=Measure("jacobi", (float(a), float(b))),
    )


# }}}
