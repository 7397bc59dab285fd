r"""Log orthogonal functions (LOFs) and their generalized version (GLOFs).

A GLOF family is fixed by :class:`BasisParams` :math:`(\alpha, \beta, \lambda)`:

.. math::

    S^{(\alpha, \beta, \lambda)}_n(t) = t^{(\beta - \lambda) / 2}
        L^{(\alpha)}_n(-(\beta + 1) \log t),

orthogonal on :math:`(0, 1)` under :math:`(-\log t)^\alpha t^\lambda`. The LOFs
are the case :math:`\lambda = \beta`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import gammaln

from logspec.errors import DomainError
from logspec.laguerre import Measure, QuadratureRule, laguerre_gauss

Array = np.ndarray

#: Points closer to zero than this are clamped before taking logarithms.
TINY = 1.0e-300


@dataclass(frozen=True)
class BasisParams:
    alpha: float = 0.0
    """Exponent of the log weight :math:`(-\\log t)^\\alpha`."""
    beta: float = 5.0
    """Mapping parameter in :math:`y = -(\\beta + 1) \\log t`."""
    lam: float = 0.0
    """Exponent of the algebraic weight :math:`t^\\lambda`."""

    def __post_init__(self) -> None:
        if not self.alpha > -1:
            raise DomainError(f"alpha must be > -1: {self.alpha}")
        if not self.beta > -1:
            raise DomainError(f"beta must be > -1: {self.beta}")

    @classmethod
    def lof(cls, alpha: float, beta: float) -> BasisParams:
        return cls(alpha, beta, beta)

    @property
    def shift(self) -> float:
        """Exponent :math:`(\\beta - \\lambda) / 2` of the algebraic prefactor."""
        return (self.beta - self.lam) / 2

    def mapping(self, t: Array) -> Array:
        return -(self.beta + 1) * np.log(t)

    def replace(self, **kwargs: float) -> BasisParams:
        return BasisParams(
            kwargs.get("alpha", self.alpha),
            kwargs.get("beta", self.beta),
            kwargs.get("lam", self.lam),
        )


# {{{ evaluation


def _prepare_points(t: float | Array) -> tuple[Array, Array, Array]:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > 1) or np.any(np.isnan(t)):
        raise DomainError("GLOFs are evaluated on the closed interval [0, 1]")

    zero = t == 0
    tiny = (t > 0) & (t < TINY)
    if np.any(tiny):
        warnings.warn(
            f"clamping {int(np.sum(tiny))} points below {TINY:g}",
            RuntimeWarning,
            stacklevel=3,
        )

    logt = np.log(np.where(t < TINY, TINY, t))
    return t, logt, zero


def _apply_zero_limit(
    params: BasisParams, n: int, out: Array, zero: Array, *, shift: float
) -> Array:
    if not np.any(zero):
        return out

    if shift > 0:
        out[:, zero] = 0.0
    elif shift == 0:
        # S_0 = 1 and |S_n| -> oo with the sign of the leading coefficient
        out[0, zero] = 1.0
        if n >= 1:
            sign = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)
            out[1:, zero] = (-sign * np.inf)[:, None]
    else:
        raise DomainError(
            f"GLOFs with beta < lambda are unbounded at t = 0: {params}"
        )

    return out


def _lof_recurrence(alpha: float, n: int, x: Array, start: Array) -> Array:
    # recurrence in x = (beta + 1) log t = -y
    out = np.empty((n + 1, *x.shape))
    out[0] = start
    if n >= 1:
        out[1] = (x + alpha + 1) * start
    for k in range(1, n):
        out[k + 1] = ((2 * k + alpha + 1 + x) * out[k] - (k + alpha) * out[k - 1]) / (
            k + 1
        )

    return out


def glof_eval_all(params: BasisParams, n: int, t: float | Array) -> Array:
    """Evaluate :math:`S_0, \\dots, S_n` of the family *params* at *t*.

    :returns: an array of shape ``(n + 1, *np.shape(t))``.
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative: {n}")

    t, logt, zero = _prepare_points(t)
    g = params.shift
    start = np.exp(g * logt) if g != 0 else np.ones_like(logt)

    out = _lof_recurrence(params.alpha, n, (params.beta + 1) * logt, start)
    return _apply_zero_limit(params, n, out, zero, shift=g)


def lof_eval_log(params: BasisParams, n: int, logt: Array) -> Array:
    """Evaluate :math:`L^{(\\alpha)}_k(-(\\beta + 1) \\log t)`, :math:`k \\le n`,
    from :math:`\\log t` (the GLOFs without their algebraic prefactor)."""
    logt = np.asarray(logt, dtype=float)
    if np.any(logt > 0):
        raise DomainError("points must lie in (0, 1]")

    return _lof_recurrence(
        params.alpha, n, (params.beta + 1) * logt, np.ones_like(logt)
    )


def glof_eval(params: BasisParams, n: int, t: float | Array) -> Array:
    return glof_eval_all(params, n, t)[n]


def glof_deriv_all(params: BasisParams, n: int, t: float | Array) -> Array:
    """Evaluate the derivatives :math:`S'_0, \\dots, S'_n` at *t*.

    Uses

    .. math::

        \\partial_t S^{(\\alpha, \\beta, \\lambda)}_n =
            \\frac{\\beta - \\lambda}{2} S^{(\\alpha, \\beta, \\lambda + 2)}_n
            + (\\beta + 1) S^{(\\alpha + 1, \\beta, \\lambda + 2)}_{n - 1},

    where the second term is obtained as a cumulative sum of the first family.
    """
    return _reduced_deriv(params, n, t, scaled=False)


def glof_deriv(params: BasisParams, n: int, t: float | Array) -> Array:
    return glof_deriv_all(params, n, t)[n]


def _reduced_deriv(
    params: BasisParams, n: int, t: float | Array, *, scaled: bool
) -> Array:
    t, logt, zero = _prepare_points(t)
    out = glof_scaled_deriv_log(params, n, logt)
    if scaled:
        return out

    out = out * np.exp((params.shift - 1) * logt)
    if np.any(zero):
        out = _apply_zero_limit(params, n, out, zero, shift=params.shift - 1)

    return out


def glof_scaled_deriv_log(params: BasisParams, n: int, logt: Array) -> Array:
    """Evaluate :math:`t^{1 - \\gamma} S'_k(t)`, :math:`k = 0, \\dots, n`, from
    :math:`\\log t`.

    This is a polynomial in :math:`\\log t`, so taking the logarithm as input
    avoids underflow for points far below the double range.
    """
    logt = np.asarray(logt, dtype=float)
    if np.any(logt > 0):
        raise DomainError("points must lie in (0, 1]")

    lof = _lof_recurrence(
        params.alpha, n, (params.beta + 1) * logt, np.ones_like(logt)
    )
    # S^{(alpha + 1)}_{n - 1} = sum_{l < n} S^{(alpha)}_l
    cum = np.zeros_like(lof)
    cum[1:] = np.cumsum(lof[:-1], axis=0)
    return params.shift * lof + (params.beta + 1) * cum


def glof_scaled_deriv_all(params: BasisParams, n: int, t: float | Array) -> Array:
    """Evaluate :math:`t^{1 - \\gamma} S'_k(t)` for :math:`k = 0, \\dots, n`,
    with :math:`\\gamma = (\\beta - \\lambda) / 2`."""
    return _reduced_deriv(params, n, t, scaled=True)


def gamma_norm(n: int | Array, alpha: float, beta: float) -> float | Array:
    """Squared weighted norm of the *n*-th LOF/GLOF (independent of lambda)."""
    if not (alpha > -1 and beta > -1):
        raise DomainError(f"need alpha, beta > -1: ({alpha}, {beta})")

    n = np.asarray(n)
    out = np.exp(
        gammaln(n + alpha + 1) - gammaln(n + 1) - (alpha + 1) * math.log(beta + 1)
    )
    return float(out) if out.ndim == 0 else out


# }}}


# {{{ expansions


BasisKind = Literal["plain", "boundary"]


def boundary_stencil(params: BasisParams, N: int) -> Array:
    """Matrix of shape ``(N + 1, N)`` mapping boundary coefficients to plain ones.

    Column ``n - 1`` holds the coefficients of
    :math:`\\phi_n = \\frac{n}{n + \\alpha} S_n - S_{n - 1}`.
    """
    if N < 1:
        raise ValueError(f"boundary basis needs N >= 1: {N}")

    P = np.zeros((N + 1, N))
    n = np.arange(1, N + 1)
    P[n, n - 1] = n / (n + params.alpha)
    P[n - 1, n - 1] = -1.0
    return P


@dataclass(frozen=True)
class Expansion:
    """A finite expansion in a GLOF family.

    For ``kind="plain"`` the coefficients multiply :math:`S_0, \\dots, S_N`;
    for ``kind="boundary"`` they multiply :math:`\\phi_1, \\dots, \\phi_N`.
    """

    params: BasisParams
    coeffs: Array
    kind: BasisKind = "plain"

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a nonempty 1d array")
        if self.kind not in ("plain", "boundary"):
            raise ValueError(f"unknown basis kind: '{self.kind}'")
        if self.kind == "boundary" and not self.params.beta > self.params.lam:
            raise DomainError(
                f"boundary basis requires beta > lambda: {self.params}"
            )

        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - (self.kind == "plain")

    def to_plain(self) -> Expansion:
        if self.kind == "plain":
            return self

        P = boundary_stencil(self.params, self.coeffs.size)
        return Expansion(self.params, P @ self.coeffs)

    def __call__(self, t: float | Array) -> Array:
        e = self.to_plain()
        return np.tensordot(e.coeffs, glof_eval_all(e.params, e.degree, t), axes=1)

    def deriv(self, t: float | Array) -> Array:
        e = self.to_plain()
        return np.tensordot(e.coeffs, glof_deriv_all(e.params, e.degree, t), axes=1)


def pseudo_deriv_expansion(e: Expansion, *, same_family: bool = False) -> Expansion:
    """Coefficients of the pseudo-derivative
    :math:`t^{1 + \\gamma} \\partial_t (t^{-\\gamma} u)` of *e*.

    By default the result lives in the family :math:`(\\alpha + 1, \\beta, \\lambda)`,
    where the coefficients are simply shifted. With *same_family*, it is
    expressed in the family of *e* through the cumulative-sum identity instead.
    """
    e = e.to_plain()
    p = e.params
    c = e.coeffs

    if c.size == 1:
        return Expansion(p if same_family else p.replace(alpha=p.alpha + 1), [0.0])

    if same_family:
        # d_l = (beta + 1) sum_{n > l} c_n
        tail = np.cumsum(c[::-1])[::-1]
        return Expansion(p, (p.beta + 1) * tail[1:])

    return Expansion(p.replace(alpha=p.alpha + 1), (p.beta + 1) * c[1:])


def boundary_basis_eval(params: BasisParams, n: int, t: float | Array) -> Array:
    """Evaluate :math:`\\phi_n = \\frac{n}{n + \\alpha} S_n - S_{n - 1}`."""
    if not params.beta > params.lam:
        raise DomainError(f"boundary basis requires beta > lambda: {params}")
    if n < 1:
        raise ValueError(f"boundary basis is indexed from 1: {n}")

    S = glof_eval_all(params, n, t)
    return n / (n + params.alpha) * S[n] - S[n - 1]


# }}}


# {{{ quadrature


def gauss_glof(params: BasisParams, N: int, *, warn: bool = True) -> QuadratureRule:
    """Mapped Gauss rule with :math:`N + 1` points on :math:`(0, 1)`.

    The rule integrates :math:`f (-\\log t)^\\alpha t^\\lambda` exactly for all
    :math:`f = t^{\\beta - \\lambda} p(\\log t)` with :math:`\\deg p \\le 2 N + 1`.
    Nodes are returned in the order of the Laguerre nodes, i.e. decreasing.

    Nodes below ``1e-300`` are clamped (with a warning unless *warn* is false);
    the exact logarithms are kept in :attr:`QuadratureRule.log_nodes`.
    """
    lag = laguerre_gauss(params.alpha, N)
    b1 = params.beta + 1

    logt = -lag.nodes / b1
    log_w = (
        lag.log_weights
        + (params.lam - params.beta) * logt
        - (params.alpha + 1) * math.log(b1)
    )

    log_tiny = math.log(TINY)
    clamped = logt < log_tiny
    if np.any(clamped):
        if warn:
            warnings.warn(
                f"{int(np.sum(clamped))} mapped nodes underflow and are "
                f"clamped to {TINY:g}",
                RuntimeWarning,
                stacklevel=2,
            )
        # keep the clamped nodes distinct so the rule stays well-formed
        nodes = np.exp(np.maximum(logt, log_tiny))
        nodes[clamped] = TINY * (1.0 - 1.0e-12 * np.arange(1, np.sum(clamped) + 1))
    else:
        nodes = np.exp(logt)

    return QuadratureRule(
        nodes=nodes,
        weights=np.exp(log_w),
        measure=Measure(
            "glof", (float(params.alpha), float(params.beta), float(params.lam))
        ),
        log_weights=log_w,
        log_nodes=logt,
    )


def gauss_lof_power(exponent: float, N: int, *, warn: bool = True) -> QuadratureRule:
    """Rule on :math:`(0, 1)` for the weight :math:`t^{\\text{exponent}}`.

    Exact for :math:`t^{\\text{exponent}} p(\\log t)`, :math:`\\deg p \\le 2 N + 1`;
    a shorthand for the LOF rule with :math:`\\alpha = 0` and
    :math:`\\lambda = \\beta = \\text{exponent}`.
    """
    return gauss_glof(BasisParams.lof(0.0, exponent), N, warn=warn)


# }}}
