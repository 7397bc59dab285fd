"""Command-line convergence experiments.

Every command sweeps a degree range ``--n A..B..S`` and writes one report row
per degree with the columns ``N,error_l2,error_linf,bound,cond,runtime_ms``
(CSV or JSON). ``nodes`` and ``project --compare legendre`` write node and
pointwise tables instead.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import mpmath as mp
import numpy as np
import numpy.polynomial.legendre as npleg
from scipy import integrate
from scipy.special import gamma

from logspec.approx import (
    SingularMonomial,
    interpolate,
    project,
    projection_error_bound,
    singular_projection_error,
    weighted_error,
)
from logspec.errors import DomainError
from logspec.fracops import mittag_leffler
from logspec.logbasis import BasisParams, gauss_glof
from logspec.solvers import (
    BvpProblem,
    IvpProblem,
    SolverConfig,
    error_norms,
    solve_bvp,
    solve_ivp,
)
from logspec.spacetime import DiffusionProblem, l2_error, solve_diffusion

Array = np.ndarray

logger = logging.getLogger("logspec")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = ("nodes", "quad", "project", "interp", "bound", "ivp", "bvp", "diffusion")
REPORT_COLUMNS = ("N", "error_l2", "error_linf", "bound", "cond", "runtime_ms")


class ConfigError(ValueError):
    pass


# {{{ builtin functions


@dataclass(frozen=True)
class Builtin:
    """A named function with its evaluation routes.

    *fn* acts on numpy arrays (of ``t`` or of ``(x1, x2, t)`` when
    ``arity == 3``), *mp_fn* on mpmath numbers for high-precision
    references. *singular* flags functions that are unbounded or not smooth
    at :math:`t = 0`. *exact* is the known solution when the function is a
    manufactured forcing.
    """

    name: str
    fn: Callable[..., Array]
    mp_fn: Callable[[Any], Any] | None = None
    singular: bool = False
    arity: int = 1
    exact: Builtin | None = field(default=None, repr=False)
    monomial: SingularMonomial | None = None


def _float_args(name: str, args: Sequence[str], count: int) -> list[float]:
    if len(args) != count:
        raise ConfigError(f"'{name}' takes {count} parameter(s), got {len(args)}")
    try:
        return [float(a) for a in args]
    except ValueError as exc:
        raise ConfigError(f"bad parameter for '{name}': {exc}") from None


def _pow(r: float, k: int) -> Builtin:
    if r < 0:
        # unbounded at 0: usable as an integrand, but not a monomial target
        if k != 0:
            raise ConfigError(f"log factors need a nonnegative power: t^{r:g}")
        return Builtin(
            f"pow:{r:g}", lambda t: np.asarray(t, dtype=float) ** r, lambda t: t**r,
            singular=True,
        )

    m = SingularMonomial(r, k)

    def mp_fn(t: Any) -> Any:
        return t**r * (-mp.log(t)) ** k if t > 0 else m(0.0)

    smooth = k == 0 and r >= 0 and float(r).is_integer()
    return Builtin(f"powlog:{r:g}:{k}", m, mp_fn, singular=not smooth, monomial=m)


def _bvp_solution() -> Builtin:
    return Builtin(
        "bvp-u",
        lambda t: t**1.5 * (1 - t),
        lambda t: t**1.5 * (1 - t),
        singular=True,
    )


def _bvp_forcing(mu: float) -> Builtin:
    # -D^mu u + e^t u for u = t^{3/2} - t^{5/2}, derivatives by the Euler formula
    c1 = gamma(2.5) / gamma(2.5 - mu)
    c2 = gamma(3.5) / gamma(3.5 - mu)

    def fn(t: Array) -> Array:
        t = np.asarray(t, dtype=float)
        return -(c1 * t ** (1.5 - mu) - c2 * t ** (2.5 - mu)) + np.exp(t) * t**1.5 * (1 - t)

    return Builtin("bvp-g", fn, singular=True, exact=_bvp_solution())


def _diffusion_solution(m: float) -> Builtin:
    def fn(x1: Array, x2: Array, t: Array) -> Array:
        return (t**m + t ** (2 * m)) * np.sin(np.pi * x1) * np.sin(np.pi * x2)

    return Builtin(f"sinsin:{m:g}", fn, singular=True, arity=3)


def _diffusion_forcing(m: float, nu: float) -> Builtin:
    c1 = gamma(m + 1) / gamma(m + 1 - nu)
    c2 = gamma(2 * m + 1) / gamma(2 * m + 1 - nu)

    def fn(x1: Array, x2: Array, t: Array) -> Array:
        ct = c1 * t ** (m - nu) + c2 * t ** (2 * m - nu)
        return (ct + 2 * np.pi**2 * (t**m + t ** (2 * m))) * np.sin(np.pi * x1) * np.sin(np.pi * x2)

    return Builtin(
        f"sinsin-f:{m:g}", fn, singular=True, arity=3, exact=_diffusion_solution(m)
    )


def _mittag(nu: float, K: float) -> Builtin:
    def fn(t: Array) -> Array:
        t = np.asarray(t, dtype=float)
        return mittag_leffler(nu, -K * t**nu)

    def mp_fn(t: Any) -> Any:
        # E_nu(z) = sum z^j / Gamma(nu j + 1), summed to working precision
        z = -K * t**nu
        return mp.nsum(lambda j: z**j / mp.gamma(nu * j + 1), [0, mp.inf])

    return Builtin(f"mittag:{nu:g}:{K:g}", fn, mp_fn, singular=True)


_SIMPLE: dict[str, Builtin] = {
    "zero": Builtin("zero", lambda t: np.zeros_like(np.asarray(t, dtype=float)), lambda t: 0),
    "sin": Builtin("sin", np.sin, mp.sin),
    "cos": Builtin("cos", np.cos, mp.cos),
    "exp": Builtin("exp", np.exp, mp.exp),
    "1+sin": Builtin("1+sin", lambda t: 1 + np.sin(t), lambda t: 1 + mp.sin(t)),
    "tsin": Builtin("tsin", lambda t: t * np.sin(t), lambda t: t * mp.sin(t)),
    "bvp-u": _bvp_solution(),
    "expxyt": Builtin("expxyt", lambda x1, x2, t: np.exp(x1 * x2 * t), arity=3),
}

_PARAMETRIZED = {
    "const": "const:c, the constant c",
    "pow": "pow:r, t^r",
    "powlog": "powlog:r:k, t^r (-log t)^k",
    "mittag": "mittag:nu:K, E_nu(-K t^nu)",
    "bvp-g": "bvp-g, forcing of -D^mu u + e^t u with u = t^{3/2}(1 - t) (uses --mu)",
    "sinsin": "sinsin:m, (t^m + t^{2m}) sin(pi x1) sin(pi x2)",
    "sinsin-f": "sinsin-f:m, diffusion forcing with solution sinsin:m (uses --nu)",
}


def registry_names() -> list[str]:
    return sorted(set(_SIMPLE) | set(_PARAMETRIZED))


def builtin_functions(name: str, *, order: float | None = None) -> Builtin:
    """Look up a builtin by *name*. *order* supplies the operator order for
    manufactured forcings."""
    head, *args = name.split(":")

    if head in _SIMPLE and not args:
        return _SIMPLE[head]
    if head == "const":
        (c,) = _float_args(name, args, 1)
        return Builtin(
            name, lambda t: np.full_like(np.asarray(t, dtype=float), c), lambda t: mp.mpf(c)
        )
    if head == "pow":
        (r,) = _float_args(name, args, 1)
        return _pow(r, 0)
    if head == "powlog":
        r, k = _float_args(name, args, 2)
        if not k.is_integer() or k < 0:
            raise ConfigError(f"log power must be a nonnegative integer: {name}")
        return _pow(r, int(k))
    if head == "mittag":
        nu, K = _float_args(name, args, 2)
        if not 0 < nu < 1:
            raise ConfigError(f"Mittag-Leffler order must be in (0, 1): {name}")
        return _mittag(nu, K)
    if head == "sinsin":
        (m,) = _float_args(name, args, 1)
        return _diffusion_solution(m)

    if head in ("bvp-g", "sinsin-f"):
        if order is None:
            raise ConfigError(f"'{name}' needs the operator order (--mu or --nu)")
        if head == "bvp-g":
            _float_args(name, args, 0)
            return _bvp_forcing(order)
        (m,) = _float_args(name, args, 1)
        return _diffusion_forcing(m, order)

    raise ConfigError(
        f"unknown function '{name}'; known: "
        + "; ".join([*sorted(_SIMPLE), *_PARAMETRIZED.values()])
    )


# }}}


# {{{ configuration


@dataclass(frozen=True)
class Sweep:
    start: int
    stop: int
    step: int = 1

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ConfigError(f"sweep step must be positive: {self.step}")
        if self.start < 0 or self.stop < self.start:
            raise ConfigError(f"empty or negative sweep: {self.start}..{self.stop}")

    @property
    def values(self) -> list[int]:
        return list(range(self.start, self.stop + 1, self.step))

    @classmethod
    def parse(cls, text: str) -> Sweep:
        parts = text.split("..")
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise ConfigError(f"sweep must look like 'N' or 'A..B' or 'A..B..S': {text!r}")
        if len(values) == 1:
            return cls(values[0], values[0])
        if len(values) in (2, 3):
            return cls(*values)
        raise ConfigError(f"sweep must look like 'N' or 'A..B' or 'A..B..S': {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    params: BasisParams
    sweep: Sweep
    nu: float | None = None
    mu: float | None = None
    nx: int = 16
    ni: int | None = None
    f: str | None = None
    q: str | None = None
    g: str | None = None
    u0: float = 0.0
    T: float = 1.0
    reference: str | None = None
    compare: str | None = None
    jobs: int = 1
    out: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command '{self.command}'")
        if self.jobs < 1:
            raise ConfigError(f"--jobs must be positive: {self.jobs}")
        if self.reference not in (None, "exact", "self"):
            raise ConfigError(f"--reference must be 'exact' or 'self': {self.reference}")
        if self.compare not in (None, "legendre"):
            raise ConfigError(f"--compare only supports 'legendre': {self.compare}")
        if self.compare is not None and self.command != "project":
            raise ConfigError("--compare is only available for 'project'")


@dataclass(frozen=True)
class Row:
    N: int
    error_l2: float | None = None
    error_linf: float | None = None
    bound: float | None = None
    cond: float | None = None
    runtime_ms: float = 0.0


# }}}


# {{{ experiments


Runner = Callable[[int], Row]


def _require(value: Any, flag: str, command: str) -> Any:
    if value is None:
        raise ConfigError(f"'{command}' needs {flag}")
    return value


def _lookup(name: str | None, flag: str, cfg: ExperimentConfig, **kw: Any) -> Builtin:
    fn = builtin_functions(_require(name, flag, cfg.command), **kw)
    want = 3 if cfg.command == "diffusion" else 1
    if fn.arity != want:
        raise ConfigError(f"{flag} {name}: '{cfg.command}' needs a function of {want} variable(s)")
    return fn


def _timed(fn: Callable[[], Any]) -> tuple[Any, float]:
    start = time.perf_counter()
    result = fn()
    return result, 1000.0 * (time.perf_counter() - start)


def _mp_reference(f: Builtin, params: BasisParams) -> float:
    """High-precision :math:`\\int_0^1 f(t) (-\\log t)^\\alpha t^\\lambda dt`."""
    a, lam = params.alpha, params.lam
    fmp = f.mp_fn
    if fmp is None:
        def fmp(t: Any) -> Any:
            return mp.mpf(float(f.fn(np.array(float(t)))))

    with mp.workdps(30):
        value = mp.quad(lambda t: fmp(t) * (-mp.log(t)) ** a * t**lam, [0, 0.5, 1])
    return float(value)


def _quad_runner(cfg: ExperimentConfig) -> Runner:
    f = _lookup(cfg.f, "--f", cfg)
    exact = _mp_reference(f, cfg.params)
    logger.info("quad reference %s = %.17g", f.name, exact)

    def run(N: int) -> Row:
        value, ms = _timed(lambda: gauss_glof(cfg.params, N).integrate(f.fn))
        err = abs(value - exact)
        return Row(N, err, err, runtime_ms=ms)

    return run


def _uniform_points(f: Builtin) -> Array:
    t = np.linspace(0.0, 1.0, 1000)
    return t[1:] if f.singular else t


def _approx_runner(cfg: ExperimentConfig) -> Runner:
    f = _lookup(cfg.f, "--f", cfg)
    params = cfg.params
    t = _uniform_points(f)
    ft = f.fn(t)

    def run(N: int) -> Row:
        if cfg.command == "project":
            e, ms = _timed(lambda: project(params, N, f.fn))
        else:
            e, ms = _timed(lambda: interpolate(params, N, f.fn))

        l2 = weighted_error(f.fn, e)
        linf = float(np.max(np.abs(e(t) - ft)))
        bound = None
        if cfg.command == "project" and f.monomial is not None:
            try:
                bound = projection_error_bound(f.monomial, params, N).bound
            except DomainError:
                pass
        return Row(N, l2, linf, bound, runtime_ms=ms)

    return run


def _bound_runner(cfg: ExperimentConfig) -> Runner:
    f = _lookup(cfg.f, "--f", cfg)
    if f.monomial is None:
        raise ConfigError(f"'bound' needs pow:r or powlog:r:k, got {f.name}")
    m = f.monomial

    def run(N: int) -> Row:
        err, ms = _timed(lambda: singular_projection_error(m, cfg.params, N))
        try:
            bound = projection_error_bound(m, cfg.params, N).bound
        except DomainError as exc:
            logger.debug("no bound at N = %d: %s", N, exc)
            bound = None
        return Row(N, err, None, bound, runtime_ms=ms)

    return run


def _solver_config(cfg: ExperimentConfig, N: int) -> SolverConfig:
    return SolverConfig(params=cfg.params, N=N, inner_rule_size=cfg.ni)


def _exact_solution(cfg: ExperimentConfig, forcing: Builtin, order: float | None) -> Builtin | None:
    if cfg.f is not None:
        return _lookup(cfg.f, "--f", cfg, order=order)
    return forcing.exact


def _reference_mode(cfg: ExperimentConfig, exact: Builtin | None) -> str:
    mode = cfg.reference or ("exact" if exact is not None else "self")
    if mode == "exact" and exact is None:
        raise ConfigError(f"'{cfg.command}' has no exact solution; pass --f or --reference self")
    return mode


def _ode_runner(cfg: ExperimentConfig) -> Runner:
    if cfg.command == "ivp":
        order = _require(cfg.nu, "--nu", "ivp")
    else:
        order = _require(cfg.mu, "--mu", "bvp")

    g = _lookup(cfg.g, "--g", cfg, order=order)
    q = None if cfg.q is None else _lookup(cfg.q, "--q", cfg, order=order).fn
    exact = _exact_solution(cfg, g, order)
    mode = _reference_mode(cfg, exact)

    if cfg.command == "ivp":
        problem: Any = IvpProblem(order, q, g.fn, cfg.u0)
        solve: Callable[[Any, SolverConfig], Any] = solve_ivp
    else:
        if cfg.u0 != 0:
            raise ConfigError("--u0 does not apply to 'bvp'")
        problem = BvpProblem(order, q, g.fn)
        solve = solve_bvp
    # validates beta > lambda before any work is done
    _solver_config(cfg, cfg.sweep.start)

    def run(N: int) -> Row:
        c = _solver_config(cfg, N)
        sol, ms = _timed(lambda: solve(problem, c))
        if mode == "exact":
            assert exact is not None
            err = error_norms(sol, exact.fn)
        else:
            err = error_norms(sol, solve(problem, c.refined(8)))
        return Row(N, err.l2, err.linf, None, sol.cond, ms)

    return run


def _diffusion_runner(cfg: ExperimentConfig) -> Runner:
    nu = _require(cfg.nu, "--nu", "diffusion")
    f = _lookup(cfg.f, "--f", cfg, order=nu)
    mode = _reference_mode(cfg, f.exact)
    problem = DiffusionProblem(nu, f.fn, cfg.T)
    _solver_config(cfg, cfg.sweep.start)

    x = np.linspace(-1.0, 1.0, 33)
    tt = np.linspace(0.0, cfg.T, 33)

    def run(N: int) -> Row:
        c = _solver_config(cfg, N)
        sol, ms = _timed(lambda: solve_diffusion(problem, cfg.nx, c))
        if mode == "exact":
            assert f.exact is not None
            ref: Any = f.exact.fn
            X1, X2, TT = np.meshgrid(x, x, tt, indexing="ij")
            r = ref(X1, X2, TT)
        else:
            ref = solve_diffusion(problem, cfg.nx + 4, c.refined(8))
            r = ref.grid(x, x, tt)
        linf = float(np.max(np.abs(sol.grid(x, x, tt) - r)))
        return Row(N, l2_error(sol, ref), linf, None, sol.cond, ms)

    return run


def make_runner(cfg: ExperimentConfig) -> Runner:
    if cfg.command == "quad":
        return _quad_runner(cfg)
    if cfg.command in ("project", "interp"):
        return _approx_runner(cfg)
    if cfg.command == "bound":
        return _bound_runner(cfg)
    if cfg.command in ("ivp", "bvp"):
        return _ode_runner(cfg)
    if cfg.command == "diffusion":
        return _diffusion_runner(cfg)
    raise ConfigError(f"'{cfg.command}' does not produce a convergence report")


def run(cfg: ExperimentConfig) -> list[Row]:
    """Run the sweep, concurrently up to ``cfg.jobs``; rows are ordered by N."""
    runner = make_runner(cfg)
    logger.debug(
        "%s with %s, sweep %s, %d job(s)", cfg.command, cfg.params, cfg.sweep.values, cfg.jobs
    )

    def logged(N: int) -> Row:
        row = runner(N)
        logger.info("N = %d done in %.1f ms", N, row.runtime_ms)
        return row

    if cfg.jobs == 1:
        return [logged(N) for N in cfg.sweep.values]
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(logged, cfg.sweep.values))


# }}}


# {{{ tables


def node_table(cfg: ExperimentConfig) -> tuple[list[str], list[list[Any]]]:
    rows = []
    for N in cfg.sweep.values:
        rule = gauss_glof(cfg.params, N)
        rows.extend([N, j, t, w] for j, (t, w) in enumerate(zip(rule.nodes, rule.weights)))
    return ["N", "j", "node", "weight"], rows


def legendre_projection(f: Callable[[Array], Array], N: int) -> Callable[[Array], Array]:
    """:math:`L^2(0, 1)` projection onto shifted Legendre polynomials
    :math:`P_n(2t - 1)`, with adaptive quadrature for the coefficients."""
    coeffs = np.empty(N + 1)
    for n in range(N + 1):
        e = np.zeros(n + 1)
        e[n] = 1.0
        value, _ = integrate.quad(
            lambda t: float(f(np.array(t))) * npleg.legval(2 * t - 1, e), 0.0, 1.0, limit=400
        )
        coeffs[n] = (2 * n + 1) * value

    return lambda t: npleg.legval(2 * np.asarray(t) - 1, coeffs)


def comparison_table(cfg: ExperimentConfig) -> tuple[list[str], list[list[Any]]]:
    f = _lookup(cfg.f, "--f", cfg)
    N = cfg.sweep.stop
    t = _uniform_points(f)
    ft = f.fn(t)

    glof = project(cfg.params, N, f.fn)
    leg = legendre_projection(f.fn, N)
    e1 = np.abs(glof(t) - ft)
    e2 = np.abs(leg(t) - ft)
    return ["t", "glof_error", "legendre_error"], [[a, b, c] for a, b, c in zip(t, e1, e2)]


def _cell(value: Any) -> Any:
    if value is None:
        return None
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def format_table(header: Sequence[str], rows: Sequence[Sequence[Any]], fmt: str) -> str:
    if fmt == "json":
        data = [{k: _cell(v) for k, v in zip(header, row)} for row in rows]
        return json.dumps(data, indent=2) + "\n"

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v)
                         for v in row])
    return buf.getvalue()


def report_table(rows: Sequence[Row]) -> tuple[list[str], list[list[Any]]]:
    return list(REPORT_COLUMNS), [[getattr(r, k) for k in REPORT_COLUMNS] for r in rows]


# }}}


# {{{ main


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="logspec",
        description="Convergence experiments with generalized log orthogonal functions.",
        epilog="functions: " + ", ".join(registry_names()),
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=5.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    order = p.add_mutually_exclusive_group()
    order.add_argument("--nu", type=float, help="Caputo order in (0, 1)")
    order.add_argument("--mu", type=float, help="Riemann-Liouville order in (1, 2)")
    p.add_argument("--n", default="4..40..4", help="degree sweep: N, A..B or A..B..S")
    p.add_argument("--nx", type=int, default=16, help="spatial degree for 'diffusion'")
    p.add_argument("--ni", type=int, default=None, help="inner rule size (default 2N + 16)")
    p.add_argument("--f", help="function, exact solution or space-time forcing")
    p.add_argument("--q", help="reaction coefficient")
    p.add_argument("--g", help="right-hand side")
    p.add_argument("--u0", type=float, default=0.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--reference", choices=("exact", "self"))
    p.add_argument("--compare", choices=("legendre",))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        command=ns.command,
        params=BasisParams(ns.alpha, ns.beta, ns.lam),
        sweep=Sweep.parse(ns.n),
        nu=ns.nu,
        mu=ns.mu,
        nx=ns.nx,
        ni=ns.ni,
        f=ns.f,
        q=ns.q,
        g=ns.g,
        u0=ns.u0,
        T=ns.T,
        reference=ns.reference,
        compare=ns.compare,
        jobs=ns.jobs,
        out=ns.out,
        format=ns.format,
    )


def _setup_logging() -> None:
    level = os.environ.get("LOGSPEC_LOG", "").lower()
    levels = {"debug": logging.DEBUG, "info": logging.INFO}
    logging.basicConfig(
        stream=sys.stderr,
        level=levels.get(level, logging.WARNING),
        format="logspec: %(levelname)s: %(message)s",
    )


def _summary(cfg: ExperimentConfig, header: list[str], rows: list[list[Any]]) -> str:
    if header[0] != "N" or "error_l2" not in header:
        return f"{cfg.command}: wrote {len(rows)} rows to {cfg.out}"
    i = header.index("error_l2")
    errs = [r[i] for r in rows if r[i] is not None]
    last = f", final error_l2 {errs[-1]:.3e}" if errs else ""
    return f"{cfg.command}: wrote {len(rows)} rows to {cfg.out}{last}"


def execute(cfg: ExperimentConfig) -> tuple[list[str], list[list[Any]]]:
    if cfg.command == "nodes":
        return node_table(cfg)
    if cfg.compare == "legendre":
        return comparison_table(cfg)
    return report_table(run(cfg))


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    try:
        cfg = config_from_args(ns)
        if cfg.out is not None:
            # fail before the computation if the path is unwritable
            with open(cfg.out, "a", encoding="utf-8"):
                pass
        header, rows = execute(cfg)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"logspec: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"logspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"logspec: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    text = format_table(header, rows, cfg.format)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as outf:
            outf.write(text)
        print(_summary(cfg, header, rows))

    return EXIT_OK


# }}}
