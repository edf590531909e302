"""Diffusion limits of the rescaled counting and Erlang processes.

Waiting times are scaled to ``tau T`` and unit jumps to size ``h``. Under the
scaling relation ``h = tau^beta`` both the fractional Poisson and the Wright
process converge to the same limit: the counting side to the inverse stable
subordinator, with Laplace-Laplace transform ``s^(beta-1) / (s^beta + kappa)``,
and the Erlang side to the stable subordinator, ``1 / (kappa + s^beta)``.

Both rescaled transforms depend on ``tau`` only through ``eps = tau^beta``
(``(tau s)^beta = eps s^beta`` and ``h kappa = eps kappa``) and are analytic
in ``eps`` at 0, so polynomial extrapolation in ``eps`` converges fast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import stable
from .exceptions import DomainError
from .montecarlo import RngStream, ks_statistic, simulate_counting
from .processes import make_process
from .specfun import EvalResult, as_order

PROCESSES = ("fpp", "wright")
#: KS distance at tau = 0.02 that the fpp sweep (beta = 1/2, t = 1, 2e4 paths) must stay below
KS_REGRESSION_BASELINE = 0.03
#: default tau ladder for extrapolation to tau -> 0
RICHARDSON_TAUS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class ScalingPair:
    """Waiting-time scale ``tau`` and jump scale ``h``."""

    tau: float
    h: float

    def __post_init__(self):
        if not (self.tau > 0 and self.h > 0):
            raise DomainError("tau and h must be positive")

    @classmethod
    def canonical(cls, beta, tau):
        """The pair obeying the scaling relation ``h = tau^beta``."""
        b = as_order(beta).beta
        return cls(float(tau), float(tau) ** b)

    def obeys_scaling(self, beta):
        return self.h == self.tau ** as_order(beta).beta


def _check_process(process):
    if process not in PROCESSES:
        raise DomainError(f"process must be one of {PROCESSES}, got {process!r}")


def _pieces(process, beta, pair, kappa, s):
    # returns (1 - phi(tau s), 1 - phi(tau s) exp(-h kappa), phi(tau s) exp(-h kappa))
    # in cancellation-free form
    x = (pair.tau * s) ** beta
    y = pair.h * kappa
    if process == "fpp":
        one_minus_phi = x / (1 + x)
        denom = (x - np.expm1(-y)) / (1 + x)
        prod = np.exp(-y) / (1 + x)
    else:
        one_minus_phi = -np.expm1(-x)
        denom = -np.expm1(-x - y)
        prod = np.exp(-x - y)
    return one_minus_phi, denom, prod


def _check_args(kappa, s):
    if np.real(s) <= 0:
        raise DomainError("the transform variable needs Re s > 0")
    if np.real(kappa) < 0:
        raise DomainError("kappa must be non-negative")


def rescaled_transform(process, beta, pair: ScalingPair, kappa, s):
    """Laplace-Laplace transform of the rescaled counting (sojourn) density.

    ``(1 - phi(tau s)) / s / (1 - phi(tau s) exp(-h kappa))`` with ``phi`` the
    waiting-time transform of ``process``: ``1/(1+u^beta)`` (fpp) or
    ``exp(-u^beta)`` (wright). At ``kappa = 0`` this is ``1/s``.

    Raises
    ------
    DomainError
        If ``|phi(tau s) exp(-h kappa)| >= 1`` (the geometric series in the
        jump count diverges) or the arguments are out of range.
    """
    _check_process(process)
    b = as_order(beta).beta
    _check_args(kappa, s)
    one_minus_phi, denom, prod = _pieces(process, b, pair, kappa, s)
    if not abs(prod) < 1:
        raise DomainError("|phi(tau s) exp(-h kappa)| must be < 1")
    return one_minus_phi / s / denom


def rescaled_erlang_transform(process, beta, pair: ScalingPair, kappa, s):
    """Transform of the rescaled Erlang density, ``h sum_{n>=1} (phi(tau s) e^(-h kappa))^n``.

    Under ``h = tau^beta`` this behaves like ``h / (h kappa + (tau s)^beta)``
    and tends to ``1 / (kappa + s^beta)``.
    """
    _check_process(process)
    b = as_order(beta).beta
    _check_args(kappa, s)
    _, denom, prod = _pieces(process, b, pair, kappa, s)
    if not abs(prod) < 1:
        raise DomainError("|phi(tau s) exp(-h kappa)| must be < 1")
    return pair.h * prod / denom


def limit_transform_counting(beta, kappa, s):
    """``s^(beta-1) / (s^beta + kappa)``."""
    b = as_order(beta).beta
    return s ** (b - 1) / (s**b + kappa)


def limit_transform_erlang(beta, kappa, s):
    """``1 / (kappa + s^beta)``."""
    b = as_order(beta).beta
    return 1.0 / (kappa + s**b)


def neville(x, y, x0=0.0):
    """Polynomial extrapolation of ``y(x)`` to ``x0``; returns ``(value, error estimate)``.

    The error estimate compares the interpolant through all nodes with the
    one that omits the first node.
    """
    x = np.asarray(x, dtype=float)
    p = np.array(y, dtype=complex if np.iscomplexobj(y) else float)
    k = p.size
    if k < 2:
        raise DomainError("at least two nodes are needed")
    for m in range(1, k):
        # p[i] becomes the interpolant through nodes i..i+m, evaluated at x0
        lo, hi = x[: k - m], x[m:]
        if m == k - 1:
            without_first = p[1]
        p[: k - m] = ((x0 - hi) * p[: k - m] - (x0 - lo) * p[1 : k - m + 1]) / (lo - hi)
    return p[0], float(abs(p[0] - without_first))


def richardson_limit(process, beta, kappa, s, taus=RICHARDSON_TAUS, erlang=False):
    """Extrapolate the rescaled transform to ``tau -> 0`` along ``h = tau^beta``.

    The transforms are analytic in ``eps = tau^beta``; the values at ``taus``
    are extrapolated to ``eps = 0`` with Neville's scheme.
    """
    b = as_order(beta).beta
    fn = rescaled_erlang_transform if erlang else rescaled_transform
    vals = [fn(process, b, ScalingPair.canonical(b, tau), kappa, s) for tau in taus]
    eps = [tau**b for tau in taus]
    v, err = neville(eps, vals)
    return EvalResult(v, err, "richardson")


def limit_density_counting(beta, x, t) -> EvalResult:
    """Inverse stable subordinator density ``t^(-beta) M_beta(x t^(-beta))``."""
    return stable.inverse_subordinator_pdf(beta, x, t)


def limit_density_erlang(beta, t, x) -> EvalResult:
    """Stable subordinator density ``f(t, x)`` in ``t`` at parameter ``x``."""
    return stable.subordinator_pdf(beta, t, x)


def erlang_limit_laplace(beta, x, s):
    """``int_0^inf exp(-s t) f(t, x) dt`` by adaptive quadrature (should equal ``exp(-x s^beta)``).

    Uses ``f(t, x) = x^(-1/beta) g(x^(-1/beta) t)`` and the substitution
    ``t = x^(1/beta) u``.
    """
    b = as_order(beta).beta
    if b == 1.0:
        return math.exp(-x * s)
    c = float(x) ** (1.0 / b)

    def integrand(u):
        return math.exp(-s * c * u) * float(stable.stable_pdf_values(b, np.array([u]))[0])

    total = 0.0
    for lo, hi in ((0.0, 0.05), (0.05, 1.0), (1.0, 20.0), (20.0, math.inf)):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
        total += val
    return total


def inverse_stable_cdf(beta, x, t):
    """``P(E(t) <= x) = P(S(x) >= t) = 1 - G_beta(t x^(-1/beta))`` for arrays ``x``."""
    b = as_order(beta).beta
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    pos = x > 0
    if b == 1.0:
        return (x >= t).astype(float)
    out[pos] = stable.stable_cdf_values(b, t * np.power(x[pos], -1.0 / b))[1]
    return out


def rescaled_counts(process, beta, pair: ScalingPair, t_fixed, paths, seed, first_path=0):
    """``h N(t_fixed)`` and a jitter uniform per path for the ``tau``-scaled process.

    Path ``i`` draws its waiting times and, afterwards, one jitter uniform from
    ``RngStream(seed, i)``.
    """
    law = make_process(process, beta)
    N = np.empty(int(paths), dtype=np.int64)
    U = np.empty(int(paths))
    for r, i in enumerate(range(int(first_path), int(first_path) + int(paths))):
        rng = RngStream(seed, i)
        path = simulate_counting(law, t_fixed, rng, time_scale=pair.tau)
        N[r] = path.count(t_fixed)
        U[r] = rng.random()
    return N, U


def convergence_sweep(process, beta, t_fixed, tau_list, paths, seed=42, runner=None):
    """KS distance of the rescaled counting value to the inverse-stable CDF, per tau.

    The lattice variable ``h N`` is jittered to ``h (N + U)``, ``U`` uniform,
    which turns it into a continuous variable with the same limit; its KS
    distance to the continuous limit CDF then measures convergence and not
    the lattice spacing alone.

    Returns a dict with one row per tau (``tau, h, ks_statistic, paths, pass``),
    the sampling scale ``sigma = 0.5/sqrt(paths)`` and ``monotone``: whether
    every step satisfies ``KS_next <= KS_prev + 2 sigma``.

    ``runner(process, beta, pair, t_fixed, paths, seed) -> (N, U)`` replaces
    :func:`rescaled_counts`, e.g. to spread the paths over worker processes.
    """
    _check_process(process)
    b = as_order(beta).beta
    taus = [float(x) for x in tau_list]
    if any(a <= c for a, c in zip(taus, taus[1:])):
        raise DomainError("tau_list must be decreasing")
    sigma = 0.5 / math.sqrt(paths)
    rows = []
    for tau in taus:
        pair = ScalingPair.canonical(b, tau)
        N, U = (runner or rescaled_counts)(process, b, pair, t_fixed, paths, seed)
        xs = np.sort(pair.h * (N + U))
        ks = ks_statistic(xs, inverse_stable_cdf(b, xs, t_fixed))
        rows.append({"tau": tau, "h": pair.h, "ks_statistic": ks, "paths": int(paths)})
    ok = [True] + [rows[i + 1]["ks_statistic"] <= rows[i]["ks_statistic"] + 2 * sigma
                   for i in range(len(rows) - 1)]
    for r, flag in zip(rows, ok):
        r["pass"] = bool(flag)
    return {
        "process": process,
        "beta": b,
        "t": float(t_fixed),
        "sigma": sigma,
        "rows": rows,
        "monotone": all(ok),
        "final_ks": rows[-1]["ks_statistic"],
    }
