"""Numerical Laplace inversion on the fixed Talbot contour, and transform-pair checks.

The inverter is deliberately independent of the series code in
:mod:`fracrenewal.specfun`: it only evaluates transforms at complex points, so
agreement between the two is a genuine cross-check.

Transforms are called with an :class:`mpmath.mpc` argument and must return a
number mpmath can convert. Python operators on ``mpc`` use the principal branch
(``s**b == exp(b*Log s)``), which is the branch every transform here needs.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy import optimize

from .exceptions import ConvergenceError, DomainError, PrecisionError
from .specfun import EvalResult, Method, as_order

__all__ = [
    "LaplaceSample",
    "TransformPair",
    "talbot_invert",
    "verify_pair",
    "counting_prob_by_inversion",
    "counting_cdf_by_inversion",
    "montroll_weiss_check",
    "standard_pairs",
]

DEFAULT_NODES = 64
_MAX_DPS = 1500


@dataclass(frozen=True)
class LaplaceSample:
    s: complex
    value: complex
    kappa: Optional[complex] = None


@dataclass
class TransformPair:
    """A Laplace transform together with an independently computed original."""

    name: str
    transform: Callable
    reference_time_domain: Optional[Callable[[float], float]] = None
    domain: tuple = (0.05, 50.0)
    meta: dict = field(default_factory=dict)


@functools.lru_cache(maxsize=16)
def _contour(M, dps):
    """Unscaled contour points s/r, weights (1 + i sigma) for theta_k = k pi / M."""
    with mpmath.workdps(dps):
        pts, wts = [], []
        for k in range(1, M):
            theta = k * mpmath.pi / M
            cot = mpmath.cot(theta)
            pts.append(theta * mpmath.mpc(cot, 1))
            wts.append(mpmath.mpc(1, theta + (theta * cot - 1) * cot))
        return tuple(pts), tuple(wts)


def _talbot(F, t, M):
    # Fixed Talbot rule (Abate & Valko 2004) with M nodes. The terms carry
    # factors up to e^{rt} = e^{0.4 M} that cancel, so the working precision
    # starts at those 0.18 M digits plus a double-precision result, and is raised
    # when the transform itself grows along the contour (e.g. exp(-s^b), b > 1/2).
    dps = int(0.18 * M) + 24
    while True:
        pts, wts = _contour(M, dps)
        with mpmath.workdps(dps):
            tm = mpmath.mpf(t)
            r = mpmath.mpf(2 * M) / (5 * tm)
            first = 0.5 * mpmath.re(mpmath.exp(r * tm) * F(mpmath.mpc(r, 0)))
            acc = first
            big = abs(first)
            for p, w in zip(pts, wts):
                term = mpmath.re(mpmath.exp(tm * (r * p)) * F(r * p) * w)
                acc += term
                big = max(big, abs(term))
            value = r / M * acc
            scale = r / M * big
            if scale == 0:
                return 0.0
            need = float(mpmath.log10(scale / max(abs(value), mpmath.mpf(10) ** -30))) + 20
        if need <= dps:
            return float(value)
        if need > _MAX_DPS:
            raise ConvergenceError(
                f"Talbot sum at t={t} cancels beyond {_MAX_DPS} digits", estimates=(float(value),)
            )
        dps = int(need) + 5


def _hyperbola_excess(c, N, alpha=0.08 * math.pi, d=0.07 * math.pi, log_tol=40.0):
    return 2.0 * math.pi * d * N / math.acosh((1.0 + log_tol / c) / math.sin(alpha)) - log_tol - c


def _hyperbola(F, t, N, alpha=0.08 * math.pi, d=0.07 * math.pi, log_tol=40.0):
    # Trapezoid rule on s(u) = mu (1 + sin(i u - alpha)). The contour family
    # s(u + i y), |y| < d, keeps every point within 0.65 pi of the positive
    # axis, so transforms like exp(-x s^b) with b < 3/4 decay along it; mu and
    # the step h balance the discretisation error exp(mu t - 2 pi d / h)
    # against truncation at |u| = N h.
    sa = math.sin(alpha)

    def excess(c):
        return _hyperbola_excess(c, N, alpha, d, log_tol)

    if excess(1.0) <= 0:
        raise ConvergenceError(f"{N} nodes are too few for the hyperbolic contour")
    c = optimize.brentq(excess, 1.0, 2.0 * math.pi * d * N)
    h = math.acosh((1.0 + log_tol / c) / sa) / N
    mu = c / t
    dps = int(c / math.log(10.0)) + 30
    with mpmath.workdps(dps):
        mu_m, h_m, tm = mpmath.mpf(mu), mpmath.mpf(h), mpmath.mpf(t)
        am = mpmath.mpf(alpha)
        acc = mu_m * mpmath.cos(am) * mpmath.exp(mu_m * (1 - mpmath.sin(am)) * tm) * mpmath.re(
            F(mpmath.mpc(mu_m * (1 - mpmath.sin(am)), 0))
        )
        for k in range(1, N + 1):
            w = mpmath.mpc(-alpha, k * h)  # i u - alpha
            s = mu_m * (1 + mpmath.sin(w))
            ds = mpmath.mpc(0, 1) * mu_m * mpmath.cos(w)
            acc += 2 * mpmath.im(mpmath.exp(s * tm) * F(s) * ds)
        return float(h_m / (2 * mpmath.pi) * acc)


def _converged(rule, t, sizes, target):
    """Run ``rule`` on increasing ``sizes``; return (estimate, bound) once settled."""
    est = [rule(t, sizes[0]), rule(t, sizes[1])]
    d_prev = math.inf
    for i in range(1, len(sizes)):
        if i > 1:
            est.append(rule(t, sizes[i]))
        f = est[-1]
        d = abs(est[-1] - est[-2])
        floor = 1e-14 * max(1.0, abs(f))
        # estimates that differ by orders of magnitude are not converging, only wandering
        wild = d > 1e3 * max(1.0, min(abs(est[-1]), abs(est[-2])))
        if not math.isfinite(f) or wild or (d > floor and d >= d_prev):
            raise ConvergenceError(
                f"Laplace inversion does not settle at t={t}: {est!r}", estimates=tuple(est)
            )
        if d <= target * max(1.0, abs(f)):
            return f, max(d, 1e-16 * abs(f))
        d_prev = d
    raise ConvergenceError(
        f"Laplace inversion at t={t} still moving after {sizes[-1]} nodes: {est!r}",
        estimates=tuple(est),
    )


def talbot_invert(transform, t, nodes=DEFAULT_NODES, *, target=1e-12, max_nodes=1024) -> EvalResult:
    """Invert ``transform`` at time ``t`` on the fixed Talbot contour.

    The rule with ``nodes`` points is compared with the one with ``nodes/2``;
    the finer estimate is returned with ``abs_err_bound`` equal to their
    difference. When that exceeds ``target * max(1, |f|)`` the node count keeps
    doubling up to ``max_nodes``. If the Talbot sums do not settle (transforms
    growing in the left half-plane, such as ``exp(-x s^b)`` with ``b > 1/2``
    at small ``t``) the inversion is repeated on a hyperbolic contour that stays
    within ``0.65 pi`` of the positive real axis.

    Raises
    ------
    ConvergenceError
        If neither contour gives estimates that settle under node doubling.
    """
    t = float(t)
    nodes = int(nodes)
    if not t > 0:
        raise DomainError("Laplace inversion needs t > 0")
    if nodes < 16:
        raise DomainError("at least 16 nodes are required")
    sizes = [nodes // 2]
    while sizes[-1] < max_nodes:
        sizes.append(2 * sizes[-1])
    try:
        f, bound = _converged(lambda tt, M: _talbot(transform, tt, M), t, sizes, target)
    except ConvergenceError as first:
        try:
            log_tol = -math.log(target) + 6.0
            # the smallest node counts cannot reach log_tol; start where they can
            sizes = [N for N in (128, 256, 512, 1024, 2048)
                     if _hyperbola_excess(1.0, N, log_tol=log_tol) > 0][:4]
            f, bound = _converged(
                lambda tt, N: _hyperbola(transform, tt, N, log_tol=log_tol),
                t, sizes, target,
            )
        except ConvergenceError:
            raise first from None
    return EvalResult(f, bound, Method.LAPLACE_INVERSION)


def verify_pair(pair: TransformPair, t_grid, tol, nodes=DEFAULT_NODES):
    """Invert ``pair`` on ``t_grid`` and compare with its reference original.

    Returns a dict ``{pair, pass, max_abs_err, tolerance, records}``; every
    record is ``{pair, t, reference, inverted, abs_err, pass}``. A point whose
    inversion fails is recorded with ``inverted = nan`` and ``pass = False``.
    """
    if pair.reference_time_domain is None:
        raise DomainError(f"pair {pair.name!r} has no reference original")
    records = []
    worst = 0.0
    for t in np.asarray(t_grid, dtype=float).ravel():
        ref = float(pair.reference_time_domain(float(t)))
        try:
            # settle the inversion two digits below the comparison tolerance
            inv = talbot_invert(pair.transform, t, nodes, target=tol * 1e-2).value
            err = abs(inv - ref)
        except (ConvergenceError, PrecisionError):
            inv, err = float("nan"), float("inf")
        ok = err <= tol
        worst = max(worst, err)
        records.append(
            {"pair": pair.name, "t": float(t), "reference": ref, "inverted": inv,
             "abs_err": err, "pass": bool(ok)}
        )
    return {
        "pair": pair.name,
        "pass": all(r["pass"] for r in records),
        "max_abs_err": worst,
        "tolerance": tol,
        "records": records,
    }


def counting_prob_by_inversion(beta, n, t, nodes=DEFAULT_NODES, lambda_scale=1.0) -> EvalResult:
    """Fractional Poisson ``p_n(t)`` from the transform ``s^(b-1) / (1 + s^b)^(n+1)``.

    With ``lambda_scale`` the time axis is rescaled, ``p_n(t) -> p_n(lambda t)``.
    """
    b = as_order(beta).beta
    n = int(n)
    if n < 0:
        raise DomainError("n must be non-negative")
    bm = mpmath.mpf(b)

    def F(s):
        sb = s**bm
        return s ** (bm - 1) / (1 + sb) ** (n + 1)

    res = talbot_invert(F, float(lambda_scale) * float(t), nodes)
    return res


def counting_cdf_by_inversion(beta, n, t, nodes=DEFAULT_NODES) -> EvalResult:
    """Fractional Poisson Erlang CDF ``Q_n(t)`` from ``1 / (s (1 + s^b)^n)``."""
    bm = mpmath.mpf(as_order(beta).beta)
    n = int(n)

    def F(s):
        return 1 / (s * (1 + s**bm) ** n)

    return talbot_invert(F, t, nodes)


def _waiting_transform(process, beta):
    if process == "fpp":
        return lambda s: 1.0 / (1.0 + s**beta)
    if process == "wright":
        return lambda s: np.exp(-(s**beta))
    raise DomainError(f"unknown process {process!r}")


def montroll_weiss_check(beta, process, kappa, s, n_terms=60, quadrature=True):
    """Check the unit-jump Montroll-Weiss formula at a real point ``(kappa, s)``.

    Compares the closed form ``(1 - phi(s))/s / (1 - phi(s) e^-kappa)`` with

    * the partial geometric sum of its expansion to ``n_terms`` terms, and
    * (``quadrature=True``) the sum of numerically Laplace-transformed analytic
      counting probabilities ``sum_n p_n(s) e^{-n kappa}``.
    """
    b = as_order(beta).beta
    kappa = float(kappa)
    s = float(s)
    if not (kappa >= 0 and s > 0):
        raise DomainError("need kappa >= 0 and s > 0")
    phi = float(_waiting_transform(process, b)(s))
    ratio = phi * math.exp(-kappa)
    if not abs(ratio) < 1:
        raise DomainError("geometric ratio |phi(s) e^-kappa| must be below 1")
    psi = (1.0 - phi) / s
    closed = psi / (1.0 - ratio)
    n = np.arange(n_terms + 1)
    partial = math.fsum(psi * ratio**n)
    report = {
        "process": process,
        "beta": b,
        "kappa": kappa,
        "s": s,
        "closed_form": closed,
        "partial_sum": partial,
        "partial_sum_error": abs(closed - partial),
        "geometric_tail_bound": psi * ratio ** (n_terms + 1) / (1.0 - ratio),
    }
    if quadrature:
        pn_hat = _laplace_of_counting_probs(process, b, s, n_terms)
        termwise = math.fsum(pn_hat * np.exp(-kappa * n))
        report["termwise_sum"] = termwise
        report["termwise_error"] = abs(closed - termwise)
    return report


def _laplace_of_counting_probs(process, beta, s, n_max, order=400):
    """``int_0^inf e^{-s t} p_n(t) dt`` for n = 0..n_max by Gauss-Legendre quadrature.

    The substitution ``t = u^(1/beta)`` removes the ``t^(n beta)`` behaviour at the
    origin; the integral is cut where ``e^{-s t}`` drops below 1e-18.
    """
    from .processes import make_process

    proc = make_process(process, beta)
    T = 42.0 / s
    U = T**beta
    # composite rule: the integrand varies on scale ~1 in u
    panels = max(8, int(math.ceil(U)))
    x, w = np.polynomial.legendre.leggauss(order // 8 if order >= 64 else order)
    edges = np.linspace(0.0, U, panels + 1)
    a, bb = edges[:-1, None], edges[1:, None]
    u = (0.5 * (bb - a) * x[None, :] + 0.5 * (bb + a)).ravel()
    wu = (0.5 * (bb - a) * w[None, :]).ravel()
    t = u ** (1.0 / beta)
    jac = u ** (1.0 / beta - 1.0) / beta
    P = proc.counting_prob_matrix(t, n_max)
    weights = wu * jac * np.exp(-s * t)
    return weights @ P


def standard_pairs(beta, x_values=(0.5, 1.0, 2.0)):
    """The transform pairs of the acceptance suite for order ``beta`` (``0 < beta < 1``).

    Originals come from the series/closed-form code paths (specfun, stable),
    never from inversion.
    """
    from . import stable
    from .specfun import ml_density, ml_survival

    b = as_order(beta).beta
    bm = mpmath.mpf(b)
    pairs = [
        TransformPair(
            f"phi[beta={b}]",
            lambda s: 1 / (1 + s**bm),
            lambda t: float(ml_density(b, t)),
        ),
        TransformPair(
            f"psi[beta={b}]",
            lambda s: s ** (bm - 1) / (1 + s**bm),
            lambda t: float(ml_survival(b, t)),
        ),
        TransformPair(
            f"stable_pdf[beta={b}]",
            lambda s: mpmath.exp(-(s**bm)),
            lambda t: stable.stable_pdf(b, t).value,
        ),
    ]
    for xv in x_values:
        xm = mpmath.mpf(xv)
        pairs.append(
            TransformPair(
                f"inverse_subordinator[beta={b},x={xv}]",
                lambda s, xm=xm: s ** (bm - 1) * mpmath.exp(-xm * s**bm),
                lambda t, xv=xv: stable.inverse_subordinator_pdf(b, xv, t).value,
            )
        )
    return pairs
