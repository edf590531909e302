"""One-sided (extremal) stable law of order beta with Laplace transform exp(-s^beta).

Scalar evaluators go through the M-Wright function,

    g_beta(t) = beta t^(-beta-1) M_beta(t^-beta),   G_beta(t) = W_{-beta,1}(-t^-beta),

and return :class:`~fracrenewal.specfun.EvalResult`. Bulk evaluation on arrays
(Monte Carlo comparisons, grid convolutions) uses Zolotarev's integral
representation behind Kanter's sampler instead:

    G_beta(t) = (1/pi) int_0^pi exp(-a(u) t^(-c)) du,   c = beta / (1 - beta),

with a positive integrand, which Gauss-Legendre panels handle uniformly in t.
The two routes are independent and are cross-checked in the tests.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy import special

from .exceptions import DegenerateLawError, DomainError
from .specfun import EvalResult, Method, as_order, m_wright, m_wright_saddle, wright
from .specfun import wright_minus_leading
from .specfun import _saddle_exponent

__all__ = [
    "StableLaw",
    "stable_pdf",
    "stable_cdf",
    "stable_sf",
    "subordinator_pdf",
    "subordinator_pdf_alt",
    "inverse_subordinator_pdf",
    "stable_pdf_values",
    "stable_cdf_values",
    "stable_from_uniforms",
    "sample_stable",
    "stable_quantile",
]

_EPS = float(np.finfo(float).eps)
# beyond this saddle exponent M_beta(x) < e^-30 and the tail forms take over
_TAIL_EXPONENT = 30.0


def _check_order(beta, what):
    b = as_order(beta).beta
    if b == 1.0:
        raise DegenerateLawError(
            f"{what}: beta = 1 is the point mass at 1; use the degenerate branch"
        )
    return b


def stable_pdf(beta, t) -> EvalResult:
    """Density ``g_beta(t)`` of the one-sided stable law, ``t > 0``, ``beta < 1``.

    Examples
    --------
    >>> round(stable_pdf(0.5, 1.0).value, 15)
    0.219695644722456
    """
    b = _check_order(beta, "stable_pdf")
    t = float(t)
    if not t > 0:
        raise DomainError("stable_pdf needs t > 0")
    if b == 0.5:
        v = math.exp(-0.25 / t) / (2.0 * math.sqrt(math.pi) * t**1.5)
        return EvalResult(v, 4 * _EPS * v, Method.CLOSED_FORM)
    scale = b * t ** (-b - 1.0)
    m = m_wright(b, t ** (-b))
    return EvalResult(scale * m.value, scale * m.abs_err_bound, m.method_tag)


def stable_cdf(beta, t) -> EvalResult:
    """Distribution function ``G_beta(t)``; ``beta = 1`` gives the unit step at 1."""
    b = as_order(beta).beta
    t = float(t)
    if t < 0:
        raise DomainError("stable_cdf needs t >= 0")
    if b == 1.0:
        return EvalResult(1.0 if t >= 1.0 else 0.0, 0.0, Method.CLOSED_FORM)
    if t == 0.0:
        return EvalResult(0.0, 0.0, Method.CLOSED_FORM)
    if b == 0.5:
        v = float(special.erfc(0.5 / math.sqrt(t)))
        return EvalResult(v, 4 * _EPS * max(v, 1e-300), Method.CLOSED_FORM)
    x = t ** (-b)
    if _saddle_exponent(b, x) > _TAIL_EXPONENT:
        # G is below t * g(t) in the far left tail, and g is a saddle-point value there
        g = b * t ** (-b - 1.0) * m_wright_saddle(b, x)
        return EvalResult(0.0, 2.0 * t * g, Method.ASYMPTOTIC)
    return wright(-b, 1.0, -x)


def stable_sf(beta, t) -> EvalResult:
    """Survival ``1 - G_beta(t)``, summed directly so small values keep their digits."""
    b = as_order(beta).beta
    t = float(t)
    if b == 1.0 or t == 0.0:
        c = stable_cdf(b, t)
        return EvalResult(1.0 - c.value, c.abs_err_bound, c.method_tag)
    if b == 0.5:
        v = float(special.erf(0.5 / math.sqrt(t)))
        return EvalResult(v, 4 * _EPS * v, Method.CLOSED_FORM)
    c = stable_cdf(b, t)
    if c.value < 0.5:
        return EvalResult(1.0 - c.value, c.abs_err_bound + _EPS, c.method_tag)
    # 1 - W_{-b,1}(-x), summed from its n >= 1 terms
    tail = wright_minus_leading(-b, 1.0, -t ** (-b))
    return EvalResult(-tail.value, tail.abs_err_bound, tail.method_tag)


def subordinator_pdf(beta, t, x) -> EvalResult:
    """Density in ``t`` of the stable subordinator at parameter ``x``.

    ``f(t, x) = x^(-1/beta) g_beta(x^(-1/beta) t)``, Laplace transform
    ``exp(-x s^beta)`` in ``t``.
    """
    b = _check_order(beta, "subordinator_pdf")
    t = float(t)
    x = float(x)
    if not (t > 0 and x > 0):
        raise DomainError("subordinator_pdf needs t > 0 and x > 0")
    sc = x ** (-1.0 / b)
    g = stable_pdf(b, sc * t)
    return EvalResult(sc * g.value, sc * g.abs_err_bound, g.method_tag)


def subordinator_pdf_alt(beta, t, x) -> EvalResult:
    """Same density through the M-Wright form ``beta x t^(-beta-1) M_beta(x t^-beta)``."""
    b = _check_order(beta, "subordinator_pdf")
    t = float(t)
    x = float(x)
    if not (t > 0 and x > 0):
        raise DomainError("subordinator_pdf needs t > 0 and x > 0")
    sc = b * x * t ** (-b - 1.0)
    m = m_wright(b, x * t ** (-b))
    return EvalResult(sc * m.value, sc * m.abs_err_bound, m.method_tag)


def inverse_subordinator_pdf(beta, x, t) -> EvalResult:
    """Density in ``x >= 0`` of the inverse stable subordinator at time ``t > 0``.

    ``t^(-beta) M_beta(x t^-beta)``; its Laplace transform in ``t`` is
    ``s^(beta-1) exp(-x s^beta)``.
    """
    b = _check_order(beta, "inverse_subordinator_pdf")
    x = float(x)
    t = float(t)
    if not t > 0 or x < 0:
        raise DomainError("inverse_subordinator_pdf needs x >= 0 and t > 0")
    sc = t ** (-b)
    m = m_wright(b, x * sc)
    return EvalResult(sc * m.value, sc * m.abs_err_bound, m.method_tag)


class StableLaw:
    """Unit-scale extremal stable law; thin object wrapper over the functions above."""

    def __init__(self, beta):
        self.order = as_order(beta)

    @property
    def beta(self):
        return self.order.beta

    def pdf(self, t):
        return stable_pdf_values(self.beta, t)

    def cdf(self, t):
        return stable_cdf_values(self.beta, t)[0]

    def sf(self, t):
        return stable_cdf_values(self.beta, t)[1]

    def laplace(self, s):
        return np.exp(-np.power(s, self.beta))

    def __repr__(self):
        return f"StableLaw(beta={self.beta})"


# ---------------------------------------------------------------------------
# vectorised route: Zolotarev integral on Gauss-Legendre panels


@functools.lru_cache(maxsize=32)
def _panels(beta, order=24, levels=26):
    """Nodes ``u`` and weights on (0, pi), panels refined geometrically towards pi.

    ``a(u)`` blows up like ``(pi - u)^(-1/(1-beta))`` at the right end, so the
    panels shrink by halves there; the left end is smooth.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    edges = [0.0, math.pi / 4, math.pi / 2]
    gap = math.pi / 2
    for _ in range(levels):
        gap /= 2.0
        edges.append(math.pi - gap)
    edges.append(math.pi)
    edges = np.asarray(edges)
    # split the smooth part further: the integrand can be peaked at u = 0 for small t
    left = np.linspace(0.0, math.pi / 2, 9)
    edges = np.unique(np.concatenate([left, edges]))
    a, b = edges[:-1, None], edges[1:, None]
    u = (0.5 * (b - a) * x[None, :] + 0.5 * (b + a)).ravel()
    wu = (0.5 * (b - a) * w[None, :]).ravel() / math.pi
    la = (
        beta * np.log(np.sin(beta * u))
        + (1.0 - beta) * np.log(np.sin((1.0 - beta) * u))
        - np.log(np.sin(u))
    ) / (1.0 - beta)
    return u, wu, np.exp(la)


def _chunks(n, size=4096):
    for i in range(0, n, size):
        yield slice(i, min(n, i + size))


def stable_cdf_values(beta, t):
    """Arrays ``(G_beta(t), 1 - G_beta(t))`` for array ``t >= 0``.

    ``beta = 1`` returns the unit step at ``t = 1``.
    """
    b = as_order(beta).beta
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    if b == 1.0:
        cdf = (flat >= 1.0).astype(float)
        return cdf.reshape(t.shape), (1.0 - cdf).reshape(t.shape)
    if b == 0.5:
        with np.errstate(divide="ignore"):
            z = 0.5 / np.sqrt(flat)
        return special.erfc(z).reshape(t.shape), special.erf(z).reshape(t.shape)
    _, wu, a = _panels(b)
    c = b / (1.0 - b)
    cdf = np.zeros(flat.size)
    sf = np.ones(flat.size)
    pos = np.flatnonzero(flat > 0)
    with np.errstate(divide="ignore", over="ignore"):
        y = flat[pos] ** (-c)
    for sl in _chunks(pos.size):
        ay = np.outer(y[sl], a)
        cdf[pos[sl]] = np.exp(-ay) @ wu
        sf[pos[sl]] = -np.expm1(-ay) @ wu
    return cdf.reshape(t.shape), sf.reshape(t.shape)


def stable_pdf_values(beta, t):
    """Array of ``g_beta(t)`` (``t >= 0``; zero at ``t = 0``), ``beta < 1``."""
    b = _check_order(beta, "stable_pdf_values")
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    out = np.zeros(flat.size)
    pos = np.flatnonzero(flat > 0)
    if b == 0.5:
        tp = flat[pos]
        out[pos] = np.exp(-0.25 / tp) / (2.0 * math.sqrt(math.pi) * tp**1.5)
        return out.reshape(t.shape)
    _, wu, a = _panels(b)
    c = b / (1.0 - b)
    tp = flat[pos]
    with np.errstate(divide="ignore", over="ignore"):
        y = tp ** (-c)
    for sl in _chunks(pos.size):
        ay = np.outer(y[sl], a)
        out[pos[sl]] = (c / tp[sl]) * ((ay * np.exp(-ay)) @ wu)
    return out.reshape(t.shape)


def stable_quantile(beta, p, tol=1e-12):
    """``G_beta^{-1}(p)`` by bisection in log t."""
    b = _check_order(beta, "stable_quantile")
    if not 0.0 < p < 1.0:
        raise DomainError("quantile level must lie in (0, 1)")
    lo, hi = -50.0, 50.0 / b
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stable_cdf_values(b, math.exp(mid))[0] < p:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


# ---------------------------------------------------------------------------
# sampling


def stable_from_uniforms(beta, u_angle, u_exp):
    """Kanter's transformation of two open-interval uniforms into stable draws.

    ``S = (a(U) / E)^((1-beta)/beta)`` with ``U = pi u_angle`` and
    ``E = -log(u_exp)``; the result has Laplace transform ``exp(-s^beta)``.
    """
    b = _check_order(beta, "stable_from_uniforms")
    U = math.pi * np.asarray(u_angle, dtype=float)
    E = -np.log(np.asarray(u_exp, dtype=float))
    log_s = (
        b * np.log(np.sin(b * U)) + (1.0 - b) * np.log(np.sin((1.0 - b) * U)) - np.log(np.sin(U))
    ) / b - (1.0 - b) / b * np.log(E)
    return np.exp(log_s)


def sample_stable(beta, rng_stream, size=None):
    """Draw from the one-sided stable law using two uniforms per draw.

    ``rng_stream`` is anything with a ``random(size)`` method returning
    uniforms in (0, 1), e.g. :class:`fracrenewal.montecarlo.RngStream`.
    ``beta = 1`` returns the constant 1.
    """
    b = as_order(beta).beta
    k = 1 if size is None else int(np.prod(size))
    if b == 1.0:
        out = np.ones(k)
    else:
        u = np.asarray(rng_stream.random((k, 2)), dtype=float)
        out = stable_from_uniforms(b, u[:, 0], u[:, 1])
    return float(out[0]) if size is None else out.reshape(size)
