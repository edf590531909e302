"""The fractional Poisson process and the Wright process as waiting-time laws.

Fractional Poisson: survival ``E_beta(-(lam t)^beta)``, transform
``1 / (1 + (s/lam)^beta)``; ``beta = 1`` is the Poisson process with rate ``lam``.

Wright process: waiting times with the one-sided stable density ``g_beta``,
transform ``exp(-s^beta)``; the n-th epoch is distributed as the stable
subordinator at ``x = n``. ``beta = 1`` puts every waiting time at exactly 1.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy import special

from . import stable
from .exceptions import CancellationError, DegenerateLawError, DomainError, PrecisionError
from .laplace_oracle import counting_prob_by_inversion, talbot_invert
from .renewal_core import (
    CountingDistribution,
    WaitingTimeLaw,
    _exp,
    counting_probs,
    renewal_function,
)
from .specfun import (
    EvalResult,
    Method,
    _taylor_terms,
    as_order,
    ml,
    ml_density,
    ml_deriv,
    ml_survival,
    gamma,
)

__all__ = [
    "FractionalPoisson",
    "WrightProcess",
    "make_process",
    "fpp_survival",
    "fpp_counting_probs",
    "fpp_erlang_density",
    "fpp_mean_waiting_time",
    "wright_counting_probs",
    "wright_erlang_density",
    "wright_renewal_function",
]


#: largest count index used when summing the upper tail of the counting law
N_TAIL_CAP = 4096


def _power(s, b):
    return s**b


class FractionalPoisson(WaitingTimeLaw):
    """Renewal process with Mittag-Leffler waiting times.

    Parameters
    ----------
    beta : float or Order
        Order in (0, 1].
    lambda_scale : float
        Time rescaling ``t -> lambda t``; the standard process has 1.
    """

    tag = "ml"

    def __init__(self, beta, lambda_scale=1.0):
        self.order = as_order(beta)
        lam = float(lambda_scale)
        if not lam > 0:
            raise DomainError("lambda_scale must be positive")
        self.lam = lam

    @property
    def beta(self):
        return self.order.beta

    @property
    def mean(self):
        return 1.0 / self.lam if self.order.degenerate else math.inf

    def sf(self, t):
        return ml_survival(self.beta, self.lam * np.maximum(np.asarray(t, dtype=float), 0.0))

    def cdf(self, t):
        return 1.0 - self.sf(t)

    def pdf(self, t):
        return self.lam * ml_density(self.beta, self.lam * np.asarray(t, dtype=float))

    def laplace(self, s):
        return 1.0 / (1.0 + _power(s / self.lam, self.beta))

    def counting_probs_detailed(self, t, n_max):
        """``(p, bounds, methods)`` at a scalar ``t``; entries the series cannot
        deliver come from Laplace inversion."""
        x = (self.lam * float(t)) ** self.beta
        vals, errs, meth = _taylor_terms(self.beta, np.array([x]), n_max)
        p, b = vals[0].copy(), errs[0].copy()
        methods = [meth[0].value] * (n_max + 1)
        for n in np.flatnonzero(~np.isfinite(p)):
            r = counting_prob_by_inversion(self.beta, int(n), float(t), lambda_scale=self.lam)
            p[n], b[n], methods[n] = r.value, r.abs_err_bound, r.method_tag.value
        return p, b, tuple(methods)

    def counting_prob_matrix(self, t, n_max):
        """``p_n(t)`` for array ``t`` (rows) and n = 0..n_max (columns)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = np.power(self.lam * t, self.beta)
        P, _, _ = _taylor_terms(self.beta, x, n_max)
        for i, n in zip(*np.nonzero(~np.isfinite(P))):
            P[i, n] = counting_prob_by_inversion(
                self.beta, int(n), float(t[i]), lambda_scale=self.lam
            ).value
        return P

    def erlang_pdf(self, n, t):
        """``q_n(t) = n beta p_n(lam t) / t``; for n = 1 this is the waiting-time density."""
        n = int(n)
        if n < 1:
            raise DomainError("n must be at least 1")
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        P = self.counting_prob_matrix(flat, n)[:, n]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = n * self.beta * P / flat
        nb = n * self.beta
        at0 = math.inf if nb < 1 else (self.lam if nb == 1 else 0.0)
        q = np.where(flat == 0, at0, q)
        return q.reshape(t.shape)

    def _tail_sums(self, t, nmax):
        # Q_n for n = 0..nmax from p_k: 1 - sum_{k<n} p_k while Q_n is large,
        # sum_{k>=n} p_k (which keeps the relative digits of small Q_n) otherwise.
        # Only rows with a small Q_nmax need p_k far beyond nmax.
        P = self.counting_prob_matrix(t, nmax)
        Q = 1.0 - np.cumsum(P, axis=1) + P
        rows = np.flatnonzero(Q[:, -1] <= 0.5)
        N = nmax + 32
        while rows.size:
            Pr = self.counting_prob_matrix(t[rows], N)
            done = (Pr[:, -1] < 1e-30) | (N >= N_TAIL_CAP)
            if np.any(done):
                tail = np.cumsum(Pr[done, ::-1], axis=1)[:, ::-1][:, : nmax + 1]
                r = rows[done]
                Q[r] = np.where(Q[r] > 0.5, Q[r], tail)
                rows = rows[~done]
            N = min(2 * N, N_TAIL_CAP)
        return np.maximum(Q, 0.0)

    def erlang_cdf(self, n, t):
        """``Q_n(t) = P(N(t) >= n) = sum_{k>=n} p_k(t)``; vectorised over n or t."""
        n_arr = np.asarray(n)
        t_arr = np.asarray(t, dtype=float)
        if n_arr.ndim == 0:
            nn = int(n_arr)
            if nn == 0:
                return np.ones_like(t_arr)
            Q = self._tail_sums(t_arr.ravel(), nn)
            return Q[:, nn].reshape(t_arr.shape)
        Q = self._tail_sums(np.array([float(t_arr)]), int(n_arr.max()))[0]
        return Q[n_arr]

    def renewal_function_analytic(self, t):
        t = np.asarray(t, dtype=float)
        return np.power(self.lam * t, self.beta) / gamma(1.0 + self.beta)

    def waiting_times(self, u):
        """Waiting times from uniforms ``u`` of shape (k, 3).

        ``T = E^(1/beta) S / lam`` with ``E = -log u[:, 0]`` unit exponential and
        ``S`` the Kanter stable draw from ``u[:, 1:]``. Its transform is
        ``E[exp(-s T)] = E[exp(-(s/lam)^beta E)] = 1 / (1 + (s/lam)^beta)``.
        ``beta = 1`` gives ``T = E / lam`` and still consumes three uniforms.
        """
        u = np.asarray(u, dtype=float)
        E = -np.log(u[:, 0])
        if self.order.degenerate:
            return E / self.lam
        S = stable.stable_from_uniforms(self.beta, u[:, 1], u[:, 2])
        return E ** (1.0 / self.beta) * S / self.lam

    uniforms_per_draw = 3

    def __repr__(self):
        return f"FractionalPoisson(beta={self.beta}, lambda_scale={self.lam})"


class WrightProcess(WaitingTimeLaw):
    """Renewal process with one-sided stable waiting times (unit scale)."""

    tag = "stable"
    uniforms_per_draw = 2

    def __init__(self, beta):
        self.order = as_order(beta)

    @property
    def beta(self):
        return self.order.beta

    @property
    def has_pdf(self):
        return not self.order.degenerate

    @property
    def mean(self):
        return 1.0 if self.order.degenerate else math.inf

    def pdf(self, t):
        if self.order.degenerate:
            raise DegenerateLawError("beta = 1: the waiting time is the point mass at 1")
        return stable.stable_pdf_values(self.beta, t)

    def cdf(self, t):
        return stable.stable_cdf_values(self.beta, t)[0]

    def sf(self, t):
        return stable.stable_cdf_values(self.beta, t)[1]

    def laplace(self, s):
        return _exp(-_power(s, self.beta))

    def _epoch_scale(self, n):
        return np.power(np.asarray(n, dtype=float), -1.0 / self.beta)

    def counting_prob_matrix(self, t, n_max):
        """``p_n(t) = G(n^(-1/beta) t) - G((n+1)^(-1/beta) t)`` with ``p_0 = 1 - G(t)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n = np.arange(1, int(n_max) + 2)
        if self.order.degenerate:
            k = np.floor(t).astype(np.int64)
            return (k[:, None] == np.arange(int(n_max) + 1)[None, :]).astype(float)
        arg = t[:, None] * self._epoch_scale(n)[None, :]
        G, S = stable.stable_cdf_values(self.beta, arg)
        P = np.empty((t.size, int(n_max) + 1))
        P[:, 0] = S[:, 0]
        # differences of survival values keep small p_n accurate when G is near 1
        P[:, 1:] = S[:, 1:] - S[:, :-1]
        return P

    def erlang_pdf(self, n, t):
        """``q_n(t) = n^(-1/beta) g(n^(-1/beta) t)``."""
        if self.order.degenerate:
            raise DegenerateLawError(f"beta = 1: q_{n} is the point mass at {n}")
        sc = float(self._epoch_scale(n))
        return sc * stable.stable_pdf_values(self.beta, sc * np.asarray(t, dtype=float))

    def erlang_cdf(self, n, t):
        """``Q_n(t) = G(n^(-1/beta) t)``; vectorised over n or t."""
        n = np.asarray(n)
        if np.any(n == 0):
            raise DomainError("use n >= 1; Q_0 = 1")
        if self.order.degenerate:
            return (np.asarray(t, dtype=float) >= n).astype(float)
        return stable.stable_cdf_values(self.beta, self._epoch_scale(n) * np.asarray(t, dtype=float))[0]

    def renewal_function_analytic(self, t):
        if self.order.degenerate:
            return np.floor(np.asarray(t, dtype=float))
        raise NotImplementedError

    def waiting_times(self, u):
        u = np.asarray(u, dtype=float)
        if self.order.degenerate:
            return np.ones(u.shape[0])
        return stable.stable_from_uniforms(self.beta, u[:, 0], u[:, 1])

    def __repr__(self):
        return f"WrightProcess(beta={self.beta})"


def make_process(name, beta=1.0, lambda_scale=1.0):
    """Factory for the process names used by the CLI: fpp, wright, poisson."""
    if name == "fpp":
        return FractionalPoisson(beta, lambda_scale)
    if name == "poisson":
        return FractionalPoisson(1.0, lambda_scale)
    if name == "wright":
        if lambda_scale != 1.0:
            raise DomainError("the Wright process is unit-scale; lambda applies to fpp/poisson")
        return WrightProcess(beta)
    raise DomainError(f"unknown process {name!r}")


# ---------------------------------------------------------------------------
# scalar entry points with error bounds


def fpp_survival(proc: FractionalPoisson, t) -> EvalResult:
    """``Psi(t) = E_beta(-(lam t)^beta)``."""
    t = float(t)
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0:
        return EvalResult(1.0, 0.0, Method.CLOSED_FORM)
    return ml(proc.beta, 1.0, -((proc.lam * t) ** proc.beta))


def fpp_counting_probs(proc: FractionalPoisson, t, n_max=None) -> CountingDistribution:
    return counting_probs(proc, t, n_max)


def fpp_erlang_density(proc: FractionalPoisson, n, t) -> EvalResult:
    """``q_n(t) = beta t^(n beta - 1) / (n-1)! E_beta^(n)(-t^beta)`` (time rescaled by lam).

    The derivative comes from the term-wise series; when it cancels beyond the
    budget (or n is outside its range) the density is inverted from
    ``1 / (1 + (s/lam)^beta)^n`` instead.
    """
    n = int(n)
    t = float(t)
    if n < 1 or not t > 0:
        raise DomainError("need n >= 1 and t > 0")
    b, lam = proc.beta, proc.lam
    x = (lam * t) ** b
    pref = lam * b * (lam * t) ** (n * b - 1.0) / math.gamma(n)
    try:
        d = ml_deriv(n, b, -x, extended=False)
        return EvalResult(pref * d.value, pref * d.abs_err_bound, d.method_tag)
    except (CancellationError, DomainError, PrecisionError):
        bm = mpmath.mpf(b)
        return talbot_invert(lambda s: 1 / (1 + (s / lam) ** bm) ** n, t)


def fpp_mean_waiting_time(proc: FractionalPoisson):
    return proc.mean


def wright_counting_probs(proc: WrightProcess, t, n_max=None) -> CountingDistribution:
    return counting_probs(proc, t, n_max)


def wright_erlang_density(proc: WrightProcess, n, t) -> EvalResult:
    if proc.order.degenerate:
        raise DegenerateLawError(f"beta = 1: q_{n} is the point mass at {n}")
    return stable.subordinator_pdf(proc.beta, t, n)


def wright_renewal_function(proc: WrightProcess, t, n_cap=10**4) -> EvalResult:
    """``m(t) = sum_{n>=1} G(n^(-1/beta) t)``; exact ``floor(t)`` at beta = 1."""
    if proc.order.degenerate:
        return renewal_function(proc, t, "analytic")
    return renewal_function(proc, t, "series_sum", n_cap=n_cap)
