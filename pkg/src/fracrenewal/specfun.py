"""Mittag-Leffler, Wright and M-Wright functions on the real axis.

Every evaluator chooses between three routes and records which one it used:

* the defining power series summed in double precision, accepted only when the
  rounding error estimated from the sum of absolute terms is below tolerance;
* the algebraic asymptotic expansion on the negative axis (``0 < alpha < 1``),
  truncated just before its smallest term;
* the same power series summed with mpmath, with the working precision raised
  by the number of digits the alternating sum cancels.

The choice is driven by an a-priori scan of the term magnitudes in log space,
so no route is tried blindly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import mpmath
import numpy as np
from scipy import special

from .exceptions import CancellationError, DomainError, PrecisionError

__all__ = [
    "DEFAULT_TOL",
    "EvalResult",
    "Method",
    "Order",
    "as_order",
    "gamma",
    "rgamma",
    "ml",
    "ml_deriv",
    "ml_taylor_terms",
    "ml_survival",
    "ml_density",
    "wright",
    "m_wright",
    "m_wright_saddle",
]

DEFAULT_TOL = 1e-12
N_MAX_DERIV = 50
CANCELLATION_BUDGET = 1e8
MAX_DPS = 600

_EPS = float(np.finfo(float).eps)
_KMAX = 500_000
# M-Wright exponent beyond which the saddle-point form replaces the series
_SADDLE_EXPONENT = 200.0

# Gamma and its reciprocal. Module attributes so every formula resolves them here.
gamma = special.gamma
rgamma = special.rgamma


class Method(str, Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"
    CLOSED_FORM = "closed_form"
    LAPLACE_INVERSION = "laplace_inversion"


@dataclass(frozen=True)
class Order:
    """Fractional order ``0 < beta <= 1``; ``beta == 1`` is the degenerate branch."""

    beta: float

    def __post_init__(self):
        b = float(self.beta)
        if not 0.0 < b <= 1.0:
            raise DomainError(f"order must lie in (0, 1], got {self.beta!r}")
        object.__setattr__(self, "beta", b)

    @property
    def degenerate(self) -> bool:
        return self.beta == 1.0

    def __float__(self):
        return self.beta


def as_order(beta) -> Order:
    return beta if isinstance(beta, Order) else Order(beta)


@dataclass(frozen=True)
class EvalResult:
    """A value with an absolute error bound and the route that produced it."""

    value: float
    abs_err_bound: float
    method_tag: Method

    def __float__(self):
        return float(self.value)

    def as_dict(self):
        return {
            "value": self.value,
            "abs_err_bound": self.abs_err_bound,
            "method_tag": self.method_tag.value,
        }


# ---------------------------------------------------------------------------
# generic machinery for scalar series


def _log_abs_rgamma(x):
    """log|1/Gamma(x)|, -inf at the poles of Gamma."""
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = -special.gammaln(x)
    pole = (x <= 0) & (x == np.floor(x))
    return np.where(pole, -np.inf, out)


def _rgamma_sign(x):
    x = np.asarray(x, dtype=float)
    pole = (x <= 0) & (x == np.floor(x))
    return np.where(pole, 0.0, special.gammasgn(np.where(pole, 0.5, x)))


def _scan(logs_fn, log_tol, kmin=4):
    """Log-magnitudes of terms k = 0..K-1, with K past the peak and below log_tol.

    Stops once the last three terms are below ``log_tol`` and the series is
    visibly decaying (ratio of the last two nonzero terms below one half).
    """
    parts = []
    k0 = 0
    chunk = 64
    while k0 < _KMAX:
        parts.append(np.asarray(logs_fn(np.arange(k0, k0 + chunk)), dtype=float))
        k0 += chunk
        chunk = min(2 * chunk, 8192)
        lg = np.concatenate(parts)
        if lg.size < kmin or not np.all(lg[-3:] < log_tol):
            continue
        fin = lg[np.isfinite(lg)]
        if fin.size < 2 or fin[-1] < fin[-2]:
            return lg
    raise PrecisionError(f"series needs more than {_KMAX} terms")


def _tail_bound(lg):
    """Geometric bound on the omitted tail, from the last two nonzero terms."""
    fin = lg[np.isfinite(lg)]
    if fin.size == 0:
        return 0.0
    if fin.size == 1:
        return float(np.exp(fin[-1]))
    r = math.exp(min(fin[-1] - fin[-2], 0.0))
    # the ratio keeps shrinking past the peak, so the tail is at most t/(1-r)
    return float(np.exp(fin[-1])) / max(1.0 - r, 1e-12)


class _Series:
    """A power series described by its terms in log space, float and mpmath.

    Subclasses implement ``logs(k)`` (log|t_k|), ``floats(k)`` (t_k in double,
    only called when no intermediate overflows) and ``mp(k)`` (t_k at the
    current mpmath precision).
    """

    overflow_log = 600.0

    def logs(self, k):
        raise NotImplementedError

    def floats(self, k):
        raise NotImplementedError

    def mp(self, k):
        raise NotImplementedError

    def float_safe(self, k):
        return True

    def evaluate(self, tol, *, extended=True, what="series"):
        log_tol = math.log(tol) - math.log(1e3)
        lg = _scan(self.logs, log_tol)
        value, bound = self._sum(lg, tol, extended, what, tol)
        for _ in range(3):
            # small results: tighten towards relative accuracy where affordable
            target = tol * min(1.0, max(abs(value), 1e-30))
            if value == 0 or (_tail_bound(lg) <= target * 1e-3 and bound <= target):
                break
            try:
                lg = _scan(self.logs, math.log(target * 1e-3))
                value, bound = self._sum(lg, tol, extended, what, target)
            except (CancellationError, PrecisionError):
                break
        return EvalResult(value, bound, Method.SERIES)

    def _sum(self, lg, tol, extended, what, atol):
        K = lg.size
        k = np.arange(K)
        fin = np.isfinite(lg)
        peak = float(lg[fin].max()) if fin.any() else -np.inf
        trunc = _tail_bound(lg)
        if peak < self.overflow_log and self.float_safe(k):
            terms = self.floats(k)
            absum = float(np.sum(np.abs(terms)))
            value = math.fsum(terms)
            bound = 8.0 * _EPS * absum + trunc
            if bound <= max(atol, tol * abs(value)):
                return value, bound
            if not extended:
                ratio = math.exp(peak) / max(abs(value), 1e-300)
                if ratio > CANCELLATION_BUDGET:
                    raise CancellationError(
                        f"{what}: largest term exceeds the result by {ratio:.3g}; "
                        "use the Laplace-inversion route",
                        estimate=value,
                        bound=bound,
                    )
                raise PrecisionError(
                    f"{what}: tolerance {tol:g} unreachable in double precision",
                    estimate=value,
                    bound=bound,
                )
        elif not extended:
            raise CancellationError(
                f"{what}: terms overflow double precision; use the Laplace-inversion route"
            )
        dps = int(math.ceil((peak - math.log(atol)) / math.log(10.0))) + 12
        dps = max(dps, 20)
        if dps > MAX_DPS:
            raise CancellationError(
                f"{what}: needs {dps} digits of working precision; "
                "use the Laplace-inversion route"
            )
        with mpmath.workdps(dps):
            # every term is summed: a log-magnitude of -inf marks a pole of Gamma
            # in float arithmetic, which the exact binary parameters may miss
            acc = mpmath.mpf(0)
            for kk in range(K):
                acc += self.mp(kk)
            value = float(acc)
        bound = trunc + K * math.exp(peak) * 10.0 ** (-(dps - 2)) + _EPS * abs(value)
        return value, bound


class _MLSeries(_Series):
    # sum_k z^k / Gamma(alpha k + mu)
    def __init__(self, alpha, mu, z):
        self.alpha, self.mu, self.z = alpha, mu, z
        self.lz = math.log(abs(z))

    def logs(self, k):
        return k * self.lz + _log_abs_rgamma(self.alpha * k + self.mu)

    def float_safe(self, k):
        return k[-1] * self.lz < self.overflow_log

    def floats(self, k):
        return np.power(self.z, k.astype(float)) * rgamma(self.alpha * k + self.mu)

    def mp(self, k):
        z = mpmath.mpf(self.z)
        return z**k * mpmath.rgamma(mpmath.mpf(self.alpha) * k + mpmath.mpf(self.mu))


class _MLDerivSeries(_Series):
    # n-th derivative: sum_k (k+1)_n z^k / Gamma(alpha (k+n) + 1)
    def __init__(self, n, alpha, z):
        self.n, self.alpha, self.z = n, alpha, z
        self.lz = math.log(abs(z))

    def logs(self, k):
        lp = special.gammaln(k + self.n + 1.0) - special.gammaln(k + 1.0)
        return lp + k * self.lz + _log_abs_rgamma(self.alpha * (k + self.n) + 1.0)

    def float_safe(self, k):
        return k[-1] * self.lz < self.overflow_log

    def floats(self, k):
        kf = k.astype(float)
        return (
            special.poch(kf + 1.0, self.n)
            * np.power(self.z, kf)
            * rgamma(self.alpha * (kf + self.n) + 1.0)
        )

    def mp(self, k):
        z = mpmath.mpf(self.z)
        a = mpmath.mpf(self.alpha)
        return mpmath.rf(k + 1, self.n) * z**k * mpmath.rgamma(a * (k + self.n) + 1)


class _WrightSeries(_Series):
    # sum_n z^n / (n! Gamma(lam n + mu))
    def __init__(self, lam, mu, z):
        self.lam, self.mu, self.z = lam, mu, z
        self.lz = math.log(abs(z))

    def logs(self, k):
        return k * self.lz - special.gammaln(k + 1.0) + _log_abs_rgamma(self.lam * k + self.mu)

    def float_safe(self, k):
        return k[-1] * self.lz < self.overflow_log

    def floats(self, k):
        kf = k.astype(float)
        arg = self.lam * kf + self.mu
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.power(self.z, kf) * rgamma(kf + 1.0) * rgamma(arg)
        bad = ~np.isfinite(out)
        if bad.any():
            # 1/Gamma overflowed for a very negative argument; such terms are tiny
            sign = np.where(kf[bad] % 2 == 1, np.sign(self.z), 1.0) * _rgamma_sign(arg[bad])
            out[bad] = sign * np.exp(self.logs(k[bad]))
        return out

    def mp(self, k):
        z = mpmath.mpf(self.z)
        return z**k / mpmath.factorial(k) * mpmath.rgamma(
            mpmath.mpf(self.lam) * k + mpmath.mpf(self.mu)
        )


class _WrightTail(_WrightSeries):
    # W_{lam,mu}(z) - 1/Gamma(mu): the series without its leading term
    def logs(self, k):
        return super().logs(k + 1)

    def floats(self, k):
        return super().floats(k + 1)

    def mp(self, k):
        return super().mp(k + 1)

    def float_safe(self, k):
        return super().float_safe(k + 1)


def _asymptotic(logs, signs, tol):
    """Sum an asymptotic series up to (excluding) its smallest term.

    Returns ``(value, bound)`` or ``None`` when the smallest term exceeds tol.
    """
    fin = np.isfinite(logs)
    if not fin.any():
        return 0.0, 0.0
    idx = np.flatnonzero(fin)
    # first local minimum of the nonzero magnitudes
    lf = logs[idx]
    j = int(np.argmin(lf))
    grow = np.flatnonzero(np.diff(lf) > 0)
    if grow.size:
        j = int(grow[0])
    err = math.exp(lf[j])
    keep = idx[:j]
    terms = signs[keep] * np.exp(logs[keep])
    value = math.fsum(terms)
    bound = 2.0 * err + 8.0 * _EPS * float(np.sum(np.abs(terms)))
    if bound > tol * max(1.0, abs(value)):
        return None
    return value, bound


def _ml_asymptotic(alpha, mu, x, tol, kmax=400):
    # E_{alpha,mu}(-x) ~ -sum_{k>=1} (-x)^{-k} / Gamma(mu - alpha k)
    k = np.arange(1, kmax + 1, dtype=float)
    arg = mu - alpha * k
    logs = -k * math.log(x) + _log_abs_rgamma(arg)
    signs = -((-1.0) ** k) * _rgamma_sign(arg)
    return _asymptotic(logs, signs, tol)


def _ml_deriv_asymptotic(n, alpha, x, tol, kmax=400):
    # d^n/dz^n of the expansion above, evaluated at z = -x
    k = np.arange(1, kmax + 1, dtype=float)
    arg = 1.0 - alpha * k
    with np.errstate(divide="ignore"):
        logs = (
            special.gammaln(k + n)
            - special.gammaln(k)
            - (k + n) * math.log(x)
            + _log_abs_rgamma(arg)
        )
    signs = -((-1.0) ** k) * _rgamma_sign(arg)
    return _asymptotic(logs, signs, tol)


# ---------------------------------------------------------------------------
# Mittag-Leffler family


def ml(alpha, mu, z, tol=DEFAULT_TOL, *, extended=True) -> EvalResult:
    """Two-parameter Mittag-Leffler function ``E_{alpha,mu}(z)`` for real ``z``.

    Parameters
    ----------
    alpha : float
        Positive first parameter.
    mu : float
        Second parameter (``mu = 1`` gives the one-parameter function).
    z : float
        Real argument.
    tol : float
        Target for ``abs_err_bound`` relative to ``max(1, |value|)``.
    extended : bool
        Allow the multiprecision series when double precision cancels too much.
        With ``extended=False`` a cancellation larger than the budget raises
        :class:`CancellationError`.
    """
    alpha = float(alpha)
    mu = float(mu)
    z = float(z)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if z == 0.0:
        return EvalResult(float(rgamma(mu)), _EPS, Method.CLOSED_FORM)
    if mu == 1.0 and alpha == 1.0:
        return EvalResult(math.exp(z), _EPS * math.exp(z), Method.CLOSED_FORM)
    if mu == 1.0 and alpha == 2.0:
        v = math.cos(math.sqrt(-z)) if z < 0 else math.cosh(math.sqrt(z))
        return EvalResult(v, 4 * _EPS * max(1.0, abs(v)), Method.CLOSED_FORM)
    if z < 0 and alpha < 1.0 and -z > 1.0:
        asym = _ml_asymptotic(alpha, mu, -z, tol)
        if asym is not None:
            return EvalResult(asym[0], asym[1], Method.ASYMPTOTIC)
    return _MLSeries(alpha, mu, z).evaluate(tol, extended=extended, what="ml")


def ml_deriv(n, alpha, z, tol=DEFAULT_TOL, *, extended=True) -> EvalResult:
    """n-th derivative ``E_alpha^{(n)}(z)`` of the one-parameter function, ``z <= 0``.

    Summed from the term-wise differentiated series. ``abs_err_bound`` is held
    below ``tol * max(1, |value|)``. With ``extended=False`` a term larger than
    ``1e8`` times the result raises :class:`CancellationError`; the counting
    probabilities are then available from the Laplace-inversion route.
    """
    n = int(n)
    alpha = float(alpha)
    z = float(z)
    if n < 0:
        raise DomainError("derivative order must be non-negative")
    if n > N_MAX_DERIV:
        raise DomainError(
            f"derivative order {n} exceeds {N_MAX_DERIV}; use the Laplace-inversion route"
        )
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if z > 0:
        raise DomainError("ml_deriv is defined here for z <= 0 only")
    if alpha == 1.0:
        return EvalResult(math.exp(z), _EPS * math.exp(z), Method.CLOSED_FORM)
    if z == 0.0:
        v = math.factorial(n) * float(rgamma(alpha * n + 1.0))
        return EvalResult(v, 4 * _EPS * v, Method.CLOSED_FORM)
    if -z > 1.0:
        asym = _ml_deriv_asymptotic(n, alpha, -z, tol)
        if asym is not None:
            return EvalResult(asym[0], asym[1], Method.ASYMPTOTIC)
    return _MLDerivSeries(n, alpha, z).evaluate(tol, extended=extended, what="ml_deriv")


# ---------------------------------------------------------------------------
# vectorised Taylor terms x^n/n! E^{(n)}(-x); these are the fractional Poisson
# counting probabilities at x = t^beta


def _binomial_matrix(M, N):
    m = np.arange(M)[:, None]
    n = np.arange(N + 1)[None, :]
    B = special.comb(m, n)
    sign = np.where((m - n) % 2 == 0, 1.0, -1.0)
    return B * sign


def _taylor_double(alpha, x, N, tol):
    xmax = float(x.max())
    lx = math.log(xmax)

    def logs(m):
        nn = np.minimum(N, m // 2)
        lc = special.gammaln(m + 1.0) - special.gammaln(nn + 1.0) - special.gammaln(m - nn + 1.0)
        return lc + m * lx + _log_abs_rgamma(alpha * m + 1.0)

    lg = _scan(logs, math.log(tol) - 12)
    M = lg.size
    m = np.arange(M, dtype=float)
    with np.errstate(under="ignore", over="ignore"):
        A = np.power(x[:, None], m[None, :]) * rgamma(alpha * m + 1.0)[None, :]
    B = _binomial_matrix(M, N)
    vals = A @ B
    absv = A @ np.abs(B)
    errs = 8.0 * _EPS * absv + math.exp(lg[-1]) if np.isfinite(lg[-1]) else 8.0 * _EPS * absv
    return vals, errs


def _taylor_asymptotic(alpha, x, N, tol, kmax=160):
    # S_n(x) ~ -sum_{k>=1} (-1)^k C(k+n-1, n) x^{-k} / Gamma(1 - alpha k)
    k = np.arange(1, kmax + 1, dtype=float)
    arg = 1.0 - alpha * k
    lrg = _log_abs_rgamma(arg)
    sg = -((-1.0) ** k) * _rgamma_sign(arg)
    lx = np.log(x)[:, None]
    vals = np.full((x.size, N + 1), np.nan)
    errs = np.full((x.size, N + 1), np.inf)
    for n in range(N + 1):
        with np.errstate(divide="ignore"):
            lc = special.gammaln(k + n) - special.gammaln(n + 1.0) - special.gammaln(k)
        L = lc[None, :] - k[None, :] * lx + lrg[None, :]
        for i in range(x.size):
            res = _asymptotic(L[i], sg, tol)
            if res is not None:
                vals[i, n], errs[i, n] = res
    return vals, errs


def _taylor_mp(alpha, x, N, tol):
    lx = math.log(x)

    def logs(m):
        nn = np.minimum(N, m // 2)
        lc = special.gammaln(m + 1.0) - special.gammaln(nn + 1.0) - special.gammaln(m - nn + 1.0)
        return lc + m * lx + _log_abs_rgamma(alpha * m + 1.0)

    try:
        lg = _scan(logs, math.log(tol) - 12)
    except PrecisionError:
        return np.full(N + 1, np.nan), np.full(N + 1, np.inf)
    peak = float(lg[np.isfinite(lg)].max())
    dps = max(20, int(math.ceil((peak - math.log(tol)) / math.log(10.0))) + 12)
    if dps > MAX_DPS:
        return np.full(N + 1, np.nan), np.full(N + 1, np.inf)
    M = lg.size
    with mpmath.workdps(dps):
        xm = mpmath.mpf(x)
        am = mpmath.mpf(alpha)
        a = [xm**m * mpmath.rgamma(am * m + 1) for m in range(M)]
        out = np.full(N + 1, np.nan)
        total = mpmath.mpf(0)
        for n in range(N + 1):
            acc = mpmath.mpf(0)
            c = mpmath.mpf(1)  # C(m, n) for m = n
            for m in range(n, M):
                term = c * a[m]
                acc += term if (m - n) % 2 == 0 else -term
                c = c * (m + 1) / (m + 1 - n)
            out[n] = float(acc)
            total += acc
            if 1 - total < tol * 1e-3:
                break  # the remaining terms are closed by _close_tail
    lost = math.log(M) + peak - (dps - 2) * math.log(10.0)
    errs = np.full(N + 1, math.exp(lg[-1]) + math.exp(lost))
    return out, errs + _EPS * np.abs(np.nan_to_num(out))


def _taylor_branch_cut(alpha, x, N, tol, chunk=2048):
    # Laplace inversion collapsed onto the branch cut of s^(a-1) / (1 + s^a)^(n+1):
    #   S_n(t^a) = (1/pi) int_R exp(-t e^u) Im w_n(e^u) du,
    #   c = r^a e^(-i a pi), w_0 = 1/(1+c), w_n = -c/(1+c)^(n+1),
    # by the trapezoid rule in u = log r. The integrand is analytic in the strip
    # |Im u| < min(pi/2, pi (1-a)/a), so the rule converges geometrically; the
    # step is chosen so that even the rule with twice the step is negligible,
    # and their difference is the discretisation bound.
    t = x ** (1.0 / alpha)
    # a fraction of the distance to the pole of w_n on the neighbouring sheet;
    # near it |1 + c|^-(n+1) is large and the strip bound degrades quickly
    d = min(0.45 * math.pi, 0.3 * math.pi * (1.0 - alpha) / alpha)
    h = math.pi * d / 37.0
    u_lo = math.log(1e-17 * alpha * math.pi) / alpha
    u_hi = math.log(45.0 / float(t.min()))
    u = np.arange(u_lo, u_hi + 2 * h, h)
    u = u[: u.size - (u.size % 2 == 0)]  # odd count: the coarse rule uses every other node
    c = np.exp(alpha * u - 1j * alpha * math.pi)
    n = np.arange(1, N + 1)
    W = np.empty((u.size, N + 1))
    with np.errstate(over="ignore", invalid="ignore"):
        W[:, 0] = (1.0 / (1.0 + c)).imag
        W[:, 1:] = (-c[:, None] / (1.0 + c[:, None]) ** (n[None, :] + 1)).imag
    Wa = np.abs(W)
    vals = np.empty((x.size, N + 1))
    errs = np.empty((x.size, N + 1))
    r = np.exp(u)
    for lo in range(0, x.size, chunk):
        E = np.exp(-np.outer(t[lo : lo + chunk], r))
        with np.errstate(over="ignore", invalid="ignore"):
            # columns with overflowed weights come out non-finite and are rejected below
            fine = E @ W * (h / math.pi)
            coarse = E[:, ::2] @ W[::2] * (2 * h / math.pi)
            mass = E @ Wa * (h / math.pi)
        vals[lo : lo + chunk] = fine
        errs[lo : lo + chunk] = np.abs(fine - coarse) + 16 * _EPS * mass
    bad = ~np.isfinite(errs)
    vals[bad], errs[bad] = np.nan, np.inf
    return vals, errs


def _close_tail(vals, errs, tol):
    """Accept rows of Taylor terms whose good prefix already carries all the mass.

    The terms are non-negative and sum to 1 (complete monotonicity of
    ``E_alpha(-x)``, ``alpha <= 1``), so every term past an accurate prefix is
    bounded by ``1 - sum(prefix) + sum(prefix bounds)``. Rows whose entries
    are all good, or whose tail is closed this way below ``tol``, are
    completed in place; returns the mask of accepted rows.
    """
    good = np.isfinite(vals) & (errs <= tol * np.maximum(1.0, np.abs(np.nan_to_num(vals))))
    accepted = np.zeros(vals.shape[0], dtype=bool)
    for i in range(vals.shape[0]):
        bad = np.flatnonzero(~good[i])
        if bad.size == 0:
            accepted[i] = True
            continue
        first_bad = int(bad[0])
        if first_bad == 0:
            continue
        # bound on the mass beyond a prefix of length K, minimised over K;
        # K * eps covers the rounding of the running sum
        K = np.arange(1, first_bad + 1)
        tails = 1.0 - np.cumsum(vals[i, :first_bad]) + np.cumsum(errs[i, :first_bad]) + K * _EPS
        j = int(np.argmin(tails))
        K, tail = j + 1, float(tails[j])
        if tail <= tol:
            vals[i, K:] = 0.0
            errs[i, K:] = max(tail, _EPS)
            accepted[i] = True
    return accepted


def _taylor_terms(alpha, x, n_max, tol=DEFAULT_TOL):
    """Return ``(values, bounds, methods)``; values[i, n] = x_i^n/n! E^{(n)}(-x_i)."""
    alpha = float(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0) or np.any(~np.isfinite(x)):
        raise DomainError("Taylor terms need finite x >= 0")
    N = int(n_max)
    vals = np.full((x.size, N + 1), np.nan)
    errs = np.full((x.size, N + 1), np.inf)
    methods = np.empty(x.size, dtype=object)
    n = np.arange(N + 1)

    zero = x == 0
    vals[zero] = 0.0
    vals[zero, 0] = 1.0
    errs[zero] = 0.0
    methods[zero] = Method.CLOSED_FORM
    pos = ~zero
    if alpha == 1.0:
        xp = x[pos][:, None]
        with np.errstate(divide="ignore", under="ignore"):
            lv = n[None, :] * np.log(xp) - xp - special.gammaln(n + 1.0)[None, :]
        v = np.exp(lv)
        vals[pos] = v
        errs[pos] = 8.0 * _EPS * v * (1.0 + np.abs(lv))
        methods[pos] = Method.CLOSED_FORM
        return vals, errs, methods

    todo = pos.copy()
    # double-precision series where E_alpha(x) itself stays moderate
    x_dbl = math.log(1e6 * alpha) ** alpha
    cand = todo & (x <= x_dbl)
    if cand.any():
        v, e = _taylor_double(alpha, x[cand], N, tol)
        ok = _close_tail(v, e, tol) if alpha < 1.0 else np.all(e <= tol, axis=1)
        idx = np.flatnonzero(cand)[ok]
        vals[idx], errs[idx] = v[ok], e[ok]
        methods[idx] = Method.SERIES
        todo[idx] = False
    if alpha < 1.0 and todo.any():
        # Laplace inversion on the branch cut, vectorised over x
        cand = np.flatnonzero(todo)
        v, e = _taylor_branch_cut(alpha, x[cand], N, tol)
        ok = _close_tail(v, e, tol)
        idx = cand[ok]
        vals[idx], errs[idx] = v[ok], e[ok]
        methods[idx] = Method.LAPLACE_INVERSION
        todo[idx] = False
    if alpha < 1.0:
        cand = todo & (x > 1.0)
        if cand.any():
            v, e = _taylor_asymptotic(alpha, x[cand], N, tol)
            ok = np.all(np.isfinite(e), axis=1) | _close_tail(v, e, tol)
            idx = np.flatnonzero(cand)[ok]
            vals[idx], errs[idx] = v[ok], e[ok]
            methods[idx] = Method.ASYMPTOTIC
            todo[idx] = False
    for i in np.flatnonzero(todo):
        v, e = _taylor_mp(alpha, float(x[i]), N, tol)
        if not _close_tail(v[None, :], e[None, :], tol)[0]:
            bad = ~(np.isfinite(v) & np.isfinite(e))
            v[bad], e[bad] = np.nan, np.inf
        vals[i], errs[i] = v, e
        methods[i] = Method.SERIES
    return vals, errs, methods


def ml_taylor_terms(alpha, x, n_max, tol=DEFAULT_TOL):
    """Array of ``x^n/n! * E_alpha^{(n)}(-x)`` for n = 0..n_max.

    Shape ``x.shape + (n_max + 1,)``. Entries that cannot be computed to
    ``tol`` are NaN. At ``x = t^alpha`` these are the counting probabilities
    of the fractional Poisson process.
    """
    xa = np.asarray(x, dtype=float)
    vals, _, _ = _taylor_terms(alpha, xa.ravel(), n_max, tol)
    return vals.reshape(xa.shape + (int(n_max) + 1,))


def ml_survival(beta, t):
    """``E_beta(-t^beta)`` for an array of ``t >= 0``."""
    ta = np.asarray(t, dtype=float)
    beta = float(beta)
    vals = ml_taylor_terms(beta, np.power(ta, beta), 0)[..., 0]
    return vals


def ml_density(beta, t):
    """``t^(beta-1) E_{beta,beta}(-t^beta) = -d/dt E_beta(-t^beta)`` for ``t >= 0``."""
    ta = np.asarray(t, dtype=float)
    beta = float(beta)
    s1 = ml_taylor_terms(beta, np.power(ta, beta), 1)[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = beta * s1 / ta
    at0 = 1.0 if beta == 1.0 else np.inf
    return np.where(ta == 0, at0, out)


# ---------------------------------------------------------------------------
# Wright family


def wright(lam, mu, z, tol=DEFAULT_TOL) -> EvalResult:
    """Wright function ``W_{lam,mu}(z) = sum z^n / (n! Gamma(lam n + mu))``.

    First kind for ``lam >= 0``; second kind for ``-1 < lam < 0``, where only
    ``z <= 0`` is supported.
    """
    lam = float(lam)
    mu = float(mu)
    z = float(z)
    if not lam > -1.0:
        raise DomainError(f"lambda must exceed -1, got {lam}")
    if lam < 0 and z > 0:
        raise DomainError("second-kind Wright functions are supported for z <= 0 only")
    if z == 0.0:
        return EvalResult(float(rgamma(mu)), _EPS, Method.CLOSED_FORM)
    if lam == 0.0:
        v = math.exp(z) * float(rgamma(mu))
        return EvalResult(v, 4 * _EPS * max(1.0, abs(v)), Method.CLOSED_FORM)
    return _WrightSeries(lam, mu, z).evaluate(tol, what="wright")


def wright_minus_leading(lam, mu, z, tol=DEFAULT_TOL) -> EvalResult:
    """``W_{lam,mu}(z) - 1/Gamma(mu)``, summed without the leading term.

    Used where the full function is close to ``1/Gamma(mu)`` and the
    difference is wanted to full relative accuracy.
    """
    lam, mu, z = float(lam), float(mu), float(z)
    if z == 0.0:
        return EvalResult(0.0, 0.0, Method.CLOSED_FORM)
    return _WrightTail(lam, mu, z).evaluate(tol, what="wright")


def m_wright_saddle(nu, x):
    """Leading saddle-point approximation of ``M_nu(x)`` for large ``x``."""
    t = nu * x
    a = 1.0 / math.sqrt(2.0 * math.pi * (1.0 - nu))
    b = (1.0 - nu) / nu
    return a * t ** ((nu - 0.5) / (1.0 - nu)) * math.exp(-b * t ** (1.0 / (1.0 - nu)))


def _saddle_exponent(nu, x):
    return (1.0 - nu) / nu * (nu * x) ** (1.0 / (1.0 - nu))


def m_wright(nu, x, tol=DEFAULT_TOL) -> EvalResult:
    """M-Wright function ``M_nu(x) = W_{-nu,1-nu}(-x)`` for ``0 < nu < 1``, ``x >= 0``."""
    nu = float(nu)
    x = float(x)
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu}")
    if x < 0:
        raise DomainError("m_wright needs x >= 0")
    if nu == 0.5:
        v = math.exp(-x * x / 4.0) / math.sqrt(math.pi)
        return EvalResult(v, 4 * _EPS * v, Method.CLOSED_FORM)
    if x > 0 and _saddle_exponent(nu, x) > _SADDLE_EXPONENT:
        v = m_wright_saddle(nu, x)
        return EvalResult(v, v, Method.ASYMPTOTIC)
    r = wright(-nu, 1.0 - nu, -x, tol)
    if r.value < 0:
        # M_nu is a density; a negative sum is rounding inside the bound
        return EvalResult(0.0, max(r.abs_err_bound, -r.value), r.method_tag)
    return r
