"""Exact samplers and path simulation for renewal processes.

Every path owns a private counter-based stream keyed by ``(seed, path_index)``,
so a simulation gives bit-identical results whatever the order or the number
of workers that run its paths. Accumulators are integer counts, merged by
addition.

Waiting-time draws use a fixed number of uniforms per draw (three for the
Mittag-Leffler law: one exponential and two for Kanter's stable
representation) and are produced in fixed-size blocks, so the stream position
of any draw follows from simple arithmetic.

Mittag-Leffler waiting times
----------------------------
If ``E`` is unit exponential and ``S`` is one-sided stable with
``E[exp(-s S)] = exp(-s^beta)``, independent, then ``T = E^(1/beta) S / lam``
has

    E[exp(-s T)] = E[exp(-(s/lam)^beta E)] = 1 / (1 + (s/lam)^beta),

which is the transform of the waiting-time density of the fractional Poisson
process; its survival function is ``E_beta(-(lam t)^beta)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import stable
from .exceptions import DomainError, SamplingError
from .processes import FractionalPoisson
from .renewal_core import CountingDistribution, WaitingTimeLaw
from .specfun import as_order

#: hard cap on the number of events of a single path
MAX_EVENTS = 10**9
#: waiting times drawn per block while a path is extended
BLOCK = 16
#: 1% critical value coefficient of the one-sample Kolmogorov-Smirnov test
KS_CRITICAL_1PCT = 1.63

_HALF_ULP = 2.0**-54
_MASK64 = (1 << 64) - 1


class RngStream:
    """Counter-based uniform stream keyed by ``(seed, stream_id)``.

    Wraps numpy's Philox generator with the 128-bit key ``[seed, stream_id]``;
    draws are therefore a pure function of the key and the draw index.
    ``random`` returns uniforms in the open interval (0, 1).
    """

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def random(self, size=None):
        # multiples of 2^-53 shifted by half a step: never 0, never 1
        return self._gen.random(size) + _HALF_ULP

    def spawn(self, stream_id):
        """A sibling stream with the same seed."""
        return RngStream(self.seed, stream_id)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def _draw(law, rng, k):
    m = getattr(law, "uniforms_per_draw", None)
    if m is None:
        raise DomainError(f"{law!r} has no sampler")
    u = rng.random((k, m)) if m else np.empty((k, 0))
    T = np.asarray(law.waiting_times(u), dtype=float)
    if not (np.all(np.isfinite(T)) and np.all(T > 0)):
        bad = np.flatnonzero(~(np.isfinite(T) & (T > 0)))
        raise SamplingError(
            f"{law!r} produced invalid waiting times {T[bad].tolist()} on {rng!r} "
            f"(uniforms {u[bad].tolist()})"
        )
    return T


def sample_waiting_times(law: WaitingTimeLaw, rng: RngStream, size):
    """``size`` i.i.d. waiting times of ``law`` from ``rng``."""
    return _draw(law, rng, int(size))


def sample_ml_waiting_time(beta, lambda_scale=1.0, rng: RngStream = None, size=None):
    """Mittag-Leffler waiting time ``T = E^(1/beta) S / lambda``.

    Survival ``P(T > t) = E_beta(-(lambda t)^beta)``; ``beta = 1`` is the
    exponential law with rate ``lambda``. Exactly three uniforms per draw.
    """
    if rng is None:
        raise DomainError("an RngStream is required")
    law = FractionalPoisson(beta, lambda_scale)
    out = _draw(law, rng, 1 if size is None else int(np.prod(size)))
    return float(out[0]) if size is None else out.reshape(size)


@dataclass(frozen=True)
class RenewalPath:
    """Renewal epochs ``t_1 < t_2 < ...`` up to ``horizon`` for one path."""

    tag: str
    epochs: np.ndarray
    horizon: float

    def __post_init__(self):
        e = np.asarray(self.epochs, dtype=float)
        if e.size and (np.any(np.diff(e) <= 0) or e[-1] > self.horizon or e[0] <= 0):
            raise SamplingError("epochs must be positive, strictly increasing and within the horizon")
        object.__setattr__(self, "epochs", e)

    def count(self, t):
        """``N(t)``: number of epochs in (0, t]; right-continuous."""
        return np.searchsorted(self.epochs, np.asarray(t, dtype=float), side="right")


def simulate_counting(law: WaitingTimeLaw, horizon, rng: RngStream, time_scale=1.0) -> RenewalPath:
    """One path of the renewal process of ``law`` on (0, horizon].

    Epochs are cumulative sums of i.i.d. draws (multiplied by ``time_scale``),
    truncated at ``horizon``. Draws come in blocks of :data:`BLOCK`.
    """
    horizon = float(horizon)
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    blocks = []
    last = 0.0
    n = 0
    while True:
        e = last + np.cumsum(_draw(law, rng, BLOCK) * time_scale)
        k = int(np.searchsorted(e, horizon, side="right"))
        blocks.append(e[:k])
        n += k
        if k < BLOCK:
            break
        if n > MAX_EVENTS:
            raise SamplingError(f"path on {rng!r} exceeded {MAX_EVENTS} events before t={horizon}")
        last = e[-1]
    epochs = np.concatenate(blocks) if len(blocks) > 1 else blocks[0]
    if epochs.size > 1 and np.any(np.diff(epochs) <= 0):
        # a waiting time below the spacing of doubles at this epoch
        raise SamplingError(f"epochs stopped increasing on {rng!r}; time scale too fine")
    return RenewalPath(getattr(law, "tag", "custom"), epochs, horizon)


def _path_range(paths, first_path):
    paths = int(paths)
    if paths < 1:
        raise DomainError("paths must be positive")
    return range(int(first_path), int(first_path) + paths)


def count_matrix(law, times, paths, seed, first_path=0, time_scale=1.0):
    """``N(t)`` for every path (rows) and every ``t`` in ``times`` (columns).

    Path ``i`` uses ``RngStream(seed, i)``; ``first_path`` lets workers run
    disjoint slices of one simulation.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise DomainError("times must be non-negative")
    horizon = float(times.max()) if times.size and times.max() > 0 else 0.0
    ids = _path_range(paths, first_path)
    out = np.zeros((len(ids), times.size), dtype=np.int64)
    if horizon == 0:
        return out
    for r, i in enumerate(ids):
        path = simulate_counting(law, horizon, RngStream(seed, i), time_scale)
        out[r] = path.count(times)
    return out


@dataclass
class EmpiricalCounting:
    """Empirical ``p_n(t)`` with per-bin binomial standard errors."""

    tag: str
    t: float
    paths: int
    counts: np.ndarray
    probs: np.ndarray = field(init=False)
    std_err: np.ndarray = field(init=False)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.probs = self.counts / self.paths
        self.std_err = np.sqrt(self.probs * (1.0 - self.probs) / self.paths)

    def distribution(self) -> CountingDistribution:
        return CountingDistribution(f"empirical:{self.tag}", self.t, self.probs, 0.0, self.std_err)

    def max_sigma(self, analytic, floor=None):
        """``max |empirical - analytic| / sigma`` over the bins.

        ``sigma`` is the binomial standard error under the analytic
        probability, floored at ``1 / paths`` so empty bins of tiny
        probability do not divide by zero.
        """
        a = np.zeros(self.probs.size)
        src = np.asarray(analytic, dtype=float)
        m = min(a.size, src.size)
        a[:m] = src[:m]
        floor = 1.0 / self.paths if floor is None else floor
        sig = np.maximum(np.sqrt(a * (1.0 - a) / self.paths), floor)
        return float(np.max(np.abs(self.probs - a) / sig))

    def to_rows(self, analytic=None):
        """Rows ``(n, count, empirical_p, analytic_p, std_err)``."""
        rows = []
        for n in range(self.probs.size):
            ap = float("nan") if analytic is None or n >= len(analytic) else float(analytic[n])
            rows.append((n, int(self.counts[n]), float(self.probs[n]), ap, float(self.std_err[n])))
        return rows


def empirical_counting_pmf(law, t, paths, seed, first_path=0) -> EmpiricalCounting:
    """Histogram of ``N(t)`` over ``paths`` simulated paths (``paths >= 1000``)."""
    if int(paths) < 1000:
        raise DomainError("at least 1000 paths are required")
    t = float(t)
    N = count_matrix(law, [t], paths, seed, first_path)[:, 0]
    return EmpiricalCounting(getattr(law, "tag", "custom"), t, int(paths), np.bincount(N))


def empirical_renewal_function(law, times, paths, seed, first_path=0):
    """Sample mean of ``N(t)`` with its standard error, for each ``t``."""
    N = count_matrix(law, times, paths, seed, first_path)
    mean = N.mean(axis=0)
    se = N.std(axis=0, ddof=1) / np.sqrt(N.shape[0]) if N.shape[0] > 1 else np.full(mean.shape, np.inf)
    return mean, se


@dataclass
class EmpiricalErlang:
    """Epochs ``t_n`` of ``paths`` paths and their KS distance to ``Q_n``."""

    n: int
    epochs: np.ndarray
    ks_statistic: float
    critical: float

    @property
    def passed(self):
        return bool(self.ks_statistic < self.critical)

    def histogram(self, bins=50):
        return np.histogram(self.epochs, bins=bins)


def nth_epochs(law, n, paths, seed, first_path=0):
    """``t_n = T_1 + ... + T_n`` for each path, from the path's own stream."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be at least 1")
    ids = _path_range(paths, first_path)
    out = np.empty(len(ids))
    for r, i in enumerate(ids):
        out[r] = _draw(law, RngStream(seed, i), n).sum()
    return out


def ks_statistic(sample, cdf_values):
    """Two-sided one-sample KS distance given the model CDF at the sorted sample."""
    x = np.asarray(cdf_values, dtype=float)
    k = x.size
    i = np.arange(1, k + 1)
    return float(max(np.max(i / k - x), np.max(x - (i - 1) / k)))


def empirical_erlang(law, n, paths, seed, first_path=0) -> EmpiricalErlang:
    """KS test of simulated n-th epochs against the analytic ``Q_n = law.erlang_cdf``."""
    e = np.sort(nth_epochs(law, n, paths, seed, first_path))
    F = np.asarray(law.erlang_cdf(int(n), e), dtype=float)
    return EmpiricalErlang(int(n), e, ks_statistic(e, F), KS_CRITICAL_1PCT / np.sqrt(e.size))


def survival_check(beta, lambda_scale, t_points, draws, seed, stream_id=0):
    """Empirical survival of Mittag-Leffler draws against ``E_beta(-(lam t)^beta)``.

    Returns ``(empirical, analytic, sigma)`` arrays over ``t_points``; sigma is
    the binomial standard error under the analytic value.
    """
    T = sample_ml_waiting_time(beta, lambda_scale, RngStream(seed, stream_id), size=int(draws))
    t = np.asarray(t_points, dtype=float)
    emp = (T[None, :] > t[:, None]).mean(axis=1)
    ana = FractionalPoisson(beta, lambda_scale).sf(t)
    sig = np.sqrt(ana * (1 - ana) / T.size)
    return emp, ana, sig


def tail_slope(sample, t_lo=10.0, t_hi=1e3, points=12):
    """Least-squares slope of log empirical survival against log t on [t_lo, t_hi]."""
    x = np.sort(np.asarray(sample, dtype=float))
    t = np.geomspace(t_lo, t_hi, points)
    surv = 1.0 - np.searchsorted(x, t, side="right") / x.size
    ok = surv > 0
    if ok.sum() < 3:
        raise DomainError("too few sample points in the tail window")
    return float(stats.linregress(np.log(t[ok]), np.log(surv[ok])).slope)


def stable_ks(beta, draws, seed, stream_id=0):
    """KS distance of Kanter stable draws to ``G_beta``, with the 1% critical value."""
    b = as_order(beta).beta
    x = np.sort(stable.sample_stable(b, RngStream(seed, stream_id), size=int(draws)))
    F = stable.stable_cdf_values(b, x)[0]
    return ks_statistic(x, F), KS_CRITICAL_1PCT / np.sqrt(x.size)
