"""Renewal machinery over an abstract waiting-time law.

A :class:`WaitingTimeLaw` exposes its density, distribution function and
Laplace transform, and may provide closed forms for the derived quantities
(counting probabilities, Erlang laws, renewal function). Everything here works
from those hooks; where a law has no closed form the quantities come from
brute-force convolution on a uniform grid, which also serves as the
independent oracle for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import special

from .exceptions import DegenerateLawError, DomainError, PrecisionError
from .grid import GridFunction, uniform_grid
from .specfun import EvalResult, Method

__all__ = [
    "WaitingTimeLaw",
    "ExponentialLaw",
    "DeltaLaw",
    "CallableLaw",
    "CountingDistribution",
    "ErlangFamily",
    "cell_masses",
    "conv_power_grid",
    "conv_power_cdf_grid",
    "counting_probs",
    "erlang",
    "renewal_function",
    "renewal_equation_residual",
    "N_MAX_DEFAULT",
    "N_MAX_CAP",
]

N_MAX_DEFAULT = 64
N_MAX_CAP = 4096
TAIL_TARGET = 1e-8
TAIL_WARN = 1e-6


def _exp(z):
    """exp that accepts both numpy values and mpmath numbers (for the Talbot oracle)."""
    if isinstance(z, (mpmath.mpc, mpmath.mpf)):
        return mpmath.exp(z)
    return np.exp(z)


class WaitingTimeLaw:
    """Law of the i.i.d. waiting times of a renewal process.

    Subclasses implement :meth:`cdf` and :meth:`laplace`, and :meth:`pdf` unless
    the law is a point mass. The optional hooks ``counting_prob_matrix``,
    ``erlang_pdf``, ``erlang_cdf`` and ``renewal_function_analytic`` return
    closed forms; the base versions raise :class:`NotImplementedError` and the
    generic routines then fall back to grid convolution.
    """

    tag = "custom"
    has_pdf = True

    @property
    def mean(self):
        return math.inf

    def pdf(self, t):
        raise NotImplementedError

    def cdf(self, t):
        raise NotImplementedError

    def sf(self, t):
        return 1.0 - self.cdf(t)

    def laplace(self, s):
        raise NotImplementedError

    # closed-form hooks -----------------------------------------------------
    def counting_prob_matrix(self, t, n_max):
        raise NotImplementedError

    def erlang_pdf(self, n, t):
        raise NotImplementedError

    def erlang_cdf(self, n, t):
        raise NotImplementedError

    def renewal_function_analytic(self, t):
        raise NotImplementedError

    @property
    def analytic(self) -> bool:
        return type(self).counting_prob_matrix is not WaitingTimeLaw.counting_prob_matrix

    def __repr__(self):
        return f"{type(self).__name__}(tag={self.tag!r})"


class ExponentialLaw(WaitingTimeLaw):
    """Exponential waiting times with rate ``lam``: the Poisson process."""

    tag = "exponential"

    def __init__(self, lam=1.0):
        lam = float(lam)
        if not lam > 0:
            raise DomainError("rate must be positive")
        self.lam = lam

    @property
    def mean(self):
        return 1.0 / self.lam

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, self.lam * np.exp(-self.lam * np.maximum(t, 0)), 0.0)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return -np.expm1(-self.lam * np.maximum(t, 0.0))

    def sf(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-self.lam * np.maximum(t, 0.0))

    def laplace(self, s):
        return self.lam / (self.lam + s)

    uniforms_per_draw = 1

    def waiting_times(self, u):
        """Inverse-CDF draws from uniforms ``u`` of shape (k, 1)."""
        return -np.log(np.asarray(u, dtype=float)[:, 0]) / self.lam

    def counting_prob_matrix(self, t, n_max):
        x = self.lam * np.atleast_1d(np.asarray(t, dtype=float))[:, None]
        n = np.arange(int(n_max) + 1)[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            lp = special.xlogy(n, x) - x - special.gammaln(n + 1.0)
        return np.exp(lp)

    def erlang_pdf(self, n, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lp = (
                math.log(self.lam)
                + special.xlogy(n - 1, self.lam * t)
                - self.lam * t
                - special.gammaln(n)
            )
        return np.where(t >= 0, np.exp(lp), 0.0)

    def erlang_cdf(self, n, t):
        return special.gammainc(n, self.lam * np.maximum(np.asarray(t, dtype=float), 0.0))

    def renewal_function_analytic(self, t):
        return self.lam * np.asarray(t, dtype=float)

    def __repr__(self):
        return f"ExponentialLaw(lam={self.lam})"


class DeltaLaw(WaitingTimeLaw):
    """Deterministic waiting time ``t0``; all renewals happen at ``t0, 2 t0, ...``."""

    tag = "delta"
    has_pdf = False

    def __init__(self, t0=1.0):
        t0 = float(t0)
        if not t0 > 0:
            raise DomainError("t0 must be positive")
        self.t0 = t0

    @property
    def mean(self):
        return self.t0

    def pdf(self, t):
        raise DegenerateLawError("a point mass has no density; use cdf or the counting laws")

    def cdf(self, t):
        return (np.asarray(t, dtype=float) >= self.t0).astype(float)

    def laplace(self, s):
        return _exp(-s * self.t0)

    uniforms_per_draw = 0

    def waiting_times(self, u):
        return np.full(np.asarray(u).shape[0], self.t0)

    def counts(self, t):
        """N(t) = floor(t / t0), exactly (integer division on the float grid)."""
        return np.floor_divide(np.asarray(t, dtype=float), self.t0).astype(np.int64)

    def counting_prob_matrix(self, t, n_max):
        k = self.counts(np.atleast_1d(t))
        n = np.arange(int(n_max) + 1)
        return (k[:, None] == n[None, :]).astype(float)

    def erlang_pdf(self, n, t):
        raise DegenerateLawError(f"q_{n} is the point mass at {n * self.t0}")

    def erlang_cdf(self, n, t):
        return (np.asarray(t, dtype=float) >= n * self.t0).astype(float)

    def renewal_function_analytic(self, t):
        return self.counts(t).astype(float)

    def __repr__(self):
        return f"DeltaLaw(t0={self.t0})"


class CallableLaw(WaitingTimeLaw):
    """A law given by user callables; every derived quantity uses the grid routes."""

    def __init__(self, pdf, cdf, laplace=None, mean=math.inf, tag="custom"):
        self._pdf, self._cdf, self._laplace = pdf, cdf, laplace
        self._mean = mean
        self.tag = tag

    @property
    def mean(self):
        return self._mean

    def pdf(self, t):
        return np.asarray(self._pdf(np.asarray(t, dtype=float)), dtype=float)

    def cdf(self, t):
        return np.asarray(self._cdf(np.asarray(t, dtype=float)), dtype=float)

    def laplace(self, s):
        if self._laplace is None:
            raise NotImplementedError("no Laplace transform supplied")
        return self._laplace(s)


@dataclass(frozen=True)
class CountingDistribution:
    """``p_n(t)`` for n = 0..n_max at one time ``t``."""

    tag: str
    t: float
    probs: np.ndarray
    tail_mass: float
    bounds: np.ndarray = None
    methods: tuple = ()
    warning: bool = False

    def __post_init__(self):
        object.__setattr__(self, "probs", np.asarray(self.probs, dtype=float))
        if self.bounds is not None:
            object.__setattr__(self, "bounds", np.asarray(self.bounds, dtype=float))

    @property
    def n_max(self):
        return self.probs.size - 1

    def cdf_tail(self, n):
        """``Q_n(t) = P(N(t) >= n)`` from the stored probabilities plus the tail mass."""
        return float(self.probs[n:].sum() + self.tail_mass)

    def mean(self):
        return float(np.arange(self.probs.size) @ self.probs)

    def to_rows(self):
        rows = [(n, float(p)) for n, p in enumerate(self.probs)]
        return rows


def _tail(probs):
    return max(0.0, 1.0 - math.fsum(probs))


# ---------------------------------------------------------------------------
# grid convolution oracle


def cell_masses(law, grid):
    """Exact probability of each grid cell, ``Phi(t_{k+1}) - Phi(t_k)``.

    Using masses from the distribution function keeps the first cell right even
    where the density is singular at 0.
    """
    return np.diff(law.cdf(grid))


def _trap_avg(v):
    return 0.5 * (v[1:] + v[:-1])


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    gf = GridFunction(grid, np.zeros_like(grid))  # validates uniform spacing
    if abs(grid[0]) > 1e-14 * max(1.0, grid[-1]):
        raise DomainError("convolution grids must start at 0")
    return grid, gf.step


def conv_power_cdf_grid(law: WaitingTimeLaw, n, grid):
    """``Q_n(t_j) = P(t_n <= t_j)`` on a uniform grid by repeated convolution.

    ``Q_{k+1}(t_j) = sum_i dPhi_i * (Q_k(t_{j-i}) + Q_k(t_{j-i-1})) / 2``.
    """
    grid, _ = _check_grid(grid)
    if n == 0:
        return GridFunction(grid, np.ones_like(grid))
    d_phi = cell_masses(law, grid)
    Q = law.cdf(grid)
    for _ in range(n - 1):
        avg = _trap_avg(Q)
        nxt = np.zeros_like(Q)
        nxt[1:] = np.convolve(d_phi, avg)[: grid.size - 1]
        Q = nxt
    return GridFunction(grid, Q)


def _conv_density_step(law, q_prev, Q_prev, grid, phi, d_phi):
    # q_{k+1}(t_j) = int_0^{t_m} phi(t_j - s) dQ_k(s) + int_0^{t_j - t_m} q_k(t_j - u) dPhi(u)
    # with m = j // 2: each integrand is evaluated away from its own singularity.
    J = grid.size
    out = np.zeros(J)
    dQ = np.diff(Q_prev)
    for j in range(1, J):
        m = j // 2
        # first part: cells [t_i, t_{i+1}] for i < m, phi at t_j - s averaged over the cell
        if m > 0:
            f1 = 0.5 * (phi[j - np.arange(m)] + phi[j - np.arange(1, m + 1)])
            out[j] += dQ[:m] @ f1
        r = j - m
        f2 = 0.5 * (q_prev[j - np.arange(r)] + q_prev[j - np.arange(1, r + 1)])
        out[j] += d_phi[:r] @ f2
    return out


def conv_power_grid(law: WaitingTimeLaw, n, grid) -> GridFunction:
    """Density ``q_n = phi^{*n}`` on a uniform grid starting at 0, by brute force.

    ``n = 0`` returns the discrete delta (mass ``1/h`` in the first cell) and
    ``n = 1`` the sampled density. The value at ``t = 0`` carries no accuracy
    claim where the density is singular there.
    """
    if not law.has_pdf:
        raise DegenerateLawError("point-mass laws have symbolic convolution powers")
    grid, h = _check_grid(grid)
    n = int(n)
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        v = np.zeros_like(grid)
        v[0] = 1.0 / h
        return GridFunction(grid, v)
    with np.errstate(divide="ignore"):
        phi = np.asarray(law.pdf(grid), dtype=float)
    phi_in = phi.copy()
    if not np.isfinite(phi_in[0]):
        phi_in[0] = 0.0  # never used: the split keeps phi's argument >= t_j / 2
    d_phi = cell_masses(law, grid)
    q, Q = phi.copy(), law.cdf(grid)
    for _ in range(n - 1):
        q_in = q.copy()
        if not np.isfinite(q_in[0]):
            q_in[0] = 0.0
        q_new = _conv_density_step(law, q_in, Q, grid, phi_in, d_phi)
        Q_new = np.zeros_like(Q)
        Q_new[1:] = np.convolve(d_phi, _trap_avg(Q))[: grid.size - 1]
        q, Q = q_new, Q_new
    return GridFunction(grid, q)


# ---------------------------------------------------------------------------
# derived quantities


def _grid_counting(law, t, n_max, points=2000):
    grid = np.linspace(0.0, t, points + 1)
    d_phi = cell_masses(law, grid)
    Q = [np.ones_like(grid), law.cdf(grid)]
    for _ in range(n_max):
        nxt = np.zeros_like(grid)
        nxt[1:] = np.convolve(d_phi, _trap_avg(Q[-1]))[: grid.size - 1]
        Q.append(nxt)
    Qt = np.array([q[-1] for q in Q])
    return Qt[:-1] - Qt[1:], Qt[-1]


def counting_probs(law: WaitingTimeLaw, t, n_max=None) -> CountingDistribution:
    """Counting probabilities ``p_n(t) = P(N(t) = n)``, n = 0..n_max.

    Closed forms are used when the law provides them; otherwise ``p_n`` is
    obtained from grid convolution. With ``n_max=None`` the range starts at 64
    and doubles until the tail mass is below 1e-8 (at most 4096).
    ``warning`` is set when the tail mass stays above 1e-6.
    """
    t = float(t)
    if t < 0:
        raise DomainError("t must be non-negative")
    auto = n_max is None
    n = N_MAX_DEFAULT if auto else int(n_max)
    if t == 0.0:
        p = np.zeros(n + 1)
        p[0] = 1.0
        return CountingDistribution(law.tag, t, p, 0.0, np.zeros(n + 1), ("closed_form",))
    while True:
        if law.analytic:
            detailed = getattr(law, "counting_probs_detailed", None)
            if detailed is not None:
                p, b, methods = detailed(t, n)
            else:
                p = law.counting_prob_matrix(np.array([t]), n)[0]
                b, methods = np.full(n + 1, 1e-14), ("closed_form",)
        else:
            p, _ = _grid_counting(law, t, n)
            b, methods = np.full(n + 1, np.nan), ("grid_convolution",)
        tail = _tail(p)
        if not auto or tail < TAIL_TARGET or n >= N_MAX_CAP:
            break
        n *= 2
    return CountingDistribution(
        law.tag, t, p, tail, b, tuple(methods), warning=bool(tail > TAIL_WARN)
    )


@dataclass
class ErlangFamily:
    """Law of the n-th renewal epoch: density ``q_n`` and distribution ``Q_n``."""

    law: WaitingTimeLaw
    n: int
    tag: str = field(init=False)

    def __post_init__(self):
        if int(self.n) < 1:
            raise DomainError("n must be at least 1")
        self.n = int(self.n)
        self.tag = self.law.tag

    def density(self, t):
        try:
            return self.law.erlang_pdf(self.n, t)
        except NotImplementedError:
            return _grid_interp(conv_power_grid, self.law, self.n, t)

    def cdf(self, t):
        try:
            return self.law.erlang_cdf(self.n, t)
        except NotImplementedError:
            return _grid_interp(conv_power_cdf_grid, self.law, self.n, t)

    def telescoping_error(self, t_grid):
        """Max of ``|p_n(t) - int_0^t (q_n - q_{n+1})|`` over a uniform grid from 0."""
        return telescoping_error(self.law, self.n, t_grid)


def _grid_interp(fn, law, n, t, step=1e-3):
    t = np.asarray(t, dtype=float)
    grid = uniform_grid(max(float(np.max(t)), step), step)
    g = fn(law, n, grid)
    return np.interp(t, g.grid, g.values)


def telescoping_error(law, n, t_grid, t_min=0.0):
    """``max_t |p_n(t) - int_0^t (q_n(s) - q_{n+1}(s)) ds|`` on an increasing grid from 0.

    The first cell's mass is taken from the distribution functions (the
    densities may be singular at 0) and the trapezoid rule is used elsewhere.
    ``q_n`` behaves like ``t^(n beta - 1)`` at 0, so on a uniform grid the
    error decays only like ``sqrt(step)``; a graded grid
    (:func:`fracrenewal.grid.graded_grid`) restores second order.
    """
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise DomainError("t_grid must be strictly increasing")
    if abs(grid[0]) > 1e-14 * max(1.0, grid[-1]):
        raise DomainError("t_grid must start at 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        qa = np.asarray(law.erlang_pdf(n, grid), dtype=float)
        qb = np.asarray(law.erlang_pdf(n + 1, grid), dtype=float)
    diff = qa - qb
    cells = 0.5 * (diff[1:] + diff[:-1]) * np.diff(grid)
    cells[0] = law.erlang_cdf(n, grid[1]) - law.erlang_cdf(n + 1, grid[1])
    integral = np.concatenate([[0.0], np.cumsum(cells)])
    p = law.counting_prob_matrix(grid, n)[:, n]
    mask = grid >= t_min
    return float(np.max(np.abs(p - integral)[mask]))


def erlang(law: WaitingTimeLaw, n) -> ErlangFamily:
    return ErlangFamily(law, n)


def _series_renewal(law, t, n_cap, tol):
    # m(t) = sum_{n>=1} Q_n(t); Q_n decreases in n, and once the ratio of
    # successive terms falls below r < 1 (and keeps falling) the tail is at
    # most Q_N r / (1 - r).
    total = 0.0
    chunk = 64
    n0 = 1
    last = None
    while n0 <= n_cap:
        n = np.arange(n0, min(n0 + chunk, n_cap + 1))
        Q = np.asarray(law.erlang_cdf(n, t), dtype=float)
        total += math.fsum(Q)
        last = Q
        n0 = int(n[-1]) + 1
        if Q[-1] == 0.0:
            return total, 0.0, n0 - 1
        if Q.size >= 2:
            r = Q[-1] / Q[-2]
            if r < 1.0:
                bound = Q[-1] * r / (1.0 - r)
                if bound <= tol * max(total, 1.0):
                    return total, bound, n0 - 1
        chunk = min(2 * chunk, 8192)
    bound = float(last[-1]) * n_cap if last is not None else math.inf
    raise PrecisionError(
        f"renewal series not converged within {n_cap} terms", estimate=total, bound=bound
    )


def renewal_function(law: WaitingTimeLaw, t, method="analytic", n_cap=10**4, tol=1e-10):
    """Renewal function ``m(t) = E N(t)``.

    ``method`` is ``"analytic"`` (closed form from the law), ``"series_sum"``
    (``sum_n Q_n(t)`` with a geometric tail bound) or ``"laplace"`` (Talbot
    inversion of ``phi(s) / (s (1 - phi(s)))``).
    """
    t = float(t)
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0.0:
        return EvalResult(0.0, 0.0, Method.CLOSED_FORM)
    if method == "analytic":
        try:
            v = float(law.renewal_function_analytic(t))
        except NotImplementedError:
            raise DomainError(f"{law!r} has no closed-form renewal function") from None
        return EvalResult(v, 4e-16 * abs(v), Method.CLOSED_FORM)
    if method == "series_sum":
        v, bound, _ = _series_renewal(law, t, n_cap, tol)
        return EvalResult(v, bound + 1e-14 * v, Method.SERIES)
    if method == "laplace":
        from .laplace_oracle import talbot_invert

        def F(s):
            phi = law.laplace(s)
            return phi / (s * (1 - phi))

        return talbot_invert(F, t)
    raise DomainError(f"unknown method {method!r}")


def renewal_equation_residual(law: WaitingTimeLaw, m: GridFunction) -> GridFunction:
    """``m(t) - int_0^t (1 + m(t - s)) dPhi(s)`` on the uniform grid of ``m``.

    The integral is taken over ``[0, t]`` only (both ``m`` and ``phi`` vanish on
    the negative axis), cell by cell with exact cell masses of ``Phi``.
    """
    grid, _ = _check_grid(m.grid)
    d_phi = cell_masses(law, grid)
    conv = np.zeros_like(grid)
    conv[1:] = np.convolve(d_phi, _trap_avg(m.values))[: grid.size - 1]
    return m.with_values(m.values - law.cdf(grid) - conv)
