"""Riemann-Liouville integral and Caputo derivative of sampled functions.

Both operators are discrete convolutions on a uniform grid starting at 0:

* ``rl_fractional_integral`` uses product-trapezoidal weights (the kernel
  ``(t-s)^(alpha-1)/Gamma(alpha)`` integrated exactly against the piecewise
  linear interpolant), second order for smooth integrands;
* ``caputo_derivative`` is the L1 scheme, order ``2 - alpha``.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import DomainError
from .grid import GridFunction, uniform_grid
from .specfun import as_order, gamma

__all__ = [
    "rl_fractional_integral",
    "caputo_derivative",
    "rl_weights",
    "l1_weights",
    "verify_fractional_ode_system",
]


def _check_uniform(f: GridFunction, what):
    if f.spacing_tag != "uniform":
        raise DomainError(f"{what} needs a uniform grid")
    if abs(f.grid[0]) > 1e-14 * max(1.0, abs(f.grid[-1])):
        raise DomainError(f"{what} needs a grid starting at 0")
    return f.step


def rl_weights(alpha, n):
    """Product-trapezoid weights ``(a0, w)`` for ``n`` steps (without ``h^alpha/Gamma(alpha+2)``).

    ``J^alpha f(t_j) ~ a0[j] f_0 + sum_{k=1..j} w[j-k] f_k``.
    """
    j = np.arange(n + 1, dtype=float)
    a1 = alpha + 1.0
    a0 = np.zeros(n + 1)
    a0[1:] = (j[1:] - 1.0) ** a1 - (j[1:] - 1.0 - alpha) * j[1:] ** alpha
    m = np.arange(1, n + 1, dtype=float)
    w = np.empty(n + 1)
    w[0] = 1.0
    w[1:] = (m + 1.0) ** a1 - 2.0 * m**a1 + (m - 1.0) ** a1
    return a0, w


def rl_fractional_integral(f: GridFunction, alpha) -> GridFunction:
    """Riemann-Liouville integral ``J^alpha f`` on the grid of ``f``, ``0 < alpha <= 1``.

    ``alpha = 1`` is the cumulative trapezoid rule.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    h = _check_uniform(f, "rl_fractional_integral")
    v = f.values
    n = v.size - 1
    a0, w = rl_weights(alpha, n)
    out = np.zeros_like(v)
    out[1:] = a0[1:] * v[0] + np.convolve(v[1:], w)[:n]
    out *= h**alpha / gamma(alpha + 2.0)
    return f.with_values(out)


def l1_weights(alpha, n):
    """L1 weights ``b_k = (k+1)^(1-alpha) - k^(1-alpha)``, k = 0..n-1."""
    k = np.arange(n, dtype=float)
    if alpha == 1.0:
        # 0**0 would cancel b_0; the weights are those of the difference quotient
        return (k == 0).astype(float)
    return (k + 1.0) ** (1.0 - alpha) - k ** (1.0 - alpha)


def caputo_derivative(f: GridFunction, alpha) -> GridFunction:
    """Caputo derivative of order ``0 < alpha <= 1`` by the L1 scheme.

    The value at the first grid point is set to NaN (no accuracy claim there).
    ``alpha = 1`` gives the backward difference quotient.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    h = _check_uniform(f, "caputo_derivative")
    v = f.values
    if not np.isfinite(v[0]):
        raise DomainError("caputo_derivative needs a finite f(0)")
    n = v.size - 1
    d = np.diff(v)
    out = np.empty_like(v)
    out[0] = np.nan
    out[1:] = np.convolve(d, l1_weights(alpha, n))[:n] * (h ** (-alpha) / gamma(2.0 - alpha))
    return f.with_values(out)


def verify_fractional_ode_system(beta, n_max=5, step=1e-3, t_end=5.0, t_check=0.1, tol=5e-3):
    """Residuals of ``D^beta p_n = -(p_n - p_{n-1})``, ``D^beta p_0 = -p_0``.

    ``p_n`` are the fractional Poisson counting probabilities sampled on a
    uniform grid. For ``beta = 1`` the derivative is the central difference.
    Returns ``{pass, measured, tolerance, residuals}`` with the max residual per
    n on ``t >= t_check``.
    """
    from .processes import FractionalPoisson

    b = as_order(beta).beta
    t = uniform_grid(t_end, step)
    P = FractionalPoisson(b).counting_prob_matrix(t, n_max)
    window = t >= t_check - 1e-12
    residuals = {}
    for n in range(n_max + 1):
        fn = GridFunction(t, P[:, n])
        if b == 1.0:
            d = np.gradient(P[:, n], step)
        else:
            d = caputo_derivative(fn, b).values
        rhs = -P[:, n] + (P[:, n - 1] if n > 0 else 0.0)
        residuals[n] = float(np.max(np.abs(d - rhs)[window]))
    worst = max(residuals.values())
    return {
        "name": f"fractional_ode[beta={b},step={step}]",
        "pass": bool(worst <= tol),
        "measured": worst,
        "tolerance": tol,
        "residuals": residuals,
    }
