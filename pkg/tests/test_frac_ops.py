import math

import numpy as np
import pytest

from fracrenewal.exceptions import DomainError
from fracrenewal.frac_ops import caputo_derivative, rl_fractional_integral, verify_fractional_ode_system
from fracrenewal.grid import GridFunction, graded_grid, log_grid, uniform_grid
from fracrenewal.specfun import ml_survival


def _const(t_max=2.0, step=1e-3, c=1.0):
    t = uniform_grid(t_max, step)
    return GridFunction(t, np.full(t.size, c))


def test_rl_integral_order_one_is_cumulative_integral():
    f = _const()
    J = rl_fractional_integral(f, 1.0)
    assert np.allclose(J.values, f.grid, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.8])
def test_rl_integral_of_power(alpha):
    # J^alpha t = t^(1+alpha) / Gamma(2+alpha), exact for the product-trapezoid rule
    t = uniform_grid(2.0, 1e-2)
    J = rl_fractional_integral(GridFunction(t, t), alpha)
    assert np.allclose(J.values, t ** (1 + alpha) / math.gamma(2 + alpha), atol=1e-12)


def test_rl_integral_of_one_at_one():
    J = rl_fractional_integral(_const(1.0), 0.5)
    assert J.values[-1] == pytest.approx(1 / math.gamma(1.5), rel=1e-12)


def test_rl_semigroup():
    t = uniform_grid(1.0, 1e-3)
    f = GridFunction(t, t)
    a = rl_fractional_integral(rl_fractional_integral(f, 0.3), 0.4).values
    b = rl_fractional_integral(f, 0.7).values
    assert np.max(np.abs(a - b)) < 1e-4


def test_caputo_of_constant_is_zero():
    D = caputo_derivative(_const(c=3.0), 0.6)
    assert np.isnan(D.values[0])
    assert np.max(np.abs(D.values[1:])) < 1e-12


def test_caputo_of_mittag_leffler_relaxation():
    # D^a E_a(-t^a) = -E_a(-t^a)
    a = 0.6
    t = uniform_grid(3.0, 1e-3)
    u = ml_survival(a, t)
    D = caputo_derivative(GridFunction(t, u), a).values
    window = t >= 0.1
    assert np.max(np.abs(D + u)[window]) < 1e-3


def test_caputo_order_one_is_backward_difference():
    t = uniform_grid(1.0, 1e-3)
    D = caputo_derivative(GridFunction(t, t**2), 1.0).values
    assert np.allclose(D[1:], (t[1:] ** 2 - t[:-1] ** 2) / 1e-3)


def test_operators_reject_bad_input():
    t = log_grid(0.1, 1.0, 10)
    with pytest.raises(DomainError):
        rl_fractional_integral(GridFunction(t, t, "logarithmic"), 0.5)
    with pytest.raises(DomainError):
        caputo_derivative(_const(), 1.5)
    shifted = GridFunction(uniform_grid(2.0, 0.1, t_min=1.0), np.ones(11))
    with pytest.raises(DomainError):
        caputo_derivative(shifted, 0.5)


def test_grid_function_validation():
    with pytest.raises(DomainError):
        GridFunction(np.array([0.0, 1.0, 0.5]), np.zeros(3))
    with pytest.raises(DomainError):
        GridFunction(np.array([0.0, 1.0, 3.0]), np.zeros(3))
    with pytest.raises(DomainError):
        GridFunction(np.array([0.0, 1.0]), np.zeros(3))
    g = graded_grid(20.0, 100)
    assert g[0] == 0.0 and g[-1] == pytest.approx(20.0) and np.all(np.diff(g) > 0)


def test_fractional_ode_system_poisson_limit():
    rep = verify_fractional_ode_system(1.0, n_max=5, step=1e-3, tol=1e-4)
    assert rep["pass"], rep


def test_fractional_ode_system_beta_half():
    rep = verify_fractional_ode_system(0.5, n_max=5, step=1e-3)
    assert rep["pass"], rep
    assert rep["measured"] <= 5e-3
