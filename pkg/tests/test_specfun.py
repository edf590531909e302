import math

import numpy as np
import pytest
from scipy import special

from fracrenewal import specfun
from fracrenewal.exceptions import DomainError
from fracrenewal.specfun import Method, ml, ml_deriv, ml_taylor_terms, m_wright, wright

# Reference values summed independently with mpmath at 60 digits
# (plain power series, no shared code) and frozen here.
ML_REFERENCE = [
    (0.75, 1.0, -2.0, 0.20207848341295445435),
    (0.25, 1.0, -0.5, 0.63767051920039335655),
    (0.9, 0.9, -3.0, 0.044151271783037726131),
    (0.5, 1.0, -10.0, 0.056140992743822585858),
    (0.6, 1.3, 1.5, 9.2060494295341976561),
    (0.3, 1.0, -4.0, 0.16650174431551664971),
]


@pytest.mark.parametrize("alpha,mu,z,expected", ML_REFERENCE)
def test_ml_matches_frozen_reference(alpha, mu, z, expected):
    r = ml(alpha, mu, z)
    assert abs(r.value - expected) <= 1e-13 * max(1.0, abs(expected))
    assert r.abs_err_bound <= 1e-10 * max(1.0, abs(expected))


@pytest.mark.parametrize("z", [-3.0, -0.5, 0.0, 0.7, 2.0])
def test_ml_closed_forms(z):
    assert ml(1.0, 1.0, z).value == pytest.approx(math.exp(z), rel=1e-15)
    expected = math.cos(math.sqrt(-z)) if z < 0 else math.cosh(math.sqrt(z))
    assert ml(2.0, 1.0, z).value == pytest.approx(expected, rel=1e-14, abs=1e-15)


@pytest.mark.parametrize("x", [0.1, 1.0, 3.0, 8.0, 25.0])
def test_ml_half_is_scaled_erfc(x):
    # E_{1/2}(-x) = exp(x^2) erfc(x)
    assert ml(0.5, 1.0, -x).value == pytest.approx(special.erfcx(x), rel=1e-12)


def test_ml_at_zero_is_reciprocal_gamma():
    r = ml(0.4, 2.5, 0.0)
    assert r.value == pytest.approx(1.0 / math.gamma(2.5), rel=1e-15)
    assert r.method_tag is Method.CLOSED_FORM


def test_ml_rejects_bad_alpha():
    with pytest.raises(DomainError):
        ml(0.0, 1.0, -1.0)


def test_ml_deriv_frozen_reference():
    # d^3/dz^3 E_{1/2}(z) at z = -2, mpmath 60-digit series
    r = ml_deriv(3, 0.5, -2.0)
    assert r.value == pytest.approx(0.092763826585746017795, rel=1e-12)


def test_ml_deriv_against_finite_difference():
    h = 1e-4
    z = -0.8
    fd = (ml(0.6, 1.0, z + h).value - ml(0.6, 1.0, z - h).value) / (2 * h)
    assert ml_deriv(1, 0.6, z).value == pytest.approx(fd, rel=1e-7)


def test_ml_deriv_domain():
    with pytest.raises(DomainError):
        ml_deriv(51, 0.5, -1.0)
    with pytest.raises(DomainError):
        ml_deriv(2, 0.5, 1.0)
    with pytest.raises(DomainError):
        ml_deriv(-1, 0.5, -1.0)


def test_taylor_terms_poisson():
    x = np.array([0.5, 2.0, 7.0])
    P = ml_taylor_terms(1.0, x, 12)
    n = np.arange(13)
    ref = np.exp(-x[:, None]) * x[:, None] ** n / special.factorial(n)
    assert np.max(np.abs(P - ref)) < 1e-14


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_taylor_terms_sum_to_one(alpha):
    # sum_n x^n/n! E^(n)(-x) = E(0) = 1 (Taylor expansion about -x)
    x = np.geomspace(0.01, 30.0, 9)
    P = ml_taylor_terms(alpha, x, 600)
    assert np.all(np.isfinite(P))
    assert np.max(np.abs(P.sum(axis=1) - 1.0)) < 1e-9
    assert np.min(P) > -1e-12


def test_taylor_routes_agree():
    # the same entries computed through different internal routes
    alpha, x = 0.6, np.array([2.5, 6.0])
    v_cut, e_cut = specfun._taylor_branch_cut(alpha, x, 10, 1e-12)
    v_mp = np.array([specfun._taylor_mp(alpha, float(xi), 10, 1e-14)[0] for xi in x])
    assert np.max(np.abs(v_cut - v_mp)) < 1e-12
    assert np.all(e_cut < 1e-10)


def test_taylor_term_zero_is_survival():
    x = np.array([0.3, 1.7, 12.0])
    P = ml_taylor_terms(0.7, x, 0)[:, 0]
    for xi, p in zip(x, P):
        assert p == pytest.approx(ml(0.7, 1.0, -xi).value, rel=1e-11)


def test_ml_survival_and_density_consistent():
    beta = 0.6
    t = np.array([0.3, 1.0, 4.0])
    h = 1e-5
    d = -(specfun.ml_survival(beta, t + h) - specfun.ml_survival(beta, t - h)) / (2 * h)
    assert np.allclose(specfun.ml_density(beta, t), d, rtol=1e-6)
    assert specfun.ml_density(beta, np.array([0.0]))[0] == np.inf


def test_wright_first_kind_reference():
    # W_{1/2,1}(1), mpmath series
    assert wright(0.5, 1.0, 1.0).value == pytest.approx(2.7773451005009957392, rel=1e-14)


def test_wright_lambda_zero_and_second_kind_domain():
    assert wright(0.0, 2.0, 0.3).value == pytest.approx(math.exp(0.3), rel=1e-15)
    with pytest.raises(DomainError):
        wright(-0.5, 0.5, 1.0)
    with pytest.raises(DomainError):
        wright(-1.0, 0.5, -1.0)


@pytest.mark.parametrize("x", [0.0, 0.5, 2.0, 4.0])
def test_m_wright_one_third_is_airy(x):
    # M_{1/3}(x) = 3^(2/3) Ai(x / 3^(1/3))
    ref = 3 ** (2 / 3) * special.airy(x / 3 ** (1 / 3))[0]
    assert m_wright(1 / 3, x).value == pytest.approx(ref, rel=1e-11, abs=1e-15)


def test_m_wright_half_is_gaussian():
    assert m_wright(0.5, 1.0).value == pytest.approx(0.43939128946772239705, rel=1e-15)


@pytest.mark.parametrize("nu,x_max", [(0.25, 40.0), (0.5, 15.0), (0.75, 5.0)])
def test_m_wright_is_a_density(nu, x_max):
    # x_max is where M_nu has dropped far below 1e-10 (tail ~ exp(-c x^(1/(1-nu))))
    from scipy import integrate

    mass, _ = integrate.quad(lambda x: m_wright(nu, x).value, 0, x_max, limit=200, epsabs=1e-11)
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_m_wright_domain():
    with pytest.raises(DomainError):
        m_wright(1.0, 1.0)
    with pytest.raises(DomainError):
        m_wright(0.5, -1.0)


def test_order_and_eval_result():
    assert specfun.as_order(1.0).degenerate
    with pytest.raises(DomainError):
        specfun.Order(1.5)
    r = ml(0.5, 1.0, -1.0)
    d = r.as_dict()
    assert set(d) == {"value", "abs_err_bound", "method_tag"}
    assert isinstance(d["method_tag"], str)
    assert float(r) == r.value
