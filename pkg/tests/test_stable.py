import math

import numpy as np
import pytest
from scipy import integrate, special

from fracrenewal import stable
from fracrenewal.exceptions import DegenerateLawError, DomainError
from fracrenewal.montecarlo import RngStream


def _levy_pdf(t):
    return np.exp(-0.25 / t) / (2 * math.sqrt(math.pi) * t**1.5)


def _g_third(t):
    # g_{1/3}(t) = (1/3) t^(-4/3) M_{1/3}(t^(-1/3)), M_{1/3}(x) = 3^(2/3) Ai(x 3^(-1/3))
    x = t ** (-1 / 3)
    return t ** (-4 / 3) / 3 * 3 ** (2 / 3) * special.airy(x / 3 ** (1 / 3))[0]


@pytest.mark.parametrize("t", [0.05, 0.3, 1.0, 4.0, 60.0])
def test_pdf_closed_forms(t):
    assert stable.stable_pdf(0.5, t).value == pytest.approx(_levy_pdf(t), rel=1e-14)
    assert stable.stable_pdf(1 / 3, t).value == pytest.approx(_g_third(t), rel=1e-10)


def test_vectorised_pdf_matches_scalar():
    t = np.geomspace(0.02, 200.0, 25)
    for b in (0.25, 1 / 3, 0.5, 0.8):
        vec = stable.stable_pdf_values(b, t)
        ref = np.array([stable.stable_pdf(b, x).value for x in t])
        assert np.allclose(vec, ref, rtol=1e-9, atol=1e-15)


def test_cdf_and_sf():
    t = np.geomspace(0.05, 100.0, 15)
    G, S = stable.stable_cdf_values(0.5, t)
    assert np.allclose(G, special.erfc(0.5 / np.sqrt(t)), atol=1e-14)
    assert np.allclose(G + S, 1.0, atol=1e-14)
    for b in (0.3, 0.7):
        G, S = stable.stable_cdf_values(b, t)
        ref = np.array([stable.stable_cdf(b, x).value for x in t])
        assert np.allclose(G, ref, atol=1e-11)
        sf = np.array([stable.stable_sf(b, x).value for x in t])
        assert np.allclose(S, sf, rtol=1e-9, atol=1e-15)


def test_cdf_is_integral_of_pdf():
    f = lambda x: float(stable.stable_pdf_values(0.7, np.array([x]))[0])
    v, _ = integrate.quad(f, 0, 2.0, limit=200, epsabs=1e-12)
    assert v == pytest.approx(stable.stable_cdf(0.7, 2.0).value, abs=1e-9)


def test_degenerate_and_domain():
    with pytest.raises(DegenerateLawError):
        stable.stable_pdf(1.0, 1.0)
    with pytest.raises(DomainError):
        stable.stable_pdf(0.5, 0.0)
    assert stable.stable_cdf(1.0, 0.999).value == 0.0
    assert stable.stable_cdf(1.0, 1.0).value == 1.0


def test_subordinator_self_similarity():
    # f(t, x) = x^(-1/beta) g(x^(-1/beta) t)
    b, x, t = 0.6, 2.5, 1.7
    lhs = stable.subordinator_pdf(b, t, x).value
    rhs = x ** (-1 / b) * stable.stable_pdf(b, x ** (-1 / b) * t).value
    assert lhs == pytest.approx(rhs, rel=1e-10)
    assert stable.subordinator_pdf_alt(b, t, x).value == pytest.approx(lhs, rel=1e-10)


def test_inverse_subordinator_density():
    b, t = 0.4, 3.0
    mass, _ = integrate.quad(lambda x: stable.inverse_subordinator_pdf(b, x, t).value, 0, 30, limit=200)
    assert mass == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DegenerateLawError):
        stable.inverse_subordinator_pdf(1.0, 1.0, 1.0)


def test_quantile_roundtrip():
    for p in (0.1, 0.5, 0.9):
        q = stable.stable_quantile(0.6, p)
        assert stable.stable_cdf(0.6, q).value == pytest.approx(p, abs=1e-10)


def test_laplace_of_pdf():
    law = stable.StableLaw(0.5)
    v, _ = integrate.quad(lambda x: math.exp(-2 * x) * stable.stable_pdf(0.5, x).value, 0, np.inf)
    assert v == pytest.approx(float(law.laplace(2.0)), rel=1e-9)


def test_sampler_deterministic_and_positive():
    a = stable.sample_stable(0.5, RngStream(3, 1), size=1000)
    b = stable.sample_stable(0.5, RngStream(3, 1), size=1000)
    assert np.array_equal(a, b)
    assert np.all(a > 0)
    assert stable.sample_stable(1.0, RngStream(3, 1)) == 1.0


def test_kanter_median():
    # the sample median converges to the true median
    x = stable.sample_stable(0.5, RngStream(11, 0), size=40000)
    med = stable.stable_quantile(0.5, 0.5)
    # sd of the sample median ~ 1 / (2 g(med) sqrt(n))
    sd = 1 / (2 * stable.stable_pdf(0.5, med).value * math.sqrt(x.size))
    assert abs(np.median(x) - med) < 4 * sd
