import math

import numpy as np
import pytest
from scipy import stats

from fracrenewal.exceptions import DegenerateLawError, DomainError
from fracrenewal.processes import (
    FractionalPoisson,
    WrightProcess,
    fpp_counting_probs,
    fpp_erlang_density,
    fpp_mean_waiting_time,
    fpp_survival,
    make_process,
    wright_counting_probs,
    wright_erlang_density,
    wright_renewal_function,
)
from fracrenewal.specfun import ml
from fracrenewal.stable import stable_cdf


def test_spot_values():
    # the three spot rows of the probs table
    assert FractionalPoisson(1.0).counting_prob_matrix([2.0], 2)[0, 2] == pytest.approx(
        0.2706705664732254, abs=1e-15
    )
    assert FractionalPoisson(0.5).counting_prob_matrix([1.0], 0)[0, 0] == pytest.approx(
        0.4275835761558070, abs=1e-15
    )
    assert WrightProcess(1.0).counting_prob_matrix([3.5], 4)[0, 3] == 1.0


def test_poisson_degeneration():
    proc = FractionalPoisson(1.0, lambda_scale=2.0)
    t = np.array([0.3, 1.0, 4.0])
    P = proc.counting_prob_matrix(t, 15)
    ref = stats.poisson.pmf(np.arange(16)[None, :], 2.0 * t[:, None])
    assert np.max(np.abs(P - ref)) < 1e-12
    for n in (1, 3):
        assert np.allclose(proc.erlang_pdf(n, t), stats.gamma.pdf(t, n, scale=0.5), atol=1e-12)
        assert np.allclose(proc.erlang_cdf(n, t), stats.gamma.cdf(t, n, scale=0.5), atol=1e-12)
    assert fpp_mean_waiting_time(proc) == 0.5


def test_lambda_rescales_time():
    a = FractionalPoisson(0.6, lambda_scale=3.0).counting_prob_matrix([0.5], 6)
    b = FractionalPoisson(0.6).counting_prob_matrix([1.5], 6)
    assert np.allclose(a, b, atol=1e-14)


def test_fpp_survival_and_mean():
    proc = FractionalPoisson(0.5)
    assert fpp_survival(proc, 1.0).value == pytest.approx(0.4275835761558070, abs=1e-15)
    assert fpp_survival(proc, 0.0).value == 1.0
    assert math.isinf(proc.mean)


def test_fpp_survival_asymptote():
    # Psi(t) ~ sin(beta pi)/pi * Gamma(beta) / t^beta
    proc = FractionalPoisson(0.5)
    t = 100.0
    asym = math.sin(0.5 * math.pi) / math.pi * math.gamma(0.5) / t**0.5
    assert fpp_survival(proc, t).value == pytest.approx(asym, rel=0.05)


@pytest.mark.parametrize("t", [0.5, 2.0, 9.0])
def test_fpp_generating_function(t):
    # sum_n p_n(t) z^n = E_beta(-(1 - z) t^beta)
    b, z = 0.7, 0.4
    P = FractionalPoisson(b).counting_prob_matrix([t], 300)[0]
    lhs = float(P @ z ** np.arange(P.size))
    assert lhs == pytest.approx(ml(b, 1.0, -(1 - z) * t**b).value, abs=1e-11)


def test_fpp_erlang_density_routes():
    proc = FractionalPoisson(0.5)
    for n, t in ((1, 0.7), (3, 2.0), (5, 10.0)):
        r = fpp_erlang_density(proc, n, t)
        vec = float(proc.erlang_pdf(n, np.array([t]))[0])
        assert r.value == pytest.approx(vec, rel=1e-9)
    with pytest.raises(DomainError):
        fpp_erlang_density(proc, 0, 1.0)


def test_fpp_counting_distribution():
    cd = fpp_counting_probs(FractionalPoisson(0.5), 3.0)
    assert cd.probs.sum() + cd.tail_mass == pytest.approx(1.0, abs=1e-12)
    assert cd.mean() == pytest.approx(3.0**0.5 / math.gamma(1.5), rel=1e-8)


def test_wright_counting_probs():
    proc = WrightProcess(0.5)
    t = 2.0
    P = proc.counting_prob_matrix([t], 200)[0]
    assert P[0] == pytest.approx(1 - stable_cdf(0.5, t).value, abs=1e-14)
    # P(N >= n) = G(n^(-1/beta) t)
    Q3 = P[3:].sum()
    assert Q3 == pytest.approx(stable_cdf(0.5, 3.0**-2 * t).value, abs=1e-12)
    cd = wright_counting_probs(proc, t)
    assert cd.tail_mass < 1e-8
    assert np.all(cd.probs >= 0)


def test_wright_degenerate_process():
    proc = WrightProcess(1.0)
    t = np.array([0.5, 1.0, 2.999, 3.5])
    P = proc.counting_prob_matrix(t, 5)
    assert np.array_equal(P.argmax(axis=1), [0, 1, 2, 3])
    assert np.array_equal(P.sum(axis=1), np.ones(4))
    assert wright_renewal_function(proc, 3.5).value == 3.0
    with pytest.raises(DegenerateLawError):
        proc.pdf(1.0)
    with pytest.raises(DegenerateLawError):
        wright_erlang_density(proc, 2, 1.0)


def test_wright_erlang_density_is_subordinator_snapshot():
    proc = WrightProcess(0.5)
    # q_n(t) = n^-2 g(t / n^2) for beta = 1/2
    t, n = 3.0, 2
    g = math.exp(-0.25 / (t / 4)) / (2 * math.sqrt(math.pi) * (t / 4) ** 1.5)
    assert wright_erlang_density(proc, n, t).value == pytest.approx(g / 4, rel=1e-12)
    assert float(proc.erlang_pdf(n, np.array([t]))[0]) == pytest.approx(g / 4, rel=1e-9)


def test_wright_tauberian_renewal_function():
    m = wright_renewal_function(WrightProcess(0.5), 100.0).value
    # beta = 1/2: G(t) = erfc(1 / (2 sqrt t)), so m(t) = sum_n erfc(n / (2 sqrt t))
    from scipy import special

    n = np.arange(1, 2000)
    assert m == pytest.approx(math.fsum(special.erfc(n / 20.0)), rel=1e-12)
    assert abs(m / (10 / math.gamma(1.5)) - 1) < 0.05


def test_make_process():
    assert isinstance(make_process("fpp", 0.5), FractionalPoisson)
    assert make_process("poisson", lambda_scale=2.0).beta == 1.0
    assert isinstance(make_process("wright", 0.5), WrightProcess)
    with pytest.raises(DomainError):
        make_process("wright", 0.5, lambda_scale=2.0)
    with pytest.raises(DomainError):
        make_process("bogus")
    with pytest.raises(DomainError):
        FractionalPoisson(1.2)
