import math

import numpy as np
import pytest

from fracrenewal import limits
from fracrenewal.exceptions import DomainError
from fracrenewal.stable import inverse_subordinator_pdf, stable_pdf


def test_scaling_pair():
    p = limits.ScalingPair.canonical(0.5, 0.01)
    assert p.h == pytest.approx(0.1)
    assert p.obeys_scaling(0.5)
    assert not limits.ScalingPair(0.01, 0.2).obeys_scaling(0.5)
    with pytest.raises(DomainError):
        limits.ScalingPair(0.0, 1.0)


@pytest.mark.parametrize("process", limits.PROCESSES)
def test_rescaled_transform_kappa_zero(process):
    pair = limits.ScalingPair.canonical(0.5, 0.1)
    assert limits.rescaled_transform(process, 0.5, pair, 0.0, 2.0) == pytest.approx(0.5, rel=1e-14)


@pytest.mark.parametrize("process", limits.PROCESSES)
def test_rescaled_transform_approaches_limit(process):
    b, kappa, s = 0.5, 1.0, 2.0
    ref = limits.limit_transform_counting(b, kappa, s)
    err = [abs(limits.rescaled_transform(process, b, limits.ScalingPair.canonical(b, tau), kappa, s) - ref)
           for tau in (1e-2, 1e-4, 1e-6)]
    assert err[0] > err[1] > err[2]
    assert err[2] < 1e-3


@pytest.mark.parametrize("erlang", [False, True])
def test_richardson_limits_coincide(erlang):
    b, kappa, s = 0.6, 0.8, 1.5
    ref = (limits.limit_transform_erlang if erlang else limits.limit_transform_counting)(b, kappa, s)
    for process in limits.PROCESSES:
        r = limits.richardson_limit(process, b, kappa, s, erlang=erlang)
        assert r.value == pytest.approx(ref, abs=1e-9)


def test_neville_is_exact_for_polynomials():
    x = np.array([1.0, 0.5, 0.25, 0.125])
    y = 3 - 2 * x + 5 * x**2 - x**3
    v, err = limits.neville(x, y)
    assert v == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(DomainError):
        limits.neville([1.0], [1.0])


def test_transform_domain_errors():
    pair = limits.ScalingPair.canonical(0.5, 0.1)
    with pytest.raises(DomainError):
        limits.rescaled_transform("fpp", 0.5, pair, 1.0, -1.0)
    with pytest.raises(DomainError):
        limits.rescaled_transform("fpp", 0.5, pair, -1.0, 1.0)
    with pytest.raises(DomainError):
        limits.rescaled_transform("levy", 0.5, pair, 1.0, 1.0)


def test_erlang_limit_laplace():
    for x, s in ((1.0, 1.0), (2.0, 0.5)):
        assert limits.erlang_limit_laplace(0.5, x, s) == pytest.approx(math.exp(-x * s**0.5), abs=1e-10)


def test_limit_densities():
    assert limits.limit_density_counting(0.5, 1.0, 2.0).value == pytest.approx(
        inverse_subordinator_pdf(0.5, 1.0, 2.0).value
    )
    # at x = 1 the subordinator density is g_beta itself
    assert limits.limit_density_erlang(0.5, 2.0, 1.0).value == pytest.approx(stable_pdf(0.5, 2.0).value)


def test_inverse_stable_cdf():
    x = np.array([0.0, 0.5, 1.0, 5.0])
    F = limits.inverse_stable_cdf(0.5, x, 1.0)
    assert F[0] == 0.0 and np.all(np.diff(F) > 0) and F[-1] > 0.99
    # beta = 1/2: P(E(t) <= x) = erf(x / (2 sqrt t))
    from scipy import special

    assert np.allclose(F, special.erf(x / 2.0), atol=1e-13)


def test_convergence_sweep_small():
    rep = limits.convergence_sweep("wright", 0.5, 1.0, [0.2, 0.05], 2000, seed=1)
    assert [r["tau"] for r in rep["rows"]] == [0.2, 0.05]
    assert rep["sigma"] == pytest.approx(0.5 / math.sqrt(2000))
    assert 0 < rep["final_ks"] < 0.1
    with pytest.raises(DomainError):
        limits.convergence_sweep("fpp", 0.5, 1.0, [0.05, 0.2], 100)


def test_rescaled_counts_runner_hook():
    calls = []

    def runner(process, beta, pair, t, paths, seed):
        calls.append(pair.tau)
        return limits.rescaled_counts(process, beta, pair, t, paths, seed)

    limits.convergence_sweep("fpp", 0.5, 1.0, [0.2], 1000, seed=1, runner=runner)
    assert calls == [0.2]
