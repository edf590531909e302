"""Cross-verification suite: every analytic formula against an independent route.

Each ``check_*`` function returns a list of records
``{name, pass, measured, tolerance}``; :func:`run_suite` collects them. The
records carry no timings so that reports are reproducible byte for byte.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import stats

from . import frac_ops, laplace_oracle, limits, montecarlo, stable
from .grid import GridFunction, graded_grid, uniform_grid
from .processes import FractionalPoisson, WrightProcess
from .renewal_core import ExponentialLaw, renewal_equation_residual, renewal_function, telescoping_error
from .specfun import gamma, ml

DEFAULT_SEED = 42


def _rec(name, passed, measured, tolerance):
    return {"name": name, "pass": bool(passed), "measured": float(measured), "tolerance": float(tolerance)}


# ---------------------------------------------------------------------------
# analytic checks


def check_transform_pairs(betas=(0.25, 0.5, 0.75), points=40, tol=1e-8):
    """Talbot inversion of the standard transform pairs on ``points`` log-spaced t in [0.05, 50]."""
    t_grid = np.geomspace(0.05, 50.0, points)
    out = []
    for b in betas:
        for pair in laplace_oracle.standard_pairs(b):
            rep = laplace_oracle.verify_pair(pair, t_grid, tol)
            out.append(_rec(f"transform_pair:{pair.name}", rep["pass"], rep["max_abs_err"], tol))
    return out


def check_dual_route(betas=(0.5, 0.75), n_max=20, t_points=7, tol=1e-8):
    """Series counting probabilities against Laplace inversion, n <= n_max, t in [0.1, 10]."""
    out = []
    for b in betas:
        proc = FractionalPoisson(b)
        worst = 0.0
        for t in np.geomspace(0.1, 10.0, t_points):
            P = proc.counting_prob_matrix([t], n_max)[0]
            for n in range(n_max + 1):
                r = laplace_oracle.counting_prob_by_inversion(b, n, float(t))
                worst = max(worst, abs(r.value - P[n]))
        out.append(_rec(f"dual_route_counting[beta={b}]", worst <= tol, worst, tol))
    return out


def check_generating_function(beta=0.5, t=2.0, kappas=(0.5, 1.0, 2.0), tol=1e-9):
    """``sum_n p_n(t) e^(-n kappa) = E_beta(-(1 - e^(-kappa)) t^beta)``, and the kappa = 0 normalisation."""
    proc = FractionalPoisson(beta)
    P = proc.counting_prob_matrix([t], 400)[0]
    worst = abs(P.sum() - 1.0)
    for k in kappas:
        lhs = float(P @ np.exp(-k * np.arange(P.size)))
        rhs = ml(beta, 1.0, -(-math.expm1(-k)) * t**beta).value
        worst = max(worst, abs(lhs - rhs))
    return [_rec(f"generating_function[beta={beta},t={t}]", worst <= tol, worst, tol)]


def check_montroll_weiss(tol=1e-12):
    """Closed Laplace-Laplace form against the geometric partial sum and the term-wise transforms."""
    out = []
    for b, proc, kappa, s in ((0.5, "fpp", 1.0, 1.0), (0.5, "wright", 0.5, 0.7)):
        rep = laplace_oracle.montroll_weiss_check(b, proc, kappa, s)
        err = max(rep["partial_sum_error"], rep["termwise_error"])
        out.append(_rec(f"montroll_weiss[{proc},beta={b},kappa={kappa},s={s}]", err <= tol, err, tol))
    return out


def check_degenerations(tol=1e-12):
    """beta = 1: Poisson/Erlang for fpp; floor(t) counting for the Wright process (exact)."""
    out = []
    proc = FractionalPoisson(1.0, 1.5)
    t = np.array([0.1, 0.7, 2.0, 5.0, 12.0])
    n = np.arange(31)
    P = proc.counting_prob_matrix(t, 30)
    err_p = np.max(np.abs(P - stats.poisson.pmf(n[None, :], 1.5 * t[:, None])))
    err_q = 0.0
    for k in (1, 2, 5):
        err_q = max(err_q, np.max(np.abs(proc.erlang_pdf(k, t) - stats.gamma.pdf(t, k, scale=1 / 1.5))))
        err_q = max(err_q, np.max(np.abs(proc.erlang_cdf(k, t) - stats.gamma.cdf(t, k, scale=1 / 1.5))))
    out.append(_rec("beta1_fpp_poisson_pmf", err_p <= tol, err_p, tol))
    out.append(_rec("beta1_fpp_erlang_gamma", err_q <= tol, err_q, tol))

    w = WrightProcess(1.0)
    tt = np.array([0.0, 0.5, 0.999, 1.0, 1.5, 3.5, 9.99, 10.0])
    k = np.floor(tt).astype(int)
    Pw = w.counting_prob_matrix(tt, 12)
    miss = int(np.sum(Pw != (k[:, None] == np.arange(13)[None, :])))
    m = np.array([renewal_function(w, float(x)).value for x in tt])
    miss += int(np.sum(np.asarray(m) != k))
    path = montecarlo.simulate_counting(w, 10.5, montecarlo.RngStream(DEFAULT_SEED, 0))
    miss += int(not np.array_equal(path.epochs, np.arange(1.0, 11.0)))
    out.append(_rec("beta1_wright_floor", miss == 0, miss, 0))
    return out


def check_wright_tauberian(beta=0.5, t=100.0, tol=0.05):
    """Series renewal function of the Wright process against ``t^beta / Gamma(1 + beta)``."""
    m = renewal_function(WrightProcess(beta), t, method="series_sum").value
    ref = t**beta / gamma(1.0 + beta)
    rel = abs(m / ref - 1.0)
    return [_rec(f"wright_tauberian[beta={beta},t={t}]", rel <= tol, rel, tol)]


def check_renewal_equation(tol=5e-3):
    """Renewal-equation residual of the analytic renewal functions on t in [0.1, 10], step 1e-3."""
    g = uniform_grid(10.0, 1e-3)
    out = []
    for law, tl in ((ExponentialLaw(1.0), 1e-4), (FractionalPoisson(0.5), tol)):
        m = GridFunction(g, law.renewal_function_analytic(g))
        r = renewal_equation_residual(law, m)
        v = float(np.max(np.abs(r.values[g >= 0.1 - 1e-12])))
        out.append(_rec(f"renewal_equation[{law!r}]", v <= tl, v, tl))
    return out


def check_telescoping(beta=0.5, n_max=10, tol=5e-4, t_max=20.0, points=5001):
    """``p_n = int (q_n - q_{n+1})`` for n <= n_max on both processes (graded grid)."""
    g = graded_grid(t_max, points)
    out = []
    for law in (FractionalPoisson(beta), WrightProcess(beta)):
        worst = max(telescoping_error(law, n, g) for n in range(1, n_max + 1))
        out.append(_rec(f"telescoping[{law!r}]", worst <= tol, worst, tol))
    return out


def check_fractional_ode(beta=0.5, step=1e-3, tol=5e-3, order=1.4):
    """Caputo (L1) residual of the fractional Kolmogorov system and its step-halving rate."""
    a = frac_ops.verify_fractional_ode_system(beta, step=step, tol=tol)
    b = frac_ops.verify_fractional_ode_system(beta, step=step / 2, tol=tol)
    ratio = a["measured"] / b["measured"]
    return [
        _rec(a["name"], a["pass"], a["measured"], tol),
        _rec(f"fractional_ode_halving[beta={beta}]", ratio >= 2**order, ratio, 2**order),
    ]


def check_inverse_subordinator_identity(beta=0.5, x=1.0, step=1e-3, tol=1e-4):
    """``t^-beta M_beta(x t^-beta) = J_t^(1-beta) f(t, x)`` on t in [0.5, 5]."""
    g = uniform_grid(5.0, step)
    f = np.zeros_like(g)
    sc = x ** (-1.0 / beta)
    f[1:] = sc * stable.stable_pdf_values(beta, sc * g[1:])
    J = frac_ops.rl_fractional_integral(GridFunction(g, f), 1.0 - beta)
    sel = np.flatnonzero(g >= 0.5 - 1e-12)[::10]
    ref = np.array([stable.inverse_subordinator_pdf(beta, x, float(t)).value for t in g[sel]])
    err = float(np.max(np.abs(J.values[sel] - ref)))
    return [_rec(f"inverse_subordinator_identity[beta={beta},x={x}]", err <= tol, err, tol)]


def check_limit_transforms(beta=0.5, tol=1e-9):
    """Rescaled transforms: monotone approach to the limits and coinciding extrapolated limits."""
    pts = ((1.0, 1.0), (0.5, 2.0), (2.0, 0.5), (1.0, 3.0), (3.0, 1.0))
    worst, monotone = 0.0, True
    for kappa, s in pts:
        for erlang in (False, True):
            lim = (limits.limit_transform_erlang if erlang else limits.limit_transform_counting)(beta, kappa, s)
            fn = limits.rescaled_erlang_transform if erlang else limits.rescaled_transform
            vals = {}
            for proc in limits.PROCESSES:
                errs = [abs(fn(proc, beta, limits.ScalingPair.canonical(beta, 0.1 / 2**j), kappa, s) - lim)
                        for j in range(8)]
                monotone &= bool(np.all(np.diff(errs) < 0))
                vals[proc] = limits.richardson_limit(proc, beta, kappa, s, erlang=erlang).value
            worst = max(worst, abs(vals["fpp"] - vals["wright"]), abs(vals["fpp"] - lim))
    q = limits.erlang_limit_laplace(beta, 1.0, 1.0)
    qerr = abs(q - math.exp(-1.0))
    return [
        _rec(f"limit_transforms_coincide[beta={beta}]", worst <= tol, worst, tol),
        _rec(f"limit_transforms_monotone[beta={beta}]", monotone, 0.0 if monotone else 1.0, 0.0),
        _rec(f"erlang_limit_laplace[beta={beta}]", qerr <= 1e-6, qerr, 1e-6),
    ]


ANALYTIC_CHECKS = (
    check_transform_pairs,
    check_dual_route,
    check_generating_function,
    check_montroll_weiss,
    check_degenerations,
    check_wright_tauberian,
    check_renewal_equation,
    check_telescoping,
    check_fractional_ode,
    check_inverse_subordinator_identity,
    check_limit_transforms,
)


# ---------------------------------------------------------------------------
# Monte Carlo checks


def check_renewal_mc(beta=0.5, times=(1.0, 5.0, 10.0), paths=100_000, seed=DEFAULT_SEED, tol=0.01):
    """Sample mean of N(t) for fpp against ``t^beta / Gamma(1 + beta)``."""
    mean, _ = montecarlo.empirical_renewal_function(FractionalPoisson(beta), times, paths, seed)
    ref = np.asarray(times) ** beta / gamma(1.0 + beta)
    rel = float(np.max(np.abs(mean / ref - 1.0)))
    return [_rec(f"renewal_mc[fpp,beta={beta},paths={paths}]", rel <= tol, rel, tol)]


def check_samplers(beta=0.5, draws=100_000, seed=DEFAULT_SEED, sigmas=4.0, slope_tol=0.05):
    """ML survival within ``sigmas`` standard errors, stable KS, and the tail slope."""
    emp, ana, sig = montecarlo.survival_check(beta, 1.0, (1.0, 5.0, 20.0), draws, seed, 0)
    z = float(np.max(np.abs(emp - ana) / sig))
    ks, crit = montecarlo.stable_ks(beta, draws, seed, 1)
    T = montecarlo.sample_ml_waiting_time(beta, 1.0, montecarlo.RngStream(seed, 2), size=draws)
    slope = montecarlo.tail_slope(T)
    return [
        _rec(f"ml_sampler_survival[beta={beta}]", z <= sigmas, z, sigmas),
        _rec(f"stable_sampler_ks[beta={beta}]", ks < crit, ks, crit),
        _rec(f"ml_tail_slope[beta={beta}]", abs(slope + beta) <= slope_tol, slope, -beta),
    ]


def check_empirical_pmf(beta=0.5, t=1.0, paths=100_000, seed=DEFAULT_SEED, sigmas=4.0):
    out = []
    for law in (FractionalPoisson(beta), WrightProcess(beta)):
        emp = montecarlo.empirical_counting_pmf(law, t, paths, seed)
        ana = law.counting_prob_matrix([t], emp.probs.size - 1)[0]
        z = emp.max_sigma(ana)
        out.append(_rec(f"empirical_pmf[{law!r},t={t}]", z <= sigmas, z, sigmas))
    return out


def check_empirical_erlang(paths=20_000, seed=DEFAULT_SEED):
    out = []
    for law, n in ((ExponentialLaw(1.0), 2), (WrightProcess(0.5), 3), (FractionalPoisson(1.0), 1),
                   (FractionalPoisson(0.5), 2)):
        r = montecarlo.empirical_erlang(law, n, paths, seed)
        out.append(_rec(f"empirical_erlang[{law!r},n={n}]", r.passed, r.ks_statistic, r.critical))
    return out


def check_diffusion_sweep(beta=0.5, t=1.0, taus=(0.2, 0.1, 0.05, 0.02), paths=20_000, seed=DEFAULT_SEED):
    out = []
    for proc in limits.PROCESSES:
        rep = limits.convergence_sweep(proc, beta, t, taus, paths, seed)
        out.append(_rec(f"diffusion_sweep_monotone[{proc},beta={beta}]", rep["monotone"],
                        max(r["ks_statistic"] - p["ks_statistic"] for p, r in zip(rep["rows"], rep["rows"][1:])),
                        2 * rep["sigma"]))
        base = limits.KS_REGRESSION_BASELINE
        out.append(_rec(f"diffusion_sweep_final_ks[{proc},beta={beta}]", rep["final_ks"] < base,
                        rep["final_ks"], base))
    return out


MONTE_CARLO_CHECKS = (
    check_renewal_mc,
    check_samplers,
    check_empirical_pmf,
    check_empirical_erlang,
    check_diffusion_sweep,
)


def run_suite(quick=False, seed=DEFAULT_SEED, progress=None):
    """Run the analytic checks and, unless ``quick``, the Monte Carlo gates.

    ``quick`` also thins the transform-pair grid to 12 points. Returns the
    report ``{suite, checks}``.
    """
    checks = []
    for fn in ANALYTIC_CHECKS:
        kw = {"points": 12} if (quick and fn is check_transform_pairs) else {}
        checks.extend(fn(**kw))
        if progress:
            progress(fn.__name__)
    if not quick:
        for fn in MONTE_CARLO_CHECKS:
            checks.extend(fn(seed=seed))
            if progress:
                progress(fn.__name__)
    return {"suite": "quick" if quick else "full", "checks": checks}


def all_passed(report):
    return all(c["pass"] for c in report["checks"])
