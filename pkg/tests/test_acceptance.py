"""Acceptance criteria.

Each test prints, and records for the end-of-run summary, one line
``PASS criterion N: ...`` or ``FAIL criterion N: ...``. Tolerances and
runtime limits are fixed here; the Monte Carlo seed is 42.
"""
import json
import time

import pytest

from fracrenewal import cli, verify

from conftest import ACCEPTANCE_LINES

SEED = 42


def _report(number, title, records, elapsed, limit):
    ok = all(r["pass"] for r in records) and (limit is None or elapsed <= limit)
    detail = "; ".join(f"{r['name']}={r['measured']:.3g} (tol {r['tolerance']:.3g})" for r in records)
    budget = f"{elapsed:.1f}s" + (f" <= {limit:g}s" if limit is not None else "")
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} [{budget}] {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def _run(number, title, fn, limit=None, **kw):
    t0 = time.perf_counter()
    records = fn(**kw)
    elapsed = time.perf_counter() - t0
    assert _report(number, title, records, elapsed, limit)


def test_criterion_01_transform_pairs():
    _run(1, "Laplace transform pairs, 40 log points on [0.05, 50]", verify.check_transform_pairs,
         limit=30.0, betas=(0.25, 0.5, 0.75), points=40, tol=1e-8)


def test_criterion_02_dual_route():
    _run(2, "series vs inversion p_n, n <= 20", verify.check_dual_route,
         limit=20.0, betas=(0.5, 0.75), n_max=20, tol=1e-8)


def test_criterion_03_renewal_monte_carlo():
    _run(3, "Monte Carlo E[N(t)] within 1%", verify.check_renewal_mc,
         limit=60.0, beta=0.5, times=(1.0, 5.0, 10.0), paths=100_000, seed=SEED, tol=0.01)


def test_criterion_04_wright_series_renewal():
    _run(4, "Wright series renewal function at t=100 within 5%", verify.check_wright_tauberian,
         limit=10.0, beta=0.5, t=100.0, tol=0.05)


def test_criterion_05_degenerations():
    _run(5, "beta = 1 degenerations (1e-12 / exact)", verify.check_degenerations, tol=1e-12)


def test_criterion_06_telescoping():
    _run(6, "telescoping p_n = int(q_n - q_{n+1}), n <= 10", verify.check_telescoping,
         beta=0.5, n_max=10, tol=5e-4)


def test_criterion_07_fractional_ode():
    _run(7, "fractional Kolmogorov residual and step-halving rate", verify.check_fractional_ode,
         beta=0.5, step=1e-3, tol=5e-3, order=1.4)


def test_criterion_08_samplers():
    _run(8, "ML survival (4 sigma), stable KS, tail slope", verify.check_samplers,
         beta=0.5, draws=100_000, seed=SEED, sigmas=4.0, slope_tol=0.05)


def test_criterion_09_diffusion_sweep():
    _run(9, "diffusion-limit KS sweep", verify.check_diffusion_sweep,
         limit=120.0, beta=0.5, taus=(0.2, 0.1, 0.05, 0.02), paths=20_000, seed=SEED)


def test_criterion_10_inverse_subordinator_identity():
    _run(10, "t^-beta M_beta = J^(1-beta) f", verify.check_inverse_subordinator_identity,
         beta=0.5, x=1.0, tol=1e-4)


@pytest.mark.slow
def test_criterion_11_full_verify(tmp_path):
    out = tmp_path / "report.json"
    t0 = time.perf_counter()
    code = cli.main(["verify", "--seed", str(SEED), "--output", str(out)])
    elapsed = time.perf_counter() - t0
    report = json.loads(out.read_text())
    failed = [c for c in report["checks"] if not c["pass"]]
    rec = {"name": f"exit_code={code},checks={len(report['checks'])},failed", "pass": code == 0,
           "measured": float(len(failed)), "tolerance": 0.0}
    assert _report(11, "full verify suite", [rec], elapsed, 300.0), failed
