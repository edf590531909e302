"""Command-line front end: ``fracrenewal {eval,tabulate,probs,simulate,verify,limits}``.

Exit codes: 0 success / all checks pass, 1 verification failure, 2 usage
error, 3 numeric failure (an evaluation could not reach its accuracy or a
sampler misbehaved). Only this module spawns worker processes; simulations
split their paths into contiguous slices whose results are merged by integer
addition, so output does not depend on ``--workers``.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import limits, montecarlo, stable, verify
from .exceptions import (
    ConvergenceError,
    DegenerateLawError,
    DomainError,
    PrecisionError,
    SamplingError,
)
from .grid import log_grid
from .processes import (
    FractionalPoisson,
    WrightProcess,
    fpp_erlang_density,
    fpp_survival,
    make_process,
    wright_erlang_density,
    wright_renewal_function,
)
from .renewal_core import renewal_function
from .tables import config_hash, render_json, render_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
TABULATE_BETAS = (0.25, 0.5, 0.75, 1.0)
DEFAULT_TAUS = (0.2, 0.1, 0.05, 0.02)


class UsageError(Exception):
    pass


def build_parser():
    p = argparse.ArgumentParser(
        prog="fracrenewal",
        description="Fractional Poisson and Wright renewal processes: tables, simulation, verification.",
    )
    p.add_argument("subcommand", choices=["eval", "tabulate", "probs", "simulate", "verify", "limits"])
    p.add_argument("--beta", default="0.5", help="order in (0, 1]; 'all' for tabulate")
    p.add_argument("--process", choices=["fpp", "wright", "poisson"], default="fpp")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="time scale (fpp/poisson only)")
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--log-grid", action="store_true")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    p.add_argument("--output", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--quick", action="store_true", help="verify: analytic checks only")
    p.add_argument("--tau", type=float, action="append", default=None,
                   help="limits: waiting-time scale (repeatable, decreasing)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for simulate/limits")
    return p


# ---------------------------------------------------------------------------
# configuration


_GRID_DEFAULTS = {
    "tabulate": (0.01, 100.0, 200, True),
    "eval": (0.1, 10.0, 5, True),
    "probs": (0.5, 5.0, 4, False),
    "simulate": (1.0, 5.0, 2, False),
    "limits": (1.0, 1.0, 1, False),
}


def make_config(args):
    """Validate the arguments and return the canonical configuration dict."""
    sub = args.subcommand
    if args.beta == "all":
        if sub != "tabulate":
            raise UsageError("--beta all is only valid for tabulate")
        betas = list(TABULATE_BETAS)
    else:
        try:
            betas = [float(args.beta)]
        except ValueError:
            raise UsageError(f"--beta must be a number in (0, 1] or 'all', got {args.beta!r}") from None
    for b in betas:
        if not 0.0 < b <= 1.0:
            raise UsageError(f"beta must lie in (0, 1], got {b}")
    if args.process == "poisson":
        betas = [1.0]
    if args.process == "wright" and args.lam != 1.0:
        raise UsageError("--lambda applies to fpp/poisson only; the Wright process is unit-scale")
    if not args.lam > 0:
        raise UsageError("--lambda must be positive")
    t_min, t_max, points, log_default = _GRID_DEFAULTS.get(sub, (0.1, 10.0, 5, False))
    t_min = args.t_min if args.t_min is not None else t_min
    t_max = args.t_max if args.t_max is not None else t_max
    points = args.points if args.points is not None else points
    log = bool(args.log_grid or (log_default and args.t_min is None and args.t_max is None))
    if sub == "limits":
        if args.t_min is not None or args.points is not None:
            raise UsageError("limits uses --t-max as the observation time; --t-min/--points do not apply")
        if args.process not in limits.PROCESSES:
            raise UsageError("limits supports --process fpp or wright")
        if not t_max > 0:
            raise UsageError("--t-max must be positive")
    elif sub != "verify":
        if not (t_min < t_max and points >= 2):
            raise UsageError("grid needs --t-min < --t-max and --points >= 2")
        if t_min < 0 or (log and t_min <= 0):
            raise UsageError("grid needs t-min >= 0 (> 0 on a log grid)")
    if args.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    paths = args.paths
    if paths is None:
        paths = {"simulate": 100_000, "limits": 20_000}.get(sub, 0)
    if sub == "simulate" and paths < 1000:
        raise UsageError("simulate needs --paths >= 1000")
    if sub == "limits" and paths < 1:
        raise UsageError("--paths must be positive")
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    taus = list(args.tau) if args.tau else list(DEFAULT_TAUS)
    if any(t <= 0 for t in taus) or any(a <= b for a, b in zip(taus, taus[1:])):
        raise UsageError("--tau values must be positive and decreasing")
    cfg = {
        "subcommand": sub,
        "betas": betas,
        "process": args.process,
        "lambda": args.lam,
        "t_min": t_min,
        "t_max": t_max,
        "points": points,
        "log_grid": log,
        "n_max": args.n_max,
        "paths": paths,
        "seed": args.seed & ((1 << 64) - 1),
        "format": args.format,
        "quick": bool(args.quick),
    }
    if sub == "limits":
        cfg["taus"] = taus
    return cfg


def grid_of(cfg):
    if cfg["log_grid"]:
        return log_grid(cfg["t_min"], cfg["t_max"], cfg["points"])
    return np.linspace(cfg["t_min"], cfg["t_max"], cfg["points"])


def _process(cfg, beta):
    return make_process(cfg["process"], beta, cfg["lambda"])


# ---------------------------------------------------------------------------
# subcommands; each returns (text, exit code)


def cmd_tabulate(cfg):
    """Psi and phi on the grid, one table per beta."""
    t = grid_of(cfg)
    blocks = []
    for b in cfg["betas"]:
        proc = _process(cfg, b)
        psi = proc.sf(t)
        if isinstance(proc, WrightProcess) and proc.order.degenerate:
            cols = ["t", "psi", "delta_at"]
            rows = [(float(x), float(p), 1.0) for x, p in zip(t, psi)]
        else:
            phi = proc.pdf(t)
            cols = ["t", "psi", "phi"]
            rows = [(float(x), float(p), float(f)) for x, p, f in zip(t, psi, phi)]
        sub = {**cfg, "betas": [b]}
        blocks.append((b, render_table(cols, rows, config_hash(sub), cfg["format"])))
    return blocks, EXIT_OK


def _scalar_rows(cfg, b, t):
    proc = _process(cfg, b)
    rows = []
    for x in t:
        x = float(x)
        if isinstance(proc, FractionalPoisson):
            psi = fpp_survival(proc, x)
            phi = fpp_erlang_density(proc, 1, x) if x > 0 else None
        else:
            psi = stable.stable_sf(b, x) if x > 0 else None
            phi = None if (proc.order.degenerate or x <= 0) else stable.stable_pdf(b, x)
        m = wright_renewal_function(proc, x) if isinstance(proc, WrightProcess) else renewal_function(proc, x)
        row = [x]
        for r in (psi, phi, m):
            if r is None:
                row += [float("nan"), float("nan"), "n/a"]
            else:
                row += [float(r.value), float(r.abs_err_bound), getattr(r.method_tag, "value", str(r.method_tag))]
        rows.append(tuple(row))
    return rows


def cmd_eval(cfg):
    """Psi, phi and the renewal function with error bounds and method tags."""
    cols = ["t", "psi", "psi_err", "psi_method", "phi", "phi_err", "phi_method", "m", "m_err", "m_method"]
    b = cfg["betas"][0]
    rows = _scalar_rows(cfg, b, grid_of(cfg))
    return [(b, render_table(cols, rows, config_hash(cfg), cfg["format"]))], EXIT_OK


def cmd_probs(cfg):
    """p_n(t) and q_n(t) with method tags and error bounds, n = 0..n_max."""
    b = cfg["betas"][0]
    proc = _process(cfg, b)
    t = grid_of(cfg)
    n_max = cfg["n_max"]
    cols = ["t", "n", "p_n", "p_err", "p_method", "q_n", "q_err", "q_method"]
    rows = []
    for x in t:
        x = float(x)
        if isinstance(proc, FractionalPoisson):
            p, pb, pm = proc.counting_probs_detailed(x, n_max)
        else:
            p = proc.counting_prob_matrix([x], n_max)[0]
            pb = np.full(p.size, 1e-12 if not proc.order.degenerate else 0.0)
            pm = ("closed_form" if proc.order.degenerate else "quadrature",) * p.size
        for n in range(n_max + 1):
            q = (float("nan"), float("nan"), "n/a")
            if n >= 1 and x > 0:
                if isinstance(proc, FractionalPoisson):
                    r = fpp_erlang_density(proc, n, x)
                    q = (r.value, r.abs_err_bound, r.method_tag.value)
                elif not proc.order.degenerate:
                    r = wright_erlang_density(proc, n, x)
                    q = (r.value, r.abs_err_bound, r.method_tag.value)
                else:
                    q = (float("nan"), float("nan"), "point_mass")
            rows.append((x, n, float(p[n]), float(pb[n]), str(pm[n]), float(q[0]), float(q[1]), q[2]))
    return [(b, render_table(cols, rows, config_hash(cfg), cfg["format"]))], EXIT_OK


def _slices(paths, workers):
    k = max(1, min(workers, paths))
    edges = np.linspace(0, paths, k + 1).astype(int)
    return [(int(a), int(c - a)) for a, c in zip(edges[:-1], edges[1:]) if c > a]


def _pmf_slice(args):
    process, beta, lam, t, first, count, seed = args
    law = make_process(process, beta, lam)
    N = montecarlo.count_matrix(law, [t], count, seed, first)[:, 0]
    return np.bincount(N)


def _counts_slice(args):
    process, beta, tau, t, first, count, seed = args
    pair = limits.ScalingPair.canonical(beta, tau)
    return limits.rescaled_counts(process, beta, pair, t, count, seed, first)


def _map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(a) for a in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _merge_counts(parts):
    size = max(p.size for p in parts)
    total = np.zeros(size, dtype=np.int64)
    for p in parts:
        total[: p.size] += p
    return total


def cmd_simulate(cfg, workers=1):
    """Empirical p_n(t) on the grid with analytic comparison columns."""
    b = cfg["betas"][0]
    proc = _process(cfg, b)
    cols = ["t", "n", "count", "empirical_p", "analytic_p", "std_err"]
    rows = []
    for x in grid_of(cfg):
        x = float(x)
        tasks = [(cfg["process"], b, cfg["lambda"], x, a, c, cfg["seed"])
                 for a, c in _slices(cfg["paths"], workers)]
        counts = _merge_counts(_map(_pmf_slice, tasks, workers))
        emp = montecarlo.EmpiricalCounting(proc.tag, x, cfg["paths"], counts)
        ana = proc.counting_prob_matrix([x], counts.size - 1)[0]
        for r in emp.to_rows(ana):
            rows.append((x,) + r)
    return [(b, render_table(cols, rows, config_hash(cfg), cfg["format"]))], EXIT_OK


def cmd_limits(cfg, workers=1):
    """KS distance of the rescaled counting value to the inverse-stable CDF along the tau list."""
    b = cfg["betas"][0]
    t = cfg["t_max"]

    def runner(process, beta, pair, t_fixed, paths, seed):
        tasks = [(process, beta, pair.tau, t_fixed, a, c, seed) for a, c in _slices(paths, workers)]
        parts = _map(_counts_slice, tasks, workers)
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    rep = limits.convergence_sweep(cfg["process"], b, t, cfg["taus"], cfg["paths"], cfg["seed"], runner=runner)
    cols = ["tau", "h", "ks_statistic", "paths", "pass"]
    rows = [(r["tau"], r["h"], r["ks_statistic"], r["paths"], r["pass"]) for r in rep["rows"]]
    ok = rep["monotone"]
    return [(b, render_table(cols, rows, config_hash(cfg), cfg["format"]))], EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg):
    report = verify.run_suite(quick=cfg["quick"], seed=cfg["seed"])
    code = EXIT_OK if verify.all_passed(report) else EXIT_FAIL
    return [(None, render_json(report, config_hash(cfg)))], code


# ---------------------------------------------------------------------------


def _out_path(base, beta, many):
    if not many:
        return base
    root, ext = os.path.splitext(base)
    return f"{root}_beta{beta:g}{ext or ''}"


def _emit(blocks, output):
    many = len(blocks) > 1
    if output is None:
        for _, text in blocks:
            sys.stdout.write(text)
        return
    for beta, text in blocks:
        path = _out_path(output, beta, many)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse: usage errors exit with 2, --help with 0
        return int(e.code or 0)
    try:
        cfg = make_config(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"fracrenewal: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    sub = cfg["subcommand"]
    try:
        if sub == "tabulate":
            blocks, code = cmd_tabulate(cfg)
        elif sub == "eval":
            blocks, code = cmd_eval(cfg)
        elif sub == "probs":
            blocks, code = cmd_probs(cfg)
        elif sub == "simulate":
            blocks, code = cmd_simulate(cfg, args.workers)
        elif sub == "limits":
            blocks, code = cmd_limits(cfg, args.workers)
        else:
            blocks, code = cmd_verify(cfg)
    except (PrecisionError, ConvergenceError, SamplingError, FloatingPointError) as e:
        print(f"fracrenewal: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, DegenerateLawError) as e:
        print(f"fracrenewal: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _emit(blocks, args.output)
    except OSError as e:
        print(f"fracrenewal: cannot write output: {e}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
