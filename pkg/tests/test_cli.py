"""Command-line interface: spot rows, tables, byte stability, exit codes."""
import csv
import io
import json

import numpy as np
import pytest

from fracrenewal import cli, frac_ops, specfun, verify


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def parse_csv(text):
    lines = text.splitlines()
    assert lines[-1].startswith("# config_hash=")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[:-1]))))
    return rows, lines[-1]


def probs_value(capsys, extra, t, n):
    code, out = run(capsys, ["probs", "--t-min", str(t), "--t-max", str(t + 1), "--points", "2", *extra])
    assert code == cli.EXIT_OK
    rows, _ = parse_csv(out)
    row = next(r for r in rows if float(r["t"]) == t and int(r["n"]) == n)
    return float(row["p_n"])


@pytest.mark.parametrize(
    "extra, t, n, expected",
    [
        (["--process", "poisson"], 2.0, 2, 0.2706705664732254),
        (["--process", "fpp", "--beta", "0.5"], 1.0, 0, 0.4275835761558070),
        (["--process", "wright", "--beta", "1"], 3.5, 3, 1.0),
    ],
)
def test_probs_spot_rows(capsys, extra, t, n, expected):
    assert probs_value(capsys, extra, t, n) == pytest.approx(expected, abs=1e-12)


def test_tabulate_poisson_limit(capsys):
    code, out = run(capsys, ["tabulate", "--beta", "1", "--t-min", "0.01", "--t-max", "20", "--points", "50"])
    assert code == 0
    rows, _ = parse_csv(out)
    t = np.array([float(r["t"]) for r in rows])
    psi = np.array([float(r["psi"]) for r in rows])
    phi = np.array([float(r["phi"]) for r in rows])
    assert np.max(np.abs(psi - np.exp(-t))) <= 1e-12
    assert np.max(np.abs(phi - np.exp(-t))) <= 1e-12


def test_tabulate_fractional_properties(capsys):
    code, out = run(capsys, ["tabulate", "--beta", "0.5"])
    assert code == 0
    rows, _ = parse_csv(out)
    assert len(rows) == 200
    t = np.array([float(r["t"]) for r in rows])
    psi = np.array([float(r["psi"]) for r in rows])
    assert t[0] == pytest.approx(0.01) and t[-1] == pytest.approx(100.0)
    assert np.all(np.diff(psi) < 0) and np.all((psi > 0) & (psi < 1))
    # power-law tail t^-beta / Gamma(1 - beta)
    asym = t[-1] ** -0.5 / specfun.gamma(0.5)
    assert abs(psi[-1] / asym - 1) < 0.05


def test_tabulate_wright_degenerate(capsys):
    code, out = run(capsys, ["tabulate", "--process", "wright", "--beta", "1",
                             "--t-min", "0.5", "--t-max", "1.5", "--points", "2"])
    assert code == 0
    rows, _ = parse_csv(out)
    assert [float(r["psi"]) for r in rows] == [1.0, 0.0]
    assert "delta_at" in rows[0]


def test_output_is_byte_stable(tmp_path):
    argv = ["probs", "--beta", "0.75", "--n-max", "6"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["--output", str(a)]) == 0
    assert cli.main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().splitlines()[-1].startswith(b"# config_hash=")


def test_simulate_is_reproducible(tmp_path):
    argv = ["simulate", "--beta", "0.5", "--paths", "2000", "--t-min", "1", "--t-max", "2", "--points", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["--output", str(a)]) == 0
    assert cli.main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_hash_depends_on_config(capsys):
    _, out1 = run(capsys, ["eval", "--beta", "0.5"])
    _, out2 = run(capsys, ["eval", "--beta", "0.6"])
    assert parse_csv(out1)[1] != parse_csv(out2)[1]


def test_json_format(capsys):
    code, out = run(capsys, ["eval", "--beta", "0.5", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert "config_hash" in doc


def test_beta_all_writes_one_file_per_order(tmp_path):
    base = tmp_path / "tab.csv"
    assert cli.main(["tabulate", "--beta", "all", "--points", "20", "--output", str(base)]) == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["tab_beta0.25.csv", "tab_beta0.5.csv", "tab_beta0.75.csv", "tab_beta1.csv"]


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["eval", "--beta", "1.5"],
        ["eval", "--beta", "abc"],
        ["probs", "--beta", "all"],
        ["eval", "--t-min", "5", "--t-max", "1"],
        ["eval", "--process", "wright", "--lambda", "2"],
        ["simulate", "--paths", "10"],
        ["limits", "--tau", "0.1", "--tau", "0.2"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert cli.main(argv) == cli.EXIT_USAGE
    capsys.readouterr()


def test_unwritable_output_exit_2(tmp_path, capsys):
    target = tmp_path / "missing-dir" / "out.csv"
    assert cli.main(["eval", "--output", str(target)]) == cli.EXIT_USAGE


def test_limits_short_sweep(capsys):
    code, out = run(capsys, ["limits", "--paths", "500", "--tau", "0.2", "--tau", "0.1"])
    rows, _ = parse_csv(out)
    assert [float(r["tau"]) for r in rows] == [0.2, 0.1]
    assert code in (cli.EXIT_OK, cli.EXIT_FAIL)


def test_corrupted_gamma_fails_verification(monkeypatch, tmp_path):
    """Negative control: a wrong Gamma function must make the quick suite fail."""
    real, real_r = specfun.gamma, specfun.rgamma

    def bad_gamma(x):
        return 1.1 * real(x)

    def bad_rgamma(x):
        return real_r(x) / 1.1

    for mod in (specfun, frac_ops, verify):
        monkeypatch.setattr(mod, "gamma", bad_gamma)
    monkeypatch.setattr(specfun, "rgamma", bad_rgamma)
    out = tmp_path / "report.json"
    code = cli.main(["verify", "--quick", "--output", str(out)])
    assert code != 0
    report = json.loads(out.read_text())
    assert not all(c["pass"] for c in report["checks"])
