import json

import numpy as np
import pytest

from smallcell.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return header, rows


def test_sir_cdf_default_grid(capsys):
    code, out, _ = run(["sir-cdf"], capsys)
    assert code == 0
    assert out.startswith("# smallcell-csv schema=1")
    assert "config_hash=" in out and "seed=20140601" in out
    header, rows = table(out)
    assert header == ["theta_db", "theta_linear", "f_sir_analytic"]
    assert rows.shape == (31, 3)
    assert np.all(np.diff(rows[:, 2]) >= 0)


def test_sir_cdf_baseline(capsys):
    code, out, _ = run(["sir-cdf", "--full-buffer", "-n", "1", "--theta-grid", "0", "0", "1"],
                       capsys)
    assert code == 0
    assert table(out)[1][0, 2] == pytest.approx(0.4399, abs=1e-4)


def test_sir_cdf_more_subchannels(capsys):
    vals = []
    for n in ("5", "50"):
        _, out, _ = run(["sir-cdf", "-n", n, "--theta-grid", "0", "0", "1"], capsys)
        vals.append(table(out)[1][0, 2])
    assert vals[1] < vals[0]


def test_rate_cdf_with_mc(capsys, tmp_path):
    path = tmp_path / "rate.csv"
    code, _, _ = run(["rate-cdf", "--with-mc", "--samples", "200", "--rate-grid", "0", "0.5",
                      "6", "--out", str(path)], capsys)
    assert code == 0
    header, rows = table(path.read_text())
    assert header == ["r", "f_r_analytic", "f_r_empirical", "ci_low", "ci_high"]
    assert np.all(np.diff(rows[:, 1]) >= 0) and np.all(rows[:, 1] <= 1)
    assert np.all((rows[:, 3] <= rows[:, 2]) & (rows[:, 2] <= rows[:, 4]))


def test_optimize_rows(capsys):
    code, out, _ = run(["optimize", "--r0", "0.2", "--r0", "1.0", "--n-max", "15",
                        "--m-max", "2"], capsys)
    assert code == 0
    header, rows = table(out)
    assert header == ["r0", "n_star", "outage", "outage_at_n1"]
    assert np.all(rows[:, 2] <= rows[:, 3])


def test_activity(capsys):
    code, out, _ = run(["activity", "--scheme", "2", "--m-max", "2", "-n", "4"], capsys)
    assert code == 0
    header, rows = table(out)
    assert header[:3] == ["n", "m_max", "activity_closed_form"]
    assert rows[0, 2] == pytest.approx(1 - rows[0, 3])


def test_simulate_dump_honours_seed(capsys):
    _, a, _ = run(["simulate", "--samples", "5", "--seed", "3"], capsys)
    _, b, _ = run(["simulate", "--samples", "5", "--seed", "3"], capsys)
    _, c, _ = run(["simulate", "--samples", "5", "--seed", "4"], capsys)
    assert a == b and a != c
    assert table(a)[0] == ["seed", "sir", "k0", "m", "rate"]


def test_dump_config_round_trip(capsys, tmp_path):
    argv = ["rate-cdf", "--with-mc", "--samples", "150", "--seed", "9", "-n", "7",
            "--m-max", "3", "--scheme", "scheme2", "--rate-grid", "0", "0.3", "4"]
    code, dumped, _ = run(argv + ["--dump-config"], capsys)
    assert code == 0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(dumped)
    assert json.loads(dumped)["n"] == 7
    _, direct, _ = run(argv, capsys)
    _, via_file, _ = run(["rate-cdf", "--with-mc", "--config", str(cfg)], capsys)
    assert direct == via_file


@pytest.mark.parametrize("argv", [["sir-cdf", "--alpha", "2"], ["rate-cdf", "-n", "0"],
                                  ["optimize", "--r0", "-1"], ["nope"],
                                  ["sir-cdf", "--config", "/does/not/exist.json"],
                                  ["activity", "--scheme", "scheme9"]])
def test_config_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "configuration error" in err


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"ratio": 10, "colour": "blue"}))
    assert run(["sir-cdf", "--config", str(cfg)], capsys)[0] == 2


def test_numerical_failure_exit_3(capsys, monkeypatch):
    from smallcell import cli
    from smallcell.exceptions import QuadratureNotConverged

    def boom(theta, *args):
        if theta > 5:
            raise QuadratureNotConverged("diverged")
        return 0.5

    monkeypatch.setattr(cli, "sir_cdf", boom)
    code, _, err = run(["sir-cdf"], capsys)
    assert code == 3
    assert "theta = 7.0 dB" in err
