import io

import numpy as np
import pytest

import geg.verify
from geg.cli import main
from geg.dataio import read_weights


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def table(text):
    rows = [line.split("\t") for line in text.splitlines() if not line.startswith("#")]
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


def test_math_table_natural_row_at_one():
    code, text = run(["math-table", "--a", "0", "--b", "0"])
    assert code == 0
    header, rows = table(text)
    assert header == ["x", "log_ab", "residual"]
    row = next(r for r in rows if r[0] == 1.0)
    assert row[1] == 0.0 and row[2] == 0.0


def test_math_table_kind_matches_pair():
    _, by_kind = run(["math-table", "--kind", "tsallis", "--q", "0.5"])
    _, by_pair = run(["math-table", "--a", "0.5", "--b", "0"])
    assert by_kind == by_pair


@pytest.mark.parametrize("args", [["--a", "0.4", "--b", "-0.7"], ["--kind", "gamma", "--gamma", "0.3"],
                                  ["--kind", "abe", "--sigma", "1.5"]])
def test_math_table_residuals(args):
    code, text = run(["math-table", *args])
    assert code == 0
    _, rows = table(text)
    assert len(rows) == 50
    assert max(r[2] for r in rows) <= 1e-8


def test_math_table_y_axis():
    code, text = run(["math-table", "--kind", "tsallis", "--q", "0.5", "--axis", "y", "--start", "-3",
                      "--stop", "1", "--step", "0.5"])
    assert code == 0
    header, rows = table(text)
    assert header[1] == "exp_ab"
    assert rows[0][1] == 0.0  # below the range of the Tsallis log


def test_math_table_invalid_params(capsys):
    code, _ = run(["math-table", "--a", "0.5", "--b", "0.5"])
    assert code == 1
    assert "a*b" in capsys.readouterr().err


def test_bad_flag_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["math-table", "--axis", "z"])
    assert info.value.code == 1


def make_config(tmp_path, body, data):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"dataset.path = {data}\n{body}")
    return cfg


def test_backtest_constant_prices(tmp_path):
    data = tmp_path / "flat.csv"
    data.write_text("t,A,B,C\n" + "".join(f"{i},2,3,4\n" for i in range(10)))
    cfg = make_config(tmp_path, "lr.eta = 0.5\n", data)
    code, text = run(["backtest", "--config", str(cfg), "--out", str(tmp_path / "out")])
    assert code == 0
    assert "final_wealth = 1\n" in text
    assert "final_wealth = 1\n" in (tmp_path / "out" / "summary.txt").read_text()


def test_backtest_matches_eg_fixture(tmp_path, data_dir):
    cfg = make_config(tmp_path, "deform.a = 0\ndeform.b = 0\nloss.q = 1\nlr.eta = 0.05\n",
                      data_dir / "eg_fixture_prices.csv")
    code, _ = run(["backtest", "--config", str(cfg), "--out", str(tmp_path / "out")])
    assert code == 0
    _, _, ours = read_weights(tmp_path / "out" / "weights.csv")
    _, _, fixture = read_weights(data_dir / "eg_fixture_weights.csv")
    assert ours.shape == fixture.shape
    assert np.max(np.abs(ours - fixture)) <= 1e-12


def test_malformed_dataset_writes_nothing(tmp_path):
    data = tmp_path / "bad.csv"
    data.write_text("t,A,B\n0,1,2\n1,0,2\n")
    cfg = make_config(tmp_path, "", data)
    out = tmp_path / "out"
    code, _ = run(["backtest", "--config", str(cfg), "--out", str(out)])
    assert code == 1
    assert not out.exists() or not any(out.iterdir())


def test_missing_dataset_is_io_error(tmp_path):
    cfg = make_config(tmp_path, "", tmp_path / "nope.csv")
    assert run(["backtest", "--config", str(cfg), "--out", str(tmp_path / "o")])[0] == 3


def test_runtime_error_exit_code(tmp_path):
    data = tmp_path / "jump.csv"
    data.write_text("t,A,B\n0,1,1\n1,1,1\n2,3,0.1\n3,1,1\n4,1,1\n")
    cfg = make_config(tmp_path, "deform.kind = tsallis\ndeform.param = 1.5\nlr.eta = 10\n", data)
    out = tmp_path / "out"
    assert run(["backtest", "--config", str(cfg), "--out", str(out)])[0] == 2
    assert not out.exists()


def test_backtest_requires_config():
    assert run(["backtest"])[0] == 1


def test_baselines(tmp_path, data_dir):
    cfg = make_config(tmp_path, "", data_dir / "synthetic_3x252.csv")
    code, text = run(["baselines", "--config", str(cfg), "--out", str(tmp_path / "b")])
    assert code == 0
    assert text.splitlines()[0] == "strategy\tfinal_wealth\tmax_drawdown"
    for name in ("uniform_bah", "uniform_crp", "classical_eg"):
        assert (tmp_path / "b" / name / "wealth.csv").exists()


SEARCH = """
search.method = random
search.samples = 12
search.a = uniform(-0.9, 0.9)
search.b = uniform(-0.9, 0.9)
search.eta = loguniform(0.01, 1)
split.train = 100
split.test = 50
"""


def test_search_is_reproducible(tmp_path, data_dir):
    cfg = make_config(tmp_path, SEARCH, data_dir / "synthetic_3x252.csv")
    outs = []
    for d in ("r1", "r2"):
        code, text = run(["search", "--config", str(cfg), "--out", str(tmp_path / d), "--seed", "9"])
        assert code == 0 and text.startswith("evaluated 12 configurations")
        outs.append((tmp_path / d / "ranking.csv").read_bytes())
    assert outs[0] == outs[1]
    run(["search", "--config", str(cfg), "--out", str(tmp_path / "r3"), "--seed", "10"])
    assert (tmp_path / "r3" / "ranking.csv").read_bytes() != outs[0]


def test_single_point_grid_search(tmp_path, data_dir):
    body = "search.a = 0\nsearch.b = 0\nsearch.q = 1\nsearch.eta = 0.1\nsearch.gamma = 0\nsplit.train = 100\nsplit.test = 50\n"
    cfg = make_config(tmp_path, body, data_dir / "synthetic_3x252.csv")
    code, text = run(["search", "--config", str(cfg), "--out", str(tmp_path / "s")])
    assert code == 0 and "best: a=0, b=0" in text
    assert len((tmp_path / "s" / "ranking.csv").read_text().splitlines()) == 2


def test_search_requires_block(tmp_path, data_dir):
    cfg = make_config(tmp_path, "", data_dir / "synthetic_3x252.csv")
    assert run(["search", "--config", str(cfg), "--out", str(tmp_path / "s")])[0] == 1


def test_verify_passes():
    code, text = run(["verify"])
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == len(geg.verify.CHECKS) + 1
    assert all(line.startswith("PASS") and "max residual" in line for line in lines[:-1])


def test_verify_reports_injected_failure(monkeypatch):
    def perturbed(rng):
        return 1e-3

    checks = list(geg.verify.CHECKS)
    checks[0] = geg.verify.Check(checks[0].name, perturbed, checks[0].tol)
    monkeypatch.setattr(geg.verify, "CHECKS", checks)
    code, text = run(["verify"])
    assert code == 1
    assert f"FAIL  {checks[0].name}" in text
    assert "1 check(s) failed" in text
