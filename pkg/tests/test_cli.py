import numpy as np
import pytest

from slhyper.cli import parse_ladder, parse_number, run


def test_parse_ladder():
    assert parse_ladder("1:2^-3") == [1.0, 0.5, 0.25, 0.125]
    assert parse_ladder("0.2:0.025") == pytest.approx([0.2, 0.1, 0.05, 0.025])
    assert parse_ladder("0.1,0.05") == [0.1, 0.05]
    assert parse_number("2^-10") == 2.0 ** -10


def test_hyper_gauss(tmp_path, capsys):
    out = tmp_path / "g"
    assert run(["hyper-gauss", "--a", "1", "--rho", "1", "--h", "0.1", "--n", "10",
                "--profile", "quad:b=0.5", "--out", str(out)]) == 0
    lines = (out / "chain.csv").read_text().splitlines()
    assert lines[0] == "n,lambda,logF,boundFactor,fittedC"
    assert len(lines) == 12
    meta = dict(l.split("=", 1) for l in (out / "run.meta").read_text().splitlines())
    assert meta["command"] == "hyper-gauss" and meta["profile"] == "quad:b=0.5"
    assert "PASS chain bound" in capsys.readouterr().out


def test_constants_figure_one(tmp_path):
    out = tmp_path / "c"
    assert run(["constants", "--figure", "1", "--C", "0.01", "--rho", "1", "--a", "1",
                "--n", "10", "--h-ladder", "1:2^-10", "--out", str(out)]) == 0
    data = np.loadtxt(out / "constants.csv", delimiter=",", skiprows=1)
    assert data.shape == (11, 2)
    assert np.all(data[:, 1] >= 1)


def test_constants_limit_check_can_fail(tmp_path):
    assert run(["constants", "--figure", "3", "--h-ladder", "1:0.25", "--limit-tol", "1e-9",
                "--out", str(tmp_path)]) == 1


def test_concentration(tmp_path):
    out = tmp_path / "k"
    assert run(["concentration", "--profile", "sqrt1px2", "--T", "0.5", "--p", "0.5",
                "--h-ladder", "0.2:0.05", "--m", "2049", "--out", str(out)]) == 0
    lines = (out / "ladder.csv").read_text().splitlines()
    assert lines[0] == "h,n,p,tailMass,meanErr,supErr,fittedOrder"
    assert len(lines) == 4


def test_lebesgue_and_ultra(tmp_path):
    assert run(["hyper-lebesgue", "--pairs", "1,2", "--T", "0.5", "--optimal", "1,2",
                "--out", str(tmp_path / "l")]) == 0
    header = (tmp_path / "l" / "check.csv").read_text().splitlines()[0]
    assert header == "alpha,beta,n,h,lhsLog,rhsLog,gap,pass"
    assert run(["ultra", "--analytic", "--out", str(tmp_path / "u")]) == 0
    assert run(["ultra", "--n", "5", "--out", str(tmp_path / "u2")]) == 0


def test_lsi_check(tmp_path):
    assert run(["lsi-check", "--saturated", "--out", str(tmp_path)]) == 0


def test_deterministic_output(tmp_path):
    args = ["hyper-gauss", "--n", "3", "--m", "2049"]
    run(args + ["--out", str(tmp_path / "a")])
    run(args + ["--out", str(tmp_path / "b")])
    for name in ("chain.csv", "run.meta"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_jobs_do_not_change_output(tmp_path):
    args = ["hyper-lebesgue", "--pairs", "1,1;1,2", "--T", "0.25,0.5", "--m", "2049"]
    run(args + ["--out", str(tmp_path / "a")])
    run(args + ["--jobs", "2", "--out", str(tmp_path / "b")])
    assert ((tmp_path / "a" / "check.csv").read_bytes()
            == (tmp_path / "b" / "check.csv").read_bytes())


def test_config_file_and_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# chain settings\nn = 3\nh=0.05\nprofile=tanh\n")
    out = tmp_path / "o"
    assert run(["hyper-gauss", "--config", str(conf), "--n", "4", "--m", "2049",
                "--out", str(out)]) == 0
    meta = (out / "run.meta").read_text().splitlines()
    assert "n=4" in meta and "h=0.05" in meta and "profile=tanh" in meta


@pytest.mark.parametrize("argv", [
    ["no-such-command"],
    ["constants", "--figure", "2"],
    ["constants", "--h-ladder", "abc"],
    ["hyper-gauss", "--profile", "cube"],
])
def test_usage_errors(tmp_path, argv):
    assert run(argv + ["--out", str(tmp_path)] if argv[0] != "no-such-command" else argv) == 2


@pytest.mark.parametrize("text", ["bogus=1", "n", "n=abc"])
def test_malformed_config(tmp_path, text):
    conf = tmp_path / "bad.conf"
    conf.write_text(text + "\n")
    assert run(["hyper-gauss", "--config", str(conf), "--out", str(tmp_path)]) == 2
