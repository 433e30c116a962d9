import io

import pytest

from ritz.cli import main, parse_n_range, read_config
from ritz.errors import ConfigurationError


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_solve_harmonic():
    code, text = run(["solve", "--potential", "x^2", "--basis", "s1", "--n", "5", "--states", "1"])
    assert code == 0
    line = [l for l in text.splitlines() if l.startswith("E0")][0]
    assert line.split()[2].startswith("1.000000000000000000000000000000")


def test_solve_vq():
    code, text = run(["solve", "--potential", "x^4-5*x^2", "--basis", "s2", "--n", "40", "--states", "4"])
    assert code == 0
    lines = [l for l in text.splitlines() if l.startswith("E")]
    assert len(lines) == 4
    assert lines[0].split()[2].startswith("-3.41014276")


def test_printed_digits_never_exceed_self_consistency():
    code, text = run(["solve", "-p", "x^4-5*x^2", "--basis", "s2", "--n", "12", "--states", "2", "--format", "csv"])
    assert code == 0
    rows = [l.split(",") for l in text.splitlines()[1:]]
    for _, N, value, digits in rows:
        # N=12 in s2 is good to roughly 12 digits; the estimate must say so
        assert int(digits) < 20
        assert len(value.lstrip("-").replace(".", "").lstrip("0")) <= int(digits) + 1


def test_solve_digits_override():
    code, text = run(["solve", "-p", "x^2", "--basis", "s1", "--n", "3", "--states", "1", "--digits", "8"])
    assert "E0 = 1.0000000 " in text


@pytest.mark.parametrize("argv", [
    ["solve", "--potential", "x^4-5*x^^2", "--n", "4"],
    ["solve", "--potential", "x^4", "--n", "4", "--precision", "10"],
    ["solve", "--potential", "x^4", "--basis", "q7", "--n", "4"],
    ["solve", "--potential", "x^4", "--n", "4..x"],
    ["solve", "--n", "4"],
    ["solve", "--potential", "x^4"],
    ["frobnicate"],
    ["study", "--potential", "x^2", "--n", "4"],
])
def test_usage_errors_exit_2(argv):
    assert run(argv)[0] == 2


def test_solver_failure_exits_1(monkeypatch, capsys):
    monkeypatch.setenv("RITZ_MAX_PRECISION", "60")
    code, _ = run(["solve", "-p", "x^4-5*x^2", "--basis", "s2", "--n", "40"])
    assert code == 1
    assert "error[precision-exhausted]" in capsys.readouterr().err


def test_study_outputs_deterministic(tmp_path):
    argv = ["study", "-p", "x^6-4*x^2", "--basis", "s1,s3", "--n", "4..8:2", "--states", "2",
            "--csv", str(tmp_path / "vs.csv"), "--svg", str(tmp_path / "vs.svg")]
    assert run(argv)[0] == 0
    first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert set(first) == {"vs_s1.csv", "vs_s3.csv", "vs.svg"}
    assert first["vs_s1.csv"].startswith(b"state,N,eigenvalue,log10_error\n")
    assert run(argv)[0] == 0
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == first


def test_study_overlay(tmp_path):
    ext = tmp_path / "ext.csv"
    ext.write_text("state,N,eigenvalue,log10_error\n0,4,-3.4,-2.0\n0,8,-3.41,-3.0\n")
    code, _ = run(["study", "-p", "x^4-5*x^2", "--basis", "s2", "--n", "4..6", "--states", "1",
                   "--overlay", f"ext={ext}", "--svg", str(tmp_path / "o.svg")])
    assert code == 0
    assert 'id="series-ext-n0"' in (tmp_path / "o.svg").read_text()


def test_study_csv_to_stdout():
    code, text = run(["study", "-p", "x^4-5*x^2", "--basis", "s2", "--n", "4", "--states", "1", "--format", "csv"])
    assert code == 0 and text.startswith("state,N,eigenvalue,log10_error\n")


def test_study_with_reference_file(tmp_path):
    (tmp_path / "ref").write_text("1\n3\n")
    code, text = run(["study", "-p", "x^2", "--basis", "s1", "--n", "2..3", "--states", "2",
                      "--reference", str(tmp_path / "ref")])
    assert code == 0 and "state 1" in text


def test_config_merged_under_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\npotential = x^2\nbasis = s1\nn = 3\nstates = 2\n")
    code, text = run(["solve", "--config", str(cfg)])
    assert code == 0 and "E1 = 3.0" in text
    code, text = run(["solve", "--config", str(cfg), "--potential", "x^4-5*x^2", "--basis", "s2", "--n", "6"])
    assert code == 0 and "E0 = -3.4" in text


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert run(["solve", "--config", str(bad)])[0] == 2
    bad.write_text("no equals sign\n")
    with pytest.raises(ConfigurationError):
        read_config(bad)


def test_parse_n_range():
    assert parse_n_range("40") == [40]
    assert parse_n_range("4..8") == [4, 5, 6, 7, 8]
    assert parse_n_range("4..10:3") == [4, 7, 10]


def test_benchmark_unknown_criterion():
    assert run(["benchmark", "--criteria", "9"])[0] == 2


def test_help_exits_0():
    assert run(["--help"])[0] == 0
