import io

import pytest

from certlab import cli


def run(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    return code, [line.split("\t") for line in buf.getvalue().splitlines()]


def test_analyze_g1():
    code, rows = run("analyze", "--fn", "ctor=window(29,13,16)", "--measures", "C0,C1,bs,FC")
    assert code == 0 and rows[1][2:] == ["17", "26", "17", "17"]


def test_analyze_point_and_file(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("n=2\ntt=0111\n")
    code, rows = run("analyze", "--fn", str(p), "--input", "00")
    assert code == 0 and rows[0] == ["input", "value", "C", "bs", "FC"] and rows[1][1:] == ["0", "2", "2", "2"]


def test_search_window_top():
    code, rows = run("search", "window", "--nmax", "32", "--top", "1")
    assert code == 0 and rows[1][:3] == ["29", "13", "16"]


def test_simulate_requires_seed():
    assert run("simulate", "r0", "--fn", "ctor=window(5,2,3)", "--trials", "10")[0] == 1
    assert run("design", "build", "--n", "6", "--gamma", "2", "--m", "3")[0] == 1


def test_simulate_r0(tmp_path):
    out = tmp_path / "t.tsv"
    code, rows = run("simulate", "r0", "--fn", "ctor=window(5,2,3)", "--trials", "2000",
                     "--seed", "7", "--out", str(out))
    assert code == 0 and rows[1][1] == "0"
    assert out.read_text().startswith("# y=")
    assert run("simulate", "r0", "--fn", "ctor=window(5,2,3)", "--trials", "50", "--seed", "7") == \
        run("simulate", "r0", "--fn", "ctor=window(5,2,3)", "--trials", "50", "--seed", "7")


def test_verify_exit_codes():
    assert run("verify", "uniform", "--fn", "ctor=const(6,0)")[0] == 2
    assert run("verify", "uniform")[0] == 0
    assert run("verify", "certificate", "--fn", "ctor=or(4)", "--input", "0000",
               "--positions", "1,2,3,4")[0] == 0
    assert run("verify", "certificate", "--fn", "ctor=or(4)", "--input", "0000",
               "--positions", "1,2")[0] == 2
    assert run("verify", "recurrence")[0] == 0


def test_usage_errors():
    assert run("analyze", "--fn", "ctor=bogus(3)")[0] == 1
    assert run("analyze")[0] == 1
    assert run("analyze", "--fn", "ctor=or(3)", "--measures", "XYZ")[0] == 1
    assert run("nosuch")[0] == 1


def test_design_and_grover_and_poly(tmp_path):
    path = tmp_path / "d.txt"
    assert run("design", "build", "--n", "12", "--gamma", "3", "--m", "16", "--seed", "1",
               "--out", str(path))[0] == 0
    code, rows = run("design", "check", str(path))
    assert code == 0 and rows[1][-1] == "yes"
    code, rows = run("grover", "uniform", "--N", "16", "--M", "4", "--k", "1")
    assert code == 0 and float(rows[2][1]) == pytest.approx(1.0)
    code, rows = run("poly", "--fn", "ctor=maj(3)")
    assert code == 0 and rows[1][:2] == ["3", "2"]
