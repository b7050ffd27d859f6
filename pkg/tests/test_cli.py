import io
import subprocess
import sys

import pytest

from flatmetric import cli, read_measure, write_measure
from flatmetric import flat as flat_module
from flatmetric.backends import BACKENDS
from flatmetric.bench import CSV_HEADER

from strategies import delta


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def pair(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    write_measure(delta(0, 2), a)
    write_measure(delta(1, 3), b)
    return str(a), str(b)


@pytest.mark.parametrize(
    "metric, expected",
    [
        ("flat", "3"),
        ("w1", "inf"),
        ("w1-normalized", "2"),
        ("w1-centralized", "4"),  # f(0) = -1, f(1) = -2
        ("radon", "5"),
        ("flat-upper", "3"),
    ],
)
def test_dist_metrics(pair, metric, expected):
    code, out = run("dist", *pair, "--metric", metric)
    assert code == 0
    assert float(out) == pytest.approx(float(expected), rel=1e-12)


@pytest.mark.parametrize("backend", ["array", "tree"])
def test_dist_flat_backends(pair, backend):
    assert run("dist", *pair, "--metric", "flat", "--backend", backend) == (0, "3\n")


def test_dist_identical_files(pair):
    code, out = run("dist", pair[0], pair[0], "--metric", "w1")
    assert (code, out) == (0, "0\n")


def test_dist_parse_error(tmp_path, pair, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 -2\n")
    code, _ = run("dist", str(bad), pair[1], "--metric", "flat")
    assert code == 2
    assert "bad.txt:2:" in capsys.readouterr().err


def test_dist_missing_file(pair, tmp_path):
    assert run("dist", str(tmp_path / "none.txt"), pair[1], "--metric", "w1")[0] == 2


def test_dist_backend_needs_flat(pair):
    assert run("dist", *pair, "--metric", "w1", "--backend", "tree")[0] == 3


def test_bad_arguments_exit_3(pair):
    with pytest.raises(SystemExit) as err:
        run("dist", *pair, "--metric", "cosine")
    assert err.value.code == 3
    with pytest.raises(SystemExit) as err:
        run("frobnicate")
    assert err.value.code == 3


def test_bench_csv():
    code, out = run("bench", "--n", "50,100", "--reps", "2", "--dist", "spread", "--seed", "7")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == CSV_HEADER
    rows = [ln.split(",") for ln in lines[1:]]
    assert len(rows) == 2 * 2 * 2
    assert {r[1] for r in rows} == {"array", "tree"}
    assert {r[2] for r in rows} == {"spread"}
    assert {r[3] for r in rows} == {"7", "8"}
    for r in rows:
        assert float(r[4]) > 0 and float(r[5]) >= 0


@pytest.mark.parametrize("argv", [["--n", "0"], ["--n", "10", "--reps", "0"], ["--n", "10", "--backend", "heap"]])
def test_bench_bad_arguments(argv):
    assert run("bench", *argv)[0] == 3


class _WrongTree:
    @staticmethod
    def run(x, a):
        return 1e6


def test_bench_mismatch_exit_4(monkeypatch):
    monkeypatch.setitem(BACKENDS, "tree", _WrongTree)
    assert run("bench", "--n", "20")[0] == 4


def test_approx_uniform(tmp_path):
    out = tmp_path / "mu.txt"
    assert run("approx", "--source", "uniform 0 1 1", "--n", "4", "--out", str(out))[0] == 0
    mu = read_measure(out)
    assert mu.positions.tolist() == [0.25, 0.5, 0.75, 1.0]
    assert out.read_text().startswith("# 4 cells, right endpoint")


def test_approx_step_and_table(tmp_path):
    atoms, out = tmp_path / "atoms.txt", tmp_path / "out.txt"
    write_measure(delta(0.3), atoms)
    assert run("approx", "--source", f"step {atoms} 0 1", "--n", "10", "--out", str(out))[0] == 0
    (x, m), = read_measure(out).atoms
    assert (x, m) == (pytest.approx(0.4), 1.0)

    table = tmp_path / "cdf.txt"
    table.write_text("0 0\n2 1\n")
    assert run("approx", "--source", f"table {table}", "--n", "2", "--out", str(out), "--midpoint")[0] == 0
    assert read_measure(out).positions.tolist() == [0.5, 1.5]


@pytest.mark.parametrize("source", ["uniform 0 1", "gauss 0 1", "uniform 1 0 1", ""])
def test_approx_bad_source(tmp_path, source):
    assert run("approx", "--source", source, "--n", "4", "--out", str(tmp_path / "o"))[0] == 3


def test_approx_zero_cells(tmp_path):
    assert run("approx", "--source", "uniform 0 1 1", "--n", "0", "--out", str(tmp_path / "o"))[0] == 3


def test_approx_unreadable_step_file(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("x y\n")
    assert run("approx", "--source", f"step {bad}", "--n", "4", "--out", str(tmp_path / "o"))[0] == 2


def test_selftest_passes():
    code, out = run("selftest", "--cases", "20", "--cap", "8", "--seed", "3")
    assert code == 0
    assert "selftest passed" in out


def test_selftest_zero_cases():
    code, out = run("selftest", "--cases", "0")
    assert code == 0 and "0 checks" in out


def test_selftest_bad_h():
    assert run("selftest", "--h", "0")[0] == 3


def test_selftest_injected_fault_writes_reproducer(monkeypatch, tmp_path):
    real = flat_module.flat_distance

    def faulty(mu, nu, backend="tree", **kw):
        r = real(mu, nu, backend, **kw)
        if backend == "tree":
            return type(r)(r.value + 0.5, r.metric, r.backend)
        return r

    monkeypatch.setattr(flat_module, "flat_distance", faulty)
    monkeypatch.setattr(cli, "flat_distance", faulty)
    code, out = run("selftest", "--cases", "5", "--out-dir", str(tmp_path))
    assert code == 1
    assert "flat-tree~oracle" in out
    a, b = tmp_path / "counterexample_a.txt", tmp_path / "counterexample_b.txt"
    assert a.exists() and b.exists()
    _, tree = run("dist", str(a), str(b), "--metric", "flat", "--backend", "tree")
    _, array = run("dist", str(a), str(b), "--metric", "flat", "--backend", "array")
    assert float(tree) - float(array) == pytest.approx(0.5)


def test_module_entry_point(pair):
    proc = subprocess.run(
        [sys.executable, "-m", "flatmetric", "dist", *pair, "--metric", "radon"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "5\n"
