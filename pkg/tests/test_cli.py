import hashlib
import io
import subprocess
import sys

import pytest

from ncphase.cli import SUBCOMMANDS, run
from ncphase.fock import OperatorMatrix


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def report(text):
    return dict(line.split(" = ", 1) for line in text.splitlines() if " = " in line)


def test_star_example():
    code, out, _ = call("star", "--theta", "0.5", "--f", "x1", "--g", "x2")
    assert code == 0
    rep = report(out)
    assert rep["commutator.constant"] == "0+0.5i"
    assert rep["command"] == "star" and rep["config.theta"] == "0.5"


def test_header_echoes_config():
    _, out, _ = call("qosc", "--q", "0.5", "--cutoff", "6")
    lines = out.splitlines()
    assert lines[0] == "command = qosc"
    assert "config.cutoff = 6" in lines and "config.q = 0.5" in lines and "config.format = structured" in lines
    assert report(out)["levels"] == "0.0 1.0 0.5 0.75 0.625 0.6875"


def test_witten_example():
    code, out, _ = call("witten", "--cutoff", "16", "--beta", "1")
    rep = report(out)
    assert code == 0
    assert complex(rep["index[beta=1.0]"].replace("i", "j")) == pytest.approx(1.0, abs=1e-8)
    assert rep["graded_kernel"] == "1" and rep["dim_ker(Q-Q+)"] == "1"


def test_ym_vacuum_example():
    code, out, _ = call("ym", "--vacuum", "--theta", "1", "--cutoff", "12")
    assert code == 0
    assert float(report(out)["action"]) <= 1e-8


def test_ym_with_field():
    code, out, _ = call("ym", "--theta", "1", "--cutoff", "10", "--A", "0.1*x1^2", "--A", "0.2*x1*x2")
    rep = report(out)
    assert code == 0 and float(rep["action"]) > 0
    assert float(rep["gauge_invariance_residual"]) <= 1e-9


def test_bracket_and_swfield():
    _, out, _ = call("bracket", "--theta", "0.25", "--f", "x1", "--g", "x2^2")
    assert report(out)["moyal_bracket"] == "(0+0.5i)*x2"
    _, out, _ = call("swfield", "--theta", "0.25", "--A", "x1*x2", "--A", "x1^2 - 0.5*x2", "--convention", "real")
    assert report(out)["F[1,2]"] == "-0.5*x1^2 + x1 - 0.125*x2"


def test_phase_space_bivector():
    code, out, _ = call("star", "--bivector", "2 1", "--phase", "--f", "x1", "--g", "p1")
    assert code == 0 and report(out)["commutator.constant"] == "0+1i"


def test_quantize_writes_matrix(tmp_path):
    path = tmp_path / "w.txt"
    code, out, _ = call("quantize", "--f", "x1*p1", "--cutoff", "4", "--out", str(path))
    assert code == 0 and report(out)["hermitian"] == "true"
    W = OperatorMatrix.loads(path.read_text())
    assert W.shape == (4, 4)


def test_quantize_composition_report():
    _, out, _ = call("quantize", "--f", "x1^2", "--g", "p1^2", "--cutoffs", "8", "24")
    rep = report(out)
    assert float(rep["composition_residual[24]"]) <= 1e-8


def test_bogoliubov_reports():
    _, out, _ = call("bogoliubov", "--squeeze", "0.3")
    rep = report(out)
    assert rep["oracle.preserves"] == "True"
    assert float(rep["condition[alpha*gamma+beta*delta^T]_max"]) == pytest.approx(0.636653582, abs=1e-6)
    code, out, _ = call("bogoliubov", "--transform", "1 1 0 0 1", "--q", "0.4")
    assert code == 0 and report(out)["q.conditions.hold"] == "True"
    code, out, _ = call("bogoliubov", "--draws", "10", "--q", "0.5")
    assert code == 0 and "draw[9]" in report(out)


def test_theta_modes_cli():
    _, out, _ = call("theta-modes", "--B", "2")
    val = complex(report(out)["[a^i,a^j][1,2]"].replace("i", "j"))
    assert val == pytest.approx(-0.75j, abs=1e-15)


def test_landau_and_braid():
    _, out, _ = call("landau", "--B", "2", "--cutoff", "12")
    rep = report(out)
    assert float(rep["level_spacing_residual"]) <= 1e-8
    assert float(rep["commutator_residual"]) <= 1e-8
    code, out, _ = call("landau", "braid", "--theta", "0.3", "--cutoff", "64")
    assert code == 0 and float(report(out)["error"]) <= 1e-3
    code, out, _ = call("braid", "--theta", "0.1")
    assert code == 0 and float(report(out)["error"]) <= 1e-3


def test_gaussian_cli(tmp_path):
    h = tmp_path / "h.txt"
    h.write_text("3 0\n0 5\n")
    code, out, _ = call("gaussian", "--stat", "fermi", "--h", str(h))
    assert code == 0 and report(out)["Z_ratio"] == "15+0i"
    _, out, _ = call("gaussian", "--h", "2", "--J", "1")
    assert complex(report(out)["log_Z"].replace("i", "j")).real == pytest.approx(0.5 - 0.6931471805599453)
    _, out, _ = call("gaussian", "--stat", "fermi", "--h", "1 0;0 1", "--green", "0,0,1,1,1,0,0,1")
    assert report(out)["green"] == "-1+0i"


def test_human_format():
    _, out, _ = call("qosc", "--format", "human")
    assert out.splitlines()[0].startswith("command") and " : " in out


# --- exit codes -----------------------------------------------------------

@pytest.mark.parametrize(
    "argv",
    [
        ("star", "--theta", "0.5", "--f", "x3"),
        ("star", "--theta", "0.5", "--f", "x1 +"),
        ("star", "--bivector", "3 1"),
        ("star", "--f", "x1"),
        ("gaussian", "--h", "1 2;3"),
        ("gaussian", "--h", "1 0;0 1", "--green", "0,a"),
        ("gaussian", "--h", "1 0;0 1", "--green", "0,0,5,1"),
        ("bogoliubov", "--transform", "2 1 0"),
        ("star", "--no-such-flag"),
        ("nonsense",),
    ],
)
def test_input_errors_exit_2(argv):
    code, _, _ = call(*argv)
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("ym", "--theta", "0", "--cutoff", "6"),
        ("braid", "--theta", "3", "--cutoff", "8"),
        ("qosc", "--q", "1.5", "--cutoff", "5"),
        ("gaussian", "--h", "1 0;0 -1"),
        ("landau", "--B", "-1"),
    ],
)
def test_domain_errors_exit_1(argv):
    code, _, err = call(*argv)
    assert code == 1 and err.startswith("domain error")


# --- determinism and selftests --------------------------------------------

@pytest.mark.parametrize(
    "argv",
    [
        ("ym", "--theta", "1", "--cutoff", "8", "--A", "0.1*x1", "--A", "0.1*x2^2"),
        ("bogoliubov", "--draws", "20", "--q", "0.3"),
        ("witten", "--cutoff", "10", "--beta", "0.1", "1", "5", "--pairing"),
    ],
)
def test_deterministic(argv):
    hashes = {hashlib.sha256(call(*argv)[1].encode()).hexdigest() for _ in range(3)}
    assert len(hashes) == 1


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_selftest(cmd):
    code, out, _ = call(cmd, "--selftest")
    assert code == 0
    assert "FAIL" not in out and "selftest[" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ncphase", "star", "--theta", "0.5", "--f", "x1", "--g", "x2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "commutator.constant = 0+0.5i" in proc.stdout
