import json
import subprocess
import sys

import pytest

from raddirac import cli
from raddirac.eigensolve import NumericalFailure
from raddirac.potentials import QuantumState, coulomb_exact_energy


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_hydrogen(capsys):
    code, out, err = run(["solve", "--potential", "coulomb", "--Z", "1", "--kappa", "-1", "--adapt",
                          "--n-states", "1"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["schema"] == 1
    assert rec["config"]["c"] == pytest.approx(137.035999084)
    assert rec["config"]["beta"] == "adaptive"
    E = rec["energies"][0]
    assert abs(E - coulomb_exact_energy(1.0, QuantumState(1, -1))) < 1e-10
    assert "state 0" in err


def test_solve_harmonic(capsys):
    code, out, _ = run(["solve", "--potential", "harmonic", "--kappa", "-1", "--n-states", "1",
                        "--mode", "idom"], capsys)
    assert code == 0
    assert json.loads(out)["energies"][0] == pytest.approx(1.4999950, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ["solve", "--potential", "coulomb", "--Z", "1", "--kappa", "0"],
    ["solve", "--potential", "coulomb", "--Z", "200", "--kappa", "-1"],
    ["solve", "--potential", "coulomb"],
    ["solve", "--potential", "square", "--Z", "1"],
    ["solve", "--Z", "1"],
    ["solve", "--potential", "coulomb", "--Z", "1", "--n-states", "0"],
    ["solve", "--potential", "coulomb", "--Z", "1", "--beta", "1", "--adapt"],
    ["critical-lambda", "--bracket", "1.3,1.0"],
    ["bench"],
    ["no-such-command"],
])
def test_config_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["solve", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert cli.main(["solve", "--config", str(bad)]) == 2


@pytest.mark.parametrize("exc", [NumericalFailure("boom"), FloatingPointError("nan"),
                                 __import__("numpy").linalg.LinAlgError("singular")])
def test_numerical_failure_exit_3(monkeypatch, capsys, exc):
    def fail(*a, **k):
        raise exc
    monkeypatch.setattr(cli, "solve_states", fail)
    code, _, err = run(["solve", "--potential", "coulomb", "--Z", "1"], capsys)
    assert code == 3 and "numerical failure" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"potential": {"kind": "coulomb", "Z": 2.0}, "kappa": -1, "n_states": 2,
                               "N1": 30, "N2": 30}))
    code, out, _ = run(["solve", "--config", str(cfg), "--n-states", "1"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["config"]["n_states"] == 1 and rec["config"]["potential"]["Z"] == 2.0
    assert len(rec["energies"]) == 1


def test_csv_output_is_reproducible(tmp_path, capsys):
    argv = ["bench", "--table", "harmonic", "--format", "csv"]
    code1, out1, _ = run(argv, capsys)
    code2, out2, _ = run(argv, capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.splitlines()[0].startswith("n,kappa,energy,published,delta")


def test_solve_csv_and_dump(tmp_path, capsys):
    out = tmp_path / "e.csv"
    dump = tmp_path / "m.txt"
    argv = ["solve", "--potential", "coulomb", "--Z", "1", "--n-states", "2", "--format", "csv",
            "--out", str(out), "--dump-matrices", str(dump)]
    assert cli.main(argv) == 0
    first = out.read_text()
    assert first.splitlines()[0] == "index,energy,beta,residual"
    assert cli.main(argv) == 0
    assert out.read_text() == first
    assert dump.read_text().startswith("# A ")


def test_study_writes_named_files(tmp_path, capsys):
    code = cli.main(["pollution", "--k-lower", "30,60", "--out", str(tmp_path)])
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert len(names) == 2 and all(n.startswith("pollution-coulomb-") for n in names)
    rec = json.loads(next(p for p in tmp_path.iterdir() if p.suffix == ".json").read_text())
    assert rec["schema"] == 1 and rec["provenance"]["constants"]["c"] == pytest.approx(137.035999084)


def test_int_list():
    assert cli.int_list("30,45") == [30, 45]
    assert cli.int_list("20..60") == [20, 30, 40, 50, 60]
    assert cli.int_list("100..200:50") == [100, 150, 200]
    assert cli.int_list(7) == [7]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "raddirac", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
