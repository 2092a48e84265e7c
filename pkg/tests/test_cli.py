import json
import subprocess
import sys

from dnftaut.cli import main
from dnftaut.dnf import Dnf, format_dnf


def test_bound(capsys, tmp_path):
    assert main(["bound", "--n", "6", "--u", "6", "--csv", str(tmp_path / "b.csv")]) == 0
    assert "k <= 4" in capsys.readouterr().out
    assert (tmp_path / "b.csv").read_text().startswith("k,feasible")


def test_search_and_store(capsys, tmp_path):
    store = str(tmp_path / "s.jsonl")
    assert main(["search", "--n", "5", "--u", "3", "--store", store]) == 0
    out = capsys.readouterr().out
    assert "k=3: UNSAT" in out and "k=2 bound=3" in out and "proven_optimal=True" in out
    main(["search", "--n", "5", "--u", "3", "--store", store])
    assert "(stored result)" in capsys.readouterr().out


def test_search_with_group(capsys):
    assert main(["search", "--n", "4", "--u", "4", "--group", "symmetric"]) == 0
    assert "k=2 bound=2" in capsys.readouterr().out


def test_exact(capsys):
    main(["exact", "--n", "3", "--k", "1"])
    assert "UNSAT" in capsys.readouterr().out


def test_verify(capsys, tmp_path):
    path = tmp_path / "d.dnf"
    path.write_text(format_dnf(Dnf.from_literal_lists(2, [[1], [2], [-1, -2]])))
    assert main(["verify", "--dnf", str(path), "--k", "1", "--u", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True
    assert main(["verify", "--dnf", str(path), "--k", "2", "--u", "2"]) == 1


def test_encode(tmp_path):
    out = tmp_path / "x.cnf"
    assert main(["encode", "--n", "4", "--u", "4", "--k", "2", "-o", str(out)]) == 0
    assert "p cnf" in out.read_text()


def test_oracle(capsys):
    main(["oracle", "--n", "3", "--u", "1", "--k", "1"])
    assert json.loads(capsys.readouterr().out)["exists"] is False


def test_table(capsys, tmp_path):
    assert main(["table", "--which", "plain", "--n-max", "4", "--csv", str(tmp_path / "t.csv")]) == 0
    out = capsys.readouterr().out
    assert "n=4 u=4: agree" in out


def test_bad_arguments(capsys):
    assert main(["search", "--n", "3", "--u", "5"]) == 2
    assert "error:" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dnftaut", "bound", "--n", "3", "--u", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "k <= 1" in proc.stdout
