import json
import os

import pytest

from conftest import BOOK4, LIBRARY
from qcflp.cli import main

GOAL = '(search("German","Essay",intermediate) == R) # W | W >= 0.65'
GENRE_STMT = f'(guessGenre({BOOK4}) -> "Essay") # 0.7'


def run(*argv):
    return main(list(argv))


def test_check_ok():
    assert run("check", str(LIBRARY)) == 0


def test_check_diagnostics(tmp_path, capsys):
    bad = tmp_path / "bad.qcflp"
    bad.write_text("f(X, X) --> X\n")
    assert run("check", str(bad)) == 1
    err = capsys.readouterr().err
    assert "non-linear" in err and "bad.qcflp" in err


def test_missing_file_exit_2():
    assert run("check", "/nonexistent/path.qcflp") == 2


def test_transform_writes_output_and_map(tmp_path):
    out = tmp_path / "library.cflp"
    assert run("transform", str(LIBRARY), "-o", str(out), "--emit-map") == 0
    text = out.read_text()
    assert "search'" in text
    entries = [json.loads(line) for line in
               (tmp_path / "library.cflp.map").read_text().splitlines()]
    assert len(entries) == 24
    assert entries[0]["qual_vars"]


def test_transform_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.cflp", tmp_path / "b.cflp"
    assert run("transform", str(LIBRARY), "-o", str(a)) == 0
    assert run("transform", str(LIBRARY), "-o", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_transform_seed_env(tmp_path, monkeypatch):
    a, b = tmp_path / "a.cflp", tmp_path / "b.cflp"
    monkeypatch.setenv("QCFLP_SEED", "3")
    assert run("transform", str(LIBRARY), "-o", str(a)) == 0
    monkeypatch.setenv("QCFLP_SEED", "0")
    assert run("transform", str(LIBRARY), "-o", str(b)) == 0
    assert a.read_bytes() != b.read_bytes()


def test_transform_of_transformed_rejected(tmp_path, capsys):
    out = tmp_path / "library.cflp"
    assert run("transform", str(LIBRARY), "-o", str(out)) == 0
    assert run("transform", str(out)) == 1
    assert "primed" in capsys.readouterr().err


def test_transform_goal_simplified(capsys):
    assert run("transform", str(LIBRARY), "--goal", GOAL, "--simplify",
               "-o", os.devnull) == 0
    out = capsys.readouterr().out.strip().splitlines()[-1]
    assert out == 'qVal(W), W >= 0.65, search\'("German", "Essay", intermediate, W) == R'


def test_solve_library(capsys):
    assert run("solve", str(LIBRARY), "--goal", GOAL) == 0
    out = capsys.readouterr().out
    assert "{ R -> 4 } { W in [0.65, 0.7] }" in out


def test_solve_json(capsys):
    assert run("solve", str(LIBRARY), "--goal", GOAL, "--json") == 0
    rec = json.loads(capsys.readouterr().out.strip().splitlines()[0])
    assert rec["subst"] == {"R": "4"}
    assert rec["qual"]["W"]["lo"] == pytest.approx(0.65)
    assert rec["qual"]["W"]["hi"] == pytest.approx(0.7)


def test_solve_threshold_too_high():
    goal = '(search("German","Essay",intermediate) == R) # W | W >= 0.71'
    assert run("solve", str(LIBRARY), "--goal", goal) == 1


def test_solve_answer_limit(capsys):
    goal = f'(guessGenre({BOOK4}) == G) # W'
    assert run("solve", str(LIBRARY), "--goal", goal,
               "--answers", "1", "--depth", "6") == 0
    out = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
    assert len(out) == 1


def test_solve_flagged_only(tmp_path):
    src = tmp_path / "resid.qcflp"
    src.write_text("f(X) --> true <== X /= a\n")
    assert run("solve", str(src), "--goal", "f(Y) == true # W") == 3


def test_prove_and_check_certificate(tmp_path, capsys):
    cert = tmp_path / "genre.proof"
    assert run("prove", str(LIBRARY), "--statement", GENRE_STMT,
               "--depth", "5", "-o", str(cert)) == 0
    assert run("prove", str(LIBRARY), "--check", str(cert)) == 0
    assert "valid" in capsys.readouterr().out


def test_prove_not_found():
    beyond = f'(guessGenre({BOOK4}) -> "Essay") # 0.75'
    assert run("prove", str(LIBRARY), "--statement", beyond, "--depth", "6") == 1


def test_tampered_certificate_rejected(tmp_path):
    cert = tmp_path / "genre.proof"
    run("prove", str(LIBRARY), "--statement", GENRE_STMT,
        "--depth", "5", "-o", str(cert))
    tampered = cert.read_text().replace("# 0.7", "# 0.95")
    bad = tmp_path / "tampered.proof"
    bad.write_text(tampered)
    assert run("prove", str(LIBRARY), "--check", str(bad)) == 1


def test_oracle_roundtrip(tmp_path, capsys):
    src = tmp_path / "chain.qcflp"
    src.write_text("f -0.9-> true\ng -0.8-> f\n")
    assert run("oracle", str(src), "--k", "4", "--depth", "6") == 0
    assert "0 mismatches" in capsys.readouterr().out
    # dropping the first declared qualification bound is caught
    assert run("oracle", str(src), "--k", "4", "--depth", "6",
               "--mutate", "0") == 1
    # dropping a chained factor is caught too
    assert run("oracle", str(src), "--k", "4", "--depth", "6",
               "--mutate", "4") == 1


def test_oracle_guardrail(tmp_path):
    src = tmp_path / "big.qcflp"
    src.write_text("\n".join(f"f{i} --> true" for i in range(30)))
    assert run("oracle", str(src)) == 4


def test_unknown_domain():
    assert run("check", str(LIBRARY), "--qdom", "zzz") == 2


def test_solve_product_domain(tmp_path, capsys):
    src = tmp_path / "pairs.qcflp"
    src.write_text("m -(0.9,0.8)-> true\nn -(0.7,1)-> m\n")
    assert run("solve", str(src), "--qdom", "uxu",
               "--goal", "n == true # W | W >= (0.5,0.5)") == 0
    out = capsys.readouterr().out
    assert "W.1 in [0.5, 0.63]" in out and "W.2 in [0.5, 0.8]" in out


def test_solve_simplify_same_answer(capsys):
    assert run("solve", str(LIBRARY), "--goal", GOAL) == 0
    plain = capsys.readouterr().out
    assert run("solve", str(LIBRARY), "--goal", GOAL, "--simplify") == 0
    assert capsys.readouterr().out == plain
