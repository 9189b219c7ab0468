import pytest

from cli import run
from conftest import data_file


def test_subtype(capsys):
    assert run(["subtype", "a & b", "a"]) == 0
    assert capsys.readouterr().out == "yes\n"
    assert run(["subtype", "a", "a & b"]) == 1
    assert capsys.readouterr().out == "no\n"


def test_equal(capsys):
    assert run(["equal", "(a -> b) & (a -> c)", "a -> b & c"]) == 0
    assert run(["equal", "a -> b", "b -> a"]) == 1
    assert capsys.readouterr().out == "yes\nno\n"


def test_organize(capsys):
    assert run(["organize", "a -> b & c"]) == 0
    assert capsys.readouterr().out == "(a -> b) & (a -> c)\n"


def test_parse_error_is_status_2(capsys):
    assert run(["subtype", "a ->", "b"]) == 2
    assert capsys.readouterr().out == ""


def test_missing_file_is_status_2(tmp_path):
    assert run(["verify", str(tmp_path / "none.constraints"), str(tmp_path / "none.subst")]) == 2


def test_global_flags(capsys):
    assert run(["--log-level", "debug", "--seed", "3", "--jobs", "1", "subtype", "a", "a"]) == 0
    assert capsys.readouterr().out == "yes\n"


# ─── Constraints ─────────────────────────────────────────────────────────────

def test_verify(capsys):
    assert run(["verify", data_file("self_application.constraints"), data_file("self_application.subst")]) == 0
    assert capsys.readouterr().out == "yes (1 constraints hold)\n"
    assert run(["verify", data_file("towers.constraints"), data_file("towers.subst")]) == 0


def test_verify_reports_failing_constraints(tmp_path, capsys):
    subst = tmp_path / "wrong.subst"
    subst.write_text("'alpha := a\n")
    assert run(["verify", data_file("self_application.constraints"), str(subst)]) == 1
    out = capsys.readouterr().out
    assert out.startswith("no\n")
    assert "constraint 1 fails: 'alpha <= 'alpha -> a" in out


def test_match(capsys):
    assert run(["match", data_file("sat.cnf")]) == 0
    assert ": sat x1=" in capsys.readouterr().out
    assert run(["match", data_file("unsat.cnf")]) == 1
    assert capsys.readouterr().out.endswith(": unsat\n")


def test_match_in_parallel_with_the_oracle(capsys):
    status = run(["--jobs", "2", "match", data_file("sat.cnf"), data_file("unsat.cnf"), "--oracle"])
    assert status == 1
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert "sat.cnf: sat" in lines[0]
    assert lines[1].endswith("unsat.cnf: unsat")


def test_match_single_constant(capsys):
    assert run(["match", "--single-constant", data_file("sat.cnf")]) == 0


def test_rank1(tmp_path, capsys):
    out_file = tmp_path / "solution.subst"
    assert run(["rank1", data_file("self_application.constraints"), "-o", str(out_file)]) == 0
    assert capsys.readouterr().out == "'alpha := a & (a -> a)\n"
    assert run(["verify", data_file("self_application.constraints"), str(out_file)]) == 0


def test_rank1_without_solution(tmp_path, capsys):
    cs = tmp_path / "clash.constraints"
    cs.write_text("a <= b\n")
    assert run(["rank1", str(cs)]) == 1
    assert capsys.readouterr().out == "no solution within budget\n"


def test_axioms(capsys):
    assert run(["axioms", "--schema", "AB", "--count", "50"]) == 0
    assert capsys.readouterr().out == "AB: ok (50 instances)\n"


# ─── Games and reductions ────────────────────────────────────────────────────

def test_solve_game(capsys):
    assert run(["solve-game", data_file("spiral2.tiling")]) == 0
    out = capsys.readouterr().out
    assert "strategy depth 10" in out
    assert "start: Constructor plays b" in out
    assert run(["solve-game", data_file("spiral1.tiling")]) == 1
    assert capsys.readouterr().out == "Constructor has no winning strategy\n"


def test_solve_game_with_a_horizon(capsys):
    assert run(["solve-game", data_file("spiral2.tiling"), "--horizon", "13"]) == 1


@pytest.mark.parametrize("variant", ["ct", "ct-prime"])
def test_reduction_pipeline(variant, tmp_path, capsys):
    tiling = data_file("trivial.tiling")
    cs, subst = tmp_path / "game.constraints", tmp_path / "game.subst"
    assert run(["reduce", tiling, "--variant", variant, "-o", str(cs)]) == 0
    assert run(["compile-strategy", tiling, "--variant", variant, "-o", str(subst)]) == 0
    assert run(["verify", str(cs), str(subst)]) == 0
    capsys.readouterr()
    assert run(["play", tiling, str(subst), "--variant", variant]) == 0
    assert capsys.readouterr().out == "Constructor wins (late move): a | b a\n"


def test_reduce_to_one_constant(capsys):
    assert run(["reduce", data_file("trivial.tiling"), "--unary"]) == 0
    out = capsys.readouterr().out
    assert "bullet -> bullet" in out
    assert len(out.splitlines()) == 3


def test_compile_strategy_for_a_lost_game(capsys):
    assert run(["compile-strategy", data_file("spiral1.tiling")]) == 1


def test_play_variants(tmp_path, capsys):
    tiling = data_file("trivial.tiling")
    subst = tmp_path / "game.subst"
    assert run(["compile-strategy", tiling, "-o", str(subst)]) == 0
    capsys.readouterr()
    assert run(["play", tiling, str(subst), "--script", "b"]) == 0
    assert capsys.readouterr().out == "Constructor wins (finished): a | b b\n"
    assert run(["play", tiling, str(subst), "--spoiler", "exhaustive"]) == 0
    assert capsys.readouterr().out == (
        "Constructor wins all 2 plays (1 finished, 1 late move); longest adds 2 tiles\n"
    )
    assert run(["--seed", "5", "play", tiling, str(subst), "--spoiler", "random"]) == 0
    assert capsys.readouterr().out.startswith("Constructor wins (")


def test_play_with_an_exhausted_script(tmp_path):
    tiling = data_file("trivial.tiling")
    subst = tmp_path / "game.subst"
    run(["compile-strategy", tiling, "-o", str(subst)])
    assert run(["play", tiling, str(subst), "--script", ""]) == 2


def test_bundled_files_are_found_by_name(capsys):
    assert run(["solve-game", "trivial.tiling"]) == 0
    assert "Constructor plays b" in capsys.readouterr().out
