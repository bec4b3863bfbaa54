"""Command-line driver: subcommands and exit codes."""

import json
from pathlib import Path

import pcore
from pcore.cli import (
    EXIT_FAIL, EXIT_OK, EXIT_RUNTIME, EXIT_TYPE, EXIT_USAGE, main,
)

FIXTURES = Path(pcore.__file__).parent / "fixtures"
PCORE = str(FIXTURES / "source_routing.pcore")
STF = str(FIXTURES / "source_routing.stf")
UNION = str(FIXTURES / "option_union.pcore")
CP = str(FIXTURES / "source_routing_cp.json")


def test_check_ok(capsys):
    assert main(["check", PCORE]) == EXIT_OK
    assert "ok" in capsys.readouterr().out


def test_check_type_error(tmp_path, capsys):
    bad = tmp_path / "bad.pcore"
    bad.write_text("bit<8> x := true;\n")
    assert main(["check", str(bad)]) == EXIT_TYPE


def test_check_parse_error(tmp_path):
    bad = tmp_path / "bad.pcore"
    bad.write_text("const int = ;\n")
    assert main(["check", str(bad)]) == EXIT_TYPE


def test_check_dump_ast(capsys):
    assert main(["check", UNION, "--dump-ast"]) == EXIT_OK
    out = capsys.readouterr().out
    dump = out[: out.rindex(f"{UNION}: ok")]
    assert json.loads(dump)  # the dump preceding the ok line is valid JSON


def test_run_with_control_plane(capsys):
    code = main(["run", PCORE, "--packet", "03FF", "--port", "0",
                 "--control-plane", CP, "--json"])
    assert code == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["egress"] == 1 and result["output"] == "FF"


def test_run_without_rules_drops(capsys):
    code = main(["run", PCORE, "--packet", "03FF", "--json"])
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out)["dropped"] is True


def test_run_runtime_error(tmp_path):
    bad = tmp_path / "oob.pcore"
    bad.write_text("bit<8>[2] s;\n{} f() {s[5w32] := 1w8;}\n{} r := f();\n")
    assert main(["run", str(bad)]) == EXIT_RUNTIME


def test_stf_pass(capsys):
    assert main(["stf", PCORE, STF]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_stf_fail(tmp_path):
    script = tmp_path / "bad.stf"
    script.write_text("packet 0 03FF\nexpect 1 FF\n")  # no rule -> dropped
    assert main(["stf", PCORE, str(script)]) == EXIT_FAIL


def test_translate_unions(capsys):
    assert main(["translate-unions", UNION]) == EXIT_OK
    assert "tag" in capsys.readouterr().out


def test_diff_unions(capsys):
    assert main(["diff-unions", UNION]) == EXIT_OK
    assert main(["diff-unions", UNION, "--wrong-tag"]) == EXIT_FAIL


def test_gen(capsys):
    assert main(["gen", "--seed", "5"]) == EXIT_OK
    assert capsys.readouterr().out.strip()


def test_soundness(capsys):
    assert main(["soundness", "--n", "5"]) == EXIT_OK
    assert "0 failures" in capsys.readouterr().out


def test_usage_error():
    assert main(["frobnicate"]) == EXIT_USAGE


def test_missing_file():
    assert main(["check", "/nonexistent.pcore"]) == EXIT_USAGE
