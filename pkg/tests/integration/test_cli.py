"""
End-to-end tests of the excomp command line: argument parsing, dispatch,
rendering and exit codes.
"""

import json
from collections import Counter
from pathlib import Path

import pytest

from src.app.main import main

GOLDEN = json.loads((Path(__file__).resolve().parents[1] / "data" / "golden_cli.json").read_text(encoding="utf-8"))


def run_json(capsys, *argv):
    """Run the CLI with --json and return (exit_code, envelope)."""
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_decompose_quaternion_group(capsys):
    """Q8 gives four copies of Q and the Hamilton quaternions."""
    code, response = run_json(capsys, "decompose", "Q8")

    assert code == 0
    assert response["status"] == "ok"
    assert response["data"]["order"] == 8
    assert Counter(c["name"] for c in response["data"]["components"]) == Counter({"Q": 4, "H2": 1})
    assert response["meta"]["command"] == "decompose"
    assert "duration_s" in response["meta"]


def test_decompose_over_gaussian_field(capsys):
    code, response = run_json(capsys, "decompose", "Q8", "--field", "-1")

    assert code == 0
    assert response["data"]["field"] == "Q(sqrt(-1))"
    assert Counter(c["name"] for c in response["data"]["components"]) == Counter({"Q(i)": 4, "M2(Q(i))": 1})


def test_decompose_tsv_output(capsys):
    assert main(["decompose", "D6", "--tsv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t") == ["name", "dim", "matrix_size", "center", "classification", "faithful", "copies"]
    assert len(lines) == 4


def test_mexc_report(capsys):
    code, response = run_json(capsys, "mexc", "C5:C8(2)", "--report")

    assert code == 0
    assert response["data"]["mexc"]["verdict"] == "fails"
    assert response["data"]["characterisations"]["clauses"]["di_divides_4"] is True


@pytest.mark.parametrize(
    "argv,key,expected",
    [
        (["vcd", "--matrix-size", "2"], "vcd", 1),
        (["vcd", "--r1", "0", "--r2", "0", "--s", "1", "--n", "1", "--d", "2"], "vcd", 3),
        (["din", "--r1", "0", "--r2", "1", "--s", "0", "--n", "2", "--d", "1"], "di", 2),
        (["din", "--matrix-size", "3"], "di", 3),
        (["good", "--matrix-size", "2"], "good", "good"),
        (["vql", "--symbol=-1,-1", "--matrix-size", "2"], "vql", "yes"),
        (["vql", "--tag", "H2"], "vql", "no"),
    ],
)
def test_algebra_invariants(capsys, argv, key, expected):
    code, response = run_json(capsys, *argv)

    assert code == 0
    assert response["data"][key] == expected


def test_classify_algebra(capsys):
    code, response = run_json(capsys, "classify-algebra", "--center", "-7", "--matrix-size", "2")

    assert code == 0
    assert response["data"]["algebra"] == "M2(Q(sqrt(-7)))"
    assert response["data"]["exceptional"] is True


def test_undecided_goodness_exit_code(capsys):
    assert main(["good", "--tag", "zeta8_minus3"]) == 3
    assert "undecided" in capsys.readouterr().out


def test_embed_quadratic(capsys):
    code, response = run_json(capsys, "embed", "--mode", "quadratic", "--d", "2", "--symbol", "1,3")

    assert code == 0
    assert response["data"]["embeds"] is False
    assert response["data"]["agrees"] is True


def test_embed_zassenhaus(capsys):
    code, response = run_json(capsys, "embed", "--group", "D12", "--ambient", "I2")

    assert code == 0
    assert response["data"]["verdict"] == "conjugate_into"
    assert response["data"]["witness"] == "[48,29]"


def test_embed_imprimitive(capsys):
    code, response = run_json(capsys, "embed", "--mode", "imprimitive", "--ambient", "I3")

    assert code == 0
    assert response["data"]["order"] == 72
    assert response["data"]["fixture"]["spanning_id"] == "[72,30]"


def test_vahlen_check(capsys):
    zero = ",".join(["0"] * 8)
    one = ",".join(["1"] + ["0"] * 7)
    minus_one = ",".join(["-1"] + ["0"] * 7)
    code, response = run_json(
        capsys,
        "vahlen-check", "--u=-1", "--v=-1",
        "--entries", f"{zero};{one};{minus_one};{zero}",
        "--level", "2",
        "--point", "0,0,0,0,2",
    )

    assert code == 0
    data = response["data"]
    assert data["member"] is True
    assert data["congruence_member"] is False
    assert data["image"] == ["0", "0", "0", "0", "1/2"]


def test_torsion_level(capsys):
    code, response = run_json(capsys, "torsion-level", "--u=-1", "--v=-1")

    assert code == 0
    assert response["data"] == {"u": -1, "v": -1, "bound": 30, "prime": 31}


class TestInputErrors:
    """Bad input exits with code 2 and a structured error."""

    def test_group_spec_syntax_error(self, capsys):
        code, response = run_json(capsys, "decompose", "C3y")

        assert code == 2
        assert response["status"] == "error"
        assert response["meta"]["error_code"] == "SYNTAX_ERROR"
        assert response["meta"]["position"] == 2

    def test_plain_error_rendering(self, capsys):
        assert main(["mexc", "D7"]) == 2
        assert capsys.readouterr().out.startswith("error [SYNTAX_ERROR]")

    def test_validation_error(self, capsys):
        code, response = run_json(capsys, "decompose", "Q8", "--field", "3")

        assert code == 2
        assert response["meta"]["error_code"] == "VALIDATION_ERROR"
        assert "field" in response["data"]["fields"]

    def test_boundary_point(self, capsys):
        identity = ";".join([",".join(["1"] + ["0"] * 7), ",".join(["0"] * 8), ",".join(["0"] * 8), ",".join(["1"] + ["0"] * 7)])
        code, response = run_json(capsys, "vahlen-check", "--u=-1", "--v=-1", "--entries", identity, "--point", "0,0,0,0,0")

        assert code == 2
        assert response["meta"]["error_code"] == "BOUNDARY_POINT"

    def test_unknown_subcommand(self, capsys):
        assert main(["factorize"]) == 2


@pytest.mark.parametrize("case", GOLDEN, ids=lambda c: " ".join(c["argv"]))
def test_golden_outputs(capsys, case):
    """Envelope data matches the stored output; timings are not compared."""
    code, response = run_json(capsys, *case["argv"])

    assert code == case["exit_code"]
    assert response["data"] == case["data"]
