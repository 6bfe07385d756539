"""
Integration tests for the fixture table harness.

Rows run through build -> compute -> compare; fixture contents are patched
where a test needs a controlled mismatch.
"""

import json
from concurrent.futures import ThreadPoolExecutor

import pytest

from src.app.main import main
from src.app.services.fixtures import format_multiset, parse_multiset
from src.app.workflows.tables import row_key, run_workflow

D8_ROW_B = {
    "id": "[8,3]",
    "tier": "core",
    "constructor": "D8",
    "mexc": "yes",
    "cl": "2",
    "dl": "2",
    "fitting_index": "-",
    "fitting_class": "-",
    "faithful": "M2(Q)",
    "one_by_one": "4:Q",
}


class TestTablesWorkflow:
    """Table reproduction over small fixture subsets."""

    @pytest.fixture
    def small_rows(self):
        return ["[6,1]", "[8,3]", "[24,3]"]

    def test_small_rows_match(self, small_rows):
        report = run_workflow({"tier": "core", "table": "all", "rows": small_rows})

        assert report["status"] == "pass"
        assert report["counts"]["match"] == 6
        assert report["mismatches"] == []
        assert [r["id"] for r in report["rows"] if r["table"] == "B"] == small_rows

    def test_computed_cells(self):
        report = run_workflow({"tier": "core", "table": "b", "rows": ["[24,3]"]})

        computed = report["rows"][0]["computed"]
        assert computed["mexc"] == "no"
        assert (computed["fitting_index"], computed["fitting_class"]) == ("3", "2")
        assert computed["cl"] == "inf"
        assert computed["faithful"] == "M2(Q(sqrt(-3)))"

    def test_table_a_subgroup_cells(self):
        report = run_workflow({"tier": "core", "table": "a", "rows": ["[12,4]", "[24,3]"]})

        cells = {r["id"]: r["computed"] for r in report["rows"]}
        assert cells["[12,4]"]["dihedral"] == "D6"
        assert cells["[24,3]"]["quaternion"] == "Q8"
        assert cells["[24,3]"]["spectrum"] == "1;2;3;4;6"

    def test_rows_without_constructor_are_skipped(self):
        report = run_workflow({"tier": "extended", "table": "a", "rows": ["[32,44]"]})

        assert report["rows"] == []
        assert report["skipped"] == [{"table": "A", "id": "[32,44]", "reason": "no constructor"}]
        assert report["status"] == "pass"

    def test_matrix_constructor_row(self):
        """[32,8] is built from 4x4 matrices over F_3 and matches both tables."""
        report = run_workflow({"tier": "core", "table": "all", "rows": ["[32,8]"]})

        assert report["status"] == "pass"
        assert report["skipped"] == []
        assert report["counts"]["match"] == 2
        cells = {r["table"]: r["computed"] for r in report["rows"]}
        assert cells["A"]["spectrum"] == "1;2;4;8"
        assert cells["B"]["faithful"] == "M2(H2)"
        assert cells["B"]["cl"] == "3"

    def test_bicyclic_faithful_component(self):
        """The faithful block of C3:Q16 comes from a pair with N/H = C2 x C2."""
        report = run_workflow({"tier": "core", "table": "b", "rows": ["[48,18]"]})

        assert report["status"] == "pass"
        assert report["undecided"] == []
        computed = report["rows"][0]["computed"]
        assert computed["faithful"] == "M2(H3)"
        assert computed["mexc"] == "yes"

    def test_core_tier_passes(self):
        report = run_workflow({"tier": "core", "table": "all"})

        assert report["status"] == "pass"
        assert report["skipped"] == []
        assert report["undecided"] == []
        assert report["counts"]["mismatch"] == report["counts"]["error"] == 0

    def test_mismatch_is_reported(self, mocker):
        wrong = dict(D8_ROW_B, mexc="no")
        mocker.patch("src.app.workflows.tables.load_fixture", return_value=[wrong])

        report = run_workflow({"tier": "core", "table": "b"})

        assert report["status"] == "fail"
        assert report["mismatches"] == [{"cell": "B[8,3].mexc", "expected": "no", "computed": "yes"}]
        assert report["counts"]["mismatch"] == 1

    def test_unbuildable_constructor(self, mocker):
        broken = dict(D8_ROW_B, constructor="D7")
        mocker.patch("src.app.workflows.tables.load_fixture", return_value=[broken])

        report = run_workflow({"tier": "core", "table": "b"})

        assert report["status"] == "fail"
        assert report["counts"]["error"] == 1
        assert report["mismatches"][0]["computed"].startswith("SYNTAX_ERROR")

    def test_parallel_rows_agree_with_serial(self, mocker, small_rows):
        serial = run_workflow({"tier": "core", "table": "b", "rows": small_rows})
        pool = mocker.patch("src.app.workflows.tables.ProcessPoolExecutor", side_effect=ThreadPoolExecutor)

        parallel = run_workflow({"tier": "core", "table": "b", "rows": small_rows, "workers": 2})

        pool.assert_called_once_with(max_workers=2)
        assert [r["computed"] for r in parallel["rows"]] == [r["computed"] for r in serial["rows"]]


class TestCells:
    def test_faithful_cell_uses_multiset_codec(self):
        counts = parse_multiset("2:M2(H3);M2(Q(i))")
        assert counts["M2(H3)"] == 2
        assert format_multiset(counts) == "2:M2(H3);M2(Q(i))"
        assert format_multiset(parse_multiset("-")) == "-"

    def test_row_order(self):
        ids = ["[24,3]", "[8,3]", "[24,11]", "[6,1]"]
        assert sorted(ids, key=row_key) == ["[6,1]", "[8,3]", "[24,3]", "[24,11]"]


def test_tables_command(capsys):
    """The tables subcommand exits 0 when every selected row matches."""
    code = main(["tables", "--table", "b", "--rows", "[6,1]", "[24,3]", "--json"])
    response = json.loads(capsys.readouterr().out)

    assert code == 0
    assert response["data"]["status"] == "pass"
    assert response["data"]["counts"]["match"] == 2


def test_tables_command_mismatch_exit_code(capsys, mocker):
    mocker.patch("src.app.workflows.tables.load_fixture", return_value=[dict(D8_ROW_B, cl="3")])

    assert main(["tables", "--table", "b", "--tsv"]) == 1
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "table\tid\tstatus\tconstructor"
    assert lines[-1] == "mismatch\tB[8,3].cl\t3\t2"
