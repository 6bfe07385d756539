"""
Reproduction harness for the subgroup table (A) and the component table (B).

The harness is a chain of node functions over a payload dict, in the same
shape as the command workflow: load the fixture rows, build each group from
its constructor expression, compute the row's cells, compare them with the
fixture, and assemble a report sorted by row id. Rows are independent, so they
can be evaluated in a process pool.
"""

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Tuple

from ..errors import AlgebraError, UndecidedError
from ..services.fixtures import format_list, format_multiset, load_fixture, parse_multiset, split_list
from ..services.group_spec import build
from ..services.groups import (
    FiniteGroup,
    derived_length,
    fitting_subgroup,
    nilpotency_class,
    spectrum,
    subgroup_embeds,
)
from ..services.invariants import Verdict, mexc_check
from ..services.quaternions import Classification
from ..services.subgroup_analysis import catalog_group, type_constructor
from ..services.wedderburn import decompose
from ..settings import get_settings

logger = logging.getLogger(__name__)

UNDECIDED_CELL = "undecided"
INFINITE = "inf"

# Subgroup families of the subgroup table, in column order.
SUBGROUP_FAMILIES: Dict[str, Tuple[str, ...]] = {
    "quaternion": ("Q8", "Q12", "Q16", "Q20", "Q24"),
    "linear": ("SL2F3", "SU2F3", "SL2F5"),
    "dihedral": ("D6", "D8", "D12"),
}

TABLE_FIXTURES = {"A": "tableA", "B": "tableB"}
TABLE_A_CELLS = ("spectrum", "quaternion", "linear", "dihedral")
TABLE_B_CELLS = ("mexc", "cl", "dl", "fitting_index", "fitting_class", "faithful", "one_by_one")
MULTISET_CELLS = frozenset({"faithful", "one_by_one"})


def row_key(row_id: str) -> Tuple[int, ...]:
    """Numeric sort key of an id such as ``[24,3]``."""
    return tuple(int(part) for part in row_id.strip("[]").split(","))


# ---------------------------------------------------------------------------
# Nodes
# ---------------------------------------------------------------------------

def load_fixture_node(payload: Dict[str, Any]) -> Dict[str, Any]:
    """Select the fixture rows to run and set aside rows without a constructor."""
    tier = payload.get("tier", "core")
    tables = ("A", "B") if payload.get("table", "all") == "all" else (payload["table"].upper(),)
    wanted = set(payload.get("rows") or [])
    jobs: List[Dict[str, Any]] = []
    skipped: List[Dict[str, str]] = []
    for table in tables:
        cells = TABLE_A_CELLS if table == "A" else TABLE_B_CELLS
        for fixture_row in load_fixture(TABLE_FIXTURES[table], tier):
            row_id = fixture_row["id"]
            if wanted and row_id not in wanted:
                continue
            constructor = fixture_row.get("constructor", "")
            if constructor in ("", "-"):
                skipped.append({"table": table, "id": row_id, "reason": "no constructor"})
                continue
            jobs.append({
                "table": table,
                "id": row_id,
                "constructor": constructor,
                "expected": {cell: fixture_row.get(cell, "-") for cell in cells},
                "budget": payload.get("budget"),
            })
    payload["jobs"] = jobs
    payload["skipped"] = skipped
    logger.info(f"tables: {len(jobs)} rows to run, {len(skipped)} skipped (tier {tier})")
    return payload


def build_group_node(row: Dict[str, Any]) -> Dict[str, Any]:
    try:
        row["group"] = build(row["constructor"], cap=get_settings().matrix_element_cap)
    except AlgebraError as e:
        logger.error(f"{row['table']}{row['id']}: cannot build {row['constructor']!r}: {e}")
        row["error"] = f"{e.error_code}: {e}"
    return row


def _subgroup_family(G: FiniteGroup, family: str, budget: Optional[int]) -> str:
    found = []
    for name in SUBGROUP_FAMILIES[family]:
        H = catalog_group(type_constructor(name))
        if H.order >= G.order or G.order % H.order:
            continue
        if subgroup_embeds(H, G, budget):
            found.append(name)
    return format_list(found)


def _table_a_cells(G: FiniteGroup, budget: Optional[int]) -> Dict[str, str]:
    cells = {"spectrum": format_list([str(k) for k in sorted(spectrum(G))])}
    for family in SUBGROUP_FAMILIES:
        try:
            cells[family] = _subgroup_family(G, family, budget)
        except UndecidedError as e:
            logger.warning(f"{G.name}: {family} subgroups undecided: {e}")
            cells[family] = UNDECIDED_CELL
    return cells


def _optional_int(value: Optional[int]) -> str:
    return INFINITE if value is None else str(value)


def _table_b_cells(G: FiniteGroup) -> Dict[str, str]:
    decomposition = decompose(G)
    identified = decomposition.is_identified()
    mexc = mexc_check(G)
    F = fitting_subgroup(G)
    faithful = Counter(
        c.name
        for c in decomposition.faithful()
        if c.descriptor.matrix_size == 2 and c.classification == Classification.EXCEPTIONAL_MATRIX
    )
    one_by_one = Counter(c.name for c in decomposition if c.descriptor.matrix_size == 1)
    fitting_class = nilpotency_class(G, F)
    return {
        "mexc": UNDECIDED_CELL if mexc.verdict == Verdict.UNDECIDED else ("yes" if mexc.holds else "no"),
        "cl": _optional_int(nilpotency_class(G)),
        "dl": _optional_int(derived_length(G)),
        "fitting_index": str(G.order // F.order),
        "fitting_class": _optional_int(fitting_class),
        "faithful": format_multiset(faithful) if identified else UNDECIDED_CELL,
        "one_by_one": format_multiset(one_by_one) if identified else UNDECIDED_CELL,
    }


def compute_row_node(row: Dict[str, Any]) -> Dict[str, Any]:
    if "error" in row:
        return row
    G = row.pop("group")
    start = time.perf_counter()
    if row["table"] == "A":
        row["computed"] = _table_a_cells(G, row.get("budget"))
    else:
        row["computed"] = _table_b_cells(G)
    row["duration_s"] = round(time.perf_counter() - start, 3)
    logger.debug(f"{row['table']}{row['id']} computed in {row['duration_s']}s")
    return row


def _same_cell(cell: str, expected: str, computed: str) -> bool:
    if cell in MULTISET_CELLS:
        return parse_multiset(expected) == parse_multiset(computed)
    return expected == computed


def compare_row_node(row: Dict[str, Any]) -> Dict[str, Any]:
    """Diff computed cells against the fixture; '-' cells are not stated and are not compared."""
    row["mismatches"] = []
    row["undecided"] = []
    if "error" in row:
        row["mismatches"].append({"cell": f"{row['table']}{row['id']}.constructor", "expected": row["constructor"], "computed": row["error"]})
        row["status"] = "error"
        return row
    expected, computed = row["expected"], row["computed"]
    for cell, want in expected.items():
        got = computed.get(cell, "-")
        name = f"{row['table']}{row['id']}.{cell}"
        if got == UNDECIDED_CELL:
            row["undecided"].append(name)
            continue
        if want == "-" and cell not in ("quaternion", "linear", "dihedral", "faithful"):
            continue
        if not _same_cell(cell, want, got):
            row["mismatches"].append({"cell": name, "expected": want, "computed": got})
    if row["mismatches"]:
        row["status"] = "mismatch"
    elif row["undecided"]:
        row["status"] = "undecided"
    else:
        row["status"] = "match"
    return row


def process_row(row: Dict[str, Any]) -> Dict[str, Any]:
    """build -> compute -> compare for one row; the result holds only plain data."""
    row = compare_row_node(compute_row_node(build_group_node(row)))
    row.pop("group", None)
    return row


def report_node(payload: Dict[str, Any]) -> Dict[str, Any]:
    results = sorted(payload.get("results", []), key=lambda r: (r["table"], row_key(r["id"])))
    mismatches = [m for r in results for m in r["mismatches"]]
    undecided = [u for r in results for u in r["undecided"]]
    if mismatches:
        status = "fail"
    elif undecided:
        status = "undecided"
    else:
        status = "pass"
    counts = Counter(r["status"] for r in results)
    report = {
        "status": status,
        "tier": payload.get("tier", "core"),
        "rows": [
            {
                "table": r["table"],
                "id": r["id"],
                "constructor": r["constructor"],
                "status": r["status"],
                "computed": r.get("computed", {}),
                "duration_s": r.get("duration_s"),
            }
            for r in results
        ],
        "mismatches": mismatches,
        "undecided": undecided,
        "skipped": sorted(payload.get("skipped", []), key=lambda s: (s["table"], row_key(s["id"]))),
        "counts": {k: counts.get(k, 0) for k in ("match", "mismatch", "undecided", "error")},
    }
    logger.info(f"tables: {status} ({report['counts']}, {len(report['skipped'])} skipped)")
    return report


def run_workflow(payload: Dict[str, Any]) -> Dict[str, Any]:
    """
    Execute the table harness.

    Args:
        payload: tier, table ("a", "b" or "all"), workers, optional rows and budget

    Returns:
        Report dict with status "pass", "fail" or "undecided"
    """
    payload = load_fixture_node(payload)
    workers = int(payload.get("workers") or 1)
    jobs = payload["jobs"]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            payload["results"] = list(pool.map(process_row, jobs))
    else:
        payload["results"] = [process_row(job) for job in jobs]
    return report_node(payload)
