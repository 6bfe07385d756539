"""
Loading of the TSV table fixtures.

Each fixture is a tab-separated file with a header row. Lines starting with
``#`` are provenance comments and are skipped. List-valued cells separate
entries with ``;``; multiset cells write ``k:Name`` for k copies of ``Name``.
"""

import csv
import logging
from collections import Counter
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import AlgebraError
from ..settings import get_settings

logger = logging.getLogger(__name__)

FIXTURE_FILES: Dict[str, str] = {
    "tablea": "tableA.tsv",
    "tableb": "tableB.tsv",
    "imprimitive": "imprimitive.tsv",
    "isotypes": "iso_types.tsv",
    "embeddings": "embeddings.tsv",
}

TIERS: Tuple[str, ...] = ("core", "extended", "optional")
EMPTY_CELLS = frozenset({"", "-"})


def _normalize(name: str) -> str:
    return name.strip().lower().replace("_", "").replace("-", "").replace(".tsv", "")


def fixture_path(name: str, directory: Optional[Path] = None) -> Path:
    key = _normalize(name)
    if key not in FIXTURE_FILES:
        raise AlgebraError(f"unknown fixture {name!r}; expected one of {sorted(FIXTURE_FILES)}", "UNKNOWN_FIXTURE")
    return Path(directory or get_settings().fixture_dir) / FIXTURE_FILES[key]


@lru_cache(maxsize=None)
def _read_rows(path: str) -> Tuple[Tuple[Tuple[str, str], ...], ...]:
    with open(path, newline="", encoding="utf-8") as handle:
        lines = [line for line in handle if line.strip() and not line.lstrip().startswith("#")]
    reader = csv.DictReader(lines, delimiter="\t")
    rows = tuple(tuple((k.strip(), (v or "").strip()) for k, v in row.items() if k) for row in reader)
    logger.debug(f"read {len(rows)} rows from {path}")
    return rows


def tiers_up_to(tier: str) -> Tuple[str, ...]:
    """``core`` selects core rows, ``extended`` adds extended rows, ``optional`` selects everything."""
    if tier not in TIERS:
        raise AlgebraError(f"unknown tier {tier!r}; expected one of {list(TIERS)}", "UNKNOWN_TIER")
    return TIERS[: TIERS.index(tier) + 1]


def load_fixture(name: str, tier: str = "optional", directory: Optional[Path] = None) -> List[Dict[str, str]]:
    path = fixture_path(name, directory)
    if not path.exists():
        raise AlgebraError(f"fixture file {path} is missing", "FIXTURE_MISSING")
    selected = tiers_up_to(tier)
    rows = [dict(row) for row in _read_rows(str(path))]
    return [row for row in rows if row.get("tier", "core") in selected]


def split_list(cell: str) -> List[str]:
    if cell.strip() in EMPTY_CELLS:
        return []
    return [item.strip() for item in cell.split(";") if item.strip()]


def parse_multiset(cell: str) -> Counter:
    counts: Counter = Counter()
    for item in split_list(cell):
        count, sep, name = item.partition(":")
        if sep and count.strip().isdigit():
            counts[name.strip()] += int(count)
        else:
            counts[item] += 1
    return counts


def format_multiset(counts: Counter) -> str:
    if not counts:
        return "-"
    return ";".join(f"{k}:{name}" if k > 1 else name for name, k in sorted(counts.items()))


def format_list(items: Sequence[str]) -> str:
    return ";".join(items) if items else "-"


def find_row(name: str, row_id: str) -> Optional[Dict[str, str]]:
    for row in load_fixture(name):
        if row.get("id") == row_id:
            return row
    return None
