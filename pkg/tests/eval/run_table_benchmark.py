#!/usr/bin/env python3
"""Reproduce the fixture tables and report per-cell agreement and row timings."""
from __future__ import annotations

import argparse
import json
import os
import sys
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, List, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

sys.path.append(str(Path(__file__).resolve().parents[2]))

from src.app.workflows.tables import TABLE_A_CELLS, TABLE_B_CELLS, run_workflow  # noqa: E402


def evaluate(report: Dict[str, Any]) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
    per_cell: Dict[str, Dict[str, int]] = defaultdict(lambda: {"support": 0, "correct": 0, "incorrect": 0, "undecided": 0})
    wrong = {m["cell"] for m in report["mismatches"]}
    undecided = set(report["undecided"])
    timings = []
    for row in report["rows"]:
        cells = TABLE_A_CELLS if row["table"] == "A" else TABLE_B_CELLS
        for cell in cells:
            name = f"{row['table']}{row['id']}.{cell}"
            key = f"{row['table']}.{cell}"
            per_cell[key]["support"] += 1
            if name in wrong:
                per_cell[key]["incorrect"] += 1
            elif name in undecided:
                per_cell[key]["undecided"] += 1
            else:
                per_cell[key]["correct"] += 1
        timings.append({"row": f"{row['table']}{row['id']}", "constructor": row["constructor"], "duration_s": row["duration_s"] or 0.0})

    metrics: Dict[str, Any] = {"per_cell": {}, "overall": {}}
    total_support = total_correct = 0
    for key, stats in sorted(per_cell.items()):
        total_support += stats["support"]
        total_correct += stats["correct"]
        accuracy = stats["correct"] / stats["support"] if stats["support"] else 0.0
        metrics["per_cell"][key] = dict(stats, accuracy=round(accuracy, 4))
    metrics["overall"] = {
        "status": report["status"],
        "rows": len(report["rows"]),
        "skipped": len(report["skipped"]),
        "total_support": total_support,
        "total_correct": total_correct,
        "accuracy": round(total_correct / total_support, 4) if total_support else 0.0,
        "total_seconds": round(sum(t["duration_s"] for t in timings), 3),
    }
    return metrics, timings


def save_report(metrics: Dict[str, Any], timings: List[Dict[str, Any]], report: Dict[str, Any], outdir: str) -> None:
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "report.json"), "w", encoding="utf-8") as f:
        json.dump({"metrics": metrics, "timings": timings, "mismatches": report["mismatches"]}, f, indent=2)

    slowest = sorted(timings, key=lambda t: t["duration_s"], reverse=True)[:25]
    plt.figure(figsize=(10, 4))
    plt.bar([t["row"] for t in slowest], [t["duration_s"] for t in slowest], color="#4e79a7")
    plt.ylabel("Seconds")
    plt.title("Slowest rows")
    plt.xticks(rotation=60, ha="right")
    plt.tight_layout()
    plt.savefig(os.path.join(outdir, "timings.png"))
    plt.close()

    html = [
        "<html><head><meta charset='utf-8'><title>Table Reproduction</title></head><body>",
        "<h1>Table Reproduction</h1>",
        f"<p><strong>Status:</strong> {metrics['overall']['status']} &nbsp; "
        f"<strong>Accuracy:</strong> {metrics['overall']['accuracy']}</p>",
        "<h2>Per-cell Agreement</h2>",
        "<table border='1' cellspacing='0' cellpadding='6'><tr><th>Cell</th><th>Support</th><th>Correct</th><th>Incorrect</th><th>Undecided</th><th>Accuracy</th></tr>",
    ]
    for key, m in metrics["per_cell"].items():
        html.append(
            f"<tr><td>{key}</td><td>{m['support']}</td><td>{m['correct']}</td><td>{m['incorrect']}</td>"
            f"<td>{m['undecided']}</td><td>{m['accuracy']}</td></tr>"
        )
    html.append("</table>")
    if report["mismatches"]:
        html.append("<h2>Mismatches</h2><ul>")
        html.extend(f"<li>{m['cell']}: expected {m['expected']}, computed {m['computed']}</li>" for m in report["mismatches"])
        html.append("</ul>")
    html.append("<img src='timings.png' alt='row timings'/></body></html>")
    with open(os.path.join(outdir, "report.html"), "w", encoding="utf-8") as f:
        f.write("\n".join(html))


def main():
    ap = argparse.ArgumentParser(description="Reproduce the fixture tables and summarise agreement")
    ap.add_argument("--tier", default="core", choices=["core", "extended", "optional"])
    ap.add_argument("--table", default="all", choices=["a", "b", "all"])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--outdir", default="results", help="Output directory for reports")
    args = ap.parse_args()

    report = run_workflow({"tier": args.tier, "table": args.table, "workers": args.workers})
    metrics, timings = evaluate(report)
    save_report(metrics, timings, report, args.outdir)
    print(f"{metrics['overall']['status']}: accuracy {metrics['overall']['accuracy']} over {metrics['overall']['rows']} rows")
    print(f"Saved results to {os.path.join(args.outdir, 'report.json')} and {os.path.join(args.outdir, 'report.html')}")


if __name__ == "__main__":
    main()
