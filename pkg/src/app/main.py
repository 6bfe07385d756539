import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from .routes.commands import EXIT_INPUT_ERROR, dispatch
from .settings import get_settings

logger = logging.getLogger(__name__)

AMBIENT_KEYS = ("Z", "I1", "I2", "I3", "O2", "O3", "O5")


def _int_pair(text: str) -> List[int]:
    parts = [p for p in text.replace("(", "").replace(")", "").split(",") if p.strip()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected a,b got {text!r}")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")


def _rational_rows(text: str) -> List[List[str]]:
    """'a0,...,a7;b0,...;c0,...;d0,...' -> four coefficient lists."""
    return [[c.strip() for c in row.split(",")] for row in text.split(";")]


def _rational_list(text: str) -> List[str]:
    return [c.strip() for c in text.split(",")]


def _add_algebra_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tag", help="named oracle tag, e.g. H2, H2_sqrt2, zeta8_minus3")
    parser.add_argument("--symbol", type=_int_pair, help="quaternion symbol a,b (use --symbol=-1,-1)")
    parser.add_argument("--center", type=int, help="squarefree radicand of a quadratic center")
    parser.add_argument("--matrix-size", type=int, default=1, help="n in M_n(D)")
    parser.add_argument("--r1", type=int, help="real places ramified in D")
    parser.add_argument("--r2", type=int, help="real places not ramified in D")
    parser.add_argument("--s", type=int, help="complex places")
    parser.add_argument("--n", type=int, help="matrix size for raw places")
    parser.add_argument("--d", type=int, help="degree of D for raw places")


def create_cli() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    output = common.add_mutually_exclusive_group()
    output.add_argument("--json", action="store_true", help="print the response envelope as JSON")
    output.add_argument("--tsv", action="store_true", help="print tabular data as TSV")
    common.add_argument("--budget", type=int, help="search node cap for embedding searches")
    common.add_argument("--log-level", help="logging level, overrides LOG_LEVEL")

    parser = argparse.ArgumentParser(
        prog="excomp",
        description="Exceptional components of rational group algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="Wedderburn decomposition of QG")
    p.add_argument("group", help="group spec, e.g. Q16 or C3:Q8(1,inv)")
    p.add_argument("--field", type=int, help="negative squarefree d: decompose over Q(sqrt(d))")
    p.add_argument("--method", choices=["metabelian", "definition"])

    p = sub.add_parser("mexc", parents=[common], help="property M_exc")
    p.add_argument("group")
    p.add_argument("--field", type=int)
    p.add_argument("--weak", action="store_true", help="also evaluate wM_exc")
    p.add_argument("--report", action="store_true", help="clause-by-clause characterisation report")

    for name, text in (
        ("classify-algebra", "classify a simple algebra"),
        ("vcd", "virtual cohomological dimension of SL_1 of an order"),
        ("din", "smallest n <= 4 with a discrete embedding in SL_n(C)"),
        ("good", "goodness in the sense of Serre"),
        ("vql", "virtually infinite abelianization"),
    ):
        _add_algebra_arguments(sub.add_parser(name, parents=[common], help=text))

    p = sub.add_parser("vahlen-check", parents=[common], help="Vahlen matrix membership")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--entries", type=_rational_rows, required=True, help="a;b;c;d, each 8 comma-separated rationals")
    p.add_argument("--level", type=int, help="congruence level n")
    p.add_argument("--point", type=_rational_list, help="z0,...,z4 with z4 > 0")
    p.add_argument("--non-integral", action="store_true", help="drop the integrality condition")

    p = sub.add_parser("torsion-level", parents=[common], help="least torsion-free congruence level")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--bound", type=int)

    p = sub.add_parser("embed", parents=[common], help="finite subgroups of exceptional 2x2 algebras")
    p.add_argument("--mode", default="zassenhaus", choices=["zassenhaus", "quadratic", "span-types", "imprimitive", "admissible"])
    p.add_argument("--group")
    p.add_argument("--ambient", help=f"one of {', '.join(AMBIENT_KEYS)} or an algebra name")
    p.add_argument("--d", type=int)
    p.add_argument("--symbol", type=_int_pair, help="a,b for (-a,-b/Q)")

    p = sub.add_parser("tables", parents=[common], help="reproduce the fixture tables")
    p.add_argument("--tier", default="core", choices=["core", "extended", "optional"])
    p.add_argument("--table", default="all", choices=["a", "b", "all"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--rows", nargs="*", help="row ids such as [24,3]")

    return parser


def _params(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "json", "tsv", "log_level"}
    params = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    if args.command == "vahlen-check":
        params["integral"] = not params.pop("non_integral", False)
    return params


def _tsv_rows(command: str, data: Dict[str, Any]) -> List[List[Any]]:
    if command == "decompose":
        header = ["name", "dim", "matrix_size", "center", "classification", "faithful", "copies"]
        return [header] + [[c[k] for k in header] for c in data["components"]]
    if command == "tables":
        rows = [["table", "id", "status", "constructor"]]
        rows += [[r["table"], r["id"], r["status"], r["constructor"]] for r in data["rows"]]
        rows += [["mismatch", m["cell"], m["expected"], m["computed"]] for m in data["mismatches"]]
        return rows
    return [[k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v] for k, v in data.items()]


def _render(command: str, response: Dict[str, Any], as_json: bool, as_tsv: bool) -> str:
    if as_json:
        return json.dumps(response, indent=2, sort_keys=True)
    if response["status"] != "ok":
        return f"error [{response['meta'].get('error_code')}]: {response['error']}"
    rows = _tsv_rows(command, response["data"])
    if as_tsv:
        return "\n".join("\t".join(str(cell) for cell in row) for row in rows)
    width = max((len(str(row[0])) for row in rows), default=0)
    return "\n".join(f"{str(row[0]).ljust(width)}  " + "  ".join(str(c) for c in row[1:]) for row in rows)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = create_cli()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT_ERROR if e.code else 0

    level = (args.log_level or get_settings().log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    response = dispatch(args.command, _params(args))
    print(_render(args.command, response, args.json, args.tsv))
    exit_code = response["meta"].get("exit_code", EXIT_INPUT_ERROR)
    logger.debug(f"{args.command} finished with exit code {exit_code}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
