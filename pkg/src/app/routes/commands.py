"""
Command routing: one handler per CLI command, each mapping validated input to a
library operation and returning plain data for the response envelope.
"""

import logging
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple, Type

from ..errors import AlgebraError
from ..models.schemas import (
    AlgebraInput,
    BaseCommandInput,
    ClassifyAlgebraInput,
    CommandResponse,
    ComponentOut,
    DecomposeInput,
    DinInput,
    EmbedInput,
    GoodInput,
    MexcInput,
    TablesInput,
    TorsionLevelInput,
    VahlenCheckInput,
    VcdInput,
    VqlInput,
    normalize_command,
    validate_command_input,
)
from ..services.fixtures import load_fixture
from ..services.group_spec import build
from ..services.groups import FiniteGroup, spectrum
from ..services.invariants import (
    UNDECIDED,
    Answer,
    Goodness,
    Verdict,
    classify_places,
    di_class,
    di_from_places,
    good_from_places,
    has_vql,
    is_good_component,
    listed_vcd,
    mexc_check,
    characterisation_report,
    vcd,
    vcd_bucket,
    vcd_class,
    vql_from_places,
    wmexc_check,
)
from ..services.numbers import RATIONALS, format_rational, quadratic_field
from ..services.quaternions import (
    Classification,
    PlacesData,
    SimpleAlgebraDescriptor,
    classify,
    oracle_descriptor,
    symbol_descriptor,
)
from ..services.subgroup_analysis import (
    admissible_orders,
    division_span_catalog,
    get_ambient,
    max_imprimitive,
    order_spectrum_admissible,
    quadratic_embeds,
    zassenhaus_embed,
)
from ..services.vahlen import (
    VahlenMatrix,
    con_member,
    hyperbolic_point,
    membership_failures,
    mobius,
    point_coordinates,
    sigma_conjugate,
    torsion_free_level,
)
from ..services.wedderburn import change_scalars, decompose
from ..settings import get_settings
from ..workflows.tables import run_workflow

logger = logging.getLogger(__name__)

# Handlers return (data, flags); flags may set "undecided" or "mismatch".
Handler = Callable[[BaseCommandInput], Tuple[Dict[str, Any], Dict[str, bool]]]

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT_ERROR = 2
EXIT_UNDECIDED = 3


class CommandRouter:
    """Registry of command handlers with envelope-producing dispatch."""

    def __init__(self) -> None:
        self._handlers: Dict[str, Tuple[Type[BaseCommandInput], Handler]] = {}

    def command(self, name: str, model: Type[BaseCommandInput]) -> Callable[[Handler], Handler]:
        def register(fn: Handler) -> Handler:
            self._handlers[normalize_command(name)] = (model, fn)
            return fn

        return register

    @property
    def names(self) -> List[str]:
        return sorted(self._handlers)

    def dispatch(self, name: str, params: Dict[str, Any]) -> Dict[str, Any]:
        start = time.perf_counter()
        command = normalize_command(name)

        def envelope(status: str, data=None, error=None, **meta) -> Dict[str, Any]:
            meta.setdefault("command", name)
            meta["duration_s"] = round(time.perf_counter() - start, 4)
            return CommandResponse(status=status, data=data, error=error, meta=meta).model_dump()

        model_instance, errors = validate_command_input(name, params)
        if errors is not None or command not in self._handlers:
            errors = errors or {"command": [f"no handler for {name}"], "meta": {"error_code": "UNKNOWN_COMMAND"}}
            meta = errors.pop("meta")
            message = "; ".join(f"{field}: {', '.join(msgs)}" for field, msgs in errors.items())
            logger.error(f"{name}: invalid input: {message}")
            return envelope("error", data={"fields": errors}, error=message, exit_code=EXIT_INPUT_ERROR, **meta)

        _, handler = self._handlers[command]
        try:
            data, flags = handler(model_instance)
        except AlgebraError as e:
            logger.error(f"{name} failed: {e}")
            return envelope("error", error=str(e), exit_code=e.exit_code, **e.to_meta())

        exit_code = EXIT_OK
        if flags.get("mismatch"):
            exit_code = EXIT_MISMATCH
        elif flags.get("undecided"):
            exit_code = EXIT_UNDECIDED
        return envelope("ok", data=data, exit_code=exit_code, undecided=bool(flags.get("undecided")))


router = CommandRouter()


def _group(spec: str) -> FiniteGroup:
    return build(spec, cap=get_settings().matrix_element_cap)


def _field_label(d: Optional[int]) -> str:
    return "Q" if d is None else f"Q(sqrt({d}))"


# ---------------------------------------------------------------------------
# Group commands
# ---------------------------------------------------------------------------

@router.command("decompose", DecomposeInput)
def decompose_command(inp: DecomposeInput):
    G = _group(inp.group)
    decomposition = decompose(G, inp.method)
    if inp.field is None:
        components = [ComponentOut(**record.summary()) for record in decomposition]
    else:
        components = [
            ComponentOut(
                name=ext.name,
                dim=ext.descriptor.dim_q,
                matrix_size=ext.descriptor.matrix_size,
                center=ext.descriptor.center.pretty(),
                division_part=ext.descriptor.division.name(ext.descriptor.center),
                classification=ext.classification.value,
                faithful=ext.source.faithful,
                kernel_order=ext.source.kernel.order,
                copies=ext.copies,
            )
            for ext in change_scalars(decomposition, inp.field)
        ]
    undecided = any(c.classification == Classification.UNDECIDED.value for c in components)
    data = {
        "group": G.name,
        "order": G.order,
        "field": _field_label(inp.field),
        "complete": decomposition.complete,
        "components": [c.model_dump() for c in components],
        "notes": list(decomposition.notes),
    }
    return data, {"undecided": undecided or not decomposition.complete}


@router.command("mexc", MexcInput)
def mexc_command(inp: MexcInput):
    G = _group(inp.group)
    report = mexc_check(G, inp.field)
    data: Dict[str, Any] = {"mexc": report.to_dict()}
    undecided = report.verdict == Verdict.UNDECIDED
    if inp.weak:
        weak = wmexc_check(G, inp.budget)
        data["wmexc"] = weak.to_dict()
        undecided = undecided or weak.verdict == Verdict.UNDECIDED
    if inp.report:
        data["characterisations"] = characterisation_report(G, inp.field).to_dict()
    return data, {"undecided": undecided}


# ---------------------------------------------------------------------------
# Algebra commands
# ---------------------------------------------------------------------------

def _descriptor(inp: AlgebraInput) -> SimpleAlgebraDescriptor:
    center = quadratic_field(inp.center) if inp.center is not None else RATIONALS
    if inp.tag:
        if inp.center is not None:
            raise AlgebraError("an oracle tag fixes its own center", "VALIDATION_ERROR")
        return oracle_descriptor(inp.tag, inp.matrix_size)
    if inp.symbol:
        return symbol_descriptor(inp.symbol[0], inp.symbol[1], center, inp.matrix_size)
    return SimpleAlgebraDescriptor(center, inp.matrix_size)


def _places(inp: AlgebraInput) -> PlacesData:
    return PlacesData(inp.r1, inp.r2, inp.s, inp.n, inp.d)


def _places_dict(places: Optional[PlacesData]) -> Optional[Dict[str, int]]:
    if places is None:
        return None
    return {"r1": places.r1, "r2": places.r2, "s": places.s, "n": places.n, "d": places.d}


def _algebra_data(inp: AlgebraInput) -> Dict[str, Any]:
    if inp.uses_places:
        return {"algebra": None, "places": _places_dict(_places(inp))}
    descriptor = _descriptor(inp)
    return {"algebra": descriptor.name(), "places": _places_dict(descriptor.places())}


@router.command("classify-algebra", ClassifyAlgebraInput)
def classify_algebra_command(inp: ClassifyAlgebraInput):
    data = _algebra_data(inp)
    kind = classify_places(_places(inp)) if inp.uses_places else classify(_descriptor(inp))
    data["classification"] = kind.value
    data["exceptional"] = kind in (Classification.EXCEPTIONAL_DIVISION, Classification.EXCEPTIONAL_MATRIX)
    return data, {"undecided": kind == Classification.UNDECIDED}


@router.command("vcd", VcdInput)
def vcd_command(inp: VcdInput):
    data = _algebra_data(inp)
    if inp.uses_places:
        places = _places(inp)
        value = vcd(places)
        data.update(vcd=value, bucket=vcd_bucket(value), listed=listed_vcd(places))
    else:
        result = vcd_class(_descriptor(inp))
        data.update(vcd=result.value, bucket=result.bucket, listed=result.listed, consistent=result.consistent)
    return data, {"undecided": data["vcd"] is None}


@router.command("din", DinInput)
def din_command(inp: DinInput):
    data = _algebra_data(inp)
    data["di"] = di_from_places(_places(inp)) if inp.uses_places else di_class(_descriptor(inp))
    return data, {"undecided": data["di"] == UNDECIDED}


@router.command("good", GoodInput)
def good_command(inp: GoodInput):
    data = _algebra_data(inp)
    good = good_from_places(_places(inp)) if inp.uses_places else is_good_component(_descriptor(inp))
    data["good"] = good.value
    return data, {"undecided": good == Goodness.UNDECIDED}


@router.command("vql", VqlInput)
def vql_command(inp: VqlInput):
    data = _algebra_data(inp)
    answer = vql_from_places(_places(inp)) if inp.uses_places else has_vql(_descriptor(inp))
    data["vql"] = answer.value
    return data, {"undecided": answer == Answer.UNDECIDED}


# ---------------------------------------------------------------------------
# Clifford commands
# ---------------------------------------------------------------------------

@router.command("vahlen-check", VahlenCheckInput)
def vahlen_check_command(inp: VahlenCheckInput):
    entries = [[Fraction(c) for c in entry] for entry in inp.entries]
    M = VahlenMatrix.from_entries(inp.u, inp.v, entries)
    failures = membership_failures(M, inp.integral)
    data: Dict[str, Any] = {
        "parameters": [inp.u, inp.v],
        "member": not failures,
        "failures": failures,
        "pseudo_determinant": M.pseudo_determinant().serialize(),
    }
    if not failures:
        data["sigma_conjugate"] = sigma_conjugate(M).serialize()
        if inp.level is not None:
            data["level"] = inp.level
            data["congruence_member"] = con_member(M, inp.level)
    if inp.point is not None:
        image = mobius(M, hyperbolic_point(inp.u, inp.v, [Fraction(c) for c in inp.point]))
        data["image"] = [format_rational(c) for c in point_coordinates(image)]
    return data, {}


@router.command("torsion-level", TorsionLevelInput)
def torsion_level_command(inp: TorsionLevelInput):
    return torsion_free_level(inp.u, inp.v, inp.bound).to_dict(), {}


# ---------------------------------------------------------------------------
# Subgroup commands
# ---------------------------------------------------------------------------

def _imprimitive_row(key: str) -> Optional[Dict[str, str]]:
    return next((row for row in load_fixture("imprimitive") if row["ambient"] == key), None)


@router.command("embed", EmbedInput)
def embed_command(inp: EmbedInput):
    if inp.mode == "quadratic":
        result = quadratic_embeds(inp.d, inp.symbol)
        data = result.to_dict()
        data["agrees"] = result.agrees
        return data, {"mismatch": result.agrees is False}

    amb = get_ambient(inp.ambient)
    if inp.mode == "span-types":
        types = division_span_catalog(amb, inp.budget)
        data = {"ambient": amb.algebra, "types": [t.to_dict() for t in types]}
        return data, {"undecided": any(t.notes for t in types)}

    if inp.mode == "imprimitive":
        G = max_imprimitive(amb)
        row = _imprimitive_row(amb.key)
        data = {
            "ambient": amb.algebra,
            "units": amb.units().name,
            "group": G.name,
            "order": G.order,
            "fixture": row,
        }
        return data, {}

    H = _group(inp.group)
    if inp.mode == "admissible":
        data = {
            "ambient": amb.algebra,
            "group": H.name,
            "admissible": order_spectrum_admissible(H, amb),
            "spectrum": sorted(spectrum(H)),
            "allowed": sorted(admissible_orders(amb)),
        }
        return data, {}

    result = zassenhaus_embed(H, amb, inp.budget)
    data = result.to_dict()
    data["group"] = H.name
    return data, {}


@router.command("tables", TablesInput)
def tables_command(inp: TablesInput):
    report = run_workflow({
        "tier": inp.tier,
        "table": inp.table,
        "workers": inp.workers,
        "rows": inp.rows,
        "budget": inp.budget,
    })
    return report, {"mismatch": report["status"] == "fail", "undecided": report["status"] == "undecided"}


def dispatch(name: str, params: Dict[str, Any]) -> Dict[str, Any]:
    return router.dispatch(name, params)
