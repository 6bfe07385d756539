"""
Arithmetic invariants of simple components and the group-level checks built on them.

Every component predicate is a function of the classified descriptor alone.
Group-level verdicts are conjunctions over the components of QG (or of FG for
an imaginary quadratic F), and "undecided" is carried through as a verdict of
its own instead of being folded into yes or no.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Union

from ..errors import UndecidedError
from .groups import FiniteGroup, fitting_subgroup, nilpotency_class
from .quaternions import Classification, PlacesData, SimpleAlgebraDescriptor, classify
from .wedderburn import (
    ComponentRecord,
    ExtendedComponent,
    change_scalars,
    component_quotient,
    decompose,
)

logger = logging.getLogger(__name__)

UNDECIDED = "undecided"
NO_SMALL_DI = "none<=4"

Component = Union[ComponentRecord, ExtendedComponent]


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDECIDED = "undecided"


class Goodness(str, Enum):
    GOOD = "good"
    NOT_GOOD = "not_good"
    FINITE = "finite_hence_good"
    UNDECIDED = "undecided"


class Answer(str, Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


# ---------------------------------------------------------------------------
# Virtual cohomological dimension
# ---------------------------------------------------------------------------

def vcd(places: PlacesData) -> int:
    """vcd of SL_1 of an order in M_n(D), from the infinite places of the center."""
    N = places.n * places.d
    if N == 1:
        return 0
    twice = places.r1 * (N - 2) * (N + 1) + places.r2 * (N + 2) * (N - 1)
    return twice // 2 + places.s * (N * N - 1) - places.n + 1


def vcd_bucket(value: Optional[int]) -> str:
    if value is None:
        return UNDECIDED
    return str(value) if value <= 4 else ">4"


def listed_vcd(places: PlacesData) -> Optional[int]:
    """The value the classification lists assign to these places, None when no list applies.

    The lists cover every algebra with vcd at most 4.
    """
    n, d = places.n, places.d
    signature = (places.r1, places.r2, places.s)
    if n * d == 1:
        return 0
    if (n, d) == (2, 1):
        return {(0, 1, 0): 1, (0, 0, 1): 2, (0, 2, 0): 3, (0, 1, 1): 4}.get(signature)
    if (n, d) == (3, 1):
        return 3 if signature == (0, 1, 0) else None
    if (n, d) == (2, 2):
        return 4 if signature == (1, 0, 0) else None
    if (n, d) == (1, 2):
        if places.s == 0:
            return {0: 0, 1: 2, 2: 4}.get(places.r2)
        if places.s == 1 and places.r2 == 0:
            return 3
    return None


@dataclass(frozen=True)
class VcdResult:
    value: Optional[int]
    bucket: str
    listed: Optional[int]

    @property
    def decided(self) -> bool:
        return self.value is not None

    @property
    def consistent(self) -> bool:
        """The formula and the lists agree: equal values up to 4, no list entry above."""
        if self.value is None:
            return True
        if self.value <= 4:
            return self.listed == self.value
        return self.listed is None


def vcd_class(descriptor: SimpleAlgebraDescriptor) -> VcdResult:
    places = descriptor.places()
    if places is None:
        return VcdResult(None, UNDECIDED, None)
    value = vcd(places)
    return VcdResult(value, vcd_bucket(value), listed_vcd(places))


# ---------------------------------------------------------------------------
# Discreteness degree
# ---------------------------------------------------------------------------

def noncompact_places(places: PlacesData) -> int:
    """Infinite places at which SL_1 of the completion is not compact."""
    if places.n >= 2:
        return places.r1 + places.r2 + places.s
    return places.r2 + places.s


def di_from_places(places: PlacesData) -> Union[int, str]:
    N = places.n * places.d
    if N == 1:
        return 1
    if noncompact_places(places) <= 1 and N <= 4:
        return N
    return NO_SMALL_DI


def di_class(descriptor: SimpleAlgebraDescriptor) -> Union[int, str]:
    """Smallest n <= 4 with SL_1(O) discrete in SL_n(C), else "none<=4"."""
    places = descriptor.places()
    if places is None:
        return UNDECIDED
    return di_from_places(places)


# ---------------------------------------------------------------------------
# Goodness and virtually infinite abelianization
# ---------------------------------------------------------------------------

def _goodness(kind: Classification) -> Goodness:
    if kind == Classification.EXCEPTIONAL_MATRIX:
        return Goodness.GOOD
    if kind == Classification.NON_EXCEPTIONAL_MATRIX:
        return Goodness.NOT_GOOD
    if kind in (Classification.COMMUTATIVE_FIELD, Classification.TOTALLY_DEFINITE_QUATERNION):
        return Goodness.FINITE
    return Goodness.UNDECIDED


def is_good_component(descriptor: SimpleAlgebraDescriptor) -> Goodness:
    return _goodness(classify(descriptor))


def classify_places(places: PlacesData) -> Classification:
    """Classification of M_n(D) read off the infinite places of its center.

    Q has places (r1 + r2, s) = (1, 0), an imaginary quadratic field (0, 1), and a
    quaternion algebra over Q is totally definite exactly when r1 = 1.
    """
    n, d = places.n, places.d
    real = places.r1 + places.r2
    rational = (real, places.s) == (1, 0)
    small = rational or (real, places.s) == (0, 1)
    if n == 1:
        if d == 1:
            return Classification.COMMUTATIVE_FIELD
        if d == 2 and places.r2 == 0 and places.s == 0:
            return Classification.TOTALLY_DEFINITE_QUATERNION
        return Classification.EXCEPTIONAL_DIVISION
    if n == 2 and d == 1 and small:
        return Classification.EXCEPTIONAL_MATRIX
    if n == 2 and d == 2 and rational and places.r1 == 1:
        return Classification.EXCEPTIONAL_MATRIX
    return Classification.NON_EXCEPTIONAL_MATRIX


def good_from_places(places: PlacesData) -> Goodness:
    return _goodness(classify_places(places))


def s_rank(places: PlacesData) -> int:
    """Sum of the real ranks of SL_1 over the noncompact infinite places."""
    N = places.n * places.d
    return places.r1 * (N // 2 - 1) + (places.r2 + places.s) * (N - 1)


def _vql(kind: Classification, places: Optional[PlacesData], name: str) -> Answer:
    if kind == Classification.UNDECIDED:
        return Answer.UNDECIDED
    if places is not None and places.n >= 2:
        return Answer.YES if kind == Classification.EXCEPTIONAL_MATRIX else Answer.NO
    if places is None:
        return Answer.UNDECIDED
    rank = s_rank(places)
    if rank != 1:
        # rank 0: finite; rank >= 2: finite abelianization by Margulis
        return Answer.NO
    logger.debug(f"{name}: S-rank one division algebra, abelianization left open")
    return Answer.UNDECIDED


def has_vql(descriptor: SimpleAlgebraDescriptor) -> Answer:
    kind = classify(descriptor)
    if descriptor.matrix_size >= 2 and kind != Classification.UNDECIDED:
        return Answer.YES if kind == Classification.EXCEPTIONAL_MATRIX else Answer.NO
    return _vql(kind, descriptor.places(), descriptor.name())


def vql_from_places(places: PlacesData) -> Answer:
    return _vql(classify_places(places), places, f"places {places}")


@dataclass(frozen=True)
class ComponentInvariants:
    name: str
    classification: Classification
    vcd: VcdResult
    di: Union[int, str]
    good: Goodness
    vql: Answer

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "classification": self.classification.value,
            "vcd": self.vcd.value,
            "vcd_class": self.vcd.bucket,
            "di": self.di,
            "good": self.good.value,
            "vql": self.vql.value,
        }


def component_invariants(descriptor: SimpleAlgebraDescriptor) -> ComponentInvariants:
    return ComponentInvariants(
        name=descriptor.name(),
        classification=classify(descriptor),
        vcd=vcd_class(descriptor),
        di=di_class(descriptor),
        good=is_good_component(descriptor),
        vql=has_vql(descriptor),
    )


# ---------------------------------------------------------------------------
# Group level
# ---------------------------------------------------------------------------

def _components(G: FiniteGroup, d: Optional[int]) -> List[Component]:
    decomposition = decompose(G)
    if d is None:
        return list(decomposition.components)
    return change_scalars(decomposition, d)


def _record(component: Component) -> ComponentRecord:
    return component.source if isinstance(component, ExtendedComponent) else component


def _all(values: Iterable[Optional[bool]]) -> Optional[bool]:
    """Three-valued conjunction: False wins over None."""
    seen_none = False
    for v in values:
        if v is False:
            return False
        if v is None:
            seen_none = True
    return None if seen_none else True


def _field_name(d: Optional[int]) -> str:
    return "Q" if d is None else f"Q(sqrt({d}))"


@dataclass(frozen=True)
class FittingData:
    group: str
    order: int
    fitting_index: int
    fitting_class: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "group": self.group,
            "order": self.order,
            "fitting_index": self.fitting_index,
            "fitting_class": self.fitting_class,
        }


def fitting_data(G: FiniteGroup) -> FittingData:
    F = fitting_subgroup(G)
    cls = nilpotency_class(G, F)
    return FittingData(G.name, G.order, G.order // F.order, cls if cls is not None else 0)


@dataclass
class MexcReport:
    group: str
    field: str
    verdict: Verdict
    matrix_witnesses: List[Component] = field(default_factory=list)
    division_witnesses: List[Component] = field(default_factory=list)
    undecided: List[Component] = field(default_factory=list)
    fitting: List[FittingData] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.verdict == Verdict.HOLDS

    def failures(self) -> List[Component]:
        return [c for c in self.matrix_witnesses if c.classification != Classification.EXCEPTIONAL_MATRIX]

    def to_dict(self) -> Dict[str, object]:
        return {
            "group": self.group,
            "field": self.field,
            "verdict": self.verdict.value,
            "matrix_witnesses": [[c.name, c.classification.value] for c in self.matrix_witnesses],
            "division_witnesses": [[c.name, c.classification.value] for c in self.division_witnesses],
            "undecided": [c.name for c in self.undecided],
            "fitting": [f.to_dict() for f in self.fitting],
        }


def mexc_check(G: FiniteGroup, d: Optional[int] = None) -> MexcReport:
    """Whether every component M_n(D) of FG with n >= 2 is exceptional, F = Q or Q(sqrt(d))."""
    report = MexcReport(G.name, _field_name(d), Verdict.HOLDS)
    for component in _components(G, d):
        kind = component.classification
        if kind == Classification.UNDECIDED:
            report.undecided.append(component)
        elif component.descriptor.matrix_size >= 2:
            report.matrix_witnesses.append(component)
            Ge, _ = component_quotient(G, _record(component))
            report.fitting.append(fitting_data(Ge))
        else:
            report.division_witnesses.append(component)
    if report.failures():
        report.verdict = Verdict.FAILS
    elif report.undecided:
        report.verdict = Verdict.UNDECIDED
        logger.warning(f"{G.name}: M_exc undecided, {len(report.undecided)} unidentified components")
    logger.info(f"M_exc for {report.field}[{G.name}]: {report.verdict.value}")
    return report


def _is_m4_rational(component: Component) -> bool:
    desc = component.descriptor
    return desc.center.is_rational and desc.matrix_size == 4 and desc.division.degree == 1


def _low_rank_faithful(Ge: FiniteGroup) -> bool:
    """Ge spans a division algebra or an exceptional matrix algebra."""
    for record in decompose(Ge).faithful():
        if record.descriptor.matrix_size == 1 and record.classification != Classification.UNDECIDED:
            return True
        if record.classification == Classification.EXCEPTIONAL_MATRIX:
            return True
    return False


@dataclass
class WeakMexcReport:
    group: str
    verdict: Verdict
    matrix_condition: bool
    uncovered: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.verdict == Verdict.HOLDS

    def to_dict(self) -> Dict[str, object]:
        return {
            "group": self.group,
            "verdict": self.verdict.value,
            "matrix_condition": self.matrix_condition,
            "uncovered": list(self.uncovered),
            "notes": list(self.notes),
        }


def wmexc_check(G: FiniteGroup, budget: Optional[int] = None) -> WeakMexcReport:
    """Matrix components exceptional or M_4(Q), and QG covered by low rank spanning groups."""
    from .subgroup_analysis import embeds_in_spanning_catalog

    components = decompose(G).components
    undecided = any(c.classification == Classification.UNDECIDED for c in components)
    matrix_ok = all(
        c.classification == Classification.EXCEPTIONAL_MATRIX or _is_m4_rational(c)
        for c in components
        if c.descriptor.matrix_size >= 2 and c.classification != Classification.UNDECIDED
    )
    report = WeakMexcReport(G.name, Verdict.HOLDS, matrix_ok)
    for record in components:
        kind = record.classification
        if kind == Classification.UNDECIDED:
            continue
        if record.descriptor.matrix_size == 1 or kind == Classification.EXCEPTIONAL_MATRIX:
            continue
        Ge, _ = component_quotient(G, record)
        if _low_rank_faithful(Ge):
            continue
        try:
            covered = embeds_in_spanning_catalog(Ge, budget)
        except UndecidedError as exc:
            report.notes.append(f"{record.name}: {exc}")
            undecided = True
            continue
        if not covered:
            report.uncovered.append(record.name)
            report.notes.append(f"{record.name}: {Ge.name} not covered by catalog")
    if not matrix_ok or report.uncovered:
        report.verdict = Verdict.FAILS
    elif undecided:
        report.verdict = Verdict.UNDECIDED
    logger.info(f"wM_exc for Q[{G.name}]: {report.verdict.value}")
    return report


# ---------------------------------------------------------------------------
# The equivalent characterisations of M_exc
# ---------------------------------------------------------------------------

GOOD_VCD = frozenset({1, 2, 4})
GOOD_DI = frozenset({1, 2, 4})


@dataclass
class CharacterisationReport:
    group: str
    field: str
    clauses: Dict[str, Optional[bool]]
    composite: Dict[str, Optional[bool]]
    components: List[ComponentInvariants]
    fitting: FittingData
    consistent: bool
    discriminators: List[str]

    def to_dict(self) -> Dict[str, object]:
        return {
            "group": self.group,
            "field": self.field,
            "clauses": dict(self.clauses),
            "composite": dict(self.composite),
            "components": [c.to_dict() for c in self.components],
            "fitting": self.fitting.to_dict(),
            "consistent": self.consistent,
            "discriminators": list(self.discriminators),
        }


def _membership(values: Sequence[Union[int, str, None]], allowed: frozenset) -> Optional[bool]:
    return _all(None if v is None or v == UNDECIDED else (v in allowed) for v in values)


def characterisation_report(G: FiniteGroup, d: Optional[int] = None) -> CharacterisationReport:
    """Evaluate the equivalent characterisations of M_exc clause by clause."""
    components = _components(G, d)
    invariants = [component_invariants(c.descriptor) for c in components]
    unknown = [inv for inv in invariants if inv.classification == Classification.UNDECIDED]
    non_division = [
        inv
        for c, inv in zip(components, invariants)
        if c.descriptor.matrix_size >= 2 and inv.classification != Classification.UNDECIDED
    ]

    mexc = mexc_check(G, d)
    fit = fitting_data(G)
    vcd_clause = _membership([inv.vcd.value for inv in non_division], GOOD_VCD)
    di_clause = _membership([inv.di for inv in non_division], GOOD_DI)
    if unknown:
        vcd_clause = False if vcd_clause is False else None
        di_clause = False if di_clause is False else None
    clauses: Dict[str, Optional[bool]] = {
        "mexc": None if mexc.verdict == Verdict.UNDECIDED else mexc.holds,
        "field_degree": True,
        "vcd_divides_4": vcd_clause,
        "fitting_index": fit.fitting_index <= 2,
        "fitting_class": fit.fitting_class <= 3,
        "di_divides_4": di_clause,
        "sl1_good": _all(
            None if inv.good == Goodness.UNDECIDED else inv.good != Goodness.NOT_GOOD for inv in invariants
        ),
    }

    composite = {
        "i": clauses["mexc"],
        "ii": _all([clauses["field_degree"], clauses["vcd_divides_4"]]),
        "iii": _all([clauses["fitting_index"], clauses["fitting_class"], clauses["di_divides_4"]]),
    }
    if clauses["sl1_good"] is not None:
        composite["v"] = clauses["sl1_good"]
    decided = {v for v in composite.values() if v is not None}
    consistent = len(decided) <= 1
    discriminators = sorted(k for k, v in clauses.items() if v is False)
    if not consistent:
        logger.warning(f"{G.name}: characterisations disagree: {composite}")
    return CharacterisationReport(
        group=G.name,
        field=_field_name(d),
        clauses=clauses,
        composite=composite,
        components=invariants,
        fitting=fit,
        consistent=consistent,
        discriminators=discriminators,
    )
