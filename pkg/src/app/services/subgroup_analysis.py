"""
Finite subgroups of GL_2 over the maximal orders of exceptional 2x2 algebras.

The ambients are M_2(O) for O one of Z, I_1, I_2, I_3 (rings of integers of
Q(sqrt(-d))) and O_2, O_3, O_5 (maximal orders of H2, H3, H5). Entries of a
matrix are stored as rational coordinate tuples of the division algebra D in
the basis (1,), (1, sqrt(-d)) or (1, i, j, k).

Spanning catalogs come from the tableB fixture: every row with a constructor
whose faithful components include the ambient. Embedding of an abstract group
into a catalog group stands in for conjugacy inside U(A), which is justified
whenever the span is simple and contains the center.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import sympy

from ..errors import AlgebraError, ElementCapError, InvalidActionError, ParameterMismatchError, UndecidedError
from ..settings import get_settings
from .fixtures import find_row, load_fixture, parse_multiset, split_list
from .group_spec import build
from .groups import FiniteGroup, is_isomorphic, spectrum, subgroup_embeds, unit_group, wreath_square
from .numbers import divisors, squarefree_part
from .quaternions import splits_over_quadratic
from .vahlen import QuaternionElement

logger = logging.getLogger(__name__)

DElement = Tuple[Fraction, ...]
Matrix2 = Tuple[DElement, DElement, DElement, DElement]

IMPRIMITIVE_SEARCH_CAP = 1000


# ---------------------------------------------------------------------------
# Ambient algebras
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmbientAlgebra:
    key: str
    algebra: str
    radicand: Optional[int] = None
    symbol: Optional[Tuple[int, int]] = None

    @property
    def degree(self) -> int:
        if self.symbol:
            return 4
        return 1 if self.radicand == 0 else 2

    @property
    def dimension(self) -> int:
        return 4 * self.degree

    @property
    def is_commutative(self) -> bool:
        return self.symbol is None

    def scalar(self, value) -> DElement:
        return (Fraction(value),) + (Fraction(0),) * (self.degree - 1)

    def element(self, coords: Sequence) -> DElement:
        if len(coords) != self.degree:
            raise ParameterMismatchError(f"{self.algebra} entries have {self.degree} coordinates, got {len(coords)}")
        return tuple(Fraction(c) for c in coords)

    def mul(self, x: DElement, y: DElement) -> DElement:
        if self.degree == 1:
            return (x[0] * y[0],)
        if self.degree == 2:
            r = -self.radicand
            return (x[0] * y[0] + r * x[1] * y[1], x[0] * y[1] + x[1] * y[0])
        u, v = self.symbol
        return (QuaternionElement(u, v, x) * QuaternionElement(u, v, y)).coeffs

    def add(self, x: DElement, y: DElement) -> DElement:
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x: DElement, y: DElement) -> DElement:
        return tuple(a - b for a, b in zip(x, y))

    def conj(self, x: DElement) -> DElement:
        if self.degree == 1:
            return x
        if self.degree == 2:
            return (x[0], -x[1])
        u, v = self.symbol
        return QuaternionElement(u, v, x).conjugate().coeffs

    def norm(self, x: DElement) -> Fraction:
        return self.mul(x, self.conj(x))[0]

    def trace(self, x: DElement) -> Fraction:
        return x[0] if self.degree == 1 else 2 * x[0]

    def inverse(self, x: DElement) -> DElement:
        n = self.norm(x)
        if n == 0:
            raise AlgebraError(f"{x} is not invertible in {self.algebra}")
        return tuple(c / n for c in self.conj(x))

    def is_zero(self, x: DElement) -> bool:
        return not any(x)

    def is_integral(self, x: DElement) -> bool:
        """Reduced trace and norm are integers."""
        return self.trace(x).denominator == 1 and self.norm(x).denominator == 1

    def roots_of_unity(self) -> List[DElement]:
        """Torsion units of a commutative D."""
        if not self.is_commutative:
            raise AlgebraError(f"{self.algebra} is not commutative")
        half = Fraction(1, 2)
        roots = [self.scalar(1), self.scalar(-1)]
        if self.radicand == 1:
            roots += [(Fraction(0), Fraction(1)), (Fraction(0), Fraction(-1))]
        if self.radicand == 3:
            roots += [(s * half, t * half) for s in (1, -1) for t in (1, -1)]
        return roots

    def units(self) -> FiniteGroup:
        return unit_group(self.key)


AMBIENTS: Dict[str, AmbientAlgebra] = {
    "Z": AmbientAlgebra("Z", "M2(Q)", radicand=0),
    "I1": AmbientAlgebra("I1", "M2(Q(i))", radicand=1),
    "I2": AmbientAlgebra("I2", "M2(Q(sqrt(-2)))", radicand=2),
    "I3": AmbientAlgebra("I3", "M2(Q(sqrt(-3)))", radicand=3),
    "O2": AmbientAlgebra("O2", "M2(H2)", symbol=(-1, -1)),
    "O3": AmbientAlgebra("O3", "M2(H3)", symbol=(-1, -3)),
    "O5": AmbientAlgebra("O5", "M2(H5)", symbol=(-2, -5)),
}

_ALIASES = {amb.algebra.lower(): amb.key for amb in AMBIENTS.values()}
_ALIASES.update({f"m2({k.lower()})": k for k in AMBIENTS})


def get_ambient(name: str) -> AmbientAlgebra:
    """Look up an ambient by order name (``I3``) or algebra name (``M2(Q(sqrt(-3)))``)."""
    if isinstance(name, AmbientAlgebra):
        return name
    text = name.strip().replace(" ", "")
    key = text.upper() if text.upper() in AMBIENTS else _ALIASES.get(text.lower())
    if key is None:
        raise ParameterMismatchError(f"unknown ambient {name!r}; expected one of {sorted(AMBIENTS)}")
    return AMBIENTS[key]


# ---------------------------------------------------------------------------
# Matrix groups over orders
# ---------------------------------------------------------------------------

def _mat_mul(amb: AmbientAlgebra, x: Matrix2, y: Matrix2) -> Matrix2:
    a, b, c, d = x
    e, f, g, h = y
    m = amb.mul
    return (
        amb.add(m(a, e), m(b, g)),
        amb.add(m(a, f), m(b, h)),
        amb.add(m(c, e), m(d, g)),
        amb.add(m(c, f), m(d, h)),
    )


def _identity(amb: AmbientAlgebra) -> Matrix2:
    one, zero = amb.scalar(1), amb.scalar(0)
    return (one, zero, zero, one)


def _is_scalar(amb: AmbientAlgebra, x: Matrix2) -> bool:
    a, b, c, d = x
    return amb.is_zero(b) and amb.is_zero(c) and a == d and all(t == 0 for t in a[1:])


@dataclass(frozen=True)
class MatrixGroupOverOrder:
    ambient: AmbientAlgebra
    elements: Tuple[Matrix2, ...]
    generators: Tuple[Matrix2, ...] = ()
    name: str = "H"

    @classmethod
    def generate(
        cls,
        ambient,
        generators: Sequence[Sequence[Sequence]],
        name: str = "H",
        cap: Optional[int] = None,
    ) -> "MatrixGroupOverOrder":
        """Close 2x2 generators, each given as four entry coordinate lists, under multiplication."""
        amb = get_ambient(ambient)
        cap = cap or get_settings().matrix_element_cap
        gens = tuple(tuple(amb.element(entry) for entry in g) for g in generators)
        for g in gens:
            if len(g) != 4:
                raise InvalidActionError("matrices over an order are given by four entries")
            if not all(amb.is_integral(entry) for entry in g):
                raise InvalidActionError(f"generator {g} has an entry outside the maximal order of {amb.algebra}")
        identity = _identity(amb)
        elements = [identity]
        seen = {identity}
        frontier = [identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = _mat_mul(amb, x, g)
                if y not in seen:
                    if len(elements) >= cap:
                        raise ElementCapError(f"{name} in {amb.algebra} exceeds {cap} elements")
                    seen.add(y)
                    elements.append(y)
                    frontier.append(y)
        logger.debug(f"{name} in GL2 over {amb.key}: {len(elements)} elements")
        return cls(amb, tuple(elements), gens, name)

    @property
    def order(self) -> int:
        return len(self.elements)

    def abstract(self) -> FiniteGroup:
        index = {x: i for i, x in enumerate(self.elements)}
        table = tuple(tuple(index[_mat_mul(self.ambient, x, y)] for y in self.elements) for x in self.elements)
        gens = tuple(index[g] for g in self.generators)
        return FiniteGroup(self.name, table, gens)


def monomial_group(ambient, name: Optional[str] = None) -> MatrixGroupOverOrder:
    """The monomial group (U x U) x| C2 for a commutative ambient."""
    amb = get_ambient(ambient)
    zero, one = amb.scalar(0), amb.scalar(1)
    gens = [(zeta, zero, zero, one) for zeta in amb.roots_of_unity()]
    gens += [(one, zero, zero, zeta) for zeta in amb.roots_of_unity()]
    gens.append((zero, one, one, zero))
    return MatrixGroupOverOrder.generate(amb, gens, name or f"monomial({amb.key})")


def _flatten(x: Matrix2) -> List[Fraction]:
    return [c for entry in x for c in entry]


def span_dimension(H: MatrixGroupOverOrder) -> int:
    rows = [[sympy.Rational(c.numerator, c.denominator) for c in _flatten(x)] for x in H.elements]
    return int(sympy.Matrix(rows).rank())


def is_spanning(H: MatrixGroupOverOrder) -> bool:
    return span_dimension(H) == H.ambient.dimension


# ---------------------------------------------------------------------------
# Imprimitivity
# ---------------------------------------------------------------------------

class Imprimitivity(str, Enum):
    DECOMPOSABLE = "decomposable"
    SWAP = "swap"
    PRIMITIVE = "primitive"
    UNDECIDED = "undecided"


INFINITE_LINE = "inf"


@dataclass
class ImprimitivityResult:
    kind: Imprimitivity
    lines: Tuple = ()
    stabilizer_order: Optional[int] = None
    note: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "lines": [_line_label(line) for line in self.lines],
            "stabilizer_order": self.stabilizer_order,
            "note": self.note,
        }


def _line_label(line) -> str:
    if line == INFINITE_LINE:
        return INFINITE_LINE
    return "(" + ",".join(str(c) for c in line) + ")"


def _line_of(amb: AmbientAlgebra, v1: DElement, v2: DElement):
    """Key of the line v D: v1 v2^-1, or infinity when v2 = 0."""
    if amb.is_zero(v2):
        return INFINITE_LINE
    return amb.mul(v1, amb.inverse(v2))


def _act(amb: AmbientAlgebra, g: Matrix2, line):
    a, b, c, d = g
    if line == INFINITE_LINE:
        return _line_of(amb, a, c)
    return _line_of(amb, amb.add(amb.mul(a, line), b), amb.add(amb.mul(c, line), d))


def _eigenlines(amb: AmbientAlgebra, g: Matrix2) -> List:
    lines = []
    for zeta in amb.roots_of_unity():
        a, b, c, d = g
        m11, m22 = amb.sub(a, zeta), amb.sub(d, zeta)
        det = amb.sub(amb.mul(m11, m22), amb.mul(b, c))
        if not amb.is_zero(det):
            continue
        if not (amb.is_zero(m11) and amb.is_zero(b)):
            lines.append(_line_of(amb, tuple(-t for t in b), m11))
        else:
            lines.append(_line_of(amb, tuple(-t for t in m22), c))
    return lines


def is_imprimitive(H: MatrixGroupOverOrder) -> ImprimitivityResult:
    """Search for a pair of lines in D^2 that H fixes or exchanges."""
    amb = H.ambient
    if H.order > IMPRIMITIVE_SEARCH_CAP:
        return ImprimitivityResult(Imprimitivity.UNDECIDED, note=f"order {H.order} above the search cap")
    candidates = [INFINITE_LINE, amb.scalar(0)]
    if amb.is_commutative:
        for g in H.elements:
            if not _is_scalar(amb, g):
                candidates.extend(_eigenlines(amb, g))
    unique = list(dict.fromkeys(candidates))

    orbits = {}
    for line in unique:
        orbit = {line}
        frontier = [line]
        while frontier:
            current = frontier.pop()
            for g in H.generators:
                image = _act(amb, g, current)
                if image not in orbit:
                    orbit.add(image)
                    frontier.append(image)
            if len(orbit) > 2:
                break
        orbits[line] = orbit

    fixed = [line for line in unique if len(orbits[line]) == 1]
    if len(fixed) >= 2:
        return ImprimitivityResult(Imprimitivity.DECOMPOSABLE, (fixed[0], fixed[1]), H.order)
    for line in unique:
        if len(orbits[line]) == 2:
            pair = tuple(sorted(orbits[line], key=_line_label))
            stabilizer = sum(1 for g in H.elements if _act(amb, g, pair[0]) == pair[0])
            return ImprimitivityResult(Imprimitivity.SWAP, pair, stabilizer)
    if amb.is_commutative:
        return ImprimitivityResult(Imprimitivity.PRIMITIVE, note="no invariant pair among eigenlines")
    return ImprimitivityResult(Imprimitivity.UNDECIDED, note="no invariant pair among coordinate lines")


def max_imprimitive(ambient) -> FiniteGroup:
    """(U(O) x U(O)) x| C2 with C2 exchanging the factors."""
    amb = get_ambient(ambient)
    units = amb.units()
    return wreath_square(units, name=f"({units.name}x{units.name}):C2")


def max_imprimitive_order(ambient) -> int:
    return 2 * get_ambient(ambient).units().order ** 2


# ---------------------------------------------------------------------------
# Quadratic subfields and admissible orders
# ---------------------------------------------------------------------------

QUATERNION_TABLE_SYMBOLS = ((1, 1), (1, 3), (2, 5))


@dataclass
class QuadraticEmbedding:
    d: int
    a: int
    b: int
    embeds: bool
    in_table: bool
    table_value: Optional[bool] = None

    @property
    def agrees(self) -> Optional[bool]:
        return None if self.table_value is None else self.table_value == self.embeds

    def to_dict(self) -> Dict[str, object]:
        return {
            "d": self.d,
            "symbol": [-self.a, -self.b],
            "embeds": self.embeds,
            "in_table": self.in_table,
            "table_value": self.table_value,
        }


def _embedding_table() -> Dict[Tuple[int, int, int], bool]:
    table = {}
    for row in load_fixture("embeddings"):
        table[(int(row["d"]), int(row["a"]), int(row["b"]))] = row["embeds"].lower() in ("yes", "true", "1")
    return table


def quadratic_embeds(d: int, symbol: Tuple[int, int]) -> QuadraticEmbedding:
    """Whether Q(sqrt(-d)) is a subfield of (-a,-b/Q)."""
    a, b = symbol
    if a <= 0 or b <= 0 or d <= 0 or squarefree_part(d) != d:
        raise ParameterMismatchError(f"expected positive a, b and squarefree d > 0, got d={d}, (a,b)=({a},{b})")
    embeds = splits_over_quadratic(-a, -b, -d)
    in_table = (a, b) in QUATERNION_TABLE_SYMBOLS and d in (1, 2, 3)
    table_value = _embedding_table().get((d, a, b)) if in_table else None
    if not in_table:
        logger.warning(f"Q(sqrt(-{d})) in (-{a},-{b}/Q) is outside the reference table")
    return QuadraticEmbedding(d, a, b, embeds, in_table, table_value)


def admissible_orders(ambient) -> FrozenSet[int]:
    amb = get_ambient(ambient)
    if not amb.is_commutative:
        return frozenset(divisors(8)) | frozenset(divisors(10)) | frozenset(divisors(12))
    allowed = set(divisors(8)) | set(divisors(12))
    if amb.radicand not in (1, 2):
        allowed.discard(8)
    if amb.radicand not in (1, 3):
        allowed.discard(12)
    return frozenset(allowed)


def order_spectrum_admissible(H: FiniteGroup, ambient) -> bool:
    return spectrum(H) <= admissible_orders(ambient)


# ---------------------------------------------------------------------------
# Spanning catalogs
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def catalog_group(constructor: str) -> FiniteGroup:
    return build(constructor)


@dataclass(frozen=True)
class CatalogEntry:
    row_id: str
    constructor: str
    order: int
    faithful: Tuple[str, ...]

    def group(self) -> FiniteGroup:
        return catalog_group(self.constructor)


def _catalog_rows(tier: str) -> List[CatalogEntry]:
    entries = []
    for row in load_fixture("tableB", tier):
        constructor = row.get("constructor", "")
        if constructor in ("", "-"):
            continue
        order = int(row["id"].strip("[]").split(",")[0])
        faithful = tuple(parse_multiset(row.get("faithful", "")))
        entries.append(CatalogEntry(row["id"], constructor, order, faithful))
    return entries


def spanning_catalog(ambient, tier: str = "optional") -> List[CatalogEntry]:
    amb = get_ambient(ambient)
    entries = [e for e in _catalog_rows(tier) if amb.algebra in e.faithful]
    return sorted(entries, key=lambda e: (e.order, e.row_id))


def _search_catalog(H: FiniteGroup, entries: Sequence[CatalogEntry], budget: Optional[int]) -> Optional[CatalogEntry]:
    undecided = []
    for entry in entries:
        if entry.order % H.order:
            continue
        try:
            if subgroup_embeds(H, entry.group(), budget):
                return entry
        except UndecidedError as exc:
            undecided.append(f"{entry.row_id}: {exc}")
    if undecided:
        raise UndecidedError(f"embedding of {H.name} undecided for " + "; ".join(undecided))
    return None


def embeds_in_spanning_catalog(Ge: FiniteGroup, budget: Optional[int] = None) -> bool:
    """Whether Ge embeds in a spanning group of some exceptional 2x2 algebra."""
    entries: Dict[str, CatalogEntry] = {}
    for amb in AMBIENTS.values():
        for entry in spanning_catalog(amb):
            entries.setdefault(entry.row_id, entry)
    found = _search_catalog(Ge, sorted(entries.values(), key=lambda e: (e.order, e.row_id)), budget)
    return found is not None


class Zassenhaus(str, Enum):
    CONJUGATE_INTO = "conjugate_into"
    NONE = "none"
    EXCEPTED = "excepted"


@dataclass
class ZassenhausResult:
    verdict: Zassenhaus
    ambient: str
    witness: Optional[str] = None
    note: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {"verdict": self.verdict.value, "ambient": self.ambient, "witness": self.witness, "note": self.note}


# Rows whose primitive subgroups span M2(Q(sqrt(-d))) without conjugating into S(O).
SPAN_EXCEPTIONS: Dict[str, Tuple[str, ...]] = {
    "O3": ("[48,33]", "[96,67]"),
}
# For O5 every spanning group of M2(I3) is an exception apart from these rows.
O5_NON_EXCEPTIONS = ("[24,3]", "[24,8]")


def _exception_groups(amb: AmbientAlgebra) -> List[Tuple[str, Optional[str]]]:
    if amb.key == "O5":
        return [(e.row_id, e.constructor) for e in spanning_catalog("I3") if e.row_id not in O5_NON_EXCEPTIONS]
    groups = []
    for row_id in SPAN_EXCEPTIONS.get(amb.key, ()):
        row = find_row("tableB", row_id)
        constructor = row.get("constructor") if row else None
        groups.append((row_id, constructor if constructor not in ("", "-") else None))
    return groups


def _excepted(H: FiniteGroup, amb: AmbientAlgebra, budget: Optional[int]) -> Optional[str]:
    for row_id, constructor in _exception_groups(amb):
        if constructor is None:
            logger.debug(f"exception {row_id} for {amb.key} has no constructor, skipped")
            continue
        candidate = catalog_group(constructor)
        if candidate.order == H.order and is_isomorphic(H, candidate, budget):
            return row_id
    return None


def zassenhaus_embed(H: FiniteGroup, ambient, budget: Optional[int] = None) -> ZassenhausResult:
    """Find a spanning group of the ambient that contains a copy of H."""
    amb = get_ambient(ambient)
    entries = spanning_catalog(amb)
    if not entries:
        raise ParameterMismatchError(f"no spanning catalog rows for {amb.algebra}")
    excepted = _excepted(H, amb, budget)
    if excepted:
        return ZassenhausResult(Zassenhaus.EXCEPTED, amb.algebra, excepted, "listed exception")
    if not order_spectrum_admissible(H, amb):
        return ZassenhausResult(Zassenhaus.NONE, amb.algebra, note="element orders not admissible")
    found = _search_catalog(H, entries, budget)
    if found is None:
        return ZassenhausResult(Zassenhaus.NONE, amb.algebra, note="no catalog group contains it")
    logger.info(f"{H.name} embeds in {found.row_id} ({found.constructor}) inside {amb.algebra}")
    return ZassenhausResult(Zassenhaus.CONJUGATE_INTO, amb.algebra, found.row_id)


# ---------------------------------------------------------------------------
# Groups spanning division subalgebras
# ---------------------------------------------------------------------------

NAMED_TYPES: Dict[str, str] = {
    "SL2F3": "SL(2,3)",
    "SU2F3": "CSU(2,3)",
    "SL2F5": "SL(2,5)",
}


def type_constructor(name: str) -> str:
    return NAMED_TYPES.get(name, name)


@dataclass
class SpanType:
    name: str
    witness: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.witness is not None

    def to_dict(self) -> Dict[str, object]:
        return {"name": self.name, "verified": self.verified, "witness": self.witness}


def division_span_catalog(ambient, budget: Optional[int] = None) -> List[SpanType]:
    """Isomorphism types spanning a division subalgebra, each checked against the catalog."""
    amb = get_ambient(ambient)
    row = next((r for r in load_fixture("isotypes") if r["ambient"] == amb.key), None)
    if row is None:
        raise ParameterMismatchError(f"no iso-type row for {amb.algebra}")
    entries = spanning_catalog(amb)
    result = []
    for name in split_list(row["types"]):
        span = SpanType(name)
        try:
            found = _search_catalog(catalog_group(type_constructor(name)), entries, budget)
            span.witness = found.row_id if found else None
        except UndecidedError as exc:
            span.notes.append(str(exc))
        result.append(span)
    return result
