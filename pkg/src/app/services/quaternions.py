"""
Quaternion algebras, Hilbert symbols and the classification of simple components.

Division parts are described by local data (Brauer data): the center, the
Schur index, the local indices at rational primes and whether the real places
ramify. For the algebras arising from rational group algebras these local
invariants are constant on the places above a rational prime, so one entry per
rational prime is enough.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from math import gcd, lcm
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from ..errors import AlgebraError, UnknownOracleTagError
from .numbers import (
    RATIONALS,
    AbelianNumberField,
    decomposition_group,
    fixed_field,
    legendre,
    mult_order,
    prime_divisors,
    quadratic_field,
    residue_closure,
    squarefree_part,
)

logger = logging.getLogger(__name__)

INFINITY = "inf"
Place = Union[int, str]


# ---------------------------------------------------------------------------
# Hilbert symbols over Q
# ---------------------------------------------------------------------------

def _valuation(x: int, p: int) -> Tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def hilbert_symbol(a: int, b: int, place: Place) -> int:
    """Hilbert symbol (a, b)_v for nonzero integers a, b."""
    if a == 0 or b == 0:
        raise AlgebraError("Hilbert symbol entries must be nonzero")
    if place == INFINITY:
        return -1 if a < 0 and b < 0 else 1
    p = int(place)
    alpha, u = _valuation(a, p)
    beta, v = _valuation(b, p)
    if p == 2:
        def eps(x: int) -> int:
            return ((x - 1) // 2) % 2

        def omega(x: int) -> int:
            return ((x * x - 1) // 8) % 2

        exponent = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if exponent % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * legendre(u % p, p) ** beta * legendre(v % p, p) ** alpha


def is_local_square(w: int, p: int) -> bool:
    if w == 0:
        return True
    v, u = _valuation(w, p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return legendre(u % p, p) == 1


def hilbert_symbol_by_search(a: int, b: int, p: int) -> int:
    """Hilbert symbol at a finite prime by searching for a represented square.

    The pair is first moved to square-class representatives with at most one
    entry divisible by p, then a x^2 + b y^2 is scanned for a nonzero p-adic
    square over a finite box of residues.
    """
    va, ua = _valuation(a, p)
    vb, ub = _valuation(b, p)
    a = ua * (p if va % 2 else 1)
    b = ub * (p if vb % 2 else 1)
    if a % p == 0 and b % p == 0:
        # (a, b) = (a, -ab) and -ab / p^2 is a unit
        b = -(a // p) * (b // p)
    bound = 64 if p == 2 else p
    for x in range(bound):
        for y in range(bound):
            if x % p == 0 and y % p == 0:
                continue
            w = a * x * x + b * y * y
            if w != 0 and is_local_square(w, p):
                return 1
    return -1


def ramified_places(a: int, b: int) -> FrozenSet[Place]:
    """Places of Q where (a, b / Q) ramifies."""
    candidates: List[Place] = [INFINITY] + prime_divisors(2 * a * b)
    ramified = frozenset(v for v in candidates if hilbert_symbol(a, b, v) == -1)
    assert len(ramified) % 2 == 0, f"odd number of ramified places for ({a},{b})"
    return ramified


def place_splits(p: Place, d: int) -> bool:
    """Whether the place p splits in Q(sqrt(d))."""
    if p == INFINITY:
        return d > 0
    p = int(p)
    if d % p == 0:
        return False
    if p == 2:
        return d % 8 == 1
    return legendre(d % p, p) == 1


def splits_over_quadratic(a: int, b: int, d: int) -> bool:
    """Whether (a, b / Q) becomes a matrix algebra over Q(sqrt(d))."""
    if squarefree_part(d) != d or d == 1:
        raise AlgebraError(f"{d} does not define a quadratic field")
    return not any(place_splits(v, d) for v in ramified_places(a, b))


# ---------------------------------------------------------------------------
# Brauer data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BrauerData:
    center: AbelianNumberField
    index: int
    local_indices: Tuple[Tuple[int, int], ...] = ()
    real_ramified: Optional[bool] = False

    @classmethod
    def build(
        cls, center: AbelianNumberField, local: Dict[int, int], real_ramified: Optional[bool]
    ) -> "BrauerData":
        if not center.is_totally_real():
            real_ramified = False
        indices = tuple(sorted((p, m) for p, m in local.items() if m > 1))
        index = lcm(*(m for _, m in indices)) if indices else 1
        if real_ramified:
            index = lcm(index, 2)
        return cls(center, index, indices, real_ramified)

    def local_index(self, p: int) -> int:
        return dict(self.local_indices).get(p, 1)

    def ramified_primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.local_indices)

    def extend_to(self, field_: AbelianNumberField) -> "BrauerData":
        """Brauer data after extending scalars to the compositum with ``field_``."""
        target = self.center.compositum(field_)
        local = {}
        for p, m in self.local_indices:
            growth = target.local_degree(p) // self.center.local_degree(p)
            local[p] = m // gcd(m, growth)
        real = bool(self.real_ramified) and target.is_totally_real()
        return BrauerData.build(target, local, real)

    def describe(self) -> str:
        places = [f"{p}:{m}" for p, m in self.local_indices]
        if self.real_ramified:
            places.append("inf:2")
        return f"[{self.center.pretty()}; index {self.index}; {','.join(places) or 'split'}]"


def brauer_of_symbol(a: int, b: int, center: AbelianNumberField = RATIONALS) -> BrauerData:
    ramified = ramified_places(a, b)
    rational = BrauerData.build(
        RATIONALS, {int(p): 2 for p in ramified if p != INFINITY}, INFINITY in ramified
    )
    return rational if center.is_rational else rational.extend_to(center)


def cyclic_brauer_data(k: int, r: int, j: int) -> Tuple[BrauerData, int]:
    """Local data of the cyclic algebra (Q(zeta_k)/F, sigma_r, zeta_k^j), F fixed by r.

    Returns the Brauer data over F and the degree [Q(zeta_k) : F].
    """
    r %= k
    j %= k
    if (r * j - j) % k:
        raise AlgebraError(f"zeta_{k}^{j} is not fixed by sigma_{r}")
    center = fixed_field(k, [r])
    span = set(residue_closure([r], k))
    local: Dict[int, int] = {}
    for p in prime_divisors(k):
        decomposition = decomposition_group(p, k)
        reps: List[int] = []
        covered: set = set()
        for c in decomposition:
            if c in covered:
                continue
            reps.append(c)
            covered.update((c * h) % k for h in span)
        exponent = (j * sum(reps)) % k
        order = k // gcd(exponent, k)
        if p == 2:
            two_part = k & -k
            local[p] = 2 if order == 2 and two_part >= 4 else 1
        else:
            local[p] = order
    real = center.is_totally_real() and k > 2 and 2 * j % k == 0 and j % k != 0
    return BrauerData.build(center, local, real), mult_order(r, k) if k > 1 else 1


# ---------------------------------------------------------------------------
# Quaternion symbols and division parts
# ---------------------------------------------------------------------------

RATIONAL_NAMES = {
    frozenset({2, INFINITY}): ("H2", -1, -1),
    frozenset({3, INFINITY}): ("H3", -1, -3),
    frozenset({5, INFINITY}): ("H5", -2, -5),
}


@dataclass(frozen=True)
class QuaternionSymbol:
    a: int
    b: int
    center: AbelianNumberField = RATIONALS

    def __post_init__(self) -> None:
        if self.a == 0 or self.b == 0:
            raise AlgebraError("quaternion symbol entries must be nonzero")

    def brauer(self) -> BrauerData:
        return brauer_of_symbol(self.a, self.b, self.center)

    def is_division(self) -> bool:
        return self.brauer().index == 2

    def is_totally_definite(self) -> bool:
        return self.center.is_totally_real() and self.a < 0 and self.b < 0

    def name(self) -> str:
        if self.center.is_rational:
            named = RATIONAL_NAMES.get(ramified_places(self.a, self.b))
            if named:
                return named[0]
        return f"({self.a},{self.b}/{self.center.pretty()})"

    def serialize(self) -> str:
        return f"({self.a},{self.b}/{self.center.pretty()})"


def rational_symbol_for(ramified: FrozenSet[Place], search: int = 40) -> Optional[QuaternionSymbol]:
    """A small symbol (a, b / Q) with the given ramification set."""
    if ramified in RATIONAL_NAMES:
        _, a, b = RATIONAL_NAMES[ramified]
        return QuaternionSymbol(a, b)
    values = sorted({squarefree_part(n) for n in range(-search, search + 1) if n}, key=lambda v: (abs(v), v))
    for a in values:
        for b in values:
            if abs(b) < abs(a):
                continue
            if ramified_places(a, b) == ramified:
                return QuaternionSymbol(a, b)
    return None


class DivisionKind(str, Enum):
    FIELD = "field"
    QUATERNION = "quaternion"
    ORACLE = "oracle"
    BRAUER = "brauer"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class DivisionPart:
    kind: DivisionKind
    degree: int = 1
    symbol: Optional[QuaternionSymbol] = None
    tag: Optional[str] = None
    brauer: Optional[BrauerData] = None

    def name(self, center: AbelianNumberField) -> str:
        if self.kind == DivisionKind.FIELD:
            return center.pretty()
        if self.kind == DivisionKind.QUATERNION and self.symbol:
            return self.symbol.name()
        if self.kind == DivisionKind.ORACLE and self.tag:
            return NAMED_ORACLES[self.tag].display
        if self.kind == DivisionKind.BRAUER and self.brauer:
            return f"D{self.degree}{self.brauer.describe()}"
        return f"D[{center.pretty()}; unidentified]"

    def real_ramified(self) -> Optional[bool]:
        if self.kind == DivisionKind.FIELD:
            return False
        if self.kind == DivisionKind.ORACLE and self.tag:
            return NAMED_ORACLES[self.tag].brauer().real_ramified
        data = self.brauer or (self.symbol.brauer() if self.symbol else None)
        return data.real_ramified if data else None


FIELD_PART = DivisionPart(DivisionKind.FIELD)


def division_part_from_brauer(data: BrauerData) -> DivisionPart:
    """Name a division algebra from its local data, as specifically as possible."""
    if data.index == 1:
        return FIELD_PART
    if data.index == 2:
        if data.center.is_rational:
            ramified = frozenset(list(data.ramified_primes()) + ([INFINITY] if data.real_ramified else []))
            symbol = rational_symbol_for(ramified)
            if symbol:
                return DivisionPart(DivisionKind.QUATERNION, 2, symbol=symbol, brauer=data)
        for tag, entry in NAMED_ORACLES.items():
            if entry.alias_of is None and entry.center() == data.center and entry.brauer() == data:
                return DivisionPart(DivisionKind.ORACLE, 2, tag=tag, brauer=data)
        for a, b in SYMBOL_SEARCH:
            if brauer_of_symbol(a, b, data.center) == data:
                return DivisionPart(DivisionKind.QUATERNION, 2, symbol=QuaternionSymbol(a, b, data.center), brauer=data)
    return DivisionPart(DivisionKind.BRAUER, data.index, brauer=data)


SYMBOL_SEARCH: Tuple[Tuple[int, int], ...] = tuple(
    (a, b) for a in (-1, -2, -3, -5, -6, -7, 2, 3) for b in (-1, -2, -3, -5, -6, -7, -10, -11, -13, 2, 3, 5) if abs(b) >= abs(a)
)


# ---------------------------------------------------------------------------
# Named oracle table
# ---------------------------------------------------------------------------

class Classification(str, Enum):
    COMMUTATIVE_FIELD = "CommutativeField"
    TOTALLY_DEFINITE_QUATERNION = "TotallyDefiniteQuaternion"
    EXCEPTIONAL_DIVISION = "ExceptionalDivision"
    EXCEPTIONAL_MATRIX = "ExceptionalMatrix"
    NON_EXCEPTIONAL_MATRIX = "NonExceptionalMatrix"
    OTHER_DIVISION = "OtherDivision"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class OracleEntry:
    tag: str
    display: str
    classification: Classification
    center_spec: Tuple[str, int]
    symbol: Optional[Tuple[int, int]] = None
    cyclic: Optional[Tuple[int, int, int]] = None
    alias_of: Optional[str] = None

    def center(self) -> AbelianNumberField:
        kind, value = self.center_spec
        if kind == "quadratic":
            return quadratic_field(value)
        if kind == "cyclotomic":
            return fixed_field(value, [1])
        return RATIONALS

    def brauer(self) -> BrauerData:
        if self.cyclic:
            return cyclic_brauer_data(*self.cyclic)[0]
        a, b = self.symbol
        return brauer_of_symbol(a, b, self.center())

    def places(self) -> Tuple[int, int, int]:
        """(r1, r2, s): ramified real places, unramified real places, complex pairs."""
        real, complex_pairs = self.center().signature()
        if self.brauer().real_ramified:
            return (real, 0, complex_pairs)
        return (0, real, complex_pairs)


def _two_power_entry(t: int) -> OracleEntry:
    m = 1 << t
    k = 3 * m
    r = next(c for c in range(1, k) if c % m == 1 and c % 3 == 2)
    return OracleEntry(
        tag=f"zeta{m}_minus3",
        display=f"(zeta{m},-3/Q(zeta{m}))",
        classification=Classification.EXCEPTIONAL_DIVISION,
        center_spec=("cyclotomic", m),
        cyclic=(k, r, 3),
    )


def _build_oracles() -> Dict[str, OracleEntry]:
    entries = [
        OracleEntry("H2", "H2", Classification.TOTALLY_DEFINITE_QUATERNION, ("rational", 1), (-1, -1)),
        OracleEntry("H3", "H3", Classification.TOTALLY_DEFINITE_QUATERNION, ("rational", 1), (-1, -3)),
        OracleEntry("H5", "H5", Classification.TOTALLY_DEFINITE_QUATERNION, ("rational", 1), (-2, -5)),
        OracleEntry("H2_sqrt2", "(-1,-1/Q(sqrt(2)))", Classification.TOTALLY_DEFINITE_QUATERNION, ("quadratic", 2), (-1, -1)),
        OracleEntry(
            "H2_zeta8_real", "(-1,-1/Q(sqrt(2)))", Classification.TOTALLY_DEFINITE_QUATERNION,
            ("quadratic", 2), (-1, -1), alias_of="H2_sqrt2",
        ),
        OracleEntry("H2_sqrt3", "(-1,-1/Q(sqrt(3)))", Classification.TOTALLY_DEFINITE_QUATERNION, ("quadratic", 3), (-1, -1)),
        OracleEntry("H2_zeta5_real", "(-1,-1/Q(sqrt(5)))", Classification.TOTALLY_DEFINITE_QUATERNION, ("quadratic", 5), (-1, -1)),
        OracleEntry("H3_sqrt_minus2", "(-1,-3/Q(sqrt(-2)))", Classification.EXCEPTIONAL_DIVISION, ("quadratic", -2), (-1, -3)),
    ]
    entries.extend(_two_power_entry(t) for t in range(3, 7))
    return {e.tag: e for e in entries}


NAMED_ORACLES: Dict[str, OracleEntry] = _build_oracles()


def named_oracle(tag: str) -> OracleEntry:
    key = tag.strip()
    if key not in NAMED_ORACLES:
        raise UnknownOracleTagError(f"unknown oracle tag {tag!r}; known: {sorted(NAMED_ORACLES)}")
    return NAMED_ORACLES[key]


# ---------------------------------------------------------------------------
# Descriptors and classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlacesData:
    r1: int
    r2: int
    s: int
    n: int
    d: int

    def __post_init__(self) -> None:
        if min(self.r1, self.r2, self.s) < 0 or self.n < 1 or self.d < 1:
            raise AlgebraError(f"invalid places data {self}")
        if self.r1 + self.r2 + self.s == 0:
            raise AlgebraError("a number field has at least one infinite place")
        if self.r1 and self.d % 2:
            raise AlgebraError(f"a division algebra of odd degree {self.d} cannot ramify at a real place")


@dataclass(frozen=True)
class SimpleAlgebraDescriptor:
    center: AbelianNumberField
    matrix_size: int
    division: DivisionPart = FIELD_PART

    @property
    def degree(self) -> int:
        return self.matrix_size * self.division.degree

    @property
    def dim_q(self) -> int:
        return self.degree ** 2 * self.center.degree

    def name(self) -> str:
        inner = self.division.name(self.center)
        return inner if self.matrix_size == 1 else f"M{self.matrix_size}({inner})"

    def is_identified(self) -> bool:
        return self.division.kind != DivisionKind.UNKNOWN

    def places(self) -> Optional[PlacesData]:
        if not self.is_identified():
            return None
        real, complex_pairs = self.center.signature()
        ramified = self.division.real_ramified()
        if ramified is None:
            return None
        if ramified:
            return PlacesData(real, 0, complex_pairs, self.matrix_size, self.division.degree)
        return PlacesData(0, real, complex_pairs, self.matrix_size, self.division.degree)

    def is_totally_definite_quaternion(self) -> bool:
        return (
            self.division.degree == 2
            and self.center.is_totally_real()
            and self.division.real_ramified() is True
        )


def is_small_center(center: AbelianNumberField) -> bool:
    """Q or an imaginary quadratic field."""
    return center.is_rational or (center.degree == 2 and not center.is_totally_real())


def classify(descriptor: SimpleAlgebraDescriptor) -> Classification:
    division = descriptor.division
    n = descriptor.matrix_size
    if division.kind == DivisionKind.UNKNOWN:
        return Classification.UNDECIDED
    if division.kind == DivisionKind.ORACLE and division.tag and n == 1:
        return NAMED_ORACLES[division.tag].classification
    if division.degree == 1:
        if n == 1:
            return Classification.COMMUTATIVE_FIELD
        if n == 2 and is_small_center(descriptor.center):
            return Classification.EXCEPTIONAL_MATRIX
        return Classification.NON_EXCEPTIONAL_MATRIX
    if n == 1:
        if descriptor.is_totally_definite_quaternion():
            return Classification.TOTALLY_DEFINITE_QUATERNION
        if descriptor.center.is_totally_real() and division.real_ramified() is None:
            return Classification.OTHER_DIVISION
        return Classification.EXCEPTIONAL_DIVISION
    if n == 2 and descriptor.center.is_rational and descriptor.is_totally_definite_quaternion():
        return Classification.EXCEPTIONAL_MATRIX
    return Classification.NON_EXCEPTIONAL_MATRIX


def oracle_descriptor(tag: str, matrix_size: int = 1) -> SimpleAlgebraDescriptor:
    entry = named_oracle(tag)
    if entry.alias_of:
        entry = named_oracle(entry.alias_of)
    return SimpleAlgebraDescriptor(
        entry.center(), matrix_size, DivisionPart(DivisionKind.ORACLE, 2, tag=entry.tag, brauer=entry.brauer())
    )


def symbol_descriptor(a: int, b: int, center: AbelianNumberField = RATIONALS, matrix_size: int = 1) -> SimpleAlgebraDescriptor:
    """Descriptor of M_n((a, b / center)), collapsing split symbols to matrices."""
    data = brauer_of_symbol(a, b, center)
    if data.index == 1:
        return SimpleAlgebraDescriptor(center, 2 * matrix_size, FIELD_PART)
    symbol = QuaternionSymbol(a, b, center)
    return SimpleAlgebraDescriptor(center, matrix_size, DivisionPart(DivisionKind.QUATERNION, 2, symbol=symbol, brauer=data))
