"""
Rational Wedderburn decomposition through strong Shoda pairs.

For a strong Shoda pair (H, K) of G with N = N_G(K) the primitive central
idempotent e(G, H, K) is the sum of the G-conjugates of epsilon(H, K), and

    QG e  ~=  M_[G:N] ( Q(zeta_k) * N/H ),   k = [H:K],

a crossed product with the action of N/H on H/K. When N/H is cyclic this is a
cyclic algebra whose local invariants are computed exactly. Whatever the pairs
do not reach (non strongly monomial groups) is split off as the residual
central idempotent and identified block by block.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import sympy
from sympy import Poly, QQ

from ..errors import AlgebraError, ParameterMismatchError
from ..settings import get_settings
from .group_algebra import (
    ClassAlgebra,
    GroupAlgebraElement,
    central_idempotent_from_epsilon,
    coset_generator,
    epsilon,
    hat,
    is_cyclic_quotient,
    kernel_of,
    scalar_action,
)
from .groups import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    core,
    derived_length,
    derived_subgroup,
    group_exponent,
    maximal_abelian_over,
    normalizer,
    quotient,
    subgroup_class_representatives,
    subgroups,
)
from .numbers import (
    RATIONALS,
    AbelianNumberField,
    cyclotomic_field,
    euler_phi,
    field_of,
    quadratic_field,
    squarefree_part,
    to_fraction,
    unit_residues,
)
from .quaternions import (
    FIELD_PART,
    INFINITY,
    BrauerData,
    Classification,
    DivisionKind,
    DivisionPart,
    SimpleAlgebraDescriptor,
    brauer_of_symbol,
    classify,
    cyclic_brauer_data,
    division_part_from_brauer,
    ramified_places,
    symbol_descriptor,
)

logger = logging.getLogger(__name__)

_X = sympy.Symbol("x")
INCOMPLETE_NOTE = "not strongly monomial: decomposition incomplete"


# ---------------------------------------------------------------------------
# Strong Shoda pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossedProductData:
    """Q(zeta_k) * N/H for cyclic N/H: a lift n acts by h -> h^r and n^m = h^j mod K."""

    k: int
    h: int
    lift: int
    quotient_order: int
    r: int
    j: int


@dataclass(frozen=True)
class StrongShodaPair:
    H: Subgroup
    K: Subgroup
    N: Subgroup

    @property
    def cyclic_order(self) -> int:
        return self.H.order // self.K.order

    @property
    def quotient_order(self) -> int:
        return self.N.order // self.H.order

    def describe(self) -> str:
        return f"(H:{self.H.order}, K:{self.K.order}, N:{self.N.order})"


def _coset_order(G: FiniteGroup, n: int, H: Subgroup) -> int:
    t, y = 1, n
    while y not in H.elements:
        y = G.mul[y][n]
        t += 1
    return t


def _normal_in(G: FiniteGroup, S: Subgroup, T: Subgroup) -> bool:
    """S normal in T."""
    return all(G.conj(t, x) in S.elements for t in T.generators() for x in S.elements)


def quotient_data(G: FiniteGroup, pair: StrongShodaPair) -> Optional[CrossedProductData]:
    """Cyclic crossed-product data of the pair, or None when N/H is not cyclic."""
    H, K, N = pair.H, pair.K, pair.N
    h, k = coset_generator(G, H, K)
    m = pair.quotient_order
    lift = next((n for n in sorted(N.elements) if _coset_order(G, n, H) == m), None)
    if lift is None:
        return None
    image = G.conj(lift, h)
    top = G.power(lift, m)
    r = j = None
    y = 0
    for e in range(k):
        if r is None and G.mul[G.inv[y]][image] in K.elements:
            r = e
        if j is None and G.mul[G.inv[y]][top] in K.elements:
            j = e
        y = G.mul[y][h]
    if r is None or j is None:
        raise AlgebraError(f"pair {pair.describe()} does not normalize H/K")
    return CrossedProductData(k, h, lift, m, r, j)


def is_strong_shoda_pair(G: FiniteGroup, H: Subgroup, K: Subgroup) -> bool:
    """Definitional test: K <| H <| N_G(K), H/K cyclic and maximal abelian in N/K,
    and the G-conjugates of epsilon(H, K) pairwise orthogonal."""
    if not K.elements <= H.elements:
        return False
    N = normalizer(G, K)
    if not H.elements <= N.elements or not _normal_in(G, H, N):
        return False
    if not is_cyclic_quotient(G, H, K):
        return False
    h, _ = coset_generator(G, H, K)
    commuting = frozenset(n for n in N.elements if G.commutator(n, h) in K.elements)
    if commuting != H.elements:
        return False
    return _conjugates_orthogonal(G, H, K, N)


def _left_transversal(G: FiniteGroup, N: Subgroup) -> List[int]:
    covered: set = set()
    reps: List[int] = []
    for g in range(G.order):
        if g in covered:
            continue
        reps.append(g)
        covered.update(G.mul[g][n] for n in N.elements)
    return reps


def _conjugates_orthogonal(G: FiniteGroup, H: Subgroup, K: Subgroup, N: Subgroup) -> bool:
    eps = epsilon(G, H, K)
    for t in _left_transversal(G, N):
        if t in N.elements:
            continue
        if not (eps * eps.conjugate(t)).is_zero():
            return False
    return True


def is_metabelian(G: FiniteGroup) -> bool:
    length = derived_length(G)
    return length is not None and length <= 2


def metabelian_pairs(G: FiniteGroup) -> List[StrongShodaPair]:
    """Strong Shoda pairs from a maximal abelian B containing G':
    (H, K) with H maximal among C >= B satisfying C' <= K <= C, and H/K cyclic."""
    B = maximal_abelian_over(G, derived_subgroup(G))[0]
    overgroups = [C for C in subgroups(G) if B.elements <= C.elements]
    derived = {C.elements: derived_subgroup(G, C) for C in overgroups}
    pairs: List[StrongShodaPair] = []
    for K in subgroup_class_representatives(G):
        valid = [
            C for C in overgroups
            if derived[C.elements].elements <= K.elements <= C.elements
        ]
        maximal = [C for C in valid if not any(C.elements < D.elements for D in valid)]
        for H in maximal:
            if is_cyclic_quotient(G, H, K):
                pairs.append(StrongShodaPair(H, K, normalizer(G, K)))
    return pairs


def definitional_pairs(G: FiniteGroup) -> List[StrongShodaPair]:
    pairs: List[StrongShodaPair] = []
    lattice = subgroups(G)
    for K in subgroup_class_representatives(G):
        N = normalizer(G, K)
        for H in lattice:
            if K.elements <= H.elements <= N.elements and is_strong_shoda_pair(G, H, K):
                pairs.append(StrongShodaPair(H, K, N))
    return pairs


def pci(G: FiniteGroup, pair: StrongShodaPair, ca: Optional[ClassAlgebra] = None) -> GroupAlgebraElement:
    """The primitive central idempotent e(G, H, K)."""
    ca = ca or ClassAlgebra(G)
    eps = epsilon(G, pair.H, pair.K)
    return ca.to_element(central_idempotent_from_epsilon(ca, eps, pair.N.order))


@dataclass
class PairEnumeration:
    pairs: List[StrongShodaPair]
    idempotents: List[Tuple[Fraction, ...]]
    complete: bool
    method: str
    note: Optional[str] = None

    def __iter__(self) -> Iterator[StrongShodaPair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def _pair_rank(G: FiniteGroup, pair: StrongShodaPair) -> Tuple[int, int]:
    cyclic_quotient = is_cyclic_quotient(G, pair.N, pair.H)
    return (0 if cyclic_quotient else 1, pair.quotient_order)


def ssp_enumerate(G: FiniteGroup, method: Optional[str] = None, ca: Optional[ClassAlgebra] = None) -> PairEnumeration:
    """Strong Shoda pairs of G giving distinct primitive central idempotents.

    ``method`` is "metabelian", "definition", or None to pick the fast path
    for metabelian groups.
    """
    ca = ca or ClassAlgebra(G)
    if method is None:
        method = "metabelian" if is_metabelian(G) else "definition"
    if method == "metabelian":
        if not is_metabelian(G):
            raise ParameterMismatchError(f"{G.name} is not metabelian")
        candidates = metabelian_pairs(G)
    elif method == "definition":
        candidates = definitional_pairs(G)
    else:
        raise ParameterMismatchError(f"unknown enumeration method {method!r}")

    best: Dict[Tuple[Fraction, ...], StrongShodaPair] = {}
    for pair in candidates:
        e = central_idempotent_from_epsilon(ca, epsilon(G, pair.H, pair.K), pair.N.order)
        current = best.get(e)
        if current is None or _pair_rank(G, pair) < _pair_rank(G, current):
            best[e] = pair
    idempotents = list(best)
    total = tuple(sum(col, Fraction(0)) for col in zip(*idempotents)) if idempotents else ca.unit(0)
    complete = bool(idempotents) and total == ca.one()
    note = None if complete else INCOMPLETE_NOTE
    logger.debug(f"{G.name}: {len(candidates)} candidate pairs, {len(best)} distinct idempotents ({method})")
    if not complete:
        logger.warning(f"{G.name}: {INCOMPLETE_NOTE}")
    return PairEnumeration([best[e] for e in idempotents], idempotents, complete, method, note)


# ---------------------------------------------------------------------------
# Identification of components
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComponentRecord:
    idempotent: GroupAlgebraElement
    descriptor: SimpleAlgebraDescriptor
    dim_q: int
    kernel: Subgroup
    pair: Optional[StrongShodaPair] = None
    method: str = "ssp"
    note: Optional[str] = None
    _quotient: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def faithful(self) -> bool:
        return self.kernel.is_trivial()

    @property
    def classification(self) -> Classification:
        return classify(self.descriptor)

    @property
    def name(self) -> str:
        return self.descriptor.name()

    @property
    def quotient_group(self) -> FiniteGroup:
        return component_quotient(self.idempotent.group, self)[0]

    def summary(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "dim": self.dim_q,
            "matrix_size": self.descriptor.matrix_size,
            "center": self.descriptor.center.pretty(),
            "division_part": self.descriptor.division.name(self.descriptor.center),
            "classification": self.classification.value,
            "faithful": self.faithful,
            "kernel_order": self.kernel.order,
        }


def _order_two_symbol(data: CrossedProductData, center: AbelianNumberField) -> Optional[Tuple[int, int]]:
    """(theta, beta) with Q(zeta_k) = F(sqrt(theta)) and beta = zeta_k^j = +-1."""
    k, j = data.k, data.j % data.k
    if j == 0:
        beta = 1
    elif 2 * j == k:
        beta = -1
    else:
        return None
    top = cyclotomic_field(k)
    for size in range(1, k + 1):
        for theta in (-size, size):
            if theta == 1 or squarefree_part(theta) != theta:
                continue
            disc = theta if theta % 4 == 1 else 4 * theta
            if k % abs(disc):
                continue
            L = quadratic_field(theta)
            if top.contains(L) and not center.contains(L):
                return theta, beta
    return None


def identify(G: FiniteGroup, pair: StrongShodaPair, ca: Optional[ClassAlgebra] = None) -> ComponentRecord:
    """Simple component of QG attached to a strong Shoda pair."""
    ca = ca or ClassAlgebra(G)
    e = pci(G, pair, ca)
    outer = G.order // pair.N.order
    dim_q = (G.order // pair.H.order) * outer * euler_phi(pair.cyclic_order)
    kernel = core(G, pair.K)
    data = quotient_data(G, pair)
    note = None
    if data is None:
        descriptor, note = identify_block(G, e, ca)
    elif data.k <= 2:
        descriptor = SimpleAlgebraDescriptor(RATIONALS, outer, FIELD_PART)
    else:
        brauer, degree = cyclic_brauer_data(data.k, data.r, data.j)
        if degree != data.quotient_order:
            raise AlgebraError(f"N/H does not act faithfully on H/K for {pair.describe()}")
        center = brauer.center
        size = outer * degree
        descriptor = None
        if degree == 2 and brauer.index == 2:
            symbol = _order_two_symbol(data, center)
            if symbol and brauer_of_symbol(symbol[0], symbol[1], center) == brauer:
                descriptor = symbol_descriptor(symbol[0], symbol[1], center, outer)
        if descriptor is None:
            d = brauer.index
            if size % d:
                raise AlgebraError(f"Schur index {d} does not divide the degree {size}")
            division = division_part_from_brauer(brauer) if d > 1 else FIELD_PART
            descriptor = SimpleAlgebraDescriptor(center, size // d, division)
    if descriptor.dim_q != dim_q:
        raise AlgebraError(
            f"dimension mismatch for {pair.describe()} in {G.name}: {descriptor.name()} has "
            f"{descriptor.dim_q}, expected {dim_q}"
        )
    assert G.order * e.trace == dim_q
    return ComponentRecord(e, descriptor, dim_q, kernel, pair, "ssp", note)


# ---------------------------------------------------------------------------
# Blocks outside the reach of strong Shoda pairs
# ---------------------------------------------------------------------------

def _rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    if not vectors:
        return 0
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in v] for v in vectors]).rank()


def _solve(columns: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Coefficients c with sum c_i columns_i = target, or None."""
    A = sympy.Matrix([[sympy.Rational(c[i].numerator, c[i].denominator) for c in columns] for i in range(len(target))])
    b = sympy.Matrix([sympy.Rational(t.numerator, t.denominator) for t in target])
    try:
        solution, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.subs({p: 0 for p in params})
    return [to_fraction(x) for x in solution]


def _evaluate(ca: ClassAlgebra, coeffs: Sequence[Fraction], z: Tuple[Fraction, ...], unit: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    """coeffs (highest degree first) evaluated at z inside Z(QG) * unit."""
    acc = tuple(Fraction(0) for _ in unit)
    for c in coeffs:
        acc = ca.mul(acc, z)
        acc = tuple(a + c * u for a, u in zip(acc, unit))
    return acc


def _minimal_polynomial(ca: ClassAlgebra, z: Tuple[Fraction, ...], unit: Tuple[Fraction, ...]) -> Poly:
    powers = [unit]
    while True:
        nxt = ca.mul(powers[-1], z)
        coeffs = _solve(powers, nxt)
        if coeffs is not None:
            terms = _X ** len(powers) - sum(sympy.Rational(c.numerator, c.denominator) * _X ** i for i, c in enumerate(coeffs))
            return Poly(terms, _X, domain=QQ)
        powers.append(nxt)


def split_central(
    ca: ClassAlgebra, f: Tuple[Fraction, ...], rng: Optional[random.Random] = None, attempts: int = 24
) -> List[Tuple[Fraction, ...]]:
    """Primitive central idempotents summing to the central idempotent f."""
    rng = rng or random.Random(get_settings().random_seed)
    dimension = _rank([ca.mul(ca.unit(i), f) for i in range(ca.size)])
    if dimension <= 1:
        return [f]
    for _ in range(attempts):
        z = ca.mul(tuple(Fraction(rng.randint(-4, 4)) for _ in range(ca.size)), f)
        mu = _minimal_polynomial(ca, z, f)
        _, factors = mu.factor_list()
        if len(factors) == 1:
            if mu.degree() == dimension:
                return [f]
            continue
        pieces: List[Tuple[Fraction, ...]] = []
        for phi, _ in factors:
            cofactor = mu.quo(phi)
            selector = (cofactor * cofactor.invert(phi)).rem(mu)
            coeffs = [to_fraction(c) for c in selector.all_coeffs()]
            piece = _evaluate(ca, coeffs, z, f)
            pieces.extend(split_central(ca, piece, rng, attempts))
        return pieces
    logger.warning(f"{ca.group.name}: could not split a central block of dimension {dimension}")
    return [f]


def block_center(G: FiniteGroup, e_vec: Tuple[Fraction, ...], ca: ClassAlgebra) -> AbelianNumberField:
    """Center of QG e: the field fixed by the k with C_(g^k) e = C_g e for all g."""
    m = group_exponent(G)
    base = [ca.mul(ca.unit(i), e_vec) for i in range(ca.size)]
    fixing = [
        k for k in unit_residues(m)
        if all(ca.mul(ca.unit(ca.power_class(i, k)), e_vec) == base[i] for i in range(ca.size))
    ]
    return field_of(m, fixing)


def _trace_against(q: GroupAlgebraElement, e: GroupAlgebraElement) -> Fraction:
    """Identity coefficient of q * e."""
    inv = e.group.inv
    return sum((a * e.coeffs[inv[x]] for x, a in enumerate(q.coeffs) if a), Fraction(0))


def _reduced_rank(q: GroupAlgebraElement, e: GroupAlgebraElement, field_degree: int, degree: int) -> int:
    value = Fraction(e.group.order) * _trace_against(q, e) / (field_degree * degree)
    if value.denominator != 1:
        raise AlgebraError(f"non-integral reduced rank {value}")
    return int(value)


def _candidate_idempotents(G: FiniteGroup) -> Iterator[GroupAlgebraElement]:
    for S in subgroups(G):
        yield hat(G, S)
    for S in subgroups(G):
        gens = S.generators()
        if len(gens) != 1 or S.order < 3:
            continue
        for K in subgroups(G):
            if K.elements < S.elements:
                yield epsilon(G, S, K)


def _scalar(target: GroupAlgebraElement, unit: GroupAlgebraElement) -> Optional[Fraction]:
    """lambda with target = lambda * unit."""
    ratio = None
    for a, b in zip(target.coeffs, unit.coeffs):
        if b == 0:
            if a != 0:
                return None
            continue
        if ratio is None:
            ratio = a / b
        elif a != ratio * b:
            return None
    return ratio


def _anticommuting_pair(e: GroupAlgebraElement) -> Optional[Tuple[int, int]]:
    """g, h whose images anticommute in QG e and square to +-e."""
    G = e.group
    act = scalar_action(e)
    if -1 not in act:
        return None
    candidates = [g for g in range(G.order) if act[g] is None and act[G.mul[g][g]] is not None]
    for i, g in enumerate(candidates):
        for h in candidates[i + 1:]:
            if act[G.commutator(g, h)] == -1:
                return g, h
    return None


def anticommuting_symbol(e: GroupAlgebraElement) -> Optional[Tuple[int, int]]:
    """(alpha, beta) from g, h whose images anticommute with (ge)^2 = alpha e, (he)^2 = beta e."""
    pair = _anticommuting_pair(e)
    if pair is None:
        return None
    G = e.group
    act = scalar_action(e)
    g, h = pair
    return act[G.mul[g][g]], act[G.mul[h][h]]


def quaternion_symbol_in(unit: GroupAlgebraElement, elements: Iterable[GroupAlgebraElement]) -> Optional[Tuple[int, int]]:
    """Symbol of a quaternion algebra over Q with identity ``unit``, spanned by ``elements``.

    ``elements`` is consumed lazily.
    """
    pool: List[GroupAlgebraElement] = []
    source = iter(elements)

    def members() -> Iterator[GroupAlgebraElement]:
        i = 0
        while True:
            if i == len(pool):
                nxt = next(source, None)
                if nxt is None:
                    return
                pool.append(nxt)
            yield pool[i]
            i += 1

    for x in members():
        if x.is_zero() or _scalar(x, unit) is not None:
            continue
        coeffs = _solve([x.coeffs, unit.coeffs], (x * x).coeffs)
        if coeffs is None:
            continue
        x0 = x - unit.scale(coeffs[0] / 2)
        alpha = _scalar(x0 * x0, unit)
        if not alpha:
            continue
        for w in members():
            y = x0 * w - w * x0
            if y.is_zero():
                continue
            beta = _scalar(y * y, unit)
            if beta:
                return squarefree_part(alpha), squarefree_part(beta)
    return None


def corner_symbol(e: GroupAlgebraElement, q: GroupAlgebraElement) -> Optional[Tuple[int, int]]:
    """Quaternion symbol of the corner algebra (qe) QG (qe) of reduced degree 2 over Q."""
    G = e.group
    Q = q * e
    corner = ((Q * GroupAlgebraElement.basis(G, g)) * Q for g in range(G.order))
    return quaternion_symbol_in(Q, corner)


def tensor_block(e: GroupAlgebraElement) -> Optional[SimpleAlgebraDescriptor]:
    """QG e with center Q and degree 4 as B (x) C_A(B), B spanned by an anticommuting pair.

    Averaging the conjugations by 1, g, h, gh projects QG e onto the
    centralizer of B, and the Brauer class is the sum of the two symbols.
    """
    pair = _anticommuting_pair(e)
    if pair is None:
        return None
    G = e.group
    g, h = pair
    act = scalar_action(e)
    first = (act[G.mul[g][g]], act[G.mul[h][h]])
    twisted = (g, h, G.mul[g][h])
    seen = set()
    centralizer: List[GroupAlgebraElement] = []
    for x in range(G.order):
        a = e.left_translate(x)
        average = a
        for t in twisted:
            average = average + a.conjugate(t)
        if average.is_zero() or average.coeffs in seen:
            continue
        seen.add(average.coeffs)
        centralizer.append(average)
    second = quaternion_symbol_in(e, centralizer)
    if second is None:
        return None
    ramified = ramified_places(*first) ^ ramified_places(*second)
    logger.debug(f"{G.name}: block splits as {first} (x) {second}, ramified at {sorted(map(str, ramified))}")
    if not ramified:
        return SimpleAlgebraDescriptor(RATIONALS, 4, FIELD_PART)
    data = BrauerData.build(RATIONALS, {int(p): 2 for p in ramified if p != INFINITY}, INFINITY in ramified)
    return SimpleAlgebraDescriptor(RATIONALS, 2, division_part_from_brauer(data))


def unidentified_descriptor(center: AbelianNumberField, degree: int) -> SimpleAlgebraDescriptor:
    return SimpleAlgebraDescriptor(center, degree, DivisionPart(DivisionKind.UNKNOWN, 1))


def identify_block(G: FiniteGroup, e: GroupAlgebraElement, ca: ClassAlgebra) -> Tuple[SimpleAlgebraDescriptor, Optional[str]]:
    """Identify QG e from the primitive central idempotent e alone."""
    e_vec = ca.from_element(e)
    center = block_center(G, e_vec, ca)
    dim_q = G.order * e.trace
    f = center.degree
    square = dim_q / f
    degree = int(round(float(square) ** 0.5))
    if degree * degree != square:
        raise AlgebraError(f"block of dimension {dim_q} is not central simple over a field of degree {f}")

    bound = degree
    corner: Optional[GroupAlgebraElement] = None
    for q in _candidate_idempotents(G):
        rho = _reduced_rank(q, e, f, degree)
        if rho == 0:
            continue
        bound = gcd(bound, rho)
        if rho == 2 and corner is None:
            corner = q
        if bound == 1:
            break
    if center.is_totally_real():
        bound = gcd(bound, 2)
    if bound == 1:
        return SimpleAlgebraDescriptor(center, degree, FIELD_PART), None

    symbol = None
    if degree == 2:
        symbol = anticommuting_symbol(e)
    if symbol is None and center.is_rational:
        if degree == 2:
            corner = GroupAlgebraElement.one(G)
        if corner is not None:
            symbol = corner_symbol(e, corner)
    if symbol is not None:
        a, b = symbol
        return symbol_descriptor(a, b, center, degree // 2), None
    if center.is_rational and degree == 4:
        descriptor = tensor_block(e)
        if descriptor is not None:
            return descriptor, None
    note = f"identified up to degree: center {center.pretty()}, degree {degree}, Schur index divides {bound}"
    logger.warning(f"{G.name}: {note}")
    return unidentified_descriptor(center, degree), note


def identify_residual(G: FiniteGroup, e_vec: Tuple[Fraction, ...], ca: ClassAlgebra) -> ComponentRecord:
    e = ca.to_element(e_vec)
    descriptor, note = identify_block(G, e, ca)
    dim_q = int(G.order * e.trace)
    return ComponentRecord(e, descriptor, dim_q, kernel_of(e), None, "residual", note)


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------

@dataclass
class Decomposition:
    group: FiniteGroup
    components: List[ComponentRecord]
    complete: bool
    notes: List[str] = field(default_factory=list)

    def __iter__(self) -> Iterator[ComponentRecord]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def faithful(self) -> List[ComponentRecord]:
        return [c for c in self.components if c.faithful]

    def names(self) -> Counter:
        return Counter(c.name for c in self.components)

    def is_identified(self) -> bool:
        return all(c.descriptor.is_identified() for c in self.components)


def decompose(G: FiniteGroup, method: Optional[str] = None) -> Decomposition:
    cache_key = ("decomposition", method)
    cached = G._cache.get(cache_key)
    if cached is not None:
        return cached
    ca = ClassAlgebra(G)
    enumeration = ssp_enumerate(G, method, ca)
    components = [identify(G, pair, ca) for pair in enumeration.pairs]
    notes: List[str] = []
    if not enumeration.complete:
        notes.append(INCOMPLETE_NOTE)
        covered = tuple(sum(col, Fraction(0)) for col in zip(*enumeration.idempotents)) if enumeration.idempotents else tuple(
            Fraction(0) for _ in range(ca.size)
        )
        residual = tuple(a - b for a, b in zip(ca.one(), covered))
        if any(residual):
            for block in split_central(ca, residual):
                components.append(identify_residual(G, block, ca))
    total = sum(c.dim_q for c in components)
    complete = total == G.order
    notes.extend(c.note for c in components if c.note)
    components.sort(key=lambda c: (c.dim_q, c.name))
    result = Decomposition(G, components, complete, notes)
    if not complete:
        logger.warning(f"{G.name}: components cover dimension {total} of {G.order}")
    logger.info(f"decomposed Q[{G.name}] into {len(components)} components")
    G._cache[cache_key] = result
    return result


def component_quotient(G: FiniteGroup, record: ComponentRecord) -> Tuple[FiniteGroup, GroupHom]:
    """Ge = G / ker(g -> ge) with the canonical surjection."""
    cached = record._quotient.get("value")
    if cached is not None:
        return cached
    if record.kernel.is_trivial():
        value = (G, GroupHom(G, G, tuple(range(G.order))))
    else:
        value = quotient(G, record.kernel, name=f"{G.name}/{record.kernel.order}")
    record._quotient["value"] = value
    return value


# ---------------------------------------------------------------------------
# Extension of scalars to an imaginary quadratic field
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtendedComponent:
    source: ComponentRecord
    descriptor: SimpleAlgebraDescriptor
    copies: int

    @property
    def classification(self) -> Classification:
        return classify(self.descriptor)

    @property
    def name(self) -> str:
        return self.descriptor.name()


def _extend_descriptor(desc: SimpleAlgebraDescriptor, L: AbelianNumberField) -> Tuple[SimpleAlgebraDescriptor, int]:
    F = desc.center
    copies = 2 if F.contains(L) else 1
    target = F if copies == 2 else F.compositum(L)
    division = desc.division
    if division.kind == DivisionKind.FIELD:
        return SimpleAlgebraDescriptor(target, desc.matrix_size, FIELD_PART), copies
    brauer = division.brauer or (division.symbol.brauer() if division.symbol else None)
    if brauer is None:
        return unidentified_descriptor(target, desc.degree), copies
    extended = brauer.extend_to(L)
    size = desc.matrix_size * division.degree // extended.index
    if extended.index == 1:
        return SimpleAlgebraDescriptor(target, size, FIELD_PART), copies
    if division.kind == DivisionKind.QUATERNION and division.symbol and extended.index == 2:
        return symbol_descriptor(division.symbol.a, division.symbol.b, target, size), copies
    return SimpleAlgebraDescriptor(target, size, division_part_from_brauer(extended)), copies


def change_scalars(decomposition: Decomposition, d: int) -> List[ExtendedComponent]:
    """Components of Q(sqrt(d)) G from those of QG, d < 0 squarefree."""
    if d >= 0 or squarefree_part(d) != d:
        raise ParameterMismatchError(f"Q(sqrt({d})) is not an imaginary quadratic field")
    L = quadratic_field(d)
    extended: List[ExtendedComponent] = []
    for record in decomposition:
        if not record.descriptor.is_identified():
            extended.append(ExtendedComponent(record, unidentified_descriptor(record.descriptor.center.compositum(L), record.descriptor.degree), 1))
            continue
        descriptor, copies = _extend_descriptor(record.descriptor, L)
        extended.append(ExtendedComponent(record, descriptor, copies))
    return extended
