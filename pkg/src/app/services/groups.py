"""
Finite groups stored as full multiplication tables.

Elements are the indices ``0 .. order-1`` with 0 the identity. Every
constructor funnels through :class:`FiniteGroup`, which validates the table
and eagerly computes inverses, element orders and conjugacy classes.
Subgroup lattices are computed on demand and memoized per group.
"""

from __future__ import annotations

import logging
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import gcd, lcm
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

from ..errors import ElementCapError, InvalidActionError, LatticeTooLargeError, NotNormalError, UndecidedError
from ..settings import get_settings
from .numbers import prime_divisors

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    name: str
    mul: Tuple[Tuple[int, ...], ...]
    generators: Tuple[int, ...] = ()
    generator_names: Tuple[str, ...] = ()
    labels: Tuple[str, ...] = ()
    inv: Tuple[int, ...] = field(init=False)
    orders: Tuple[int, ...] = field(init=False)
    classes: Tuple[Tuple[int, ...], ...] = field(init=False)
    class_of: Tuple[int, ...] = field(init=False)
    _cache: dict = field(init=False, default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        n = len(self.mul)
        if n == 0:
            raise InvalidActionError("a group needs at least one element")
        _check_table(self.name, self.mul)
        inv = tuple(row.index(0) for row in self.mul)
        object.__setattr__(self, "inv", inv)

        orders = []
        for x in range(n):
            k, y = 1, x
            while y != 0:
                y = self.mul[y][x]
                k += 1
            orders.append(k)
        object.__setattr__(self, "orders", tuple(orders))

        if not self.generators:
            object.__setattr__(self, "generators", _greedy_generators(self))
        if len(self.generator_names) != len(self.generators):
            names = tuple(f"g{i + 1}" for i in range(len(self.generators)))
            object.__setattr__(self, "generator_names", names)
        if len(self.labels) != n:
            object.__setattr__(self, "labels", tuple("1" if x == 0 else f"e{x}" for x in range(n)))

        class_of = [-1] * n
        classes: List[Tuple[int, ...]] = []
        for x in range(n):
            if class_of[x] >= 0:
                continue
            orbit = {x}
            frontier = [x]
            while frontier:
                y = frontier.pop()
                for g in self.generators:
                    z = self.mul[self.mul[g][y]][inv[g]]
                    if z not in orbit:
                        orbit.add(z)
                        frontier.append(z)
            for y in orbit:
                class_of[y] = len(classes)
            classes.append(tuple(sorted(orbit)))
        object.__setattr__(self, "classes", tuple(classes))
        object.__setattr__(self, "class_of", tuple(class_of))

    @property
    def order(self) -> int:
        return len(self.mul)

    @property
    def identity(self) -> int:
        return 0

    def op(self, x: int, y: int) -> int:
        return self.mul[x][y]

    def power(self, x: int, k: int) -> int:
        k %= self.orders[x]
        y = 0
        for _ in range(k):
            y = self.mul[y][x]
        return y

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return self.mul[self.mul[g][x]][self.inv[g]]

    def commutator(self, x: int, y: int) -> int:
        """x^-1 y^-1 x y"""
        return self.mul[self.mul[self.inv[x]][self.inv[y]]][self.mul[x][y]]

    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a] for a in self.generators for b in self.generators)

    def generate(self, gens: Iterable[int]) -> FrozenSet[int]:
        return _closure(self, tuple(gens))

    def cyclic_subgroup(self, x: int) -> FrozenSet[int]:
        members = [0]
        y = x
        while y != 0:
            members.append(y)
            y = self.mul[y][x]
        return frozenset(members)

    def whole(self) -> "Subgroup":
        return Subgroup(self, frozenset(range(self.order)))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, frozenset({0}))

    def subgroup(self, gens: Iterable[int]) -> "Subgroup":
        return Subgroup(self, self.generate(gens))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(compare=False, repr=False)
    elements: FrozenSet[int]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self.elements

    def __iter__(self):
        return iter(sorted(self.elements))

    def __le__(self, other: "Subgroup") -> bool:
        return self.elements <= other.elements

    def __lt__(self, other: "Subgroup") -> bool:
        return self.elements < other.elements

    def index_in(self, other: "Subgroup") -> int:
        return other.order // self.order

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def generators(self) -> Tuple[int, ...]:
        G = self.parent
        gens: List[int] = []
        span: FrozenSet[int] = frozenset({0})
        for x in sorted(self.elements, key=lambda e: (-G.orders[e], e)):
            if x not in span:
                gens.append(x)
                span = _closure(G, tuple(gens))
                if len(span) == len(self.elements):
                    break
        return tuple(gens)

    def as_group(self, name: Optional[str] = None) -> Tuple[FiniteGroup, Tuple[int, ...]]:
        """Re-index the subgroup as a standalone group; also returns the embedding."""
        G = self.parent
        members = sorted(self.elements)
        index = {x: i for i, x in enumerate(members)}
        table = tuple(tuple(index[G.mul[x][y]] for y in members) for x in members)
        gens = tuple(index[g] for g in self.generators())
        labels = tuple(G.labels[x] for x in members)
        group = FiniteGroup(name or f"sub({G.name})", table, gens, (), labels)
        return group, tuple(members)


@dataclass(frozen=True, eq=False)
class GroupHom:
    domain: FiniteGroup
    codomain: FiniteGroup
    images: Tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.images[x]

    @property
    def generator_images(self) -> Tuple[int, ...]:
        return tuple(self.images[g] for g in self.domain.generators)

    def kernel(self) -> Subgroup:
        return Subgroup(self.domain, frozenset(x for x, y in enumerate(self.images) if y == 0))

    def image(self) -> Subgroup:
        return Subgroup(self.codomain, frozenset(self.images))

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.domain.order


ASSOCIATIVITY_EXHAUSTIVE_LIMIT = 64
ASSOCIATIVITY_SAMPLES = 100_000


@lru_cache(maxsize=256)
def _validated(mul: Tuple[Tuple[int, ...], ...]) -> Optional[str]:
    n = len(mul)
    full = set(range(n))
    for x, row in enumerate(mul):
        if len(row) != n or set(row) != full:
            return f"row {x} is not a permutation"
    for y in range(n):
        if {row[y] for row in mul} != full:
            return f"column {y} is not a permutation"
    for x in range(n):
        if mul[x][0] != x or mul[0][x] != x:
            return "element 0 is not the identity"
    if n <= ASSOCIATIVITY_EXHAUSTIVE_LIMIT:
        for a, row in enumerate(mul):
            for b in range(n):
                if mul[row[b]] != tuple(row[c] for c in mul[b]):
                    return f"associativity fails for ({a}, {b}, *)"
        return None
    rng = random.Random(get_settings().random_seed)
    for _ in range(ASSOCIATIVITY_SAMPLES):
        a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            return f"associativity fails for ({a}, {b}, {c})"
    return None


def _check_table(name: str, mul: Tuple[Tuple[int, ...], ...]) -> None:
    """Latin square with identity 0; associative on all triples up to order 64, sampled above."""
    problem = _validated(tuple(tuple(row) for row in mul))
    if problem is not None:
        raise InvalidActionError(f"the table for {name} is not a group: {problem}")


def _closure(G: FiniteGroup, gens: Tuple[int, ...]) -> FrozenSet[int]:
    found = {0}
    frontier = [0]
    gens = tuple(g for g in gens if g != 0)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = G.mul[x][g]
            if y not in found:
                found.add(y)
                frontier.append(y)
    return frozenset(found)


def _greedy_generators(G: FiniteGroup) -> Tuple[int, ...]:
    gens: List[int] = []
    span: FrozenSet[int] = frozenset({0})
    for x in sorted(range(G.order), key=lambda e: (-G.orders[e], e)):
        if len(span) == G.order:
            break
        if x not in span:
            gens.append(x)
            span = _closure(G, tuple(gens))
    return tuple(gens)


def extend_hom(
    domain: FiniteGroup, gens: Sequence[int], images: Sequence[int], codomain: FiniteGroup
) -> Optional[Dict[int, int]]:
    """Extend generator images to a map on the generated subgroup, or None if not well defined."""
    mapping = {0: 0}
    frontier = deque([0])
    pairs = list(zip(gens, images))
    while frontier:
        x = frontier.popleft()
        fx = mapping[x]
        for g, img in pairs:
            y = domain.mul[x][g]
            fy = codomain.mul[fx][img]
            known = mapping.get(y)
            if known is None:
                mapping[y] = fy
                frontier.append(y)
            elif known != fy:
                return None
    return mapping


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def from_closure(
    name: str,
    gens: Sequence[Hashable],
    mul_fn: Callable[[Hashable, Hashable], Hashable],
    identity: Hashable,
    gen_names: Sequence[str] = (),
    label_fn: Callable[[Hashable], str] = str,
    cap: Optional[int] = None,
) -> FiniteGroup:
    """Close a generating set under ``mul_fn`` and tabulate the result."""
    cap = cap or get_settings().matrix_element_cap
    elements = [identity]
    index = {identity: 0}
    frontier = deque([identity])
    while frontier:
        x = frontier.popleft()
        for g in gens:
            y = mul_fn(x, g)
            if y not in index:
                if len(elements) >= cap:
                    raise ElementCapError(f"closure of {name} exceeds {cap} elements")
                index[y] = len(elements)
                elements.append(y)
                frontier.append(y)
    table = tuple(tuple(index[mul_fn(x, y)] for y in elements) for x in elements)
    gen_idx = tuple(index[g] for g in gens)
    logger.debug(f"closure of {name}: {len(elements)} elements from {len(gens)} generators")
    return FiniteGroup(name, table, gen_idx, tuple(gen_names), tuple(label_fn(e) for e in elements))


def cyclic(n: int) -> FiniteGroup:
    if n <= 0:
        raise InvalidActionError(f"cyclic group order must be positive, got {n}")
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    gens = (1,) if n > 1 else ()
    labels = tuple("1" if i == 0 else ("a" if i == 1 else f"a^{i}") for i in range(n))
    return FiniteGroup(f"C{n}", table, gens, ("a",) if n > 1 else (), labels)


def trivial_group() -> FiniteGroup:
    return cyclic(1)


def direct_product(A: FiniteGroup, B: FiniteGroup, name: Optional[str] = None) -> FiniteGroup:
    nb = B.order
    table = tuple(
        tuple(A.mul[a1][a2] * nb + B.mul[b1][b2] for a2 in range(A.order) for b2 in range(nb))
        for a1 in range(A.order)
        for b1 in range(nb)
    )
    gens = tuple(a * nb for a in A.generators) + tuple(b for b in B.generators)
    names = tuple(f"({g},1)" for g in A.generator_names) + tuple(f"(1,{g})" for g in B.generator_names)
    labels = tuple(f"({A.labels[a]},{B.labels[b]})" for a in range(A.order) for b in range(nb))
    return FiniteGroup(name or f"{A.name}x{B.name}", table, gens, names, labels)


def abelian(*orders: int) -> FiniteGroup:
    group = cyclic(orders[0] if orders else 1)
    for n in orders[1:]:
        group = direct_product(group, cyclic(n))
    return group


def metacyclic(m: int, k: int, r: int, t: int = 0, name: Optional[str] = None) -> FiniteGroup:
    """<a, b | a^m = 1, b^k = a^t, b a b^-1 = a^r>, elements a^i b^j stored at i*k + j."""
    if m <= 0 or k <= 0:
        raise InvalidActionError("metacyclic parameters must be positive")
    r %= m
    t %= m
    if pow(r, k, m) != 1 % m or gcd(r, m) != 1:
        raise InvalidActionError(f"a -> a^{r} does not define an action of order dividing {k} on C{m}")
    if (r * t - t) % m:
        raise InvalidActionError(f"b^{k} = a^{t} is not fixed by the action a -> a^{r}")
    rpow = [pow(r, j, m) for j in range(k)]

    def index(i: int, j: int) -> int:
        return (i % m) * k + j

    rows = []
    for i in range(m):
        for j in range(k):
            row = []
            for p in range(m):
                for q in range(k):
                    carry = t if j + q >= k else 0
                    row.append(index(i + rpow[j] * p + carry, (j + q) % k))
            rows.append(tuple(row))
    pairs = [(g, label) for g, label in ((index(1, 0), "a"), (index(0, 1 % k), "b")) if g != 0]
    gens = tuple(g for g, _ in pairs)
    names = tuple(label for _, label in pairs)
    labels = tuple(_word(i, j) for i in range(m) for j in range(k))
    return FiniteGroup(name or f"C{m}:C{k}", tuple(rows), gens, names, labels)


def _word(i: int, j: int) -> str:
    parts = []
    if i:
        parts.append("a" if i == 1 else f"a^{i}")
    if j:
        parts.append("b" if j == 1 else f"b^{j}")
    return "".join(parts) or "1"


def dihedral(order: int) -> FiniteGroup:
    if order < 2 or order % 2:
        raise InvalidActionError(f"dihedral groups have even order, got {order}")
    return metacyclic(order // 2, 2, -1, 0, name=f"D{order}")


def dicyclic(order: int) -> FiniteGroup:
    if order < 4 or order % 4:
        raise InvalidActionError(f"dicyclic groups have order divisible by 4, got {order}")
    n = order // 4
    return metacyclic(2 * n, 2, -1, n, name=f"Q{order}")


def _two_power_exponent(order: int, minimum: int) -> int:
    k = order.bit_length() - 1
    if order != 1 << k or order < minimum:
        raise InvalidActionError(f"order must be a power of 2 at least {minimum}, got {order}")
    return k


def semidihedral(order: int) -> FiniteGroup:
    k = _two_power_exponent(order, 16)
    return metacyclic(1 << (k - 1), 2, (1 << (k - 2)) - 1, 0, name=f"SD{order}")


def modular(order: int) -> FiniteGroup:
    k = _two_power_exponent(order, 16)
    return metacyclic(1 << (k - 1), 2, (1 << (k - 2)) + 1, 0, name=f"M{order}")


def semidirect_product(
    N: FiniteGroup, H: FiniteGroup, generator_actions: Sequence[Sequence[int]], name: Optional[str] = None
) -> FiniteGroup:
    """N x| H where the i-th generator of H maps the generators of N to ``generator_actions[i]``."""
    if len(generator_actions) != len(H.generators):
        raise InvalidActionError(
            f"{len(H.generators)} generator actions expected for {H.name}, got {len(generator_actions)}"
        )
    automorphisms: List[Tuple[int, ...]] = []
    for images in generator_actions:
        mapping = extend_hom(N, N.generators, images, N)
        if mapping is None or len(mapping) != N.order or len(set(mapping.values())) != N.order:
            raise InvalidActionError(f"action {list(images)} is not an automorphism of {N.name}")
        automorphisms.append(tuple(mapping[x] for x in range(N.order)))

    identity = tuple(range(N.order))
    phi: Dict[int, Tuple[int, ...]] = {0: identity}
    frontier = deque([0])
    while frontier:
        h = frontier.popleft()
        for g, aut in zip(H.generators, automorphisms):
            target = H.mul[h][g]
            composed = tuple(phi[h][aut[x]] for x in range(N.order))
            known = phi.get(target)
            if known is None:
                phi[target] = composed
                frontier.append(target)
            elif known != composed:
                raise InvalidActionError(f"action of {H.name} on {N.name} is not a homomorphism")

    nh = H.order
    table = tuple(
        tuple(N.mul[n1][phi[h1][n2]] * nh + H.mul[h1][h2] for n2 in range(N.order) for h2 in range(nh))
        for n1 in range(N.order)
        for h1 in range(nh)
    )
    gens = tuple(x * nh for x in N.generators) + tuple(H.generators)
    names = tuple(N.generator_names) + tuple(H.generator_names)
    labels = tuple(_pair_label(N.labels[n], H.labels[h]) for n in range(N.order) for h in range(nh))
    return FiniteGroup(name or f"{N.name}:{H.name}", table, gens, names, labels)


def _pair_label(left: str, right: str) -> str:
    if right == "1":
        return left
    if left == "1":
        return right
    return f"{left}*{right}"


def power_action(N: FiniteGroup, k: int) -> Tuple[int, ...]:
    """Generator images of x -> x^k on an abelian group."""
    if not N.is_abelian():
        raise InvalidActionError(f"power maps are only automorphisms of abelian groups, {N.name} is not")
    exponent = group_exponent(N)
    if gcd(k, exponent) != 1:
        raise InvalidActionError(f"x -> x^{k} is not invertible on {N.name}")
    return tuple(N.power(g, k) for g in N.generators)


def swap_action(N: FiniteGroup, factor_order: int) -> Tuple[int, ...]:
    """Generator images of (x, y) -> (y, x) on a square X x X built by direct_product."""
    s = factor_order
    if s * s != N.order:
        raise InvalidActionError(f"swap needs a group of the form XxX, got {N.name}")
    return tuple((g % s) * s + g // s for g in N.generators)


def _mat_mul(p: int) -> Callable:
    def mul(a, b):
        size = len(a)
        return tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(size)) % p for j in range(size)) for i in range(size)
        )

    return mul


def _mat_label(m) -> str:
    return "[" + ";".join(",".join(str(x) for x in row) for row in m) + "]"


def _normalize_matrix(p: int, rows: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    size = len(rows)
    if size == 0 or any(len(r) != size for r in rows):
        raise InvalidActionError("matrix generators must be square")
    return tuple(tuple(int(x) % p for x in r) for r in rows)


def matrix_group(
    p: int, gens: Sequence[Sequence[Sequence[int]]], name: Optional[str] = None, cap: Optional[int] = None
) -> FiniteGroup:
    """Group generated by invertible matrices over F_p."""
    from sympy import Matrix

    mats = [_normalize_matrix(p, g) for g in gens]
    if len({len(m) for m in mats}) > 1:
        raise InvalidActionError("matrix generators must have a common size")
    for m in mats:
        if Matrix(m).det() % p == 0:
            raise InvalidActionError(f"matrix {_mat_label(m)} is singular modulo {p}")
    size = len(mats[0])
    identity = tuple(tuple(1 if i == j else 0 for j in range(size)) for i in range(size))
    names = tuple(f"m{i + 1}" for i in range(len(mats)))
    return from_closure(name or f"Mat({p})", mats, _mat_mul(p), identity, names, _mat_label, cap)


def special_linear(p: int) -> FiniteGroup:
    return matrix_group(p, [[[1, 1], [0, 1]], [[1, 0], [1, 1]]], name=f"SL(2,{p})")


def general_linear(p: int) -> FiniteGroup:
    from sympy.ntheory import primitive_root

    w = int(primitive_root(p)) if p > 2 else 1
    return matrix_group(p, [[[1, 1], [0, 1]], [[1, 0], [1, 1]], [[w, 0], [0, 1]]], name=f"GL(2,{p})")


def binary_octahedral() -> FiniteGroup:
    """The binary octahedral group, realized inside SL(2,7)."""
    p = 7
    mul = _mat_mul(p)
    # trace 3 squares to 2, so a has order 8
    a = ((0, p - 1), (1, 3))
    identity = ((1, 0), (0, 1))
    for w, x, y in product(range(p), repeat=3):
        z = (p - 1 - w) % p
        if (w * z - x * y) % p != 1:
            continue
        b = ((w, x), (y, z))
        try:
            group = from_closure("CSU(2,3)", [a, b], mul, identity, ("a", "b"), _mat_label, cap=48)
        except ElementCapError:
            continue
        if group.order == 48:
            return group
    raise InvalidActionError("no binary octahedral subgroup found in SL(2,7)")


def binary_icosahedral() -> FiniteGroup:
    return special_linear(5)


# Unit groups of the maximal orders that occur in exceptional 2x2 algebras.
NAMED_ORDER_UNITS: Dict[str, Callable[[], FiniteGroup]] = {
    "Z": lambda: cyclic(2),
    "I1": lambda: cyclic(4),
    "I2": lambda: cyclic(2),
    "I3": lambda: cyclic(6),
    "O2": lambda: special_linear(3),
    "O3": lambda: dicyclic(12),
    "O5": lambda: cyclic(6),
}


def unit_group(order_name: str) -> FiniteGroup:
    key = order_name.upper()
    if key not in NAMED_ORDER_UNITS:
        raise InvalidActionError(f"unknown order {order_name}; expected one of {sorted(NAMED_ORDER_UNITS)}")
    group = NAMED_ORDER_UNITS[key]()
    return FiniteGroup(f"U({key})", group.mul, group.generators, group.generator_names, group.labels)


def wreath_square(X: FiniteGroup, name: Optional[str] = None) -> FiniteGroup:
    """(X x X) x| C2 with C2 exchanging the factors."""
    square = direct_product(X, X)
    return semidirect_product(square, cyclic(2), [swap_action(square, X.order)], name=name or f"({X.name}x{X.name}):C2")


# ---------------------------------------------------------------------------
# Subgroup structure
# ---------------------------------------------------------------------------

def subgroups(G: FiniteGroup, cap: Optional[int] = None) -> List[Subgroup]:
    """All subgroups, by joining cyclic subgroups until nothing new appears."""
    cached = G._cache.get("subgroups")
    if cached is not None:
        return cached
    cap = cap or get_settings().lattice_cap
    if G.order > cap:
        raise LatticeTooLargeError(f"subgroup lattice of {G.name} (order {G.order}) exceeds the cap {cap}")
    cyclics: Dict[FrozenSet[int], Tuple[int, ...]] = {}
    for x in range(G.order):
        cyclics.setdefault(G.cyclic_subgroup(x), (x,))
    found: Dict[FrozenSet[int], Tuple[int, ...]] = dict(cyclics)
    frontier = list(cyclics)
    while frontier:
        fresh = []
        for S in frontier:
            gens = found[S]
            for C, (c,) in cyclics.items():
                if c in S:
                    continue
                joined = _closure(G, gens + (c,))
                if joined not in found:
                    found[joined] = gens + (c,)
                    fresh.append(joined)
        frontier = fresh
    result = sorted((Subgroup(G, S) for S in found), key=lambda s: (s.order, sorted(s.elements)))
    logger.debug(f"{G.name}: {len(result)} subgroups")
    G._cache["subgroups"] = result
    return result


def is_normal(G: FiniteGroup, S: Subgroup) -> bool:
    return all(G.conj(g, x) in S.elements for g in G.generators for x in S.elements)


def normal_closure(G: FiniteGroup, xs: Iterable[int]) -> Subgroup:
    members = set()
    for x in xs:
        members.update(G.classes[G.class_of[x]])
    return Subgroup(G, _closure(G, tuple(members)))


def normal_subgroups(G: FiniteGroup) -> List[Subgroup]:
    cached = G._cache.get("normal_subgroups")
    if cached is not None:
        return cached
    seeds: Dict[FrozenSet[int], Tuple[int, ...]] = {}
    for c in G.classes:
        seeds.setdefault(_closure(G, c), c)
    found = dict(seeds)
    frontier = list(found)
    while frontier:
        fresh = []
        for S in frontier:
            for T, t_gens in seeds.items():
                if T <= S:
                    continue
                gens = found[S] + t_gens
                joined = _closure(G, gens)
                if joined not in found:
                    found[joined] = gens
                    fresh.append(joined)
        frontier = fresh
    result = sorted((Subgroup(G, S) for S in found), key=lambda s: (s.order, sorted(s.elements)))
    G._cache["normal_subgroups"] = result
    return result


def conjugate_subgroup(G: FiniteGroup, S: Subgroup, g: int) -> Subgroup:
    return Subgroup(G, frozenset(G.conj(g, x) for x in S.elements))


def subgroup_class_representatives(G: FiniteGroup) -> List[Subgroup]:
    """One subgroup from each conjugacy class of subgroups."""
    cached = G._cache.get("subgroup_classes")
    if cached is not None:
        return cached
    seen: set = set()
    reps: List[Subgroup] = []
    for S in subgroups(G):
        if S.elements in seen:
            continue
        reps.append(S)
        orbit = {S.elements}
        frontier = [S.elements]
        while frontier:
            T = frontier.pop()
            for g in G.generators:
                U = frozenset(G.conj(g, x) for x in T)
                if U not in orbit:
                    orbit.add(U)
                    frontier.append(U)
        seen |= orbit
    G._cache["subgroup_classes"] = reps
    return reps


def normalizer(G: FiniteGroup, S: Subgroup) -> Subgroup:
    return Subgroup(G, frozenset(g for g in range(G.order) if all(G.conj(g, x) in S.elements for x in S.elements)))


def centralizer(G: FiniteGroup, xs: Iterable[int]) -> Subgroup:
    xs = list(xs)
    return Subgroup(G, frozenset(g for g in range(G.order) if all(G.mul[g][x] == G.mul[x][g] for x in xs)))


def center(G: FiniteGroup) -> Subgroup:
    return centralizer(G, G.generators)


def core(G: FiniteGroup, S: Subgroup) -> Subgroup:
    members = set(S.elements)
    for g in range(G.order):
        members &= {G.conj(g, x) for x in S.elements}
        if len(members) == 1:
            break
    return Subgroup(G, frozenset(members))


def commutator_subgroup(G: FiniteGroup, A: Subgroup, B: Subgroup) -> Subgroup:
    a_gens, b_gens = A.generators(), B.generators()
    # [A, B] is the normal closure in <A, B> of the generator commutators
    orbit = {G.commutator(a, b) for a in a_gens for b in b_gens}
    frontier = list(orbit)
    while frontier:
        x = frontier.pop()
        for g in a_gens + b_gens:
            y = G.conj(g, x)
            if y not in orbit:
                orbit.add(y)
                frontier.append(y)
    return Subgroup(G, _closure(G, tuple(orbit)))


def derived_subgroup(G: FiniteGroup, S: Optional[Subgroup] = None) -> Subgroup:
    S = S or G.whole()
    return commutator_subgroup(G, S, S)


def quotient(G: FiniteGroup, N: Subgroup, name: Optional[str] = None) -> Tuple[FiniteGroup, GroupHom]:
    if not is_normal(G, N):
        raise NotNormalError(f"subgroup of order {N.order} is not normal in {G.name}")
    rep_of: Dict[int, int] = {}
    reps: List[int] = []
    for g in range(G.order):
        if g in rep_of:
            continue
        coset = {G.mul[g][n] for n in N.elements}
        for x in coset:
            rep_of[x] = len(reps)
        reps.append(g)
    table = tuple(tuple(rep_of[G.mul[a][b]] for b in reps) for a in reps)
    gens = []
    names = []
    for g, gname in zip(G.generators, G.generator_names):
        image = rep_of[g]
        if image != 0 and image not in gens:
            gens.append(image)
            names.append(gname)
    labels = tuple(f"{G.labels[r]}N" if i else "1" for i, r in enumerate(reps))
    Q = FiniteGroup(name or f"{G.name}/{N.order}", table, tuple(gens), tuple(names), labels)
    hom = GroupHom(G, Q, tuple(rep_of[g] for g in range(G.order)))
    assert hom.kernel().elements == N.elements
    return Q, hom


def lower_central_series(G: FiniteGroup, S: Optional[Subgroup] = None) -> List[Subgroup]:
    S = S or G.whole()
    series = [S]
    while True:
        nxt = commutator_subgroup(G, series[-1], S)
        if nxt.elements == series[-1].elements:
            return series
        series.append(nxt)


def nilpotency_class(G: FiniteGroup, S: Optional[Subgroup] = None) -> Optional[int]:
    """Nilpotency class, or None when the group is not nilpotent."""
    series = lower_central_series(G, S)
    if not series[-1].is_trivial():
        return None
    return len(series) - 1


def derived_length(G: FiniteGroup, S: Optional[Subgroup] = None) -> Optional[int]:
    """Derived length, or None when the group is not solvable."""
    current = S or G.whole()
    length = 0
    while not current.is_trivial():
        nxt = derived_subgroup(G, current)
        if nxt.elements == current.elements:
            return None
        current = nxt
        length += 1
    return length


def p_core(G: FiniteGroup, p: int) -> Subgroup:
    """Largest normal p-subgroup."""
    best = G.trivial()
    for N in normal_subgroups(G):
        n = N.order
        while n % p == 0:
            n //= p
        if n == 1 and N.order > best.order:
            best = N
    return best


def fitting_subgroup(G: FiniteGroup) -> Subgroup:
    gens: List[int] = []
    for p in prime_divisors(G.order):
        gens.extend(p_core(G, p).generators())
    return Subgroup(G, _closure(G, tuple(gens)))


def spectrum(G: FiniteGroup) -> FrozenSet[int]:
    return frozenset(G.orders)


def group_exponent(G: FiniteGroup) -> int:
    return lcm(*G.orders)


def maximal_abelian_over(G: FiniteGroup, B: Subgroup) -> List[Subgroup]:
    """Maximal abelian subgroups containing B."""
    def abelian_set(S: FrozenSet[int]) -> bool:
        gens = Subgroup(G, S).generators()
        return all(G.mul[a][b] == G.mul[b][a] for a in gens for b in gens)

    candidates = [S for S in subgroups(G) if B.elements <= S.elements and abelian_set(S.elements)]
    return [S for S in candidates if not any(S.elements < T.elements for T in candidates)]


# ---------------------------------------------------------------------------
# Embeddings and isomorphism
# ---------------------------------------------------------------------------

def find_embedding(H: FiniteGroup, G: FiniteGroup, budget: Optional[int] = None) -> Optional[GroupHom]:
    """An injective homomorphism H -> G, None if none exists.

    Raises UndecidedError once ``budget`` search nodes are spent.
    """
    if G.order % H.order:
        return None
    if not spectrum(H) <= spectrum(G):
        return None
    budget = budget or get_settings().embed_budget
    gens = Subgroup(H, frozenset(range(H.order))).generators()
    if not gens:
        return GroupHom(H, G, (0,))
    by_order: Dict[int, List[int]] = {}
    for x in range(G.order):
        by_order.setdefault(G.orders[x], []).append(x)
    class_reps = {c[0] for c in G.classes}
    spent = 0
    chosen: List[int] = []

    def search(i: int) -> Optional[Dict[int, int]]:
        nonlocal spent
        if i == len(gens):
            mapping = extend_hom(H, gens, chosen, G)
            if mapping is not None and len(mapping) == H.order and len(set(mapping.values())) == H.order:
                return mapping
            return None
        pool = by_order.get(H.orders[gens[i]], [])
        if i == 0:
            pool = [x for x in pool if x in class_reps]
        for x in pool:
            spent += 1
            if spent > budget:
                raise UndecidedError(f"embedding search {H.name} -> {G.name} exceeded {budget} nodes")
            chosen.append(x)
            partial = extend_hom(H, gens[: i + 1], chosen, G)
            if partial is not None and len(set(partial.values())) == len(partial):
                found = search(i + 1)
                if found is not None:
                    return found
            chosen.pop()
        return None

    mapping = search(0)
    if mapping is None:
        return None
    return GroupHom(H, G, tuple(mapping[x] for x in range(H.order)))


def subgroup_embeds(H: FiniteGroup, G: FiniteGroup, budget: Optional[int] = None) -> bool:
    return find_embedding(H, G, budget) is not None


def fingerprint(G: FiniteGroup) -> Tuple:
    orders = tuple(sorted(Counter(G.orders).items()))
    class_sizes = tuple(sorted(Counter(len(c) for c in G.classes).items()))
    return (G.order, orders, class_sizes, center(G).order, derived_subgroup(G).order)


def is_isomorphic(A: FiniteGroup, B: FiniteGroup, budget: Optional[int] = None) -> bool:
    if A.order != B.order or fingerprint(A) != fingerprint(B):
        return False
    return find_embedding(A, B, budget) is not None
