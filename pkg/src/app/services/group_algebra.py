"""
Exact arithmetic in QG and in its center.

Elements of QG are dense coefficient vectors indexed by group elements.
Central elements are also handled in the class-sum basis through
:class:`ClassAlgebra`, where a vector v stands for sum_i v_i * C_i with C_i the
sum of the i-th conjugacy class.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..errors import AlgebraError, NotNormalError
from .groups import FiniteGroup, Subgroup
from .numbers import prime_divisors

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True, eq=False)
class GroupAlgebraElement:
    group: FiniteGroup
    coeffs: Tuple[Fraction, ...]

    @classmethod
    def zero(cls, G: FiniteGroup) -> "GroupAlgebraElement":
        return cls(G, (ZERO,) * G.order)

    @classmethod
    def one(cls, G: FiniteGroup) -> "GroupAlgebraElement":
        return cls.basis(G, 0)

    @classmethod
    def basis(cls, G: FiniteGroup, g: int, scalar=ONE) -> "GroupAlgebraElement":
        coeffs = [ZERO] * G.order
        coeffs[g] = Fraction(scalar)
        return cls(G, tuple(coeffs))

    @classmethod
    def from_dict(cls, G: FiniteGroup, values: Dict[int, Fraction]) -> "GroupAlgebraElement":
        coeffs = [ZERO] * G.order
        for g, c in values.items():
            coeffs[g] += Fraction(c)
        return cls(G, tuple(coeffs))

    def _check(self, other: "GroupAlgebraElement") -> None:
        if other.group is not self.group:
            raise AlgebraError("group algebra elements belong to different groups")

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check(other)
        return GroupAlgebraElement(self.group, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check(other)
        return GroupAlgebraElement(self.group, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.group, tuple(-a for a in self.coeffs))

    def scale(self, scalar) -> "GroupAlgebraElement":
        s = Fraction(scalar)
        return GroupAlgebraElement(self.group, tuple(a * s for a in self.coeffs))

    def __mul__(self, other) -> "GroupAlgebraElement":
        if not isinstance(other, GroupAlgebraElement):
            return self.scale(other)
        self._check(other)
        table = self.group.mul
        out = [ZERO] * self.group.order
        right = [(j, b) for j, b in enumerate(other.coeffs) if b]
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            row = table[i]
            for j, b in right:
                out[row[j]] += a * b
        return GroupAlgebraElement(self.group, tuple(out))

    def __rmul__(self, scalar) -> "GroupAlgebraElement":
        return self.scale(scalar)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupAlgebraElement) and other.group is self.group and other.coeffs == self.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def left_translate(self, g: int) -> "GroupAlgebraElement":
        """g * self"""
        out = [ZERO] * self.group.order
        row = self.group.mul[g]
        for x, a in enumerate(self.coeffs):
            if a:
                out[row[x]] = a
        return GroupAlgebraElement(self.group, tuple(out))

    def conjugate(self, g: int) -> "GroupAlgebraElement":
        """g * self * g^-1"""
        out = [ZERO] * self.group.order
        for x, a in enumerate(self.coeffs):
            if a:
                out[self.group.conj(g, x)] = a
        return GroupAlgebraElement(self.group, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_central(self) -> bool:
        return all(self.conjugate(g) == self for g in self.group.generators)

    def is_idempotent(self) -> bool:
        return self * self == self

    def support(self) -> List[int]:
        return [x for x, a in enumerate(self.coeffs) if a]

    @property
    def trace(self) -> Fraction:
        """Coefficient of the identity."""
        return self.coeffs[0]

    def augmentation(self) -> Fraction:
        return sum(self.coeffs, ZERO)

    def __repr__(self) -> str:
        labels = self.group.labels
        terms = [f"{a}*{labels[x]}" for x, a in enumerate(self.coeffs) if a]
        return " + ".join(terms[:12]) + (" + ..." if len(terms) > 12 else "") if terms else "0"


def hat(G: FiniteGroup, S: Iterable[int]) -> GroupAlgebraElement:
    """Average of the elements of a subgroup."""
    members = list(S.elements if isinstance(S, Subgroup) else S)
    weight = Fraction(1, len(members))
    return GroupAlgebraElement.from_dict(G, {x: weight for x in members})


def coset_generator(G: FiniteGroup, H: Subgroup, K: Subgroup) -> Tuple[int, int]:
    """An element of H generating the cyclic quotient H/K, with the order of that quotient."""
    k = H.order // K.order
    for h in sorted(H.elements, key=lambda x: -G.orders[x]):
        t, y = 1, h
        while y not in K.elements:
            y = G.mul[y][h]
            t += 1
        if t == k:
            return h, k
    raise AlgebraError(f"H/K is not cyclic (|H/K| = {k})")


def is_cyclic_quotient(G: FiniteGroup, H: Subgroup, K: Subgroup) -> bool:
    try:
        coset_generator(G, H, K)
    except AlgebraError:
        return False
    return True


def epsilon(G: FiniteGroup, H: Subgroup, K: Subgroup) -> GroupAlgebraElement:
    """The idempotent epsilon(H, K) of QH for K normal in H with H/K cyclic."""
    if not K.elements <= H.elements:
        raise NotNormalError("K is not contained in H")
    if not all(G.conj(h, x) in K.elements for h in H.generators() for x in K.elements):
        raise NotNormalError("K is not normal in H")
    if H.elements == K.elements:
        return hat(G, H)
    h, k = coset_generator(G, H, K)
    primes = prime_divisors(k)
    result = GroupAlgebraElement.zero(G)
    for mask in range(1 << len(primes)):
        chosen = [p for i, p in enumerate(primes) if mask >> i & 1]
        step = 1
        for p in chosen:
            step *= p
        M = G.generate(list(K.generators()) + [G.power(h, k // step)])
        term = hat(G, M)
        result = result - term if len(chosen) % 2 else result + term
    return result


class ClassAlgebra:
    """The center Z(QG) in the basis of class sums."""

    def __init__(self, G: FiniteGroup) -> None:
        self.group = G
        self.classes = G.classes
        self.size = len(G.classes)
        self._products: Dict[Tuple[int, int], Tuple[Tuple[int, int], ...]] = {}

    def class_product(self, i: int, j: int) -> Tuple[Tuple[int, int], ...]:
        """Nonzero structure constants (k, a_ijk) of C_i * C_j."""
        key = (i, j) if i <= j else (j, i)
        cached = self._products.get(key)
        if cached is not None:
            return cached
        G = self.group
        counts = [0] * self.size
        for x in self.classes[key[0]]:
            row = G.mul[x]
            for y in self.classes[key[1]]:
                counts[G.class_of[row[y]]] += 1
        result = tuple((k, c // len(self.classes[k])) for k, c in enumerate(counts) if c)
        self._products[key] = result
        return result

    def mul(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        out = [ZERO] * self.size
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, c in self.class_product(i, j):
                    out[k] += ab * c
        return tuple(out)

    def one(self) -> Tuple[Fraction, ...]:
        return self.unit(0)

    def unit(self, i: int) -> Tuple[Fraction, ...]:
        vec = [ZERO] * self.size
        vec[i] = ONE
        return tuple(vec)

    def to_element(self, v: Sequence[Fraction]) -> GroupAlgebraElement:
        G = self.group
        return GroupAlgebraElement(G, tuple(Fraction(v[G.class_of[x]]) for x in range(G.order)))

    def from_element(self, element: GroupAlgebraElement) -> Tuple[Fraction, ...]:
        return tuple(element.coeffs[c[0]] for c in self.classes)

    def power_class(self, i: int, k: int) -> int:
        G = self.group
        return G.class_of[G.power(self.classes[i][0], k)]

    def average_over_classes(self, element: GroupAlgebraElement, scale: Fraction) -> Tuple[Fraction, ...]:
        """scale / |C_i| * (sum of the coefficients of element over C_i), per class."""
        out = []
        for c in self.classes:
            total = sum((element.coeffs[x] for x in c), ZERO)
            out.append(scale * total / len(c))
        return tuple(out)


def central_idempotent_from_epsilon(
    ca: ClassAlgebra, eps: GroupAlgebraElement, centralizer_order: int
) -> Tuple[Fraction, ...]:
    """Sum of the distinct G-conjugates of eps, in the class basis."""
    return ca.average_over_classes(eps, Fraction(ca.group.order, centralizer_order))


def kernel_of(e: GroupAlgebraElement) -> Subgroup:
    """{g : g e = e}"""
    G = e.group
    members = frozenset(g for g in range(G.order) if e.left_translate(g) == e)
    return Subgroup(G, members)


def scalar_action(e: GroupAlgebraElement) -> List[Optional[int]]:
    """For each g, the sign s with g e = s e, or None when g does not act as +-1."""
    G = e.group
    out: List[Optional[int]] = []
    negative = tuple(-a for a in e.coeffs)
    for g in range(G.order):
        moved = e.left_translate(g).coeffs
        if moved == e.coeffs:
            out.append(1)
        elif moved == negative:
            out.append(-1)
        else:
            out.append(None)
    return out
