"""
Exact number theory for the component computations.

Rationals are ``fractions.Fraction``. Cyclotomic elements live in the power
basis of zeta_m modulo the m-th cyclotomic polynomial, and every center that
shows up is an abelian number field described by a conductor m and a subgroup
H of (Z/m)^x (the subfield of Q(zeta_m) fixed by H).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy import Poly, QQ, cyclotomic_poly, factorint, totient
from sympy.ntheory import is_quad_residue, n_order

from ..errors import AlgebraError
from ..settings import get_settings

logger = logging.getLogger(__name__)

_X = sympy.Symbol("x")


# ---------------------------------------------------------------------------
# Elementary number theory
# ---------------------------------------------------------------------------

def euler_phi(n: int) -> int:
    if n <= 0:
        raise AlgebraError(f"euler_phi needs a positive integer, got {n}")
    return int(totient(n))


def mult_order(q: int, m: int) -> int:
    """Multiplicative order of q modulo m."""
    if m <= 0:
        raise AlgebraError(f"modulus must be positive, got {m}")
    if gcd(q, m) != 1:
        raise AlgebraError(f"{q} is not a unit modulo {m}")
    if m == 1:
        return 1
    return int(n_order(q % m, m))


def factor(n: int) -> List[int]:
    """Prime factors of |n| with multiplicity, ascending."""
    if n == 0:
        raise AlgebraError("cannot factor 0")
    primes: List[int] = []
    for p, e in sorted(factorint(abs(n)).items()):
        primes.extend([int(p)] * int(e))
    return primes


def prime_divisors(n: int) -> List[int]:
    return sorted({int(p) for p in factorint(abs(n))}) if abs(n) > 1 else []


def divisors(n: int) -> List[int]:
    return [int(d) for d in sympy.divisors(n)]


def squarefree_part(n) -> int:
    """Squarefree integer in the square class of the nonzero rational ``n``."""
    value = Fraction(n)
    if value == 0:
        raise AlgebraError("squarefree part of 0 is undefined")
    sign = -1 if value < 0 else 1
    number = abs(value.numerator) * value.denominator
    result = 1
    for p, e in factorint(number).items():
        if e % 2:
            result *= int(p)
    return sign * result


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n > 0."""
    if n <= 0:
        raise AlgebraError("kronecker symbol needs a positive modulus")
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    for p, e in factorint(n).items():
        result *= legendre(a, int(p)) ** int(e)
    return result


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    return 1 if is_quad_residue(a, p) else -1


def to_fraction(value) -> Fraction:
    """Convert a sympy rational (or anything Fraction accepts) to ``Fraction``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    r = sympy.Rational(value)
    return Fraction(int(r.p), int(r.q))


def format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# Residues
# ---------------------------------------------------------------------------

def reduce_residue(c: int, m: int) -> int:
    return c % m if m > 1 else 1


def unit_residues(m: int) -> List[int]:
    if m <= 2:
        return [1]
    return [c for c in range(1, m) if gcd(c, m) == 1]


def residue_closure(gens: Iterable[int], m: int) -> Tuple[int, ...]:
    """Subgroup of (Z/m)^x generated by ``gens``."""
    found = {1}
    frontier = [1]
    gens = [reduce_residue(g, m) for g in gens]
    for g in gens:
        if gcd(g, m) != 1:
            raise AlgebraError(f"{g} is not a unit modulo {m}")
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = reduce_residue(x * g, m)
            if y not in found:
                found.add(y)
                frontier.append(y)
    return tuple(sorted(found))


def lift_residues(residues: Iterable[int], m: int, big: int) -> Tuple[int, ...]:
    """Preimage in (Z/big)^x of a residue set mod m (m divides big)."""
    wanted = {reduce_residue(r, m) for r in residues}
    return tuple(c for c in unit_residues(big) if reduce_residue(c, m) in wanted)


def _split_off(m: int, p: int) -> Tuple[int, int]:
    a = 1
    while m % p == 0:
        m //= p
        a *= p
    return a, m


def decomposition_group(p: int, m: int) -> Tuple[int, ...]:
    """Residues c in (Z/m)^x whose prime-to-p part lies in the span of p."""
    _, rest = _split_off(m, p)
    powers = set(residue_closure([p], rest)) if rest > 1 else {1}
    return tuple(c for c in unit_residues(m) if reduce_residue(c, rest) in powers)


# ---------------------------------------------------------------------------
# Cyclotomic arithmetic
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic_coefficients(m: int) -> Tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    poly = Poly(cyclotomic_poly(m, _X), _X)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _check_conductor(m: int) -> None:
    cap = get_settings().conductor_cap
    if m <= 0:
        raise AlgebraError(f"conductor must be positive, got {m}")
    if m > cap:
        raise AlgebraError(f"conductor {m} exceeds the configured cap {cap}")


@dataclass(frozen=True)
class CyclotomicElement:
    conductor: int
    coeffs: Tuple[Fraction, ...]

    @classmethod
    def from_coeffs(cls, conductor: int, coeffs: Sequence) -> "CyclotomicElement":
        _check_conductor(conductor)
        phi = cyclotomic_coefficients(conductor)
        deg = len(phi) - 1
        work = [Fraction(c) for c in coeffs]
        for i in range(len(work) - 1, deg - 1, -1):
            c = work[i]
            if c:
                for k in range(deg + 1):
                    work[i - deg + k] -= c * phi[k]
        work = (work + [Fraction(0)] * deg)[:deg]
        return cls(conductor, tuple(work))

    @classmethod
    def zeta(cls, conductor: int, power: int = 1) -> "CyclotomicElement":
        exp = power % conductor
        coeffs = [Fraction(0)] * (exp + 1)
        coeffs[exp] = Fraction(1)
        return cls.from_coeffs(conductor, coeffs)

    @classmethod
    def rational(cls, conductor: int, value) -> "CyclotomicElement":
        return cls.from_coeffs(conductor, [Fraction(value)])

    def _same(self, other: "CyclotomicElement") -> None:
        if other.conductor != self.conductor:
            raise AlgebraError(f"conductor mismatch: {self.conductor} vs {other.conductor}")

    def __add__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        self._same(other)
        return CyclotomicElement(self.conductor, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CyclotomicElement":
        return CyclotomicElement(self.conductor, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        return self + (-other)

    def __mul__(self, other) -> "CyclotomicElement":
        if not isinstance(other, CyclotomicElement):
            scalar = Fraction(other)
            return CyclotomicElement(self.conductor, tuple(a * scalar for a in self.coeffs))
        self._same(other)
        product = [Fraction(0)] * (2 * len(self.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        product[i + j] += a * b
        return CyclotomicElement.from_coeffs(self.conductor, product)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CyclotomicElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicElement.rational(self.conductor, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def inverse(self) -> "CyclotomicElement":
        if self.is_zero():
            raise AlgebraError("cannot invert 0 in a cyclotomic field")
        if len(self.coeffs) == 1:
            return CyclotomicElement(self.conductor, (1 / self.coeffs[0],))
        modulus = Poly(list(reversed(cyclotomic_coefficients(self.conductor))), _X, domain=QQ)
        poly = Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)], _X, domain=QQ)
        inv = poly.invert(modulus)
        return CyclotomicElement.from_coeffs(
            self.conductor, [to_fraction(c) for c in reversed(inv.all_coeffs())]
        )

    def galois_apply(self, k: int) -> "CyclotomicElement":
        """Image under the automorphism zeta -> zeta^k."""
        m = self.conductor
        if gcd(k, m) != 1:
            raise AlgebraError(f"{k} is not a unit modulo {m}")
        image = [Fraction(0)] * m
        for i, a in enumerate(self.coeffs):
            if a:
                image[(i * k) % m] += a
        return CyclotomicElement.from_coeffs(m, image)

    def rational_value(self) -> Optional[Fraction]:
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __str__(self) -> str:
        terms = []
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            coeff = format_rational(a)
            if mono and a == 1:
                terms.append(mono)
            elif mono and a == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{coeff}{'*' + mono if mono else ''}")
        return " + ".join(terms) if terms else "0"


def gaussian_period(m: int, subgroup: Sequence[int], shift: int = 1) -> CyclotomicElement:
    """Sum of zeta_m^(shift*h) over h in the subgroup."""
    total = [Fraction(0)] * m
    for h in subgroup:
        total[(shift * h) % m] += 1
    return CyclotomicElement.from_coeffs(m, total)


# ---------------------------------------------------------------------------
# Abelian number fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbelianNumberField:
    """The subfield of Q(zeta_conductor) fixed by ``galois_subgroup``.

    Instances built through :func:`field_of` always carry the minimal
    conductor, so equality of instances is equality of fields.
    """

    conductor: int
    galois_subgroup: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return euler_phi(self.conductor) // len(self.galois_subgroup)

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def is_totally_real(self) -> bool:
        return self.conductor <= 2 or (self.conductor - 1) in self.galois_subgroup

    def signature(self) -> Tuple[int, int]:
        if self.is_totally_real():
            return (self.degree, 0)
        return (0, self.degree // 2)

    def lifted(self, modulus: int) -> Tuple[int, ...]:
        if modulus % self.conductor:
            raise AlgebraError(f"{modulus} is not a multiple of the conductor {self.conductor}")
        return lift_residues(self.galois_subgroup, self.conductor, modulus)

    def contains(self, other: "AbelianNumberField") -> bool:
        big = lcm(self.conductor, other.conductor)
        return set(self.lifted(big)) <= set(other.lifted(big))

    def compositum(self, other: "AbelianNumberField") -> "AbelianNumberField":
        big = lcm(self.conductor, other.conductor)
        return field_of(big, sorted(set(self.lifted(big)) & set(other.lifted(big))), check=False)

    def intersection(self, other: "AbelianNumberField") -> "AbelianNumberField":
        big = lcm(self.conductor, other.conductor)
        return field_of(big, residue_closure(self.lifted(big) + other.lifted(big), big), check=False)

    def local_degree(self, p: int) -> int:
        """Degree of the completion at any prime above p."""
        decomposition = set(decomposition_group(p, self.conductor))
        inside = decomposition & set(self.galois_subgroup)
        return len(decomposition) // len(inside)

    def quadratic_radicand(self) -> int:
        return quadratic_radicand(self)

    def quadratic_subfields(self) -> List[int]:
        """Radicands of the quadratic subfields, smallest |d| first."""
        m, H = self.conductor, set(self.galois_subgroup)
        seen = set()
        radicands = []
        for c in unit_residues(m):
            if c in H or reduce_residue(c * c, m) not in H:
                continue
            K = frozenset(H | {reduce_residue(c * h, m) for h in H})
            if K in seen:
                continue
            seen.add(K)
            sub = field_of(m, K, check=False)
            if sub.degree == 2:
                radicands.append(sub.quadratic_radicand())
        return sorted(radicands, key=lambda d: (abs(d), d))

    def serialize(self) -> str:
        residues = ",".join(str(h) for h in self.galois_subgroup)
        return f"Q(zeta_{self.conductor})^[{residues}]"

    def pretty(self) -> str:
        m, H = self.conductor, self.galois_subgroup
        if self.degree == 1:
            return "Q"
        if m == 4 and H == (1,):
            return "Q(i)"
        if self.degree == 2:
            return f"Q(sqrt({self.quadratic_radicand()}))"
        if H == (1,):
            return f"Q(zeta{m})"
        if H == (1, m - 1):
            return f"Q(zeta{m}+zeta{m}^-1)"
        if self.degree == 4:
            radicands = self.quadratic_subfields()
            if len(radicands) == 3:
                return f"Q(sqrt({radicands[0]}),sqrt({radicands[1]}))"
        return f"Q(zeta{m})^<{','.join(str(h) for h in H)}>"

    def __str__(self) -> str:
        return self.pretty()


def _minimal(m: int, subgroup: Sequence[int]) -> AbelianNumberField:
    members = set(subgroup)
    for d in divisors(m):
        kernel = [c for c in unit_residues(m) if reduce_residue(c, d) == 1]
        if all(c in members for c in kernel):
            reduced = tuple(sorted({reduce_residue(h, d) for h in members}))
            return AbelianNumberField(d, reduced)
    return AbelianNumberField(m, tuple(sorted(members)))


def field_of(m: int, subgroup: Iterable[int], check: bool = True) -> AbelianNumberField:
    """Fixed field of ``subgroup`` inside Q(zeta_m), normalized to its conductor."""
    _check_conductor(m)
    residues = {reduce_residue(h, m) for h in subgroup} or {1}
    if check:
        for h in residues:
            if gcd(h, m) != 1:
                raise AlgebraError(f"{h} is not a unit modulo {m}")
        closed = all(reduce_residue(a * b, m) in residues for a in residues for b in residues)
        if not closed or 1 not in residues:
            raise AlgebraError(f"residues {sorted(residues)} are not a subgroup of (Z/{m})^x")
    return _minimal(m, sorted(residues))


def fixed_field(m: int, generators: Iterable[int]) -> AbelianNumberField:
    return field_of(m, residue_closure(generators, m), check=False)


RATIONALS = AbelianNumberField(1, (1,))


def cyclotomic_field(m: int) -> AbelianNumberField:
    return field_of(m, [1])


def real_cyclotomic_field(m: int) -> AbelianNumberField:
    return fixed_field(m, [m - 1]) if m > 2 else RATIONALS


def quadratic_field(d: int) -> AbelianNumberField:
    """Q(sqrt(d)) for a squarefree d != 1."""
    if d == 1 or squarefree_part(d) != d:
        raise AlgebraError(f"{d} is not a squarefree integer other than 1")
    disc = d if d % 4 == 1 else 4 * d
    m = abs(disc)
    kernel = [c for c in unit_residues(m) if kronecker(disc, c) == 1]
    return field_of(m, kernel)


def quadratic_radicand(field: AbelianNumberField) -> int:
    """Squarefree d with field = Q(sqrt(d))."""
    if field.degree != 2:
        raise AlgebraError(f"{field.serialize()} is not a quadratic field")
    m, H = field.conductor, field.galois_subgroup
    sigma = next(c for c in unit_residues(m) if c not in H)
    for shift in unit_residues(m):
        eta = gaussian_period(m, H, shift)
        theta = eta - eta.galois_apply(sigma)
        if theta.is_zero():
            continue
        square = (theta * theta).rational_value()
        if square is None:
            raise AlgebraError(f"period difference for {field.serialize()} does not square into Q")
        d = squarefree_part(square)
        expected = abs(d) if d % 4 == 1 else 4 * abs(d)
        assert expected == m, f"conductor {m} inconsistent with radicand {d}"
        return d
    raise AlgebraError(f"no nonzero period difference found for {field.serialize()}")
