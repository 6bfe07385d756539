"""
Weighted Clifford algebras, Vahlen matrices and congruence levels.

For negative integers u, v the algebra Cliff_4^{u,v}(Q) is the Q-span of the
weighted blades

    1, sqrt|u| i1, sqrt|v| i2, sqrt|uv| i3, sqrt|uv| i1i2, sqrt|v| i1i3, sqrt|u| i2i3, i1i2i3

inside the real Clifford algebra with i_h^2 = -1. Elements are stored by their
rational coordinates against these blades, so all arithmetic is exact. Blades
are indexed by bitmasks (bit h for generator i_{h+1}); every generator carries
a weight given as half-exponents of (|u|, |v|), and a blade is normalised to the
square root of the squarefree part of its weight.

The same engine serves rank 2 (the weighted quaternions H_{u,v}(Q) inside
(-1,-1/R), with i = i1, j = i2, k = i1i2) and rank 4 (points of hyperbolic
5-space, with an unweighted i4).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ..errors import AlgebraError, BoundaryPointError, ParameterMismatchError
from .numbers import euler_phi, format_rational, legendre

logger = logging.getLogger(__name__)

# half-exponents of (|u|, |v|) carried by i1, i2, i3, i4
GENERATOR_WEIGHTS: Tuple[Tuple[int, int], ...] = ((1, 0), (0, 1), (1, 1), (0, 0))

# coordinate order 1, i1, i2, i3, i1i2, i1i3, i2i3, i1i2i3 as bitmasks
BASIS_ORDER: Tuple[int, ...] = (0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)
BASIS_LABELS: Tuple[str, ...] = ("1", "i1", "i2", "i3", "i1i2", "i1i3", "i2i3", "i1i2i3")

TORSION_DEGREE = 8


def _check_parameters(u: int, v: int) -> None:
    if not (isinstance(u, int) and isinstance(v, int)) or u >= 0 or v >= 0:
        raise ParameterMismatchError(f"Clifford parameters must be negative integers, got ({u}, {v})")


def _parity(mask: int) -> Tuple[int, int]:
    pu = pv = 0
    h = 0
    while mask:
        if mask & 1:
            pu += GENERATOR_WEIGHTS[h][0]
            pv += GENERATOR_WEIGHTS[h][1]
        mask >>= 1
        h += 1
    return pu % 2, pv % 2


def _blade_sign(s: int, t: int) -> int:
    """Sign of B_s * B_t = sign * B_{s ^ t} with every i_h^2 = -1."""
    swaps = 0
    shifted = s >> 1
    while shifted:
        swaps += bin(shifted & t).count("1")
        shifted >>= 1
    swaps += bin(s & t).count("1")
    return -1 if swaps % 2 else 1


@lru_cache(maxsize=None)
def _product_table(u: int, v: int, rank: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """table[s][t] = (s ^ t, factor) with (w_s B_s)(w_t B_t) = factor * w_{s^t} B_{s^t}."""
    au, av = abs(u), abs(v)
    size = 1 << rank
    rows = []
    for s in range(size):
        ps = _parity(s)
        row = []
        for t in range(size):
            pt = _parity(t)
            target = s ^ t
            pr = _parity(target)
            ku = (ps[0] + pt[0] - pr[0]) // 2
            kv = (ps[1] + pt[1] - pr[1]) // 2
            row.append((target, _blade_sign(s, t) * au ** ku * av ** kv))
        rows.append(tuple(row))
    return tuple(rows)


def _grade(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class CliffordElement:
    u: int
    v: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        _check_parameters(self.u, self.v)
        size = len(self.coeffs)
        if size not in (4, 8, 16):
            raise AlgebraError(f"a Clifford element has 4, 8 or 16 coordinates, got {size}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    # -- construction -----------------------------------------------------
    @classmethod
    def scalar(cls, u: int, v: int, value=1, rank: int = 3) -> "CliffordElement":
        coeffs = [Fraction(0)] * (1 << rank)
        coeffs[0] = Fraction(value)
        return cls(u, v, tuple(coeffs))

    @classmethod
    def blade(cls, u: int, v: int, mask: int, value=1, rank: int = 3) -> "CliffordElement":
        coeffs = [Fraction(0)] * (1 << rank)
        coeffs[mask] = Fraction(value)
        return cls(u, v, tuple(coeffs))

    @classmethod
    def from_alphas(cls, u: int, v: int, alphas: Sequence) -> "CliffordElement":
        """Element of Cliff_4^{u,v}(Q) from its eight coordinates in basis order."""
        if len(alphas) != 8:
            raise AlgebraError(f"expected 8 coefficients, got {len(alphas)}")
        coeffs = [Fraction(0)] * 8
        for mask, a in zip(BASIS_ORDER, alphas):
            coeffs[mask] = Fraction(a)
        return cls(u, v, tuple(coeffs))

    @classmethod
    def vector(cls, u: int, v: int, coords: Sequence, rank: int = 3) -> "CliffordElement":
        """x0 + x1 w1 i1 + ... for the generators of the given rank."""
        if len(coords) != rank + 1:
            raise AlgebraError(f"a vector of rank {rank} has {rank + 1} coordinates")
        coeffs = [Fraction(0)] * (1 << rank)
        coeffs[0] = Fraction(coords[0])
        for h, x in enumerate(coords[1:]):
            coeffs[1 << h] = Fraction(x)
        return cls(u, v, tuple(coeffs))

    # -- structure --------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.coeffs).bit_length() - 1

    def alphas(self) -> Tuple[Fraction, ...]:
        if self.rank != 3:
            raise AlgebraError("basis-order coordinates exist for Cliff_4 only")
        return tuple(self.coeffs[m] for m in BASIS_ORDER)

    def _same(self, other: "CliffordElement") -> None:
        if (self.u, self.v, self.rank) != (other.u, other.v, other.rank):
            raise ParameterMismatchError(
                f"Clifford elements over ({self.u},{self.v}) rank {self.rank} "
                f"and ({other.u},{other.v}) rank {other.rank}"
            )

    def lift(self, rank: int) -> "CliffordElement":
        if rank < self.rank:
            raise AlgebraError(f"cannot lift rank {self.rank} to rank {rank}")
        return CliffordElement(self.u, self.v, self.coeffs + (Fraction(0),) * ((1 << rank) - len(self.coeffs)))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._same(other)
        return CliffordElement(self.u, self.v, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        self._same(other)
        return CliffordElement(self.u, self.v, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CliffordElement":
        return CliffordElement(self.u, self.v, tuple(-a for a in self.coeffs))

    def scale(self, value) -> "CliffordElement":
        c = Fraction(value)
        return CliffordElement(self.u, self.v, tuple(a * c for a in self.coeffs))

    def __mul__(self, other) -> "CliffordElement":
        if not isinstance(other, CliffordElement):
            return self.scale(other)
        return cliff_mul(self, other)

    def __rmul__(self, value) -> "CliffordElement":
        return self.scale(value)

    # -- involutions ------------------------------------------------------
    def _signed(self, sign) -> "CliffordElement":
        return CliffordElement(self.u, self.v, tuple(a if sign(m) > 0 else -a for m, a in enumerate(self.coeffs)))

    def prime(self) -> "CliffordElement":
        return conj_prime(self)

    def star(self) -> "CliffordElement":
        return conj_star(self)

    def bar(self) -> "CliffordElement":
        return conj_bar(self)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_scalar(self) -> bool:
        return not any(self.coeffs[1:])

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.coeffs)

    def is_vector(self) -> bool:
        return all(not a for m, a in enumerate(self.coeffs) if _grade(m) > 1)

    def norm_squared(self) -> Fraction:
        """|a|^2, the Euclidean norm in the unweighted blade basis."""
        au, av = abs(self.u), abs(self.v)
        total = Fraction(0)
        for m, a in enumerate(self.coeffs):
            if a:
                pu, pv = _parity(m)
                total += a * a * au ** pu * av ** pv
        return total

    def inverse(self) -> "CliffordElement":
        n = self * self.bar()
        if n.is_scalar():
            if not n.coeffs[0]:
                raise AlgebraError(f"{self} is not invertible")
            return self.bar().scale(1 / n.coeffs[0])
        size = len(self.coeffs)
        columns = [cliff_mul(self, CliffordElement.blade(self.u, self.v, m, rank=self.rank)).coeffs for m in range(size)]
        matrix = sympy.Matrix(size, size, lambda i, j: sympy.Rational(columns[j][i].numerator, columns[j][i].denominator))
        if matrix.rank() < size:
            raise AlgebraError(f"{self} is not invertible")
        rhs = sympy.Matrix([1] + [0] * (size - 1))
        solution = matrix.LUsolve(rhs)
        return CliffordElement(self.u, self.v, tuple(Fraction(int(x.p), int(x.q)) for x in solution))

    def serialize(self) -> List[str]:
        return [format_rational(a) for a in (self.alphas() if self.rank == 3 else self.coeffs)]

    def __repr__(self) -> str:
        terms = []
        for m, a in enumerate(self.coeffs):
            if a:
                label = "".join(f"i{h + 1}" for h in range(self.rank) if m >> h & 1) or "1"
                terms.append(f"{format_rational(a)}*{label}")
        return " + ".join(terms) if terms else "0"


def cliff_mul(x: CliffordElement, y: CliffordElement) -> CliffordElement:
    x._same(y)
    table = _product_table(x.u, x.v, x.rank)
    out = [Fraction(0)] * len(x.coeffs)
    right = [(t, b) for t, b in enumerate(y.coeffs) if b]
    for s, a in enumerate(x.coeffs):
        if not a:
            continue
        row = table[s]
        for t, b in right:
            target, factor = row[t]
            out[target] += a * b * factor
    return CliffordElement(x.u, x.v, tuple(out))


def conj_prime(x: CliffordElement) -> CliffordElement:
    """Main automorphism i_h -> -i_h."""
    return x._signed(lambda m: -1 if _grade(m) % 2 else 1)


def conj_star(x: CliffordElement) -> CliffordElement:
    """Reversion of blades."""
    return x._signed(lambda m: -1 if (_grade(m) * (_grade(m) - 1) // 2) % 2 else 1)


def conj_bar(x: CliffordElement) -> CliffordElement:
    return conj_star(conj_prime(x))


def is_vector(x: CliffordElement) -> bool:
    return x.is_vector()


def _basis_vectors(u: int, v: int, rank: int) -> List[CliffordElement]:
    return [CliffordElement.blade(u, v, 0, rank=rank)] + [
        CliffordElement.blade(u, v, 1 << h, rank=rank) for h in range(rank)
    ]


def is_clifford_group(x: CliffordElement) -> bool:
    """x invertible with x w (x')^-1 a vector for every basis vector w."""
    if x.is_zero():
        return False
    try:
        twisted = conj_prime(x).inverse()
    except AlgebraError:
        return False
    return all((x * w * twisted).is_vector() for w in _basis_vectors(x.u, x.v, x.rank))


def in_integral_clifford_group(x: CliffordElement) -> bool:
    return x.is_integral() and is_clifford_group(x)


# ---------------------------------------------------------------------------
# Central idempotents and the comparison maps
# ---------------------------------------------------------------------------

def epsilons(u: int, v: int) -> Tuple[CliffordElement, CliffordElement]:
    half = Fraction(1, 2)
    e1 = CliffordElement.from_alphas(u, v, [half, 0, 0, 0, 0, 0, 0, half])
    e2 = CliffordElement.from_alphas(u, v, [half, 0, 0, 0, 0, 0, 0, -half])
    return e1, e2


def epsilon_split(alpha: CliffordElement) -> Tuple[CliffordElement, CliffordElement]:
    """(a, b) in the rank-2 algebra with alpha = a e1 + b e2."""
    if alpha.rank != 3:
        raise AlgebraError("epsilon splitting is defined on Cliff_4")
    c = alpha.alphas()
    # c = (1, i1, i2, i3, i1i2, i1i3, i2i3, i1i2i3)
    a = (c[0] + c[7], c[1] - c[6], c[2] + c[5], c[4] - c[3])
    b = (c[0] - c[7], c[1] + c[6], c[2] - c[5], c[4] + c[3])
    return CliffordElement(alpha.u, alpha.v, a), CliffordElement(alpha.u, alpha.v, b)


def epsilon_join(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    e1, e2 = epsilons(a.u, a.v)
    return a.lift(3) * e1 + b.lift(3) * e2


@dataclass(frozen=True)
class QuaternionElement:
    """a0 + a1 i + a2 j + a3 k in (u, v / Q): i^2 = u, j^2 = v, ij = -ji = k."""

    u: int
    v: int
    coeffs: Tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self) -> None:
        if len(self.coeffs) != 4:
            raise AlgebraError("a quaternion has four coordinates")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def scalar(cls, u: int, v: int, value=1) -> "QuaternionElement":
        return cls(u, v, (Fraction(value), Fraction(0), Fraction(0), Fraction(0)))

    def _same(self, other: "QuaternionElement") -> None:
        if (self.u, self.v) != (other.u, other.v):
            raise ParameterMismatchError(f"quaternions over ({self.u},{self.v}) and ({other.u},{other.v})")

    def __add__(self, other: "QuaternionElement") -> "QuaternionElement":
        self._same(other)
        return QuaternionElement(self.u, self.v, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "QuaternionElement") -> "QuaternionElement":
        self._same(other)
        return QuaternionElement(self.u, self.v, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "QuaternionElement":
        return QuaternionElement(self.u, self.v, tuple(-a for a in self.coeffs))

    def __mul__(self, other: "QuaternionElement") -> "QuaternionElement":
        self._same(other)
        u, v = self.u, self.v
        a0, a1, a2, a3 = self.coeffs
        b0, b1, b2, b3 = other.coeffs
        return QuaternionElement(
            u,
            v,
            (
                a0 * b0 + u * a1 * b1 + v * a2 * b2 - u * v * a3 * b3,
                a0 * b1 + a1 * b0 - v * a2 * b3 + v * a3 * b2,
                a0 * b2 + a2 * b0 + u * a1 * b3 - u * a3 * b1,
                a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
            ),
        )

    def conjugate(self) -> "QuaternionElement":
        a0, a1, a2, a3 = self.coeffs
        return QuaternionElement(self.u, self.v, (a0, -a1, -a2, -a3))

    def reduced_norm(self) -> Fraction:
        a0, a1, a2, a3 = self.coeffs
        return a0 * a0 - self.u * a1 * a1 - self.v * a2 * a2 + self.u * self.v * a3 * a3

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def serialize(self) -> List[str]:
        return [format_rational(a) for a in self.coeffs]


def lambda_map(h: CliffordElement) -> QuaternionElement:
    """H_{u,v}(Q) -> (u, v / Q): a0 + a1 sqrt|u| i + a2 sqrt|v| j + a3 sqrt|uv| k -> a0 + a1 i + a2 j + a3 k."""
    if h.rank != 2:
        raise AlgebraError("lambda_map takes an element of the rank-2 weighted quaternions")
    return QuaternionElement(h.u, h.v, h.coeffs)


def chi(alpha: CliffordElement) -> QuaternionElement:
    """The algebra map Cliff_4^{u,v}(Q) -> (u, v / Q), alpha -> a under the epsilon splitting."""
    a, _ = epsilon_split(alpha)
    return lambda_map(a)


# ---------------------------------------------------------------------------
# Vahlen matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VahlenMatrix:
    a: CliffordElement
    b: CliffordElement
    c: CliffordElement
    d: CliffordElement

    def __post_init__(self) -> None:
        for entry in (self.b, self.c, self.d):
            self.a._same(entry)

    @classmethod
    def identity(cls, u: int, v: int) -> "VahlenMatrix":
        one = CliffordElement.scalar(u, v, 1)
        zero = CliffordElement.scalar(u, v, 0)
        return cls(one, zero, zero, one)

    @classmethod
    def from_entries(cls, u: int, v: int, entries: Sequence[Sequence]) -> "VahlenMatrix":
        """Four entries given as 8-coefficient lists in basis order: a, b, c, d."""
        if len(entries) != 4:
            raise AlgebraError(f"a Vahlen matrix has 4 entries, got {len(entries)}")
        return cls(*(CliffordElement.from_alphas(u, v, e) for e in entries))

    @property
    def parameters(self) -> Tuple[int, int]:
        return self.a.u, self.a.v

    def entries(self) -> Tuple[CliffordElement, ...]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "VahlenMatrix") -> "VahlenMatrix":
        return VahlenMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def pseudo_determinant(self) -> CliffordElement:
        return self.a * self.d.star() - self.b * self.c.star()

    def inverse(self) -> "VahlenMatrix":
        """Inverse of a member of SL_+: (d*, -b*; -c*, a*)."""
        return VahlenMatrix(self.d.star(), -self.b.star(), -self.c.star(), self.a.star())

    def __sub__(self, other: "VahlenMatrix") -> "VahlenMatrix":
        return VahlenMatrix(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def serialize(self) -> List[List[str]]:
        return [e.serialize() for e in self.entries()]


def membership_failures(M: VahlenMatrix, integral: bool = True) -> List[str]:
    """Names of the conditions of SL_+(Gamma_4^{u,v}) that M violates; empty for members."""
    failed: List[str] = []
    for label, entry in zip("abcd", M.entries()):
        if entry.is_zero():
            continue
        if integral and not entry.is_integral():
            failed.append(f"{label} integral")
        if not is_clifford_group(entry):
            failed.append(f"{label} in Clifford group")
    det = M.pseudo_determinant()
    if not (det.is_scalar() and det.coeffs[0] == 1):
        failed.append("ad* - bc* = 1")
    checks = {
        "ab* vector": M.a * M.b.star(),
        "cd* vector": M.c * M.d.star(),
        "c*a vector": M.c.star() * M.a,
        "d*b vector": M.d.star() * M.b,
    }
    failed.extend(name for name, value in checks.items() if not value.is_vector())
    return failed


def sl_plus_member(M: VahlenMatrix, integral: bool = True) -> bool:
    return not membership_failures(M, integral)


def con_member(M: VahlenMatrix, level: int) -> bool:
    """M in the principal congruence subgroup Con_level."""
    if level < 1:
        raise ParameterMismatchError(f"congruence level must be positive, got {level}")
    failed = membership_failures(M)
    if failed:
        raise AlgebraError(f"not in SL_+(Gamma_4^{M.parameters}(Z)): {', '.join(failed)}", error_code="NOT_MEMBER")
    difference = M - VahlenMatrix.identity(*M.parameters)
    return all((a / level).denominator == 1 for entry in difference.entries() for a in entry.coeffs)


def sigma_conjugate(M: VahlenMatrix) -> VahlenMatrix:
    """The matrix of z -> sigma(M(sigma(z))) with sigma(z) = -z'."""
    return VahlenMatrix(M.a.prime(), -M.b.prime(), -M.c.prime(), M.d.prime())


def hyperbolic_point(u: int, v: int, coords: Sequence) -> CliffordElement:
    """z0 + z1 sqrt|u| i1 + z2 sqrt|v| i2 + z3 sqrt|uv| i3 + z4 i4 with z4 > 0."""
    if len(coords) != 5:
        raise AlgebraError(f"a point of hyperbolic 5-space has 5 coordinates, got {len(coords)}")
    z4 = Fraction(coords[4])
    if z4 < 0:
        raise AlgebraError(f"z4 = {z4} lies outside the upper half space")
    if z4 == 0:
        raise BoundaryPointError("z4 = 0 is a boundary point")
    return CliffordElement.vector(u, v, coords, rank=4)


def point_coordinates(z: CliffordElement) -> Tuple[Fraction, ...]:
    return (z.coeffs[0],) + tuple(z.coeffs[1 << h] for h in range(4))


def mobius(M: VahlenMatrix, z: CliffordElement) -> CliffordElement:
    """(a z + b)(c z + d)^-1 on the upper half space."""
    if z.rank != 4 or not z.is_vector():
        raise AlgebraError("mobius acts on rank-4 vectors")
    if z.coeffs[8] <= 0:
        raise BoundaryPointError(f"{z} is not in the open upper half space")
    a, b, c, d = (e.lift(4) for e in M.entries())
    denominator = c * z + d
    try:
        inv = denominator.inverse()
    except AlgebraError:
        raise BoundaryPointError(f"c z + d is not invertible at {z}")
    return (a * z + b) * inv


# ---------------------------------------------------------------------------
# Sampling members
# ---------------------------------------------------------------------------

def translation(w: CliffordElement) -> VahlenMatrix:
    one = CliffordElement.scalar(w.u, w.v, 1)
    zero = CliffordElement.scalar(w.u, w.v, 0)
    return VahlenMatrix(one, w, zero, one)


def inversion(u: int, v: int) -> VahlenMatrix:
    one = CliffordElement.scalar(u, v, 1)
    zero = CliffordElement.scalar(u, v, 0)
    return VahlenMatrix(zero, one, -one, zero)


def elementary_generators(u: int, v: int, level: int = 1) -> List[VahlenMatrix]:
    """Translations by level * basis vectors, their transposes, and (at level 1) the inversion."""
    J = inversion(u, v)
    gens: List[VahlenMatrix] = []
    for w in _basis_vectors(u, v, 3):
        T = translation(w.scale(level))
        gens.append(T)
        gens.append(J @ T @ J.inverse())
    if level == 1:
        gens.append(J)
    return gens


def random_member(rng: random.Random, u: int, v: int, length: int = 4, level: int = 1) -> VahlenMatrix:
    gens = elementary_generators(u, v, level)
    M = VahlenMatrix.identity(u, v)
    for _ in range(length):
        g = rng.choice(gens)
        M = M @ (g if rng.random() < 0.5 else g.inverse())
    return M


def to_quaternion_matrix(M: VahlenMatrix) -> Tuple[Tuple[QuaternionElement, QuaternionElement], Tuple[QuaternionElement, QuaternionElement]]:
    a, b, c, d = (chi(e) for e in M.entries())
    return ((a, b), (c, d))


# ---------------------------------------------------------------------------
# The splitting embedding and torsion-free congruence levels
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _sqrt_field(u: int):
    return QQ.algebraic_field(sympy.sqrt(u))


def _quadratic(u: int, x: Fraction, y: Fraction):
    K = _sqrt_field(u)
    return K.from_sympy(sympy.Rational(x.numerator, x.denominator) + sympy.Rational(y.numerator, y.denominator) * sympy.sqrt(u))


def _iota_rows(q: QuaternionElement) -> List[List]:
    a, b, c, d = q.coeffs
    u, v = q.u, q.v
    return [
        [_quadratic(u, a, b), _quadratic(u, c, d)],
        [_quadratic(u, c * v, -d * v), _quadratic(u, a, -b)],
    ]


def iota(q: QuaternionElement) -> DomainMatrix:
    """(u, v / Q) -> M_2(Q(sqrt u)): a + bi + cj + dk -> (a+b√u, c+d√u; cv-dv√u, a-b√u)."""
    return DomainMatrix(_iota_rows(q), (2, 2), _sqrt_field(q.u))


def iota_matrix(rows: Sequence[Sequence[QuaternionElement]]) -> DomainMatrix:
    """Blockwise iota of a 2x2 quaternion matrix, a 4x4 matrix over Q(sqrt u)."""
    full: List[List] = []
    for row in rows:
        left, right = (_iota_rows(q) for q in row)
        full.extend(left[i] + right[i] for i in range(2))
    return DomainMatrix(full, (4, 4), _sqrt_field(rows[0][0].u))


def torsion_bound(degree: int = TORSION_DEGREE) -> int:
    """Largest n with phi(n) <= degree."""
    # phi(n) >= sqrt(n / 2)
    limit = 2 * degree * degree + 2
    return max(n for n in range(1, limit + 1) if euler_phi(n) <= degree)


@dataclass(frozen=True)
class TorsionLevel:
    u: int
    v: int
    bound: int
    prime: int

    def to_dict(self) -> Dict[str, int]:
        return {"u": self.u, "v": self.v, "bound": self.bound, "prime": self.prime}


def torsion_free_level(u: int, v: int, bound: Optional[int] = None) -> TorsionLevel:
    """Least prime q above the torsion bound with u a non-square mod q."""
    _check_parameters(u, v)
    B = torsion_bound() if bound is None else bound
    q = sympy.nextprime(B)
    while u % q == 0 or legendre(u, q) != -1:
        q = sympy.nextprime(q)
    logger.info(f"torsion-free congruence level for ({u},{v}): q = {q} (bound {B})")
    return TorsionLevel(u, v, B, int(q))
