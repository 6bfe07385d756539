"""
Group-spec strings: parsing, printing and construction.

Grammar (whitespace is ignored)::

    Spec    := Factor ('x' Factor)*
    Factor  := Primary (':' Primary '(' Action ')')?
    Primary := Atom | '(' Spec ')'
    Atom    := 'C' n | 'D' n | 'Q' n | 'Dic' n | 'SD' n | 'M' n
             | 'SL(2,' p ')' | 'GL(2,' p ')' | 'SU(2,3)' | 'CSU(2,3)'
             | 'Mat(' p ')<' Matrix (',' Matrix)* '>'
    Matrix  := '[' Row (';' Row)* ']'      Row := int (',' int)*
    Action  := GenAction (',' GenAction)*  one entry per generator of the acting group
    GenAction := 'inv' | 'swap' | ['-'] int | '[' Word (';' Word)* ']'
    Word    := '1' | Letter ('*' Letter)*  Letter := 'g' i ('^' ['-'] e)

A bracketed action lists the images of the generators g1, g2, ... of the
normal factor. ``swap`` exchanges the factors of a square XxX.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import prod
from typing import Optional, Tuple, Union

from sympy import isprime

from ..errors import ElementCapError, GroupSpecSyntaxError, InvalidActionError
from ..settings import get_settings
from .groups import (
    FiniteGroup,
    binary_octahedral,
    cyclic,
    dicyclic,
    dihedral,
    direct_product,
    general_linear,
    matrix_group,
    modular,
    power_action,
    semidihedral,
    semidirect_product,
    special_linear,
    swap_action,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    kind: str
    n: int


@dataclass(frozen=True)
class MatrixAtom:
    p: int
    matrices: Tuple[Tuple[Tuple[int, ...], ...], ...]


@dataclass(frozen=True)
class DirectProduct:
    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class PowerAction:
    k: int


@dataclass(frozen=True)
class SwapAction:
    pass


Word = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class ImageAction:
    images: Tuple[Word, ...]


GenAction = Union[PowerAction, SwapAction, ImageAction]


@dataclass(frozen=True)
class Semidirect:
    normal: "Node"
    acting: "Node"
    actions: Tuple[GenAction, ...]


Node = Union[Atom, MatrixAtom, DirectProduct, Semidirect]

# longest names first so that prefixes do not shadow them
ATOM_NAMES = ("CSU", "Dic", "Mat", "SD", "SL", "GL", "SU", "C", "D", "Q", "M")


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def error(self, message: str, position: Optional[int] = None) -> GroupSpecSyntaxError:
        return GroupSpecSyntaxError(message, self.pos if position is None else position, self.text)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip()
        return self.text.startswith(token, self.pos)

    def accept(self, token: str) -> bool:
        if self.peek(token):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.accept(token):
            found = self.text[self.pos:self.pos + 1] or "end of input"
            raise self.error(f"expected {token!r}, found {found!r}")

    def integer(self, signed: bool = False) -> int:
        self.skip()
        start = self.pos
        if signed and self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise self.error("expected an integer", start)
        return int(self.text[start:self.pos])

    # -- grammar ----------------------------------------------------------
    def spec(self) -> Node:
        factors = [self.factor()]
        while self.accept("x"):
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else DirectProduct(tuple(factors))

    def factor(self) -> Node:
        normal = self.primary()
        if not self.accept(":"):
            return normal
        acting = self.primary()
        self.expect("(")
        actions = [self.gen_action()]
        while self.accept(","):
            actions.append(self.gen_action())
        self.expect(")")
        return Semidirect(normal, acting, tuple(actions))

    def primary(self) -> Node:
        if self.accept("("):
            inner = self.spec()
            self.expect(")")
            return inner
        return self.atom()

    def atom(self) -> Node:
        self.skip()
        start = self.pos
        name = next((a for a in ATOM_NAMES if self.text.startswith(a, self.pos)), None)
        if name is None:
            raise self.error("unknown group atom")
        self.pos += len(name)
        if name in ("SL", "GL", "SU", "CSU"):
            self.expect("(")
            two = self.integer()
            if two != 2:
                raise self.error(f"only 2x2 groups are supported, got degree {two}", start)
            self.expect(",")
            p = self.integer()
            self.expect(")")
            if name in ("SU", "CSU"):
                if p != 3:
                    raise self.error(f"{name}(2,{p}) is not supported, only {name}(2,3)", start)
                return Atom("CSU", 3)
            if not isprime(p):
                raise self.error(f"{p} is not a prime", start)
            return Atom(name, p)
        if name == "Mat":
            return self.matrix_atom(start)
        n = self.integer()
        _check_atom_order(name, n, self, start)
        return Atom(name, n)

    def matrix_atom(self, start: int) -> MatrixAtom:
        self.expect("(")
        p = self.integer()
        self.expect(")")
        if not isprime(p):
            raise self.error(f"{p} is not a prime", start)
        self.expect("<")
        matrices = [self.matrix()]
        while self.accept(","):
            matrices.append(self.matrix())
        self.expect(">")
        sizes = {len(m) for m in matrices}
        if len(sizes) != 1 or any(len(row) != len(m) for m in matrices for row in m):
            raise self.error("matrix generators must be square of a common size", start)
        return MatrixAtom(p, tuple(matrices))

    def matrix(self) -> Tuple[Tuple[int, ...], ...]:
        self.expect("[")
        rows = [self.row()]
        while self.accept(";"):
            rows.append(self.row())
        self.expect("]")
        return tuple(rows)

    def row(self) -> Tuple[int, ...]:
        entries = [self.integer(signed=True)]
        while self.accept(","):
            entries.append(self.integer(signed=True))
        return tuple(entries)

    def gen_action(self) -> GenAction:
        self.skip()
        start = self.pos
        if self.accept("inv"):
            return PowerAction(-1)
        if self.accept("swap"):
            return SwapAction()
        if self.accept("["):
            images = [self.word()]
            while self.accept(";"):
                images.append(self.word())
            self.expect("]")
            return ImageAction(tuple(images))
        if self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "-"):
            return PowerAction(self.integer(signed=True))
        raise self.error("malformed action: expected inv, swap, an integer or [images]", start)

    def word(self) -> Word:
        if self.accept("1"):
            return ()
        letters = [self.letter()]
        while self.accept("*"):
            letters.append(self.letter())
        return tuple(letters)

    def letter(self) -> Tuple[int, int]:
        self.skip()
        start = self.pos
        if not self.accept("g"):
            raise self.error("expected a generator g<i>")
        index = self.integer()
        if index < 1:
            raise self.error("generators are numbered from 1", start)
        exponent = self.integer(signed=True) if self.accept("^") else 1
        return (index, exponent)


def _check_atom_order(name: str, n: int, parser: _Parser, start: int) -> None:
    if name == "C" and n >= 1:
        return
    if name == "D" and n >= 2 and n % 2 == 0:
        return
    if name in ("Q", "Dic") and n >= 4 and n % 4 == 0:
        return
    if name in ("SD", "M") and n >= 16 and n & (n - 1) == 0:
        return
    raise parser.error(f"order {n} is out of range for {name}", start)


def parse(text: str) -> Node:
    parser = _Parser(text)
    node = parser.spec()
    parser.skip()
    if parser.pos != len(text):
        raise parser.error("unexpected trailing input")
    return node


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

def _print_word(word: Word) -> str:
    if not word:
        return "1"
    return "*".join(f"g{i}" if e == 1 else f"g{i}^{e}" for i, e in word)


def _print_action(action: GenAction) -> str:
    if isinstance(action, SwapAction):
        return "swap"
    if isinstance(action, PowerAction):
        return "inv" if action.k == -1 else str(action.k)
    return "[" + ";".join(_print_word(w) for w in action.images) + "]"


def _print_matrix(m: Tuple[Tuple[int, ...], ...]) -> str:
    return "[" + ";".join(",".join(str(x) for x in row) for row in m) + "]"


def to_text(node: Node) -> str:
    if isinstance(node, Atom):
        if node.kind in ("SL", "GL"):
            return f"{node.kind}(2,{node.n})"
        if node.kind == "CSU":
            return "CSU(2,3)"
        return f"{node.kind}{node.n}"
    if isinstance(node, MatrixAtom):
        return f"Mat({node.p})<" + ",".join(_print_matrix(m) for m in node.matrices) + ">"
    if isinstance(node, DirectProduct):
        return "x".join(f"({to_text(f)})" if isinstance(f, DirectProduct) else to_text(f) for f in node.factors)

    def operand(x: Node) -> str:
        return f"({to_text(x)})" if isinstance(x, (DirectProduct, Semidirect)) else to_text(x)

    actions = ",".join(_print_action(a) for a in node.actions)
    return f"{operand(node.normal)}:{operand(node.acting)}({actions})"


# ---------------------------------------------------------------------------
# Builder
# ---------------------------------------------------------------------------

_ATOM_ORDERS = {"CSU": lambda n: 48, "SL": lambda p: p * (p * p - 1), "GL": lambda p: (p * p - 1) * (p * p - p)}


def predicted_order(node: Node) -> Optional[int]:
    """Order of the group a spec describes, None for matrix literals."""
    if isinstance(node, Atom):
        return _ATOM_ORDERS.get(node.kind, lambda n: n)(node.n)
    if isinstance(node, MatrixAtom):
        return None
    if isinstance(node, DirectProduct):
        orders = [predicted_order(f) for f in node.factors]
        return None if None in orders else prod(orders)
    left, right = predicted_order(node.normal), predicted_order(node.acting)
    return None if left is None or right is None else left * right


def _evaluate_word(N: FiniteGroup, word: Word) -> int:
    x = 0
    for index, exponent in word:
        if index > len(N.generators):
            raise InvalidActionError(f"g{index} does not exist in {N.name}")
        x = N.mul[x][N.power(N.generators[index - 1], exponent)]
    return x


def _action_images(N: FiniteGroup, action: GenAction) -> Tuple[int, ...]:
    if isinstance(action, PowerAction):
        if action.k == 1:
            return tuple(N.generators)
        return power_action(N, action.k)
    if isinstance(action, SwapAction):
        side = round(N.order ** 0.5)
        return swap_action(N, side)
    if len(action.images) != len(N.generators):
        raise InvalidActionError(
            f"{len(action.images)} images given for the {len(N.generators)} generators of {N.name}"
        )
    return tuple(_evaluate_word(N, w) for w in action.images)


def _build(node: Node, cap: int) -> FiniteGroup:
    if isinstance(node, Atom):
        kind, n = node.kind, node.n
        if kind == "C":
            return cyclic(n)
        if kind == "D":
            return dihedral(n)
        if kind in ("Q", "Dic"):
            return dicyclic(n)
        if kind == "SD":
            return semidihedral(n)
        if kind == "M":
            return modular(n)
        if kind == "SL":
            return special_linear(n)
        if kind == "GL":
            return general_linear(n)
        return binary_octahedral()
    if isinstance(node, MatrixAtom):
        return matrix_group(node.p, node.matrices, name=to_text(node), cap=cap)
    if isinstance(node, DirectProduct):
        group = _build(node.factors[0], cap)
        for factor in node.factors[1:]:
            group = direct_product(group, _build(factor, cap))
        return group
    N = _build(node.normal, cap)
    H = _build(node.acting, cap)
    images = [_action_images(N, a) for a in node.actions]
    return semidirect_product(N, H, images, name=to_text(node))


def _renamed(G: FiniteGroup, name: str) -> FiniteGroup:
    if G.name == name:
        return G
    return FiniteGroup(name, G.mul, G.generators, G.generator_names, G.labels)


def build(spec: Union[str, Node], cap: Optional[int] = None) -> FiniteGroup:
    """Construct the group a spec describes, named by its canonical text."""
    node = parse(spec) if isinstance(spec, str) else spec
    cap = cap or get_settings().matrix_element_cap
    order = predicted_order(node)
    if order is not None and order > cap:
        raise ElementCapError(f"{to_text(node)} has order {order}, above the cap {cap}")
    group = _renamed(_build(node, cap), to_text(node))
    logger.debug(f"built {group.name} of order {group.order}")
    return group
