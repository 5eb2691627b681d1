"""Noncommutative rational expressions: AST, parser, printer, evaluators.

Grammar (whitespace-insensitive)::

    expr    := term (('+'|'-') term)*
    term    := factor ('*' factor)*
    factor  := '-' factor | postfix
    postfix := atom ('^-1')*
    atom    := rational | variable | '(' expr ')' | 'inv' '(' expr ')'

Rational literals are ``p`` or ``p/q`` (the slash binds only inside a
literal; there is no division operator -- inversion is ``^-1`` or
``inv(...)``).  Variables are x1, x2, ... with any positive index.

Evaluation is exact over QQ.  A failed inversion raises
:class:`NcDomainError` carrying the path (tuple of child positions) of the
offending inversion node, so callers can pinpoint which inverse broke.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .linalg import Mat, Rat, SingularMatrixError, format_rat, inverse


# -- AST ----------------------------------------------------------------


@dataclass(frozen=True)
class NcExpr:
    def children(self) -> tuple["NcExpr", ...]:
        return ()

    def arity(self) -> int:
        """Smallest d such that every variable index is <= d."""
        return max((c.arity() for c in self.children()), default=0)


@dataclass(frozen=True)
class Const(NcExpr):
    value: Rat

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(NcExpr):
    index: int  # 1-based

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("variable index must be >= 1")

    def arity(self) -> int:
        return self.index


@dataclass(frozen=True)
class Sum(NcExpr):
    left: NcExpr
    right: NcExpr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Prod(NcExpr):
    left: NcExpr
    right: NcExpr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Neg(NcExpr):
    child: NcExpr

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Inv(NcExpr):
    child: NcExpr

    def children(self):
        return (self.child,)


def subexpr_at(e: NcExpr, path: tuple[int, ...]) -> NcExpr:
    for i in path:
        e = e.children()[i]
    return e


# -- parsing ------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(r"""
    (?P<rat>\d+(?:/\d+)?)
  | (?P<var>x\d+)
  | (?P<inv>\^-1|inv\b)
  | (?P<op>[-+*()])
  | (?P<ws>\s+)
  | (?P<bad>.)
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group()!r}", m.start())
        tokens.append((kind, m.group(), m.start()))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else ("eof", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, text, at = self.next()
        if text != value:
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", at)

    def parse(self) -> NcExpr:
        e = self.expr()
        kind, text, at = self.peek()
        if kind != "eof":
            raise ParseError(f"trailing input {text!r}", at)
        return e

    def expr(self) -> NcExpr:
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if text == "+":
                self.next()
                e = Sum(e, self.term())
            elif text == "-":
                self.next()
                e = Sum(e, Neg(self.term()))
            else:
                return e

    def term(self) -> NcExpr:
        e = self.factor()
        while self.peek()[1] == "*":
            self.next()
            e = Prod(e, self.factor())
        return e

    def factor(self) -> NcExpr:
        if self.peek()[1] == "-":
            self.next()
            return Neg(self.factor())
        return self.postfix()

    def postfix(self) -> NcExpr:
        e = self.atom()
        while self.peek()[1] == "^-1":
            self.next()
            e = Inv(e)
        return e

    def atom(self) -> NcExpr:
        kind, text, at = self.next()
        if kind == "rat":
            return Const(Fraction(text))
        if kind == "var":
            return Var(int(text[1:]))
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if text == "inv":
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Inv(e)
        raise ParseError(f"unexpected token {text or 'end of input'!r}", at)


def parse(text: str) -> NcExpr:
    """Parse an expression; raises ParseError with a position on bad input."""
    return _Parser(text).parse()


def pretty(e: NcExpr) -> str:
    """Print an expression so that parse(pretty(e)) == e."""
    def go(e: NcExpr, prec: int) -> str:
        if isinstance(e, Const):
            s = format_rat(e.value)
            return s if e.value >= 0 else _paren(s, prec > 1)
        if isinstance(e, Var):
            return f"x{e.index}"
        if isinstance(e, Sum):
            if isinstance(e.right, Neg):
                s = f"{go(e.left, 0)} - {go(e.right.child, 1)}"
            else:
                s = f"{go(e.left, 0)} + {go(e.right, 1)}"
            return _paren(s, prec > 0)
        if isinstance(e, Prod):
            s = f"{go(e.left, 1)}*{go(e.right, 2)}"
            return _paren(s, prec > 1)
        if isinstance(e, Neg):
            return _paren(f"-{go(e.child, 2)}", prec > 1)
        if isinstance(e, Inv):
            return f"{go(e.child, 3)}^-1"
        raise TypeError(f"unknown node {e!r}")

    def _paren(s: str, need: bool) -> str:
        return f"({s})" if need else s

    return go(e, 0)


# -- evaluation over matrix tuples ---------------------------------------


class NcDomainError(ArithmeticError):
    """An inversion inside the expression failed at the given point."""

    def __init__(self, path: tuple[int, ...], detail: str = ""):
        super().__init__(f"singular inversion at node path {path}" +
                         (f": {detail}" if detail else ""))
        self.path = path


MatTuple = tuple[Mat, ...]


def check_point(x: Sequence[Mat], d: int) -> MatTuple:
    x = tuple(x)
    if len(x) < d:
        raise ValueError(f"expression uses {d} variables, point has {len(x)}")
    n = x[0].rows
    for m in x:
        if m.shape != (n, n):
            raise ValueError("all matrices in a point must be square of equal size")
    return x


def eval_expr(e: NcExpr, x: Sequence[Mat]) -> Mat:
    """Exact evaluation at a tuple of n x n matrices; constants become c*I."""
    x = check_point(x, e.arity())
    n = x[0].rows if x else 1

    def go(e: NcExpr, path: tuple[int, ...]) -> Mat:
        if isinstance(e, Const):
            return Mat.identity(n).scale(e.value)
        if isinstance(e, Var):
            return x[e.index - 1]
        if isinstance(e, Sum):
            return go(e.left, path + (0,)) + go(e.right, path + (1,))
        if isinstance(e, Prod):
            return go(e.left, path + (0,)) * go(e.right, path + (1,))
        if isinstance(e, Neg):
            return -go(e.child, path + (0,))
        if isinstance(e, Inv):
            v = go(e.child, path + (0,))
            try:
                return inverse(v)
            except SingularMatrixError:
                raise NcDomainError(path) from None
        raise TypeError(f"unknown node {e!r}")

    return go(e, ())


def in_expr_domain(e: NcExpr, x: Sequence[Mat]) -> bool:
    try:
        eval_expr(e, x)
        return True
    except NcDomainError:
        return False


def eval_expr_algebra(e: NcExpr, a: Sequence, alg) -> object:
    """Evaluate over a unital algebra handle; see :mod:`ncreal.algebra`."""
    d = e.arity()
    if len(a) < d:
        raise ValueError(f"expression uses {d} variables, got {len(a)} elements")

    def go(e: NcExpr, path: tuple[int, ...]):
        if isinstance(e, Const):
            return alg.smul(e.value, alg.one)
        if isinstance(e, Var):
            return a[e.index - 1]
        if isinstance(e, Sum):
            return alg.add(go(e.left, path + (0,)), go(e.right, path + (1,)))
        if isinstance(e, Prod):
            return alg.mul(go(e.left, path + (0,)), go(e.right, path + (1,)))
        if isinstance(e, Neg):
            return alg.neg(go(e.child, path + (0,)))
        if isinstance(e, Inv):
            v = go(e.child, path + (0,))
            w = alg.try_invert(v)
            if w is None:
                raise NcDomainError(path, "not invertible in the algebra")
            return w
        raise TypeError(f"unknown node {e!r}")

    return go(e, ())


# -- sampling-based equivalence ------------------------------------------


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent_up_to_sampling: bool
    samples_compared: int
    counterexample: tuple[int, MatTuple] | None  # (level, point)

    def __bool__(self) -> bool:
        return self.equivalent_up_to_sampling


def equivalence_check(e1: NcExpr, e2: NcExpr, trials: int, levels: Sequence[int],
                      rng, bound: int = 5) -> EquivalenceVerdict:
    """Compare two expressions on random common-domain points.

    Returns a sampling verdict only: agreement never proves equivalence
    (the word problem is out of scope), a disagreement is a concrete
    counterexample.
    """
    from .sampling import random_point  # local import to avoid a cycle

    d = max(e1.arity(), e2.arity())
    compared = 0
    for level in levels:
        for _ in range(trials):
            x = random_point(rng, d, level, bound)
            try:
                v1 = eval_expr(e1, x)
                v2 = eval_expr(e2, x)
            except NcDomainError:
                continue
            compared += 1
            if v1 != v2:
                return EquivalenceVerdict(False, compared, (level, x))
    return EquivalenceVerdict(True, compared, None)


def iter_nodes(e: NcExpr) -> Iterator[tuple[tuple[int, ...], NcExpr]]:
    """Yield (path, node) pairs in preorder."""
    stack = [((), e)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for i, c in reversed(list(enumerate(node.children()))):
            stack.append((path + (i,), c))
