"""Seeded random generators for matrices, points, and expressions.

All randomness in the package flows through a caller-supplied
``random.Random`` so that identical seeds give byte-identical runs.
Entries are small integers by default (denominator 1); pass
``denominators=True`` where genuinely rational entries matter.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .expr import Const, Inv, NcDomainError, NcExpr, Neg, Prod, Sum, Var, eval_expr
from .linalg import Mat, Rat


def random_rat(rng: random.Random, bound: int, denominators: bool = False) -> Rat:
    num = rng.randint(-bound, bound)
    den = rng.randint(1, 3) if denominators else 1
    return Fraction(num, den)


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int = 5,
                  denominators: bool = False) -> Mat:
    return Mat([[random_rat(rng, bound, denominators) for _ in range(cols)]
                for _ in range(rows)])


def random_point(rng: random.Random, d: int, n: int, bound: int = 5) -> tuple[Mat, ...]:
    """A random d-tuple of n x n integer matrices."""
    return tuple(random_matrix(rng, n, n, bound) for _ in range(d))


def random_invertible(rng: random.Random, n: int, bound: int = 5,
                      max_tries: int = 200) -> Mat:
    from .linalg import det
    for _ in range(max_tries):
        m = random_matrix(rng, n, n, bound)
        if det(m) != 0:
            return m
    raise RuntimeError("failed to sample an invertible matrix")


def random_strict_block_upper(rng: random.Random, s: int, m: int,
                              bound: int = 3) -> Mat:
    """Strictly block upper triangular sm x sm matrix (jointly nilpotent fodder)."""
    grid = [[random_matrix(rng, s, s, bound) if j > i else Mat.zero(s, s)
             for j in range(m)] for i in range(m)]
    return Mat.from_blocks(grid)


def random_expr(rng: random.Random, d: int, depth: int,
                inv_weight: float = 0.25) -> NcExpr:
    """A random expression tree; inverses appear with the given weight."""
    if depth == 0:
        if rng.random() < 0.25:
            return Const(Fraction(rng.randint(-3, 3)))
        return Var(rng.randint(1, d))
    r = rng.random()
    if r < inv_weight:
        return Inv(random_expr(rng, d, depth - 1, inv_weight))
    if r < inv_weight + 0.1:
        return Neg(random_expr(rng, d, depth - 1, inv_weight))
    left = random_expr(rng, d, depth - 1, inv_weight)
    right = random_expr(rng, d, rng.randint(0, depth - 1), inv_weight)
    return Sum(left, right) if rng.random() < 0.5 else Prod(left, right)


def find_in_domain_point(e: NcExpr, rng: random.Random, n: int, bound: int = 4,
                         max_tries: int = 60) -> tuple[Mat, ...] | None:
    """Sample a level-n point in dom(e), or None after max_tries misses."""
    d = max(e.arity(), 1)
    for _ in range(max_tries):
        x = random_point(rng, d, n, bound)
        try:
            eval_expr(e, x)
            return x
        except NcDomainError:
            continue
    return None


def random_nondegenerate_expr(rng: random.Random, d: int, depth: int, s: int,
                              bound: int = 3, max_tries: int = 200):
    """Sample (expression, centre) with the centre inside the expression's domain.

    Degenerate candidates (no centre found at level s) are discarded and
    resampled, so the returned pair is always usable for compilation.
    """
    for _ in range(max_tries):
        e = random_expr(rng, d, depth)
        if e.arity() == 0:
            continue
        y = find_in_domain_point(e, rng, s, bound, max_tries=30)
        if y is not None:
            return e, y[:max(e.arity(), 1)] + tuple(
                random_matrix(rng, s, s, bound) for _ in range(d - max(e.arity(), 1)))
    raise RuntimeError("failed to sample a non-degenerate expression")
