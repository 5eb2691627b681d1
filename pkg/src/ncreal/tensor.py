"""Blocked matrices with entries in tensor powers of K^{s x s}.

An order-l tensor entry is stored as a formal QQ-weighted sum of pure
tensors, each pure tensor being an l-tuple of s x s matrices.  The faux
product of two blocked matrices multiplies blocks by tensor concatenation
instead of matrix multiplication, which is exactly the bookkeeping needed
to expand noncommutative power series monomials without committing to an
evaluation order.

Only the brute-force series oracle needs this machinery, so the
representation favours transparency: a dict keyed by the matrix tuples,
merged and pruned after every operation (tuples built from the same
generator blocks always collide textually, which is all our comparisons
require).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .linalg import Mat, Rat

# weighted sum of pure tensors; key = tuple of s x s Mat factors
TensorEntry = dict[tuple[Mat, ...], Rat]


def tensor_zero() -> TensorEntry:
    return {}


def tensor_pure(*factors: Mat) -> TensorEntry:
    return {tuple(factors): Fraction(1)}


def tensor_add(a: TensorEntry, b: TensorEntry) -> TensorEntry:
    out = dict(a)
    for key, w in b.items():
        nw = out.get(key, Fraction(0)) + w
        if nw:
            out[key] = nw
        else:
            out.pop(key, None)
    return out


def tensor_concat(a: TensorEntry, b: TensorEntry) -> TensorEntry:
    """Tensor-product of two formal sums: concatenate factor tuples."""
    out: TensorEntry = {}
    for ka, wa in a.items():
        for kb, wb in b.items():
            key = ka + kb
            nw = out.get(key, Fraction(0)) + wa * wb
            if nw:
                out[key] = nw
            else:
                out.pop(key, None)
    return out


def tensor_is_zero(a: TensorEntry) -> bool:
    """Exact zero test: flatten pure tensors to Kronecker products and sum.

    The tensor product of matrix spaces embeds faithfully into Kronecker
    products, so cancellations between distinct pure tensors are detected.
    """
    live = {k: w for k, w in a.items()
            if w != 0 and not any(f.is_zero() for f in k)}
    if not live:
        return True
    from .linalg import kron
    total: Mat | None = None
    for key, w in live.items():
        flat = key[0]
        for factor in key[1:]:
            flat = kron(flat, factor)
        flat = flat.scale(w)
        total = flat if total is None else total + flat
    return total.is_zero()


def tensor_apply(a: TensorEntry, f: Callable[..., Mat], out_shape: tuple[int, int]) -> Mat:
    """Apply a multilinear map (given on tuples of factors) and sum up."""
    out = Mat.zero(*out_shape)
    for key, w in a.items():
        out = out + f(*key).scale(w)
    return out


def tensor_contract_product(a: TensorEntry, size: int) -> Mat:
    """Collapse each pure tensor by ordinary matrix multiplication.

    At block size 1 this turns the faux product back into the scalar
    product.  The empty tuple contracts to the identity.
    """
    out = Mat.zero(size, size)
    for key, w in a.items():
        m = Mat.identity(size)
        for factor in key:
            m = m * factor
        out = out + m.scale(w)
    return out


class BlockedTensorMatrix:
    """An m1 x m2 grid whose entries are formal tensor sums."""

    __slots__ = ("block_size", "rows", "cols", "grid")

    def __init__(self, block_size: int, grid: list[list[TensorEntry]]):
        self.block_size = block_size
        self.rows = len(grid)
        self.cols = len(grid[0]) if grid else 0
        if any(len(r) != self.cols for r in grid):
            raise ValueError("ragged grid")
        self.grid = grid

    @staticmethod
    def from_matrix(x: Mat, s: int) -> BlockedTensorMatrix:
        """View an (s*m1) x (s*m2) matrix as a grid of order-1 tensors."""
        if x.rows % s or x.cols % s:
            raise ValueError("matrix size not divisible by block size")
        m1, m2 = x.rows // s, x.cols // s
        grid = [[tensor_pure(x.block(i, j, s, s)) for j in range(m2)]
                for i in range(m1)]
        return BlockedTensorMatrix(s, grid)

    def faux_mul(self, other: BlockedTensorMatrix) -> BlockedTensorMatrix:
        """Faux product: block (i,j) = sum_k self[i,k] (x) other[k,j]."""
        if self.block_size != other.block_size:
            raise ValueError("block size mismatch")
        if self.cols != other.rows:
            raise ValueError(
                f"block shape mismatch {self.rows}x{self.cols} vs "
                f"{other.rows}x{other.cols}")
        grid = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc: TensorEntry = {}
                for k in range(self.cols):
                    acc = tensor_add(acc, tensor_concat(self.grid[i][k],
                                                        other.grid[k][j]))
                row.append(acc)
            grid.append(row)
        return BlockedTensorMatrix(self.block_size, grid)

    def is_zero(self) -> bool:
        return all(tensor_is_zero(e) for row in self.grid for e in row)

    def prune_zero_factors(self) -> BlockedTensorMatrix:
        """Drop pure tensors containing an identically zero factor."""
        grid = [[{k: w for k, w in e.items() if not any(f.is_zero() for f in k)}
                 for e in row] for row in self.grid]
        return BlockedTensorMatrix(self.block_size, grid)

    def apply_multilinear(self, f: Callable[..., Mat],
                          out_shape: tuple[int, int]) -> Mat:
        """Apply a multilinear map entrywise and reassemble a plain matrix."""
        grid = [[tensor_apply(e, f, out_shape) for e in row] for row in self.grid]
        return Mat.from_blocks(grid)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BlockedTensorMatrix)
                and self.block_size == other.block_size
                and self.grid == other.grid)


def faux_product(p: BlockedTensorMatrix, q: BlockedTensorMatrix) -> BlockedTensorMatrix:
    return p.faux_mul(q)


def faux_power(ws: list[BlockedTensorMatrix], word: tuple[int, ...]) -> BlockedTensorMatrix:
    """X^{faux, word} for a tuple ``ws`` of square blocked matrices (0-indexed word)."""
    if not word:
        raise ValueError("faux power of the empty word is the formal identity")
    out = ws[word[0]]
    for letter in word[1:]:
        out = out.faux_mul(ws[letter])
    return out
