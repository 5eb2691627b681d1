"""Exact dense linear algebra over the rationals.

Everything in this package runs over QQ (Python's ``Fraction``), so every
identity we test holds bit-for-bit or not at all.  The workhorse routines
(det / rank / solve / inverse / kernel) clear denominators row by row and
run fraction-free Bareiss-style elimination on plain Python integers, which
keeps intermediate entries as minors instead of letting gcd normalization
dominate the runtime.

Matrices are immutable (tuple-of-row-tuples storage), hence hashable and
safe to share between threads.  Degenerate shapes (0 rows and/or 0 columns)
are first-class citizens: the 0x0 determinant is 1 and a product with inner
dimension 0 is the zero matrix.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rat = Fraction


def rat(value) -> Rat:
    """Coerce ints / strings like ``-3/7`` / Fractions to an exact rational."""
    if isinstance(value, Rat):
        return value
    if isinstance(value, int):
        return Rat(value)
    if isinstance(value, str):
        return Rat(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rat(x: Rat) -> str:
    """Render a rational as ``p`` or ``p/q`` (never a decimal)."""
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Mat:
    """Immutable dense matrix over QQ."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, entries: Iterable[Iterable], rows: int | None = None,
                 cols: int | None = None):
        data = tuple(tuple(rat(x) for x in row) for row in entries)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("ragged rows or shape mismatch")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, *a):
        raise AttributeError("Mat is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(rows: int, cols: int) -> Mat:
        return Mat([[0] * cols for _ in range(rows)], rows, cols)

    @staticmethod
    def identity(n: int) -> Mat:
        return Mat([[1 if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @staticmethod
    def unit(rows: int, cols: int, i: int, j: int) -> Mat:
        """Standard basis matrix E_ij (0-indexed)."""
        return Mat([[1 if (r, c) == (i, j) else 0 for c in range(cols)]
                    for r in range(rows)], rows, cols)

    @staticmethod
    def from_flat(rows: int, cols: int, flat: Sequence) -> Mat:
        if len(flat) != rows * cols:
            raise ValueError("flat length mismatch")
        return Mat([flat[i * cols:(i + 1) * cols] for i in range(rows)], rows, cols)

    @staticmethod
    def column(entries: Sequence) -> Mat:
        return Mat([[x] for x in entries])

    # -- basics -------------------------------------------------------

    def __getitem__(self, ij) -> Rat:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[Rat, ...]:
        return self.data[i]

    def col(self, j: int) -> tuple[Rat, ...]:
        return tuple(r[j] for r in self.data)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Mat) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rat(x) for x in row) for row in self.data)
        return f"Mat[{self.rows}x{self.cols}: {body}]"

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: Mat) -> Mat:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Mat([[a + b for a, b in zip(r1, r2)]
                    for r1, r2 in zip(self.data, other.data)], self.rows, self.cols)

    def __sub__(self, other: Mat) -> Mat:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return Mat([[a - b for a, b in zip(r1, r2)]
                    for r1, r2 in zip(self.data, other.data)], self.rows, self.cols)

    def __neg__(self) -> Mat:
        return Mat([[-a for a in row] for row in self.data], self.rows, self.cols)

    def __mul__(self, other):
        if isinstance(other, Mat):
            return self.matmul(other)
        return self.scale(rat(other))

    def __rmul__(self, scalar):
        return self.scale(rat(scalar))

    def scale(self, c: Rat) -> Mat:
        return Mat([[c * a for a in row] for row in self.data], self.rows, self.cols)

    def matmul(self, other: Mat) -> Mat:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.cols == 0:
            return Mat.zero(self.rows, other.cols)
        cols_b = list(zip(*other.data)) if other.data else []
        out = [[sum(a * b for a, b in zip(row, colv)) for colv in cols_b]
               for row in self.data]
        return Mat(out, self.rows, other.cols)

    def transpose(self) -> Mat:
        return Mat(list(zip(*self.data)) if self.rows and self.cols
                   else [[] for _ in range(self.cols)], self.cols, self.rows)

    def trace(self) -> Rat:
        if self.rows != self.cols:
            raise ValueError("trace of non-square matrix")
        return sum((self.data[i][i] for i in range(self.rows)), Rat(0))

    # -- block structure ----------------------------------------------

    def submatrix(self, r0: int, c0: int, rows: int, cols: int) -> Mat:
        return Mat([row[c0:c0 + cols] for row in self.data[r0:r0 + rows]], rows, cols)

    def block(self, i: int, j: int, br: int, bc: int) -> Mat:
        """The (i, j) block when partitioned into br x bc blocks."""
        return self.submatrix(i * br, j * bc, br, bc)

    @staticmethod
    def from_blocks(grid: Sequence[Sequence[Mat]]) -> Mat:
        rows: list[list[Rat]] = []
        for brow in grid:
            height = brow[0].rows
            if any(b.rows != height for b in brow):
                raise ValueError("inconsistent block heights")
            for i in range(height):
                rows.append([x for b in brow for x in b.data[i]])
        return Mat(rows) if rows else Mat([], 0, sum(b.cols for b in grid[0]) if grid else 0)

    def hstack(self, other: Mat) -> Mat:
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return Mat([r1 + r2 for r1, r2 in zip(self.data, other.data)],
                   self.rows, self.cols + other.cols)

    def vstack(self, other: Mat) -> Mat:
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return Mat(self.data + other.data, self.rows + other.rows, self.cols)


def direct_sum(a: Mat, b: Mat) -> Mat:
    """Block diagonal matrix a (+) b."""
    return Mat.from_blocks([[a, Mat.zero(a.rows, b.cols)],
                            [Mat.zero(b.rows, a.cols), b]])


def kron(p: Mat, q: Mat) -> Mat:
    """Kronecker product: the block matrix [p_ij * q]."""
    out = []
    for prow in p.data:
        for qrow in q.data:
            out.append([a * b for a in prow for b in qrow])
    return Mat(out, p.rows * q.rows, p.cols * q.cols) if out else \
        Mat([], p.rows * q.rows, p.cols * q.cols)


def perm_matrix(n1: int, n2: int) -> Mat:
    """Factor-swap permutation: the block matrix [E_ij^T] with E_ij in K^{n1 x n2}.

    Satisfies P (x) Q = perm_matrix(n1, n3) (Q (x) P) perm_matrix(n2, n4)^T for
    P of shape n1 x n2 and Q of shape n3 x n4.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("perm_matrix needs positive dimensions")
    m = [[Rat(0)] * (n1 * n2) for _ in range(n1 * n2)]
    for i in range(n1):
        for j in range(n2):
            # block (i, j) holds E_ij^T, whose (k, l) entry is nonzero iff l=i, k=j
            m[i * n2 + j][j * n1 + i] = Rat(1)
    return Mat(m, n1 * n2, n1 * n2)


# -- fraction-free elimination core ------------------------------------


def _int_rows(a: Mat, extra: Mat | None = None):
    """Clear denominators per row; return integer rows and the row multipliers.

    If ``extra`` is given, its rows are scaled by the same multipliers (for
    solving A x = b the scaling must hit both sides).
    """
    rows: list[list[int]] = []
    extras: list[list[int]] = []
    mults: list[int] = []
    for i in range(a.rows):
        dens = [x.denominator for x in a.data[i]]
        if extra is not None:
            dens += [x.denominator for x in extra.data[i]]
        m = 1
        for dv in dens:
            m = m * dv // gcd(m, dv)
        mults.append(m)
        rows.append([int(x * m) for x in a.data[i]])
        if extra is not None:
            extras.append([int(x * m) for x in extra.data[i]])
    return rows, extras, mults


def _bareiss_echelon(rows: list[list[int]], ncols_main: int):
    """In-place fraction-free row echelon form (Bareiss, first-nonzero pivots).

    Works on full rows (which may carry augmented columns past
    ``ncols_main``); only the first ``ncols_main`` columns are eligible as
    pivots.  Returns (pivot column list, sign, last pivot divisor history).
    """
    nrows = len(rows)
    piv_cols: list[int] = []
    sign = 1
    prev = 1
    r = 0
    for c in range(ncols_main):
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            sign = -sign
        piv = rows[r][c]
        width = len(rows[r])
        for i in range(r + 1, nrows):
            factor = rows[i][c]
            ri, rr = rows[i], rows[r]
            # the division is exact for every row, by Sylvester's identity
            rows[i] = [(piv * ri[j] - factor * rr[j]) // prev for j in range(width)]
        prev = piv
        piv_cols.append(c)
        r += 1
    return piv_cols, sign, prev


def det(a: Mat) -> Rat:
    """Exact determinant; det of the 0x0 matrix is 1."""
    if a.rows != a.cols:
        raise ValueError("determinant of non-square matrix")
    n = a.rows
    if n == 0:
        return Rat(1)
    rows, _, mults = _int_rows(a)
    piv_cols, sign, last = _bareiss_echelon(rows, n)
    if len(piv_cols) < n:
        return Rat(0)
    # Bareiss leaves det(scaled matrix) as the last pivot (times the sign).
    scale = 1
    for m in mults:
        scale *= m
    return Rat(sign * last, scale)


def rank(a: Mat) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    rows, _, _ = _int_rows(a)
    piv_cols, _, _ = _bareiss_echelon(rows, a.cols)
    return len(piv_cols)


class SingularMatrixError(ValueError):
    """Raised when inverting a singular square matrix."""


def solve(a: Mat, b: Mat) -> Mat | None:
    """Exact solution of a x = b (any consistent system); None if inconsistent.

    When the system is underdetermined the free variables are set to 0, so
    the result is deterministic.
    """
    if a.rows != b.rows:
        raise ValueError("solve: row mismatch")
    n, m = a.rows, a.cols
    if m == 0:
        return Mat.zero(0, b.cols) if b.is_zero() else None
    rows, extras, _ = _int_rows(a, b)
    aug = [rows[i] + extras[i] for i in range(n)]
    piv_cols, _, _ = _bareiss_echelon(aug, m)
    r = len(piv_cols)
    width = m + b.cols
    for i in range(r, n):
        if any(aug[i][j] != 0 for j in range(m, width)):
            return None
    # back substitution over QQ on the echelon rows
    x = [[Rat(0)] * b.cols for _ in range(m)]
    for i in range(r - 1, -1, -1):
        c = piv_cols[i]
        piv = aug[i][c]
        for t in range(b.cols):
            s = Rat(aug[i][m + t])
            for j in range(c + 1, m):
                if aug[i][j]:
                    s -= aug[i][j] * x[j][t]
            x[c][t] = s / piv
    return Mat(x, m, b.cols)


def solve_square(a: Mat, b: Mat) -> Mat | None:
    """Solve a x = b for square invertible ``a``; None when a is singular.

    One elimination pass decides invertibility and produces the solution,
    which is what the pencil-heavy evaluation paths want.
    """
    if a.rows != a.cols:
        raise ValueError("solve_square needs a square matrix")
    n = a.rows
    if n == 0:
        return Mat.zero(0, b.cols)
    rows, extras, _ = _int_rows(a, b)
    aug = [rows[i] + extras[i] for i in range(n)]
    piv_cols, _, _ = _bareiss_echelon(aug, n)
    if len(piv_cols) < n:
        return None
    x = [[Rat(0)] * b.cols for _ in range(n)]
    for i in range(n - 1, -1, -1):
        c = piv_cols[i]
        piv = aug[i][c]
        for t in range(b.cols):
            s = Rat(aug[i][n + t])
            for j in range(c + 1, n):
                if aug[i][j]:
                    s -= aug[i][j] * x[j][t]
            x[c][t] = s / piv
    return Mat(x, n, b.cols)


def inverse(a: Mat) -> Mat:
    """Exact inverse; raises SingularMatrixError on singular input."""
    if a.rows != a.cols:
        raise ValueError("inverse of non-square matrix")
    if a.rows == 0:
        return a
    # a x = I is consistent iff a has full rank, so solve() decides singularity
    x = solve(a, Mat.identity(a.rows))
    if x is None:
        raise SingularMatrixError("matrix is singular")
    return x


def rref(a: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form over QQ with its pivot columns."""
    m = [list(row) for row in a.data]
    piv_cols: list[int] = []
    r = 0
    for c in range(a.cols):
        pivot_row = next((i for i in range(r, a.rows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(a.rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
        if r == a.rows:
            break
    return Mat(m, a.rows, a.cols), piv_cols


def kernel_basis(a: Mat) -> list[Mat]:
    """Basis (list of column vectors) of the right kernel {v : a v = 0}."""
    if a.rows > a.cols:
        # row operations preserve the kernel: compress tall systems first
        rows, _, _ = _int_rows(a)
        piv, _, _ = _bareiss_echelon(rows, a.cols)
        a = Mat(rows[:len(piv)], len(piv), a.cols) if piv else Mat.zero(0, a.cols)
    red, piv_cols = rref(a)
    free = [c for c in range(a.cols) if c not in piv_cols]
    basis = []
    for fc in free:
        v = [Rat(0)] * a.cols
        v[fc] = Rat(1)
        for i, pc in enumerate(piv_cols):
            v[pc] = -red.data[i][fc]
        basis.append(Mat.column(v))
    return basis


def image_basis(a: Mat) -> list[Mat]:
    """Basis of the column space, as the pivot columns of ``a`` (exact)."""
    _, piv_cols = rref(a)
    return [Mat.column(a.col(c)) for c in piv_cols]


# -- block linear maps --------------------------------------------------


class BlockLinearMap:
    """A linear map K^{s x s} -> K^{r x c}, stored by its basis images.

    ``images[p][q]`` is the image of the basis unit E_pq, so evaluation on
    any Z is the weighted sum sum_{p,q} z_pq * images[p][q]; linearity is
    structural.  The blockwise extension applies the map to every s x s
    block of a larger (even rectangular) matrix.
    """

    __slots__ = ("s_in", "r_out", "c_out", "images")

    def __init__(self, s_in: int, r_out: int, c_out: int,
                 images: Sequence[Sequence[Mat]]):
        images = tuple(tuple(row) for row in images)
        if len(images) != s_in or any(len(row) != s_in for row in images):
            raise ValueError("need s_in x s_in table of basis images")
        for row in images:
            for m in row:
                if m.shape != (r_out, c_out):
                    raise ValueError("basis image has wrong shape")
        object.__setattr__(self, "s_in", s_in)
        object.__setattr__(self, "r_out", r_out)
        object.__setattr__(self, "c_out", c_out)
        object.__setattr__(self, "images", images)

    def __setattr__(self, *a):
        raise AttributeError("BlockLinearMap is immutable")

    def __eq__(self, other) -> bool:
        return (isinstance(other, BlockLinearMap)
                and (self.s_in, self.r_out, self.c_out) ==
                    (other.s_in, other.r_out, other.c_out)
                and self.images == other.images)

    def __hash__(self):
        return hash((self.s_in, self.r_out, self.c_out, self.images))

    @staticmethod
    def zero(s_in: int, r_out: int, c_out: int) -> BlockLinearMap:
        z = Mat.zero(r_out, c_out)
        return BlockLinearMap(s_in, r_out, c_out,
                              [[z] * s_in for _ in range(s_in)])

    @staticmethod
    def identity(s: int) -> BlockLinearMap:
        return BlockLinearMap(s, s, s, [[Mat.unit(s, s, p, q) for q in range(s)]
                                        for p in range(s)])

    @staticmethod
    def from_function(s_in: int, r_out: int, c_out: int, f) -> BlockLinearMap:
        imgs = [[f(Mat.unit(s_in, s_in, p, q)) for q in range(s_in)]
                for p in range(s_in)]
        return BlockLinearMap(s_in, r_out, c_out, imgs)

    def __call__(self, z: Mat) -> Mat:
        if z.shape != (self.s_in, self.s_in):
            raise ValueError("argument shape mismatch")
        out = Mat.zero(self.r_out, self.c_out)
        for p in range(self.s_in):
            for q in range(self.s_in):
                zpq = z.data[p][q]
                if zpq:
                    out = out + self.images[p][q].scale(zpq)
        return out

    def left_mul(self, c: Mat) -> BlockLinearMap:
        """The map Z |-> c * T(Z)."""
        return BlockLinearMap(self.s_in, c.rows, self.c_out,
                              [[c * m for m in row] for row in self.images])

    def right_mul(self, c: Mat) -> BlockLinearMap:
        """The map Z |-> T(Z) * c."""
        return BlockLinearMap(self.s_in, self.r_out, c.cols,
                              [[m * c for m in row] for row in self.images])

    def __add__(self, other: BlockLinearMap) -> BlockLinearMap:
        return BlockLinearMap(self.s_in, self.r_out, self.c_out,
                              [[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.images, other.images)])

    def __neg__(self) -> BlockLinearMap:
        return BlockLinearMap(self.s_in, self.r_out, self.c_out,
                              [[-m for m in row] for row in self.images])


def map_direct_sum(t1: BlockLinearMap, t2: BlockLinearMap) -> BlockLinearMap:
    """Z |-> diag(t1(Z), t2(Z))."""
    if t1.s_in != t2.s_in:
        raise ValueError("input block size mismatch")
    imgs = [[direct_sum(a, b) for a, b in zip(r1, r2)]
            for r1, r2 in zip(t1.images, t2.images)]
    return BlockLinearMap(t1.s_in, t1.r_out + t2.r_out, t1.c_out + t2.c_out, imgs)


def map_vstack(t1: BlockLinearMap, t2: BlockLinearMap) -> BlockLinearMap:
    """Z |-> [t1(Z); t2(Z)]."""
    if t1.s_in != t2.s_in or t1.c_out != t2.c_out:
        raise ValueError("shape mismatch in map_vstack")
    imgs = [[a.vstack(b) for a, b in zip(r1, r2)]
            for r1, r2 in zip(t1.images, t2.images)]
    return BlockLinearMap(t1.s_in, t1.r_out + t2.r_out, t1.c_out, imgs)


def block_apply(t: BlockLinearMap, x: Mat, m: int | None = None) -> Mat:
    """Blockwise extension (X)T: apply ``t`` to every s x s block of ``x``.

    ``x`` may be rectangular with an n x m grid of s x s blocks; ``m`` (the
    number of block columns) is inferred when omitted.
    """
    s = t.s_in
    if x.rows % s or x.cols % s:
        raise ValueError(f"matrix size {x.shape} not divisible by block size {s}")
    n_blocks = x.rows // s
    m_blocks = x.cols // s
    if m is not None and m_blocks != m:
        raise ValueError(f"expected {m} block columns, found {m_blocks}")
    grid = [[t(x.block(i, j, s, s)) for j in range(m_blocks)]
            for i in range(n_blocks)]
    if not grid or not grid[0]:
        return Mat.zero(t.r_out * n_blocks, t.c_out * m_blocks)
    return Mat.from_blocks(grid)
