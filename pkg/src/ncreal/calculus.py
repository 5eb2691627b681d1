"""Compatibility checks, series expansions, and nc derivatives.

The linearized compatibility equations (six coefficient-level identities,
tagged a, b, c, f, e, d in presentation order) characterize which
realization coefficients produce a genuine nc function; the series-level
conditions are their Taylor-coefficient counterparts.  Both checkers
enumerate basis units only, which is exhaustive by multilinearity.

The two series evaluators deliberately take independent routes: the pencil
side sums a finite Neumann series of the lifted coefficient matrix, the
brute-force side expands faux-product powers into formal tensors and
applies the multilinear coefficients.  On jointly nilpotent perturbations
they must agree with the resolvent evaluation exactly, and the test suite
holds them to that.

Derivatives come in two flavours as well: ``delta_block`` evaluates the
function once on a block upper-bidiagonal point and reads the top-right
corner, while ``delta_closed_form`` uses the resolvent formula available
for compatible realizations.  Cross-validating the two is the heart of
this module's test surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product
from typing import Callable, Sequence

from .linalg import (BlockLinearMap, Mat, block_apply, det, inverse, kron,
                     solve_square)
from .realization import (FMRealization, SingularPencil, eval_realization,
                          pencil)
from .tensor import BlockedTensorMatrix, tensor_apply


class NotNilpotent(ArithmeticError):
    """The perturbation is not (jointly) nilpotent, the series is infinite."""


# -- words ---------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """A word over the generators g_1..g_d (letters are 1-based indices)."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        if any(x < 1 for x in self.letters):
            raise ValueError("letters are 1-based generator indices")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    @staticmethod
    def parse(text: str) -> "Word":
        """Parse 'g1g2g1' (or '' for the empty word)."""
        text = text.strip()
        if not text:
            return Word(())
        parts = text.replace("g", " ").split()
        if "g" not in text or not all(p.isdigit() for p in parts):
            raise ValueError(f"cannot parse word {text!r}; expected e.g. 'g1g2'")
        return Word(tuple(int(p) for p in parts))

    def __str__(self) -> str:
        return "".join(f"g{i}" for i in self.letters)


def _as_word(w) -> Word:
    return w if isinstance(w, Word) else Word(tuple(w))


# -- linearized compatibility checks --------------------------------------


@dataclass(frozen=True)
class LlaViolation:
    equation: str  # one of 'a','b','c','f','e','d'
    S: tuple[int, int]
    residual: Mat
    Z1: tuple[int, int] | None = None
    Z2: tuple[int, int] | None = None
    i1: int | None = None
    i2: int | None = None


@dataclass(frozen=True)
class LlaReport:
    passed: bool
    violations: tuple[LlaViolation, ...]

    def __bool__(self) -> bool:
        return self.passed


def _units(s: int) -> list[tuple[tuple[int, int], Mat]]:
    return [((p, q), Mat.unit(s, s, p, q)) for p in range(s) for q in range(s)]


def lla_check(r: FMRealization) -> LlaReport:
    """Evaluate all six coefficient identities on every basis combination.

    Runs on any realization; for non-minimal ones a failure does not
    certify that the associated series is not a nc function (the converse
    direction needs controllability and observability).
    """
    s, d = r.s, r.d
    units = _units(s)
    comm = {}  # [S, Y_k] cache
    for (sp, sq), su in units:
        for k in range(d):
            comm[(sp, sq, k)] = su * r.Y[k] - r.Y[k] * su

    violations: list[LlaViolation] = []

    def sum_b(sp, sq) -> Mat:
        out = Mat.zero(r.L, s)
        for k in range(d):
            out = out + r.B[k](comm[(sp, sq, k)])
        return out

    def sum_a(sp, sq) -> Mat:
        out = Mat.zero(r.L, r.L)
        for k in range(d):
            out = out + r.A[k](comm[(sp, sq, k)])
        return out

    for (sp, sq), su in units:
        sb, sa = sum_b(sp, sq), sum_a(sp, sq)
        # (a)  S D - D S = C sum_k B_k([S, Y_k])
        res = su * r.D - r.D * su - r.C * sb
        if not res.is_zero():
            violations.append(LlaViolation("a", (sp, sq), res))
        for i1 in range(d):
            for (zp, zq), zu in units:
                b1 = r.B[i1](zu)
                a1 = r.A[i1](zu)
                # (b)  S C B(Z) - C B(SZ) = C (sum A([S,Y])) B(Z)
                res = su * (r.C * b1) - r.C * r.B[i1](su * zu) - r.C * sa * b1
                if not res.is_zero():
                    violations.append(LlaViolation("b", (sp, sq), res,
                                                   Z1=(zp, zq), i1=i1 + 1))
                # (c)  S C A(Z) - C A(SZ) = C (sum A([S,Y])) A(Z)
                res = su * (r.C * a1) - r.C * r.A[i1](su * zu) - r.C * sa * a1
                if not res.is_zero():
                    violations.append(LlaViolation("c", (sp, sq), res,
                                                   Z1=(zp, zq), i1=i1 + 1))
                # (f)  B(ZS) - B(Z) S = A(Z) sum B([S,Y])
                res = r.B[i1](zu * su) - b1 * su - a1 * sb
                if not res.is_zero():
                    violations.append(LlaViolation("f", (sp, sq), res,
                                                   Z1=(zp, zq), i1=i1 + 1))
                for i2 in range(d):
                    for (wp, wq), wu in units:
                        a1zs = r.A[i1](zu * su)
                        # (e)  A(Z1 S) B(Z2) - A(Z1) B(S Z2) = A(Z1) (sum A) B(Z2)
                        res = (a1zs * r.B[i2](wu) - a1 * r.B[i2](su * wu)
                               - a1 * sa * r.B[i2](wu))
                        if not res.is_zero():
                            violations.append(LlaViolation(
                                "e", (sp, sq), res, Z1=(zp, zq), Z2=(wp, wq),
                                i1=i1 + 1, i2=i2 + 1))
                        # (d)  A(Z1 S) A(Z2) - A(Z1) A(S Z2) = A(Z1) (sum A) A(Z2)
                        res = (a1zs * r.A[i2](wu) - a1 * r.A[i2](su * wu)
                               - a1 * sa * r.A[i2](wu))
                        if not res.is_zero():
                            violations.append(LlaViolation(
                                "d", (sp, sq), res, Z1=(zp, zq), Z2=(wp, wq),
                                i1=i1 + 1, i2=i2 + 1))
    return LlaReport(not violations, tuple(violations))


def lla_check_extended(r: FMRealization, n: int, m: int, trials: int,
                       rng, bound: int = 3) -> LlaReport:
    """Randomized check of the rectangular extensions of the six identities.

    S ranges over sn x sm matrices (Z1 over sm x sm, Z2 over sn x sn); a
    realization passing the square check must pass these as well.
    """
    from .sampling import random_matrix

    s, d = r.s, r.d
    eye_n, eye_m = Mat.identity(n), Mat.identity(m)
    dn, dm = kron(eye_n, r.D), kron(eye_m, r.D)
    cn, cm = kron(eye_n, r.C), kron(eye_m, r.C)
    violations: list[LlaViolation] = []

    for t in range(trials):
        su = random_matrix(rng, s * n, s * m, bound)
        z1 = random_matrix(rng, s * m, s * m, bound)
        z2 = random_matrix(rng, s * n, s * n, bound)
        # rectangular commutators S (I_m (x) Y_k) - (I_n (x) Y_k) S
        comm = [su * kron(eye_m, r.Y[k]) - kron(eye_n, r.Y[k]) * su
                for k in range(d)]
        sb = Mat.zero(r.L * n, s * m)
        sa = Mat.zero(r.L * n, r.L * m)
        for k in range(d):
            sb = sb + block_apply(r.B[k], comm[k])
            sa = sa + block_apply(r.A[k], comm[k])

        res = su * dm - dn * su - cn * sb
        if not res.is_zero():
            violations.append(LlaViolation("a", (t, 0), res))
        for i1 in range(d):
            zb = block_apply(r.B[i1], z1)
            za = block_apply(r.A[i1], z1)
            res = su * cm * zb - cn * block_apply(r.B[i1], su * z1) - cn * sa * zb
            if not res.is_zero():
                violations.append(LlaViolation("b", (t, 0), res, i1=i1 + 1))
            res = su * cm * za - cn * block_apply(r.A[i1], su * z1) - cn * sa * za
            if not res.is_zero():
                violations.append(LlaViolation("c", (t, 0), res, i1=i1 + 1))
        for i2 in range(d):
            wa = block_apply(r.A[i2], z2)
            res = block_apply(r.B[i2], z2 * su) - block_apply(r.B[i2], z2) * su \
                - wa * sb
            if not res.is_zero():
                violations.append(LlaViolation("f", (t, 0), res, i1=i2 + 1))
            for i1 in range(d):
                zb = block_apply(r.B[i1], z1)
                za = block_apply(r.A[i1], z1)
                lhs = block_apply(r.A[i2], z2 * su)
                res = lhs * zb - wa * block_apply(r.B[i1], su * z1) - wa * sa * zb
                if not res.is_zero():
                    violations.append(LlaViolation("e", (t, 0), res,
                                                   i1=i1 + 1, i2=i2 + 1))
                res = lhs * za - wa * block_apply(r.A[i1], su * z1) - wa * sa * za
                if not res.is_zero():
                    violations.append(LlaViolation("d", (t, 0), res,
                                                   i1=i1 + 1, i2=i2 + 1))
    return LlaReport(not violations, tuple(violations))


# -- Taylor coefficients and series ---------------------------------------


def tt_coefficient(r: FMRealization, word, zs: Sequence[Mat]) -> Mat:
    """Multilinear series coefficient: D for the empty word, else
    C A_{i1}(Z_1) ... A_{i_{l-1}}(Z_{l-1}) B_{il}(Z_l)."""
    word = _as_word(word)
    zs = list(zs)
    if len(zs) != len(word):
        raise ValueError("need one argument matrix per letter")
    if not word.letters:
        return r.D
    out = r.C
    for letter, z in zip(word.letters[:-1], zs[:-1]):
        out = out * r.A[letter - 1](z)
    return out * r.B[word.letters[-1] - 1](zs[-1])


def tt_series_eval(r: FMRealization, x: Sequence[Mat]) -> Mat:
    """Finite Neumann-series evaluation.

    With P the lifted coefficient matrix of the shifted point, sums
    I + P + P^2 + ... as long as the powers vanish within Lm steps; the
    result then equals the resolvent evaluation.  Raises NotNilpotent if
    P^{Lm} != 0.
    """
    _, m = r._blocks(x)
    shifted = r.shifted(x)
    lp = r.L * m
    p = Mat.zero(lp, lp)
    rhs = Mat.zero(lp, r.s * m)
    for w, a, b in zip(shifted, r.A, r.B):
        p = p + block_apply(a, w, m)
        rhs = rhs + block_apply(b, w, m)
    eye = Mat.identity(lp)
    acc = eye
    power = eye
    for _ in range(lp):
        power = power * p
        if power.is_zero():
            break
        acc = acc + power
    else:
        if not power.is_zero():
            raise NotNilpotent(f"P^{lp} != 0 at level {r.s * m}")
    eye_m = Mat.identity(m)
    return kron(eye_m, r.D) + kron(eye_m, r.C) * acc * rhs


def tt_series_eval_bruteforce(r: FMRealization, x: Sequence[Mat],
                              max_len: int | None = None) -> Mat:
    """Literal series: sum over words of faux powers hit with coefficients.

    Independent of the pencil: powers are expanded as formal tensors via
    the faux product and each coefficient is applied entrywise.  Words are
    explored breadth-first and the expansion must die out by length s*m
    (the nilpotency bound at that level); otherwise NotNilpotent.
    """
    _, m = r._blocks(x)
    s = r.s
    cutoff = s * m if max_len is None else max_len
    shifted = r.shifted(x)
    gens = [BlockedTensorMatrix.from_matrix(w, s).prune_zero_factors()
            for w in shifted]

    total = kron(Mat.identity(m), r.D)
    frontier: dict[tuple[int, ...], BlockedTensorMatrix] = {(): None}  # type: ignore

    def coeff_apply(word: tuple[int, ...], btm: BlockedTensorMatrix) -> Mat:
        w = Word(tuple(i + 1 for i in word))
        return btm.apply_multilinear(lambda *zs: tt_coefficient(r, w, zs),
                                     (s, s))

    length = 0
    while frontier:
        length += 1
        new_frontier: dict[tuple[int, ...], BlockedTensorMatrix] = {}
        for word, btm in frontier.items():
            for k in range(r.d):
                ext = gens[k] if btm is None else btm.faux_mul(gens[k])
                ext = ext.prune_zero_factors()
                if not ext.is_zero():
                    new_frontier[word + (k,)] = ext
        if length > cutoff:
            if new_frontier:
                raise NotNilpotent(
                    f"nonzero faux power of length {length} > bound {cutoff}")
            break
        for word, btm in new_frontier.items():
            total = total + coeff_apply(word, btm)
        frontier = new_frontier
    return total


# -- nc difference-differential operators ----------------------------------


def delta_block(f: Callable[[Sequence[Mat]], Mat], word,
                points: Sequence[Sequence[Mat]],
                dirs: Sequence[Mat]) -> Mat:
    """Evaluate nested right partial derivatives by one block evaluation.

    For the word g_{j_1}..g_{j_k}, builds the block upper-bidiagonal point
    whose i-th superdiagonal slot carries dirs[i] in variable j_i, applies
    ``f`` once, and returns the top-right block: that corner is
    Delta_{j_k}...Delta_{j_1} f(points)(dirs).  Works uniformly for
    expression and realization evaluators.
    """
    word = _as_word(word)
    k = len(word)
    points = [tuple(p) for p in points]
    if len(points) != k + 1:
        raise ValueError(f"need {k + 1} points for a length-{k} word")
    if len(dirs) != k:
        raise ValueError(f"need {k} direction matrices")
    if k == 0:
        return f(points[0])
    d = len(points[0])
    sizes = [p[0].rows for p in points]
    for i, z in enumerate(dirs):
        if z.shape != (sizes[i], sizes[i + 1]):
            raise ValueError(f"direction {i} must be {sizes[i]} x {sizes[i + 1]}")

    big_point = []
    for t in range(d):
        grid = []
        for i in range(k + 1):
            row = []
            for j in range(k + 1):
                if i == j:
                    row.append(points[i][t])
                elif j == i + 1 and word.letters[i] == t + 1:
                    row.append(dirs[i])
                else:
                    row.append(Mat.zero(sizes[i], sizes[j]))
            grid.append(row)
        big_point.append(Mat.from_blocks(grid))
    value = f(tuple(big_point))
    # matrix-valued nc functions grade the output proportionally to the
    # input levels (e.g. the resolvent maps level sm to size Lm), so the
    # corner block sizes are recovered by scaling
    total = sum(sizes)
    if value.rows % total or any(sizes[i] * value.rows % total
                                 for i in (0, len(sizes) - 1)):
        raise ValueError("value size is not proportional to the input levels")
    first = sizes[0] * value.rows // total
    last = sizes[-1] * value.rows // total
    return value.submatrix(0, value.cols - last, first, last)


def delta_closed_form(r: FMRealization, word, x: Sequence[Mat],
                      zs: Sequence[Mat]) -> Mat:
    """Resolvent formula for the derivative at (X, centre, ..., centre):

        (I_m (x) C) Lambda(X)^{-1} (Z^1)A_{j_1} ... (Z^{k-1})A_{j_{k-1}} (Z^k)B_{j_k}

    Valid for realizations satisfying the linearized compatibility
    equations (caller's responsibility) with X in the domain.
    """
    word = _as_word(word)
    k = len(word)
    if len(zs) != k:
        raise ValueError("need one direction per letter")
    if k == 0:
        return eval_realization(r, x)
    _, m = r._blocks(x)
    lam = pencil(r, x)
    tail = block_apply(r.B[word.letters[-1] - 1], zs[-1])
    for letter, z in zip(reversed(word.letters[:-1]), reversed(list(zs[:-1]))):
        tail = block_apply(r.A[letter - 1], z) * tail
    solved = solve_square(lam, tail)
    if solved is None:
        raise SingularPencil("pencil singular at the base point")
    return kron(Mat.identity(m), r.C) * solved


def delta_resolvent_closed_form(r: FMRealization, word, x: Sequence[Mat],
                                zs: Sequence[Mat]) -> Mat:
    """Companion formula at (centre, ..., centre, X):

        (Z^1)A_{j_1} ... (Z^k)A_{j_k} Lambda(X)^{-1}

    This is the derivative of the resolvent map itself, with the moving
    point in the last slot.
    """
    word = _as_word(word)
    if len(zs) != len(word):
        raise ValueError("need one direction per letter")
    lam = pencil(r, x)
    lam_inv = solve_square(lam, Mat.identity(lam.rows))
    if lam_inv is None:
        raise SingularPencil("pencil singular at the base point")
    out = lam_inv
    for letter, z in zip(reversed(word.letters), reversed(list(zs))):
        out = block_apply(r.A[letter - 1], z) * out
    return out


def resolvent_evaluator(r: FMRealization) -> Callable[[Sequence[Mat]], Mat]:
    """The map X -> Lambda(X)^{-1} as a plain evaluator (for delta_block)."""
    def f(x: Sequence[Mat]) -> Mat:
        lam = pencil(r, x)
        inv = solve_square(lam, Mat.identity(lam.rows))
        if inv is None:
            raise SingularPencil("pencil singular")
        return inv
    return f


# -- series-level compatibility conditions ---------------------------------


@dataclass(frozen=True)
class SeriesViolation:
    equation: str  # 'la1' | 'la2' | 'la3' | 'la4'
    word: Word
    S: tuple[int, int]
    residual: Mat


@dataclass(frozen=True)
class SeriesReport:
    passed: bool
    violations: tuple[SeriesViolation, ...]

    def __bool__(self) -> bool:
        return self.passed


def la_check_series(coeffs: Callable[[Word, tuple[Mat, ...]], Mat],
                    y: Sequence[Mat], maxlen: int) -> SeriesReport:
    """Verify the four series compatibility identities on basis tuples.

    ``coeffs`` maps (word, argument tuple) to the s x s coefficient value.
    All words whose grown counterparts stay within ``maxlen`` are checked.
    At s = 1 every commutator [S, Y_k] vanishes and the conditions
    degenerate to tautologies.
    """
    y = tuple(y)
    s = y[0].rows
    d = len(y)
    units = _units(s)
    violations: list[SeriesViolation] = []

    def comm(su: Mat, k: int) -> Mat:
        return su * y[k] - y[k] * su

    empty = Word(())
    f_empty = coeffs(empty, ())
    for (sp, sq), su in units:
        rhs = Mat.zero(s, s)
        for k in range(d):
            rhs = rhs + coeffs(Word((k + 1,)), (comm(su, k),))
        res = su * f_empty - f_empty * su - rhs
        if not res.is_zero():
            violations.append(SeriesViolation("la1", empty, (sp, sq), res))

    words: list[tuple[int, ...]] = []
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(maxlen - 1):
        frontier = [w + (k,) for w in frontier for k in range(1, d + 1)]
        words.extend(frontier)

    for letters in words:
        w = Word(letters)
        ell = len(letters)
        for zs in iter_product([u for _, u in units], repeat=ell):
            for (sp, sq), su in units:
                fw = coeffs(w, zs)
                # la2: S f_w(Z) - f_w(S Z_1, ...) = sum f_{g_k w}([S,Y_k], Z...)
                rhs = Mat.zero(s, s)
                for k in range(d):
                    rhs = rhs + coeffs(Word((k + 1,) + letters),
                                       (comm(su, k),) + zs)
                res = su * fw - coeffs(w, (su * zs[0],) + zs[1:]) - rhs
                if not res.is_zero():
                    violations.append(SeriesViolation("la2", w, (sp, sq), res))
                # la3: f_w(..., Z_l S) - f_w(Z) S = sum f_{w g_k}(Z..., [S,Y_k])
                rhs = Mat.zero(s, s)
                for k in range(d):
                    rhs = rhs + coeffs(Word(letters + (k + 1,)),
                                       zs + (comm(su, k),))
                res = coeffs(w, zs[:-1] + (zs[-1] * su,)) - fw * su - rhs
                if not res.is_zero():
                    violations.append(SeriesViolation("la3", w, (sp, sq), res))
                # la4: internal splits, for every 1 <= j < l
                for j in range(1, ell):
                    rhs = Mat.zero(s, s)
                    for k in range(d):
                        grown = letters[:j] + (k + 1,) + letters[j:]
                        rhs = rhs + coeffs(Word(grown),
                                           zs[:j] + (comm(su, k),) + zs[j:])
                    lhs = coeffs(w, zs[:j - 1] + (zs[j - 1] * su,) + zs[j:]) \
                        - coeffs(w, zs[:j] + (su * zs[j],) + zs[j + 1:])
                    res = lhs - rhs
                    if not res.is_zero():
                        violations.append(SeriesViolation("la4", w, (sp, sq), res))
    return SeriesReport(not violations, tuple(violations))


# -- the nc-function property harness --------------------------------------


@dataclass(frozen=True)
class HarnessReport:
    trials: int
    direct_sum_ok: int
    upper_triangular_ok: int
    intertwining_ok: int
    similarity_ok: int
    similarity_tested: bool
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.passed


def _sample_domain_point(r: FMRealization, rng, m: int, bound: int = 4,
                         max_tries: int = 80):
    from .realization import in_domain
    from .sampling import random_point
    for _ in range(max_tries):
        x = random_point(rng, r.d, r.s * m, bound)
        if in_domain(r, x):
            return x
    return None


def nc_property_harness(r: FMRealization, trials: int, rng,
                        bound: int = 4) -> HarnessReport:
    """Sample-test the structural identities a nc function must satisfy.

    Direct sums, upper-triangular augmentation (with unit corner weight),
    and column-embedding intertwinings need only the compatibility
    equations; similarity invariance additionally needs controllability
    and observability, so it is only exercised when those hold.
    """
    from .realization import in_domain
    from .sampling import random_invertible, random_matrix
    from .synthesis import is_controllable, is_observable

    check_similarity = bool(lla_check(r)) and is_controllable(r) and is_observable(r)
    failures: list[str] = []
    ds_ok = ut_ok = tw_ok = sim_ok = 0

    for t in range(trials):
        m1, m2 = rng.choice([1, 2]), 1
        x1 = _sample_domain_point(r, rng, m1, bound)
        x2 = _sample_domain_point(r, rng, m2, bound)
        if x1 is None or x2 is None:
            failures.append(f"trial {t}: could not sample domain points")
            continue
        v1, v2 = eval_realization(r, x1), eval_realization(r, x2)
        n1, n2 = r.s * m1, r.s * m2

        # direct sums
        xsum = tuple(Mat.from_blocks([[a, Mat.zero(n1, n2)],
                                      [Mat.zero(n2, n1), b]])
                     for a, b in zip(x1, x2))
        if not in_domain(r, xsum):
            failures.append(f"trial {t}: direct sum left the domain")
        else:
            vsum = eval_realization(r, xsum)
            expect = Mat.from_blocks([[v1, Mat.zero(n1, n2)],
                                      [Mat.zero(n2, n1), v2]])
            if vsum == expect:
                ds_ok += 1
            else:
                failures.append(f"trial {t}: direct sum value mismatch")

        # upper-triangular augmentation, corner weight 1
        z = tuple(random_matrix(rng, n1, n2, bound) for _ in range(r.d))
        xut = tuple(Mat.from_blocks([[a, zk], [Mat.zero(n2, n1), b]])
                    for a, zk, b in zip(x1, z, x2))
        if not in_domain(r, xut):
            failures.append(f"trial {t}: upper-triangular point left the domain")
        else:
            vut = eval_realization(r, xut)
            if (vut.submatrix(0, 0, n1, n1) == v1
                    and vut.submatrix(n1, n1, n2, n2) == v2
                    and vut.submatrix(n1, 0, n2, n1).is_zero()):
                ut_ok += 1
            else:
                failures.append(f"trial {t}: upper-triangular structure broken")

        # column-embedding intertwiner [I; 0] between X (+) X' and X
        emb = Mat.identity(n1).vstack(Mat.zero(n2, n1))
        if in_domain(r, xsum):
            if eval_realization(r, xsum) * emb == emb * v1:
                tw_ok += 1
            else:
                failures.append(f"trial {t}: intertwining relation failed")

        # similarity invariance (needs compatibility + minimality)
        if check_similarity:
            tmat = random_invertible(rng, n1, bound)
            xconj = tuple(tmat * a * inverse(tmat) for a in x1)
            if not in_domain(r, xconj):
                failures.append(f"trial {t}: conjugated point left the domain")
            elif eval_realization(r, xconj) == tmat * v1 * inverse(tmat):
                sim_ok += 1
            else:
                failures.append(f"trial {t}: similarity value mismatch")

    return HarnessReport(trials, ds_ok, ut_ok, tw_ok, sim_ok,
                         check_similarity, tuple(failures))
