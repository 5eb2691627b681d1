"""Seeded invariant suites behind `ncreal selftest`.

Each suite is a pure function of (seed, trials, bound) so batches can run
in parallel workers without shared state.  These are smaller mirrors of
the acceptance test suite; the heavyweight versions live in tests/.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .calculus import (delta_block, delta_closed_form, lla_check,
                       nc_property_harness, tt_series_eval,
                       tt_series_eval_bruteforce, Word)
from .expr import eval_expr, parse
from .linalg import Mat, det, inverse, kernel_basis, kron, perm_matrix, rank
from .realization import eval_at_level_n, eval_realization, in_domain
from .sampling import (find_in_domain_point, random_matrix, random_point,
                       random_nondegenerate_expr, random_strict_block_upper)
from .synthesis import find_similarity, minimize, realize_expr


def suite_linalg(seed: int, trials: int, bound: int):
    rng = random.Random(seed)
    for t in range(trials):
        n1, n2, n3, n4 = (rng.randint(1, 4) for _ in range(4))
        p = random_matrix(rng, n1, n2, bound)
        q = random_matrix(rng, n3, n4, bound)
        if kron(p, q) != perm_matrix(n1, n3) * kron(q, p) * perm_matrix(n2, n4).transpose():
            return False, f"kronecker swap failed at trial {t}"
        a = random_matrix(rng, n1, n2, bound)
        c = random_matrix(rng, n2, n3, bound)
        b = random_matrix(rng, n2, n1, bound)
        dd = random_matrix(rng, n1, n4, bound)
        if kron(a, b) * kron(c, dd) != kron(a * c, b * dd):
            return False, f"mixed product failed at trial {t}"
        if perm_matrix(n1, n2) * perm_matrix(n2, n1) != Mat.identity(n1 * n2):
            return False, f"permutation inverse failed at trial {t}"
        m = random_matrix(rng, 3, 3, bound)
        if det(m) != 0:
            if inverse(m) * m != Mat.identity(3):
                return False, f"inverse multiply-back failed at trial {t}"
        if rank(m) + len(kernel_basis(m)) != 3:
            return False, f"rank-nullity failed at trial {t}"
    return True, f"{trials} trials"


def suite_compile_oracle(seed: int, trials: int, bound: int):
    rng = random.Random(seed)
    checked = 0
    for t in range(trials):
        s = rng.choice([1, 1, 2])
        d = rng.choice([2, 3])
        e, y = random_nondegenerate_expr(rng, d, rng.randint(1, 3), s, bound=3)
        r = realize_expr(e, y)
        for m in (1, 2):
            x = find_in_domain_point(e, rng, s * m, bound=3)
            if x is None:
                continue
            x = x + tuple(random_matrix(rng, s * m, s * m, 3)
                          for _ in range(d - len(x)))
            if not in_domain(r, x):
                return False, f"dom(e) not inside the pencil domain at trial {t}"
            if eval_realization(r, x) != eval_expr(e, x):
                return False, f"oracle mismatch at trial {t}"
            checked += 1
    return True, f"{checked} point comparisons"


def suite_level_transfer(seed: int, trials: int, bound: int):
    rng = random.Random(seed)
    checked = 0
    for t in range(trials):
        d = 2
        e, y = random_nondegenerate_expr(rng, d, rng.randint(1, 3), 2, bound=3)
        r = realize_expr(e, y)
        for n in (1, 3):
            x = find_in_domain_point(e, rng, n, bound=3)
            if x is None:
                continue
            x = x + tuple(random_matrix(rng, n, n, 3) for _ in range(d - len(x)))
            try:
                got = eval_at_level_n(r, x)
            except Exception as exc:
                return False, f"level-{n} transfer raised {exc!r} at trial {t}"
            if got != eval_expr(e, x):
                return False, f"level-{n} transfer mismatch at trial {t}"
            checked += 1
    return True, f"{checked} transfers"


def suite_lla(seed: int, trials: int, bound: int):
    rng = random.Random(seed)
    for t in range(trials):
        s = rng.choice([1, 2])
        e, y = random_nondegenerate_expr(rng, 2, rng.randint(1, 3), s, bound=3)
        r = realize_expr(e, y)
        if not lla_check(r).passed:
            return False, f"compiled realization failed the check at trial {t}"
    return True, f"{trials} compiled realizations"


def suite_series(seed: int, trials: int, bound: int):
    rng = random.Random(seed)
    checked = 0
    for t in range(trials):
        e, y = random_nondegenerate_expr(rng, 2, rng.randint(1, 2), 2, bound=2)
        r = realize_expr(e, y)
        m = rng.choice([1, 2])
        x = tuple(kron(Mat.identity(m), yk) + random_strict_block_upper(rng, r.s, m, 2)
                  for yk in r.Y)
        a = tt_series_eval(r, x)
        b = tt_series_eval_bruteforce(r, x)
        c = eval_realization(r, x)
        if not (a == b == c):
            return False, f"series/pencil disagreement at trial {t}"
        checked += 1
    return True, f"{checked} nilpotent perturbations"


def suite_delta(seed: int, trials: int, bound: int):
    rng = random.Random(seed)
    checked = 0
    for t in range(trials):
        e, y = random_nondegenerate_expr(rng, 2, rng.randint(1, 2), 2, bound=2)
        r = realize_expr(e, y)
        m = 1
        x = None
        for _ in range(40):
            cand = random_point(rng, r.d, r.s * m, 2)
            if in_domain(r, cand):
                x = cand
                break
        if x is None:
            continue
        centre = tuple(kron(Mat.identity(m), yk) for yk in r.Y)
        for k in (1, 2):
            word = Word(tuple(rng.randint(1, r.d) for _ in range(k)))
            dirs = [random_matrix(rng, r.s * m, r.s * m, 2) for _ in range(k)]
            lhs = delta_block(lambda p: eval_realization(r, p), word,
                              [x] + [centre] * k, dirs)
            rhs = delta_closed_form(r, word, x, dirs)
            if lhs != rhs:
                return False, f"derivative cross-validation failed at trial {t}"
            checked += 1
    return True, f"{checked} words"


def suite_harness(seed: int, trials: int, bound: int):
    rng = random.Random(seed)
    e, y = random_nondegenerate_expr(rng, 2, 2, 2, bound=2)
    r = realize_expr(e, y)
    report = nc_property_harness(r, trials, rng, bound=2)
    if not report.passed:
        return False, "; ".join(report.failures[:3])
    return True, (f"direct-sum {report.direct_sum_ok}, "
                  f"triangular {report.upper_triangular_ok}, "
                  f"intertwining {report.intertwining_ok}, "
                  f"similarity {report.similarity_ok}")


def suite_minimize(seed: int, trials: int, bound: int):
    rng = random.Random(seed)
    for t in range(trials):
        e, y = random_nondegenerate_expr(rng, 2, rng.randint(1, 3), 2, bound=3)
        r = realize_expr(e, y)
        again = minimize(r)
        if again.L != r.L or find_similarity(r, again) is None:
            return False, f"minimize not idempotent at trial {t}"
        zero = realize_expr(parse("x1 - x1"), y[:1] + y[1:])
        if zero.L != 0 or not zero.D.is_zero():
            return False, "zero function did not minimize to L=0"
    return True, f"{trials} realizations"


_SUITES = {
    "linalg-identities": suite_linalg,
    "compile-oracle": suite_compile_oracle,
    "level-transfer": suite_level_transfer,
    "lla-soundness": suite_lla,
    "series-agreement": suite_series,
    "delta-crossvalidation": suite_delta,
    "nc-structure-harness": suite_harness,
    "minimize-properties": suite_minimize,
}


def all_suites() -> list[str]:
    return list(_SUITES)


def run_suite(name: str, seed: int, trials: int, bound: int):
    ok, detail = _SUITES[name](seed, trials, bound)
    return name, ok, detail
