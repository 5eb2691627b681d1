"""ncreal: exact calculus for noncommutative rational functions.

Expressions in noncommuting variables are compiled into state-space
realizations centred at a matrix point, minimized, verified against the
linearized compatibility equations, and evaluated -- at matrix levels, over
abstract algebras, as Taylor-style series, and under difference-differential
operators -- all in exact rational arithmetic.
"""

from .linalg import (BlockLinearMap, Mat, Rat, SingularMatrixError,
                     block_apply, det, direct_sum, format_rat, image_basis,
                     inverse, kernel_basis, kron, perm_matrix, rank, rat,
                     rref, solve)
from .tensor import BlockedTensorMatrix, faux_product, faux_power
from .expr import (Const, EquivalenceVerdict, Inv, NcDomainError, NcExpr, Neg,
                   ParseError, Prod, Sum, Var, equivalence_check, eval_expr,
                   eval_expr_algebra, in_expr_domain, parse, pretty)
from .algebra import AlgebraHandle, MatrixAlgebra
from .realization import (AlgebraSingular, FMRealization,
                          ScalarStructureViolation, SingularPencil,
                          eval_algebra, eval_at_level_n, eval_realization,
                          in_algebra_domain, in_domain, pencil,
                          realization_from_json, realization_to_json,
                          scalar_extract)
from .synthesis import (CentreSingular, Subspace, controllability_matrix_trunc,
                        controllability_span, find_similarity, is_controllable,
                        is_observable, minimize, observability_matrix_trunc,
                        realize_const, realize_expr, realize_inverse,
                        realize_product, realize_sum, realize_var,
                        unobservable_subspace)
from .calculus import (HarnessReport, LlaReport, LlaViolation, NotNilpotent,
                       Word, delta_block, delta_closed_form,
                       delta_resolvent_closed_form, la_check_series, lla_check,
                       lla_check_extended, nc_property_harness,
                       resolvent_evaluator, tt_coefficient, tt_series_eval,
                       tt_series_eval_bruteforce)

__version__ = "0.1.0"
