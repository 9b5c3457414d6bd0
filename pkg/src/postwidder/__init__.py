"""Semi-exponential Post-Widder operators.

Exact moment and expansion-coefficient tables (``symbolic``), gamma-kernel
quadrature of the operator (``opeval``), a catalog of test functions
(``catalog``) and convergence experiments (``harness``).
"""

from postwidder._backend import DEFAULT as BACKEND
from postwidder.algebra import MultiPoly
from postwidder.catalog import DerivativeJet, FunctionSpec, jet_of, make_spec
from postwidder.errors import BudgetError, DivergenceError, DomainError, PostWidderError, SpecParseError
from postwidder.opeval import (
    EvalReport,
    OperatorParams,
    QuadratureConfig,
    eval_exp_closed_form,
    eval_kernel,
    eval_operator,
    eval_via_0F1,
    expansion_partial_sum,
)
from postwidder.symbolic import c_table, c_value, central_moment_poly, moment_poly

__version__ = "0.1.0"
