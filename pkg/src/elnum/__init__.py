"""EL numbers: exp-log closed forms, towers, relations and zero recognition."""

from .balls import ComplexBall
from .errors import (BranchUndecided, BudgetExhausted, DeadlineExceeded, DivisionByZero, ElError,
                     GuardError, GuardUndecided, LogOfZero, RelationVerificationError)
from .evaluate import DEFAULT_BUDGET, EvalBudget, evaluate, refine
from .expr import (Add, Exp, Expr, ExprMeta, Inv, Log, Mul, Neg, Rat, builtin, derived, meta)
from .fieldelem import FieldElement
from .linrel import IntegerRelation, OpaqueConstant, find_rational_relation, verify_relation
from .rewrite import RewriteStep, exact_rewrites, exact_rewrites_traced
from .syntax import ParseError, parse, render
from .tower import (ReducedTower, Tower, TowerEntry, build_tower, divide_tower, reduce_tower,
                    verify_tower)
from .zero import Nonzero, Unknown, Zero, ZeroVerdict, is_zero

__version__ = "0.1.0"

__all__ = [
    "ComplexBall", "BranchUndecided", "BudgetExhausted", "DeadlineExceeded", "DivisionByZero", "ElError",
    "GuardError", "GuardUndecided", "LogOfZero", "RelationVerificationError",
    "DEFAULT_BUDGET", "EvalBudget", "evaluate", "refine",
    "Add", "Exp", "Expr", "ExprMeta", "Inv", "Log", "Mul", "Neg", "Rat", "builtin", "derived",
    "meta", "FieldElement", "IntegerRelation", "OpaqueConstant", "find_rational_relation",
    "verify_relation", "RewriteStep", "exact_rewrites", "exact_rewrites_traced",
    "ParseError", "parse", "render", "ReducedTower", "Tower", "TowerEntry", "build_tower",
    "divide_tower", "reduce_tower", "verify_tower", "Nonzero", "Unknown", "Zero",
    "ZeroVerdict", "is_zero",
]
