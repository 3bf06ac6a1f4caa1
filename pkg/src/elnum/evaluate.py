"""Rigorous ball evaluation of EL expressions.

``log`` is the principal branch, ``-pi < Im(log x) <= pi``.  Before every
``Inv`` and ``Log`` the argument must be shown nonzero: the evaluator first
refines the argument's ball, then asks the zero recognizer.  A certified
zero is a hard error; an undecided one raises :class:`GuardUndecided`.

Log arguments whose ball touches the negative real axis are resolved by
refinement, then by an exact real/imaginary decomposition of the argument.
If neither settles the side of the cut, :class:`BranchUndecided` is raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from flint import acb, arb

from .balls import ComplexBall, precision, rat_to_arb
from .errors import BranchUndecided, BudgetExhausted, DivisionByZero, GuardUndecided, LogOfZero
from .expr import Add, Exp, Expr, Inv, Log, Mul, Neg, Rat

__all__ = ["EvalBudget", "DEFAULT_BUDGET", "evaluate", "refine", "to_arb"]


@dataclass(frozen=True)
class EvalBudget:
    """Limits for one evaluation.

    ``zero_test_budget`` is the step allowance handed to the zero
    recognizer when a guard cannot be passed by refinement alone.
    """

    max_precision_bits: int = 2048
    zero_test_budget: int = 64

    def __post_init__(self):
        if self.max_precision_bits < 32:
            raise ValueError("max_precision_bits must be at least 32")
        if self.zero_test_budget < 0:
            raise ValueError("zero_test_budget must be nonnegative")


DEFAULT_BUDGET = EvalBudget()


def _has_zero(v: acb) -> bool:
    return v.real.contains(0) and v.imag.contains(0)


class _Evaluator:
    def __init__(self, bits: int, budget: EvalBudget):
        self.bits = bits
        self.budget = budget
        self.memo: dict[Expr, acb] = {}

    def value(self, node: Expr) -> acb:
        try:
            return self.memo[node]
        except KeyError:
            pass
        v = self._compute(node)
        self.memo[node] = v
        return v

    def _compute(self, node: Expr) -> acb:
        if isinstance(node, Rat):
            return acb(rat_to_arb(node.value))
        if isinstance(node, Add):
            return self.value(node.left) + self.value(node.right)
        if isinstance(node, Mul):
            return self.value(node.left) * self.value(node.right)
        if isinstance(node, Neg):
            return -self.value(node.child)
        if isinstance(node, Exp):
            return self.value(node.child).exp()
        if isinstance(node, Inv):
            return 1 / self.nonzero(node.child, DivisionByZero)
        if isinstance(node, Log):
            return self.log(node.child)
        raise TypeError(f"not an EL expression node: {node!r}")

    # -- guards ---------------------------------------------------------------

    def _refined(self, node: Expr):
        """Balls for ``node`` at increasing precision, capped at 4x current."""
        bits = self.bits * 2
        cap = min(self.budget.max_precision_bits, self.bits * 4)
        while bits <= cap:
            with precision(bits):
                v = _Evaluator(bits, self.budget).value(node)
            yield v
            bits *= 2

    def nonzero(self, node: Expr, error: type) -> acb:
        v = self.value(node)
        if not _has_zero(v):
            return v
        if isinstance(node, Rat):
            raise error(f"argument {node} is zero")
        for v in self._refined(node):
            if not _has_zero(v):
                return v
        from .zero import Nonzero, Zero, is_zero

        verdict = is_zero(node, self.budget)
        if isinstance(verdict, Zero):
            raise error(f"argument is exactly zero: {node}")
        if isinstance(verdict, Nonzero):
            return verdict.certificate.value
        raise GuardUndecided(f"cannot decide whether {node} is zero: {verdict.reason}")

    def log(self, node: Expr) -> acb:
        v = self.nonzero(node, LogOfZero)
        if _clear_of_cut(v):
            return v.log()
        for w in self._refined(node):
            if not _has_zero(w) and _clear_of_cut(w):
                return w.log()
        from .rewrite import cut_side

        side = cut_side(node, self.budget)
        if side is None:
            raise BranchUndecided(f"cannot place {node} relative to the branch cut")
        re, im = v.real, v.imag
        if side == 0:
            # Exactly real; the guard already excludes zero.
            if re < 0:
                return acb((-re).log(), arb.pi())
            if re > 0:
                return acb(re.log(), 0)
            raise BranchUndecided(f"sign of real argument {node} not resolved")
        clamped = im.nonnegative_part() if side > 0 else -((-im).nonnegative_part())
        modulus = (re * re + im * im).log() / 2
        return acb(modulus, arb.atan2(clamped, re))


def _clear_of_cut(v: acb) -> bool:
    re, im = v.real, v.imag
    return bool(re > 0) or not im.contains(0) or im.is_zero()


def evaluate(expr: Expr, precision_bits: int = 128,
             budget: EvalBudget = DEFAULT_BUDGET) -> ComplexBall:
    """Ball enclosing the value of ``expr`` at ``precision_bits``."""
    if precision_bits < 32:
        raise ValueError("precision_bits must be at least 32")
    with precision(precision_bits):
        v = _Evaluator(precision_bits, budget).value(expr)
    return ComplexBall(v, precision_bits)


def to_arb(x) -> arb:
    """Exact-ish arb for a user tolerance given as float, int, str or Fraction."""
    if isinstance(x, arb):
        return x
    return rat_to_arb(Fraction(str(x)) if isinstance(x, float) else Fraction(x))


def refine(expr: Expr, target_radius, budget: EvalBudget = DEFAULT_BUDGET,
           start_bits: int = 64) -> ComplexBall:
    """Double the precision until the ball radius is at most ``target_radius``."""
    target = to_arb(target_radius)
    if not target > 0:
        raise ValueError("target_radius must be positive")
    bits = max(64, start_bits)
    previous = None
    while bits <= budget.max_precision_bits:
        ball = evaluate(expr, bits, budget)
        if previous is not None and not previous.overlaps(ball):
            raise AssertionError(f"inconsistent enclosures for {expr} at {bits} bits")
        if ball.is_finite() and ball.radius <= target:
            return ball
        previous = ball
        bits *= 2
    raise BudgetExhausted(
        f"radius {target_radius} not reached within {budget.max_precision_bits} bits")
