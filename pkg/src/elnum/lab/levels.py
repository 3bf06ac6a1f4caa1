"""Level sets E_n, their separation, and Colthurst-style schedules.

``E_0 = {0}`` and ``E_{n+1}`` is ``E_n`` closed under one application of
``+ - * /`` to a pair, or ``exp``/``log`` to an element, skipping division
by zero and log of zero.  Members are kept as (expression, ball) pairs.
Two candidates are merged only when the zero recognizer proves their
difference is 0; an undecided pair is kept twice and flagged, so the sizes
reported are upper bounds whenever ``undecided`` is nonempty.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from flint import arb

from ..balls import ComplexBall, decimal_string, precision
from ..errors import ElError
from ..evaluate import DEFAULT_BUDGET, EvalBudget, evaluate, to_arb
from ..expr import ONE, ZERO, Add, Exp, Expr, Inv, Log, Mul, Neg, Rat
from ..syntax import render
from ..zero import Nonzero, Zero, is_zero

__all__ = [
    "LevelCaps", "Member", "LevelSet", "SeparationEstimate", "ScheduleStep",
    "ColthurstRow", "ColthurstReport", "enumerate_levels", "separation", "colthurst_search",
    "contains_value",
]

_BITS = 128


@dataclass(frozen=True)
class LevelCaps:
    """Limits on the enumeration.

    ``max_members`` bounds each level; ``max_rational_bits`` drops rational
    results whose numerator or denominator is larger.
    """

    max_members: int = 5000
    max_rational_bits: int = 64
    n_max: int = 4

    def to_dict(self) -> dict:
        return {"max_members": self.max_members, "max_rational_bits": self.max_rational_bits}


@dataclass(frozen=True)
class Member:
    expr: Expr
    ball: ComplexBall

    def to_dict(self) -> dict:
        return {"expr": render(self.expr), "ball": self.ball.to_dict(20)}


@dataclass(frozen=True)
class LevelSet:
    n: int
    members: tuple[Member, ...]
    caps: LevelCaps
    truncated: bool = False
    undecided: tuple[tuple[str, str], ...] = ()
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.members)

    def exprs(self) -> list[Expr]:
        return [m.expr for m in self.members]

    def sorted_members(self) -> list[Member]:
        return sorted(self.members, key=lambda m: (float(m.ball.mid_re), float(m.ball.mid_im),
                                                   render(m.expr)))

    def to_dict(self) -> dict:
        return {"n": self.n, "size": len(self.members), "truncated": self.truncated,
                "undecided_pairs": [list(p) for p in self.undecided], "skipped": self.skipped,
                "caps": self.caps.to_dict(),
                "members": [m.to_dict() for m in self.sorted_members()]}


class _Pool:
    """Members with a coarse spatial index for overlap lookups."""

    def __init__(self, budget: EvalBudget):
        self.budget = budget
        self.members: list[Member] = []
        self.undecided: list[tuple[str, str]] = []
        self.by_expr: set[Expr] = set()

    def candidates(self, ball: ComplexBall):
        for m in self.members:
            if m.ball.overlaps(ball):
                yield m

    def add(self, expr: Expr, ball: ComplexBall) -> bool:
        """Insert unless certified equal to a member; True if inserted."""
        if expr in self.by_expr:
            return False
        flagged = []
        for m in self.candidates(ball):
            verdict = is_zero(Add(expr, Neg(m.expr)), self.budget)
            if isinstance(verdict, Zero):
                return False
            if not isinstance(verdict, Nonzero):
                flagged.append(m)
        for m in flagged:
            self.undecided.append((render(m.expr), render(expr)))
        self.members.append(Member(expr, ball))
        self.by_expr.add(expr)
        return True


def _fold(expr: Expr) -> Expr:
    """Fold rational subresults so representatives stay readable."""
    if isinstance(expr, (Add, Mul)) and isinstance(expr.left, Rat) and isinstance(expr.right, Rat):
        a, b = expr.left.value, expr.right.value
        return Rat.of(a + b if isinstance(expr, Add) else a * b)
    if isinstance(expr, Add) and ZERO in (expr.left, expr.right):
        return expr.right if expr.left == ZERO else expr.left
    if isinstance(expr, Mul) and ONE in (expr.left, expr.right):
        return expr.right if expr.left == ONE else expr.left
    if isinstance(expr, Neg) and isinstance(expr.child, Rat):
        return Rat.of(-expr.child.value)
    if isinstance(expr, Inv) and isinstance(expr.child, Rat) and expr.child.p:
        return Rat.of(1 / expr.child.value)
    if isinstance(expr, Exp) and expr.child == ZERO:
        return ONE
    if isinstance(expr, Log) and expr.child == ONE:
        return ZERO
    return expr


def _operations(members: Sequence[Expr]):
    """Every one-step result, in a fixed order."""
    for a in members:
        yield Exp(a)
        yield Log(a)
    for a in members:
        for b in members:
            yield Add(a, b)
            yield Add(a, Neg(b))
            yield Mul(a, b)
            yield Mul(a, Inv(b))


def _small(expr: Expr, caps: LevelCaps) -> bool:
    if isinstance(expr, Rat):
        return max(abs(expr.p).bit_length(), expr.q.bit_length()) <= caps.max_rational_bits
    return True


def _next_level(prev: LevelSet, caps: LevelCaps, budget: EvalBudget) -> LevelSet:
    pool = _Pool(budget)
    for m in prev.members:
        pool.members.append(m)
        pool.by_expr.add(m.expr)
    pool.undecided.extend(prev.undecided)
    truncated = prev.truncated
    skipped = 0
    seen: set[Expr] = set()
    for raw in _operations(prev.exprs()):
        if len(pool.members) >= caps.max_members:
            truncated = True
            break
        expr = raw
        # fold the top node only; operands are already representatives
        folded = _fold(expr)
        if isinstance(expr, (Add, Mul)) and isinstance(expr.right, (Neg, Inv)):
            inner = _fold(expr.right)
            if isinstance(inner, Rat):
                folded = _fold(type(expr)(expr.left, inner))
        expr = folded
        if expr in seen:
            continue
        seen.add(expr)
        if not _small(expr, caps):
            skipped += 1
            continue
        try:
            ball = evaluate(expr, _BITS, budget)
        except ElError:
            # division by zero, log of zero, or an undecided guard
            skipped += 1
            continue
        if not ball.is_finite():
            skipped += 1
            continue
        pool.add(expr, ball)
    return LevelSet(prev.n + 1, tuple(pool.members), caps, truncated,
                    tuple(pool.undecided), skipped)


def enumerate_levels(n_max: int, caps: LevelCaps | None = None,
                     budget: EvalBudget = DEFAULT_BUDGET) -> list[LevelSet]:
    """``[E_0, ..., E_{n_max}]`` under ``caps``."""
    caps = caps or LevelCaps()
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max > caps.n_max:
        raise ValueError(f"n_max above {caps.n_max} is beyond desk scale")
    level = LevelSet(0, (Member(ZERO, evaluate(ZERO, _BITS, budget)),), caps)
    levels = [level]
    for _ in range(n_max):
        level = _next_level(level, caps, budget)
        levels.append(level)
    return levels


# -- separation ------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationEstimate:
    n: int
    epsilon: arb | None
    certified: bool
    closest: tuple[str, str]
    note: str = ""

    def epsilon_float(self) -> float:
        return float(self.epsilon) if self.epsilon is not None else float("nan")

    def to_dict(self) -> dict:
        return {"n": self.n, "certified": self.certified, "closest_pair": list(self.closest),
                "epsilon_lower_bound": None if self.epsilon is None
                else decimal_string(self.epsilon, 20),
                "scope": "enumerated members only", "note": self.note}


def _gap(a: Member, b: Member, budget: EvalBudget) -> arb:
    """Certified lower bound on |a - b|, refined once if the balls overlap."""
    bits = max(a.ball.precision_bits, b.ball.precision_bits)
    while True:
        with precision(bits):
            low = arb((a.ball.value - b.ball.value).abs_lower())
        if low > 0 or bits >= budget.max_precision_bits:
            return low
        bits *= 2
        a = Member(a.expr, evaluate(a.expr, bits, budget))
        b = Member(b.expr, evaluate(b.expr, bits, budget))


def separation(level: LevelSet, budget: EvalBudget = DEFAULT_BUDGET) -> SeparationEstimate:
    """Lower bound on the smallest distance between two enumerated members."""
    members = level.members
    if len(members) < 2:
        raise ValueError(f"level {level.n} has fewer than two members")
    best, pair = None, ("", "")
    uncertified = []
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            low = _gap(members[i], members[j], budget)
            names = (render(members[i].expr), render(members[j].expr))
            if not low > 0:
                uncertified.append(names)
                continue
            if best is None or low < best:
                best, pair = low, names
    if uncertified:
        return SeparationEstimate(level.n, best, False, uncertified[0],
                                  f"{len(uncertified)} pairs not separated within budget")
    note = "capped enumeration" if level.truncated else ""
    return SeparationEstimate(level.n, best, True, pair, note)


# -- Colthurst schedules ---------------------------------------------------------------

@dataclass(frozen=True)
class ScheduleStep:
    """One term ``f(n)`` with a claimed bound on the tail after it."""

    term: Expr
    tail_bound: Fraction


@dataclass(frozen=True)
class ColthurstRow:
    n: int
    partial_sum: str
    member: bool | None
    tail_below_epsilon: bool | None
    epsilon: str | None

    @property
    def passed(self) -> bool:
        return bool(self.member) and bool(self.tail_below_epsilon)

    def to_dict(self) -> dict:
        return {"n": self.n, "partial_sum": self.partial_sum, "member": self.member,
                "tail_below_epsilon": self.tail_below_epsilon, "epsilon": self.epsilon,
                "passed": self.passed}


@dataclass(frozen=True)
class ColthurstReport:
    rows: tuple[ColthurstRow, ...]
    note: str = "non-membership is relative to the capped enumeration"

    @property
    def passing(self) -> list[int]:
        return [r.n for r in self.rows if r.passed]

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "passing": self.passing,
                "note": self.note}


def contains_value(level: LevelSet, expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> bool | None:
    """True/False if ``expr`` is certified equal/unequal to every member, else None."""
    ball = evaluate(expr, _BITS, budget)
    undecided = False
    for m in level.members:
        if not m.ball.overlaps(ball):
            continue
        verdict = is_zero(Add(expr, Neg(m.expr)), budget)
        if isinstance(verdict, Zero):
            return True
        if not isinstance(verdict, Nonzero):
            undecided = True
    return None if undecided else False


def colthurst_search(schedule: Sequence[ScheduleStep], n_max: int | None = None,
                     levels: Sequence[LevelSet] | None = None, caps: LevelCaps | None = None,
                     budget: EvalBudget = DEFAULT_BUDGET) -> ColthurstReport:
    """For each n, is ``f(1)+...+f(n)`` in E_n and is the tail bound below eps_n?"""
    steps = list(schedule)
    n_max = len(steps) if n_max is None else min(n_max, len(steps))
    if levels is None or len(levels) <= n_max:
        levels = enumerate_levels(n_max, caps, budget)
    rows = []
    partial: Expr = ZERO
    for n in range(1, n_max + 1):
        step = steps[n - 1]
        partial = _fold(Add(partial, step.term)) if n > 1 else step.term
        member = contains_value(levels[n], partial, budget)
        eps = separation(levels[n], budget) if len(levels[n]) >= 2 else None
        if eps is None or not eps.certified:
            tail_ok = None
            eps_text = None
        else:
            tail_ok = bool(to_arb(step.tail_bound) < eps.epsilon)
            eps_text = decimal_string(eps.epsilon, 20)
        rows.append(ColthurstRow(n, render(partial), member, tail_ok, eps_text))
    return ColthurstReport(tuple(rows))
