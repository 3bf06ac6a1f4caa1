"""Towers, the Division Lemma and the Reduction Lemma.

A tower is a list of nonzero ``alpha_i``; entry ``i`` carries a witness in
``A_{i-1} = Q(alpha_1, e^alpha_1, ..., alpha_{i-1}, e^alpha_{i-1})`` equal to
either ``alpha_i^m`` (``PowerInBase``) or ``e^(alpha_i*m)`` (``ExpInBase``).
Witnesses are :class:`FieldElement` objects over the symbols ``Xj`` (for
``alpha_j``) and ``Yj`` (for ``e^alpha_j``), so membership is never decided,
only checked by evaluating both sides.

"Reduced" here always means: no integer relation of height at most ``H``
was found at the recorded precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from flint import acb

from .balls import ComplexBall, precision
from .errors import GuardUndecided, RelationVerificationError
from .evaluate import DEFAULT_BUDGET, EvalBudget, evaluate, to_arb
from .expr import Add, Exp, Expr, Inv, Log, Mul, Neg, Rat
from .fieldelem import FieldElement, Var, X, Y
from .linrel import IntegerRelation, find_rational_relation, verify_relation
from .syntax import render
from .zero import Nonzero, Zero, is_zero

__all__ = [
    "POWER_IN_BASE", "EXP_IN_BASE", "TowerEntry", "Tower", "ReducedTower", "Splice",
    "EntryCheck", "TowerReport", "build_tower", "divide_tower", "reduce_tower",
    "verify_tower", "target_ball",
]

POWER_IN_BASE = "PowerInBase"
EXP_IN_BASE = "ExpInBase"


@dataclass(frozen=True)
class TowerEntry:
    alpha: Expr
    m: int
    witness_kind: str
    witness: FieldElement

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if self.witness_kind not in (POWER_IN_BASE, EXP_IN_BASE):
            raise ValueError(f"unknown witness kind {self.witness_kind!r}")

    def to_dict(self) -> dict:
        return {"alpha": render(self.alpha), "m": self.m,
                "witness_kind": self.witness_kind, "witness": self.witness.to_text()}


@dataclass(frozen=True)
class Tower:
    entries: tuple[TowerEntry, ...] = ()
    target: FieldElement | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for i, entry in enumerate(self.entries, start=1):
            if entry.witness.max_index() >= i:
                raise ValueError(f"witness of entry {i} uses a generator of index >= {i}")
        if self.target is not None and self.target.max_index() > len(self.entries):
            raise ValueError("target uses a generator beyond the tower")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def alphas(self) -> tuple[Expr, ...]:
        return tuple(e.alpha for e in self.entries)

    def target_expr(self) -> Expr | None:
        """The target as an EL expression in the tower's alphas."""
        if self.target is None:
            return None
        return self.target.to_expr(dict(enumerate(self.alphas, start=1)))

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries],
                "target": None if self.target is None else self.target.to_text()}

    def __str__(self) -> str:
        lines = [f"A{i}: alpha = {render(e.alpha)}, m = {e.m}, "
                 f"{e.witness_kind}: {_witness_lhs(e, i)} = {e.witness.to_text()}"
                 for i, e in enumerate(self.entries, start=1)]
        if self.target is not None:
            lines.append(f"target = {self.target.to_text()}")
        return "\n".join(lines) if lines else "empty tower"


def _witness_lhs(e: TowerEntry, i: int) -> str:
    if e.witness_kind == POWER_IN_BASE:
        return f"X{i}" if e.m == 1 else f"X{i}^{e.m}"
    return f"Y{i}" if e.m == 1 else f"Y{i}^{e.m}"


@dataclass(frozen=True)
class Splice:
    """One application of the Reduction Lemma: entry ``index`` removed."""

    index: int
    relation: IntegerRelation
    q: int
    p: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"index": self.index, "q": self.q, "p": list(self.p),
                "relation": self.relation.to_dict()}


@dataclass(frozen=True)
class ReducedTower:
    tower: Tower
    height_bound: int
    precision_bits: int
    splices: tuple[Splice, ...] = ()
    outcome: str = "none found"

    def to_dict(self) -> dict:
        return {"tower": self.tower.to_dict(), "splices": [s.to_dict() for s in self.splices],
                "evidence": {"height_bound": self.height_bound,
                             "precision_bits": self.precision_bits,
                             "relation_search": self.outcome}}


# -- construction ---------------------------------------------------------------------

class _Builder:
    def __init__(self, budget: EvalBudget):
        self.budget = budget
        self.entries: list[TowerEntry] = []
        self.index: dict[Expr, int] = {}
        self.memo: dict[Expr, FieldElement] = {}

    def _nonzero(self, alpha: Expr) -> bool:
        """True if certified nonzero, False if certified zero."""
        verdict = is_zero(alpha, self.budget)
        if isinstance(verdict, Nonzero):
            return True
        if isinstance(verdict, Zero):
            return False
        raise GuardUndecided(f"cannot certify tower entry {render(alpha)} nonzero")

    def _entry(self, alpha: Expr, kind: str, witness: FieldElement) -> int:
        if alpha not in self.index:
            self.entries.append(TowerEntry(alpha, 1, kind, witness))
            self.index[alpha] = len(self.entries)
        return self.index[alpha]

    def element(self, node: Expr) -> FieldElement:
        # iterative post-order, so deep trees do not hit the recursion limit
        stack = [(node, False)]
        while stack:
            cur, ready = stack.pop()
            if cur in self.memo:
                continue
            if not ready:
                stack.append((cur, True))
                stack.extend((c, False) for c in reversed(cur.children()) if c not in self.memo)
                continue
            self.memo[cur] = self._translate(cur)
        return self.memo[node]

    def _translate(self, node: Expr) -> FieldElement:
        kids = [self.memo[c] for c in node.children()]
        if isinstance(node, Rat):
            return FieldElement.const(node.value)
        if isinstance(node, Add):
            return kids[0] + kids[1]
        if isinstance(node, Mul):
            return kids[0] * kids[1]
        if isinstance(node, Neg):
            return -kids[0]
        if isinstance(node, Inv):
            return kids[0].inverse()
        if isinstance(node, Exp):
            fe = kids[0]
            c = fe.constant()
            if c == 0:
                return FieldElement.const(1)
            alpha = Rat.of(c) if c is not None else node.child
            if alpha not in self.index and c is None and not self._nonzero(alpha):
                return FieldElement.const(1)
            return Y(self._entry(alpha, POWER_IN_BASE, fe))
        if isinstance(node, Log):
            fe = kids[0]
            c = fe.constant()
            if c == 1:
                return FieldElement.const(0)
            alpha = Log(Rat.of(c)) if c is not None else node
            if alpha not in self.index and c is None and not self._nonzero(alpha):
                return FieldElement.const(0)
            return X(self._entry(alpha, EXP_IN_BASE, fe))
        raise TypeError(f"not an EL expression node: {node!r}")


def build_tower(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> Tower:
    """Tower with all ``m = 1`` whose top field contains ``expr``.

    ``exp(x)`` adds ``alpha = x`` (witness: ``x`` itself, so PowerInBase);
    ``log(x)`` adds ``alpha = log(x)`` (witness: ``e^alpha = x``, so
    ExpInBase).  Entries are shared when their alpha trees are equal.
    """
    evaluate(expr, 128, budget)  # surface guard errors first
    b = _Builder(budget)
    target = b.element(expr)
    return Tower(tuple(b.entries), target)


# -- evaluation and checking -----------------------------------------------------------

def _values(t: Tower, bits: int, upto: int, budget: EvalBudget) -> dict[Var, acb]:
    out: dict[Var, acb] = {}
    for j, e in enumerate(t.entries[:upto], start=1):
        a = evaluate(e.alpha, bits, budget).value
        with precision(bits):
            out[("X", j)] = a
            out[("Y", j)] = a.exp()
    return out


def _eval_element(fe: FieldElement, values: dict[Var, acb], bits: int) -> acb:
    with precision(bits):
        return fe.evaluate(values)


def target_ball(t: Tower, bits: int = 256, budget: EvalBudget = DEFAULT_BUDGET) -> ComplexBall:
    if t.target is None:
        raise ValueError("tower has no target")
    values = _values(t, bits, len(t), budget)
    return ComplexBall(_eval_element(t.target, values, bits), bits)


@dataclass(frozen=True)
class EntryCheck:
    index: int
    passed: bool
    residual: ComplexBall | None
    note: str = ""

    def to_dict(self) -> dict:
        return {"index": self.index, "passed": self.passed, "note": self.note,
                "residual": None if self.residual is None else self.residual.to_dict(12)}


@dataclass(frozen=True)
class TowerReport:
    tolerance: str
    entries: tuple[EntryCheck, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_dict(self) -> dict:
        return {"tolerance": self.tolerance, "passed": self.passed,
                "entries": [e.to_dict() for e in self.entries]}


def _entry_residual(t: Tower, i: int, bits: int, budget: EvalBudget) -> acb:
    e = t.entries[i - 1]
    values = _values(t, bits, i, budget)
    with precision(bits):
        a = values[("X", i)]
        lhs = a ** e.m if e.witness_kind == POWER_IN_BASE else (a * e.m).exp()
        return lhs - e.witness.evaluate(values)


def verify_tower(t: Tower, tolerance="1e-30", budget: EvalBudget = DEFAULT_BUDGET,
                 start_bits: int = 128) -> TowerReport:
    """Check every witness identity numerically.

    An entry passes when the ball for ``lhs - witness`` contains 0 and has
    radius at most ``tolerance``.  Precision is doubled until one of the two
    outcomes is settled or the budget's precision cap is reached.
    """
    tol = to_arb(tolerance)
    checks = []
    for i in range(1, len(t) + 1):
        bits, result = start_bits, None
        while bits <= budget.max_precision_bits:
            try:
                r = ComplexBall(_entry_residual(t, i, bits, budget), bits)
            except ZeroDivisionError:
                result = EntryCheck(i, False, None, "witness denominator ball contains 0")
                bits *= 2
                continue
            if r.excludes_zero():
                result = EntryCheck(i, False, r, "residual ball excludes 0")
                break
            result = EntryCheck(i, bool(r.radius <= tol), r,
                                "" if r.radius <= tol else "radius above tolerance")
            if result.passed:
                break
            bits *= 2
        checks.append(result)
    return TowerReport(str(tolerance), tuple(checks))


# -- Division Lemma ---------------------------------------------------------------------

def _scaled_alpha(alpha: Expr, q: int) -> Expr:
    if q == 1:
        return alpha
    if isinstance(alpha, Rat):
        return Rat.of(alpha.value / q)
    return Mul(alpha, Inv(Rat(q)))


def _division_images(q: Sequence[int]) -> dict[Var, FieldElement]:
    images: dict[Var, FieldElement] = {}
    for j, qj in enumerate(q, start=1):
        if qj != 1:
            images[("X", j)] = qj * X(j)
            images[("Y", j)] = Y(j) ** qj
    return images


def divide_tower(t: Tower, q: Sequence[int]) -> Tower:
    """The tower ``beta_i = alpha_i/q_i``, with witnesses and target re-expressed.

    Old generators are images under ``Xj -> q_j*Xj``, ``Yj -> Yj^q_j``, which
    is why ``A_i`` sits inside ``B_i``.  ExpInBase entries get ``m' = |q_i|*m``
    (the witness is inverted when ``q_i < 0``); PowerInBase entries keep
    ``m`` and divide the witness by ``q_i^m``.
    """
    q = [int(x) for x in q]
    if len(q) != len(t):
        raise ValueError(f"need {len(t)} divisors, got {len(q)}")
    if any(x == 0 for x in q):
        raise ValueError("divisors must be nonzero")
    images = _division_images(q)
    entries = []
    for e, qi in zip(t.entries, q):
        w = e.witness.substitute(images) if images else e.witness
        if e.witness_kind == POWER_IN_BASE:
            entries.append(TowerEntry(_scaled_alpha(e.alpha, qi), e.m, POWER_IN_BASE,
                                      w / Fraction(qi) ** e.m))
        else:
            entries.append(TowerEntry(_scaled_alpha(e.alpha, qi), abs(qi) * e.m, EXP_IN_BASE,
                                      w if qi > 0 else w.inverse()))
    target = None
    if t.target is not None:
        target = t.target.substitute(images) if images else t.target
    return Tower(tuple(entries), target)


# -- Reduction Lemma --------------------------------------------------------------------

def _search(alphas: Sequence[Expr], H: int, bits: int, budget: EvalBudget):
    """Relation search with the 1x, 2x, 4x precision escalation."""
    used = bits
    for scale in (1, 2, 4):
        used = bits * scale
        rel = find_rational_relation(alphas, H, used, budget)
        if rel is not None:
            return rel, used
    return None, used


def _splice(t: Tower, i: int, c: Sequence[int]) -> Tower:
    """Remove entry ``i`` using ``sum c_j alpha_j = 0`` with ``c_i > 0``."""
    qi = c[i - 1]
    p = [-cj for cj in c[: i - 1]]
    prefix = divide_tower(Tower(t.entries[: i - 1]), [qi] * (i - 1))
    images: dict[Var, FieldElement] = dict(_division_images([qi] * (i - 1)))
    lin = FieldElement.const(0)
    mono = FieldElement.const(1)
    for j, pj in enumerate(p, start=1):
        if pj:
            lin = lin + pj * X(j)
            mono = mono * Y(j) ** pj
    images[("X", i)] = lin
    images[("Y", i)] = mono
    for j in range(i + 1, len(t) + 1):
        images[("X", j)] = X(j - 1)
        images[("Y", j)] = Y(j - 1)
    later = tuple(TowerEntry(e.alpha, e.m, e.witness_kind, e.witness.substitute(images))
                  for e in t.entries[i:])
    target = None if t.target is None else t.target.substitute(images)
    return Tower(prefix.entries + later, target)


def reduce_tower(t: Tower, H: int = 50, precision_bits: int = 256,
                 budget: EvalBudget = DEFAULT_BUDGET) -> ReducedTower:
    """Splice out dependent entries until no relation of height <= H is found.

    Each round takes the smallest ``i`` for which ``alpha_1..alpha_i`` has a
    relation, checks it exactly, divides the prefix by ``c_i`` and
    substitutes ``alpha_i = sum p_j beta_j`` into the later witnesses and
    the target.  A relation that cannot be verified aborts the reduction.
    """
    if H < 1:
        raise ValueError("height bound must be at least 1")
    splices: list[Splice] = []
    used = precision_bits
    while True:
        alphas = t.alphas
        found = None
        for i in range(2, len(t) + 1):
            rel, used = _search(alphas[:i], H, precision_bits, budget)
            if rel is not None:
                found = (i, rel)
                break
        if found is None:
            return ReducedTower(t, H, used, tuple(splices))
        i, rel = found
        checked = verify_relation(alphas[:i], rel, budget)
        if not checked.verified:
            raise RelationVerificationError(
                f"relation {list(rel.coefficients)} among entries 1..{i} "
                f"not verified: {checked.diagnostic}")
        c = list(checked.coefficients)
        i = max(k for k, ck in enumerate(c, start=1) if ck)  # defensive: last nonzero
        c = c[:i]
        if c[i - 1] < 0:
            c = [-x for x in c]
        before = len(t)
        t = _splice(t, i, c)
        assert len(t) == before - 1
        splices.append(Splice(i, checked, c[i - 1], tuple(-x for x in c[: i - 1])))
