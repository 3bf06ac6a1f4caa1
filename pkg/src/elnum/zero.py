"""Three-valued zero recognition.

``is_zero`` answers :class:`Nonzero` only with a ball that excludes 0 and
:class:`Zero` only with a rewrite derivation that replays to the literal 0.
Everything else is :class:`Unknown`.  Termination on every input is not
claimed; the budget bounds the work instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .balls import ComplexBall
from .errors import ElError
from .evaluate import DEFAULT_BUDGET, EvalBudget, evaluate
from .expr import Expr, Rat
from .rewrite import RewriteStep, exact_rewrites_traced, replay

__all__ = ["ZeroVerdict", "Nonzero", "Zero", "Unknown", "is_zero"]


class ZeroVerdict:
    """Base class of the three verdicts."""

    kind = "?"

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Nonzero(ZeroVerdict):
    certificate: ComplexBall
    kind = "Nonzero"

    def __post_init__(self):
        if not self.certificate.excludes_zero():
            raise ValueError("a Nonzero certificate must exclude 0")

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "certificate": self.certificate.to_dict()}


@dataclass(frozen=True)
class Zero(ZeroVerdict):
    expr: Expr
    derivation: tuple[RewriteStep, ...]
    kind = "Zero"

    def replay(self, budget: EvalBudget = DEFAULT_BUDGET) -> Expr:
        return replay(self.expr, self.derivation, budget)

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "derivation": [s.to_dict() for s in self.derivation]}


@dataclass(frozen=True)
class Unknown(ZeroVerdict):
    max_precision_bits: int
    rewrite_steps: int
    reason: str = ""
    diagnostics: tuple[str, ...] = field(default=())
    kind = "Unknown"

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "max_precision_bits": self.max_precision_bits,
                "rewrite_steps": self.rewrite_steps, "reason": self.reason,
                "diagnostics": list(self.diagnostics)}


def _try_ball(expr: Expr, bits: int, budget: EvalBudget, notes: list[str]):
    try:
        b = evaluate(expr, bits, budget)
    except ElError as exc:
        notes.append(f"{bits} bits: {type(exc).__name__}: {exc}")
        return None
    return b if b.excludes_zero() else None


@lru_cache(maxsize=8192)
def is_zero(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> ZeroVerdict:
    """Decide whether ``expr`` is exactly zero, soundly, or say Unknown.

    The zero-test allowance is split evenly: half bounds the rewrite steps,
    half bounds the number of precision doublings.
    """
    if isinstance(expr, Rat):
        if expr.p == 0:
            return Zero(expr, ())
        return Nonzero(ComplexBall.exact(expr.value))
    notes: list[str] = []
    rewrite_allowance = max(1, budget.zero_test_budget // 2)
    doublings = max(1, budget.zero_test_budget - rewrite_allowance)

    # 128 bits keeps certificates tight (radius ~1e-38) at little extra cost
    cert = _try_ball(expr, 128, budget, notes)
    if cert is not None:
        return Nonzero(cert)

    result, steps = exact_rewrites_traced(expr, budget, max_steps=rewrite_allowance * 4)
    if result == Rat(0):
        return Zero(expr, tuple(steps))
    if isinstance(result, Rat):
        # Value-equal to a nonzero rational, whose exact ball excludes 0.
        return Nonzero(ComplexBall.exact(result.value))

    bits = 256
    tried = 128
    while bits <= budget.max_precision_bits and doublings > 0:
        cert = _try_ball(expr, bits, budget, notes)
        tried = bits
        if cert is not None:
            return Nonzero(cert)
        bits *= 2
        doublings -= 1
    return Unknown(tried, len(steps), "ball contains 0 and rewrites did not reach 0",
                   tuple(notes))
