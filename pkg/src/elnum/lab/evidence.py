"""Relation-search evidence for the two non-membership conjectures.

For each target (``R``, or each of ``r1..r5``) we look for an integer
relation between the target and a fixed basis of EL constants.  Finding
none is evidence only: it says nothing beyond the recorded height bound and
precision.  A relation that involves the target and verifies is reported
as a falsification candidate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import ElError
from ..evaluate import DEFAULT_BUDGET, EvalBudget
from ..linrel import OpaqueConstant, Value, find_rational_relation, value_text, verify_relation
from ..syntax import parse
from .roots import opaque_constants, question_roots

__all__ = ["DEFAULT_BASIS", "STATEMENTS", "SearchRecord", "EvidenceReport",
           "conjecture_evidence", "default_basis"]

DEFAULT_BASIS = ("1", "log(2)", "log(3)", "log(5)", "pi", "e")

STATEMENTS = {
    1: "The real root R of x + e^x = 0 is not in E.",
    2: "The roots r1, ..., r5 of 2x^5 - 10x + 5 = 0 are not in E.",
}

CONSISTENT = "consistent"
FALSIFICATION = "falsification candidate"
INCONCLUSIVE = "inconclusive"


def default_basis() -> list[Value]:
    return [parse(t) for t in DEFAULT_BASIS]


@dataclass(frozen=True)
class SearchRecord:
    target: str
    inputs: tuple[str, ...]
    height_bound: int
    precision_bits: int
    relation: dict | None
    involves_target: bool
    error: str = ""

    @property
    def outcome(self) -> str:
        if self.error:
            return "error"
        if self.relation is None:
            return "none found"
        return self.relation["status"]

    def to_dict(self) -> dict:
        return {"target": self.target, "inputs": list(self.inputs),
                "height_bound": self.height_bound, "precision_bits": self.precision_bits,
                "outcome": self.outcome, "relation": self.relation,
                "involves_target": self.involves_target, "error": self.error}


@dataclass(frozen=True)
class EvidenceReport:
    conjecture: int
    searches: tuple[SearchRecord, ...]
    verdict: str
    detail: str
    roots: tuple[tuple[str, dict], ...]
    seed: int

    def to_dict(self) -> dict:
        return {"conjecture": self.conjecture, "statement": STATEMENTS[self.conjecture],
                "verdict": self.verdict, "detail": self.detail, "seed": self.seed,
                "roots": [{"name": n, "ball": b} for n, b in self.roots],
                "searches": [s.to_dict() for s in self.searches]}


def _search(target: OpaqueConstant, basis: Sequence[Value], H: int, bits: int,
            budget: EvalBudget) -> SearchRecord:
    values = [target, *basis]
    inputs = tuple(value_text(v) for v in values)
    try:
        rel = find_rational_relation(values, H, bits, budget)
        if rel is not None:
            rel = verify_relation(values, rel, budget)
    except (ElError, ValueError) as exc:
        return SearchRecord(target.name, inputs, H, bits, None, False,
                            f"{type(exc).__name__}: {exc}")
    if rel is None:
        return SearchRecord(target.name, inputs, H, bits, None, False)
    involves = rel.coefficients[0] != 0 or any(
        c and isinstance(v, OpaqueConstant) and v.name == target.name
        for v, c in zip(values[1:], rel.coefficients[1:]))
    return SearchRecord(target.name, inputs, H, bits, rel.to_dict(), involves)


def conjecture_evidence(conjecture: int, H: int = 20, precision_bits: int = 256,
                        basis: Sequence[Value] | None = None, seed: int = 0,
                        budget: EvalBudget = DEFAULT_BUDGET) -> EvidenceReport:
    """Run the relation searches for Conjecture ``conjecture`` (1 or 2).

    Every step is deterministic; ``seed`` is recorded so a report can be
    regenerated with the same command line.
    """
    if conjecture not in STATEMENTS:
        raise ValueError("conjecture id must be 1 or 2")
    basis = default_basis() if basis is None else list(basis)
    consts = opaque_constants()
    names = ["R"] if conjecture == 1 else [f"r{j}" for j in range(1, 6)]
    roots = question_roots(precision_bits)
    balls = {"R": roots.R, **{f"r{j}": r for j, r in enumerate(roots.quintic, start=1)}}
    searches = tuple(_search(consts[n], basis, H, precision_bits, budget) for n in names)

    hits = [s for s in searches if s.relation and s.involves_target]
    verified = [s for s in hits if s.relation["status"] == "VerifiedSymbolic"]
    if verified:
        verdict = FALSIFICATION
        detail = "verified relation involving " + ", ".join(s.target for s in verified)
    elif hits or any(s.error for s in searches):
        verdict = INCONCLUSIVE
        detail = "unverified candidate relation or failed search"
    elif any(s.relation for s in searches):
        verdict = INCONCLUSIVE
        detail = "the basis itself is Q-linearly dependent"
    else:
        verdict = CONSISTENT
        detail = (f"no EL relation found up to height {H} at {precision_bits} bits; "
                  "this is evidence, not proof")
    return EvidenceReport(conjecture, searches, verdict, detail,
                          tuple((n, balls[n].to_dict()) for n in names), seed)
