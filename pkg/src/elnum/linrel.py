"""Integer relations among complex constants.

Detection is numeric: LLL on the lattice spanned by the rows
``e_j | round(S*Re v_j), round(S*Im v_j)`` with ``S = 2**(prec/2)``.  Real
and imaginary parts sit side by side, so a surviving short vector has to
kill both.  Every candidate then has to pass a residual ball check, and
``verify_relation`` upgrades it to ``VerifiedSymbolic`` only when the zero
recognizer proves the combination is exactly 0.

Values are EL expressions or :class:`OpaqueConstant` objects, the latter for
numbers such as the root of ``x + e^x`` that are only known through balls.
An opaque constant can only be cancelled against itself during
verification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from math import gcd
from typing import Callable, Sequence, Union

import flint
from flint import acb, arb

from .balls import ComplexBall, precision
from .evaluate import DEFAULT_BUDGET, EvalBudget, evaluate
from .expr import Add, Expr, Mul, Neg, Rat
from .syntax import render
from .zero import Nonzero, Zero, is_zero

__all__ = [
    "IntegerRelation", "OpaqueConstant", "find_rational_relation", "verify_relation",
    "relation_residual", "CANDIDATE", "VERIFIED",
]

CANDIDATE = "CandidateNumeric"
VERIFIED = "VerifiedSymbolic"
_COMBO_ROWS = 4
_COMBO_RANGE = 2


@dataclass(frozen=True)
class OpaqueConstant:
    """A named number known only through ``enclose(bits) -> acb``."""

    name: str
    enclose: Callable[[int], acb] = field(compare=False, repr=False)

    def __str__(self) -> str:
        return self.name


Value = Union[Expr, OpaqueConstant]


def value_text(v: Value) -> str:
    return v.name if isinstance(v, OpaqueConstant) else render(v)


@dataclass(frozen=True)
class IntegerRelation:
    coefficients: tuple[int, ...]
    status: str = CANDIDATE
    height_bound: int = 0
    precision_bits: int = 0
    rejected: bool = False
    diagnostic: str = ""

    def __post_init__(self):
        if not any(self.coefficients):
            raise ValueError("a relation needs a nonzero coefficient")
        if self.status not in (CANDIDATE, VERIFIED):
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def height(self) -> int:
        return max(abs(c) for c in self.coefficients)

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED

    def to_dict(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "height": self.height,
            "status": self.status,
            "rejected": self.rejected,
            "diagnostic": self.diagnostic,
            "evidence": {"height_bound": self.height_bound, "precision_bits": self.precision_bits},
        }


def _ball(v: Value, bits: int, budget: EvalBudget) -> acb:
    if isinstance(v, OpaqueConstant):
        with precision(bits):
            return v.enclose(bits)
    return evaluate(v, bits, budget).value


def _canonical_sign(c: tuple[int, ...]) -> tuple[int, ...]:
    """Divide out the content and make the last nonzero entry positive."""
    g = 0
    for x in c:
        g = gcd(g, x)
    c = tuple(x // g for x in c)
    last = next(x for x in reversed(c) if x)
    return c if last > 0 else tuple(-x for x in c)


def relation_residual(balls: Sequence[acb], coeffs: Sequence[int], bits: int) -> ComplexBall:
    with precision(bits):
        s = acb(0)
        for b, c in zip(balls, coeffs):
            if c:
                s += c * b
    return ComplexBall(s, bits)


def find_rational_relation(values: Sequence[Value], H: int, precision_bits: int = 256,
                           budget: EvalBudget = DEFAULT_BUDGET) -> IntegerRelation | None:
    """Smallest-height integer relation of height <= H passing the residual check.

    Among relations of equal height the lexicographically smallest (after
    sign normalization) wins, so the answer does not depend on lattice
    reduction details.
    """
    if H < 1:
        raise ValueError("height bound must be at least 1")
    if precision_bits < 64:
        raise ValueError("precision below floor: need at least 64 bits")
    n = len(values)
    if n == 0:
        raise ValueError("no values given")
    balls = [_ball(v, precision_bits, budget) for v in values]
    half = precision_bits // 2
    with precision(precision_bits):
        floor = arb(2) ** (-half)
        limit = arb(2) ** (-(precision_bits // 4))
        scale = arb(2) ** half
        rows = []
        for j, b in enumerate(balls):
            if not (b.real.is_finite() and b.imag.is_finite()):
                raise ValueError(f"value {j} did not evaluate to a finite ball")
            rad = ComplexBall(b, precision_bits).radius
            if not rad < floor:
                raise ValueError(
                    f"precision below floor: ball radius of value {j} is not < 2^-{half}")
            row = [0] * n + [int((b.real.mid() * scale).floor().unique_fmpz()),
                             int((b.imag.mid() * scale).floor().unique_fmpz())]
            row[j] = 1
            rows.append(row)
    reduced = flint.fmpz_mat(rows).lll()

    def passes(c) -> bool:
        r = relation_residual(balls, c, precision_bits)
        return r.is_finite() and r.abs_upper() <= limit

    relation_rows = []
    for i in range(reduced.nrows()):
        c = tuple(int(reduced[i, j]) for j in range(n))
        if any(c) and passes(c):
            relation_rows.append(c)
    if not relation_rows:
        return None

    pool = set()
    basis = relation_rows[:_COMBO_ROWS]
    span = range(-_COMBO_RANGE, _COMBO_RANGE + 1)
    for mult in itertools.product(span, repeat=len(basis)):
        c = tuple(sum(m * row[j] for m, row in zip(mult, basis)) for j in range(n))
        if any(c):
            pool.add(_canonical_sign(c))
    pool.update(_canonical_sign(c) for c in relation_rows)
    best = None
    for c in sorted(pool, key=lambda c: (max(map(abs, c)), c)):
        if max(map(abs, c)) > H:
            break
        if passes(c):
            best = c
            break
    if best is None:
        return None
    return IntegerRelation(best, CANDIDATE, H, precision_bits)


def combination(values: Sequence[Expr], coeffs: Sequence[int]) -> Expr:
    """The EL expression ``sum c_j v_j`` (zero terms dropped)."""
    out: Expr | None = None
    for v, c in zip(values, coeffs):
        if not c:
            continue
        term = v if abs(c) == 1 else Mul(Rat(abs(c)), v)
        if out is None:
            out = term if c > 0 else Neg(term)
        else:
            out = Add(out, term if c > 0 else Neg(term))
    return out if out is not None else Rat(0)


def verify_relation(values: Sequence[Value], rel: IntegerRelation,
                    budget: EvalBudget = DEFAULT_BUDGET) -> IntegerRelation:
    """Upgrade ``rel`` to VerifiedSymbolic if ``sum c_j v_j`` is provably 0."""
    if len(values) != len(rel.coefficients):
        raise ValueError("relation length does not match the values")
    net: dict[str, int] = {}
    el_values, el_coeffs = [], []
    for v, c in zip(values, rel.coefficients):
        if isinstance(v, OpaqueConstant):
            net[v.name] = net.get(v.name, 0) + c
        else:
            el_values.append(v)
            el_coeffs.append(c)
    left = sorted(name for name, c in net.items() if c)
    if left:
        return replace(rel, diagnostic="opaque constants do not cancel: " + ", ".join(left))
    verdict = is_zero(combination(el_values, el_coeffs), budget)
    if isinstance(verdict, Zero):
        steps = len(verdict.derivation)
        return replace(rel, status=VERIFIED, rejected=False,
                       diagnostic=f"combination rewrites to 0 in {steps} steps")
    if isinstance(verdict, Nonzero):
        return replace(rel, rejected=True,
                       diagnostic="rejected: the combination's ball excludes 0")
    return replace(rel, diagnostic=f"undecided: {verdict.reason}")
