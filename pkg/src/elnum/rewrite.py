"""Value-preserving rewrites under principal-branch semantics.

Two layers:

* local rules with names (``fold_rational``, ``exp_zero``, ``log_one``,
  ``exp_log``, ``log_exp``, ``log_power``, ``log_negative``), applied
  bottom-up and recorded as :class:`RewriteStep` entries;
* ``normalize``, a normal form that treats ``exp``/``log`` nodes as atoms of
  a Laurent polynomial ring with rational coefficients, merges
  ``exp(a)*exp(b)`` into ``exp(a+b)``, pulls integer multiples of logs out of
  exponentials and splits logs of positive rational factors.

A rule fires only when its side condition is certified, either from exact
rational structure or from a ball that settles it.  Nothing here guesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import chain
from math import ceil

import flint
from flint import arb

from .balls import precision
from .errors import ElError
from .evaluate import DEFAULT_BUDGET, EvalBudget, evaluate
from .expr import ONE, ZERO, Add, Exp, Expr, Inv, Log, Mul, Neg, Rat, builtin
from .syntax import render

__all__ = [
    "RewriteStep", "RULES", "exact_rewrites", "exact_rewrites_traced", "replay",
    "normalize", "split_re_im", "pi_multiple", "cut_side", "PI", "LOG_MINUS_ONE",
]

PI = builtin("pi")
LOG_MINUS_ONE = Log(Rat(-1))  # the canonical atom for pi*i
_MAX_TERMS = 400
_MAX_PULL = 8
_MAX_FACTOR_BITS = 256


# -- certification helpers ----------------------------------------------------

def _ball(expr: Expr, budget: EvalBudget, bits: int = 128):
    try:
        return evaluate(expr, bits, budget)
    except (ElError, ZeroDivisionError):
        return None


def certified_nonzero(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> bool:
    if isinstance(expr, Rat):
        return expr.p != 0
    for bits in (64, 256):
        b = _ball(expr, budget, bits)
        if b is not None and b.excludes_zero():
            return True
    return False


def _real_sign(expr: Expr, budget: EvalBudget) -> int | None:
    """Sign of the real part, when a ball settles it."""
    if isinstance(expr, Rat):
        return (expr.p > 0) - (expr.p < 0)
    for bits in (64, 256):
        b = _ball(expr, budget, bits)
        if b is None:
            return None
        if b.real > 0:
            return 1
        if b.real < 0:
            return -1
    return None


# -- exact real/imaginary decomposition ----------------------------------------

def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Rat) and isinstance(b, Rat):
        return Rat.of(a.value + b.value)
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return Add(a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Rat):
        return Rat.of(-a.value)
    if isinstance(a, Neg):
        return a.child
    return Neg(a)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Rat) and isinstance(b, Rat):
        return Rat.of(a.value * b.value)
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    if a == Rat(-1):
        return _neg(b)
    if b == Rat(-1):
        return _neg(a)
    return Mul(a, b)


def _inv(a: Expr) -> Expr:
    if isinstance(a, Rat):
        return Rat.of(1 / a.value)
    return Inv(a)


def _exp(a: Expr) -> Expr:
    return ONE if a == ZERO else Exp(a)


def _log(a: Expr) -> Expr:
    return ZERO if a == ONE else Log(a)


@lru_cache(maxsize=4096)
def split_re_im(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> tuple[Expr, Expr] | None:
    """Exact ``(re, im)`` expressions with real values, or None.

    Only structures whose real and imaginary parts are known exactly are
    decomposed: rationals, field operations, ``exp`` of arguments whose
    imaginary part is a half-integer multiple of pi, and ``log`` of
    arguments on the real or imaginary axis.
    """
    if isinstance(expr, Rat):
        return expr, ZERO
    if isinstance(expr, Neg):
        s = split_re_im(expr.child, budget)
        return None if s is None else (_neg(s[0]), _neg(s[1]))
    if isinstance(expr, Add):
        a = split_re_im(expr.left, budget)
        b = split_re_im(expr.right, budget)
        if a is None or b is None:
            return None
        return _add(a[0], b[0]), _add(a[1], b[1])
    if isinstance(expr, Mul):
        a = split_re_im(expr.left, budget)
        b = split_re_im(expr.right, budget)
        if a is None or b is None:
            return None
        (p, q), (r, s) = a, b
        return _add(_mul(p, r), _neg(_mul(q, s))), _add(_mul(p, s), _mul(q, r))
    if isinstance(expr, Inv):
        s = split_re_im(expr.child, budget)
        if s is None:
            return None
        a, b = s
        if b == ZERO:
            return _inv(a), ZERO
        if a == ZERO:
            return ZERO, _neg(_inv(b))
        norm = _inv(_add(_mul(a, a), _mul(b, b)))
        return _mul(a, norm), _neg(_mul(b, norm))
    if isinstance(expr, Exp):
        s = split_re_im(expr.child, budget)
        if s is None:
            return None
        a, b = s
        c = pi_multiple(b, budget)
        if c is None or (2 * c).denominator != 1:
            return None
        # cos and sin of c*pi for half-integer c
        quarter = int(2 * c) % 4
        cos, sin = [(1, 0), (0, 1), (-1, 0), (0, -1)][quarter]
        scale = _exp(a)
        return _mul(Rat(cos), scale), _mul(Rat(sin), scale)
    if isinstance(expr, Log):
        s = split_re_im(expr.child, budget)
        if s is None:
            return None
        a, b = s
        if _is_exact_zero(b, budget):
            sign = _real_sign(a, budget)
            if sign == 1:
                return _log(a), ZERO
            if sign == -1:
                return _log(_neg(a)), PI
            return None
        if _is_exact_zero(a, budget):
            sign = _real_sign(b, budget)
            if sign == 1:
                return _log(b), _mul(Rat(1, 2), PI)
            if sign == -1:
                return _log(_neg(b)), _mul(Rat(-1, 2), PI)
        return None
    raise TypeError(f"not an EL expression node: {expr!r}")


def _is_exact_zero(expr: Expr, budget: EvalBudget) -> bool:
    if isinstance(expr, Rat):
        return expr.p == 0
    return normalize(expr, budget) == ZERO


def pi_multiple(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> Fraction | None:
    """The rational ``c`` with ``expr == c*pi`` when the normal form shows it."""
    if isinstance(expr, Rat):
        return Fraction(0) if expr.p == 0 else None
    try:
        num, den = _Normalizer(budget).nf(expr)
        pnum, pden = _Normalizer(budget).nf(PI)
    except _Abort:
        return None
    if not num:
        return Fraction(0)
    if den != _ONE_POLY or pden != _ONE_POLY or len(num) != 1 or len(pnum) != 1:
        return None
    (m, c), = num.items()
    (pm, pc), = pnum.items()
    return c / pc if m == pm else None


def cut_side(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> int | None:
    """Sign of ``Im(expr)`` (0 when exactly real), decided exactly, or None."""
    from .zero import Nonzero, Zero, is_zero

    s = split_re_im(expr, budget)
    if s is None:
        return None
    im = s[1]
    if isinstance(im, Rat):
        return (im.p > 0) - (im.p < 0)
    verdict = is_zero(im, budget)
    if isinstance(verdict, Zero):
        return 0
    if isinstance(verdict, Nonzero):
        re = verdict.certificate.real
        if re > 0:
            return 1
        if re < 0:
            return -1
    return None


def _log_exp_shift(arg: Expr, budget: EvalBudget) -> int | None:
    """The integer k with ``log(exp(arg)) == arg - 2*pi*i*k``, if certified."""
    s = split_re_im(arg, budget)
    if s is not None:
        c = pi_multiple(s[1], budget)
        if c is not None:
            return ceil((c - 1) / 2)
    for bits in (64, 256):
        b = _ball(arg, budget, bits)
        if b is None or not b.is_finite():
            return None
        with precision(bits):
            t = b.imag / arb.pi()
            mid = float(t.mid())
            k = int((mid + 1) // 2)
            if t > 2 * k - 1 and t < 2 * k + 1:
                return k
    return None


# -- normal form ----------------------------------------------------------------

class _Abort(Exception):
    """The normal form cannot be computed (too large or undefined)."""


@lru_cache(maxsize=65536)
def _key(e: Expr) -> str:
    return render(e)


_ONE_POLY = {(): Fraction(1)}


def _mono_key(m):
    return (len(m), tuple((_key(a), e) for a, e in m))


class _Normalizer:
    def __init__(self, budget: EvalBudget):
        self.budget = budget
        self.memo: dict[Expr, tuple[dict, dict]] = {}

    # Polynomials are dicts {monomial: Fraction}; a monomial is a sorted tuple
    # of (atom, exponent).  Only non-Exp atoms carry negative exponents, and a
    # monomial holds at most one Exp atom, always with exponent 1.

    def nf(self, e: Expr):
        try:
            return self.memo[e]
        except KeyError:
            pass
        r = self._nf(e)
        self.memo[e] = r
        return r

    def _nf(self, e: Expr):
        if isinstance(e, Rat):
            return ({(): e.value} if e.p else {}), _ONE_POLY
        if isinstance(e, Add):
            n1, d1 = self.nf(e.left)
            n2, d2 = self.nf(e.right)
            if d1 == d2:
                return self.canon(self.padd(n1, n2), d1)
            return self.canon(self.padd(self.pmul(n1, d2), self.pmul(n2, d1)), self.pmul(d1, d2))
        if isinstance(e, Neg):
            n, d = self.nf(e.child)
            return {m: -c for m, c in n.items()}, d
        if isinstance(e, Mul):
            n1, d1 = self.nf(e.left)
            n2, d2 = self.nf(e.right)
            return self.canon(self.pmul(n1, n2), self.pmul(d1, d2))
        if isinstance(e, Inv):
            n, d = self.nf(e.child)
            if not n:
                raise _Abort("inverse of zero")
            return self.canon(d, n)
        if isinstance(e, Exp):
            return self.exp_of(self.nf(e.child)), _ONE_POLY
        if isinstance(e, Log):
            return self.log_of(e.child), _ONE_POLY
        raise TypeError(f"not an EL expression node: {e!r}")

    # polynomial arithmetic

    @staticmethod
    def padd(p, q):
        out = dict(p)
        for m, c in q.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return out

    def pmul(self, p, q):
        if p == _ONE_POLY:
            return q
        if q == _ONE_POLY:
            return p
        if len(p) * len(q) > _MAX_TERMS:
            raise _Abort("product too large")
        out: dict = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                for m, c in self.mono_mul(m1, m2).items():
                    v = out.get(m, 0) + c * c1 * c2
                    if v:
                        out[m] = v
                    else:
                        out.pop(m, None)
        if len(out) > _MAX_TERMS:
            raise _Abort("polynomial too large")
        return out

    def mono_mul(self, m1, m2):
        powers: dict[Expr, int] = {}
        exps: list[tuple[Expr, int]] = []
        for atom, k in chain(m1, m2):
            if isinstance(atom, Exp):
                exps.append((atom, k))
            else:
                v = powers.get(atom, 0) + k
                if v:
                    powers[atom] = v
                else:
                    powers.pop(atom)
        base = tuple(sorted(powers.items(), key=lambda t: _key(t[0])))
        if not exps:
            return {base: Fraction(1)}
        if len(exps) == 1 and exps[0][1] == 1:
            mono = tuple(sorted(base + tuple(exps), key=lambda t: _key(t[0])))
            return {mono: Fraction(1)}
        arg = ({}, _ONE_POLY)
        for atom, k in exps:
            n, d = self.nf(atom.child)
            n = {m: c * k for m, c in n.items()}
            arg = self.rf_add(arg, (n, d))
        return self.pmul({base: Fraction(1)}, self.exp_of(arg))

    def rf_add(self, a, b):
        (n1, d1), (n2, d2) = a, b
        if d1 == d2:
            return self.canon(self.padd(n1, n2), d1)
        return self.canon(self.padd(self.pmul(n1, d2), self.pmul(n2, d1)), self.pmul(d1, d2))

    def canon(self, n, d):
        if not n:
            return {}, _ONE_POLY
        if d == _ONE_POLY:
            return n, d
        if len(d) == 1:
            (m, c), = d.items()
            inv = tuple((a, -k) for a, k in m)
            factor = self.mono_mul(inv, ()) if inv else {(): Fraction(1)}
            factor = {mm: cc / c for mm, cc in factor.items()}
            return self.pmul(n, factor), _ONE_POLY
        return n, d

    def rf_pow(self, rf, k: int):
        n, d = rf
        if k < 0:
            if not n:
                raise _Abort("negative power of zero")
            n, d, k = d, n, -k
        rn, rd = _ONE_POLY, _ONE_POLY
        for _ in range(k):
            rn, rd = self.pmul(rn, n), self.pmul(rd, d)
        return self.canon(rn, rd)

    # transcendental atoms

    def exp_of(self, rf):
        n, d = rf
        if not n:
            return dict(_ONE_POLY)
        pulled = _ONE_POLY
        if d == _ONE_POLY:
            rest = dict(n)
            for mono, c in n.items():
                if not (len(mono) == 1 and mono[0][1] == 1 and isinstance(mono[0][0], Log)):
                    continue
                if c.denominator != 1 or abs(c) > _MAX_PULL:
                    continue
                y = mono[0][0].child
                if not certified_nonzero(y, self.budget):
                    continue
                pn, pd = self.rf_pow(self.nf(y), int(c))
                if pd != _ONE_POLY:
                    continue
                pulled = self.pmul(pulled, pn)
                del rest[mono]
            n = rest
        if not n:
            return pulled
        atom = Exp(self.build(n, d))
        return self.pmul(pulled, {((atom, 1),): Fraction(1)})

    def log_rational(self, r: Fraction):
        if r == 1:
            return {}
        if r < 0:
            return self.padd(self.log_rational(-r), {((LOG_MINUS_ONE, 1),): Fraction(1)})
        if max(r.numerator.bit_length(), r.denominator.bit_length()) > _MAX_FACTOR_BITS:
            return {((Log(Rat.of(r)), 1),): Fraction(1)}
        out: dict = {}
        for value, sign in ((r.numerator, 1), (r.denominator, -1)):
            if value == 1:
                continue
            for p, e in flint.fmpz(value).factor():
                out = self.padd(out, {((Log(Rat(int(p))), 1),): Fraction(sign * int(e))})
        return out

    def log_of(self, x: Expr):
        n, d = self.nf(x)
        if not n:
            raise _Abort("log of zero")
        if d == _ONE_POLY and len(n) == 1:
            (m, c), = n.items()
            if not m:
                return self.log_rational(c)
            # log(c*M) = log|c| + log(+-M) since |c| is a positive real
            unit = 1 if c > 0 else -1
            out = self.log_rational(abs(c))
            if len(m) == 1 and m[0][1] == 1 and isinstance(m[0][0], Exp):
                # -exp(a) is exp(a + pi*i)
                arg = m[0][0].child if unit == 1 else Add(m[0][0].child, LOG_MINUS_ONE)
                k = _log_exp_shift(arg, self.budget)
                if k is not None:
                    an, ad = self.nf(arg)
                    shift = {((LOG_MINUS_ONE, 1),): Fraction(-2 * k)} if k else {}
                    an, ad = self.rf_add((an, ad), (shift, _ONE_POLY))
                    if ad == _ONE_POLY:
                        return self.padd(out, an)
            atom = Log(self.build({m: Fraction(unit)}, _ONE_POLY))
            return self.padd(out, {((atom, 1),): Fraction(1)})
        return {((Log(self.build(n, d)), 1),): Fraction(1)}

    # rebuilding

    def build(self, n, d=_ONE_POLY) -> Expr:
        num = _build_poly(n)
        return num if d == _ONE_POLY else Mul(num, Inv(_build_poly(d)))


def _build_mono(m) -> Expr | None:
    factors = []
    for atom, k in m:
        factors.extend([atom if k > 0 else Inv(atom)] * abs(k))
    if not factors:
        return None
    out = factors[0]
    for f in factors[1:]:
        out = Mul(out, f)
    return out


def _build_poly(p) -> Expr:
    if not p:
        return ZERO
    out: Expr | None = None
    for m in sorted(p, key=_mono_key):
        c = p[m]
        body = _build_mono(m)
        mag = abs(c)
        if body is None:
            term = Rat.of(mag)
        elif mag == 1:
            term = body
        else:
            term = Mul(Rat.of(mag), body)
        if out is None:
            out = term if c > 0 else Neg(term)
        else:
            out = Add(out, term) if c > 0 else Add(out, Neg(term))
    return out


@lru_cache(maxsize=4096)
def normalize(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> Expr:
    """Canonical value-equal form, or ``expr`` unchanged if none is reachable."""
    try:
        norm = _Normalizer(budget)
        return norm.build(*norm.nf(expr))
    except _Abort:
        return expr


# -- local rules ------------------------------------------------------------------

def fold_rational(node: Expr, budget: EvalBudget) -> Expr | None:
    if isinstance(node, (Add, Mul)) and isinstance(node.left, Rat) and isinstance(node.right, Rat):
        a, b = node.left.value, node.right.value
        return Rat.of(a + b if isinstance(node, Add) else a * b)
    if isinstance(node, Neg) and isinstance(node.child, Rat):
        return Rat.of(-node.child.value)
    if isinstance(node, Inv) and isinstance(node.child, Rat) and node.child.p != 0:
        return Rat.of(1 / node.child.value)
    return None


def exp_zero(node: Expr, budget: EvalBudget) -> Expr | None:
    return ONE if isinstance(node, Exp) and node.child == ZERO else None


def log_one(node: Expr, budget: EvalBudget) -> Expr | None:
    return ZERO if isinstance(node, Log) and node.child == ONE else None


def exp_log(node: Expr, budget: EvalBudget) -> Expr | None:
    if isinstance(node, Exp) and isinstance(node.child, Log):
        x = node.child.child
        if certified_nonzero(x, budget):
            return x
    return None


def log_exp(node: Expr, budget: EvalBudget) -> Expr | None:
    if isinstance(node, Log) and isinstance(node.child, Exp):
        x = node.child.child
        k = _log_exp_shift(x, budget)
        if k is None:
            return None
        if k == 0:
            return x
        return Add(x, Neg(Mul(Rat(2 * k), LOG_MINUS_ONE)))
    return None


def log_power(node: Expr, budget: EvalBudget) -> Expr | None:
    """log(p1^e1 ... pk^ek) -> e1 log p1 + ... for a positive rational."""
    if not (isinstance(node, Log) and isinstance(node.child, Rat)):
        return None
    r = node.child.value
    if r <= 0 or r == 1:
        return None
    if max(r.numerator.bit_length(), r.denominator.bit_length()) > _MAX_FACTOR_BITS:
        return None
    terms = []
    for value, sign in ((r.numerator, 1), (r.denominator, -1)):
        if value != 1:
            terms.extend((int(p), sign * int(e)) for p, e in flint.fmpz(value).factor())
    if len(terms) == 1 and terms[0][1] == 1:
        return None  # already log of a prime
    out: Expr | None = None
    for p, e in terms:
        t: Expr = Log(Rat(p)) if abs(e) == 1 else Mul(Rat(abs(e)), Log(Rat(p)))
        if out is None:
            out = t if e > 0 else Neg(t)
        else:
            out = Add(out, t) if e > 0 else Add(out, Neg(t))
    return out


def log_negative(node: Expr, budget: EvalBudget) -> Expr | None:
    """log(r) -> log|r| + log(-1) for a negative rational r != -1."""
    if isinstance(node, Log) and isinstance(node.child, Rat) and node.child.p < 0:
        r = node.child.value
        if r != -1:
            return Add(Log(Rat.of(-r)), LOG_MINUS_ONE)
    return None


def normalize_rule(node: Expr, budget: EvalBudget) -> Expr | None:
    out = normalize(node, budget)
    return None if out == node else out


LOCAL_RULES = (fold_rational, exp_zero, log_one, exp_log, log_exp, log_power, log_negative)
RULES = {f.__name__: f for f in LOCAL_RULES} | {"normalize": normalize_rule}


@dataclass(frozen=True)
class RewriteStep:
    """``rule`` turned the subtree at ``path`` (child indices) from ``before`` into ``after``."""

    rule: str
    path: tuple[int, ...]
    before: Expr
    after: Expr

    def to_dict(self) -> dict:
        return {"rule": self.rule, "path": list(self.path),
                "before": render(self.before), "after": render(self.after)}


def _get(expr: Expr, path: tuple[int, ...]) -> Expr:
    for i in path:
        expr = expr.children()[i]
    return expr


def _put(expr: Expr, path: tuple[int, ...], new: Expr) -> Expr:
    if not path:
        return new
    kids = list(expr.children())
    kids[path[0]] = _put(kids[path[0]], path[1:], new)
    return expr.with_children(tuple(kids))


class _Budgeted(Exception):
    pass


def _local_pass(node: Expr, path: tuple[int, ...], steps: list, budget: EvalBudget,
                max_steps: int) -> Expr:
    kids = node.children()
    if kids:
        node = node.with_children(tuple(_local_pass(c, path + (i,), steps, budget, max_steps)
                                        for i, c in enumerate(kids)))
    while True:
        for rule in LOCAL_RULES:
            out = rule(node, budget)
            if out is not None and out != node:
                if len(steps) >= max_steps:
                    raise _Budgeted
                steps.append(RewriteStep(rule.__name__, path, node, out))
                node = out
                break
        else:
            return node
        kids = node.children()
        if kids:
            node = node.with_children(tuple(_local_pass(c, path + (i,), steps, budget, max_steps)
                                            for i, c in enumerate(kids)))


def exact_rewrites_traced(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET,
                          max_steps: int = 256) -> tuple[Expr, list[RewriteStep]]:
    """Rewrite ``expr`` and return the result with the steps taken."""
    steps: list[RewriteStep] = []
    cur = expr
    try:
        cur = _local_pass(cur, (), steps, budget, max_steps)
        if not isinstance(cur, Rat):
            out = normalize_rule(cur, budget)
            if out is not None:
                steps.append(RewriteStep("normalize", (), cur, out))
                cur = _local_pass(out, (), steps, budget, max_steps)
    except _Budgeted:
        cur = replay(expr, steps, budget, check=False)
    return cur, steps


def exact_rewrites(expr: Expr, budget: EvalBudget = DEFAULT_BUDGET) -> Expr:
    """Value-equal simplification of ``expr`` (principal branch throughout)."""
    return exact_rewrites_traced(expr, budget)[0]


def replay(expr: Expr, steps, budget: EvalBudget = DEFAULT_BUDGET, check: bool = True) -> Expr:
    """Apply recorded steps to ``expr``.

    With ``check`` each rule is re-run on the recorded subtree and must
    reproduce the recorded result.
    """
    cur = expr
    for step in steps:
        sub = _get(cur, step.path)
        if sub != step.before:
            raise ValueError(f"step {step.rule} at {step.path} does not match the expression")
        if check:
            again = RULES[step.rule](sub, budget)
            if again != step.after:
                raise ValueError(f"rule {step.rule} does not reproduce its recorded result")
        cur = _put(cur, step.path, step.after)
    return cur
