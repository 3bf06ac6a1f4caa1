"""Formal rational functions over tower generators.

A :class:`FieldElement` is ``num/den`` where both are sparse polynomials with
rational coefficients in the symbols ``X1..Xn`` (standing for the tower
entries) and ``Y1..Yn`` (standing for their exponentials).  Nothing here
knows the values of the symbols; evaluation takes them as balls.

No gcd normal form is kept.  The only normalization is monomial: common
monomial factors of numerator and denominator are cancelled, negative
exponents are cleared, and a constant denominator is folded into the
numerator.  That is enough for substitution to stay small when the images
are monomials or linear forms, which is all the lemmas need.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from flint import acb

from .expr import ONE, Add, Exp, Expr, Inv, Mul, Neg, Rat

__all__ = ["FieldElement", "Var", "X", "Y"]

Var = tuple[str, int]  # ("X", j) or ("Y", j), j >= 1
Mono = tuple[tuple[Var, int], ...]
Poly = dict[Mono, Fraction]


def X(j: int) -> "FieldElement":
    return FieldElement.var(("X", j))


def Y(j: int) -> "FieldElement":
    return FieldElement.var(("Y", j))


def _var_key(v: Var):
    return (v[1], v[0])


def _mono(items: Mapping[Var, int]) -> Mono:
    return tuple(sorted(((v, e) for v, e in items.items() if e), key=lambda t: _var_key(t[0])))


def _mono_mul(a: Mono, b: Mono) -> Mono:
    out = dict(a)
    for v, e in b:
        out[v] = out.get(v, 0) + e
    return _mono(out)


def _padd(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _pscale(p: Poly, c: Fraction, mono: Mono = ()) -> Poly:
    return {_mono_mul(m, mono): v * c for m, v in p.items()} if c else {}


_ONE: Poly = {(): Fraction(1)}


class FieldElement:
    """An element ``num/den`` of Q(X1, Y1, ..., Xn, Yn)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly = _ONE):
        if not den:
            raise ZeroDivisionError("denominator is the zero polynomial")
        self.num, self.den = self._normalize(dict(num), dict(den))
        self._hash = None

    @staticmethod
    def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
        if not num:
            return {}, dict(_ONE)
        # cancel the common monomial content and clear negative exponents
        monos = [dict(m) for p in (num, den) for m in p]
        names = {v for m in monos for v in m}
        shift = _mono({v: -min(m.get(v, 0) for m in monos) for v in names})
        if shift:
            num = _pscale(num, Fraction(1), shift)
            den = _pscale(den, Fraction(1), shift)
        if len(den) == 1 and () in den:
            c = den[()]
            num = {m: v / c for m, v in num.items()}
            den = dict(_ONE)
        else:
            # make the leading denominator coefficient 1
            lead = den[min(den, key=_mono_order)]
            if lead != 1:
                num = {m: v / lead for m, v in num.items()}
                den = {m: v / lead for m, v in den.items()}
        return num, den

    # construction

    @classmethod
    def const(cls, c) -> "FieldElement":
        c = Fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def var(cls, v: Var) -> "FieldElement":
        if v[0] not in ("X", "Y") or v[1] < 1:
            raise ValueError(f"bad variable {v!r}")
        return cls({((v, 1),): Fraction(1)})

    # queries

    def is_zero(self) -> bool:
        return not self.num

    def constant(self) -> Fraction | None:
        """The rational value if this element has no symbols."""
        if not self.num:
            return Fraction(0)
        if self.den == _ONE and len(self.num) == 1 and () in self.num:
            return self.num[()]
        return None

    def variables(self) -> set[Var]:
        return {v for p in (self.num, self.den) for m in p for v, _ in m}

    def max_index(self) -> int:
        return max((j for _, j in self.variables()), default=0)

    def __eq__(self, other) -> bool:
        """Representation equality (not equality of field elements)."""
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    # arithmetic

    @staticmethod
    def _lift(x) -> "FieldElement":
        return x if isinstance(x, FieldElement) else FieldElement.const(x)

    def __add__(self, other) -> "FieldElement":
        o = self._lift(other)
        if self.den == o.den:
            return FieldElement(_padd(self.num, o.num), self.den)
        if len(self.den) == 1 and len(o.den) == 1:
            # monomial denominators: use their lcm
            (m1, c1), = self.den.items()
            (m2, c2), = o.den.items()
            e1, e2 = dict(m1), dict(m2)
            lcm = _mono({v: max(e1.get(v, 0), e2.get(v, 0)) for v in set(e1) | set(e2)})
            f1 = _mono({v: e - e1.get(v, 0) for v, e in lcm})
            f2 = _mono({v: e - e2.get(v, 0) for v, e in lcm})
            num = _padd(_pscale(self.num, 1 / c1, f1), _pscale(o.num, 1 / c2, f2))
            return FieldElement(num, {lcm: Fraction(1)})
        return FieldElement(_padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
                            _pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement({m: -c for m, c in self.num.items()}, self.den)

    def __sub__(self, other) -> "FieldElement":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "FieldElement":
        return self._lift(other) - self

    def __mul__(self, other) -> "FieldElement":
        o = self._lift(other)
        return FieldElement(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if not self.num:
            raise ZeroDivisionError("inverse of the zero element")
        return FieldElement(self.den, self.num)

    def __truediv__(self, other) -> "FieldElement":
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other) -> "FieldElement":
        return self._lift(other) * self.inverse()

    def __pow__(self, k: int) -> "FieldElement":
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        out = FieldElement.const(1)
        for _ in range(abs(k)):
            out = out * base
        return out

    # substitution and evaluation

    def substitute(self, images: Mapping[Var, "FieldElement"]) -> "FieldElement":
        """Apply the homomorphism sending each listed symbol to its image."""
        return _subst_poly(self.num, images) / _subst_poly(self.den, images)

    def evaluate(self, values: Mapping[Var, acb]) -> acb:
        """Ball value; the denominator ball must exclude 0 (checked)."""
        d = _eval_poly(self.den, values)
        if d.real.contains(0) and d.imag.contains(0):
            raise ZeroDivisionError("denominator ball contains 0")
        return _eval_poly(self.num, values) / d

    def to_expr(self, alphas: Mapping[int, Expr]) -> Expr:
        """An EL expression for this element, with ``Xj -> alphas[j]``."""
        num = _poly_expr(self.num, alphas)
        if self.den == _ONE:
            return num
        return Mul(num, Inv(_poly_expr(self.den, alphas)))

    def to_text(self) -> str:
        num = _poly_text(self.num)
        if self.den == _ONE:
            return num
        den = _poly_text(self.den)
        if len(self.num) > 1:
            num = f"({num})"
        if len(self.den) > 1 or any(c != 1 for c in self.den.values()) or any(
                len(m) > 1 or m[0][1] > 1 for m in self.den):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"FieldElement({self.to_text()!r})"

    __str__ = to_text


def _mono_order(m: Mono):
    return (sum(abs(e) for _, e in m), tuple((_var_key(v), e) for v, e in m))


def _subst_poly(p: Poly, images: Mapping[Var, FieldElement]) -> FieldElement:
    out = FieldElement.const(0)
    for m in sorted(p, key=_mono_order):
        term = FieldElement.const(p[m])
        for v, e in m:
            img = images.get(v)
            term = term * (img ** e if img is not None else FieldElement({((v, e),): Fraction(1)}))
        out = out + term
    return out


def _eval_poly(p: Poly, values: Mapping[Var, acb]) -> acb:
    total = acb(0)
    for m, c in p.items():
        term = acb(c.numerator) / c.denominator
        for v, e in m:
            x = values[v]
            term = term * (x ** e if e > 0 else 1 / x ** (-e))
        total += term
    return total


def _var_expr(v: Var, alphas: Mapping[int, Expr]) -> Expr:
    a = alphas[v[1]]
    return a if v[0] == "X" else Exp(a)


def _poly_expr(p: Poly, alphas: Mapping[int, Expr]) -> Expr:
    if not p:
        return Rat(0)
    out: Expr | None = None
    for m in sorted(p, key=_mono_order):
        c = p[m]
        factors: list[Expr] = []
        for v, e in m:
            base = _var_expr(v, alphas)
            factors.extend([base if e > 0 else Inv(base)] * abs(e))
        body: Expr | None = None
        for f in factors:
            body = f if body is None else Mul(body, f)
        mag = abs(c)
        if body is None:
            term: Expr = Rat.of(mag)
        elif mag == 1:
            term = body
        else:
            term = Mul(Rat.of(mag), body)
        if out is None:
            out = term if c > 0 else Neg(term)
        else:
            out = Add(out, term if c > 0 else Neg(term))
    return out if out is not None else ONE


def _coef_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_text(p: Poly) -> str:
    if not p:
        return "0"
    parts: list[str] = []
    for m in sorted(p, key=_mono_order):
        c = p[m]
        body = "*".join(f"{v[0]}{v[1]}" + (f"^{e}" if e != 1 else "") for v, e in m)
        mag = abs(c)
        if not body:
            text = _coef_text(mag)
        elif mag == 1:
            text = body
        elif mag.denominator != 1 and mag.numerator == 1:
            text = f"{body}/{mag.denominator}"
        else:
            text = f"{_coef_text(mag)}*{body}"
        if not parts:
            parts.append(text if c > 0 else f"-{text}")
        else:
            parts.append(("+ " if c > 0 else "- ") + text)
    return " ".join(parts)
