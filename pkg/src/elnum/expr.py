"""EL expression trees.

Seven node kinds only: rational literals, ``Add``, ``Mul``, ``Neg``, ``Inv``,
``Exp`` and ``Log``.  Subtraction and division exist only in the surface
syntax; they canonicalize to ``Add``/``Neg`` and ``Mul``/``Inv``.

Nodes are immutable and hashable, so they can be shared freely and used as
dictionary keys.  Nothing is simplified on construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator, Union

__all__ = [
    "Expr", "Rat", "Add", "Mul", "Neg", "Inv", "Exp", "Log",
    "ExprMeta", "NODE_KINDS", "as_expr", "sub", "div", "meta", "walk",
    "builtin", "derived", "ZERO", "ONE",
]


class Expr:
    """Base class of every EL expression node."""

    __slots__ = ()

    def children(self) -> tuple["Expr", ...]:
        return ()

    def with_children(self, children: tuple["Expr", ...]) -> "Expr":
        return self

    # Operator sugar builds trees; it never simplifies.
    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Add(self, Neg(as_expr(other)))

    def __rsub__(self, other):
        return Add(as_expr(other), Neg(self))

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Mul(self, Inv(as_expr(other)))

    def __rtruediv__(self, other):
        return Mul(as_expr(other), Inv(self))

    def __neg__(self):
        return Neg(self)

    def __str__(self) -> str:
        from .syntax import render

        return render(self)


@dataclass(frozen=True, eq=True, repr=False)
class Rat(Expr):
    """Rational literal ``p/q`` kept in lowest terms with ``q > 0``."""

    p: int
    q: int = 1

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q == 0:
            raise ZeroDivisionError("rational literal with zero denominator")
        if q < 0:
            p, q = -p, -q
        g = gcd(p, q)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)

    @classmethod
    def of(cls, value) -> "Rat":
        v = Fraction(value)
        return cls(v.numerator, v.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __repr__(self):
        return f"Rat({self.p})" if self.q == 1 else f"Rat({self.p}, {self.q})"


class _Unary(Expr):
    __slots__ = ()
    child: Expr

    def children(self):
        return (self.child,)

    def with_children(self, children):
        (c,) = children
        return self if c is self.child else type(self)(c)

    def __repr__(self):
        return f"{type(self).__name__}({self.child!r})"


class _Binary(Expr):
    __slots__ = ()
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def with_children(self, children):
        a, b = children
        if a is self.left and b is self.right:
            return self
        return type(self)(a, b)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


def _cached_hash(cls):
    # Deep trees are hashed repeatedly (memo tables); compute once per node.
    plain = cls.__hash__

    def __hash__(self):
        try:
            return self._h
        except AttributeError:
            h = plain(self)
            object.__setattr__(self, "_h", h)
            return h

    cls.__hash__ = __hash__
    return cls


@_cached_hash
@dataclass(frozen=True, eq=True, repr=False)
class Add(_Binary):
    left: Expr
    right: Expr


@_cached_hash
@dataclass(frozen=True, eq=True, repr=False)
class Mul(_Binary):
    left: Expr
    right: Expr


@_cached_hash
@dataclass(frozen=True, eq=True, repr=False)
class Neg(_Unary):
    child: Expr


@_cached_hash
@dataclass(frozen=True, eq=True, repr=False)
class Inv(_Unary):
    child: Expr


@_cached_hash
@dataclass(frozen=True, eq=True, repr=False)
class Exp(_Unary):
    child: Expr


@_cached_hash
@dataclass(frozen=True, eq=True, repr=False)
class Log(_Unary):
    child: Expr


NODE_KINDS = (Rat, Add, Mul, Neg, Inv, Exp, Log)
ZERO = Rat(0)
ONE = Rat(1)

Operand = Union[Expr, int, Fraction]


def as_expr(value: Operand) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Rat.of(value)
    raise TypeError(f"cannot use {type(value).__name__} as an EL expression")


def sub(a: Operand, b: Operand) -> Expr:
    return Add(as_expr(a), Neg(as_expr(b)))


def div(a: Operand, b: Operand) -> Expr:
    return Mul(as_expr(a), Inv(as_expr(b)))


def walk(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal without recursion."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


@dataclass(frozen=True)
class ExprMeta:
    """Size data for an expression.

    ``depth`` is the nesting height (a literal has depth 0).  It bounds the
    number of construction stages above the literals that the tree uses.
    """

    depth: int
    node_count: int


def meta(expr: Expr) -> ExprMeta:
    depth: dict[int, int] = {}
    count = 0
    # Post-order over an explicit stack so very deep trees do not recurse.
    stack: list[tuple[Expr, bool]] = [(expr, False)]
    while stack:
        node, done = stack.pop()
        if done:
            kids = node.children()
            depth[id(node)] = 1 + max(depth[id(c)] for c in kids) if kids else 0
            count += 1
            continue
        stack.append((node, True))
        stack.extend((c, False) for c in node.children())
    return ExprMeta(depth=depth[id(expr)], node_count=count)


# -- constants and high-school functions ------------------------------------

_MINUS_ONE = Neg(ONE)


def _i() -> Expr:
    return Exp(Mul(Log(_MINUS_ONE), Inv(Rat(2))))


def builtin(name: str) -> Expr:
    """Return the exp/log formula for ``e``, ``i`` or ``pi``."""
    if name == "e":
        return Exp(Exp(ZERO))
    if name == "i":
        return _i()
    if name == "pi":
        return Mul(Neg(_i()), Log(_MINUS_ONE))
    raise ValueError(f"unknown builtin constant {name!r}")


_ARITY = {
    "rational_pow": 1, "nth_root_branch": 1, "sin": 1, "cos": 1, "tan": 1,
    "tanh": 1, "arccos": 1,
}


def derived(name: str, *args: Expr, power: Operand | None = None,
            n: int | None = None, k: int = 0) -> Expr:
    """Expand a derived function into core nodes.

    ``rational_pow`` takes ``power``; ``nth_root_branch`` takes ``n`` and the
    branch index ``k`` with ``0 <= k < n``.
    """
    if name not in _ARITY:
        raise ValueError(f"unknown derived function {name!r}")
    if len(args) != _ARITY[name]:
        raise TypeError(f"{name} takes {_ARITY[name]} argument(s), got {len(args)}")
    (x,) = (as_expr(a) for a in args)
    i = _i()
    if name == "rational_pow":
        if power is None:
            raise TypeError("rational_pow needs a rational power")
        r = power.value if isinstance(power, Rat) else Fraction(power)
        return Exp(Mul(Rat.of(r), Log(x)))
    if name == "nth_root_branch":
        if n is None or n < 1:
            raise ValueError("nth_root_branch needs n >= 1")
        if not 0 <= k < n:
            raise ValueError(f"branch index k={k} out of range for n={n}")
        inner: Expr = Log(x)
        if k:
            two_pi_i = Mul(Rat(2), Mul(builtin("pi"), i))
            inner = Add(inner, Mul(Rat(k), two_pi_i))
        return Exp(Mul(inner, Inv(Rat(n))))
    ix = Mul(i, x)
    if name == "sin":
        return Mul(Add(Exp(ix), Neg(Exp(Neg(ix)))), Inv(Mul(Rat(2), i)))
    if name == "cos":
        return Mul(Add(Exp(ix), Exp(Neg(ix))), Inv(Rat(2)))
    if name == "tan":
        return Mul(derived("sin", x), Inv(derived("cos", x)))
    if name == "tanh":
        return Mul(Add(Exp(x), Neg(Exp(Neg(x)))), Inv(Add(Exp(x), Exp(Neg(x)))))
    # arccos x = -i log(x + exp(log(x^2 - 1)/2))
    root = Exp(Mul(Log(Add(Mul(x, x), Neg(ONE))), Inv(Rat(2))))
    return Mul(Neg(i), Log(Add(x, root)))
