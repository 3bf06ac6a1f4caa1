"""Surface syntax for EL expressions.

Grammar, loosest binding first::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | primary
    primary := INT ['/' INT]                 -- rational literal
             | '(' '-' INT ['/' INT] ')'     -- negative rational literal
             | '(' expr ')'
             | NAME '(' expr (',' expr)* ')'
             | NAME                          -- e, i, pi

``^`` is rejected; write ``pow(x, p/q)`` instead.  Function names are
``exp``, ``log`` and ``inv`` (core) plus the derived ``sin``, ``cos``,
``tan``, ``tanh``, ``arccos``, ``root(x, n, k)`` and ``pow(x, p/q)``, which
expand at parse time.  ``render`` emits text that parses back to a
structurally identical tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expr import Add, Exp, Expr, Inv, Log, Mul, Neg, Rat, builtin, derived

__all__ = ["ParseError", "parse", "render"]


class ParseError(ValueError):
    """Malformed expression text; ``position`` is a character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.message = message
        self.position = position


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "name", "op" or "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = len(text) - len(text[pos:].lstrip())
            if rest == len(text):
                break
            raise ParseError(f"unexpected character {text[rest]!r}", rest)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


_CORE = {"exp": Exp, "log": Log, "inv": Inv}
_UNARY_DERIVED = {"sin", "cos", "tan", "tanh", "arccos"}


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind not in ("op",):
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.advance()

    def is_op(self, text: str, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind == "op" and t.text == text

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.is_op("+") or self.is_op("-"):
            op = self.advance().text
            right = self.term()
            left = Add(left, right) if op == "+" else Add(left, Neg(right))
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.is_op("*") or self.is_op("/"):
            op = self.advance().text
            right = self.unary()
            left = Mul(left, right) if op == "*" else Mul(left, Inv(right))
        return left

    def unary(self) -> Expr:
        if self.is_op("-"):
            self.advance()
            return Neg(self.unary())
        node = self.primary()
        if self.is_op("^"):
            raise ParseError("'^' is not supported; use pow(x, p/q)", self.tok.pos)
        return node

    def literal(self, sign: int) -> Rat:
        num = self.advance()
        den = 1
        if self.is_op("/") and self.peek().kind == "int":
            self.advance()
            den_tok = self.advance()
            den = int(den_tok.text)
            if den == 0:
                raise ParseError("rational literal with zero denominator", den_tok.pos)
        return Rat(sign * int(num.text), den)

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            return self.literal(1)
        if self.is_op("("):
            # "(-p)" and "(-p/q)" are negative literals, not negations.
            if self.is_op("-", 1) and self.peek(2).kind == "int":
                save = self.i
                self.advance()
                self.advance()
                lit = self.literal(-1)
                if self.is_op(")"):
                    self.advance()
                    return lit
                self.i = save
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if t.kind == "name":
            self.advance()
            if self.is_op("("):
                return self.call(t)
            if t.text in ("e", "i", "pi"):
                return builtin(t.text)
            raise ParseError(f"unknown name {t.text!r}", t.pos)
        found = t.text or "end of input"
        raise ParseError(f"unexpected {found!r}", t.pos)

    def call(self, name: _Tok) -> Expr:
        self.expect("(")
        args = [self.expr()]
        while self.is_op(","):
            self.advance()
            args.append(self.expr())
        self.expect(")")
        fn = name.text

        def arity(n):
            if len(args) != n:
                raise ParseError(f"{fn} takes {n} argument(s), got {len(args)}", name.pos)

        if fn in _CORE:
            arity(1)
            return _CORE[fn](args[0])
        if fn in _UNARY_DERIVED:
            arity(1)
            return derived(fn, args[0])
        if fn == "pow":
            arity(2)
            return derived("rational_pow", args[0], power=self.constant(args[1], name))
        if fn == "root":
            arity(3)
            n = self.constant(args[1], name)
            k = self.constant(args[2], name)
            if n.denominator != 1 or k.denominator != 1 or n < 1:
                raise ParseError("root(x, n, k) needs integers n >= 1 and k", name.pos)
            if not 0 <= k < n:
                raise ParseError(f"branch index {k} out of range for n={n}", name.pos)
            return derived("nth_root_branch", args[0], n=int(n), k=int(k))
        raise ParseError(f"unknown function {fn!r}", name.pos)

    @staticmethod
    def constant(node: Expr, name: _Tok):
        if isinstance(node, Rat):
            return node.value
        if isinstance(node, Neg) and isinstance(node.child, Rat):
            return -node.child.value
        raise ParseError(f"{name.text} needs a rational literal parameter", name.pos)


def parse(text: str) -> Expr:
    """Parse expression text into a core tree."""
    return _Parser(text).parse()


_SUM, _PROD, _UNARY, _ATOM = 1, 2, 3, 4


def _prec(node: Expr) -> int:
    if isinstance(node, Rat):
        return _PROD if node.q != 1 and node.p >= 0 else _ATOM
    if isinstance(node, Add):
        return _SUM
    if isinstance(node, Mul):
        return _PROD
    if isinstance(node, Neg):
        return _UNARY
    return _ATOM


def _wrap(node: Expr, min_prec: int) -> str:
    s = _raw(node)
    return f"({s})" if _prec(node) < min_prec else s


def _raw(node: Expr) -> str:
    if isinstance(node, Rat):
        body = str(abs(node.p)) if node.q == 1 else f"{abs(node.p)}/{node.q}"
        return f"(-{body})" if node.p < 0 else body
    if isinstance(node, Add):
        left = _wrap(node.left, _SUM)
        if isinstance(node.right, Neg):
            return f"{left} - {_wrap(node.right.child, _PROD)}"
        return f"{left} + {_wrap(node.right, _PROD)}"
    if isinstance(node, Mul):
        left = _wrap(node.left, _PROD)
        if isinstance(node.right, Inv):
            right = _wrap(node.right.child, _UNARY)
            # "2/3" would read back as a literal.
            if left[-1].isdigit() and right[0].isdigit():
                right = f"({right})"
            return f"{left}/{right}"
        return f"{left}*{_wrap(node.right, _UNARY)}"
    if isinstance(node, Neg):
        return "-" + _wrap(node.child, _UNARY)
    name = {Inv: "inv", Exp: "exp", Log: "log"}[type(node)]
    return f"{name}({_raw(node.child)})"


def render(expr: Expr) -> str:
    """Deterministic text for ``expr``; ``parse(render(e)) == e``."""
    return _raw(expr)
