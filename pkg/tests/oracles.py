"""Independent reference computations for the tests.

Nothing here touches FLINT: constants come from integer series, expression
values from mpmath (whose ``log`` is the principal branch), and the small
relation and enumeration oracles are brute force.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import mpmath

from elnum.expr import Add, Exp, Inv, Log, Mul, Neg, Rat


def e_digits(n: int) -> str:
    """``e`` to ``n`` decimals from sum 1/k!, in integer arithmetic."""
    scale = 10 ** (n + 10)
    total, term, k = 0, scale, 0
    while term:
        total += term
        k += 1
        term //= k
    s = str(total)
    return s[0] + "." + s[1:n + 1]


def _arctan_inv(x: int, scale: int) -> int:
    total, power, k, sign = 0, scale // x, 1, 1
    while power:
        total += sign * (power // k)
        power //= x * x
        k += 2
        sign = -sign
    return total


def pi_digits(n: int) -> str:
    """``pi`` to ``n`` decimals from Machin's formula."""
    scale = 10 ** (n + 10)
    pi = 4 * (4 * _arctan_inv(5, scale) - _arctan_inv(239, scale))
    s = str(pi)
    return s[0] + "." + s[1:n + 1]


def mp_value(expr, dps: int = 60):
    """Value of an EL tree with mpmath (principal branch log)."""
    with mpmath.workdps(dps):
        memo = {}

        def ev(e):
            if e in memo:
                return memo[e]
            if isinstance(e, Rat):
                v = mpmath.mpf(e.p) / e.q
            elif isinstance(e, Add):
                v = ev(e.left) + ev(e.right)
            elif isinstance(e, Mul):
                v = ev(e.left) * ev(e.right)
            elif isinstance(e, Neg):
                v = -ev(e.child)
            elif isinstance(e, Inv):
                v = 1 / ev(e.child)
            elif isinstance(e, Exp):
                v = mpmath.exp(ev(e.child))
            elif isinstance(e, Log):
                c = ev(e.child)
                # exact negative reals must land on +pi
                if mpmath.im(c) == 0 and mpmath.re(c) < 0:
                    v = mpmath.mpc(mpmath.log(-mpmath.re(c)), mpmath.pi)
                else:
                    v = mpmath.log(c)
            else:
                raise TypeError(e)
            memo[e] = v
            return v

        return mpmath.mpc(ev(expr))


def mp_close(a, b, tol) -> bool:
    return abs(mpmath.mpc(a) - mpmath.mpc(b)) <= tol


def brute_relation(values, H: int, dps: int = 60, tol=mpmath.mpf(10) ** -40):
    """Smallest-height relation by exhaustive search, same tie-break rules.

    ``values`` are mpmath numbers.  Vectors are normalized to be primitive
    with the last nonzero entry positive, then ordered by (height, tuple).
    """
    n = len(values)
    with mpmath.workdps(dps):
        for h in range(1, H + 1):
            hits = []
            for c in itertools.product(range(-h, h + 1), repeat=n):
                if max(map(abs, c)) != h:
                    continue
                last = next((x for x in reversed(c) if x), 0)
                if last <= 0:
                    continue
                from math import gcd
                g = 0
                for x in c:
                    g = gcd(g, x)
                if g != 1:
                    continue
                s = sum(ci * v for ci, v in zip(c, values))
                if abs(s) < tol:
                    hits.append(c)
            if hits:
                return min(hits)
    return None


def brute_levels(n_max: int, dps: int = 50):
    """Numeric level sets: lists of mpmath values, deduplicated at 1e-35."""
    tol = mpmath.mpf(10) ** -35
    with mpmath.workdps(dps):
        levels = [[mpmath.mpc(0)]]
        for _ in range(n_max):
            prev = levels[-1]
            cur = list(prev)

            def add(v):
                if all(abs(v - w) > tol for w in cur):
                    cur.append(v)

            for a in prev:
                add(mpmath.exp(a))
                if abs(a) > tol:
                    if mpmath.im(a) == 0 and mpmath.re(a) < 0:
                        add(mpmath.mpc(mpmath.log(-mpmath.re(a)), mpmath.pi))
                    else:
                        add(mpmath.log(a))
            for a in prev:
                for b in prev:
                    add(a + b)
                    add(a - b)
                    add(a * b)
                    if abs(b) > tol:
                        add(a / b)
            levels.append(cur)
    return levels


def as_fraction(x) -> Fraction:
    return Fraction(x)


def ball_close(ball, ref, tol) -> bool:
    """True if ``ref`` (a decimal string or mpmath number) lies within
    ``tol`` plus the ball radius of the ball's midpoint."""
    d = ball.to_dict()
    with mpmath.workdps(120):
        mid = mpmath.mpc(mpmath.mpf(d["mid_re"]), mpmath.mpf(d["mid_im"]))
        r = mpmath.mpc(ref) if not isinstance(ref, str) else mpmath.mpf(ref)
        return abs(mid - r) <= mpmath.mpf(d["radius"]) + mpmath.mpf(tol)


_BASE = ("1", "log(2)", "log(3)", "log(5)", "log(7)", "pi", "e", "pi*pi", "log(2)*log(3)")


def relation_instances(count: int, seed: int = 11):
    """Seeded small instances: 2 or 3 values, about half with a planted
    relation of small height."""
    import random

    from elnum.syntax import parse

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.choice([2, 3])
        picks = [parse(t) for t in rng.sample(_BASE, n)]
        if rng.random() < 0.6:
            k = rng.randrange(n)
            others = [p for j, p in enumerate(picks) if j != k][: n - 1]
            combo = None
            for p in others:
                r = Rat(rng.choice([-2, -1, 1, 2]), rng.choice([1, 2]))
                term = Mul(r, p)
                combo = term if combo is None else Add(combo, term)
            picks[k] = combo
        out.append(picks)
    return out
