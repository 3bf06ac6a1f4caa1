"""Seeded random towers for the Division Lemma checks."""

import random

from elnum import Add, Exp, Log, Mul, Rat, build_tower
from elnum.fieldelem import X, Y
from elnum.tower import EXP_IN_BASE, POWER_IN_BASE, Tower


def random_expr(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.25:
        return Rat(rng.randint(2, 9), rng.randint(1, 3))
    kind = rng.choice(["exp", "log", "add", "mul"])
    a = random_expr(rng, depth - 1)
    if kind == "exp":
        return Exp(Mul(Rat(1, rng.randint(2, 4)), a))
    if kind == "log":
        return Log(Add(Rat(rng.randint(1, 3)), Exp(a)) if rng.random() < 0.5 else a)
    b = random_expr(rng, depth - 1)
    return Add(a, b) if kind == "add" else Mul(a, b)


def random_towers(count: int, seed: int = 2024, max_len: int = 3):
    """``count`` (tower, q) pairs with 1 <= len(tower) <= max_len."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        t = build_tower(random_expr(rng, 3))
        if 1 <= len(t) <= max_len:
            q = [rng.randint(1, 5) for _ in range(len(t))]
            out.append((t, q))
    return out


def old_witness_residuals(t: Tower, q):
    """Each original witness identity, rewritten over the divided tower's
    generators, as a field element that should vanish there."""
    images = {}
    for j, qj in enumerate(q, start=1):
        images[("X", j)] = qj * X(j)
        images[("Y", j)] = Y(j) ** qj
    out = []
    for i, e in enumerate(t.entries, start=1):
        if e.witness_kind == POWER_IN_BASE:
            lhs = (q[i - 1] * X(i)) ** e.m
        else:
            lhs = Y(i) ** (q[i - 1] * e.m)
        assert e.witness_kind in (POWER_IN_BASE, EXP_IN_BASE)
        out.append(lhs - e.witness.substitute(images))
    return out
