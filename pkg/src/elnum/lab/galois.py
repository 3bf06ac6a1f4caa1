"""Certifying that a quintic has Galois group S5 from cycle types mod p.

By Dedekind's theorem, if ``f`` is squarefree mod an unramified prime ``p``
the degrees of its irreducible factors mod ``p`` are the cycle type of some
element of the Galois group.  For an irreducible quintic the group is
transitive on 5 roots; a 5-cycle plus a transposition then generate S5.
A transposition is seen directly as type (1,1,1,2), or as the cube of an
element of type (2,3).

The degree patterns come from a distinct-degree factorization written
here; FLINT supplies only the arithmetic in ``GF(p)[x]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Iterator, Sequence

import flint

from ..errors import BudgetExhausted

__all__ = [
    "CycleWitness", "S5Certificate", "S5Refusal", "certify_s5", "degree_pattern",
    "eisenstein_prime", "integer_coefficients", "primes",
]

FIVE_CYCLE = "5-cycle"
TRANSPOSITION = "transposition"
CUBE_TRANSPOSITION = "transposition (cube of a (2,3) element)"


def primes() -> Iterator[int]:
    yield 2
    n = 3
    while True:
        if flint.fmpz(n).is_prime():
            yield n
        n += 2


def integer_coefficients(coeffs: Sequence) -> list[int]:
    """Primitive integer coefficients (highest degree first) for ``coeffs``."""
    fr = [Fraction(c) for c in coeffs]
    while fr and fr[0] == 0:
        fr = fr[1:]
    if not fr:
        raise ValueError("the zero polynomial")
    den = lcm(*(c.denominator for c in fr))
    ints = [int(c * den) for c in fr]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    return ints if ints[0] > 0 else [-c for c in ints]


def _nmod(ints: Sequence[int], p: int) -> flint.nmod_poly:
    return flint.nmod_poly(list(reversed([c % p for c in ints])), p)


def degree_pattern(ints: Sequence[int], p: int) -> tuple[int, ...] | None:
    """Sorted factor degrees of ``f mod p``, or None if ``p`` is unusable.

    A prime is unusable when it divides the leading coefficient or ``f`` is
    not squarefree mod ``p``.
    """
    if ints[0] % p == 0:
        return None
    f = _nmod(ints, p)
    f = f * pow(int(f.leading_coefficient()), -1, p)
    if f.gcd(f.derivative()).degree() > 0:
        return None
    x = flint.nmod_poly([0, 1], p)
    pattern: list[int] = []
    g, h, k = f, x, 0
    while g.degree() >= 2 * (k + 1):
        k += 1
        h = h.pow_mod(p, g)  # x^(p^k) mod g
        d = g.gcd(h - x)
        if d.degree() > 0:
            pattern.extend([k] * (d.degree() // k))
            g = g // d
            h = h % g
    if g.degree() > 0:
        pattern.append(g.degree())
    return tuple(sorted(pattern))


def eisenstein_prime(ints: Sequence[int]) -> int | None:
    """Smallest prime for which Eisenstein's criterion applies, if any."""
    lead, rest = ints[0], ints[1:]
    g = 0
    for c in rest:
        g = gcd(g, c)
    if g in (0, 1):
        return None
    for p, _ in flint.fmpz(abs(g)).factor():
        p = int(p)
        if lead % p and ints[-1] % (p * p):
            return p
    return None


def _subset_sums(pattern: Sequence[int]) -> set[int]:
    return {sum(c) for r in range(len(pattern) + 1) for c in combinations(pattern, r)}


@dataclass(frozen=True)
class CycleWitness:
    prime: int
    pattern: tuple[int, ...]
    role: str

    def to_dict(self) -> dict:
        return {"prime": self.prime, "pattern": list(self.pattern), "role": self.role}


@dataclass(frozen=True)
class S5Certificate:
    coefficients: tuple[int, ...]
    irreducibility: dict
    witnesses: tuple[CycleWitness, ...]
    primes_tried: int
    galois_group: str = "S5"

    def replay(self) -> bool:
        """Re-derive every recorded fact from the coefficients."""
        ints = list(self.coefficients)
        if len(ints) != 6:
            return False
        method = self.irreducibility.get("method")
        if method == "eisenstein":
            p = self.irreducibility["prime"]
            if not (all(c % p == 0 for c in ints[1:]) and ints[0] % p and ints[-1] % (p * p)):
                return False
        elif method == "degree_patterns":
            excluded = set()
            for p in self.irreducibility["primes"]:
                pat = degree_pattern(ints, p)
                if pat is None:
                    return False
                excluded |= {d for d in (1, 2) if d not in _subset_sums(pat)}
            if excluded != {1, 2}:
                return False
        else:
            return False
        roles = set()
        for w in self.witnesses:
            if degree_pattern(ints, w.prime) != w.pattern:
                return False
            if w.pattern == (5,):
                roles.add(FIVE_CYCLE)
            elif w.pattern in ((1, 1, 1, 2), (2, 3)):
                roles.add(TRANSPOSITION)
        return roles == {FIVE_CYCLE, TRANSPOSITION}

    def to_dict(self) -> dict:
        return {"verdict": "certified", "galois_group": self.galois_group,
                "coefficients": list(self.coefficients), "irreducibility": self.irreducibility,
                "witnesses": [w.to_dict() for w in self.witnesses],
                "primes_tried": self.primes_tried}


@dataclass(frozen=True)
class S5Refusal:
    """The input is reducible over Q, with its factorization as proof."""

    coefficients: tuple[int, ...]
    factors: tuple[tuple[tuple[int, ...], int], ...]
    reason: str = "reducible over Q"

    def replay(self) -> bool:
        """The factors are nonconstant and multiply back to the input, up to a unit."""
        prod = flint.fmpz_poly([1])
        count = 0
        for c, e in self.factors:
            f = flint.fmpz_poly(list(reversed(c)))
            if f.degree() < 1:
                return False
            prod *= f ** e
            count += e
        target = flint.fmpz_poly(list(reversed(self.coefficients)))
        return count >= 2 and (prod == target or prod == -target)

    def to_dict(self) -> dict:
        return {"verdict": "refused", "reason": self.reason,
                "coefficients": list(self.coefficients),
                "factors": [{"coefficients": list(c), "multiplicity": e} for c, e in self.factors]}


def _refusal(ints: list[int]) -> S5Refusal | None:
    poly = flint.fmpz_poly(list(reversed(ints)))
    _, factors = poly.factor()
    if len(factors) == 1 and factors[0][1] == 1:
        return None
    out = tuple((tuple(int(c) for c in reversed(f.coeffs())), int(e)) for f, e in factors)
    return S5Refusal(tuple(ints), out)


def certify_s5(coeffs: Sequence, prime_budget: int = 10000) -> S5Certificate | S5Refusal:
    """Certificate that the quintic ``coeffs`` (highest degree first) has group S5."""
    ints = integer_coefficients(coeffs)
    if len(ints) != 6:
        raise ValueError(f"expected a quintic, got degree {len(ints) - 1}")
    refusal = _refusal(ints)
    if refusal is not None:
        return refusal
    eis = eisenstein_prime(ints)
    irreducibility: dict = {"method": "eisenstein", "prime": eis} if eis else {}
    excluded: set[int] = set()
    exclusion_primes: list[int] = []
    found: dict[str, CycleWitness] = {}
    tried = 0
    for p in primes():
        if tried >= prime_budget:
            break
        tried += 1
        pat = degree_pattern(ints, p)
        if pat is None:
            continue
        if not irreducibility:
            new = {d for d in (1, 2) if d not in _subset_sums(pat)} - excluded
            if new:
                excluded |= new
                exclusion_primes.append(p)
        if pat == (5,) and FIVE_CYCLE not in found:
            found[FIVE_CYCLE] = CycleWitness(p, pat, FIVE_CYCLE)
        elif pat == (1, 1, 1, 2) and TRANSPOSITION not in found:
            found[TRANSPOSITION] = CycleWitness(p, pat, TRANSPOSITION)
        elif pat == (2, 3) and TRANSPOSITION not in found:
            found[TRANSPOSITION] = CycleWitness(p, pat, CUBE_TRANSPOSITION)
        if not irreducibility and excluded == {1, 2}:
            irreducibility = {"method": "degree_patterns", "primes": exclusion_primes}
        if irreducibility and len(found) == 2:
            return S5Certificate(tuple(ints), irreducibility,
                                 (found[FIVE_CYCLE], found[TRANSPOSITION]), tried)
    raise BudgetExhausted(f"no S5 certificate within {prime_budget} primes")
