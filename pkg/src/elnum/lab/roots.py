"""Certified enclosures of R and of the roots of 2x^5 - 10x + 5.

``R`` is the real root of ``x + e^x = 0`` and ``r1..r5`` are the roots of
``2x^5 - 10x + 5``.  Every enclosure is proved by an interval Newton or
Krawczyk test (the operator maps the box strictly inside itself), so each
ball holds exactly one root.

The quintic has three real roots, isolated by a Sturm sequence over Q;
the remaining two form a conjugate pair.  Roots are named in order of
increasing modulus, the one with positive imaginary part first within a
conjugate pair, so ``r1`` is the real root near 0.5067.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from flint import acb, arb, fmpq, fmpq_poly

from ..balls import ComplexBall, precision, rat_to_arb
from ..errors import BudgetExhausted
from ..linrel import OpaqueConstant

__all__ = [
    "QUINTIC", "QuestionRoots", "question_roots", "lambert_root", "quintic_roots",
    "real_root_intervals", "opaque_constants", "poly_ball",
]

QUINTIC = (2, 0, 0, 0, -10, 5)  # highest degree first
_MAX_STEPS = 200


def poly_ball(coeffs: Sequence[int], x):
    """Horner evaluation on a ball (arb or acb)."""
    out = x * 0
    for c in coeffs:
        out = out * x + c
    return out


def _deriv(coeffs: Sequence[int]) -> list[int]:
    n = len(coeffs) - 1
    return [c * (n - k) for k, c in enumerate(coeffs[:-1])]


def _newton_real(f: Callable, df: Callable, x: arb, bits: int) -> arb:
    """Interval Newton from ``x``; raises unless a contraction is observed."""
    proved = False
    target = arb(2) ** (-(bits - 8))
    for _ in range(_MAX_STEPS):
        m = arb(x.mid())
        d = df(x)
        if d.contains(0):
            raise BudgetExhausted("derivative encloses 0 on the Newton interval")
        n = m - f(m) / d
        if x.contains_interior(n):
            proved = True
        elif not proved:
            n = n.intersection(x)
        if proved and (n.rad() <= target or not n.rad() < x.rad()):
            return n
        x = n
    if proved:
        return x
    raise BudgetExhausted("interval Newton did not contract")


def lambert_root(bits: int = 256) -> arb:
    """The real root ``R`` of ``x + e^x`` as a proved enclosure."""
    return _lambert_cached(bits)


@lru_cache(maxsize=16)
def _lambert_cached(bits: int) -> arb:
    with precision(bits + 16):
        x = arb(-0.5, 0.5)  # [-1, 0]
        # x + e^x is increasing, negative at -1 and positive at 0: one root
        return _newton_real(lambda t: t + t.exp(), lambda t: 1 + t.exp(), x, bits)


# -- real roots of an integer polynomial ------------------------------------------------

def _sturm_chain(coeffs: Sequence[int]) -> list[fmpq_poly]:
    f = fmpq_poly(list(reversed(coeffs)))
    chain = [f, f.derivative()]
    while chain[-1].degree() > 0:
        r = -(chain[-2] % chain[-1])
        if r.is_zero():
            break
        chain.append(r)
    return chain


def _variations(chain: Sequence[fmpq_poly], x: Fraction) -> int:
    q = fmpq(x.numerator, x.denominator)
    signs = [s for s in ((p(q) > 0) - (p(q) < 0) for p in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def real_root_intervals(coeffs: Sequence[int]) -> list[tuple[Fraction, Fraction]]:
    """Disjoint open intervals, each holding exactly one real root.

    Endpoints are chosen (by bisection) to avoid roots; the count uses
    Sturm's theorem, so the list is complete.
    """
    chain = _sturm_chain(coeffs)
    bound = 1 + max(Fraction(abs(c), abs(coeffs[0])) for c in coeffs[1:])
    out: list[tuple[Fraction, Fraction]] = []
    todo = [(-bound, bound)]
    while todo:
        a, b = todo.pop()
        n = _variations(chain, a) - _variations(chain, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        fpoly = chain[0]
        while fpoly(fmpq(mid.numerator, mid.denominator)) == 0:
            mid += (b - a) / 7
        todo.extend([(a, mid), (mid, b)])
    return sorted(out)


def _real_root(coeffs: Sequence[int], a: Fraction, b: Fraction, bits: int) -> arb:
    chain = _sturm_chain(coeffs)
    d = _deriv(coeffs)
    with precision(bits + 16):
        while True:
            x = rat_to_arb((a + b) / 2) + arb(0, 1) * rat_to_arb((b - a) / 2)
            if not poly_ball(d, x).contains(0):
                break
            mid = (a + b) / 2
            if _variations(chain, a) - _variations(chain, mid) == 1:
                b = mid
            else:
                a = mid
        return _newton_real(lambda t: poly_ball(coeffs, t), lambda t: poly_ball(d, t), x, bits)


# -- complex roots ---------------------------------------------------------------------

def _approximate_roots(coeffs: Sequence[int]) -> list[complex]:
    """Durand-Kerner in double precision, only used for starting points."""
    n = len(coeffs) - 1
    lead = coeffs[0]
    mon = [c / lead for c in coeffs]
    z = [complex(0.4, 0.9) ** k for k in range(n)]
    for _ in range(500):
        new = []
        for i, zi in enumerate(z):
            val = 0j
            for c in mon:
                val = val * zi + c
            den = 1
            for j, zj in enumerate(z):
                if j != i:
                    den *= zi - zj
            new.append(zi - val / den)
        if max(abs(a - b) for a, b in zip(new, z)) < 1e-15:
            z = new
            break
        z = new
    return z


def _krawczyk(coeffs: Sequence[int], z0: complex, bits: int) -> acb:
    d = _deriv(coeffs)
    with precision(bits + 32):
        z = acb(z0.real, z0.imag)
        for _ in range(_MAX_STEPS):  # Newton polishing on midpoints
            step = poly_ball(coeffs, z) / poly_ball(d, z)
            z = acb(z.real.mid(), z.imag.mid()) - acb(step.real.mid(), step.imag.mid())
            if abs(float(step.real.mid())) + abs(float(step.imag.mid())) < 2.0 ** (-bits - 16):
                break
        r = arb(2) ** (-(bits - 4))
        box = acb(arb(z.real.mid(), r), arb(z.imag.mid(), r))
        y = 1 / acb(poly_ball(d, z).real.mid(), poly_ball(d, z).imag.mid())
        k = z - y * poly_ball(coeffs, z) + (1 - y * poly_ball(d, box)) * (box - z)
        if not box.contains_interior(k):
            raise BudgetExhausted(f"Krawczyk test failed near {z0}")
        return k


def quintic_roots(coeffs: Sequence[int] = QUINTIC, bits: int = 256) -> list[ComplexBall]:
    """All roots of a squarefree integer polynomial, each a proved enclosure."""
    intervals = real_root_intervals(coeffs)
    reals = [acb(_real_root(coeffs, a, b, bits)) for a, b in intervals]
    n_complex = len(coeffs) - 1 - len(reals)
    approx = sorted((z for z in _approximate_roots(coeffs) if z.imag > 1e-8),
                    key=lambda z: (abs(z), -z.imag))
    if len(approx) * 2 != n_complex:
        raise BudgetExhausted("could not separate the non-real roots")
    cplx = []
    for z in approx:
        k = _krawczyk(coeffs, z, bits)
        with precision(bits + 32):
            cplx.extend([k, k.conjugate()])
    balls = [ComplexBall(v, bits) for v in reals + cplx]
    return sorted(balls, key=lambda b: (float(b.abs_upper()), -float(b.mid_im)))


@dataclass(frozen=True)
class QuestionRoots:
    R: ComplexBall
    quintic: tuple[ComplexBall, ...]
    precision_bits: int

    def residuals(self) -> dict[str, ComplexBall]:
        bits = self.precision_bits
        with precision(bits):
            out = {"R": ComplexBall(self.R.value + self.R.value.exp(), bits)}
            for j, r in enumerate(self.quintic, start=1):
                out[f"r{j}"] = ComplexBall(poly_ball(QUINTIC, r.value), bits)
        return out

    def vieta_sum(self) -> ComplexBall:
        with precision(self.precision_bits):
            s = acb(0)
            for r in self.quintic:
                s += r.value
        return ComplexBall(s, self.precision_bits)

    def pairwise_disjoint(self) -> bool:
        qs = self.quintic
        return all(not qs[i].overlaps(qs[j]) for i in range(len(qs)) for j in range(i + 1, len(qs)))

    def to_dict(self) -> dict:
        res = self.residuals()
        return {
            "precision_bits": self.precision_bits,
            "R": self.R.to_dict(), "R_residual_radius": res["R"].to_dict(6)["radius"],
            "quintic": "2x^5 - 10x + 5",
            "roots": [{"name": f"r{j}", "ball": r.to_dict(),
                       "residual_radius": res[f"r{j}"].to_dict(6)["radius"]}
                      for j, r in enumerate(self.quintic, start=1)],
            "vieta_sum_contains_zero": self.vieta_sum().contains_zero(),
            "pairwise_disjoint": self.pairwise_disjoint(),
        }


def question_roots(bits: int = 256) -> QuestionRoots:
    return _question_roots(bits)


@lru_cache(maxsize=8)
def _question_roots(bits: int) -> QuestionRoots:
    return QuestionRoots(ComplexBall(acb(lambert_root(bits)), bits),
                         tuple(quintic_roots(QUINTIC, bits)), bits)


def opaque_constants() -> dict[str, OpaqueConstant]:
    """``R`` and ``r1..r5`` as constants usable in relation searches."""
    out = {"R": OpaqueConstant("R", lambda bits: acb(lambert_root(bits)))}
    for j in range(1, 6):
        out[f"r{j}"] = OpaqueConstant(
            f"r{j}", lambda bits, j=j: _question_roots(bits).quintic[j - 1].value)
    return out
