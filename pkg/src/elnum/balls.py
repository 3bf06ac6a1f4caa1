"""Complex balls backed by Arb.

Arb's ``acb`` encloses a value in a rectangle (a real ball times an imaginary
ball).  :class:`ComplexBall` exposes it as a disk: the midpoint of the
rectangle plus a radius that is an upper bound on the rectangle's half
diagonal.  Every operation here is outward rounded by Arb, so containment of
the true value is preserved.

Arb reads its working precision from a process-wide context; ``precision``
serializes access to it.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import flint
from flint import acb, arb, fmpq

__all__ = ["ComplexBall", "precision", "rat_to_arb", "decimal_string"]

_lock = threading.RLock()


@contextmanager
def precision(bits: int):
    """Run a block at ``bits`` of working precision."""
    with _lock:
        saved = flint.ctx.prec
        flint.ctx.prec = bits
        try:
            yield
        finally:
            flint.ctx.prec = saved


def rat_to_arb(value: Fraction) -> arb:
    return arb(fmpq(value.numerator, value.denominator))


def decimal_string(x: arb, digits: int, upper: bool = False) -> str:
    """Decimal text for the midpoint of ``x``, or for an upper bound of it."""
    if upper:
        x = arb(x.abs_upper())
    m, r, e = x.mid_rad_10exp(digits)
    if upper:
        m = abs(m) + r  # abs_upper is a point; r only carries the rounding
        if m == 0:
            return "0"
    return _sci(int(m), int(e))


def _sci(m: int, e: int) -> str:
    if m == 0:
        return "0"
    sign = "-" if m < 0 else ""
    digits = str(abs(m))
    exp10 = e + len(digits) - 1
    frac = digits[1:].rstrip("0")
    body = digits[0] + ("." + frac if frac else "")
    return f"{sign}{body}e{exp10:+d}"


@dataclass(frozen=True)
class ComplexBall:
    """A disk containing a complex value, computed at ``precision_bits``."""

    value: acb
    precision_bits: int

    @classmethod
    def exact(cls, re: Fraction, im: Fraction = Fraction(0), bits: int = 64) -> "ComplexBall":
        with precision(bits):
            return cls(acb(rat_to_arb(Fraction(re)), rat_to_arb(Fraction(im))), bits)

    @property
    def real(self) -> arb:
        return self.value.real

    @property
    def imag(self) -> arb:
        return self.value.imag

    @property
    def mid_re(self) -> arb:
        return self.value.real.mid()

    @property
    def mid_im(self) -> arb:
        return self.value.imag.mid()

    @property
    def radius(self) -> arb:
        """Upper bound on the distance from the midpoint to any enclosed value."""
        with precision(max(self.precision_bits, 64)):
            rr = arb(self.value.real.rad())
            ri = arb(self.value.imag.rad())
            return arb((rr * rr + ri * ri).sqrt().abs_upper())

    def radius_float(self) -> float:
        r = self.radius
        return float(r.abs_upper()) if r.is_finite() else float("inf")

    def is_finite(self) -> bool:
        return self.value.real.is_finite() and self.value.imag.is_finite()

    def contains_zero(self) -> bool:
        return self.value.real.contains(0) and self.value.imag.contains(0)

    def excludes_zero(self) -> bool:
        return self.is_finite() and not self.contains_zero()

    def contains(self, other: "ComplexBall | acb") -> bool:
        v = other.value if isinstance(other, ComplexBall) else other
        return self.value.contains(v)

    def overlaps(self, other: "ComplexBall") -> bool:
        return self.value.overlaps(other.value)

    def abs_lower(self) -> arb:
        return arb(self.value.abs_lower())

    def abs_upper(self) -> arb:
        return arb(self.value.abs_upper())

    def __sub__(self, other: "ComplexBall") -> "ComplexBall":
        bits = max(self.precision_bits, other.precision_bits)
        with precision(bits):
            return ComplexBall(self.value - other.value, bits)

    def __add__(self, other: "ComplexBall") -> "ComplexBall":
        bits = max(self.precision_bits, other.precision_bits)
        with precision(bits):
            return ComplexBall(self.value + other.value, bits)

    def inflate(self, factor: int) -> "ComplexBall":
        """Same midpoint, radius scaled by ``factor``."""
        with precision(self.precision_bits):
            re, im = self.value.real, self.value.imag
            return ComplexBall(
                acb(arb(re.mid(), re.rad() * factor), arb(im.mid(), im.rad() * factor)),
                self.precision_bits,
            )

    def to_dict(self, digits: int | None = None) -> dict:
        digits = digits or max(10, int(self.precision_bits * 0.30103))
        return {
            "mid_re": decimal_string(self.value.real, digits),
            "mid_im": decimal_string(self.value.imag, digits),
            "radius": decimal_string(self.radius, 6, upper=True),
            "precision_bits": self.precision_bits,
        }

    def __str__(self) -> str:
        d = self.to_dict(digits=30)
        im = d["mid_im"]
        sign, im = ("-", im[1:]) if im.startswith("-") else ("+", im)
        return f"({d['mid_re']} {sign} {im}i) +/- {d['radius']}"
