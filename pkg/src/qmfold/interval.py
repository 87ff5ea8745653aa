"""Certified enclosures with exact rational endpoints.

Only what the rest of the package needs: +, -, *, / of intervals, square roots
of rationals and natural logs of positive rationals. Every enclosure is
rounded outward onto a dyadic grid, so endpoints stay small.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt


def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction((x.numerator << bits) // x.denominator, 1 << bits)


def _ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(-((-x.numerator << bits) // x.denominator), 1 << bits)


def approx(x: Fraction) -> str:
    """Short decimal form; magnitudes beyond float range are shown as ~2^e."""
    x = Fraction(x)
    e = abs(x.numerator).bit_length() - x.denominator.bit_length()
    if abs(e) < 1000:
        return f"{float(x):.12g}"
    return f"{'-' if x < 0 else ''}~2^{e}"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def _coerce(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(p), max(p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains 0")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def round_out(self, bits: int) -> "Interval":
        return Interval(_floor_dyadic(self.lo, bits), _ceil_dyadic(self.hi, bits))

    def round_decimal(self, places: int) -> "Interval":
        """Outward rounding onto the 10^-places grid."""
        scale = 10**places
        lo = Fraction((self.lo.numerator * scale) // self.lo.denominator, scale)
        hi = Fraction(-((-self.hi.numerator * scale) // self.hi.denominator), scale)
        return Interval(lo, hi)

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def __str__(self) -> str:
        return f"[{approx(self.lo)}, {approx(self.hi)}]"


def sqrt(x, bits: int) -> Interval:
    """Enclosure of sqrt(x) for a rational x >= 0 with 2^-bits resolution."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt of a negative number")
    scaled = (x.numerator << (2 * bits)) // x.denominator
    r = isqrt(scaled)
    lo = Fraction(r, 1 << bits)
    hi = Fraction(r + 1, 1 << bits)
    return Interval(lo, hi)


def _atanh_series(t: Fraction, bits: int) -> Interval:
    # atanh(t) = sum t^(2i+1)/(2i+1); the tail after the last term taken is
    # below t^(2n+1) / ((2n+1)(1 - t^2)) for 0 <= t < 1
    if not 0 <= t < 1:
        raise ValueError("atanh series needs 0 <= t < 1")
    eps = Fraction(1, 1 << (bits + 2))
    t2 = t * t
    power = t
    total = Fraction(0)
    k = 1
    while True:
        total += power / k
        power *= t2
        k += 2
        tail = power / (k * (1 - t2))
        if tail < eps:
            break
    return Interval(total, total + tail).round_out(bits + 2)


_LN2_CACHE: dict[int, Interval] = {}


def ln2(bits: int) -> Interval:
    if bits not in _LN2_CACHE:
        _LN2_CACHE[bits] = (2 * _atanh_series(Fraction(1, 3), bits + 2)).round_out(bits)
    return _LN2_CACHE[bits]


def log(x, bits: int) -> Interval:
    """Enclosure of ln(x) for a rational x > 0 (or an Interval of them)."""
    if isinstance(x, Interval):
        if x.lo <= 0:
            raise ValueError("log of a non-positive interval")
        return Interval(log(x.lo, bits).lo, log(x.hi, bits).hi)
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of a non-positive number")
    # x = 2^k * m with m in [2/3, 4/3) keeps the atanh argument below 1/7
    k = x.numerator.bit_length() - x.denominator.bit_length()
    m = x / Fraction(2) ** k
    while m >= Fraction(4, 3):
        m /= 2
        k += 1
    while m < Fraction(2, 3):
        m *= 2
        k -= 1
    t = (m - 1) / (m + 1)
    core = 2 * _atanh_series(abs(t), bits + 4)
    if t < 0:
        core = -core
    return (core + k * ln2(bits + 4 + max(abs(k), 1).bit_length())).round_out(bits)


def log2_int(n: int, bits: int) -> Interval:
    """Enclosure of log2(n) for a positive integer n."""
    if n < 1:
        raise ValueError("log2 of a non-positive integer")
    e = n.bit_length() - 1
    frac = Fraction(n, 1 << e)  # in [1, 2)
    if frac == 1:
        return Interval.point(e)
    return (e + log(frac, bits + 2) / ln2(bits + 4)).round_out(bits)
