"""Numbers of the form c * 2**e with exponents too large to materialize.

The certifier compares sums like ``2**s - 2**(t-1)`` against
``k * 2**(t+u) + 2**(t-1) + 2`` where s can have hundreds of digits. Terms are
grouped into clusters whose exponents are close enough to combine exactly;
between clusters a dominance test on the exponent gap decides the sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

# exponent spreads up to this many bits are combined exactly
EXACT_SPREAD = 1 << 20


@dataclass(frozen=True)
class Pow2Bound:
    coeff: Fraction
    exp: int

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if not isinstance(self.exp, int):
            raise TypeError("exponent must be an int")

    @classmethod
    def of_int(cls, n: int) -> "Pow2Bound":
        return cls(Fraction(n), 0)

    def __neg__(self) -> "Pow2Bound":
        return Pow2Bound(-self.coeff, self.exp)

    def scale(self, k) -> "Pow2Bound":
        return Pow2Bound(self.coeff * Fraction(k), self.exp)

    def value(self, limit: int = EXACT_SPREAD) -> Fraction:
        """Materialize, refusing exponents whose magnitude passes ``limit``."""
        if abs(self.exp) > limit:
            raise OverflowError(f"2^{self.exp} is too large to materialize")
        return self.coeff * Fraction(2) ** self.exp

    def __str__(self) -> str:
        return f"{self.coeff}*2^{self.exp}"


def _log2_upper(x: Fraction) -> int:
    """An integer b with x <= 2**b, for x > 0."""
    return x.numerator.bit_length() - x.denominator.bit_length() + 1


def sum_sign(terms: Iterable[Pow2Bound], spread: int = EXACT_SPREAD) -> int | None:
    """Sign (-1, 0, 1) of a sum of c*2^e terms, or None if it cannot be decided.

    Terms within ``spread`` bits of each other are combined into one exact
    coefficient at the cluster's lowest exponent. The highest nonzero cluster
    decides the sign when the gap to the next cluster exceeds the log of the
    coefficient ratio; otherwise the answer is None.
    """
    items = sorted((t for t in terms if t.coeff), key=lambda t: t.exp, reverse=True)
    if not items:
        return 0
    clusters: list[Pow2Bound] = []
    group: list[Pow2Bound] = [items[0]]
    for t in items[1:]:
        if group[0].exp - t.exp <= spread:
            group.append(t)
        else:
            clusters.append(_merge(group))
            group = [t]
    clusters.append(_merge(group))
    clusters = [c for c in clusters if c.coeff]
    if not clusters:
        return 0
    top, rest = clusters[0], clusters[1:]
    sign = 1 if top.coeff > 0 else -1
    if not rest:
        return sign
    # |rest| <= sum|c_i| * 2^(e_1); top wins when |c_0| * 2^(e_0 - e_1) exceeds it
    bulk = sum(abs(c.coeff) for c in rest)
    gap = top.exp - rest[0].exp
    if gap > _log2_upper(bulk / abs(top.coeff)):
        return sign
    return None


def _merge(group: list[Pow2Bound]) -> Pow2Bound:
    base = group[-1].exp
    coeff = sum((t.coeff * (1 << (t.exp - base)) for t in group), Fraction(0))
    return Pow2Bound(coeff, base)


def scaled_pow_cmp(a: Pow2Bound, b: Pow2Bound) -> int:
    """Exact ordering of a.coeff*2^a.exp against b.coeff*2^b.exp (positive coeffs)."""
    if a.coeff <= 0 or b.coeff <= 0:
        raise ValueError("scaled_pow_cmp needs positive coefficients")
    d = a.exp - b.exp
    ratio = b.coeff / a.coeff  # compare 2^d with ratio
    if d > _log2_upper(ratio):
        return 1
    if -d > _log2_upper(1 / ratio):
        return -1
    # |d| is now small: compare exactly
    lhs = a.coeff * (1 << d) if d >= 0 else a.coeff
    rhs = b.coeff if d >= 0 else b.coeff * (1 << -d)
    return (lhs > rhs) - (lhs < rhs)
