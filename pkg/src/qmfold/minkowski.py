"""Exact ?(x) on rationals, its inverse on dyadic rationals, and iterates f_n."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cf import CF, CapExceeded, canonicalize, cf_from_rational, euclid

DEFAULT_WORK_CAP = 2**16


@dataclass(frozen=True)
class Dyadic:
    """num / 2**exp, always stored normalized (num odd, or num == exp == 0)."""

    num: int
    exp: int

    def __post_init__(self):
        if self.num < 0 or self.exp < 0:
            raise ValueError("dyadic numerator and exponent must be nonnegative")
        num, exp = self.num, self.exp
        if num == 0:
            exp = 0
        elif exp and not num & 1:
            shift = min((num & -num).bit_length() - 1, exp)
            num >>= shift
            exp -= shift
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    @classmethod
    def from_fraction(cls, x: Fraction) -> "Dyadic":
        x = Fraction(x)
        d = x.denominator
        if d & (d - 1):
            raise ValueError(f"{x} is not a dyadic rational")
        return cls(x.numerator, d.bit_length() - 1)

    def __str__(self) -> str:
        return f"{self.num}/2^{self.exp}"


def qm_of_cf(a: Sequence[int]) -> Dyadic:
    """?([a1..at]) = sum_k (-1)^(k+1) / 2^(a1+...+ak-1), exactly.

    The sum is accumulated at the common scale 2^(S-1), S = a1+...+at, where
    the term for k becomes +-2^(S - (a1+...+ak)).
    """
    if not a:
        return Dyadic(0, 0)
    total = sum(a)
    num = 0
    partial = 0
    sign = 1
    for x in a:
        partial += x
        num += sign << (total - partial)
        sign = -sign
    return Dyadic(num, total - 1)


def qm_of_rational(x: Fraction | int) -> Dyadic:
    return qm_of_cf(cf_from_rational(Fraction(x)))


def qm_inverse(d: Dyadic | Fraction) -> CF:
    """Canonical expansion A with ?([A]) = d.

    The binary digits of d are 0^(a1-1) 1^(a2) 0^(a3) 1^(a4) ... , so the run
    lengths give the partial quotients directly.
    """
    if not isinstance(d, Dyadic):
        d = Dyadic.from_fraction(d)
    if d.num == 0:
        return ()
    if d.num == 1 and d.exp == 0:
        return (1,)
    if d.num >= 1 << d.exp:
        raise ValueError(f"{d} is outside [0, 1]")
    bits = format(d.num, "b").zfill(d.exp)
    runs: list[int] = []
    current = "0"
    length = 1  # a1 is the count of leading zeros plus one
    for b in bits:
        if b == current:
            length += 1
        else:
            runs.append(length)
            current = b
            length = 1
    runs.append(length)
    return canonicalize(runs)


@dataclass
class Orbit:
    start: Fraction
    iterates: list[Fraction] = field(default_factory=list)
    capped: bool = False
    # certified enclosure of the first iterate the cap prevented computing
    next_bounds: tuple[Fraction, Fraction] | None = None
    classification: str = "undetermined"
    target: Fraction | None = None


def iterate_qm(x: Fraction | int, n: int, work_cap: int | None = DEFAULT_WORK_CAP) -> Fraction:
    """f_n(x) exactly; raises CapExceeded when an intermediate expansion is too big."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{x} is outside [0, 1]")
    if n < 0:
        raise ValueError("n must be nonnegative")
    for _ in range(n):
        x = qm_of_cf(cf_from_rational(x, cap=work_cap)).to_fraction()
    return x


def qm_enclosure(prefix: Sequence[int], cap: int) -> tuple[Fraction, Fraction]:
    """Bounds on ?(x) for x = [prefix, c, ...] with c pushing the sum past ``cap``.

    Such x lie between [prefix] and [prefix, m] with m = cap - sum(prefix) + 1,
    and ? is increasing.
    """
    m = max(cap - sum(prefix) + 1, 1)
    a = qm_of_cf(prefix).to_fraction()
    b = qm_of_cf(tuple(prefix) + (m,)).to_fraction()
    return min(a, b), max(a, b)


TARGETS = (Fraction(0), Fraction(1, 2), Fraction(1))
# classification needs the last 3 iterates monotone toward the target and a
# final distance below 2^-8
CLOSE = Fraction(1, 256)


def fixed_point_orbit(x: Fraction | int, max_n: int = 64,
                      work_cap: int = DEFAULT_WORK_CAP) -> Orbit:
    """Iterate ? from x and report where the orbit seems to head.

    Stops after ``max_n`` steps or when the work cap trips. On a cap, the
    quotients found before the overflow still pin the next iterate inside a
    ?-image of a cylinder, and that enclosure counts as the final point of the
    orbit for classification. The verdict is one of "fixed", "toward 0",
    "toward 1/2", "toward 1" or "undetermined"; it is evidence about the
    orbit prefix only.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{x} is outside [0, 1]")
    orbit = Orbit(start=x, iterates=[x])
    for _ in range(max_n):
        cur = orbit.iterates[-1]
        quotients: list[int] = []
        try:
            for a in euclid(cur.numerator, cur.denominator, cap=work_cap):
                quotients.append(a)
        except CapExceeded:
            orbit.capped = True
            orbit.next_bounds = qm_enclosure(quotients, work_cap)
            break
        nxt = qm_of_cf(quotients).to_fraction()
        orbit.iterates.append(nxt)
        if nxt == cur:
            break
    _classify(orbit)
    return orbit


def _classify(orbit: Orbit) -> None:
    its = orbit.iterates
    if len(its) >= 2 and its[-1] == its[-2]:
        orbit.classification = "fixed"
        orbit.target = its[-1]
        return
    # each point is an interval; exact iterates are degenerate ones
    points = [(v, v) for v in its]
    if orbit.next_bounds is not None:
        points.append(orbit.next_bounds)
    if len(points) < 3:
        return
    lo, hi = points[-1]
    for target in TARGETS:
        if max(abs(lo - target), abs(hi - target)) >= CLOSE:
            continue
        a, b, c = points[-3:]
        if a[1] < b[0] and b[1] < c[0] and c[1] <= target:
            pass
        elif a[0] > b[1] and b[0] > c[1] and c[0] >= target:
            pass
        else:
            continue
        orbit.classification = f"toward {_fmt(target)}"
        orbit.target = target
        return


def _fmt(t: Fraction) -> str:
    return str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"
