"""Difference quotients of ? and its iterates over cylinder intervals.

The cylinder of a prefix [a1..at] is the interval between [a1..at] and
[a1..at + 1]. Its width is 1/(q_t (q_t + q_{t-1})) and its image under ? has
width exactly 2^-S_t, so the quotient is q_t (q_t + q_{t-1}) / 2^S_t. All
logs here are base 2, reported as certified enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cf import CF, CapExceeded, _pq, check_quotients, common_prefix, cf_from_rational
from .folding import DEFAULT_BIGINT_BITS, ImagePrefix, image_prefix, max_exact_depth
from .interval import Interval, log2_int
from .minkowski import DEFAULT_WORK_CAP, iterate_qm, qm_of_rational
from .setm import MSpec, block_boundaries, expand_prefix

LOG_BITS = 40


@dataclass(frozen=True)
class CylinderInterval:
    prefix: CF
    lo: Fraction
    hi: Fraction
    width: Fraction


def _prefix(prefix: Sequence[int]) -> CF:
    a = check_quotients(prefix)
    if not a:
        raise ValueError("cylinder of the empty prefix is not defined")
    return a


def cylinder_interval(prefix: Sequence[int]) -> CylinderInterval:
    """Endpoints [a1..at] and [a1..at + 1]; non-canonical prefixes are allowed."""
    a = _prefix(prefix)
    p1, q1 = _pq(a)
    p0, q0 = _pq(a[:-1])
    x = Fraction(p1, q1)
    y = Fraction(p1 + p0, q1 + q0)
    lo, hi = min(x, y), max(x, y)
    return CylinderInterval(a, lo, hi, Fraction(1, q1 * (q1 + q0)))


@dataclass(frozen=True)
class LogQuotient:
    """The ?-quotient over a cylinder: exactly factor * 2^-shift."""

    shift: int  # S_t
    factor: int  # q_t (q_t + q_{t-1})

    @property
    def value(self) -> Fraction:
        return Fraction(self.factor, 1 << self.shift)

    def log2(self, bits: int = LOG_BITS) -> Interval:
        return log2_int(self.factor, bits) - self.shift

    def log2_width(self, bits: int = LOG_BITS) -> Interval:
        return -log2_int(self.factor, bits)


def qm_cylinder_log_ratio(prefix: Sequence[int]) -> LogQuotient:
    a = _prefix(prefix)
    _, q1 = _pq(a)
    _, q0 = _pq(a[:-1])
    return LogQuotient(sum(a), q1 * (q1 + q0))


class EndpointCapped(ArithmeticError):
    def __init__(self, side: str, n: int, cause: CapExceeded):
        super().__init__(f"f_{n} at the {side} endpoint hit the work cap ({cause})")
        self.side = side
        self.n = n


def _iterate(x: Fraction, n: int, side: str, work_cap: int | None) -> Fraction:
    try:
        return iterate_qm(x, n, work_cap)
    except CapExceeded as exc:
        raise EndpointCapped(side, n, exc) from exc


def interval_quotient(lo: Fraction, hi: Fraction, n: int,
                      work_cap: int | None = DEFAULT_WORK_CAP) -> Fraction:
    """(f_n(hi) - f_n(lo)) / (hi - lo) for rationals lo < hi."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not lo < hi:
        raise ValueError("need lo < hi")
    return (_iterate(hi, n, "right", work_cap) - _iterate(lo, n, "left", work_cap)) / (hi - lo)


def fn_difference_quotient(prefix: Sequence[int], n: int,
                           work_cap: int | None = DEFAULT_WORK_CAP) -> Fraction:
    c = cylinder_interval(prefix)
    return interval_quotient(c.lo, c.hi, n, work_cap)


def log2_fraction(x: Fraction, bits: int = LOG_BITS) -> Interval:
    if x <= 0:
        raise ValueError("log2 of a non-positive number")
    return log2_int(x.numerator, bits) - log2_int(x.denominator, bits)


@dataclass
class ChainSplit:
    """f_2 over a cylinder I as (? over I) times (? over ?(I)).

    ``outer_log2`` bounds log2 of the f_2 quotient from above: ?(I) sits in
    the cylinder of the common prefix P of its endpoints, whose image has
    width 2^-S_P.
    """

    q2: Fraction
    inner: Fraction
    outer: Fraction
    common: CF
    outer_log2: Interval


def chain_split(prefix: Sequence[int], work_cap: int | None = DEFAULT_WORK_CAP) -> ChainSplit:
    c = cylinder_interval(prefix)
    lo1 = qm_of_rational(c.lo).to_fraction()
    hi1 = qm_of_rational(c.hi).to_fraction()
    inner = (hi1 - lo1) / (c.hi - c.lo)
    outer = interval_quotient(lo1, hi1, 1, work_cap)
    q2 = interval_quotient(c.lo, c.hi, 2, work_cap)
    shared = common_prefix(cf_from_rational(lo1, work_cap), cf_from_rational(hi1, work_cap))
    bound = -sum(shared) - log2_fraction(c.width)
    return ChainSplit(q2, inner, outer, shared, bound)


# -- decay tables --------------------------------------------------------------


@dataclass
class DecayRow:
    """One cylinder at one iteration level.

    Exact rows carry S_t and certified log2 enclosures. Bound rows (``exact``
    False) come from symbolic image blocks: t is unknown, S_t lies in
    [s_lo, s_hi] and log2 of the prefix continuant is known exactly; any
    field whose value is too large to materialize is None.
    """

    level: int
    block: int
    exact: bool
    t: int | None
    S_t: int | None
    log2_width: Interval | None
    log2_image_width: Interval | None
    log2_quotient: Interval | None
    log2_quotient_upper: Fraction | None = None
    S_bounds: tuple[int | None, int | None] | None = None


def _exact_row(level: int, block: int, prefix: CF) -> DecayRow:
    lq = qm_cylinder_log_ratio(prefix)
    q = lq.log2()
    return DecayRow(level, block, True, len(prefix), lq.shift, lq.log2_width(),
                    Interval.point(-lq.shift), q, q.hi)


def _bound_row(level: int, block: int, sigma_a: int, s_prev: int,
               max_bits: int | None) -> DecayRow:
    # B1, z1, ..., B_i has continuant 2^(sigma_a - 1), and its quotient sum
    # lies in [z_{i-1}, 2^(sigma_a - 1)] with z_{i-1} >= 2^(s_prev + 1) - 1
    def fits(e: int) -> bool:
        return max_bits is None or e <= max_bits

    s_lo = (1 << (s_prev + 1)) - 1 if fits(s_prev + 1) else None
    s_hi = 1 << (sigma_a - 1) if fits(sigma_a - 1) else None
    c = 2 * (sigma_a - 1)
    width = Interval(Fraction(-c - 1), Fraction(-c))  # q_{t-1} <= q_t
    image = quotient = upper = None
    if s_lo is not None and s_hi is not None:
        image = Interval(Fraction(-s_hi), Fraction(-s_lo))
        quotient = Interval(Fraction(c - s_hi), Fraction(c + 1 - s_lo))
    if s_lo is not None:
        upper = Fraction(c + 1 - s_lo)
    return DecayRow(level, block, False, None, None, width, image, quotient, upper, (s_lo, s_hi))


def image_spec(img: ImagePrefix) -> MSpec:
    """The image expansion B1, z1, B2, ... read as an MSpec (exact mode)."""
    blocks = tuple(img.block(i) for i in range(1, img.depth + 1))
    slacks = tuple(b.z_before.value - sum(img.upto(i))
                   for i, b in enumerate(img.blocks[1:], start=1))
    return MSpec(blocks, slacks)


def level_rows(level: int, spec: MSpec, depth: int) -> list[DecayRow]:
    seq = expand_prefix(spec, depth)
    return [_exact_row(level, j, seq[:t])
            for j, t in enumerate(block_boundaries(spec, depth), start=1)]


def chain_factor_table(spec: MSpec, n: int, depth: int | None = None,
                       max_bits: int | None = DEFAULT_BIGINT_BITS) -> list[DecayRow]:
    """Rows for levels 0..n-1 at the block boundaries of each level's expansion.

    Level j is the expansion of f_j(x0). A level is exact up to the depth
    the exact image chain reaches; its remaining blocks are bound rows and
    later levels continue from the exact part only.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    depth = len(spec.blocks) if depth is None else depth
    if not 1 <= depth <= len(spec.blocks):
        raise ValueError(f"depth {depth} outside 1..{len(spec.blocks)}")
    rows: list[DecayRow] = []
    pending: list[DecayRow] = []
    cur, cur_depth = spec, depth
    for level in range(n):
        rows += level_rows(level, cur, cur_depth) + pending
        if level + 1 == n:
            break
        reach = min(max_exact_depth(cur, max_bits), cur_depth)
        sig = cur.sigmas()
        pending = [_bound_row(level + 1, i, sig[i - 1], cur.slacks[i - 2], max_bits)
                   for i in range(reach + 1, cur_depth + 1)]
        cur = image_spec(image_prefix(cur, reach, "exact", max_bits))
        cur_depth = reach
    return rows
