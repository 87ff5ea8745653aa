"""Finite continued fractions, continuants and convergents over exact integers.

A continued fraction is a plain tuple of positive ints ``(a1, ..., ak)`` read as
``1/(a1 + 1/(a2 + ... + 1/ak))``. The empty tuple stands for 0. Values are
``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

CF = tuple[int, ...]


class CapExceeded(ArithmeticError):
    """Raised when a partial-quotient sum grows past a configured work cap."""

    def __init__(self, cap: int, reached: int):
        super().__init__(
            f"partial-quotient sum (~2^{reached.bit_length()}) exceeds cap {cap}")
        self.cap = cap
        self.reached = reached


class SeqStats(NamedTuple):
    total: int
    length: int


def check_quotients(a: Sequence[int]) -> CF:
    a = tuple(a)
    for x in a:
        if not isinstance(x, int) or isinstance(x, bool) or x < 1:
            raise ValueError(f"partial quotients must be positive integers, got {x!r}")
    return a


def seq_stats(a: Sequence[int]) -> SeqStats:
    return SeqStats(sum(a), len(a))


def euclid(p: int, q: int, cap: int | None = None) -> Iterator[int]:
    """Yield the partial quotients of p/q for 0 <= p <= q, q >= 1.

    With ``cap`` set, raises CapExceeded as soon as the running quotient sum
    passes it, so huge expansions are abandoned early.
    """
    total = 0
    while p:
        a, r = divmod(q, p)
        total += a
        if cap is not None and total > cap:
            raise CapExceeded(cap, total)
        yield a
        q, p = p, r


def cf_from_rational(x: Fraction | int, cap: int | None = None) -> CF:
    """Canonical expansion of a rational in [0, 1] (Euclidean algorithm)."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{x} is outside [0, 1]")
    return tuple(euclid(x.numerator, x.denominator, cap))


def cf_to_rational(a: Sequence[int]) -> Fraction:
    p, q = _pq(check_quotients(a))
    return Fraction(p, q)


def _pq(a: Sequence[int]) -> tuple[int, int]:
    # numerator and denominator of [a], both continuants, already coprime
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for x in a:
        p_prev, p = p, x * p + p_prev
        q_prev, q = q, x * q + q_prev
    return p, q


def continuant(a: Sequence[int]) -> int:
    """Denominator of [a]; 1 for the empty sequence."""
    return _pq(a)[1]


def convergents(a: Sequence[int]) -> list[tuple[Fraction, tuple[int, int]]]:
    out = []
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for x in a:
        p_prev, p = p, x * p + p_prev
        q_prev, q = q, x * q + q_prev
        out.append((Fraction(p, q), (p, q)))
    return out


def is_canonical(a: Sequence[int]) -> bool:
    return len(a) == 0 or a[-1] >= 2 or tuple(a) == (1,)


def canonicalize(a: Sequence[int]) -> CF:
    """Rewrite a trailing 1 into the previous quotient: [..., b, 1] -> [..., b+1]."""
    a = tuple(a)
    if len(a) >= 2 and a[-1] == 1:
        return a[:-2] + (a[-2] + 1,)
    return a


def other_representation(a: Sequence[int]) -> CF:
    """The second expansion of the same rational.

    ``[..., b]`` with ``b >= 2`` becomes ``[..., b-1, 1]`` and vice versa. The
    value 1 has only the form ``[1]`` under positive quotients, so ``(1,)`` is
    rejected along with the empty sequence.
    """
    a = tuple(a)
    if not a:
        raise ValueError("the empty expansion has no other representation")
    if a == (1,):
        raise ValueError("[1] has no second representation with positive quotients")
    if a[-1] == 1:
        return canonicalize(a)
    return a[:-1] + (a[-1] - 1, 1)


def concat(*parts: Sequence[int]) -> CF:
    out: list[int] = []
    for part in parts:
        out.extend(part)
    return tuple(out)


def reverse(a: Sequence[int]) -> CF:
    return tuple(reversed(a))


def drop_last(a: Sequence[int]) -> CF:
    if not a:
        raise ValueError("drop_last of an empty sequence")
    return tuple(a[:-1])


def drop_first(a: Sequence[int]) -> CF:
    if not a:
        raise ValueError("drop_first of an empty sequence")
    return tuple(a[1:])


def common_prefix(a: Sequence[int], b: Sequence[int]) -> CF:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return tuple(a[:n])


def tail_after(x: Fraction, prefix: Sequence[int]) -> Fraction:
    """Complete quotient r = c1 + 1/(c2 + ...) with x = [prefix, c1, c2, ...].

    Solves ``x = (p_m r + p_{m-1}) / (q_m r + q_{m-1})`` for r. Raises
    ZeroDivisionError when x equals [prefix] itself.
    """
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in prefix:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return (p_prev - q_prev * x) / (q * x - p)


def compare_rule(a: Sequence[int], b: Sequence[int]) -> int:
    """Order of [a] vs [b] from the first differing position, without evaluating.

    At an odd (1-based) position a larger quotient means a smaller value; at an
    even position it means a larger one. A proper prefix compares against the
    missing quotient as if it were infinite.
    """
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            sign = -1 if x > y else 1
            return sign if i % 2 == 0 else -sign
    if len(a) == len(b):
        return 0
    # the shorter one has an "infinite" quotient at position len(shorter)
    i = min(len(a), len(b))
    longer_is_a = len(a) > len(b)
    sign = 1 if i % 2 == 0 else -1  # at an even index the longer one is larger
    return sign if longer_is_a else -sign
