"""Sylvester's sequence and Cahen's constant as an element of M."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cf import CF, common_prefix, euclid
from .setm import MSpec


def sylvester(n: int) -> int:
    """S_0 = 2, S_{k+1} = S_k^2 - S_k + 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    s = 2
    for _ in range(n):
        s = s * s - s + 1
    return s


def cahen_q(n: int) -> int:
    """q_0 = q_1 = 1, q_{k+2} = q_k^2 q_{k+1} + q_k."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a * a * b + a
    return a


def cahen_cf(depth: int) -> CF:
    """[1, q_0^2, ..., q_{depth-1}^2]."""
    return (1,) + tuple(cahen_q(i) ** 2 for i in range(depth))


@dataclass
class CahenSpec:
    depth: int
    spec: MSpec
    taus: list[int]
    sigmas: list[int]
    tau_margin_ok: list[bool]  # tau_k > 2 sigma_k + 2
    growth_ok: dict[int, bool]  # q_n > 2^(2^(n-3))

    @property
    def ok(self) -> bool:
        return all(self.tau_margin_ok) and all(self.growth_ok.values())


def cahen_spec(depth: int) -> CahenSpec:
    """Block form of [1, q_0^2, ..., q_{depth-1}^2].

    A1 = (1, q0^2, q1^2, q2^2, q3^2), tau_i = q_{3+i}^2 and every later block
    is empty, so depth >= 4 and there are depth - 4 tau's.
    """
    if depth < 4:
        raise ValueError("depth must be at least 4 to hold A1")
    qs = [cahen_q(i) for i in range(depth)]
    a1 = (1,) + tuple(q * q for q in qs[:4])
    taus = [q * q for q in qs[4:]]
    sigmas, slacks = [], []
    sigma = sum(a1)
    for tau in taus:
        sigmas.append(sigma)
        slacks.append(tau - sigma)
        sigma += tau
    spec = MSpec((a1,) + ((),) * len(taus), tuple(slacks))
    margin = [tau > 2 * sig + 2 for tau, sig in zip(taus, sigmas)]
    growth = {n: qs[n] > 1 << (1 << (n - 3)) for n in range(3, depth)}
    return CahenSpec(depth, spec, taus, sigmas, margin, growth)


def growth_holds(n: int) -> bool:
    return cahen_q(n) > 1 << (1 << (n - 3))


def cahen_truncation(digits: int) -> tuple[Fraction, Fraction]:
    """Decimal bounds lo <= C <= hi on a 10^-digits grid.

    The alternating series sum (-1)^i / (S_i - 1) is summed until the next
    term is below 10^-(digits+2); consecutive partial sums bracket C.
    """
    eps = Fraction(1, 10 ** (digits + 2))
    total = Fraction(0)
    i = 0
    while True:
        total += Fraction((-1) ** i, sylvester(i) - 1)
        nxt = Fraction((-1) ** (i + 1), sylvester(i + 1) - 1)
        if abs(nxt) < eps:
            break
        i += 1
    lo, hi = sorted((total, total + nxt))
    scale = 10**digits
    lo_n = (lo.numerator * scale) // lo.denominator
    hi_n = -((-hi.numerator * scale) // hi.denominator)
    return Fraction(lo_n, scale), Fraction(hi_n, scale)


def stable_quotients(lo: Fraction, hi: Fraction) -> CF:
    """Quotients shared by every number in [lo, hi].

    An endpoint whose expansion runs past the common prefix P has complete
    quotient > 1 there, so it sits strictly inside the cylinder of P, and so
    does everything between the endpoints. If an expansion ends exactly at P
    the last entry of P is ambiguous and is dropped.
    """
    a = tuple(euclid(lo.numerator, lo.denominator))
    b = tuple(euclid(hi.numerator, hi.denominator))
    shared = common_prefix(a, b)
    if len(shared) in (len(a), len(b)):
        shared = shared[:-1]
    return shared


def verify_cf(depth: int, digits: int = 200) -> tuple[CF, CF, bool]:
    """Expected [1, q_0^2, ..., q_{depth-1}^2] against the truncation-stable quotients."""
    expected = cahen_cf(depth)
    stable = stable_quotients(*cahen_truncation(digits))
    n = min(len(expected), len(stable))
    return expected, stable, len(stable) >= len(expected) and stable[:n] == expected[:n]
