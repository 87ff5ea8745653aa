"""Elements of M: construction from block data, certification, and kappa_2.

An element is x = [A1, tau1, A2, tau2, ...] where tau_k = sigma_k + s_k,
sigma_k is the sum of every quotient up to and including A_k, and the slack
must satisfy s_k > (kappa_2 - 1) * S(A_{k+1}) + sigma_k + 2. A finite MSpec
describes the prefix through A_m.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Sequence

from . import interval
from .cf import CF, check_quotients, continuant
from .folding import DEFAULT_BIGINT_BITS, ImagePrefix, SymbolicOnly, image_prefix, max_exact_depth
from .interval import Interval, approx
from .pow2 import Pow2Bound, sum_sign

DEFAULT_KAPPA_WIDTH = Fraction(1, 10**12)


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class MSpec:
    blocks: tuple[CF, ...]
    slacks: tuple[int, ...] = ()

    def __post_init__(self):
        blocks = tuple(check_quotients(b) for b in self.blocks)
        slacks = tuple(self.slacks)
        if not blocks or not blocks[0]:
            raise SpecError("A1 must be non-empty")
        if blocks[0] == (1,):
            raise SpecError("A1 = (1) maps to ?([1]) = [1], which cannot be folded")
        if len(slacks) != len(blocks) - 1:
            raise SpecError(f"{len(blocks)} blocks need {len(blocks) - 1} slacks, got {len(slacks)}")
        for s in slacks:
            if not isinstance(s, int) or isinstance(s, bool) or s < 1:
                raise SpecError(f"slacks must be positive integers, got {s!r}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "slacks", slacks)

    def sigmas(self) -> list[int]:
        """sigma_k for k = 1..m."""
        out = []
        sigma = 0
        for k, block in enumerate(self.blocks):
            if k:
                sigma += sigma + self.slacks[k - 1]  # tau_k = sigma_k + s_k
            sigma += sum(block)
            out.append(sigma)
        return out

    def to_json(self) -> dict:
        return {"blocks": [[str(a) for a in b] for b in self.blocks],
                "slacks": [str(s) for s in self.slacks]}

    @classmethod
    def from_json(cls, data: dict) -> "MSpec":
        try:
            blocks = tuple(tuple(int(a) for a in b) for b in data["blocks"])
            slacks = tuple(int(s) for s in data.get("slacks", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed spec: {exc}") from exc
        return cls(blocks, slacks)

    @classmethod
    def load(cls, path) -> "MSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


# -- kappa_2 ----------------------------------------------------------------


def _kappa_at(bits: int) -> Interval:
    def ell(j: int) -> Interval:
        u = (j + interval.sqrt(j * j + 4, bits + 8)) / 2
        return interval.log(u, bits + 8) - Fraction(j, 2) * interval.ln2(bits + 8)

    l4, l5 = ell(4), ell(5)
    return ((4 * l5 - 5 * l4) / (l5 - l4)).round_out(bits)


@lru_cache(maxsize=None)
def _kappa_chain(steps: int) -> Interval:
    # step i uses 16 * 2^i bits; each enclosure is intersected with the last,
    # so refinements nest
    cur = _kappa_at(16)
    for i in range(1, steps + 1):
        cur = cur.intersect(_kappa_at(16 << i))
    return cur


def kappa2(width: Fraction | str | float = DEFAULT_KAPPA_WIDTH) -> Interval:
    """Certified enclosure of (4 L5 - 5 L4) / (L5 - L4) no wider than ``width``."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    steps = 0
    while True:
        enc = _kappa_chain(steps)
        if enc.width <= width:
            return enc
        steps += 1


# -- construction -----------------------------------------------------------


def slack_threshold(kappa: Fraction, next_sum: int, sigma: int) -> Fraction:
    return (kappa - 1) * next_sum + sigma + 2


def minimal_slack(blocks: Sequence[Sequence[int]], k: int, kappa_hi: Fraction,
                  slacks: Sequence[int] = ()) -> int:
    """Least s_k with s_k > (kappa_hi - 1) S(A_{k+1}) + sigma_k + 2.

    ``slacks`` supplies s_1..s_{k-1}; any missing ones are taken minimal too.
    """
    if not 1 <= k < len(blocks):
        raise IndexError(f"k = {k} outside 1..{len(blocks) - 1}")
    used = list(slacks[:k - 1])
    while len(used) < k - 1:
        used.append(minimal_slack(blocks, len(used) + 1, kappa_hi, used))
    sigma = 0
    for i in range(k):
        if i:
            sigma += sigma + used[i - 1]
        sigma += sum(blocks[i])
    return floor(slack_threshold(Fraction(kappa_hi), sum(blocks[k]), sigma)) + 1


def minimal_spec(blocks: Sequence[Sequence[int]], kappa: Interval | None = None,
                 extra: Sequence[int] = ()) -> MSpec:
    """Spec with each slack minimal (plus ``extra[k]`` when given)."""
    kappa = kappa or kappa2()
    slacks: list[int] = []
    for k in range(1, len(blocks)):
        s = minimal_slack(blocks, k, kappa.hi, slacks)
        slacks.append(s + (extra[k - 1] if k - 1 < len(extra) else 0))
    return MSpec(tuple(tuple(b) for b in blocks), tuple(slacks))


def tau_sequence(spec: MSpec) -> list[int]:
    sig = spec.sigmas()
    return [sig[k] + s for k, s in enumerate(spec.slacks)]


def expand_prefix(spec: MSpec, depth: int | None = None) -> CF:
    """A1, tau1, ..., A_depth (tau_depth excluded)."""
    depth = len(spec.blocks) if depth is None else depth
    if not 1 <= depth <= len(spec.blocks):
        raise ValueError(f"depth {depth} outside 1..{len(spec.blocks)}")
    taus = tau_sequence(spec)
    out: list[int] = list(spec.blocks[0])
    for k in range(1, depth):
        out.append(taus[k - 1])
        out.extend(spec.blocks[k])
    return tuple(out)


def block_boundaries(spec: MSpec, depth: int | None = None) -> list[int]:
    """t_j = d(A1) + ... + d(A_j) + (j - 1): the prefix length ending at A_j."""
    depth = len(spec.blocks) if depth is None else depth
    out, t = [], 0
    for j in range(depth):
        t += len(spec.blocks[j]) + (1 if j else 0)
        out.append(t)
    return out


# -- certificates ------------------------------------------------------------


@dataclass
class SlackVerdict:
    k: int
    slack: int
    sigma: int
    next_sum: int
    threshold: Interval
    verdict: str  # "pass", "fail" or "inconclusive"


@dataclass
class MembershipReport:
    verdicts: list[SlackVerdict]
    kappa: Interval

    @property
    def status(self) -> str:
        states = {v.verdict for v in self.verdicts}
        if "fail" in states:
            return "fail"
        if "inconclusive" in states:
            return "inconclusive"
        return "pass"

    def explain(self) -> list[str]:
        out = []
        for v in self.verdicts:
            if v.verdict == "fail":
                out.append(f"k={v.k}: s={v.slack} does not exceed "
                           f"(kappa-1)*{v.next_sum} + {v.sigma} + 2 >= {approx(v.threshold.lo)}")
            elif v.verdict == "inconclusive":
                out.append(f"k={v.k}: s={v.slack} lies inside the threshold enclosure {v.threshold}")
        return out


def certify_membership(spec: MSpec, kappa: Interval | None = None) -> MembershipReport:
    """Check every slack against the kappa_2 enclosure.

    Pass needs s_k above the threshold computed with kappa.hi; fail needs s_k at
    or below the one computed with kappa.lo; anything between is inconclusive.
    """
    kappa = kappa or kappa2()
    sig = spec.sigmas()
    verdicts = []
    for k, s in enumerate(spec.slacks, start=1):
        nxt = sum(spec.blocks[k])
        thr = Interval(slack_threshold(kappa.lo, nxt, sig[k - 1]),
                       slack_threshold(kappa.hi, nxt, sig[k - 1]))
        if s > thr.hi:
            verdict = "pass"
        elif s <= thr.lo:
            verdict = "fail"
        else:
            verdict = "inconclusive"
        verdicts.append(SlackVerdict(k, s, sig[k - 1], nxt, thr, verdict))
    return MembershipReport(verdicts, kappa)


@dataclass
class ImageCheck:
    """Bound chain for g_k = z_k - sigma(B_k) at one k."""

    k: int
    empty_next: bool
    # bounds used, as c * 2^e
    z_lower: Pow2Bound
    sigma_b_upper: Pow2Bound
    s_b_next_upper: Pow2Bound
    g_lower: list[Pow2Bound]
    rhs_upper: list[Pow2Bound]
    steps: dict[str, str] = field(default_factory=dict)
    verdict: str = "inconclusive"
    exact: dict | None = None


@dataclass
class ImageReport:
    status: str
    checks: list[ImageCheck]
    membership: MembershipReport
    exact_depth: int = 0


def _decide(terms: list[Pow2Bound], strict: bool = True) -> str:
    sign = sum_sign(terms)
    if sign is None:
        return "inconclusive"
    if sign > 0 or (sign == 0 and not strict):
        return "pass"
    return "fail"


def certify_image_membership(spec: MSpec, K: int | None = None, kappa: Interval | None = None,
                             max_bits: int | None = DEFAULT_BIGINT_BITS) -> ImageReport:
    """Certify that ?(x) again has M's slack structure, for k = 1..K.

    Only bound arithmetic enters the verdicts: z_k >= 2^s_k,
    sigma(B_k) <= <B1, z1, ..., B_k> = 2^(sigma_k - 1), and
    S(B_{k+1}) <= <B_{k+1}> <= 2^(sigma_k + S(A_{k+1})), or S(B_{k+1}) =
    sigma(B_k) when A_{k+1} is empty. The strict inequality
    g_k > (kappa - 1) S(B_{k+1}) + sigma(B_k) + 2 then follows by comparing
    g_k >= 2^s_k - 2^(sigma_k - 1) with the upper bound of the right side.
    Where exact folding is affordable the true quantities are checked against
    every bound used.
    """
    kappa = kappa or kappa2()
    K = len(spec.blocks) - 1 if K is None else K
    if not 0 <= K <= len(spec.blocks) - 1:
        raise ValueError(f"K = {K} outside 0..{len(spec.blocks) - 1}")
    membership = certify_membership(spec, kappa)
    if membership.status != "pass":
        return ImageReport("refused", [], membership)

    symbolic = image_prefix(spec, K + 1 if K else 1, "symbolic")
    exact_depth = min(max_exact_depth(spec, max_bits), K + 1)
    exact = None
    if exact_depth >= 2:
        try:
            exact = image_prefix(spec, exact_depth, "exact", max_bits)
        except SymbolicOnly:
            exact, exact_depth = None, 0

    sig = spec.sigmas()
    hi = kappa.hi
    checks = []
    for k in range(1, K + 1):
        s = spec.slacks[k - 1]
        sigma = sig[k - 1]
        nxt = spec.blocks[k]
        empty = not nxt
        nb = symbolic.blocks[k]  # B_{k+1}
        z_lower = Pow2Bound(1, s)
        sigma_b = Pow2Bound(1, sigma - 1)
        s_b_next = Pow2Bound(1, nb.sum_exp)
        chk = ImageCheck(k, empty, z_lower, sigma_b, s_b_next, [], [])

        # z_k >= 2^(s_k + 1) - 1 >= 2^s_k
        chk.steps["z_lower"] = _decide([Pow2Bound(1, s + 1), Pow2Bound(-1, 0), -z_lower], strict=False)
        # sigma(B_k) <= <B1, z1, ..., B_k>, and that continuant is the dyadic
        # denominator 2^(sigma_k - 1) of ?([A1, ..., A_k]); the exponent must
        # match the source prefix the image was folded from
        chk.steps["sigma_b"] = "pass" if sum(expand_prefix(spec, k)) == sigma else "fail"
        if empty:
            # S(B_{k+1}) = sigma(B_k)
            chk.steps["s_b_next"] = "pass" if nb.sum_exp == sigma - 1 else "fail"
            chk.steps["slack_gap"] = "pass" if s >= sigma + 2 else "fail"
            # g_k > 2^(sigma+2) - 2^(sigma-1) and the right side <= kappa 2^(sigma-1) + 2
            chk.g_lower = [Pow2Bound(1, sigma + 2), Pow2Bound(-1, sigma - 1)]
            chk.rhs_upper = [Pow2Bound(hi, sigma - 1), Pow2Bound(2, 0)]
        else:
            chk.steps["s_b_next"] = "pass" if nb.sum_exp == nb.cont_hi_exp == sigma + sum(nxt) else "fail"
            chk.g_lower = [z_lower, -sigma_b]
            chk.rhs_upper = [s_b_next.scale(hi - 1), sigma_b, Pow2Bound(2, 0)]
        chk.steps["g_vs_rhs"] = _decide(chk.g_lower + [-t for t in chk.rhs_upper])
        states = set(chk.steps.values())
        chk.verdict = "fail" if "fail" in states else "inconclusive" if "inconclusive" in states else "pass"
        if exact is not None and k + 1 <= exact.depth:
            chk.exact = exact_quantities(exact, spec, k, hi)
        checks.append(chk)

    states = {c.verdict for c in checks}
    status = "fail" if "fail" in states else "inconclusive" if "inconclusive" in states else "pass"
    return ImageReport(status, checks, membership, exact_depth if exact is not None else 0)


def exact_quantities(img: ImagePrefix, spec: MSpec, k: int, kappa_hi: Fraction) -> dict:
    """True z_k, sigma(B_k), S(B_{k+1}), <B_{k+1}> and whether each bound holds."""
    sig = spec.sigmas()
    sigma = sig[k - 1]
    s = spec.slacks[k - 1]
    z = img.blocks[k].z_before.value
    sigma_b = sum(img.upto(k))
    nb = img.block(k + 1)
    s_b_next = sum(nb)
    cont_next = continuant(nb)
    lo_e = sigma + sum(spec.blocks[k]) - 3
    hi_e = sigma + sum(spec.blocks[k])
    g = z - sigma_b
    rhs = (kappa_hi - 1) * s_b_next + sigma_b + 2
    return {
        "z": z,
        "sigma_b": sigma_b,
        "s_b_next": s_b_next,
        "cont_b_next": cont_next,
        "g": g,
        "rhs": rhs,
        "holds": {
            "z_lower": z >= 1 << s,
            "z_range": (1 << (s + 1)) - 1 <= z <= (1 << (s + 2)) - 1,
            "sigma_b": sigma_b <= 1 << (sigma - 1),
            "prefix_continuant": continuant(img.upto(k)) == 1 << (sigma - 1),
            "s_b_next": s_b_next <= 1 << hi_e,
            "cont_b_next": (1 << lo_e if lo_e >= 0 else Fraction(1, 1 << -lo_e)) <= cont_next <= 1 << hi_e,
            "g": g > rhs,
        },
    }


# -- running averages --------------------------------------------------------


@dataclass
class AverageRow:
    t: int
    total: int
    average: Fraction
    exceeds: bool  # average > kappa.hi, certified


def running_average(a: Sequence[int], kappa: Interval | None = None) -> list[AverageRow]:
    """(m1 + ... + mt)/t for t = 1..len(a), flagged when it clears kappa.hi."""
    if not a:
        raise ValueError("running_average needs a non-empty sequence")
    kappa = kappa or kappa2()
    rows = []
    total = 0
    for t, m in enumerate(a, start=1):
        total += m
        avg = Fraction(total, t)
        rows.append(AverageRow(t, total, avg, avg > kappa.hi))
    return rows


def boundary_averages(spec: MSpec, kappa: Interval | None = None) -> list[dict]:
    """Averages at block boundaries, for x itself and for the lower-bound sequence.

    The lower-bound sequence replaces every entry of every A_i by 1 and keeps
    the tau's; its averages never exceed those of x.
    """
    kappa = kappa or kappa2()
    taus = tau_sequence(spec)
    x = expand_prefix(spec)
    rows = []
    m_sum = p_sum = 0
    t = 0
    for j, block in enumerate(spec.blocks):
        if j:
            m_sum += taus[j - 1]
            p_sum += taus[j - 1]
            t += 1
        m_sum += sum(block)
        p_sum += len(block)
        t += len(block)
        avg, low = Fraction(m_sum, t), Fraction(p_sum, t)
        assert sum(x[:t]) == m_sum
        rows.append({"j": j + 1, "t": t, "average": avg, "lower_average": low,
                     "exceeds": avg > kappa.hi, "lower_exceeds": low > kappa.hi})
    return rows
