"""Continued fractions of ?-images built by folding.

If ?([a1..a_{n-1}]) = [b1..bk] with bk != 1 and the next quotient is
a_n = a1+...+a_{n-1} + s, then ?([a1..an]) is a fold of b:

* n = k (mod 2): [b1..b_{k-1}, bk-1, 1, 2^(s+1)-1, bk, ..., b1]
* otherwise:     [b1..bk, 2^(s+1)-1, 1, bk-1, b_{k-1}, ..., b1]

Anything inside the cylinder of [a1..an] maps to an expansion that agrees
with both folds (slack s and s+1) up to the middle entry z, and
2^(s+1)-1 <= z <= 2^(s+2)-1. Chaining these facts gives the expansion of
?([A1, tau1, A2, tau2, ...]) as B1, z1, B2, z2, ...
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .cf import CF, canonicalize, check_quotients, euclid, tail_after
from .minkowski import qm_of_cf

# 2^(s+1) is materialized only while s + 1 stays at or below this many bits
DEFAULT_BIGINT_BITS = 4096


class FoldError(ValueError):
    pass


class SymbolicOnly(FoldError):
    """Exact mode refused: some 2^(s+1) exceeds the configured bit threshold."""


@dataclass(frozen=True)
class FoldInput:
    image: CF
    n_parity: int  # parity of n, the index of the folded quotient a_n
    s: int

    def __post_init__(self):
        image = check_quotients(self.image)
        object.__setattr__(self, "image", image)
        if not image:
            raise FoldError("image must be non-empty")
        if image[-1] == 1:
            raise FoldError("last quotient of the image must not be 1")
        if self.n_parity not in (0, 1):
            raise FoldError("n_parity must be 0 or 1")
        if self.s < 0:
            raise FoldError("slack must be nonnegative")

    @property
    def same_parity(self) -> bool:
        return self.n_parity == len(self.image) % 2

    @property
    def head(self) -> CF:
        """Entries before z, shared by every image in the cylinder."""
        b = self.image
        return b[:-1] + (b[-1] - 1, 1) if self.same_parity else b


def _materialize_z(s: int, max_bits: int | None) -> int:
    if max_bits is not None and s + 1 > max_bits:
        raise SymbolicOnly(f"2^{s + 1} exceeds the {max_bits}-bit exact threshold")
    return (1 << (s + 1)) - 1


def fold_step(inp: FoldInput, max_bits: int | None = DEFAULT_BIGINT_BITS) -> CF:
    """Expansion of ?([a1..an]) from the expansion of ?([a1..a_{n-1}]).

    The result is the raw folded sequence and may end in 1; canonicalize it
    before comparing with a Euclidean expansion.
    """
    b = inp.image
    z = _materialize_z(inp.s, max_bits)
    if inp.same_parity:
        return inp.head + (z,) + b[::-1]
    return inp.head + (z, 1, b[-1] - 1) + b[-2::-1]


@dataclass(frozen=True)
class FoldBounds:
    lower: CF
    upper: CF
    z_lo: int
    z_hi: int


def fold_range_bounds(inp: FoldInput, max_bits: int | None = DEFAULT_BIGINT_BITS) -> FoldBounds:
    """The folds at slack s and s+1, bracketing the whole cylinder, and z's range."""
    lower = fold_step(inp, max_bits)
    upper = fold_step(replace(inp, s=inp.s + 1), max_bits)
    return FoldBounds(lower, upper, (1 << (inp.s + 1)) - 1, (1 << (inp.s + 2)) - 1)


def extract_z(expansion: Sequence[int], inp: FoldInput) -> int:
    """Read z off the expansion of ?(gamma) for gamma in the cylinder."""
    head = inp.head
    if tuple(expansion[:len(head)]) != head or len(expansion) <= len(head):
        raise FoldError("expansion does not carry the predicted folded prefix")
    return expansion[len(head)]


# -- image prefixes -------------------------------------------------------


@dataclass(frozen=True)
class ZValue:
    """A middle entry z between blocks.

    ``form`` is "exact" when z = 2^(s+1)-1 is forced (the next block is empty)
    or was computed, and "bounded" when only 2^(s+1)-1 <= z <= 2^(s+2)-1 is
    known. ``value`` is None when z was never materialized.
    """

    s: int
    form: str
    value: int | None = None

    def bounds(self) -> tuple[int, int]:
        return (1 << (self.s + 1)) - 1, (1 << (self.s + 2)) - 1

    @property
    def at_lower_bound(self) -> bool:
        return self.value is not None and self.value == (1 << (self.s + 1)) - 1


@dataclass
class Block:
    """One block B_i of an image prefix.

    In exact mode ``start``/``stop`` index into the raw expansion and
    ``total`` is S_{B_i}. The exponent fields hold the bounds the certifier
    relies on: S_{B_i} <= 2^sum_exp and 2^cont_lo_exp <= <B_i> <= 2^cont_hi_exp.
    """

    start: int | None = None
    stop: int | None = None
    total: int | None = None
    z_before: ZValue | None = None
    sum_exp: int | None = None
    cont_lo_exp: int | None = None
    cont_hi_exp: int | None = None


@dataclass
class ImagePrefix:
    """Expansion of ?([A1, tau1, ..., A_depth]) split as B1, z1, ..., B_depth.

    ``source`` is the a-sequence itself. ``raw`` is the canonical expansion
    of its image (None in symbolic mode).
    """

    mode: str
    source: CF
    blocks: list[Block] = field(default_factory=list)
    raw: CF | None = None

    @property
    def depth(self) -> int:
        return len(self.blocks)

    @property
    def source_sum(self) -> int:
        return sum(self.source)

    def block(self, i: int) -> CF:
        """Entries of B_i (1-based), exact mode only."""
        b = self.blocks[i - 1]
        if self.raw is None:
            raise FoldError("block contents need exact mode")
        return self.raw[b.start:b.stop]

    def upto(self, i: int) -> CF:
        """Raw entries B1, z1, ..., B_i (1-based), exact mode only."""
        if self.raw is None:
            raise FoldError("block contents need exact mode")
        return self.raw[:self.blocks[i - 1].stop]

    def zs(self) -> list[ZValue]:
        return [b.z_before for b in self.blocks[1:]]

    def check_structure(self) -> None:
        """Blocks and z entries tile raw exactly; each exact z is within bounds."""
        if self.raw is None:
            return
        pos = 0
        for j, b in enumerate(self.blocks):
            if j:
                z = b.z_before
                if self.raw[pos] != z.value:
                    raise FoldError(f"z_{j} does not sit at raw[{pos}]")
                lo, hi = z.bounds()
                if not lo <= z.value <= hi:
                    raise FoldError(f"z_{j} = {z.value} outside [{lo}, {hi}]")
                pos += 1
            if b.start != pos:
                raise FoldError(f"block {j + 1} starts at {b.start}, expected {pos}")
            if b.total != sum(self.raw[b.start:b.stop]):
                raise FoldError(f"block {j + 1} sum bookkeeping is off")
            pos = b.stop
        if pos != len(self.raw):
            raise FoldError("blocks do not cover the raw expansion")


def first_image(first_block: Sequence[int]) -> ImagePrefix:
    """Depth 1: B1 is the expansion of ?([A1]), with <B1> = 2^(S_A1 - 1)."""
    a1 = check_quotients(first_block)
    if not a1:
        raise FoldError("A1 must be non-empty")
    d = qm_of_cf(a1)
    raw = tuple(euclid(d.num, 1 << d.exp))
    if raw == (1,):
        raise FoldError("?([A1]) = 1 is [1], whose last quotient is 1; A1 = (1) is excluded")
    e = sum(a1) - 1
    b1 = Block(0, len(raw), total=sum(raw), sum_exp=e, cont_lo_exp=e, cont_hi_exp=e)
    return ImagePrefix("exact", a1, [b1], raw)


def _fold_input(prefix: ImagePrefix, s: int) -> FoldInput:
    return FoldInput(prefix.raw, (len(prefix.source) + 1) % 2, s)


def _bound_fields(prev: ImagePrefix, block_sum: int, empty: bool) -> dict:
    # <B_i> lies in [2^(sigma + S - 3), 2^(sigma + S)], sigma = sigma_{A_{i-1}},
    # and S_{B_i} <= <B_i>; an empty A_i gives S_{B_i} = sigma_{B_{i-1}}
    # <= 2^(sigma - 1)
    sigma = prev.source_sum
    return dict(cont_lo_exp=sigma + block_sum - 3, cont_hi_exp=sigma + block_sum,
                sum_exp=sigma - 1 if empty else sigma + block_sum)


def empty_block_image(prefix: ImagePrefix, s: int,
                      max_bits: int | None = DEFAULT_BIGINT_BITS) -> ImagePrefix:
    """Append tau = sigma + s and an empty block, by a single fold.

    z is exactly 2^(s+1)-1 and the new block is the reversed previous
    expansion with its leading entry adjusted for parity, so its sum is the
    previous expansion's total. When the fold rewrites the old last entry b
    into (b-1, 1), both entries stay with the previous block.
    """
    if prefix.raw is None:
        raise FoldError("exact prefix required")
    inp = _fold_input(prefix, s)
    folded = fold_step(inp, max_bits)
    zi = len(inp.head)
    raw = canonicalize(folded)
    blocks = [replace(b) for b in prefix.blocks]
    blocks[-1].stop = zi
    blocks[-1].total = sum(raw[blocks[-1].start:zi])
    new = Block(zi + 1, len(raw), total=sum(raw[zi + 1:]),
                z_before=ZValue(s, "exact", folded[zi]),
                **_bound_fields(prefix, 0, empty=True))
    tau = prefix.source_sum + s
    return ImagePrefix("exact", prefix.source + (tau,), blocks + [new], raw)


def append_block(prefix: ImagePrefix, s: int, block: Sequence[int],
                 max_bits: int | None = DEFAULT_BIGINT_BITS) -> ImagePrefix:
    """Append tau = sigma + s and block A (possibly empty), exact mode.

    For non-empty A the fold fixes everything before z. z and the new block
    are the expansion of the complete quotient of the image value after that
    shared head.
    """
    block = check_quotients(block)
    if not block:
        return empty_block_image(prefix, s, max_bits)
    if prefix.raw is None:
        raise FoldError("exact prefix required")
    inp = _fold_input(prefix, s)
    _materialize_z(s + 1, max_bits)  # z may reach 2^(s+2)-1
    head = inp.head
    tau = prefix.source_sum + s
    source = prefix.source + (tau,) + block
    rest = tail_after(qm_of_cf(source).to_fraction(), head)
    if rest < 1:
        raise FoldError("image left the folded cylinder")
    tail = canonicalize(tuple(euclid(rest.denominator, rest.numerator)))
    raw = head + tail
    zi = len(head)
    blocks = [replace(b) for b in prefix.blocks]
    blocks[-1].stop = zi
    blocks[-1].total = sum(raw[blocks[-1].start:zi])
    new = Block(zi + 1, len(raw), total=sum(tail[1:]),
                z_before=ZValue(s, "exact", tail[0]),
                **_bound_fields(prefix, sum(block), empty=False))
    return ImagePrefix("exact", source, blocks + [new], raw)


def _symbolic_next(prefix: ImagePrefix, s: int, block: CF) -> ImagePrefix:
    tau = prefix.source_sum + s
    empty = not block
    z = ZValue(s, "exact" if empty else "bounded")
    new = Block(z_before=z, **_bound_fields(prefix, sum(block), empty=empty))
    blocks = [replace(b) for b in prefix.blocks]
    for b in blocks:
        b.start = b.stop = None
    return ImagePrefix("symbolic", prefix.source + (tau,) + block, blocks + [new], None)


def image_prefix(spec, depth: int, mode: str = "exact",
                 max_bits: int | None = DEFAULT_BIGINT_BITS) -> ImagePrefix:
    """Image of [A1, tau1, ..., A_depth] for an object with .blocks and .slacks.

    Exact mode raises SymbolicOnly when a slack is past ``max_bits``; in
    symbolic mode block contents are dropped after B1 and only z forms and
    the exponent bounds survive.
    """
    blocks = [tuple(b) for b in spec.blocks]
    slacks = list(spec.slacks)
    if not 1 <= depth <= len(blocks):
        raise ValueError(f"depth {depth} outside 1..{len(blocks)}")
    if mode not in ("exact", "symbolic"):
        raise ValueError(f"unknown mode {mode!r}")
    out = first_image(blocks[0])
    if mode == "exact":
        for i in range(1, depth):
            if max_bits is not None and slacks[i - 1] + 2 > max_bits:
                raise SymbolicOnly(f"slack s_{i} needs more than {max_bits} bits")
        for i in range(1, depth):
            out = append_block(out, slacks[i - 1], blocks[i], max_bits)
        return out
    for i in range(1, depth):
        out = _symbolic_next(out, slacks[i - 1], blocks[i])
    return out


def max_exact_depth(spec, max_bits: int | None = DEFAULT_BIGINT_BITS) -> int:
    """Deepest prefix exact mode will accept."""
    depth = 1
    for s in spec.slacks[:len(spec.blocks) - 1]:
        if max_bits is not None and s + 2 > max_bits:
            break
        depth += 1
    return depth
