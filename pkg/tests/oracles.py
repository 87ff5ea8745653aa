"""Reference implementations that share no code with the package."""

from fractions import Fraction


def mediant_qm(x: Fraction) -> Fraction:
    """?(x) by descending the Stern-Brocot tree.

    Each mediant of two neighbours gets the average of their ?-values.
    """
    x = Fraction(x)
    ln, ld, lv = 0, 1, Fraction(0)
    rn, rd, rv = 1, 1, Fraction(1)
    if x == 0:
        return lv
    if x == 1:
        return rv
    while True:
        mn, md = ln + rn, ld + rd
        mv = (lv + rv) / 2
        m = Fraction(mn, md)
        if m == x:
            return mv
        if x < m:
            rn, rd, rv = mn, md, mv
        else:
            ln, ld, lv = mn, md, mv


def nested_value(a) -> Fraction:
    """[a1..ak] evaluated from the inside out."""
    v = Fraction(0)
    for x in reversed(a):
        v = 1 / (x + v)
    return v


def slow_cf(x: Fraction) -> tuple:
    """Expansion by repeated reciprocals."""
    x = Fraction(x)
    out = []
    while x:
        r = 1 / x
        a = r.numerator // r.denominator
        out.append(a)
        x = r - a
    return tuple(out)


def rationals(max_q: int):
    for q in range(1, max_q + 1):
        for p in range(q + 1):
            if p == 0 and q > 1:
                continue
            x = Fraction(p, q)
            if x.denominator == q:
                yield x
