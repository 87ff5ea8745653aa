from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qmfold.cf import cf_to_rational
from qmfold.deriv import (
    EndpointCapped,
    chain_factor_table,
    chain_split,
    cylinder_interval,
    fn_difference_quotient,
    log2_fraction,
    qm_cylinder_log_ratio,
)
from qmfold.minkowski import qm_of_rational
from qmfold.setm import MSpec, block_boundaries, expand_prefix

quotients = st.lists(st.integers(1, 12), min_size=1, max_size=8).map(tuple)


@pytest.mark.parametrize("prefix, lo, hi, width", [
    ((2,), Fraction(1, 3), Fraction(1, 2), Fraction(1, 6)),
    ((2, 10), Fraction(10, 21), Fraction(11, 23), Fraction(1, 483)),
    ((1,), Fraction(1, 2), Fraction(1), Fraction(1, 2)),
])
def test_cylinders(prefix, lo, hi, width):
    c = cylinder_interval(prefix)
    assert (c.lo, c.hi, c.width) == (lo, hi, width)


def test_log_ratio_examples():
    assert qm_cylinder_log_ratio((2,)).value == Fraction(3, 2)
    assert abs(float(qm_cylinder_log_ratio((2, 10)).log2().lo) + 3.084) < 1e-3
    assert qm_cylinder_log_ratio((1,)).log2() == qm_cylinder_log_ratio((1,)).log2().point(0)
    with pytest.raises(ValueError):
        cylinder_interval(())


def test_difference_quotients():
    assert fn_difference_quotient((2, 2), 1) == Fraction(35, 16)
    assert fn_difference_quotient((2, 10), 1) == Fraction(483, 4096)
    with pytest.raises(EndpointCapped):
        fn_difference_quotient((2, 30), 3, work_cap=64)


@given(quotients)
def test_cylinder_properties(prefix):
    c = cylinder_interval(prefix)
    assert c.hi - c.lo == c.width
    inside = cf_to_rational(prefix + (1, 1, 2))
    assert c.lo < inside < c.hi
    img = qm_of_rational(c.hi).to_fraction() - qm_of_rational(c.lo).to_fraction()
    assert img == Fraction(1, 2 ** sum(prefix))
    assert fn_difference_quotient(prefix, 1) == qm_cylinder_log_ratio(prefix).value


def test_chain_split():
    spec = MSpec(((2,), (1,)), (8,))
    cs = chain_split(expand_prefix(spec))
    assert cs.q2 == cs.inner * cs.outer
    assert log2_fraction(cs.q2).hi <= cs.outer_log2.hi


def test_table_levels():
    spec = MSpec(((2,), (1,), (1,)), (8, 19))
    rows = chain_factor_table(spec, 2)
    level0 = [r for r in rows if r.level == 0]
    assert [r.t for r in level0] == block_boundaries(spec)
    for r in rows:
        assert r.exact and r.log2_image_width.lo == -r.S_t
    level1 = [r for r in rows if r.level == 1]
    assert level1[1].S_t == 2 + 1023 + 2
    q = [r.log2_quotient.hi for r in level0]
    assert q[0] > q[1] > q[2]


def test_table_bound_rows():
    spec = MSpec(((2,), (1,), ()), (8, 5000))
    rows = chain_factor_table(spec, 2, max_bits=4096)
    bound = [r for r in rows if not r.exact]
    assert len(bound) == 1 and bound[0].level == 1 and bound[0].block == 3
    assert bound[0].log2_quotient_upper is None  # 2^5001 is never materialized
    assert chain_factor_table(spec, 1) == [r for r in rows if r.level == 0]
    # s = 49 is one bit too wide for exact folding at 50 bits, yet 2^50 fits
    spec = MSpec(((2,), (1,), ()), (8, 49))
    row = [r for r in chain_factor_table(spec, 2, max_bits=50) if not r.exact][0]
    sigma = spec.sigmas()[2]
    assert row.S_bounds == (2**50 - 1, None)
    assert row.log2_quotient_upper == 2 * (sigma - 1) + 1 - (2**50 - 1)
