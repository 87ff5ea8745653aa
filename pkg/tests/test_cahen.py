import pytest

from qmfold.cahen import (
    cahen_cf,
    cahen_q,
    cahen_spec,
    cahen_truncation,
    growth_holds,
    stable_quotients,
    sylvester,
    verify_cf,
)
from qmfold.setm import certify_image_membership, certify_membership, expand_prefix


def test_sequences():
    assert [sylvester(i) for i in range(5)] == [2, 3, 7, 43, 1807]
    assert [cahen_q(i) for i in range(6)] == [1, 1, 2, 3, 14, 129]
    assert cahen_cf(6) == (1, 1, 1, 4, 9, 196, 16641)
    with pytest.raises(ValueError):
        sylvester(-1)


def test_spec_shape():
    cs = cahen_spec(6)
    assert cs.spec.blocks[0] == (1, 1, 1, 4, 9)
    assert cs.taus == [196, 16641]
    assert cs.sigmas == [16, 212]
    assert cs.taus[0] > 2 * 16 + 2
    assert expand_prefix(cs.spec) == cahen_cf(6)
    assert cs.ok
    with pytest.raises(ValueError):
        cahen_spec(3)


def test_membership_and_image():
    spec = cahen_spec(8).spec
    assert certify_membership(spec).status == "pass"
    assert certify_image_membership(spec).status == "pass"


def test_growth():
    assert all(growth_holds(n) for n in range(3, 13))


def test_truncation_and_stability():
    lo, hi = cahen_truncation(50)
    assert lo < hi and hi - lo <= 2 * 10**-50 * 10
    stable = stable_quotients(lo, hi)
    assert stable == cahen_cf(len(stable) - 1)
    exp, stab, ok = verify_cf(6)
    assert ok and stab[:7] == exp
    # asking for more quotients than 200 digits pin down is reported, not guessed
    assert not verify_cf(12)[2]
