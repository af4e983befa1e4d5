import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rqmc.digits import (
    BaseExpansion,
    DigitVector,
    default_depth,
    digits_to_value,
    expand_integer,
    radical_inverse,
    value_to_digits,
)


def test_radical_inverse_trivial_cases():
    assert radical_inverse(0, 2, 8) == 0.0
    assert radical_inverse(1, 2, 8) == 0.5
    assert radical_inverse(5, 2, 8) == 0.625  # 101 reversed -> .101


def test_radical_inverse_digit_overflow():
    with pytest.raises(ValueError, match="digit overflow"):
        radical_inverse(256, 2, 8)
    radical_inverse(255, 2, 8)  # largest value that fits


@pytest.mark.parametrize("base,depth", [(2, 4), (3, 3), (5, 2)])
def test_radical_inverse_injective_and_complete(base, depth):
    vals = sorted(radical_inverse(n, base, depth) for n in range(base**depth))
    expected = [j * base**-depth for j in range(base**depth)]
    assert len(set(vals)) == base**depth
    np.testing.assert_allclose(vals, expected, atol=1e-15)


def test_expand_integer_examples():
    e = expand_integer(13, 2)
    assert e.coefficients == (1, 0, 1, 1) and e.order == 3
    e = expand_integer(13, 3)
    assert e.coefficients == (1, 1, 1) and e.order == 2
    e = expand_integer(8, 2)
    assert e.coefficients == (0, 0, 0, 1) and e.order == 3


def test_expand_integer_rejects_zero():
    with pytest.raises(ValueError, match="empty expansion"):
        expand_integer(0, 2)


@pytest.mark.parametrize("base", [2, 3, 5, 7])
def test_expand_reconstruct_identity_exhaustive(base):
    # vectorized equivalent of the scalar expansion, all n <= 10**6
    n = np.arange(1, 10**6 + 1, dtype=np.int64)
    width = int(math.log(10**6) / math.log(base)) + 2
    rebuilt = np.zeros_like(n)
    rem = n.copy()
    for m in range(width):
        rebuilt += (rem % base) * base**m
        rem //= base
    assert np.array_equal(rebuilt, n)


@given(st.integers(min_value=1, max_value=10**9), st.sampled_from([2, 3, 5, 7, 10]))
def test_expand_integer_roundtrip(n, base):
    assert expand_integer(n, base).value() == n


def test_digits_to_value_examples():
    assert digits_to_value(DigitVector(2, (1, 1))) == 0.75
    assert value_to_digits(0.625, 2, 3).digits == (1, 0, 1)


def test_value_roundtrip_third_base3():
    # floor(fl(1/3) * 3**5) evaluates to 81 in double precision
    dv = value_to_digits(1 / 3, 3, 5)
    assert dv.digits == (1, 0, 0, 0, 0)
    assert digits_to_value(dv) == 81 / 243


@given(st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
       st.sampled_from([2, 3, 5]), st.integers(min_value=1, max_value=16))
def test_value_roundtrip_contract(x, base, depth):
    got = digits_to_value(value_to_digits(x, base, depth))
    expected = int(x * base**depth)
    expected = min(expected, base**depth - 1)
    assert got == pytest.approx(expected / base**depth, abs=1e-15)


@given(st.integers(min_value=2, max_value=5), st.data())
def test_digits_to_value_monotone_lexicographic(base, data):
    depth = data.draw(st.integers(min_value=1, max_value=10))
    digs = st.tuples(*[st.integers(0, base - 1)] * depth)
    d1, d2 = data.draw(digs), data.draw(digs)
    v1 = digits_to_value(DigitVector(base, d1))
    v2 = digits_to_value(DigitVector(base, d2))
    if d1 < d2:
        assert v1 < v2
    elif d1 == d2:
        assert v1 == v2
    else:
        assert v1 > v2


def test_digit_vector_validation():
    with pytest.raises(ValueError):
        DigitVector(2, (2,))
    with pytest.raises(ValueError):
        DigitVector(2, ())
    with pytest.raises(ValueError):
        BaseExpansion(2, (1, 0))  # leading zero
    with pytest.raises(ValueError):
        value_to_digits(1.0, 2, 4)


def test_default_depth():
    assert default_depth(2) == 32
    assert default_depth(3) == 21
    assert default_depth(5) == 14
    assert default_depth(7) == 12
