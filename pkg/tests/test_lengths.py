from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homocycle.lengths import ExactLength, combine

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
lengths = st.builds(ExactLength, fractions, fractions, fractions, fractions)


def test_parse_forms():
    assert ExactLength.parse("0.1") == ExactLength(Fraction(1, 10))
    assert ExactLength.parse(0.1) == ExactLength(Fraction(1, 10))
    assert ExactLength.parse({"q1": 1}) == ExactLength(0, 1)
    with pytest.raises(ValueError):
        ExactLength.parse({"q9": 1})


def test_sign_of_near_cancellation():
    # convergents of sqrt2: 1393/985 lies just below, 3363/2378 just above
    below = ExactLength(Fraction(1393, 985)) - ExactLength(0, 1)
    above = ExactLength(Fraction(3363, 2378)) - ExactLength(0, 1)
    assert below.sign() == -1 and above.sign() == 1
    far = ExactLength(Fraction(10**40 + 1, 10**40)) - ExactLength(1)
    assert far.sign() == 1
    assert ExactLength(0).sign() == 0


def test_ordering():
    assert ExactLength(0, 1) < ExactLength(Fraction(3, 2))
    assert ExactLength(1) < 2
    assert sorted([ExactLength(2), ExactLength(0, 1), ExactLength(1)]) == [
        ExactLength(1), ExactLength(0, 1), ExactLength(2)]


@given(lengths, lengths)
def test_arithmetic_matches_float(a, b):
    assert abs(float(a + b) - (float(a) + float(b))) < 1e-9
    assert (a - a).sign() == 0
    assert ((a - b).sign() > 0) == (b < a)


@given(lengths)
def test_json_round_trip(a):
    assert ExactLength.parse(a.to_json()) == a


def test_commensurable_ratio():
    assert ExactLength(2, 4).ratio_if_commensurable(ExactLength(1, 2)) == 2
    assert ExactLength(1).ratio_if_commensurable(ExactLength(0, 1)) is None


def test_combine():
    assert combine([2, 1], [ExactLength(1), ExactLength(0, 1)]) == ExactLength(2, 1)
