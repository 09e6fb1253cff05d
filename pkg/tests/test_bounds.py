from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grrforge import bounds, census
from grrforge.acceptance import EXPECTED_THRESHOLDS

TWO_TERM = [(r.family, r.n) for r in census.ledger_rows() if len(r.displayed_terms) == 2]


@pytest.mark.parametrize("family,n,q,value", [
    ("PSL", 4, 8, Fraction(3, 8)),
    ("PSp", 6, 64, Fraction(7, 64)),
    ("OmegaPlus", 8, 16, Fraction(21, 512)),
    ("PSL", 6, 64, Fraction(-1310723, 4194304)),
])
def test_displayed_bound_examples(family, n, q, value):
    assert bounds.displayed_lower(family, n, q) == value


def test_probability_bound_record():
    b = bounds.probability_bound("PSL", 4, 8)
    assert b.displayed == Fraction(3, 8) and b.positive
    assert b.master >= b.displayed
    assert b.as_dict()["displayed"] == "3/8"


@pytest.mark.parametrize("key,expected", sorted(EXPECTED_THRESHOLDS.items()))
def test_thresholds(key, expected):
    t = bounds.threshold(*key)
    assert t.computed_min_q == expected == t.stated_min_q
    assert t.match and t.decreasing_terms
    assert bounds.displayed_lower(*key, expected) > 0
    if expected > 2:
        assert bounds.displayed_lower(*key, expected // 2) <= 0


def test_thresholds_csv():
    lines = bounds.thresholds_csv().splitlines()
    assert lines[0] == "family,n,paper_minQ,computed_minQ,match"
    assert len(lines) == 12
    assert all(line.endswith(",true") for line in lines[1:])
    assert "PSL,4,8,8,true" in lines


@pytest.mark.parametrize("family,n", TWO_TERM)
def test_master_terms_equal_displayed_terms(family, n):
    for f in range(1, 21):
        q = 2**f
        assert bounds.master_terms(family, n, q) == bounds.displayed_terms(family, n, q)
        assert bounds.terms_agree(family, n, q)


def test_single_term_row_is_dominated():
    for f in range(2, 21):
        q = 2**f
        assert bounds.master_lower("PSL", 4, q) >= 1 - Fraction(5, q)
        assert bounds.terms_agree("PSL", 4, q)


@pytest.mark.parametrize("key,f", [
    (("PSL", 4), 13), (("PSL", 6), 17), (("PSL", 8), 4), (("PSp", 6), 16), (("PSp", 8), 9),
    (("OmegaPlus", 8), 9), (("OmegaPlus", 10), 10), (("OmegaPlus", 12), 4),
    (("OmegaMinus", 8), 6), (("OmegaMinus", 10), 5), (("OmegaMinus", 12), 3),
])
def test_limit_witnesses(key, f):
    assert bounds.limit_witness(*key) == f
    assert bounds.displayed_lower(*key, 2**f) > 1 - bounds.LIMIT_EPS
    assert bounds.displayed_lower(*key, 2 ** (f - 1)) <= 1 - bounds.LIMIT_EPS
    assert bounds.monotone_above_threshold(*key)


@given(st.sampled_from(census.ROWS), st.integers(1, 64))
def test_bound_is_positive_exactly_from_threshold(key, f):
    q = 2**f
    positive = bounds.displayed_lower(*key, q) > 0
    assert positive == (q >= EXPECTED_THRESHOLDS[key])
    assert bounds.displayed_lower(*key, q) < 1


@given(st.sampled_from(census.ROWS), st.integers(1, 40))
def test_bound_increases_with_q(key, f):
    assert bounds.displayed_lower(*key, 2**f) < bounds.displayed_lower(*key, 2 ** (f + 1))
