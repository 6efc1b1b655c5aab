import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from driftcert._numerics import (
    column_sum,
    compensated_cumsum,
    compensated_suffix_sum,
    geometric_partial_sum,
    log_log_slope,
)
from driftcert.errors import SpecParseError
from driftcert.expr import Expr
from driftcert.tails import ConstantTail, PowerLawTail, tail_from_dict

floats = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(st.lists(floats, min_size=3, max_size=3), min_size=1, max_size=8))
def test_column_sum_matches_fsum(cols):
    arr = np.array(cols)
    got = column_sum(list(arr))
    for k in range(3):
        assert got[k] == pytest.approx(math.fsum(arr[:, k]), abs=1e-9)


def test_compensated_cumsum_beats_naive():
    x = np.array([1.0] + [1e-16] * 100_000)
    assert compensated_cumsum(x)[-1] == pytest.approx(1 + 1e-11, abs=1e-15)
    assert np.cumsum(x)[-1] == 1.0


@given(st.lists(floats, min_size=1, max_size=50), st.floats(-10, 10))
def test_suffix_sum(xs, start):
    out = compensated_suffix_sum(np.array(xs), start)
    for i in range(len(xs)):
        assert out[i] == pytest.approx(math.fsum(xs[i:] + [start]), abs=1e-8)


@given(st.integers(1, 50), st.floats(0, 0.999999999))
def test_geometric_partial_sum(n, z):
    exact = mpmath.fsum(mpmath.mpf(z) ** k for k in range(n))
    assert geometric_partial_sum(n, z) == pytest.approx(float(exact), rel=1e-12)


def test_log_log_slope():
    i = np.arange(10, 1000)
    assert log_log_slope(i, 3 * i**-1.5) == pytest.approx(-1.5)
    assert math.isnan(log_log_slope([1, 2], [1, 1]))


@pytest.mark.parametrize(
    "text,i,value",
    [
        ("1/2 + 1/(2*(i+1))", 3, 0.625),
        ("i^2 - 1", 4, 15.0),
        ("-i**-0.5", 4, -0.5),
        ("c*i", 2, 1.0),
    ],
)
def test_expr_values(text, i, value):
    assert Expr(text, {"c": 0.5})(i) == value


def test_expr_vectorized_and_constant_broadcast():
    e = Expr("1/3")
    i = np.arange(5.0)
    assert e(i).shape == (5,)
    assert not e.depends_on_i
    assert Expr("i/2")(i).tolist() == [0, 0.5, 1, 1.5, 2]


def test_expr_division_by_zero_is_nan():
    assert math.isnan(Expr("1/i")(0))


@pytest.mark.parametrize("text", ["__import__('os')", "i.real", "[i]", "i if i else 1", "x + 1", "'a'", "True"])
def test_expr_rejects(text):
    with pytest.raises(SpecParseError):
        Expr(text)


@given(st.sampled_from(["1/2+1/(2*(i+1))", "i^(-3/4)/9", "1 - 31/36*i**-0.75", "(i+1)/(i+2)"]))
def test_expr_source_is_stable(text):
    e = Expr(text)
    assert Expr(e.source) == e
    assert Expr(e.source).source == e.source


def test_powerlaw_tail():
    t = PowerLawTail("1/36", "3/4")
    assert t.C == Fraction(1, 36) and t.square_summable
    assert not PowerLawTail(1, "1/2").square_summable
    assert t.center(16) == pytest.approx(1 / 288)
    assert tail_from_dict(t.to_dict()) == t
    assert not PowerLawTail(1, "3/4", D=10).positive_beyond(5)
    with pytest.raises(ValueError):
        PowerLawTail(0, "3/4")


def test_constant_tail_roundtrip():
    t = ConstantTail(0.0, 2.0, 1.0, 3)
    assert tail_from_dict(t.to_dict()) == t
