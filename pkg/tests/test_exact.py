from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabi2.errors import RingMismatchError, UsageError
from rabi2.exact import (
    EPOLY,
    GAUSSIAN,
    EPoly,
    GaussianRational,
    I,
    format_element,
    format_gaussian,
    is_zero,
    mul_by_i_power,
    parse_element,
    parse_gaussian,
    parse_rational,
    ring_add,
    ring_mul,
    ring_mul_scalar,
    scalar_div,
)

fractions = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 10**6)
gaussians = st.builds(GaussianRational, fractions, fractions)
epolys = st.lists(gaussians, max_size=5).map(EPoly)
elements = st.one_of(gaussians, epolys)


def _same_ring_triples():
    return st.one_of(st.tuples(gaussians, gaussians, gaussians),
                     st.tuples(epolys, epolys, epolys))


# ---- examples -----------------------------------------------------------

def test_gaussian_product_and_division():
    a = GaussianRational(Fraction(1, 2), 3)
    assert a * a == GaussianRational(Fraction(-35, 4), 3)
    assert (a / a) == 1
    assert I * I == -1


def test_epoly_product_cancels():
    e = EPoly.indeterminate()
    p = (e + EPoly([1])) * (e - EPoly([1]))
    assert p == EPoly([-1, 0, 1])
    assert (p - p).degree == -1 and not (p - p)


def test_i_power_examples():
    z = GaussianRational(2, 5)
    assert mul_by_i_power(z, 1) == GaussianRational(-5, 2)
    assert mul_by_i_power(z, 2) == -z
    assert mul_by_i_power(EPoly([1, 1]), 3) == EPoly([-I, -I])


def test_tiny_value_is_not_zero():
    x = GaussianRational(Fraction(1, 10**40))
    assert not is_zero(x)
    assert is_zero(x - x)


def test_mixed_ring_errors():
    with pytest.raises(RingMismatchError):
        ring_add(EPoly([1]), GaussianRational(1))
    with pytest.raises(RingMismatchError):
        ring_mul(GaussianRational(1), EPoly([1]))
    with pytest.raises(TypeError):
        EPoly([1]) + GaussianRational(1)
    with pytest.raises(RingMismatchError):
        GAUSSIAN.lift(EPoly([1]))


def test_rationals_embed_in_gaussians():
    assert ring_add(Fraction(1, 2), GaussianRational(0, 1)) == GaussianRational(Fraction(1, 2), 1)
    assert ring_mul(2, 3) == 6


def test_scalar_div_zero_and_bad_power():
    with pytest.raises(ZeroDivisionError):
        scalar_div(GaussianRational(1), 0)
    with pytest.raises(UsageError):
        mul_by_i_power(GaussianRational(1), -1)
    with pytest.raises(RingMismatchError):
        ring_mul_scalar(GaussianRational(1), EPoly([1]))


def test_ring_lift():
    assert EPOLY.lift(3) == EPoly([3])
    assert GAUSSIAN.lift(Fraction(1, 3)) == GaussianRational(Fraction(1, 3))
    assert EPOLY.zero.degree == -1 and EPOLY.one == EPoly([1])


def test_epoly_evaluate():
    p = EPoly([1, GaussianRational(0, 2), 3])
    assert p.evaluate(Fraction(1, 2)) == GaussianRational(Fraction(7, 4), 1)


@pytest.mark.parametrize("text, value", [
    ("1/2+3i", GaussianRational(Fraction(1, 2), 3)),
    ("-i", -I),
    ("2i", GaussianRational(0, 2)),
    ("-3/4i", GaussianRational(0, Fraction(-3, 4))),
    ("7", GaussianRational(7)),
    ("1-i", GaussianRational(1, -1)),
])
def test_parse_gaussian_examples(text, value):
    assert parse_gaussian(text) == value
    assert parse_gaussian(format_gaussian(value)) == value


@pytest.mark.parametrize("text", ["", "abc", "1/0", "i2", "1.5i", "1/2/3"])
def test_parse_gaussian_rejects(text):
    with pytest.raises(UsageError):
        parse_gaussian(text)


def test_parse_rational():
    assert parse_rational("7/10") == Fraction(7, 10)
    assert parse_rational("0.24") == Fraction(6, 25)
    assert parse_rational("-3") == -3
    for bad in ("0.1.2", "1/0", "x", "1e"):
        with pytest.raises(UsageError):
            parse_rational(bad)


# ---- properties ---------------------------------------------------------

@settings(max_examples=1000, deadline=None)
@given(_same_ring_triples())
def test_ring_axioms(abc):
    a, b, c = abc
    assert ring_add(a, b) == ring_add(b, a)
    assert ring_mul(a, b) == ring_mul(b, a)
    assert ring_add(ring_add(a, b), c) == ring_add(a, ring_add(b, c))
    assert ring_mul(ring_mul(a, b), c) == ring_mul(a, ring_mul(b, c))
    assert ring_mul(a, ring_add(b, c)) == ring_add(ring_mul(a, b), ring_mul(a, c))
    assert is_zero(a - a)


@settings(max_examples=300, deadline=None)
@given(elements)
def test_canonical_form_idempotent(x):
    again = parse_element(format_element(x))
    assert again == x
    assert format_element(again) == format_element(x)
    assert hash(again) == hash(x)


@settings(max_examples=300, deadline=None)
@given(elements, st.integers(0, 40))
def test_i_power_period_four(x, n):
    assert mul_by_i_power(x, n + 4) == mul_by_i_power(x, n)
    assert mul_by_i_power(mul_by_i_power(x, n), 4 - n % 4) == x


@settings(max_examples=300, deadline=None)
@given(elements, fractions.filter(bool))
def test_scalar_div_inverts_scalar_mul(x, s):
    assert scalar_div(ring_mul_scalar(x, s), s) == x


@settings(max_examples=200, deadline=None)
@given(gaussians, gaussians.filter(bool))
def test_gaussian_division(a, b):
    assert (a / b) * b == a
    assert complex(a / b) == pytest.approx(complex(a) / complex(b))


@settings(max_examples=200, deadline=None)
@given(gaussians)
def test_fraction_hash_consistency(z):
    if not z.im:
        assert hash(z) == hash(z.re) and z == z.re
