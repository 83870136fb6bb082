from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filtered_ainfty.novikov import (
    INF,
    GapMonoid,
    GroundRing,
    Novikov,
    NovikovError,
    is_gapped,
    parse,
    render,
)

Q, Z2, Z = GroundRing.Q, GroundRing.Z2, GroundRing.Z


def N(terms, cutoff=INF, ring=Q):
    return Novikov([(F(e), c) for e, c in terms], cutoff, ring)


def test_add_cancels():
    assert N([(0, 1), (1, 1)]) + N([(0, -1), (2, 1)]) == N([(1, 1), (2, 1)])


def test_add_zero_identity():
    x = N([(F(1, 3), 2), (1, -1)])
    assert x + Novikov.zero() == x


def test_char_two():
    h = N([(F(1, 2), 1)], ring=Z2)
    assert (h + h).is_zero()


def test_mul_examples():
    assert N([(0, 1), (1, 1)]) * N([(0, 1), (1, -1)]) == N([(0, 1), (2, -1)])
    assert N([(F(1, 3), 1)]) * N([(F(2, 3), 1)]) == N([(1, 1)])


def test_valuation_examples():
    assert N([(F(1, 2), 1), (1, 2)]).valuation() == F(1, 2)
    assert Novikov.zero().valuation() == INF
    assert N([(0, 3), (1, 1)]).valuation() == 0


def test_invert_geometric():
    a = N([(0, 1), (1, 1)], cutoff=3)
    assert a.invert() == N([(0, 1), (1, -1), (2, 1)], cutoff=3)
    assert N([(F(1, 2), 1)]).invert() == N([(F(-1, 2), 1)])


def test_invert_errors():
    with pytest.raises(ZeroDivisionError):
        Novikov.zero(5).invert()
    with pytest.raises(NovikovError):
        N([(0, 1)], 5, Z).invert()


def test_ring_mismatch():
    with pytest.raises(NovikovError):
        N([(0, 1)], ring=Q) + N([(0, 1)], ring=Z2)


def test_cutoff_is_min():
    assert (N([(0, 1)], 3) + N([(0, 1)], 5)).cutoff == 3


def test_gapped_examples():
    assert is_gapped(N([(0, 1), (1, 1), (2, 1)]), GapMonoid([1]))
    assert not is_gapped(N([(F(1, 2), 1)]), GapMonoid([1]))
    assert is_gapped(N([(5, 1)]), GapMonoid([2, 3]))
    assert not GapMonoid([2, 3]).contains(1)


def test_render_parse_examples():
    x = N([(F(1, 3), F(-3, 2)), (2, 7)])
    assert render(x) == "-3/2*T^(1/3) + 7*T^(2)"
    assert parse(render(x)) == x
    assert render(Novikov.zero()) == "0"


# properties

exps = st.fractions(min_value=0, max_value=6, max_denominator=6)


def scalars(ring=Q, cutoff=F(5)):
    coeff = st.integers(-4, 4) if ring is not Q else st.fractions(min_value=-3, max_value=3, max_denominator=4)
    return st.lists(st.tuples(exps, coeff), max_size=5).map(lambda t: Novikov(t, cutoff, ring))


@settings(max_examples=150, deadline=None)
@given(scalars(), scalars(), scalars())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a


@settings(max_examples=150, deadline=None)
@given(scalars(), scalars())
def test_valuation_additive_over_field(a, b):
    p = a * b
    if p.is_zero():
        # only possible when the true product lives at or above the cutoff
        assert a.is_zero() or b.is_zero() or a.valuation() + b.valuation() >= p.cutoff
    else:
        assert p.valuation() == a.valuation() + b.valuation()


@settings(max_examples=100, deadline=None)
@given(scalars(Z2))
def test_inverse_over_z2(a):
    if a.is_zero():
        return
    inv = a.invert()
    assert (a * inv).same_mod(Novikov.one(a.cutoff, Z2))


@settings(max_examples=100, deadline=None)
@given(scalars(), scalars(), st.fractions(min_value=0, max_value=5, max_denominator=6))
def test_truncation_is_homomorphism(a, b, e):
    lhs = (a * b).truncate(e)
    rhs = (a.truncate(e) * b.truncate(e)).truncate(e)
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(scalars())
def test_render_roundtrip(a):
    assert render(parse(render(a), a.cutoff)) == render(a)


@settings(max_examples=100, deadline=None)
@given(scalars(), scalars())
def test_plus_times_zero_quotient(a, b):
    # Lambda_0 / Lambda_+ is the ground ring: constant terms multiply
    assert (a * b).constant_term() == a.constant_term() * b.constant_term()
