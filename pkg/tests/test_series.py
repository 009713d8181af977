"""Truncated Laurent series and their termwise higher derivatives.

theta on a monomial c*t^a at order n is binom(a, n) c t^(a-n); every theta
identity here is checked against that termwise oracle computed with
math.comb (negative exponents via the integer reflection formula).
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from idgal.charp import PrimeField
from idgal.errors import PrecisionError
from idgal.series import (
    INF,
    LaurentSeries,
    MonomialRing,
    coordinates_in_basis,
    frobenius_power,
    p_power_root,
    parse_series,
    serialize_series,
    series_equal,
    series_from_json,
    series_to_json,
    theta_multi,
    theta_series,
)

K2 = PrimeField(2)
K3 = PrimeField(3)


def binom_int(a: int, n: int) -> int:
    if n < 0:
        return 0
    if a >= 0:
        return math.comb(a, n)
    return (-1) ** n * math.comb(-a + n - 1, n)


def oracle_theta(x: LaurentSeries, n: int) -> LaurentSeries:
    K = x.field
    out = {}
    for a, c in x.coeffs.items():
        v = binom_int(a, n) * c % K.p
        if v:
            out[a - n] = v
    prec = x.prec if x.prec == INF else x.prec - n
    return LaurentSeries(K, out, prec=prec)


series_strategy = st.builds(
    lambda terms, prec: LaurentSeries(
        K3,
        {e: c for e, c in terms},
        prec=prec if prec is not None else INF,
    ),
    st.lists(st.tuples(st.integers(-10, 20), st.integers(1, 2)), max_size=6),
    st.one_of(st.none(), st.integers(21, 40)),
)


def test_constructor_reduces_mod_p_and_drops_zeros():
    x = LaurentSeries(K3, {0: 3, 1: 4, 2: -1})
    assert x.coeffs == {1: 1, 2: 2}


def test_add_mul_match_manual():
    x = parse_series(K3, "1*t^-1 + 2*t^2")
    y = parse_series(K3, "2*t^-1 + 1*t^0")
    assert (x + y).coeffs == {0: 1, 2: 2}
    # (t^-1 + 2t^2)(2t^-1 + 1) = 2t^-2 + t^-1 + 4t + 2t^2
    assert (x * y).coeffs == {-2: 2, -1: 1, 1: 1, 2: 2}


def test_precision_tracks_through_product():
    x = LaurentSeries(K3, {0: 1, 5: 1}, prec=10)
    y = LaurentSeries(K3, {-2: 1}, prec=INF)
    z = x * y
    assert z.prec == 8
    assert z.coeffs == {-2: 1, 3: 1}


def test_inverse_times_self_is_one():
    x = parse_series(K3, "1*t^-2 + 1*t^0 + 2*t^3")
    xi = x.inverse(prec=12)
    prod = x * xi
    one = LaurentSeries.one(K3)
    assert series_equal(prod, one).equal
    with pytest.raises(ZeroDivisionError):
        LaurentSeries.zero(K3).inverse(prec=4)
    with pytest.raises(PrecisionError):
        LaurentSeries(K3, {}, prec=6).inverse(prec=4)
    with pytest.raises(ValueError):
        parse_series(K3, "1*t^0 + 1*t^1").inverse()


@given(series_strategy, st.integers(0, 8))
@settings(max_examples=150, deadline=None)
def test_theta_matches_termwise_oracle(x, n):
    assert theta_series(x, n) == oracle_theta(x, n)


@given(series_strategy, series_strategy, st.integers(1, 6))
@settings(max_examples=100, deadline=None)
def test_theta_product_rule(x, y, n):
    # theta^(n)(xy) = sum_{i+j=n} theta^(i)(x) theta^(j)(y)
    lhs = theta_series(x * y, n)
    rhs = LaurentSeries.zero(K3)
    for i in range(n + 1):
        rhs = rhs + theta_series(x, i) * theta_series(y, n - i)
    assert series_equal(lhs, rhs).equal


@given(series_strategy, st.integers(0, 5), st.integers(0, 5))
@settings(max_examples=100, deadline=None)
def test_theta_iteration_rule(x, i, j):
    # theta^(i) theta^(j) = binom(i+j, i) theta^(i+j)
    lhs = theta_series(theta_series(x, j), i)
    rhs = theta_series(x, i + j).scale(math.comb(i + j, i) % 3)
    assert series_equal(lhs, rhs).equal


def test_series_equal_reports_first_mismatch():
    x = parse_series(K2, "1*t^0 + 1*t^3 + 1*t^5")
    y = parse_series(K2, "1*t^0 + 1*t^4 + 1*t^5")
    rep = series_equal(x, y)
    assert not rep.equal
    assert rep.first_mismatch == 3


def test_series_equal_windows_intersect():
    x = LaurentSeries(K2, {0: 1}, prec=6)
    y = LaurentSeries(K2, {0: 1, 8: 1}, prec=12)
    rep = series_equal(x, y)
    assert rep.equal
    assert rep.window()[1] == 6


def test_frobenius_power_and_root_are_inverse():
    x = parse_series(K2, "1*t^1 + 1*t^3", prec=16)
    xq = frobenius_power(x, 2, 2)
    assert xq.coeffs == {4: 1, 12: 1}
    back = p_power_root(xq, 2, 2)
    assert series_equal(back, x).equal


def test_p_power_root_rejects_non_powers():
    x = parse_series(K2, "1*t^1 + 1*t^2")
    with pytest.raises(ValueError):
        p_power_root(x, 1, 2)


def test_p_power_root_of_sparse_square():
    # (t + t^3 + t^4)^2 over F_2 has only even exponents; the root recovers it
    x = parse_series(K2, "1*t^1 + 1*t^3 + 1*t^4")
    sq = x * x
    assert p_power_root(sq, 1, 2) == x


def test_parse_serialize_roundtrip():
    for text in ["1*t^-2 + 2*t^3", "0", "1*t^0"]:
        x = parse_series(K3, text)
        assert parse_series(K3, serialize_series(x)) == x
    x = LaurentSeries(K3, {-1: 2, 4: 1}, prec=9)
    assert series_from_json(K3, series_to_json(x)) == x


def test_coordinates_in_basis_simple():
    K = K2
    one = LaurentSeries.one(K)
    r = parse_series(K, "1*t^1 + 1*t^11 + 1*t^91", prec=200)
    x = r.shift(2) + one
    res = coordinates_in_basis(x, [one, r], -16, 17)
    assert res is not None
    assert res.coords[0] == one
    assert res.coords[1] == LaurentSeries.monomial(K, 1, 2)


def test_coordinates_in_basis_none_when_outside_span():
    K = K2
    one = LaurentSeries.one(K)
    r = parse_series(K, "1*t^1 + 1*t^11 + 1*t^91", prec=200)
    # t^50 cannot be written with window [-16, 17) coefficients over {1, r}
    x = LaurentSeries.monomial(K, 1, 50, prec=200)
    assert coordinates_in_basis(x, [one, r], -16, 17) is None


def test_coordinates_stacked_orders_agree_with_plain_solve():
    # derivative rows are Vandermonde multiples of shifted base rows, so the
    # stacked system must reproduce the plain verdict; mismatches would flag
    # an incoherence between theta_series and the row assembly
    K = K2
    one = LaurentSeries.one(K)
    r = parse_series(K, "1*t^1 + 1*t^11 + 1*t^91", prec=128)
    w = parse_series(K, "1*t^20", prec=64)
    plain = coordinates_in_basis(w, [one, r], -16, 17)
    stacked = coordinates_in_basis(w, [one, r], -16, 17, orders=(1, 2, 4, 8, 16))
    assert plain is not None and stacked is not None
    assert plain.coords == stacked.coords
    # the relation is a truncated identity on the reported window
    lo, hi = plain.window
    combo = plain.coords[0] * one + plain.coords[1] * r
    assert series_equal(w, combo.truncate(hi)).equal
    # and the far tail (t^100 from t^9 * t^91) lies beyond that window
    assert max(combo.coeffs) >= hi


@given(st.lists(series_strategy, min_size=1, max_size=2), series_strategy)
@settings(max_examples=60, deadline=None)
def test_coordinates_stacked_never_flips_verdict(basis, x):
    try:
        plain = coordinates_in_basis(x, basis, -4, 5)
        stacked = coordinates_in_basis(x, basis, -4, 5, orders=(1, 3, 9))
    except PrecisionError:
        return
    assert (plain is None) == (stacked is None)


def test_coordinates_in_basis_raises_on_empty_window():
    K = K2
    one = LaurentSeries.one(K)
    x = LaurentSeries(K, {}, prec=-20)
    with pytest.raises(PrecisionError):
        coordinates_in_basis(x, [one], -16, 17)
    with pytest.raises(ValueError):
        coordinates_in_basis(one, [one], 5, 5)


def test_multivariate_theta_product_rule():
    ring = MonomialRing(K3, ("u", "v"))
    x = ring.poly({(1, 0): 1, (0, 2): 2})
    y = ring.poly({(1, 1): 1})
    k = (1, 1)
    lhs = theta_multi(x * y, k)
    rhs = ring.zero()
    for i0 in range(k[0] + 1):
        for i1 in range(k[1] + 1):
            rhs = rhs + theta_multi(x, (i0, i1)) * theta_multi(y, (k[0] - i0, k[1] - i1))
    assert lhs == rhs
