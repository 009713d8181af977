"""Prime-field scalars, base-p digits, and binomial arithmetic.

The Lucas-based binomials are checked against the factorial definition
(math.comb) and against the Vandermonde convolution computed directly; the
digit-stream variants are checked against integer truncations.
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from idgal.charp import (
    PAdicDigits,
    PrimeField,
    digit_shift,
    int_digits,
    lucas_binom,
    mi_box,
    mi_splits,
    multi_binom,
    multi_lucas,
    num_digits,
    padic_combination,
    truncation,
)
from idgal.errors import PrecisionError

PRIMES = [2, 3, 5]


@pytest.mark.parametrize("p", PRIMES)
def test_lucas_matches_factorial_oracle(p):
    K = PrimeField(p)
    for a in range(0, 201):
        for n in range(0, a + 1):
            assert lucas_binom(K, a, n) == math.comb(a, n) % p, (a, n)


@pytest.mark.parametrize("p", PRIMES)
def test_lucas_vanishes_above_diagonal(p):
    K = PrimeField(p)
    for a in range(0, 60):
        for n in range(a + 1, a + 12):
            assert lucas_binom(K, a, n) == 0


@pytest.mark.parametrize("p", [2, 3])
def test_lucas_negative_upper_index(p):
    # binom(-a, n) = (-1)^n binom(a+n-1, n) over the integers
    K = PrimeField(p)
    for a in range(1, 40):
        for n in range(0, 25):
            want = ((-1) ** n * math.comb(a + n - 1, n)) % p
            assert lucas_binom(K, -a, n) == want, (-a, n)


@pytest.mark.parametrize("p", PRIMES)
def test_vandermonde_convolution(p):
    # binom(a+b, n) = sum_k binom(a, k) binom(b, n-k), all mod p
    K = PrimeField(p)
    for a in range(-50, 51, 7):
        for b in range(-50, 51, 11):
            for n in range(0, 31, 3):
                lhs = lucas_binom(K, a + b, n)
                rhs = sum(
                    lucas_binom(K, a, k) * lucas_binom(K, b, n - k) for k in range(n + 1)
                ) % p
                assert lhs == rhs, (a, b, n)


@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=0, max_value=10**4))
@settings(max_examples=200, deadline=None)
def test_lucas_digit_product_p3(a, n):
    # Lucas' theorem restated: the binomial mod p is the product of digitwise
    # binomials, each computable by math.comb on digits < p
    K = PrimeField(3)
    want = 1
    x, y = a, n
    while y > 0 or x > 0:
        want = want * math.comb(x % 3, y % 3) % 3
        x //= 3
        y //= 3
    assert lucas_binom(K, a, n) == want


@pytest.mark.parametrize("p", PRIMES)
def test_int_digits_roundtrip(p):
    for value in [0, 1, p - 1, p, p + 1, 17, p**3, p**4 - 1, 12345]:
        digits = int_digits(p, value, 10)
        assert sum(d * p**i for i, d in enumerate(digits)) == value % p**10
        assert all(0 <= d < p for d in digits)


def test_num_digits():
    assert num_digits(2, 0) == 0
    assert num_digits(2, 1) == 1
    assert num_digits(2, 8) == 4
    assert num_digits(3, 8) == 2
    assert num_digits(3, 9) == 3


def test_padic_digits_truncation_oracle():
    K = PrimeField(3)
    alpha = PAdicDigits(K, (1, 2, 0, 1))
    # truncation(k) = sum of the first k digit terms, computed by hand
    assert alpha.truncation(0) == 0
    assert alpha.truncation(1) == 1
    assert alpha.truncation(2) == 1 + 2 * 3
    assert alpha.truncation(4) == 1 + 2 * 3 + 0 * 9 + 1 * 27
    with pytest.raises(PrecisionError):
        alpha.truncation(5)


def test_digit_shift_drops_low_digits():
    K = PrimeField(2)
    alpha = PAdicDigits(K, (1, 0, 1, 1))
    beta = digit_shift(alpha, 2)
    assert beta.digits == (1, 1)
    # (alpha_k - alpha_ell) / p^ell relation against integer truncations
    for k in range(2, 5):
        assert beta.truncation(k - 2) == (alpha.truncation(k) - alpha.truncation(2)) // 4


def test_padic_combination_matches_integer_arithmetic():
    K = PrimeField(2)
    alpha = PAdicDigits(K, (1, 1, 0, 1, 1))
    for c in range(0, 4):
        for k in range(0, 8):
            combo = padic_combination(k, c, alpha)
            depth = combo.depth
            assert combo.truncation(depth) == (k + c * alpha.truncation(depth)) % 2**depth


def test_lucas_binom_on_digit_streams_matches_truncation():
    K = PrimeField(2)
    alpha = PAdicDigits(K, (1, 1, 0, 1, 1))
    # for n < p^depth the stream binomial equals the one on a long-enough
    # integer truncation
    for n in range(0, 2**5):
        assert lucas_binom(K, alpha, n) == lucas_binom(K, alpha.truncation(5), n)
    with pytest.raises(PrecisionError):
        lucas_binom(K, alpha, 2**5)


def test_stream_parse_and_text_roundtrip():
    K = PrimeField(3)
    alpha = PAdicDigits.parse(K, "1,2,0,1")
    assert alpha.digits == (1, 2, 0, 1)
    assert PAdicDigits.parse(K, alpha.to_text()).digits == alpha.digits


def test_multi_binom_is_componentwise():
    # multi_binom(i, j) is the iteration coefficient binom(i+j, i) per axis;
    # multi_lucas(e, k) is the plain binomial binom(e, k) per axis
    K = PrimeField(3)
    assert multi_binom(K, (4, 2), (1, 2)) == (math.comb(5, 4) * math.comb(4, 2)) % 3
    assert multi_lucas(K, (4, 2), (1, 2)) == (math.comb(4, 1) * math.comb(2, 2)) % 3


def test_mi_splits_matches_box():
    # splits of k enumerate exactly the componentwise decompositions i+j=k
    k = (2, 1)
    splits = set(mi_splits(k))
    want = set()
    for i in mi_box((3, 2)):
        j = (k[0] - i[0], k[1] - i[1])
        if j[0] >= 0 and j[1] >= 0:
            want.add((i, j))
    assert splits == want
