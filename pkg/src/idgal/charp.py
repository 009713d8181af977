"""Prime-field arithmetic, base-p digit combinatorics, and truncated p-adic
digit streams.

A :class:`PrimeField` is created once per session and shared by every value
built over it; residues themselves are plain ints in ``[0, p)``.  Binomial
coefficients are always taken mod p through the base-p digit product, which
extends uniformly to negative integers (their p-adic expansion is eventually
``p-1``) and to truncated p-adic numbers given by explicit digit streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _cartesian
from typing import Iterable, Iterator, Sequence, Union

from .errors import PrecisionError

MultiIndex = tuple  # tuple[int, ...]; multi-indices are plain int tuples


class PrimeField:
    """The prime field F_p.  Elements are ints reduced into ``[0, p)``."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or p < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {p!r}")
        if any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p

    def red(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 is not invertible")
        return pow(a, -1, self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


# ---------------------------------------------------------------------------
# Lucas binomials


@lru_cache(maxsize=None)
def _lucas_int(p: int, a: int, n: int) -> int:
    # Digit product over base p; floor division makes negative a produce the
    # eventually-(p-1) digits of its p-adic expansion.
    r = 1
    while n > 0:
        r = r * math.comb(a % p, n % p) % p
        if r == 0:
            return 0
        a //= p
        n //= p
    return r


def lucas_binom(K: PrimeField, a: Union[int, "PAdicDigits"], n: int) -> int:
    """binom(a, n) mod p via the base-p digit product.

    ``a`` may be any integer (negative included) or a truncated p-adic number;
    a digit stream must be deep enough to cover every base-p digit of ``n``.
    """
    if n < 0:
        raise ValueError("lower index must be a natural number")
    if isinstance(a, PAdicDigits):
        if a.field != K:
            raise ValueError("digit stream built over a different prime field")
        if n >= K.p ** a.depth:
            raise PrecisionError(
                f"need {num_digits(K.p, n)} base-{K.p} digits, stream has {a.depth}"
            )
        a = a.truncation(a.depth)
    return _lucas_int(K.p, a, n)


def multi_binom(K: PrimeField, i: MultiIndex, j: MultiIndex) -> int:
    """binom(i+j, i) mod p, componentwise over multi-indices."""
    if len(i) != len(j):
        raise ValueError("multi-index lengths differ")
    r = 1
    for a, b in zip(i, j):
        r = r * _lucas_int(K.p, a + b, a) % K.p
        if r == 0:
            return 0
    return r


def multi_lucas(K: PrimeField, e: MultiIndex, k: MultiIndex) -> int:
    """binom(e, k) mod p, componentwise; entries of e may be negative."""
    if len(e) != len(k):
        raise ValueError("multi-index lengths differ")
    r = 1
    for a, b in zip(e, k):
        r = r * _lucas_int(K.p, a, b) % K.p
        if r == 0:
            return 0
    return r


def num_digits(p: int, n: int) -> int:
    """Number of base-p digits of a natural number (0 has none)."""
    d = 0
    while n > 0:
        d += 1
        n //= p
    return d


def int_digits(p: int, value: int, depth: int) -> tuple:
    """First ``depth`` base-p digits of ``value`` (mod p^depth; negatives ok)."""
    return tuple((value // p**i) % p for i in range(depth))


# ---------------------------------------------------------------------------
# Multi-index helpers


def mi_add(i: MultiIndex, j: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(i, j))


def mi_sub(i: MultiIndex, j: MultiIndex) -> MultiIndex:
    return tuple(a - b for a, b in zip(i, j))


def mi_abs(i: MultiIndex) -> int:
    return sum(i)


def mi_leq(i: MultiIndex, j: MultiIndex) -> bool:
    return all(a <= b for a, b in zip(i, j))


def mi_zero(m: int) -> MultiIndex:
    return (0,) * m


def mi_unit(m: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(m))


def mi_splits(k: MultiIndex) -> Iterator[tuple]:
    """All (i, j) with i + j = k componentwise."""
    for i in _cartesian(*(range(a + 1) for a in k)):
        yield i, mi_sub(k, i)


def mi_box(bounds: Sequence[int]) -> Iterator[MultiIndex]:
    """All multi-indices with 0 <= k_mu < bounds[mu]."""
    return _cartesian(*(range(b) for b in bounds))


def mi_all_upto(m: int, total: int) -> Iterator[MultiIndex]:
    """All multi-indices of length m with |k| <= total."""
    if m == 1:
        for n in range(total + 1):
            yield (n,)
        return
    for head in range(total + 1):
        for tail in mi_all_upto(m - 1, total - head):
            yield (head,) + tail


def as_index(k, m: int) -> MultiIndex:
    """Normalize an int or tuple order to a length-m multi-index."""
    if isinstance(k, int):
        if m != 1:
            raise ValueError(f"scalar order for an m={m} model")
        return (k,)
    k = tuple(k)
    if len(k) != m:
        raise ValueError(f"index length {len(k)} != m={m}")
    return k


# ---------------------------------------------------------------------------
# Truncated p-adic digit streams


@dataclass(frozen=True)
class PAdicDigits:
    """A p-adic number known through its first ``depth`` base-p digits."""

    field: PrimeField
    digits: tuple

    def __post_init__(self):
        p = self.field.p
        if not all(isinstance(d, int) and 0 <= d < p for d in self.digits):
            raise ValueError(f"digits must lie in [0, {p})")
        object.__setattr__(self, "digits", tuple(self.digits))

    @property
    def depth(self) -> int:
        return len(self.digits)

    def truncation(self, k: int) -> int:
        """The integer truncation sum a_i p^i over i < k."""
        if k > self.depth:
            raise PrecisionError(f"truncation {k} exceeds depth {self.depth}")
        p = self.field.p
        return sum(d * p**i for i, d in enumerate(self.digits[:k]))

    def shift(self, ell: int) -> "PAdicDigits":
        """Drop the first `ell` digits: (alpha - alpha_ell) / p^ell."""
        if ell > self.depth:
            raise PrecisionError(f"shift {ell} exceeds depth {self.depth}")
        return PAdicDigits(self.field, self.digits[ell:])

    def combine(self, k: int, c: int) -> "PAdicDigits":
        """Digits of k + c * alpha, exact to the same depth."""
        value = k + c * self.truncation(self.depth)
        return PAdicDigits(self.field, int_digits(self.field.p, value, self.depth))

    @classmethod
    def from_int(cls, K: PrimeField, value: int, depth: int) -> "PAdicDigits":
        return cls(K, int_digits(K.p, value, depth))

    @classmethod
    def parse(cls, K: PrimeField, text: str) -> "PAdicDigits":
        """Parse a lowest-digit-first comma list such as ``"1,1,0,1"``."""
        parts = [s.strip() for s in text.split(",") if s.strip()]
        return cls(K, tuple(int(s) for s in parts))

    def to_text(self) -> str:
        return ",".join(str(d) for d in self.digits)


def truncation(alpha: PAdicDigits, k: int) -> int:
    return alpha.truncation(k)


def digit_shift(alpha: PAdicDigits, ell: int) -> PAdicDigits:
    return alpha.shift(ell)


def padic_combination(k: int, c: int, alpha: PAdicDigits) -> PAdicDigits:
    """Digit stream of k + c*alpha at alpha's depth."""
    return alpha.combine(k, c)
