"""Truncated Laurent series over a prime field, their termwise iterative
derivatives, truncated T-expansions, sparse multivariate monomial models,
and window-exact coordinate solving.

A series is stored sparsely and is exact at every exponent below its
precision bound ``prec``; support never reaches ``prec`` and coefficients
below the support are zero.  Exact Laurent polynomials carry ``prec = INF``.
Binary operations narrow precision conservatively, and every verdict derived
from a comparison is relative to the window it reports.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .charp import MultiIndex, PrimeField, lucas_binom, multi_lucas
from .errors import PrecisionError

INF = float("inf")


class LaurentSeries:
    """Sparse truncated Laurent series in one variable t over F_p."""

    __slots__ = ("field", "coeffs", "prec")

    def __init__(self, field: PrimeField, coeffs: dict, prec=INF, _raw=False):
        self.field = field
        # canonicalize so identity checks against the module INF stay valid
        self.prec = INF if prec == INF else prec
        if _raw:
            self.coeffs = coeffs
            return
        p = field.p
        cc = {}
        for e, c in coeffs.items():
            c %= p
            if c:
                if e >= prec:
                    raise ValueError(f"support t^{e} reaches beyond precision {prec}")
                cc[e] = c
        self.coeffs = cc

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field: PrimeField, prec=INF) -> "LaurentSeries":
        return cls(field, {}, prec, _raw=True)

    @classmethod
    def one(cls, field: PrimeField) -> "LaurentSeries":
        return cls(field, {0: 1})

    @classmethod
    def monomial(cls, field: PrimeField, c: int, e: int, prec=INF) -> "LaurentSeries":
        return cls(field, {e: c}, prec)

    @classmethod
    def t(cls, field: PrimeField) -> "LaurentSeries":
        return cls(field, {1: 1})

    @classmethod
    def from_terms(cls, field: PrimeField, terms: Iterable, prec=INF) -> "LaurentSeries":
        cc = {}
        for e, c in terms:
            cc[e] = cc.get(e, 0) + c
        return cls(field, cc, prec)

    # -- basic queries -------------------------------------------------------

    @property
    def low(self):
        """Start of the reported window: the valuation lower bound."""
        if self.coeffs:
            return min(self.coeffs)
        return 0 if self.prec is INF else self.prec

    def support(self) -> list:
        return sorted(self.coeffs)

    def valuation(self) -> Optional[int]:
        """Exact valuation, or None when no coefficient is visible."""
        return min(self.coeffs) if self.coeffs else None

    def _val_lb(self):
        """Lower bound for the valuation implied by the window."""
        if self.coeffs:
            return min(self.coeffs)
        return self.prec  # zero on the whole window; INF when exactly zero

    def is_zero(self) -> bool:
        """True when no coefficient is visible on the window."""
        return not self.coeffs

    def coeff(self, e: int) -> int:
        if e >= self.prec:
            raise PrecisionError(f"coefficient of t^{e} unknown (prec {self.prec})")
        return self.coeffs.get(e, 0)

    def __repr__(self) -> str:
        w = "inf" if self.prec is INF else str(self.prec)
        return f"<{serialize_series(self)} | window [{self.low}, {w})>"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LaurentSeries)
            and other.field == self.field
            and other.coeffs == self.coeffs
            and other.prec == self.prec
        )

    __hash__ = None

    # -- ring operations ------------------------------------------------------

    def __add__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            other = LaurentSeries.monomial(self.field, other, 0)
        prec = min(self.prec, other.prec)
        p = self.field.p
        cc = {e: c for e, c in self.coeffs.items() if e < prec}
        for e, c in other.coeffs.items():
            if e < prec:
                s = (cc.get(e, 0) + c) % p
                if s:
                    cc[e] = s
                else:
                    cc.pop(e, None)
        return LaurentSeries(self.field, cc, prec, _raw=True)

    __radd__ = __add__

    def __neg__(self) -> "LaurentSeries":
        p = self.field.p
        return LaurentSeries(
            self.field, {e: (-c) % p for e, c in self.coeffs.items()}, self.prec, _raw=True
        )

    def __sub__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            other = LaurentSeries.monomial(self.field, other, 0)
        return self + (-other)

    def __rsub__(self, other) -> "LaurentSeries":
        return (-self) + other

    def scale(self, c: int) -> "LaurentSeries":
        c %= self.field.p
        if c == 0:
            return LaurentSeries.zero(self.field, self.prec)
        p = self.field.p
        return LaurentSeries(
            self.field, {e: (c * v) % p for e, v in self.coeffs.items()}, self.prec, _raw=True
        )

    def __mul__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        # exact zero absorbs everything
        if self.is_zero() and self.prec is INF:
            return self
        if other.is_zero() and other.prec is INF:
            return other
        wx, wy = self._val_lb(), other._val_lb()
        prec = min(self.prec + wy, other.prec + wx)
        p = self.field.p
        cc = {}
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                if e < prec:
                    s = (cc.get(e, 0) + c1 * c2) % p
                    if s:
                        cc[e] = s
                    else:
                        cc.pop(e, None)
        return LaurentSeries(self.field, cc, prec, _raw=True)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by t^k."""
        return LaurentSeries(
            self.field, {e + k: c for e, c in self.coeffs.items()}, self.prec + k, _raw=True
        )

    def truncate(self, prec) -> "LaurentSeries":
        if prec >= self.prec:
            return self
        return LaurentSeries(
            self.field, {e: c for e, c in self.coeffs.items() if e < prec}, prec, _raw=True
        )

    def inverse(self, prec=None) -> "LaurentSeries":
        """Multiplicative inverse as a Laurent series.

        An exact monomial inverts exactly.  Otherwise the result is computed
        up to its natural precision bound, capped by ``prec`` (which is
        required when the input is an exact non-monomial polynomial).
        """
        if not self.coeffs:
            if self.prec is INF:
                raise ZeroDivisionError("series is exactly zero")
            raise PrecisionError("no visible leading coefficient to invert")
        w = min(self.coeffs)
        cw_inv = self.field.inv(self.coeffs[w])
        if len(self.coeffs) == 1 and self.prec is INF:
            return LaurentSeries(self.field, {-w: cw_inv})
        natural = self.prec - 2 * w
        target = natural if prec is None else min(prec, natural)
        if target == INF:
            raise ValueError("specify a precision to invert an exact multi-term series")
        target = max(target, -w + 1)  # the leading coefficient is always known
        p = self.field.p
        out = {-w: cw_inv}
        support = sorted(self.coeffs)
        for e in range(-w + 1, target):
            acc = 0
            for i in support[1:]:
                j = e + w - i
                if j < -w:
                    break
                acc += self.coeffs[i] * out.get(j, 0)
            v = (-cw_inv * acc) % p
            if v:
                out[e] = v
        return LaurentSeries(self.field, out, target, _raw=True)

    def pow(self, n: int, prec=None) -> "LaurentSeries":
        if n < 0:
            return self.inverse(prec).pow(-n, prec)
        result = LaurentSeries.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- window-aware comparison ----------------------------------------------

    def agrees(self, other: "LaurentSeries") -> "EqReport":
        return series_equal(self, other)


@dataclass
class EqReport:
    """Outcome of a windowwise comparison: equality on [low, high)."""

    equal: bool
    low: object
    high: object
    first_mismatch: Optional[int] = None

    def __bool__(self) -> bool:
        return self.equal

    def window(self) -> tuple:
        return (self.low, self.high)


def series_equal(x: LaurentSeries, y: LaurentSeries) -> EqReport:
    """Compare two series on the common window (-inf, min prec); ``low``
    in the report marks where the interesting region starts."""
    if x.field != y.field:
        raise ValueError("series over different prime fields")
    high = min(x.prec, y.prec)
    low = min(x.low, y.low)
    mismatches = sorted(
        e
        for e in set(x.coeffs) | set(y.coeffs)
        if e < high and x.coeffs.get(e, 0) != y.coeffs.get(e, 0)
    )
    if mismatches:
        return EqReport(False, low, high, mismatches[0])
    return EqReport(True, low, high)


# ---------------------------------------------------------------------------
# Termwise iterative derivative


def theta_term(K: PrimeField, c: int, a: int, n: int) -> LaurentSeries:
    """theta^(n) of the monomial c*t^a: binom(a, n) * c * t^(a-n)."""
    v = lucas_binom(K, a, n) * c % K.p
    return LaurentSeries(K, {a - n: v}) if v else LaurentSeries.zero(K)


def theta_series(x: LaurentSeries, n: int) -> LaurentSeries:
    """theta^(n) applied termwise; the window shifts down by n."""
    if n == 0:
        return x
    if n < 0:
        raise ValueError("derivative order must be a natural number")
    K = x.field
    p = K.p
    cc = {}
    for e, c in x.coeffs.items():
        v = lucas_binom(K, e, n) * c % p
        if v:
            cc[e - n] = v
    return LaurentSeries(K, cc, x.prec - n, _raw=True)


def theta(x: LaurentSeries, order: int) -> "TSeries":
    """The truncated T-expansion theta(x) = sum theta^(n)(x) T^n, n <= order."""
    coeffs = {n: theta_series(x, n) for n in range(order + 1)}
    return TSeries(LaurentSeries.zero(x.field), coeffs, order)


def frobenius_power(x: LaurentSeries, ell: int, p: int) -> LaurentSeries:
    """x^{p^ell} computed by exponent scaling (coefficients are fixed by
    Frobenius over the prime field)."""
    q = p**ell
    prec = x.prec if x.prec is INF else (x.prec - 1) * q + 1
    return LaurentSeries(x.field, {e * q: c for e, c in x.coeffs.items()}, prec, _raw=True)


def p_power_root(x: LaurentSeries, ell: int, p: int) -> LaurentSeries:
    """The p^ell-th root of a series all of whose exponents divide p^ell."""
    q = p**ell
    bad = [e for e in x.coeffs if e % q]
    if bad:
        raise ValueError(
            f"not a p^{ell}-th power: exponent {min(bad)} is not divisible by {q}"
        )
    prec = x.prec if x.prec is INF else -((-x.prec) // q)
    return LaurentSeries(x.field, {e // q: c for e, c in x.coeffs.items()}, prec, _raw=True)


# ---------------------------------------------------------------------------
# Truncated T-expansions with coefficients in any exact ring


class TSeries:
    """Truncated power series in T; coefficients live in any ring whose
    elements support +, -, * and is_zero().  Orders above ``order`` are
    unknown, missing orders below are zero."""

    __slots__ = ("zero", "coeffs", "order")

    def __init__(self, zero, coeffs: dict, order: int):
        self.zero = zero
        self.order = order
        # window-limited zeros are kept: dropping one would silently
        # upgrade "zero as far as visible" to "exactly zero"
        self.coeffs = {
            n: c
            for n, c in coeffs.items()
            if n <= order and (not c.is_zero() or getattr(c, "prec", INF) is not INF)
        }

    def coeff(self, n: int):
        if n > self.order:
            raise PrecisionError(f"T-order {n} beyond truncation {self.order}")
        return self.coeffs.get(n, self.zero)

    def __add__(self, other: "TSeries") -> "TSeries":
        order = min(self.order, other.order)
        cc = {n: c for n, c in self.coeffs.items() if n <= order}
        for n, c in other.coeffs.items():
            if n <= order:
                cc[n] = cc[n] + c if n in cc else c
        return TSeries(self.zero, cc, order)

    def __sub__(self, other: "TSeries") -> "TSeries":
        order = min(self.order, other.order)
        cc = {n: c for n, c in self.coeffs.items() if n <= order}
        for n, c in other.coeffs.items():
            if n <= order:
                cc[n] = cc[n] - c if n in cc else -c
        return TSeries(self.zero, cc, order)

    def __neg__(self) -> "TSeries":
        return TSeries(self.zero, {n: -c for n, c in self.coeffs.items()}, self.order)

    def __mul__(self, other: "TSeries") -> "TSeries":
        order = min(self.order, other.order)
        cc = {}
        for n1, c1 in self.coeffs.items():
            for n2, c2 in other.coeffs.items():
                n = n1 + n2
                if n <= order:
                    v = c1 * c2
                    cc[n] = cc[n] + v if n in cc else v
        return TSeries(self.zero, cc, order)

    def scale_by(self, elt) -> "TSeries":
        """Multiply every coefficient by a fixed ring element."""
        return TSeries(self.zero, {n: c * elt for n, c in self.coeffs.items()}, self.order)

    def inverse(self, coeff_prec=None) -> "TSeries":
        """Power series inverse; the constant coefficient must be invertible."""
        c0 = self.coeff(0)
        c0_inv = c0.inverse(coeff_prec) if coeff_prec is not None else c0.inverse()
        out = {0: c0_inv}
        for n in range(1, self.order + 1):
            acc = None
            for i, ci in self.coeffs.items():
                if 0 < i <= n and (n - i) in out:
                    v = ci * out[n - i]
                    acc = v if acc is None else acc + v
            if acc is not None:
                term = -(c0_inv * acc)
                if not term.is_zero():
                    out[n] = term
        return TSeries(self.zero, out, self.order)

    def __repr__(self) -> str:
        parts = [f"T^{n}: {c!r}" for n, c in sorted(self.coeffs.items())]
        return f"<TSeries order {self.order} | " + "; ".join(parts) + ">"


# ---------------------------------------------------------------------------
# Window-exact coordinates in a declared basis


@dataclass
class CoordResult:
    """Coordinates of x in a basis, certified on the reported window."""

    coords: list
    window: tuple
    unique: bool


def coordinates_in_basis(
    x: LaurentSeries,
    basis: Sequence[LaurentSeries],
    coeff_lo: int,
    coeff_hi: int,
    orders: Sequence[int] = (),
) -> Optional[CoordResult]:
    """Solve x = sum_i c_i * b_i with Laurent-polynomial coordinates c_i
    supported on [coeff_lo, coeff_hi), by exact linear algebra over F_p on
    the window where every contribution is known.

    When orders are given, the same unknowns must also satisfy the derived
    identities theta^(k)(x) = sum_i theta^(k)(c_i b_i) for each listed k,
    expanded by the product rule.  For termwise theta each derived row is a
    binomial multiple of a shifted base row (Vandermonde), so stacking never
    flips a verdict; it serves as a redundancy check that the theta data of
    the target and the basis are coherent, and it is cheap because only
    exponents reachable from actual support carry rows.

    A non-None result certifies the relation only on the reported window:
    basis support beyond the window can differ from the combination there.
    Returns None when the system is inconsistent on that window (x is not
    expressible within the ansatz), and raises PrecisionError when the
    window leaves nothing to match.
    """
    from . import linalg

    if coeff_hi <= coeff_lo:
        raise ValueError("empty coordinate ansatz")
    K = x.field
    p = K.p
    d = len(basis)
    ks = sorted({0} | {int(k) for k in orders if k > 0})
    kmax = ks[-1]
    tx = {k: theta_series(x, k) for k in ks}
    tb = [[theta_series(b, v) for v in range(kmax + 1)] for b in basis]
    unknowns = [(i, e) for i in range(d) for e in range(coeff_lo, coeff_hi)]
    col = {u: c for c, u in enumerate(unknowns)}
    rows = []
    rhs = []
    base_window = None
    for k in ks:
        hi = min(
            [tx[k].prec]
            + [tb[i][k - u].prec + coeff_lo - u for i in range(d) for u in range(k + 1)]
        )
        if hi == INF:
            tops = [max(b.coeffs) + coeff_hi - 1 + k for b in basis if b.coeffs]
            if tx[k].coeffs:
                tops.append(max(tx[k].coeffs))
            hi = (max(tops) + 1) if tops else 1
        lo = min(
            [tx[k].low if tx[k].coeffs else 0]
            + [tb[i][v].low + coeff_lo for i in range(d) for v in range(k + 1) if tb[i][v].coeffs]
            + [0]
        )
        if k == 0:
            base_window = (lo, hi)
            if lo >= hi:
                raise PrecisionError("windows too small to match any coefficient")
        if lo >= hi:
            continue
        # sparse row assembly: only exponents touched by some support point
        # of theta^(v)(b_i) shifted through the coefficient window, or by the
        # target, can carry a nontrivial equation
        row_map: dict = {}
        for i in range(d):
            for u in range(k + 1):
                sup = tb[i][k - u].coeffs
                if not sup:
                    continue
                for e in range(coeff_lo, coeff_hi):
                    bi = lucas_binom(K, e, u)
                    if not bi:
                        continue
                    cidx = col[(i, e)]
                    off = e - u
                    for f, cval in sup.items():
                        a = f + off
                        if lo <= a < hi:
                            r = row_map.setdefault(a, {})
                            r[cidx] = (r.get(cidx, 0) + bi * cval) % p
        for a, tv in tx[k].coeffs.items():
            if tv and lo <= a < hi:
                row_map.setdefault(a, {})
        for a in sorted(row_map):
            rowd = row_map[a]
            target = tx[k].coeffs.get(a, 0)
            if target or any(rowd.values()):
                row = [0] * len(unknowns)
                for cidx, v in rowd.items():
                    row[cidx] = v
                rows.append(row)
                rhs.append(target)
    if not rows:
        zero = [LaurentSeries.zero(K) for _ in range(d)]
        return CoordResult(zero, base_window, False)
    sol = linalg.solve(K, rows, rhs)
    if sol is None:
        return None
    vec, unique = sol
    coords = []
    for i in range(d):
        cc = {e: vec[col[(i, e)]] for e in range(coeff_lo, coeff_hi) if vec[col[(i, e)]]}
        coords.append(LaurentSeries(K, cc, _raw=True))
    return CoordResult(coords, base_window, unique)


# ---------------------------------------------------------------------------
# Literal and JSON forms

_TERM_RE = re.compile(r"^([0-9]+)?(?:\*?(t)(?:\^(-?[0-9]+))?)?$")
_ORDER_RE = re.compile(r"^O\(t\^(-?[0-9]+)\)$")


def parse_series(K: PrimeField, text: str, prec=INF) -> LaurentSeries:
    """Parse sums of ``c*t^e`` terms, e.g. ``"1*t^-2 + 1*t^3"`` or ``"0"``.

    A trailing ``O(t^N)`` term bounds the precision at N (the tighter of N
    and the ``prec`` argument wins), so truncated series survive a
    serialize/parse round trip without being promoted to exact ones."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty series literal")
    # split on +/- signs that do not follow '^'
    terms = []
    buf = ""
    sign = 1
    for i, ch in enumerate(s):
        if ch in "+-" and i > 0 and s[i - 1] != "^" and buf:
            terms.append((sign, buf))
            sign = 1 if ch == "+" else -1
            buf = ""
        elif ch in "+-" and i == 0:
            sign = 1 if ch == "+" else -1
        else:
            buf += ch
    if buf:
        terms.append((sign, buf))
    cc = {}
    for sg, term in terms:
        om = _ORDER_RE.match(term)
        if om:
            prec = min(prec, int(om.group(1)))
            continue
        m = _TERM_RE.match(term)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"cannot parse series term {term!r}")
        c = int(m.group(1)) if m.group(1) is not None else 1
        if m.group(2) is None:
            e = 0
        else:
            e = int(m.group(3)) if m.group(3) is not None else 1
        cc[e] = cc.get(e, 0) + sg * c
    return LaurentSeries(K, cc, prec)


def serialize_series(x: LaurentSeries) -> str:
    """Canonical literal: terms in increasing exponent order, with a
    trailing O(t^N) marker when the precision is finite."""
    parts = []
    for e in sorted(x.coeffs):
        c = x.coeffs[e]
        parts.append(str(c) if e == 0 else f"{c}*t^{e}")
    if x.prec is not INF:
        parts.append(f"O(t^{x.prec})")
    if not parts:
        return "0"
    return " + ".join(parts)


def series_to_json(x: LaurentSeries) -> dict:
    prec = None if x.prec is INF else x.prec
    low = None if (x.prec is INF and not x.coeffs) else x.low
    return {"terms": [[e, x.coeffs[e]] for e in sorted(x.coeffs)], "window": [low, prec]}


def series_from_json(K: PrimeField, obj: dict) -> LaurentSeries:
    prec = obj.get("window", [None, None])[1]
    return LaurentSeries(K, {int(e): int(c) for e, c in obj["terms"]}, INF if prec is None else prec)


# ---------------------------------------------------------------------------
# Sparse multivariate monomial models (exact Laurent polynomials)


class MonomialRing:
    """Sparse Laurent polynomials over F_p in named commuting variables."""

    __slots__ = ("field", "gens")

    def __init__(self, field: PrimeField, gens: Sequence[str]):
        self.field = field
        self.gens = tuple(gens)

    @property
    def m(self) -> int:
        return len(self.gens)

    def poly(self, coeffs: dict) -> "MultiPoly":
        return MultiPoly(self, coeffs)

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {}, _raw=True)

    def one(self) -> "MultiPoly":
        return MultiPoly(self, {(0,) * self.m: 1}, _raw=True)

    def from_scalar(self, c: int) -> "MultiPoly":
        return MultiPoly(self, {(0,) * self.m: c})

    def gen(self, name: str) -> "MultiPoly":
        i = self.gens.index(name)
        e = tuple(1 if j == i else 0 for j in range(self.m))
        return MultiPoly(self, {e: 1}, _raw=True)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MonomialRing)
            and other.field == self.field
            and other.gens == self.gens
        )

    def __hash__(self):
        return hash((self.field, self.gens))


class MultiPoly:
    """Element of a MonomialRing: dict mapping exponent tuples to residues."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: MonomialRing, coeffs: dict, _raw=False):
        self.ring = ring
        if _raw:
            self.coeffs = coeffs
            return
        p = ring.field.p
        self.coeffs = {}
        for e, c in coeffs.items():
            c %= p
            if c:
                self.coeffs[tuple(e)] = c

    def is_zero(self) -> bool:
        return not self.coeffs

    def coord_items(self):
        return self.coeffs.items()

    def __add__(self, other) -> "MultiPoly":
        p = self.ring.field.p
        cc = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = (cc.get(e, 0) + c) % p
            if s:
                cc[e] = s
            else:
                cc.pop(e, None)
        return MultiPoly(self.ring, cc, _raw=True)

    def __neg__(self) -> "MultiPoly":
        p = self.ring.field.p
        return MultiPoly(self.ring, {e: (-c) % p for e, c in self.coeffs.items()}, _raw=True)

    def __sub__(self, other) -> "MultiPoly":
        return self + (-other)

    def scale(self, c: int) -> "MultiPoly":
        p = self.ring.field.p
        c %= p
        if not c:
            return self.ring.zero()
        return MultiPoly(self.ring, {e: (c * v) % p for e, v in self.coeffs.items()}, _raw=True)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, int):
            return self.scale(other)
        p = self.ring.field.p
        cc = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = (cc.get(e, 0) + c1 * c2) % p
                if s:
                    cc[e] = s
                else:
                    cc.pop(e, None)
        return MultiPoly(self.ring, cc, _raw=True)

    __rmul__ = __mul__

    def pow(self, n: int) -> "MultiPoly":
        if n < 0:
            return self.inverse().pow(-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def inverse(self, prec=None) -> "MultiPoly":
        if len(self.coeffs) != 1:
            raise ValueError("only monomials invert inside a monomial ring")
        (e, c), = self.coeffs.items()
        return MultiPoly(
            self.ring, {tuple(-a for a in e): self.ring.field.inv(c)}, _raw=True
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and other.ring == self.ring
            and other.coeffs == self.coeffs
        )

    __hash__ = None

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs):
            mono = "*".join(
                f"{g}^{k}" if k != 1 else g
                for g, k in zip(self.ring.gens, e)
                if k
            )
            c = self.coeffs[e]
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def theta_multi(x: MultiPoly, k: MultiIndex) -> MultiPoly:
    """Termwise m-variate derivative on the standard monomial model:
    theta^(k)(t^e) = binom(e, k) t^(e-k) componentwise."""
    K = x.ring.field
    p = K.p
    cc = {}
    for e, c in x.coeffs.items():
        v = multi_lucas(K, e, k) * c % p
        if v:
            ne = tuple(a - b for a, b in zip(e, k))
            cc[ne] = (cc.get(ne, 0) + v) % p
    return MultiPoly(x.ring, {e: c for e, c in cc.items() if c}, _raw=True)
