"""Iterative derivation models.

A model packages a coefficient universe (truncated Laurent series, sparse
multivariate monomials, or a polynomial extension with symbolic generators)
with the maps theta^(k) for every multi-index k up to a working order, and
exposes the machinery to verify the defining axioms, rebuild theta from its
p-power components, adjoin symbolic solutions, and run bounded searches for
constants and differentially finite spans.

Quotient presentations (generators with power relations) do not get their
axioms for free: verify_axioms re-derives identity, additivity, the product
rule, the iteration rule, and relation well-definedness on a spanning sample,
and reports every violated instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import linalg
from .charp import (
    PrimeField,
    as_index,
    int_digits,
    mi_abs,
    mi_add,
    mi_all_upto,
    mi_splits,
    mi_unit,
    mi_zero,
    multi_binom,
    num_digits,
)
from .errors import PrecisionError
from .series import (
    INF,
    LaurentSeries,
    MonomialRing,
    MultiPoly,
    TSeries,
    coordinates_in_basis,
    parse_series,
    serialize_series,
    theta as theta_expansion,
    theta_multi,
    theta_series,
)

# ---------------------------------------------------------------------------
# Coordinate flattening: every universe exposes K-linear coordinates keyed by
# hashable labels, plus a knownness test respecting precision windows.


def element_coords(x) -> dict:
    """K-coordinates of a universe element as {key: residue}."""
    if isinstance(x, LaurentSeries):
        return dict(x.coeffs)
    if isinstance(x, MultiPoly):
        return dict(x.coeffs)
    if isinstance(x, ExtElement):
        out = {}
        for mono, c in x.coeffs.items():
            for e, v in c.coeffs.items():
                out[(mono, e)] = v
        return out
    raise TypeError(f"no coordinate form for {type(x).__name__}")


def element_known_at(x, key) -> bool:
    """Whether the coordinate at ``key`` is inside the known window of x."""
    if isinstance(x, LaurentSeries):
        return key < x.prec
    if isinstance(x, MultiPoly):
        return True
    if isinstance(x, ExtElement):
        mono, e = key
        c = x.coeffs.get(mono)
        return e < (c.prec if c is not None else INF)
    raise TypeError(f"no coordinate form for {type(x).__name__}")


# ---------------------------------------------------------------------------
# Model base class


class DerivationModel:
    """Common interface: a universe with +, *, and theta^(k) maps."""

    def __init__(self, field: PrimeField, m: int, working_order: int):
        self.field = field
        self.m = m
        self.working_order = working_order

    # subclasses: theta_var(x, n, var) for a single variable
    def theta_var(self, x, n: int, var: int):
        raise NotImplementedError

    def theta(self, x, k):
        """theta^(k) for a multi-index k (an int means univariate)."""
        k = as_index(k, self.m)
        # variables commute; apply the highest variable index first
        for var in range(self.m - 1, -1, -1):
            if k[var]:
                x = self.theta_var(x, k[var], var)
        return x

    def theta_T(self, x, order: int, var: int = 0) -> TSeries:
        """Truncated T-expansion in one chosen variable."""
        coeffs = {n: self.theta_var(x, n, var) if n else x for n in range(order + 1)}
        return TSeries(self.zero(), coeffs, order)

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def sample_elements(self) -> list:
        raise NotImplementedError

    def relation_entries(self, order: int) -> list:
        """(tag, TSeries difference) pairs asserting quotient relations."""
        return []

    def eq(self, a, b) -> bool:
        return (a - b).is_zero()


# ---------------------------------------------------------------------------
# Concrete universes


class SeriesModel(DerivationModel):
    """K((t)) with the standard derivation: theta^(n) termwise by binomials
    (the expansion of t along t + T)."""

    def __init__(self, field: PrimeField, working_order: int = 16):
        super().__init__(field, 1, working_order)

    def theta_var(self, x, n, var=0):
        return theta_series(x, n)

    def zero(self):
        return LaurentSeries.zero(self.field)

    def one(self):
        return LaurentSeries.one(self.field)

    def sample_elements(self):
        K = self.field
        P = lambda text: parse_series(K, text)
        return [
            LaurentSeries.one(K),
            LaurentSeries.t(K),
            P("1*t^2 + 1*t^1"),
            P("1*t^-1"),
            P("1*t^3 + 1*t^-2"),
            P("1 + 1*t^1"),
        ]


class MonomialModel(DerivationModel):
    """Sparse Laurent polynomials in m commuting variables with the standard
    m-variate derivation, termwise via componentwise binomials."""

    def __init__(self, field: PrimeField, m: int, working_order: int = 8, gens=None):
        super().__init__(field, m, working_order)
        names = tuple(gens) if gens else tuple(f"t{i+1}" for i in range(m))
        if m == 1 and gens is None:
            names = ("t",)
        self.ring = MonomialRing(field, names)

    def theta(self, x, k):
        return theta_multi(x, as_index(k, self.m))

    def theta_var(self, x, n, var=0):
        k = tuple(n if i == var else 0 for i in range(self.m))
        return theta_multi(x, k)

    def zero(self):
        return self.ring.zero()

    def one(self):
        return self.ring.one()

    def sample_elements(self):
        gens = [self.ring.gen(g) for g in self.ring.gens]
        out = [self.ring.one()] + gens
        prod = self.ring.one()
        for g in gens:
            prod = prod * g
        if self.m > 1:
            out.append(prod)
        out.append(gens[0] * gens[0] + gens[-1])
        out.append(gens[0].pow(-1))
        return out


# ---------------------------------------------------------------------------
# Polynomial extensions with symbolic generators


@dataclass(frozen=True)
class GenSpec:
    """A symbolic generator: optionally invertible, optionally bound by a
    power relation g^power = value (value lives in earlier generators)."""

    name: str
    power: Optional[int] = None
    value: object = None  # ExtElement or LaurentSeries, set when power is
    invertible: bool = False


class ExtElement:
    """Element of a PolyExtModel: sparse map from generator-exponent tuples
    to LaurentSeries coefficients.  Stored monomials are reduced."""

    __slots__ = ("model", "coeffs")

    def __init__(self, model: "PolyExtModel", coeffs: dict, _raw=False):
        self.model = model
        if _raw:
            self.coeffs = coeffs
            return
        cc = {}
        for mono, c in coeffs.items():
            if c.is_zero() and c.prec is INF:
                continue
            mono = tuple(mono)
            if mono in cc:
                cc[mono] = cc[mono] + c
            else:
                cc[mono] = c
        self.coeffs = {m: c for m, c in cc.items() if not (c.is_zero() and c.prec is INF)}

    @property
    def prec(self):
        precs = [c.prec for c in self.coeffs.values()]
        return min(precs) if precs else INF

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def __add__(self, other) -> "ExtElement":
        cc = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            cc[mono] = cc[mono] + c if mono in cc else c
        return ExtElement(self.model, cc)

    def __neg__(self) -> "ExtElement":
        return ExtElement(self.model, {m: -c for m, c in self.coeffs.items()}, _raw=True)

    def __sub__(self, other) -> "ExtElement":
        return self + (-other)

    def __mul__(self, other) -> "ExtElement":
        if isinstance(other, int):
            return ExtElement(self.model, {m: c * other for m, c in self.coeffs.items()})
        if isinstance(other, LaurentSeries):
            return ExtElement(self.model, {m: c * other for m, c in self.coeffs.items()})
        if not isinstance(other, ExtElement):
            return NotImplemented
        bucket: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                raw = tuple(a + b for a, b in zip(m1, m2))
                c12 = c1 * c2
                for mr, cr in self.model.reduce_monomial(raw).coeffs.items():
                    prev = bucket.get(mr)
                    bucket[mr] = c12 * cr if prev is None else prev + c12 * cr
        return ExtElement(self.model, bucket)

    __rmul__ = __mul__

    def pow(self, n: int) -> "ExtElement":
        if n < 0:
            return self.inverse().pow(-n)
        out = self.model.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def inverse(self, prec=None) -> "ExtElement":
        """Inverse of a single-monomial element whose generators are
        invertible (or absent)."""
        monos = [m for m, c in self.coeffs.items() if not c.is_zero()]
        if len(monos) != 1:
            raise ValueError("only monomial extension elements can be inverted")
        mono = monos[0]
        for i, e in enumerate(mono):
            if e and not self.model.gens[i].invertible:
                raise ValueError(f"generator {self.model.gens[i].name} is not invertible")
        inv_mono = tuple(-e for e in mono)
        return ExtElement(self.model, {inv_mono: self.coeffs[mono].inverse(prec)})

    def coeff(self, mono) -> LaurentSeries:
        return self.coeffs.get(tuple(mono), LaurentSeries.zero(self.model.field))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtElement)
            and other.model is self.model
            and other.coeffs == self.coeffs
        )

    __hash__ = None

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        names = [g.name for g in self.model.gens]
        parts = []
        for mono in sorted(self.coeffs):
            head = "*".join(
                f"{n}^{e}" if e != 1 else n for n, e in zip(names, mono) if e
            )
            c = serialize_series(self.coeffs[mono])
            parts.append(f"({c})*{head}" if head else f"({c})")
        return " + ".join(parts)


class PolyExtModel(DerivationModel):
    """Univariate base K((t)) extended by symbolic generators.

    Each generator carries the full rule theta(g) = g + sum_{n>=1} R_n T^n
    with R_n extension elements; theta extends multiplicatively to monomials
    (negative exponents through the T-series inverse) and additively with
    the base derivation acting on coefficients.
    """

    def __init__(
        self,
        field: PrimeField,
        gens: Sequence[GenSpec],
        rules: dict,
        working_order: int = 16,
    ):
        super().__init__(field, 1, working_order)
        self.gens = list(gens)
        self._index = {g.name: i for i, g in enumerate(self.gens)}
        # rules[name] = {n: ExtElement or LaurentSeries}, orders >= 1
        self.rules = {}
        for name, table in rules.items():
            self.rules[name] = {int(n): self._lift(v) for n, v in table.items() if int(n) >= 1}
        for g in self.gens:
            self.rules.setdefault(g.name, {})
        self._reduce_cache: dict = {}
        self._rule_T_cache: dict = {}
        self._rule_pow_cache: dict = {}
        self._mono_T_cache: dict = {}

    # -- element constructors -------------------------------------------------

    def _zero_mono(self):
        return (0,) * len(self.gens)

    def zero(self) -> ExtElement:
        return ExtElement(self, {}, _raw=True)

    def one(self) -> ExtElement:
        return ExtElement(self, {self._zero_mono(): LaurentSeries.one(self.field)}, _raw=True)

    def embed(self, c: LaurentSeries) -> ExtElement:
        return ExtElement(self, {self._zero_mono(): c})

    def _lift(self, v) -> ExtElement:
        return self.embed(v) if isinstance(v, LaurentSeries) else v

    def gen_element(self, name: str) -> ExtElement:
        i = self._index[name]
        mono = tuple(1 if j == i else 0 for j in range(len(self.gens)))
        return ExtElement(self, {mono: LaurentSeries.one(self.field)}, _raw=True)

    # -- monomial reduction ----------------------------------------------------

    def reduce_monomial(self, mono: tuple) -> ExtElement:
        cached = self._reduce_cache.get(mono)
        if cached is not None:
            return cached
        out = None
        for i, e in enumerate(mono):
            g = self.gens[i]
            if e < 0 and not g.invertible:
                raise ValueError(f"negative power of non-invertible generator {g.name}")
            if g.power is not None and e >= g.power:
                q, rem = divmod(e, g.power)
                base = list(mono)
                base[i] = rem
                out = self.reduce_monomial(tuple(base)) * self._lift(g.value).pow(q)
                break
        if out is None:
            out = ExtElement(self, {mono: LaurentSeries.one(self.field)}, _raw=True)
        self._reduce_cache[mono] = out
        return out

    # -- theta machinery ---------------------------------------------------------

    def rule_T(self, i: int) -> TSeries:
        ts = self._rule_T_cache.get(i)
        if ts is None:
            g = self.gens[i]
            coeffs = {0: self.gen_element(g.name)}
            coeffs.update(self.rules[g.name])
            ts = TSeries(self.zero(), coeffs, self.working_order)
            self._rule_T_cache[i] = ts
        return ts

    def rule_power(self, i: int, e: int) -> TSeries:
        key = (i, e)
        ts = self._rule_pow_cache.get(key)
        if ts is not None:
            return ts
        if e == 0:
            ts = TSeries(self.zero(), {0: self.one()}, self.working_order)
        elif e < 0:
            inv = self._rule_pow_cache.get((i, -1))
            if inv is None:
                inv = self.rule_T(i).inverse()
                self._rule_pow_cache[(i, -1)] = inv
            ts = inv if e == -1 else self._pow_T(inv, -e)
        else:
            ts = self._pow_T(self.rule_T(i), e)
        self._rule_pow_cache[key] = ts
        return ts

    @staticmethod
    def _pow_T(base: TSeries, n: int) -> TSeries:
        out = None
        b = base
        while n:
            if n & 1:
                out = b if out is None else out * b
            b = b * b if n > 1 else b
            n >>= 1
        return out

    def mono_theta_T(self, mono: tuple) -> TSeries:
        ts = self._mono_T_cache.get(mono)
        if ts is None:
            ts = TSeries(self.zero(), {0: self.one()}, self.working_order)
            for i, e in enumerate(mono):
                if e:
                    ts = ts * self.rule_power(i, e)
            self._mono_T_cache[mono] = ts
        return ts

    def theta_T(self, x: ExtElement, order: int, var: int = 0) -> TSeries:
        if order > self.working_order:
            raise PrecisionError(
                f"order {order} beyond working order {self.working_order}"
            )
        total = TSeries(self.zero(), {}, order)
        for mono in sorted(x.coeffs):
            c = x.coeffs[mono]
            base_T = theta_expansion(c, order)
            lifted = TSeries(
                self.zero(), {n: self.embed(s) for n, s in base_T.coeffs.items()}, order
            )
            total = total + lifted * self.mono_theta_T(mono)
        return total

    def theta_var(self, x, n, var=0):
        if n == 0:
            return x
        return self.theta_T(x, n).coeff(n)

    # -- samples and relation checks ----------------------------------------------

    def sample_elements(self):
        out = [self.one()]
        gens = [self.gen_element(g.name) for g in self.gens]
        out.extend(gens)
        out.append(self.embed(LaurentSeries.t(self.field)))
        if len(gens) > 1:
            out.append(gens[0] * gens[1])
        out.append(gens[0] * gens[0] + self.one())
        for g, elt in zip(self.gens, gens):
            if g.invertible:
                out.append(elt.inverse())
                break
        return out

    def relation_entries(self, order: int):
        entries = []
        for i, g in enumerate(self.gens):
            if g.power is None:
                continue
            lhs = self.rule_power(i, g.power)
            rhs = self.theta_T(self._lift(g.value), min(order, self.working_order))
            entries.append((f"relation {g.name}^{g.power}", lhs - rhs))
        return entries


# ---------------------------------------------------------------------------
# Corrupted wrappers for mutation testing


class CorruptedModel(DerivationModel):
    """Wraps a model and injects a single broken rule, for checking that
    verify_axioms actually detects each axiom violation.

    modes: 'identity' (theta^(0) shifted by 1), 'additivity' (a power map
    added to the first-order rule), 'leibniz' (identity added to the
    first-order rule), 'iteration' (first-order rule added to the
    second-order rule; needs order >= 6 to surface for p = 2),
    'theta1_identity' (theta^(e_1) replaced by the identity map).
    """

    MODES = ("identity", "additivity", "leibniz", "iteration", "theta1_identity")

    def __init__(self, base: DerivationModel, mode: str):
        if mode not in self.MODES:
            raise ValueError(f"unknown corruption mode {mode!r}")
        super().__init__(base.field, base.m, base.working_order)
        self.base = base
        self.mode = mode

    def theta(self, x, k):
        k = as_index(k, self.m)
        y = self.base.theta(x, k)
        unit = mi_unit(self.m, 0)
        if self.mode == "identity" and k == mi_zero(self.m):
            return y + self.one()
        if self.mode == "leibniz" and k == unit:
            return y + x
        if self.mode == "additivity" and k == unit:
            q = 3 if self.field.p == 2 else 2
            return y + x.pow(q) if hasattr(x, "pow") else y + x * x
        if self.mode == "iteration" and k == mi_add(unit, unit):
            return y + self.base.theta(x, unit)
        if self.mode == "theta1_identity" and k == unit:
            return x
        return y

    def theta_var(self, x, n, var=0):
        k = tuple(n if i == var else 0 for i in range(self.m))
        return self.theta(x, k)

    def zero(self):
        return self.base.zero()

    def one(self):
        return self.base.one()

    def sample_elements(self):
        return self.base.sample_elements()

    def relation_entries(self, order):
        return self.base.relation_entries(order)


def corrupted_variants(base: DerivationModel) -> dict:
    return {mode: CorruptedModel(base, mode) for mode in CorruptedModel.MODES}


# ---------------------------------------------------------------------------
# Axiom verification


@dataclass
class AxiomReport:
    ok: bool
    order: int
    passed: dict
    violations: list

    def failures(self, axiom: Optional[str] = None) -> list:
        if axiom is None:
            return list(self.violations)
        return [v for v in self.violations if v["axiom"] == axiom]

    def violated_axioms(self) -> set:
        return {v["axiom"] for v in self.violations}

    def summary(self) -> str:
        parts = [f"{k}:{v}" for k, v in sorted(self.passed.items())]
        status = "ok" if self.ok else f"{len(self.violations)} violations"
        return f"axioms to order {self.order}: {status} (checked " + ", ".join(parts) + ")"


def verify_axioms(model: DerivationModel, order: int, sample=None) -> AxiomReport:
    """Check theta^(0) = id, additivity, the product rule, the iteration rule,
    and quotient relations on a spanning sample, to the given total order."""
    K = model.field
    m = model.m
    if sample is None:
        sample = model.sample_elements()
    passed = {"identity": 0, "additivity": 0, "product": 0, "iteration": 0, "relation": 0}
    violations = []
    theta_cache: dict = {}

    def th(idx, x, k):
        key = (idx, k)
        if key not in theta_cache:
            theta_cache[key] = model.theta(x, k)
        return theta_cache[key]

    def record(axiom, ok, witness):
        if ok:
            passed[axiom] += 1
        else:
            violations.append({"axiom": axiom, "witness": witness})

    zero_idx = mi_zero(m)
    for si, x in enumerate(sample):
        record("identity", model.eq(model.theta(x, zero_idx), x), {"sample": si})

    indices = list(mi_all_upto(m, order))
    # iteration rule on every sample element
    for si, x in enumerate(sample):
        for k in indices:
            for i, j in mi_splits(k):
                if i == zero_idx or j == zero_idx:
                    continue
                lhs = model.theta(th(si, x, j), i)
                rhs = th(si, x, k) * multi_binom(K, i, j)
                record(
                    "iteration",
                    model.eq(lhs, rhs),
                    {"sample": si, "pair": (i, j)},
                )

    # additivity and product rule on consecutive sample pairs
    pairs = [(a, b) for a in range(len(sample)) for b in range(a, len(sample))]
    if len(pairs) > 12:
        pairs = pairs[:6] + pairs[-6:]
    for si, sj in pairs:
        x, y = sample[si], sample[sj]
        xy = x * y
        xplusy = x + y
        for k in indices:
            if k == zero_idx:
                continue
            record(
                "additivity",
                model.eq(model.theta(xplusy, k), th(si, x, k) + th(sj, y, k)),
                {"samples": (si, sj), "k": k},
            )
            acc = None
            for i, j in mi_splits(k):
                term = th(si, x, i) * th(sj, y, j)
                acc = term if acc is None else acc + term
            record(
                "product",
                model.eq(model.theta(xy, k), acc),
                {"samples": (si, sj), "k": k},
            )

    for tag, diff in model.relation_entries(order):
        bad = [n for n, c in diff.coeffs.items() if not c.is_zero()]
        record("relation", not bad, {"relation": tag, "orders": bad})

    return AxiomReport(not violations, order, passed, violations)


# ---------------------------------------------------------------------------
# p-power composition (the digit-by-digit reconstruction of theta)


def theta_from_p_powers(model: DerivationModel, x, k):
    """theta^(k) assembled from the maps theta^(p^j) only: per variable,
    compose each p-power map digit-many times and divide by the digit
    factorials."""
    K = model.field
    p = K.p
    k = as_index(k, model.m)
    scalar = 1
    for var in range(model.m - 1, -1, -1):
        n = k[var]
        if not n:
            continue
        digits = int_digits(p, n, num_digits(p, n))
        for j in range(len(digits) - 1, -1, -1):
            d = digits[j]
            if not d:
                continue
            scalar = scalar * K.inv(math.factorial(d)) % p
            for _ in range(d):
                x = model.theta_var(x, p**j, var)
    return x * scalar


def compose_from_p_powers(model: DerivationModel, n: int, var: int = 0) -> Callable:
    """Return the operator x -> theta^(n)(x) built from p-power maps."""
    k = tuple(n if i == var else 0 for i in range(model.m))
    return lambda x: theta_from_p_powers(model, x, k)


def univariate_multivariate_roundtrip(model: DerivationModel, order=None) -> AxiomReport:
    """For m >= 2: commutation of the per-variable derivations on the sample,
    plus the m-variate iteration rule for the assembled theta^(k)."""
    order = order or model.working_order
    if model.m < 2:
        return AxiomReport(True, order, {"commutation": 0, "iteration": 0}, [])
    passed = {"commutation": 0, "iteration": 0}
    violations = []
    sample = model.sample_elements()
    K = model.field
    for si, x in enumerate(sample):
        for v1 in range(model.m):
            for v2 in range(v1 + 1, model.m):
                for a in range(1, order):
                    for b in range(1, order - a + 1):
                        lhs = model.theta_var(model.theta_var(x, b, v2), a, v1)
                        rhs = model.theta_var(model.theta_var(x, a, v1), b, v2)
                        ok = model.eq(lhs, rhs)
                        if ok:
                            passed["commutation"] += 1
                        else:
                            violations.append(
                                {
                                    "axiom": "commutation",
                                    "witness": {"sample": si, "vars": (v1, v2), "orders": (a, b)},
                                }
                            )
        for k in mi_all_upto(model.m, order):
            for i, j in mi_splits(k):
                if not mi_abs(i) or not mi_abs(j):
                    continue
                lhs = model.theta(model.theta(x, j), i)
                rhs = model.theta(x, k) * multi_binom(K, i, j)
                ok = model.eq(lhs, rhs)
                if ok:
                    passed["iteration"] += 1
                else:
                    violations.append(
                        {"axiom": "iteration", "witness": {"sample": si, "pair": (i, j)}}
                    )
    return AxiomReport(not violations, order, passed, violations)


# ---------------------------------------------------------------------------
# Non-degeneracy witnesses


def check_nondegenerate(model: DerivationModel, ansatz: Sequence) -> dict:
    """Search the K-span of the ansatz for witnesses x_j with
    theta_i^(1)(x_j) = delta_ij.  Verdicts are relative to the ansatz."""
    K = model.field
    m = model.m
    one_coords = element_coords(model.one())
    images = []  # images[b][i] = coords of theta^(e_i)(ansatz[b])
    for b in ansatz:
        images.append([element_coords(model.theta(b, mi_unit(m, i))) for i in range(m)])
    witnesses = []
    for j in range(m):
        keys = set()
        for row in images:
            for c in row:
                keys.update(c)
        keys.update(one_coords)
        keys = sorted(keys, key=repr)
        rows = []
        rhs = []
        for i in range(m):
            for key in keys:
                rows.append([images[b][i].get(key, 0) for b in range(len(ansatz))])
                rhs.append(one_coords.get(key, 0) if i == j else 0)
        sol = linalg.solve(K, rows, rhs)
        if sol is None:
            return {
                "ok": False,
                "witnesses": witnesses,
                "failed_at": j,
                "note": "no witness inside the ansatz",
            }
        vec, _ = sol
        combo = None
        for c, b in zip(vec, ansatz):
            if c:
                term = b * c
                combo = term if combo is None else combo + term
        witnesses.append(combo if combo is not None else model.zero())
    return {"ok": True, "witnesses": witnesses, "note": "relative to the ansatz"}


# ---------------------------------------------------------------------------
# Localization


@dataclass
class LocalizationResult:
    model: DerivationModel
    inverse: object
    report: dict


def extend_localization(model: DerivationModel, s, order=None, prec=None) -> LocalizationResult:
    """Adjoin (verify) the inverse of s: theta(s^-1) must be theta(s)^-1,
    equivalently theta(s) * theta(s^-1) = 1 to the working order."""
    order = order or model.working_order
    ts = model.theta_T(s, order)
    try:
        ts_inv = ts.inverse(prec)
    except (ZeroDivisionError, ValueError) as exc:
        raise ValueError(f"element not invertible on the window: {exc}") from None
    product = ts * ts_inv
    one = model.one()
    bad = []
    for n in range(order + 1):
        want = one if n == 0 else model.zero()
        if not model.eq(product.coeff(n), want):
            bad.append(n)
    inv_elt = ts_inv.coeff(0)
    return LocalizationResult(
        model,
        inv_elt,
        {"ok": not bad, "order": order, "violations": bad},
    )


# ---------------------------------------------------------------------------
# Symbolic adjunction of a 1-dimensional solution


@dataclass
class SymbolicAdjunction:
    base: SeriesModel
    name: str
    rule: dict  # {n: LaurentSeries a_n}, a_0 omitted (it is 1)
    invertible: bool = True


def scalar_rule_compatible(model: SeriesModel, rule: dict, order: int) -> list:
    """Violations of the 1-dimensional compatibility condition
    binom(k+l, l) a_{k+l} = sum_{i+j=l} theta^(i)(a_k) a_j."""
    K = model.field
    a = {0: LaurentSeries.one(K)}
    a.update({n: v for n, v in rule.items() if n >= 1})
    get = lambda n: a.get(n, LaurentSeries.zero(K))
    bad = []
    for k in range(order + 1):
        for l in range(order + 1 - k):
            lhs = get(k + l) * multi_binom(K, (k,), (l,))
            rhs = None
            for i in range(l + 1):
                term = theta_series(get(k), i) * get(l - i)
                rhs = term if rhs is None else rhs + term
            if not (lhs - rhs).is_zero():
                bad.append((k, l))
    return bad


def adjoin_solution(adj: SymbolicAdjunction, working_order=None) -> PolyExtModel:
    """Build K((t))[y, y^-1] with the multiplicative action
    theta(y) = (sum a_n T^n) y; the rule must be compatible."""
    order = working_order or adj.base.working_order
    bad = scalar_rule_compatible(adj.base, adj.rule, order)
    if bad:
        raise ValueError(f"rule is not iterative; first failing pair {bad[0]}")
    gen = GenSpec(adj.name, invertible=adj.invertible)
    model = PolyExtModel(adj.base.field, [gen], {}, working_order=order)
    y = model.gen_element(adj.name)
    model.rules[adj.name] = {
        n: y * a_n for n, a_n in adj.rule.items() if n >= 1 and not a_n.is_zero()
    }
    model._rule_T_cache.clear()
    model._rule_pow_cache.clear()
    model._mono_T_cache.clear()
    return model


def complete_multiplicative_rule(K: PrimeField, p_data: dict, order: int) -> dict:
    """Extend prescribed values a_{p^j} to all a_n, n <= order, by the
    compatibility recurrence: strip the lowest nonzero digit of n."""
    p = K.p
    a = {0: LaurentSeries.one(K)}
    for j, v in p_data.items():
        if p**j <= order:
            a[p**j] = v

    def get(n):
        return a.get(n, LaurentSeries.zero(K))

    for n in range(1, order + 1):
        if n in a:
            continue
        digits = int_digits(p, n, num_digits(p, n))
        j = next(i for i, d in enumerate(digits) if d)
        nj = digits[j]
        q = p**j
        if q not in a:
            raise ValueError(f"missing p-power rule a_{q} needed for a_{n}")
        acc = None
        for i in range(q + 1):
            term = theta_series(get(n - q), i) * get(q - i)
            acc = term if acc is None else acc + term
        a[n] = acc * K.inv(nj)
    return {n: v for n, v in a.items() if n >= 1}


# ---------------------------------------------------------------------------
# Bounded searches: differential finiteness and constants


def differentially_finite_dim(
    model: DerivationModel,
    x: LaurentSeries,
    bound: int,
    coeff_lo: int = -24,
    coeff_hi: int = 25,
) -> dict:
    """Greedy dimension of span_F{ theta^(k)(x) : |k| <= bound } where F-
    coordinates are searched as Laurent polynomials on [coeff_lo, coeff_hi).
    The unit is seeded first so rational spans close over the window.
    The answer is an upper bound relative to that ansatz."""
    candidates = [model.one()]
    grew_at = 0
    for k in mi_all_upto(model.m, bound):
        candidates.append(model.theta(x, k))
    basis = []
    used = []
    for idx, v in enumerate(candidates):
        if v.is_zero():
            continue
        if basis:
            found = coordinates_in_basis(v, basis, coeff_lo, coeff_hi)
            if found is not None:
                continue
        basis.append(v)
        used.append(idx)
        grew_at = max(grew_at, idx)
    unit_only_extra = 1 if 0 in used else 0
    dim = len(basis)
    return {
        "dim": dim,
        "basis": basis,
        "window": (coeff_lo, coeff_hi),
        "bound": bound,
        "note": "upper bound relative to Laurent-polynomial coordinates",
        "grew_at_last_candidate": grew_at == len(candidates) - 1,
        "includes_unit": bool(unit_only_extra),
    }


def constants_in_ansatz(model: DerivationModel, ansatz: Sequence, order: int) -> dict:
    """K-basis of {sum l_b b : theta^(k) kills it for all 0 < |k| <= order},
    relative to the ansatz.  Equations are only taken at coordinates inside
    every contributing window."""
    K = model.field
    images = {}
    for k in mi_all_upto(model.m, order):
        if k == mi_zero(model.m):
            continue
        images[k] = [model.theta(b, k) for b in ansatz]
    rows = []
    dropped = 0
    for k, elems in sorted(images.items()):
        keys = set()
        for e in elems:
            keys.update(element_coords(e))
        for key in sorted(keys, key=repr):
            if not all(element_known_at(e, key) for e in elems):
                dropped += 1
                continue
            rows.append([element_coords(e).get(key, 0) for e in elems])
    basis_vecs = linalg.nullspace(K, rows, len(ansatz))
    found = []
    for vec in basis_vecs:
        combo = None
        for c, b in zip(vec, ansatz):
            if c:
                term = b * c
                combo = term if combo is None else combo + term
        found.append(combo if combo is not None else model.zero())
    return {
        "basis": found,
        "dim": len(found),
        "order": order,
        "dropped_unknown_coordinates": dropped,
        "note": "relative to ansatz and order bound",
    }


# ---------------------------------------------------------------------------
# Model description files


def model_from_json(obj: dict) -> DerivationModel:
    """Build a model from its JSON description: a prime, a working order, and
    generators that are either series literals or symbolic multiplicative
    rules (lists of [n, series] pairs)."""
    K = PrimeField(int(obj["p"]))
    order = int(obj.get("working_order", 16))
    gens = obj.get("generators", [])
    series_gens = [g for g in gens if g.get("kind", "series") == "series"]
    symbolic = [g for g in gens if g.get("kind") == "symbolic"]
    base = SeriesModel(K, working_order=order)
    if not symbolic:
        return base
    if len(symbolic) != 1:
        raise ValueError("only one symbolic generator per description is supported")
    g = symbolic[0]
    rule = {int(n): parse_series(K, lit) for n, lit in g.get("rule_a", [])}
    adj = SymbolicAdjunction(base, g["name"], rule, bool(g.get("invertible", True)))
    model = adjoin_solution(adj, working_order=order)
    model.description_series = [parse_series(K, s["series"]) for s in series_gens]
    return model
