"""End-to-end verification pipelines for three model families over K((t)).

Family 1 is the rational model: polynomial/monomial coefficients with the
standard action theta(t) = t + T, whose radical tower is trivial.  Family 2
adjoins r = sum_{k>=1} t^(alpha_k) for a p-adic exponent stream alpha; its
level-ell tower is generated by digit-shifted streams and its tensor square
has scalar constants.  Family 3 adjoins n streams s_i = sum_k a_{i,k} t^(p^k);
its level-ell tower realizes the kernel of an iterated Frobenius on a product
of n additive lines.

Each pipeline emits a report dict whose "assertions" list holds one record
per checked identity: {"formula_tag", "status", "window"/"order", "witness"?}.
Reports are deterministic functions of the config (no timestamps, no ambient
state); run_suite aggregates pipelines in config order.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .charp import (
    PAdicDigits,
    PrimeField,
    digit_shift,
    lucas_binom,
    num_digits,
    padic_combination,
    truncation,
)
from .derivations import (
    ExtElement,
    MonomialModel,
    SeriesModel,
    SymbolicAdjunction,
    adjoin_solution,
    complete_multiplicative_rule,
)
from .errors import Inconclusive, PrecisionError
from .groupscheme import (
    TensorGen,
    TensorSquare,
    constants_search,
    leg_closure_and_constants,
    recognize,
)
from .ide import (
    SolutionMatrix,
    check_descent,
    from_p_power_data,
    gauge_transform,
    ide_from_basis,
    identity_matrix,
    is_fundamental,
    validate,
)
from .series import (
    LaurentSeries,
    p_power_root,
    series_equal,
    theta_series,
)
from .towers import exponent, j_indices, kernel_subspace, make_bracket, theta_on_bracket

DEFAULT_SEED = 20260815


def suite_seed() -> int:
    return int(os.environ.get("IDGAL_SEED", DEFAULT_SEED))


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class ExampleConfig:
    """One pipeline run.  streams holds digit tuples (or PAdicDigits); a
    claim_streams override feeds the oracle side of each identity with
    different digits, turning the pipeline into a mutation detector."""

    which: int
    p: int
    streams: list = dc_field(default_factory=list)
    m: int = 1
    degree: int = 8
    window: tuple = (-16, 64)
    working_order: int = 16
    ell_min: int = 1
    ell_max: int = 1
    j_max: int = 3
    check_structure: bool = True
    constants_window: Optional[tuple] = None
    constants_order: int = 16
    claim_streams: Optional[list] = None
    label: str = ""

    def __post_init__(self):
        if self.which not in (1, 2, 3):
            raise ValueError(f"unknown pipeline {self.which}")
        K = PrimeField(self.p)
        self.streams = [_as_stream(K, s) for s in self.streams]
        if self.claim_streams is not None:
            self.claim_streams = [_as_stream(K, s) for s in self.claim_streams]
        if self.which == 2 and len(self.streams) != 1:
            raise ValueError("the sparse-exponent pipeline takes exactly one stream")
        if self.which == 3 and not self.streams:
            raise ValueError("the Frobenius-stream pipeline takes n >= 1 streams")
        if self.which == 1 and self.streams:
            raise ValueError("the rational pipeline takes no streams")
        if not self.label:
            self.label = f"family{self.which}-p{self.p}"


def _as_stream(K: PrimeField, s) -> PAdicDigits:
    if isinstance(s, PAdicDigits):
        return s
    return PAdicDigits(K, tuple(int(d) for d in s))


class _Report:
    """Accumulates assertion records; every record is JSON-ready."""

    def __init__(self, config: ExampleConfig):
        self.config = config
        self.assertions = []

    def record(self, tag: str, ok, window=None, order=None, witness=None):
        item = {"formula_tag": tag, "status": "pass" if ok else "fail"}
        if window is not None:
            item["window"] = list(window)
        if order is not None:
            item["order"] = order
        if witness is not None and not ok:
            item["witness"] = witness
        self.assertions.append(item)
        return bool(ok)

    def done(self, extra: Optional[dict] = None) -> dict:
        out = {
            "label": self.config.label,
            "which": self.config.which,
            "p": self.config.p,
            "window": list(self.config.window),
            "ok": all(a["status"] == "pass" for a in self.assertions),
            "assertions": self.assertions,
        }
        if extra:
            out.update(extra)
        return out


# ---------------------------------------------------------------------------
# Seeded digit streams


def seeded_digit_streams(p: int, count: int, depth: int = 8, seed: Optional[int] = None) -> list:
    """Random digit tuples with a forced nonzero top digit, so the series
    they define keep a full-depth precision window."""
    rng = random.Random(suite_seed() if seed is None else seed)
    out = []
    for _ in range(count):
        digits = [rng.randrange(p) for _ in range(depth)]
        if digits[-1] == 0:
            digits[-1] = rng.randrange(1, p)
        out.append(tuple(digits))
    return out


def stream_tensor_gens(
    K: PrimeField, ell: int, rows: Sequence, depth: int, rule_depth: int
) -> list:
    """Tensor-square generator data for level-ell roots of digit streams:
    generator w_i has w_i^(p^ell) = sum_{k>=ell} a_{i,k} t^(p^k) and
    theta^(p^j)(w_i) = a_{i,j+ell}."""
    p = K.p
    gens = []
    for i, row in enumerate(rows):
        a = list(row.digits) if isinstance(row, PAdicDigits) else list(row)
        value = LaurentSeries.from_terms(
            K, [(p**k, a[k]) for k in range(ell, depth)], prec=p**depth
        )
        inhom = {}
        j = 0
        while p**j <= rule_depth:
            if j + ell < depth and a[j + ell]:
                inhom[p**j] = LaurentSeries(K, {0: a[j + ell]}, prec=p ** (depth - ell) - p**j)
            j += 1
        gens.append(TensorGen(f"w{i + 1}", power=p**ell, value=value, inhom=inhom))
    return gens


def stream_tensor_square(
    K: PrimeField, ell: int, rows: Sequence, depth: int = 10, working_order: int = 16
) -> TensorSquare:
    rule_depth = max(working_order, K.p ** (ell + 1))
    gens = stream_tensor_gens(K, ell, rows, depth, rule_depth)
    return TensorSquare(K, gens, ell=ell, working_order=working_order)


def admissible_stream_rows(
    p: int,
    ell: int,
    n: int,
    depth: int = 10,
    seed: Optional[int] = None,
    max_attempts: int = 40,
    working_order: int = 16,
) -> tuple:
    """Digit rows whose right-leg constants search certifies scalars only and
    whose shifted roots carry bracket exponent exactly ell, found by
    rejection.  Thin digit patterns (zero leading digits, repeated rows,
    aligned digit columns) can leave the bounded constants search
    underdetermined, and near-periodic digit tails make the shifted root
    window-indistinguishable from a member of a shallower level: a finite
    stream cannot certify that its digits are not eventually periodic, so
    draws whose visible data fails either certificate are discarded.
    Returns (rows, tensor square, attempts)."""
    K = PrimeField(p)
    rng = random.Random(suite_seed() if seed is None else seed)
    one = LaurentSeries.one(K)
    for attempt in range(1, max_attempts + 1):
        rows = []
        for _ in range(n):
            a = [rng.randrange(p) for _ in range(depth)]
            a[ell] = rng.randrange(1, p)
            if a[-1] == 0:
                a[-1] = rng.randrange(1, p)
            rows.append(tuple(a))
        sq = stream_tensor_square(K, ell, rows, depth, working_order)
        leg = leg_closure_and_constants(sq, working_order)
        if not leg["scalars_only"]:
            continue
        digit_rows = [PAdicDigits(K, r) for r in rows]
        s_list = [_frob_stream_series(K, a) for a in digit_rows]
        w_list = [_frob_stream_series(K, a, shift=ell) for a in digit_rows]
        names = [f"w{i + 1}" for i in range(n)]
        try:
            ext = make_bracket(K, ell, dict(zip(names, w_list)),
                               [one] + s_list, working_order=working_order)
            if p ** (depth - ell) > 17 and exponent(ext)["exponent"] != ell:
                continue
        except (Inconclusive, PrecisionError):
            continue
        return rows, sq, attempt
    raise Inconclusive(
        f"no admissible digit rows for p={p}, ell={ell}, n={n} "
        f"within {max_attempts} draws"
    )


# ---------------------------------------------------------------------------
# Family 1: the rational model


def gen_example1(config: ExampleConfig) -> dict:
    """Level-one kernel = p-th powers inside the monomial box, level-two
    kernel = p^2-th powers, and the radical tower is trivial: the identity
    map already has every root the tower asks for."""
    if config.which != 1:
        raise ValueError("config.which must be 1")
    K = PrimeField(config.p)
    p = config.p
    rep = _Report(config)
    model = MonomialModel(K, config.m, working_order=config.working_order)
    ring = model.ring
    box = []
    from .charp import mi_box

    for e in mi_box((config.degree + 1,) * config.m):
        box.append(ring.poly({e: 1}))

    for ell in (1, 2):
        level = kernel_subspace(model, box, ell)
        q = p**ell
        want = [b for b in box if all(a % q == 0 for e, _ in b.coord_items() for a in e)]
        got_ok = len(level.basis) == len(want) and all(
            all(a % q == 0 for e, _ in b.coord_items() for a in e) for b in level.basis
        )
        rep.record(
            f"level{ell}-kernel-is-p{ell}-powers",
            got_ok,
            order=config.degree,
            witness=None if got_ok else {"dim": len(level.basis), "expected": len(want)},
        )

    # the radical generator of K((t)) at any level is t itself, already present
    one = LaurentSeries.one(K)
    t = LaurentSeries.t(K)
    for ell in range(1, max(2, config.ell_max) + 1):
        ext = make_bracket(K, ell, {"t": t}, [one], working_order=config.working_order)
        e = exponent(ext)
        rep.record(f"bracket-trivial-ell{ell}", e["exponent"] == 0, order=config.working_order)

    return rep.done()


# ---------------------------------------------------------------------------
# Family 2: one sparse exponent stream


def _stream_series(K: PrimeField, alpha: PAdicDigits) -> LaurentSeries:
    """r = sum_k t^(alpha_k), alpha_k the k-digit truncation; coefficients
    are known strictly below alpha_depth, where the next unknown digit could
    land (a zero digit keeps the truncation in place, so the boundary term
    itself is excluded)."""
    D = alpha.depth
    prec = truncation(alpha, D)
    terms = [(truncation(alpha, k), 1) for k in range(1, D) if truncation(alpha, k) < prec]
    return LaurentSeries.from_terms(K, terms, prec=prec)


def _partial_sum(K: PrimeField, alpha: PAdicDigits, j: int) -> LaurentSeries:
    return LaurentSeries.from_terms(K, [(truncation(alpha, k), 1) for k in range(1, j + 1)])


def _root_series(K: PrimeField, alpha: PAdicDigits, ell: int) -> LaurentSeries:
    """The level-ell radical generator: the p^ell-th root of
    t^(-alpha_ell) (r - sum_{k<=ell} t^(alpha_k))."""
    r = _stream_series(K, alpha)
    u = (r - _partial_sum(K, alpha, ell)).shift(-truncation(alpha, ell))
    return p_power_root(u, ell, K.p)


def example2_tensor_square(
    K: PrimeField, alpha: PAdicDigits, ell: int, working_order: int = 16
) -> TensorSquare:
    """Tensor square of the level-ell extension: one generator with the
    affine rule theta^(n)(g) = binom(alpha'', n) t^(-n) g + q_n, alpha'' the
    ell-shifted stream and q_n the base-series residual of the realization."""
    p = K.p
    alpha2 = digit_shift(alpha, ell)
    r1 = _root_series(K, alpha, ell)
    u = (_stream_series(K, alpha) - _partial_sum(K, alpha, ell)).shift(
        -truncation(alpha, ell)
    )
    linear = {}
    inhom = {}
    for n in range(1, working_order + 1):
        b = lucas_binom(K, alpha2, n)
        c_n = LaurentSeries.monomial(K, b, -n)
        q_n = theta_series(r1, n) - c_n * r1
        if b:
            linear[n] = c_n
        inhom[n] = q_n
    gen = TensorGen("rb", power=p**ell, value=u, linear=linear, inhom=inhom)
    return TensorSquare(K, [gen], ell=ell, working_order=working_order)


def gen_example2(config: ExampleConfig) -> dict:
    """Identity battery for the sparse-exponent extension: the closed form
    for theta^(p^j)(r), the 2x2 matrix system with its symbolic fundamental
    matrix, the two-route and affine-coordinate checks on the level-ell
    roots, root-stream composition, the graded tensor congruence, gauge
    descent to level ell, and (when configured) the scalar-constants search
    on the tensor square."""
    if config.which != 2:
        raise ValueError("config.which must be 2")
    K = PrimeField(config.p)
    p = config.p
    rep = _Report(config)
    alpha = config.streams[0]
    claim = (config.claim_streams or config.streams)[0]
    D = alpha.depth
    r = _stream_series(K, alpha)
    one = LaurentSeries.one(K)

    # closed form for theta at p-power orders; every range below is capped
    # by what the stream depth can certify, so shallow streams simply
    # produce fewer assertions instead of exhausting digit precision
    for j in range(min(config.j_max, D - 1) + 1):
        q = p**j
        lhs = theta_series(r, q)
        b = lucas_binom(K, truncation(claim, j + 1), q)
        rhs = (r - _partial_sum(K, claim, j)).shift(-q) * b
        eq = series_equal(lhs, rhs)
        rep.record(
            "theta-r-ppower",
            eq.equal,
            window=eq.window(),
            order=q,
            witness=None if eq.equal else {"j": j, "exponent": eq.first_mismatch},
        )

    # 2x2 matrix system and its symbolic fundamental matrix
    sys_order = min(8, p**D - 1)
    base8 = SeriesModel(K, working_order=sys_order)
    zero = LaurentSeries.zero(K)
    p_data = {}
    j = 0
    while p**j <= sys_order:
        b = lucas_binom(K, truncation(alpha, j + 1), p**j)
        B = LaurentSeries.monomial(K, b, -(p**j))
        p_data[j] = [[B, -(B * _partial_sum(K, alpha, j))], [zero, zero]]
        j += 1
    ide = from_p_power_data(base8, 2, p_data, sys_order)
    val = validate(ide)
    rep.record("matrix-system-iterative", val["ok"], order=sys_order,
               witness=None if val["ok"] else val["violations"][:2])
    rule = complete_multiplicative_rule(
        K, {j: M[0][0] for j, M in p_data.items()}, sys_order
    )
    ext = adjoin_solution(SymbolicAdjunction(base8, "s", rule), working_order=sys_order)
    s = ext.gen_element("s")
    Y = [[s, ext.embed(r)], [ext.embed(zero), ext.one()]]
    fund = is_fundamental(SolutionMatrix(ext, Y), ide, order=sys_order)
    rep.record("matrix-system-fundamental", fund["fundamental"], order=sys_order,
               witness=None if fund["fundamental"] else fund["witnesses"][:2])
    rep.record("matrix-system-determinant", fund["determinant_ok"], order=sys_order)

    # level-ell roots: two evaluation routes, affine coordinates, composition
    for ell in range(1, min(config.ell_max, D - 1) + 1):
        r1 = _root_series(K, alpha, ell)
        alpha2 = digit_shift(claim, ell)
        ext_b = make_bracket(
            K, ell, {"rb": r1}, [one, r], working_order=config.working_order
        )
        for jj in range(1, config.j_max + 1):
            routes = theta_on_bracket(ext_b, "rb", jj)
            rep.record(
                "theta-root-two-routes",
                routes["agree"],
                window=routes["window"],
                order=jj,
                witness=None if routes["agree"] else {"ell": ell, "exponent": routes["first_mismatch"]},
            )
        # the root is itself a sparse-exponent series for the shifted digit
        # stream, so the defect of theta^(n) against the leading affine term
        # is the finite sum over the digit places n can see: binom(b_k, n)
        # matches binom(alpha'', n) as soon as k reaches num_digits(n)
        for n in range(1, min(8, p ** (D - ell) - 1) + 1):
            cbin = lucas_binom(K, alpha2, n)
            c_n = LaurentSeries.monomial(K, cbin, -n)
            defect: dict = {}
            for k in range(1, num_digits(p, n)):
                bk = truncation(alpha2, k)
                dc = (lucas_binom(K, bk, n) - cbin) % p
                if dc:
                    e = bk - n
                    defect[e] = (defect.get(e, 0) + dc) % p
            want = c_n * r1 + LaurentSeries(K, defect)
            eq = series_equal(theta_series(r1, n), want)
            rep.record(
                "theta-root-affine",
                eq.equal,
                window=eq.window(),
                order=n,
                witness=None if eq.equal else {"ell": ell, "n": n, "exponent": eq.first_mismatch},
            )
        # non-membership below level ell is decidable only when the root
        # carries visible support beyond the coefficient window
        if config.check_structure and p ** (D - ell) > 17:
            e = exponent(ext_b)
            rep.record("root-exponent", e["exponent"] == ell, order=ell,
                       witness=None if e["exponent"] == ell else e)
    if config.ell_max >= 2:
        g1 = _root_series(K, alpha, 1)
        a1 = digit_shift(alpha, 1)
        again = p_power_root(
            (g1 - LaurentSeries.monomial(K, 1, truncation(a1, 1))).shift(
                -truncation(a1, 1)
            ),
            1,
            p,
        )
        eq = series_equal(again, _root_series(K, alpha, 2))
        rep.record("bracket-composition", eq.equal, window=eq.window(),
                   witness=None if eq.equal else {"exponent": eq.first_mismatch})

    # graded tensor congruence on the pair model
    for ell in range(1, min(config.ell_max, D - 1) + 1):
        n_cap = min(6, p ** (D - ell) - 1)
        sq = example2_tensor_square(
            K, alpha, ell, min(config.working_order, p ** (D - ell) - 1)
        )
        alpha2 = digit_shift(claim, ell)
        qq = p**ell
        cases = [(0, 1, 0), (0, 0, 1), (0, 1, 1), (2, 1, 1), (3, 1, 0)]
        if qq > 2:
            cases.append((1, qq - 1, 1))
        bad = None
        for n in range(1, n_cap + 1):
            for k, i, jdeg in cases:
                elt = ExtElement(sq.pair, {(i, jdeg): LaurentSeries.monomial(K, 1, k)})
                img = sq.pair.theta(elt, n)
                b = lucas_binom(K, padic_combination(k, i + jdeg, alpha2), n)
                want = LaurentSeries.monomial(K, b, k - n)
                for mono, c in img.coeffs.items():
                    if sum(mono) < i + jdeg:
                        continue
                    if mono != (i, jdeg):
                        if not c.is_zero():
                            bad = {"n": n, "case": [k, i, jdeg], "monomial": list(mono)}
                        continue
                    if not series_equal(c, want).equal:
                        bad = {"n": n, "case": [k, i, jdeg]}
                target = img.coeffs.get((i, jdeg), LaurentSeries.zero(K))
                if not series_equal(target, want).equal:
                    bad = bad or {"n": n, "case": [k, i, jdeg]}
                if bad:
                    break
            if bad:
                break
        rep.record("graded-congruence", bad is None, order=n_cap, witness=bad)

    # gauge descent to level ell
    if config.check_structure:
        for ell in range(1, min(config.ell_max, D - 1) + 1):
            d_order = min(max(8, p**ell), p**D - 1)
            base_d = SeriesModel(K, working_order=d_order)
            p_data_d = {}
            j = 0
            while p**j <= d_order:
                b = lucas_binom(K, truncation(alpha, j + 1), p**j)
                B = LaurentSeries.monomial(K, b, -(p**j))
                p_data_d[j] = [[B, -(B * _partial_sum(K, alpha, j))], [zero, zero]]
                j += 1
            ide_d = from_p_power_data(base_d, 2, p_data_d, d_order)
            Dmat = [
                [LaurentSeries.monomial(K, 1, truncation(alpha, ell)), _partial_sum(K, alpha, ell)],
                [zero, one],
            ]
            desc = check_descent(gauge_transform(ide_d, Dmat), ell)
            rep.record("gauge-descent", desc["ok"], order=d_order,
                       witness=None if desc["ok"] else desc["violations"][:2])

    # scalar constants of the tensor square (bounded search); the ansatz box
    # holds degree <= p-1 per leg, so cross monomials carry power content up
    # to p^2 and the search is underdetermined below order p^3
    extra = {}
    if config.constants_window is not None:
        lo, hi = config.constants_window
        c_order = min(max(config.constants_order, p ** 3), p ** (D - 1) - 1)
        sq = example2_tensor_square(
            K, alpha, 1, min(max(config.working_order, c_order), p ** (D - 1) - 1)
        )
        found = constants_search(sq, lo, hi, c_order)
        rep.record("tensor-constants-scalar", found["dim"] == 1,
                   window=(lo, hi), order=c_order,
                   witness=None if found["dim"] == 1 else {"dim": found["dim"]})
        extra["constants_dim"] = found["dim"]

    return rep.done(extra)


# ---------------------------------------------------------------------------
# Family 3: n Frobenius streams


def _frob_stream_series(K: PrimeField, a: PAdicDigits, shift: int = 0) -> LaurentSeries:
    """sum_{k>=shift} a_k t^(p^(k-shift)), precision p^(depth-shift)."""
    p = K.p
    D = a.depth
    terms = [(p ** (k - shift), a.digits[k]) for k in range(shift, D)]
    return LaurentSeries.from_terms(K, terms, prec=p ** (D - shift))


def gen_example3(config: ExampleConfig) -> dict:
    """Pipelines for the n-stream extension: digit reading of theta at
    p-power orders, level-ell roots with two-route checks, the basis IDE
    with its exact coefficient shape, gauge descent, and the tensor-square
    recognition of the constants as an iterated-Frobenius kernel on n lines
    (dimension p^(ell n), height = exponent = ell)."""
    if config.which != 3:
        raise ValueError("config.which must be 3")
    K = PrimeField(config.p)
    p = config.p
    rep = _Report(config)
    rows = config.streams
    claims = config.claim_streams or rows
    n = len(rows)
    depth = min(a.depth for a in rows)
    one = LaurentSeries.one(K)
    zero = LaurentSeries.zero(K)
    s_list = [_frob_stream_series(K, a) for a in rows]

    # theta reads digits at p-power orders and vanishes elsewhere
    for i, a in enumerate(rows):
        for j in range(min(config.j_max, depth - 1) + 1):
            got = theta_series(s_list[i], p**j)
            want = LaurentSeries(K, {0: claims[i].digits[j] % p})
            eq = series_equal(got, want)
            rep.record("stream-theta-ppower", eq.equal, window=eq.window(), order=p**j,
                       witness=None if eq.equal else {"i": i, "j": j, "exponent": eq.first_mismatch})
        off = [k for k in range(2, 9) if not _is_p_power(p, k)]
        bad = [k for k in off if not theta_series(s_list[i], k).is_zero()]
        rep.record("stream-theta-offpower", not bad, order=8,
                   witness=None if not bad else {"i": i, "orders": bad})

    extra = {"levels": {}}
    for ell in range(config.ell_min, config.ell_max + 1):
        w_list = [_frob_stream_series(K, a, shift=ell) for a in rows]
        names = [f"w{i + 1}" for i in range(n)]
        ext_b = make_bracket(
            K,
            ell,
            dict(zip(names, w_list)),
            [one] + s_list,
            working_order=config.working_order,
        )
        for i in range(n):
            for jj in range(1, 4):
                routes = theta_on_bracket(ext_b, names[i], jj)
                rep.record("root-two-routes", routes["agree"], window=routes["window"],
                           order=jj, witness=None if routes["agree"] else {"i": i, "ell": ell})
            for j in range(min(config.j_max, depth - ell - 1) + 1):
                got = theta_series(w_list[i], p**j)
                want = LaurentSeries(K, {0: claims[i].digits[j + ell] % p})
                eq = series_equal(got, want)
                rep.record("root-theta-digit", eq.equal, window=eq.window(), order=p**j,
                           witness=None if eq.equal else {"i": i, "j": j, "ell": ell})
        # same capacity gate as the sparse-exponent family: non-membership
        # is decidable only with root support beyond the coefficient window
        if config.check_structure and p ** (depth - ell) > 17:
            e = exponent(ext_b)
            rep.record("root-exponent", e["exponent"] == ell, order=ell,
                       witness=None if e["exponent"] == ell else e)
        if ell == 2:
            for i in range(n):
                mid = _frob_stream_series(K, rows[i], shift=1)
                again = p_power_root(
                    mid - LaurentSeries.monomial(K, rows[i].digits[1], 1), 1, p
                )
                eq = series_equal(again, w_list[i])
                rep.record("bracket-composition", eq.equal, window=eq.window(),
                           witness=None if eq.equal else {"i": i})

        # the IDE carried by the basis (1, w_1, .., w_n); the windowed
        # coefficient solve needs root support beyond the coefficient
        # window, same capacity gate as the exponent certificate
        if p ** (depth - ell) <= 17:
            extra["levels"][str(ell)] = _recognition_block(config, rep, rows, depth, ell)
            continue
        ide_order = 8
        base = SeriesModel(K, working_order=config.working_order)
        ide_w, val_rep = ide_from_basis(base, [one] + w_list, ide_order)
        rep.record("basis-ide-validate", val_rep["ok"], order=ide_order,
                   witness=None if val_rep["ok"] else val_rep["violations"][:2])
        shape_bad = None
        for k in range(1, ide_order + 1):
            M = ide_w.A((k,))
            jpow = _p_power_index(p, k)
            for a_i in range(n + 1):
                for b_i in range(n + 1):
                    c = M[a_i][b_i]
                    if jpow is not None and b_i == 0 and a_i >= 1:
                        digit = rows[a_i - 1].digits[jpow + ell] if jpow + ell < rows[a_i - 1].depth else 0
                        want = LaurentSeries(K, {0: digit % p})
                    else:
                        want = zero
                    if not (c - want).is_zero():
                        shape_bad = {"k": k, "entry": [a_i, b_i]}
            if shape_bad:
                break
        rep.record("basis-ide-shape", shape_bad is None, order=ide_order, witness=shape_bad)

        if config.check_structure:
            Dmat = identity_matrix(base, n + 1)
            for i in range(n):
                c_i = LaurentSeries.from_terms(
                    K, [(p**k, rows[i].digits[k + ell]) for k in range(ell)]
                )
                Dmat[i + 1][0] = c_i
            desc = check_descent(gauge_transform(ide_w, Dmat), ell)
            rep.record("gauge-descent", desc["ok"], order=ide_order,
                       witness=None if desc["ok"] else desc["violations"][:2])

        # tensor-square recognition
        extra["levels"][str(ell)] = _recognition_block(config, rep, rows, depth, ell)

    return rep.done(extra)


def _recognition_block(config: ExampleConfig, rep: _Report, rows, depth: int, ell: int) -> dict:
    """Run group-scheme recognition on the stream tensor square at one level
    and record its assertions; returns the level summary."""
    K = PrimeField(config.p)
    p = config.p
    n = len(rows)
    sq = stream_tensor_square(K, ell, rows, depth, config.working_order)
    rec = recognize(sq)
    for g in rec["generators"]:
        rep.record("diagonal-constant", g["constant"], order=rec["order"],
                   witness=None if g["constant"] else g)
        rep.record("diagonal-nilpotent", g["nilpotent_exact"] and g["lower_power_nonzero"],
                   order=rec["order"], witness=None if g["nilpotent_exact"] else g)
        rep.record("diagonal-primitive", g["primitive"] and g["counit_zero"],
                   order=rec["order"], witness=None if g["primitive"] else g)
    rep.record("monomial-independence", rec["independence"]["independent"],
               order=rec["order"])
    rep.record("constants-dimension", rec["dim"] == p ** (ell * n),
               order=rec["order"],
               witness=None if rec["dim"] == p ** (ell * n) else {"dim": rec["dim"]})
    rep.record("constants-span", rec["span"]["triangular"] and rec["span"]["leg_closed"]
               and rec["span"]["leg_scalars_only"], order=rec["order"],
               witness=None if rec["span"]["leg_scalars_only"] else rec["span"])
    rep.record("bialgebra-axioms", rec["bialgebra"]["ok"], order=rec["order"],
               witness=None if rec["bialgebra"]["ok"] else rec["bialgebra"]["failures"][:2])
    rep.record("frobenius-kernel-match", rec["matches_frobenius_kernel"],
               order=rec["order"])
    rep.record("height-equals-level", rec.get("height") == ell, order=rec["order"],
               witness=None if rec.get("height") == ell else {"height": rec.get("height")})
    rep.record("recognition", rec["ok"], order=rec["order"])
    return {
        "dim": rec["dim"],
        "height": rec.get("height"),
        "ok": rec["ok"],
    }


def _is_p_power(p: int, k: int) -> bool:
    while k % p == 0:
        k //= p
    return k == 1


def _p_power_index(p: int, k: int) -> Optional[int]:
    j = 0
    while k % p == 0:
        k //= p
        j += 1
    return j if k == 1 else None


# ---------------------------------------------------------------------------
# Suite driver


def run_pipeline(config: ExampleConfig) -> dict:
    if config.which == 1:
        return gen_example1(config)
    if config.which == 2:
        return gen_example2(config)
    return gen_example3(config)


# hand-checked digit streams: deep enough that every structure certificate
# (root exponent, scalar tensor constants, basis IDE shape) is decided
# inside the default windows
CANONICAL_EX2 = {
    2: (1, 0, 0, 0, 1, 0, 1, 1, 1, 1),
    3: (1, 2, 1, 1, 0, 2, 1, 1),
}
CANONICAL_EX3 = {
    2: (1, 1, 0, 1, 0, 0, 1, 1),
    3: (1, 0, 2, 1, 1, 0, 1, 2),
}


def default_suite(primes: Sequence[int] = (2, 3)) -> list:
    """Small deterministic suite: the rational model, the canonical stream
    (full structure checks) plus one seeded stream (identity checks) per
    prime for the sparse-exponent family, and a one-stream level-1 run of
    the Frobenius family."""
    configs = []
    for p in primes:
        configs.append(ExampleConfig(which=1, p=p, degree=4 * p, ell_max=2))
        if p in CANONICAL_EX2:
            configs.append(ExampleConfig(
                which=2, p=p, streams=[CANONICAL_EX2[p]], ell_max=2,
                constants_window=(-6, 7), label=f"family2-p{p}-canonical",
            ))
        stream = seeded_digit_streams(p, 1, depth=8)[0]
        configs.append(ExampleConfig(which=2, p=p, streams=[stream], ell_max=2,
                                     check_structure=False))
        if p in CANONICAL_EX3:
            configs.append(ExampleConfig(
                which=3, p=p, streams=[CANONICAL_EX3[p]], ell_max=2,
                label=f"family3-p{p}-canonical",
            ))
        rows, _, _ = admissible_stream_rows(p, 1, 1, depth=10)
        configs.append(ExampleConfig(which=3, p=p, streams=rows, ell_max=1))
    return configs


def run_suite(configs: Sequence[ExampleConfig]) -> dict:
    reports = [run_pipeline(c) for c in configs]
    return {
        "ok": all(r["ok"] for r in reports),
        "count": len(reports),
        "reports": reports,
    }
