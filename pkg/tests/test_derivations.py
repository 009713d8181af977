"""Iterative derivation models: axiom verification, corruption detection,
p-power reassembly, symbolic adjunction, and span dimensions.

Multiplicative-rule oracle: with an integer exponent c, the rule
theta(y) = sum_n binom(c, n) t^-n T^n y is iterative, so completing the
p-power data {a_{p^j} = binom(c, p^j) t^-p^j} by the digit recurrence must
reproduce binom(c, n) t^-n at every n.  The expected coefficients come from
math.comb reduced mod p, independent of the package's Lucas code.
"""

import math

import pytest

from idgal.charp import PrimeField
from idgal.derivations import (
    MonomialModel,
    SeriesModel,
    SymbolicAdjunction,
    adjoin_solution,
    complete_multiplicative_rule,
    constants_in_ansatz,
    corrupted_variants,
    differentially_finite_dim,
    extend_localization,
    model_from_json,
    scalar_rule_compatible,
    theta_from_p_powers,
    univariate_multivariate_roundtrip,
    verify_axioms,
)
from idgal.series import LaurentSeries, parse_series, serialize_series, theta_series

K2 = PrimeField(2)
K3 = PrimeField(3)


def binomial_rule(K, c, order):
    """{n: binom(c, n) t^-n mod p} for 1 <= n <= order, via math.comb."""
    rule = {}
    for n in range(1, order + 1):
        v = math.comb(c, n) % K.p
        if v:
            rule[n] = LaurentSeries.monomial(K, v, -n)
    return rule


def test_series_model_axioms_all_primes():
    for p in (2, 3, 5):
        model = SeriesModel(PrimeField(p), working_order=8)
        rep = verify_axioms(model, order=8)
        assert rep.ok, rep.violations[:2]
        for axiom in ("identity", "additivity", "product", "iteration"):
            assert rep.passed[axiom] > 0


def test_monomial_model_axioms_and_roundtrip():
    model = MonomialModel(K2, 2, working_order=4)
    rep = verify_axioms(model, order=4)
    assert rep.ok, rep.violations[:2]
    round_rep = univariate_multivariate_roundtrip(model, order=4)
    assert round_rep.ok, round_rep.violations[:2]


def test_every_corruption_mode_is_detected():
    for K in (K2, K3):
        base = SeriesModel(K, working_order=8)
        for mode, broken in corrupted_variants(base).items():
            rep = verify_axioms(broken, order=8)
            assert not rep.ok, f"corruption {mode!r} went undetected for p={K.p}"
            assert rep.violations
            assert rep.violated_axioms()


def test_theta_reassembles_from_p_power_maps():
    model = SeriesModel(K3, working_order=12)
    x = parse_series(K3, "1*t^-2 + 1*t^1 + 2*t^4", prec=20)
    for n in range(13):
        assert theta_from_p_powers(model, x, (n,)) == theta_series(x, n)
    multi = MonomialModel(K2, 2, working_order=4)
    u = multi.ring.poly({(1, 0): 1, (1, 1): 1})
    for k in [(0, 0), (1, 0), (0, 1), (2, 1), (1, 2), (3, 3)]:
        assert theta_from_p_powers(multi, u, k) == multi.theta(u, k)


def test_complete_multiplicative_rule_matches_binomial_oracle():
    for K, c, order in [(K2, 11, 15), (K3, 17, 13)]:
        p = K.p
        p_data = {}
        j = 0
        while p**j <= order:
            v = math.comb(c, p**j) % p
            p_data[j] = LaurentSeries.monomial(K, v, -(p**j)) if v else LaurentSeries.zero(K)
            j += 1
        full = complete_multiplicative_rule(K, p_data, order)
        expect = binomial_rule(K, c, order)
        for n in range(1, order + 1):
            got = full.get(n, LaurentSeries.zero(K))
            want = expect.get(n, LaurentSeries.zero(K))
            assert got == want, (n, got, want)


def test_scalar_rule_compatibility_accepts_and_rejects():
    rule = binomial_rule(K2, 11, 8)
    assert scalar_rule_compatible(SeriesModel(K2, 8), rule, 8) == []
    broken = dict(rule)
    broken[2] = broken.get(2, LaurentSeries.zero(K2)) + LaurentSeries.one(K2)
    bad = scalar_rule_compatible(SeriesModel(K2, 8), broken, 8)
    assert bad
    with pytest.raises(ValueError):
        adjoin_solution(SymbolicAdjunction(SeriesModel(K2, 8), "y", broken))


def test_adjoined_solution_satisfies_axioms_and_rule():
    rule = binomial_rule(K2, 11, 8)
    model = adjoin_solution(SymbolicAdjunction(SeriesModel(K2, 8), "y", rule), working_order=8)
    rep = verify_axioms(model, order=8)
    assert rep.ok, rep.violations[:2]
    y = model.gen_element("y")
    ty = model.theta_T(y, 8)
    for n in range(9):
        a_n = rule.get(n, LaurentSeries.zero(K2)) if n else LaurentSeries.one(K2)
        assert model.eq(ty.coeff(n), y * a_n)


def test_localization_verifies_inverse_action():
    model = SeriesModel(K2, working_order=6)
    s = parse_series(K2, "1*t^0 + 1*t^1")
    res = extend_localization(model, s, order=6, prec=12)
    assert res.report["ok"]
    assert (s * res.inverse).truncate(12) == LaurentSeries.one(K2).truncate(12)
    with pytest.raises(ValueError):
        extend_localization(model, LaurentSeries.zero(K2), order=4, prec=8)


def test_differentially_finite_dim_on_monomials():
    model = SeriesModel(K2, working_order=16)
    # every theta image of a window monomial is again a window multiple of 1
    inside = differentially_finite_dim(model, LaurentSeries.monomial(K2, 1, 5), bound=6)
    assert inside["dim"] == 1 and inside["includes_unit"]
    # t^30 sits beyond the coordinate window, its theta images fold back in
    outside = differentially_finite_dim(model, LaurentSeries.monomial(K2, 1, 30), bound=6)
    assert outside["dim"] == 2 and outside["includes_unit"]


def test_constants_in_ansatz_keeps_only_the_unit():
    model = SeriesModel(K2, working_order=8)
    t = LaurentSeries.monomial(K2, 1, 1)
    res = constants_in_ansatz(model, [LaurentSeries.one(K2), t, t * t], order=2)
    assert res["dim"] == 1
    c = res["basis"][0]
    assert not c.is_zero()
    for k in (1, 2):
        assert theta_series(c, k).is_zero()


def test_model_from_json_builds_symbolic_extension():
    rule = binomial_rule(K2, 11, 8)
    obj = {
        "p": 2,
        "working_order": 8,
        "generators": [
            {
                "kind": "symbolic",
                "name": "y",
                "rule_a": [[n, serialize_series(v)] for n, v in sorted(rule.items())],
                "invertible": True,
            }
        ],
    }
    model = model_from_json(obj)
    assert verify_axioms(model, order=6).ok
    plain = model_from_json({"p": 3, "working_order": 8, "generators": []})
    assert isinstance(plain, SeriesModel)
    assert plain.field.p == 3
