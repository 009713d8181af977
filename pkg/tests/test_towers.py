"""Kernel towers and bracket extensions.

Kernel oracle: theta^(j)(x^e) = binom(e, j) x^(e-j), so x^e lies in the
level-ell kernel exactly when binom(e, j) vanishes mod p for every
0 < j < p^ell, which by the digit criterion happens exactly when p^ell
divides e.  Both halves of that equivalence are recomputed here from
math.comb before being compared against the package.
"""

import math

import pytest

from idgal.charp import PrimeField
from idgal.derivations import MonomialModel
from idgal.errors import Inconclusive
from idgal.series import (
    LaurentSeries,
    frobenius_power,
    p_power_root,
    parse_series,
    theta_series,
)
from idgal.towers import (
    exponent,
    j_indices,
    kernel_in_ansatz,
    kernel_subspace,
    make_bracket,
    p_power_orders,
    theta_on_bracket,
    verify_tower_degrees,
)

K2 = PrimeField(2)
K3 = PrimeField(3)


def test_j_indices_enumerate_the_level_box():
    assert j_indices(2, 0, 1) == []
    assert j_indices(2, 1, 1) == [(1,)]
    assert j_indices(2, 2, 1) == [(1,), (2,), (3,)]
    grid = j_indices(3, 1, 2)
    assert len(grid) == 8 and (0, 0) not in grid
    assert all(0 <= a < 3 for k in grid for a in k)
    assert p_power_orders(3, 27) == [1, 3, 9, 27]


def test_kernel_exponents_are_the_p_power_multiples():
    for K, ell in [(K2, 1), (K2, 2), (K3, 1)]:
        p = K.p
        q = p**ell
        deg = 2 * q + p
        # oracle: binom(e, j) = 0 mod p for all 0 < j < q iff q divides e
        for e in range(deg + 1):
            killed = all(math.comb(e, j) % p == 0 for j in range(1, q))
            assert killed == (e % q == 0)
        model = MonomialModel(K, 1, working_order=max(8, q))
        ansatz = [model.ring.poly({(e,): 1}) for e in range(deg + 1)]
        level = kernel_subspace(model, ansatz, ell)
        want_dim = sum(1 for e in range(deg + 1) if e % q == 0)
        assert level.report["dim"] == want_dim
        for b in level.basis:
            assert all(e[0] % q == 0 for e in b.coeffs)


def test_kernel_in_ansatz_with_no_indices_returns_everything():
    model = MonomialModel(K2, 1, working_order=4)
    ansatz = [model.ring.poly({(e,): 1}) for e in range(3)]
    res = kernel_in_ansatz(model, ansatz, [])
    assert res["basis"] == ansatz


def test_tower_degree_grid():
    for p in (2, 3):
        K = PrimeField(p)
        for m in (1, 2):
            for ell in (1, 2):
                deg = p**ell + p - 1
                model = MonomialModel(K, m, working_order=max(8, p**ell))
                rep = verify_tower_degrees(model, ell, deg)
                assert rep["ok"], (p, m, ell, rep)
                assert rep["degree"] == p**m
                assert rep["independent"] and not rep["unspanned"]
                assert len(rep["witnesses"]) == p**m - 1
                assert len(rep["basis_exponents"]) == p**m
    with pytest.raises(ValueError):
        verify_tower_degrees(MonomialModel(K3, 1, working_order=8), 2, 7)


def test_bracket_certifies_and_differentiates_both_routes():
    one = LaurentSeries.one(K2)
    t = LaurentSeries.monomial(K2, 1, 1)
    t2 = LaurentSeries.monomial(K2, 1, 2)
    ext = make_bracket(K2, 1, {"w": t}, [one, t2], membership_window=(0, 1), working_order=8)
    assert ext.degree_per_generator() == 2
    assert ext.values["w"] == t2
    for j in range(5):
        rep = theta_on_bracket(ext, "w", j)
        assert rep["agree"], rep
        assert rep["value"] == theta_series(t, j)
    assert exponent(ext)["exponent"] == 1
    with pytest.raises(Inconclusive):
        exponent(ext, e_max=0)
    # with only the unit downstairs and constant coordinates, t^2 has no home
    with pytest.raises(Inconclusive):
        make_bracket(K2, 1, {"w": t}, [one], membership_window=(0, 1), working_order=8)


def test_bracket_composition_matches_single_level_two_step():
    # adjoining a p-th root twice is the same as adjoining a p^2-th root:
    # the two root-formula routes to theta^(j) of the generator coincide
    for K, g_text in [(K2, "1*t^1 + 1*t^3 + 1*t^5"), (K3, "1*t^1 + 2*t^2 + 1*t^4")]:
        p = K.p
        g = parse_series(K, g_text)
        f2 = frobenius_power(g, 2, p)
        for j in range(4):
            direct = p_power_root(theta_series(f2, j * p * p), 2, p)
            stepwise = p_power_root(
                p_power_root(theta_series(f2, j * p * p), 1, p), 1, p
            )
            assert direct == stepwise == theta_series(g, j)
