"""Truncated iterative differential systems: compatibility validation,
fundamental solutions, origin solves, gauge covariance, descent, p-power
completion, basis read-off, and the JSON form.

Oracle for the 1x1 regular system: y = 1 + t over F_2 has theta images
theta^(1)(y) = 1 and theta^(k)(y) = 0 for k >= 2, so A_1 = (1 + t)^-1 and
all higher coefficients vanish.  Every derived check below is computed
from that closed form, not from the library under test.
"""

import json
import math

import pytest

from idgal.charp import PrimeField
from idgal.derivations import SeriesModel, SymbolicAdjunction, adjoin_solution
from idgal.errors import PoleAtOrigin
from idgal.ide import (
    IDE,
    SolutionMatrix,
    check_descent,
    from_p_power_data,
    gauge_transform,
    ide_from_basis,
    ide_from_json,
    ide_to_json,
    is_fundamental,
    mat_mul,
    solve_at_origin,
    validate,
)
from idgal.series import LaurentSeries, parse_series

K2 = PrimeField(2)
K3 = PrimeField(3)


def one_plus_t_system(order=8, prec=40):
    """IDE over F_2 with fundamental solution y = 1 + t (see module docstring)."""
    model = SeriesModel(K2, working_order=order)
    y = parse_series(K2, "1*t^0 + 1*t^1")
    a1 = y.inverse(prec=prec)
    ide = IDE(model, 1, order, {(1,): [[a1]]})
    return model, ide, y


def test_trivial_system_validates_and_has_constant_solution():
    model = SeriesModel(K2, working_order=6)
    ide = IDE(model, 2, 6, {})
    assert validate(ide)["ok"]
    Y = [
        [LaurentSeries.one(K2), LaurentSeries.zero(K2)],
        [LaurentSeries.zero(K2), LaurentSeries.one(K2)],
    ]
    rep = is_fundamental(SolutionMatrix(model, Y), ide)
    assert rep["ok"] and rep["fundamental"] and rep["determinant_ok"]


def test_regular_1x1_system_full_cycle():
    model, ide, y = one_plus_t_system()
    val = validate(ide)
    assert val["ok"] and val["checked_pairs"] > 0
    rep = is_fundamental(SolutionMatrix(model, [[y]]), ide)
    assert rep["ok"], rep
    Y, origin_rep = solve_at_origin(ide, [[1]])
    assert origin_rep["ok"]
    assert Y[0][0] == y.truncate(ide.order + 1)


def test_validate_rejects_corrupted_coefficient_with_witness():
    model, ide, y = one_plus_t_system()
    bad_coeffs = dict(ide.coeffs)
    bad_coeffs[(2,)] = [[LaurentSeries.one(K2)]]
    bad = IDE(model, 1, ide.order, bad_coeffs)
    val = validate(bad)
    assert not val["ok"]
    v = val["violations"][0]
    assert "pair" in v and v["entries"] == [(0, 0)]
    rep = is_fundamental(SolutionMatrix(model, [[y]]), bad)
    assert not rep["ok"]
    assert any(w["entry"] == (0, 0) for w in rep["witnesses"])


def test_solve_at_origin_rejects_poles():
    model = SeriesModel(K2, working_order=4)
    ide = IDE(model, 1, 4, {(1,): [[LaurentSeries.monomial(K2, 1, -1)]]})
    with pytest.raises(PoleAtOrigin):
        solve_at_origin(ide, [[1]])


def test_gauge_transform_covariance_2x2():
    order = 8
    model = SeriesModel(K2, working_order=order)
    y = parse_series(K2, "1*t^0 + 1*t^1")
    a1 = y.inverse(prec=40)
    zero = LaurentSeries.zero(K2)
    one = LaurentSeries.one(K2)
    t = LaurentSeries.monomial(K2, 1, 1)
    ide = IDE(model, 2, order, {(1,): [[a1, zero], [zero, zero]]})
    assert validate(ide)["ok"]
    Y = [[y, zero], [zero, one]]
    assert is_fundamental(SolutionMatrix(model, Y), ide)["ok"]
    D = [[one, t], [zero, one]]
    gauged = gauge_transform(ide, D)
    assert validate(gauged)["ok"]
    D_inv = [[one, t], [zero, one]]  # unipotent over F_2: D is its own inverse
    rep = is_fundamental(SolutionMatrix(model, mat_mul(D_inv, Y)), gauged)
    assert rep["ok"], rep


def test_from_p_power_data_matches_binomial_family():
    c, order = 11, 8
    p_data = {}
    j = 0
    while 2**j <= order:
        v = math.comb(c, 2**j) % 2
        p_data[j] = [[LaurentSeries.monomial(K2, v, -(2**j)) if v else LaurentSeries.zero(K2)]]
        j += 1
    model = SeriesModel(K2, working_order=order)
    ide = from_p_power_data(model, 1, p_data, order)
    assert validate(ide)["ok"]
    for k in range(1, order + 1):
        v = math.comb(c, k) % 2
        want = LaurentSeries.monomial(K2, v, -k) if v else LaurentSeries.zero(K2)
        assert ide.A((k,))[0][0] == want, k
    with pytest.raises(ValueError):
        from_p_power_data(model, 1, {0: p_data[0]}, order)


def test_check_descent_support_and_entry_conditions():
    model = SeriesModel(K2, working_order=8)
    one = LaurentSeries.one(K2)
    t2 = LaurentSeries.monomial(K2, 1, 2)
    ok = IDE(model, 1, 8, {(2,): [[t2]], (4,): [[one]]})
    assert check_descent(ok, 1)["ok"]  # squares are killed by theta^(1)
    bad_support = IDE(model, 1, 8, {(1,): [[one]]})
    rep = check_descent(bad_support, 1)
    assert not rep["ok"] and rep["violations"][0]["kind"] == "support"
    bad_entry = IDE(model, 1, 8, {(2,): [[LaurentSeries.monomial(K2, 1, 1)]]})
    rep = check_descent(bad_entry, 1)
    assert not rep["ok"]
    assert any(v["kind"] == "entry-derivative" for v in rep["violations"])


def test_ide_from_basis_monomial_read_off():
    rule = {}
    for n in range(1, 9):
        v = math.comb(11, n) % 2
        if v:
            rule[n] = LaurentSeries.monomial(K2, v, -n)
    ext = adjoin_solution(SymbolicAdjunction(SeriesModel(K2, 8), "y", rule), working_order=8)
    basis = [ext.one(), ext.gen_element("y")]
    ide, report = ide_from_basis(ext, basis, 8)
    assert report["ok"]
    for k in range(1, 9):
        M = ide.A((k,))
        assert M[0][0].is_zero() and M[0][1].is_zero() and M[1][0].is_zero()
        assert M[1][1] == rule.get(k, LaurentSeries.zero(K2))


def test_ide_from_basis_series_solver_path():
    model = SeriesModel(K2, working_order=8)
    one = LaurentSeries.one(K2)
    s = LaurentSeries.monomial(K2, 1, 40)
    ide, report = ide_from_basis(model, [one, s], 8)
    assert report["ok"]
    for k in range(1, 9):
        v = math.comb(40, k) % 2
        want = LaurentSeries.monomial(K2, v, -k) if v else LaurentSeries.zero(K2)
        assert ide.A((k,))[1][1] == want
    # theta^(1)(t^19 + t^40) = t^18: above the unit's window, and matching
    # it through the second element drags in an uncancellable t^39
    x = parse_series(K2, "1*t^19 + 1*t^40")
    with pytest.raises(ValueError):
        ide_from_basis(model, [one, x], 8)


def test_json_roundtrip_is_exact_and_deterministic():
    model, ide, _ = one_plus_t_system()
    obj = ide_to_json(ide)
    back = ide_from_json(obj)
    assert back.n == ide.n and back.order == ide.order
    assert sorted(back.coeffs) == sorted(ide.coeffs)
    for k, M in ide.coeffs.items():
        got = back.coeffs[k]
        for i in range(ide.n):
            for j in range(ide.n):
                assert got[i][j] == M[i][j]
    text1 = json.dumps(obj, sort_keys=True)
    text2 = json.dumps(ide_to_json(ide_from_json(json.loads(text1))), sort_keys=True)
    assert text1 == text2
    assert validate(back)["ok"]
