"""Kernel towers and purely inseparable bracket extensions.

Level ell of the tower is the joint kernel of every theta^(j) with j nonzero
and entries below p^ell.  Bracket extensions adjoin p^ell-th roots of kernel
elements; their derivations are pinned by the root formula

    theta^(j)(g) = (theta^(j p^ell)(g^{p^ell}))^{1/p^ell}

which is only well formed because theta^(n) kills g^{p^ell} for n outside
p^ell Z.  Every bracket computation here runs twice, once through the root
formula and once termwise on the series realization, and the two routes must
agree on the visible window.

Membership in the base field is decided by coordinate solvability against a
declared basis with Laurent-polynomial coordinates; derivative rows at
p-power orders are stacked into the solve as a redundancy check on the
theta data (they are Vandermonde consequences of the base rows, so they
cannot flip a verdict).  Verdicts are always relative to that ansatz and
window: a positive answer certifies the relation on the visible window
only, and a negative answer rules out only window-supported coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from . import linalg
from .charp import mi_box, mi_zero
from .derivations import (
    DerivationModel,
    MonomialModel,
    element_coords,
    element_known_at,
)
from .errors import Inconclusive
from .series import (
    LaurentSeries,
    coordinates_in_basis,
    frobenius_power,
    p_power_root,
    series_equal,
    theta_series,
)

# ---------------------------------------------------------------------------
# Level index sets


def j_indices(p: int, ell: int, m: int) -> list:
    """Nonzero multi-indices with every entry below p^ell."""
    if ell == 0:
        return []
    out = [k for k in mi_box((p**ell,) * m) if k != mi_zero(m)]
    return sorted(out)


# ---------------------------------------------------------------------------
# Kernel subspaces inside a finite ansatz


@dataclass
class TowerLevel:
    model: DerivationModel
    ell: int
    basis: list
    report: dict


def kernel_in_ansatz(model: DerivationModel, ansatz: Sequence, indices: Sequence) -> dict:
    """K-basis of {x in span(ansatz) : theta^(j)(x) = 0 for j in indices}."""
    K = model.field
    if not indices:
        return {"basis": list(ansatz), "dropped_unknown_coordinates": 0}
    images = {j: [model.theta(b, j) for b in ansatz] for j in indices}
    rows = []
    dropped = 0
    for j in sorted(images):
        elems = images[j]
        keys = set()
        for e in elems:
            keys.update(element_coords(e))
        for key in sorted(keys, key=repr):
            if not all(element_known_at(e, key) for e in elems):
                dropped += 1
                continue
            rows.append([element_coords(e).get(key, 0) for e in elems])
    vecs = linalg.nullspace(K, rows, len(ansatz))
    basis = []
    for vec in vecs:
        combo = None
        for c, b in zip(vec, ansatz):
            if c:
                term = b * c
                combo = term if combo is None else combo + term
        if combo is not None:
            basis.append(combo)
    return {"basis": basis, "dropped_unknown_coordinates": dropped}


def kernel_subspace(model: DerivationModel, ansatz: Sequence, ell: int) -> TowerLevel:
    """The level-ell kernel intersected with the K-span of the ansatz
    (ell = 0 returns the whole ansatz)."""
    p = model.field.p
    indices = j_indices(p, ell, model.m)
    res = kernel_in_ansatz(model, ansatz, indices)
    report = {
        "ell": ell,
        "indices_checked": len(indices),
        "dim": len(res["basis"]),
        "dropped_unknown_coordinates": res["dropped_unknown_coordinates"],
        "note": "relative to the ansatz",
    }
    return TowerLevel(model, ell, res["basis"], report)


# ---------------------------------------------------------------------------
# Bracket extensions


@dataclass
class BracketExtension:
    """Level-ell bracket of a base field realized inside K((t)).

    gens maps generator names to series realizations g; values holds the
    reductions g^(p^ell), which must lie in the base field (certified via
    membership_basis).  ext_model, when attached, is the symbolic model of
    the extension used by the group-scheme layer.
    """

    field: object
    ell: int
    gens: dict
    values: dict
    membership_basis: list
    membership_window: tuple = (-16, 17)
    working_order: int = 16
    ext_model: object = None
    notes: list = dc_field(default_factory=list)

    @property
    def p(self) -> int:
        return self.field.p

    def degree_per_generator(self) -> int:
        return self.p**self.ell

    def membership_orders(self) -> list:
        return p_power_orders(self.p, self.working_order)


def p_power_orders(p: int, bound: int) -> list:
    """The p-powers up to the bound, the derivative orders stacked into
    membership solves."""
    out = []
    q = 1
    while q <= bound:
        out.append(q)
        q *= p
    return out


def make_bracket(
    field,
    ell: int,
    gens: dict,
    membership_basis: Sequence[LaurentSeries],
    membership_window: tuple = (-16, 17),
    working_order: int = 16,
    definedness_order: Optional[int] = None,
) -> BracketExtension:
    """Assemble a bracket extension from series realizations and certify:
    (a) each reduction g^(p^ell) is killed by theta^(n) for p^ell not
    dividing n (the well-formedness of the root formula), and (b) each
    reduction lies in the declared base-field basis."""
    p = field.p
    q = p**ell
    values = {}
    notes = []
    bound = q * (definedness_order if definedness_order is not None else working_order)
    for name, g in gens.items():
        f = frobenius_power(g, ell, p)
        values[name] = f
        bad = [n for n in range(1, bound + 1) if n % q and not theta_series(f, n).is_zero()]
        if bad:
            raise ValueError(
                f"{name}^{q} is not level-{ell} constant: theta^({bad[0]}) survives"
            )
        lo, hi = membership_window
        res = coordinates_in_basis(
            f, list(membership_basis), lo, hi, orders=p_power_orders(p, working_order)
        )
        if res is None:
            raise Inconclusive(
                f"membership oracle inconclusive: {name}^{q} has no coordinates "
                f"in the declared basis on window [{lo}, {hi})"
            )
        notes.append(f"{name}^{q} certified in base field on window {res.window}")
    return BracketExtension(
        field,
        ell,
        dict(gens),
        values,
        list(membership_basis),
        membership_window,
        working_order,
        notes=notes,
    )


def theta_on_bracket(ext: BracketExtension, name: str, j: int) -> dict:
    """theta^(j) of a bracket generator, computed along both routes.

    Route A applies the root formula to the reduction; route B differentiates
    the series realization termwise.  The report records the agreement window
    and both values; disagreement marks the extension as inconsistent."""
    p = ext.p
    g = ext.gens[name]
    f = ext.values[name]
    root_input = theta_series(f, j * p**ext.ell)
    via_root = p_power_root(root_input, ext.ell, p)
    termwise = theta_series(g, j)
    eq = series_equal(via_root, termwise)
    return {
        "name": name,
        "j": j,
        "value": termwise,
        "via_root": via_root,
        "agree": eq.equal,
        "window": eq.window(),
        "first_mismatch": eq.first_mismatch,
    }


def exponent(ext: BracketExtension, e_max: Optional[int] = None) -> dict:
    """Smallest e with every g^(p^e) inside the declared base-field basis.

    Positive verdicts are exact on the window; negative verdicts are
    relative to the ansatz.  Raises Inconclusive when no e up to the bound
    certifies membership."""
    p = ext.p
    lo, hi = ext.membership_window
    bound = ext.ell if e_max is None else e_max
    orders = ext.membership_orders()
    verdicts = []
    for e in range(bound + 1):
        all_in = True
        for name, g in sorted(ext.gens.items()):
            x = frobenius_power(g, e, p) if e else g
            res = coordinates_in_basis(x, ext.membership_basis, lo, hi, orders=orders)
            verdicts.append({"e": e, "name": name, "member": res is not None})
            if res is None:
                all_in = False
        if all_in:
            return {
                "exponent": e,
                "verdicts": verdicts,
                "note": "non-membership verdicts are relative to the ansatz window",
            }
    raise Inconclusive(
        f"membership oracle inconclusive: no exponent up to {bound} certified"
    )


# ---------------------------------------------------------------------------
# Tower degrees on the standard monomial model


def verify_tower_degrees(model: MonomialModel, ell: int, deg: int) -> dict:
    """Mechanical [F_(ell-1) : F_ell] = p^m check inside an exponent box.

    The claimed basis {x^(p^(ell-1) c) : 0 <= c < p} is certified to (a) lie
    in the level-(ell-1) kernel with a witness index in J_ell showing it
    leaves the level-ell kernel, (b) span the level-(ell-1) kernel monomials
    in the box over the level-ell ones, and (c) be independent because the
    p^m basis exponents hit pairwise distinct residue classes mod p^ell."""
    p = model.field.p
    m = model.m
    if deg < p**ell - 1:
        raise ValueError(f"box degree {deg} cannot see level {ell}")
    ring = model.ring
    box = list(mi_box((deg + 1,) * m))
    monos = {e: ring.poly({e: 1}) for e in box}

    def kernel_exponents(level):
        indices = j_indices(p, level, m)
        out = set()
        for e in box:
            x = monos[e]
            if all(model.theta(x, j).is_zero() for j in indices):
                out.add(e)
        return out

    k_lower = kernel_exponents(ell - 1)
    k_upper = kernel_exponents(ell)
    # cross-check against the nullspace machinery on a thin slice
    slice_elems = [monos[e] for e in sorted(box)[: min(len(box), 64)]]
    level = kernel_subspace(model, slice_elems, ell)
    for b in level.basis:
        exps = [e for e, c in b.coeffs.items()]
        if not all(all(a % p**ell == 0 for a in e) for e in exps):
            return {"ok": False, "reason": "kernel slice contains a non-divisible exponent"}

    q1 = p ** (ell - 1)
    q2 = p**ell
    basis_exps = [tuple(q1 * c for c in cvec) for cvec in mi_box((p,) * m)]
    witnesses = []
    for b in basis_exps:
        if b not in k_lower:
            return {"ok": False, "reason": f"claimed basis exponent {b} not in level {ell-1}"}
        if b == mi_zero(m):
            continue
        wit = next(
            (j for j in j_indices(p, ell, m) if not model.theta(monos[b], j).is_zero()),
            None,
        )
        if wit is None:
            return {"ok": False, "reason": f"basis exponent {b} already level-{ell} constant"}
        witnesses.append({"exponent": b, "index": wit})

    unspanned = []
    for e in sorted(k_lower):
        c = tuple((a // q1) % p for a in e)
        b = tuple(q1 * x for x in c)
        rest = tuple(a - bb for a, bb in zip(e, b))
        if any(a < 0 for a in rest) or any(a % q2 for a in rest):
            unspanned.append(e)
        elif rest in box and rest not in k_upper:
            unspanned.append(e)

    residues = {tuple(a % q2 for a in b) for b in basis_exps}
    independent = len(residues) == len(basis_exps)

    ok = not unspanned and independent
    return {
        "ok": ok,
        "degree": p**m,
        "ell": ell,
        "box_degree": deg,
        "basis_exponents": basis_exps,
        "witnesses": witnesses,
        "unspanned": unspanned,
        "independent": independent,
        "kernel_sizes": {"lower": len(k_lower), "upper": len(k_upper)},
    }
