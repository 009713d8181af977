"""Iterative differential equations: square systems theta^(k)(Y) = A_k Y.

Coefficients A_k are matrices over a derivation model's universe, indexed by
multi-indices k up to a truncation order.  A_0 is the identity, and the
family must satisfy the compatibility law

    binom(k+l, l) A_{k+l} = sum_{i+j=l} theta^(i)(A_k) A_j

for every pair with |k| + |l| inside the truncation.  validate() checks it,
from_p_power_data() rebuilds the family from the maps at p-power orders,
is_fundamental() certifies solution matrices together with the determinant
law, and check_descent() tests constancy to level ell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .charp import (
    PrimeField,
    as_index,
    int_digits,
    mi_abs,
    mi_all_upto,
    mi_splits,
    multi_binom,
    num_digits,
)
from .derivations import DerivationModel, ExtElement, SeriesModel
from .errors import PoleAtOrigin, PrecisionError
from .series import (
    LaurentSeries,
    TSeries,
    coordinates_in_basis,
    parse_series,
    serialize_series,
)

# ---------------------------------------------------------------------------
# Matrix helpers over an arbitrary coefficient universe


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_mul(A, B):
    n, mid, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for u in range(mid):
                term = A[i][u] * B[u][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def mat_scale(A, c):
    return [[a * c for a in row] for row in A]


def mat_map(f: Callable, A):
    return [[f(a) for a in row] for row in A]


def identity_matrix(model: DerivationModel, n: int):
    one, zero = model.one(), model.zero()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zero_matrix(model: DerivationModel, n: int):
    zero = model.zero()
    return [[zero for _ in range(n)] for _ in range(n)]


def mat_is_zero(A) -> bool:
    return all(a.is_zero() for row in A for a in row)


_PERMS = {
    1: [((0,), 1)],
    2: [((0, 1), 1), ((1, 0), -1)],
    3: [
        ((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
        ((0, 2, 1), -1), ((1, 0, 2), -1), ((2, 1, 0), -1),
    ],
}


def _signed_perms(n: int):
    if n in _PERMS:
        return _PERMS[n]
    import itertools

    out = []
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            j, clen = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                clen += 1
            if clen % 2 == 0:
                sign = -sign
        out.append((perm, sign))
    _PERMS[n] = out
    return out


def mat_det(A):
    """Permutation expansion; fine for the small systems handled here."""
    n = len(A)
    acc = None
    for perm, sign in _signed_perms(n):
        term = None
        for i in range(n):
            term = A[i][perm[i]] if term is None else term * A[i][perm[i]]
        if sign < 0:
            term = -term
        acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------------------
# The IDE container


@dataclass
class IDE:
    """theta^(k)(Y) = A_k Y with A_k given for |k| <= order."""

    model: DerivationModel
    n: int
    order: int
    coeffs: dict  # MultiIndex -> matrix; k = 0 omitted (identity)

    def __post_init__(self):
        norm = {}
        for k, M in self.coeffs.items():
            k = as_index(k, self.model.m)
            if mi_abs(k) == 0:
                continue
            norm[k] = M
        self.coeffs = norm

    @property
    def m(self) -> int:
        return self.model.m

    def A(self, k):
        k = as_index(k, self.model.m)
        if mi_abs(k) == 0:
            return identity_matrix(self.model, self.n)
        if mi_abs(k) > self.order:
            raise PrecisionError(f"coefficient A_{k} beyond truncation order {self.order}")
        M = self.coeffs.get(k)
        return M if M is not None else zero_matrix(self.model, self.n)

    def entries_T(self, order: Optional[int] = None) -> list:
        """Matrix of univariate TSeries (m = 1 only)."""
        if self.model.m != 1:
            raise ValueError("T-expansion matrices are univariate")
        order = self.order if order is None else min(order, self.order)
        zero = self.model.zero()
        out = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                cc = {}
                for k in range(order + 1):
                    cc[k] = self.A((k,))[i][j]
                row.append(TSeries(zero, cc, order))
            out.append(row)
        return out


def validate(ide: IDE, order: Optional[int] = None) -> dict:
    """Check the compatibility law on every pair (k, l) whose sum stays
    inside the truncation order; report each failing pair and entry."""
    model = ide.model
    K = model.field
    N = ide.order if order is None else min(order, ide.order)
    violations = []
    checked = 0
    indices = list(mi_all_upto(model.m, N))
    theta_cache = {}

    def theta_mat(k, i):
        key = (k, i)
        if key not in theta_cache:
            theta_cache[key] = mat_map(lambda x: model.theta(x, i), ide.A(k))
        return theta_cache[key]

    for total in indices:
        for k, l in mi_splits(total):
            lhs = mat_scale(ide.A(total), multi_binom(K, k, l))
            rhs = None
            for i, j in mi_splits(l):
                term = mat_mul(theta_mat(k, i), ide.A(j))
                rhs = term if rhs is None else mat_add(rhs, term)
            diff = mat_sub(lhs, rhs)
            checked += 1
            if not mat_is_zero(diff):
                bad = [
                    (r, c)
                    for r in range(ide.n)
                    for c in range(ide.n)
                    if not diff[r][c].is_zero()
                ]
                violations.append({"pair": (k, l), "entries": bad})
    return {
        "ok": not violations,
        "order": N,
        "checked_pairs": checked,
        "violations": violations,
    }


def from_p_power_data(model: DerivationModel, n: int, p_data: dict, order: int) -> IDE:
    """Build the full family from A_{p^j} alone via the compatibility
    recurrence, stripping the lowest nonzero base-p digit (univariate)."""
    if model.m != 1:
        raise ValueError("p-power completion is univariate")
    K = model.field
    p = K.p
    A = {0: identity_matrix(model, n)}
    for j, M in p_data.items():
        q = p ** int(j)
        if q <= order:
            A[q] = M

    def get(k):
        return A.get(k, zero_matrix(model, n))

    for m_ord in range(1, order + 1):
        if m_ord in A:
            continue
        digits = int_digits(p, m_ord, num_digits(p, m_ord))
        j = next(i for i, d in enumerate(digits) if d)
        nj = digits[j]
        q = p**j
        if q not in A:
            raise ValueError(f"missing p-power coefficient A_{q} needed for A_{m_ord}")
        acc = None
        for u in range(q + 1):
            term = mat_mul(
                mat_map(lambda x: model.theta(x, (u,)), get(m_ord - q)), get(q - u)
            )
            acc = term if acc is None else mat_add(acc, term)
        A[m_ord] = mat_scale(acc, K.inv(nj))
    return IDE(model, n, order, {(k,): M for k, M in A.items() if k})


# ---------------------------------------------------------------------------
# Solution matrices


@dataclass
class SolutionMatrix:
    """Candidate fundamental matrix over an extension model, together with
    the embedding of base coefficients into that model."""

    model: DerivationModel
    Y: list
    embed: Callable = None

    def __post_init__(self):
        if self.embed is None:
            self.embed = getattr(self.model, "embed", lambda x: x)


def is_fundamental(sol: SolutionMatrix, ide: IDE, order: Optional[int] = None) -> dict:
    """Certify theta^(k)(Y) = A_k Y for |k| <= order, plus invertibility of
    det(Y) and the determinant law theta(det Y^-1) = det(A(T))^-1 det(Y)^-1."""
    ext = sol.model
    N = ide.order if order is None else min(order, ide.order)
    witnesses = []
    for k in mi_all_upto(ide.model.m, N):
        if mi_abs(k) == 0:
            continue
        lhs = mat_map(lambda x: ext.theta(x, k), sol.Y)
        rhs = mat_mul(mat_map(sol.embed, ide.A(k)), sol.Y)
        diff = mat_sub(lhs, rhs)
        for r in range(ide.n):
            for c in range(ide.n):
                if not diff[r][c].is_zero():
                    witnesses.append({"k": k, "entry": (r, c)})
    report = {"fundamental": not witnesses, "order": N, "witnesses": witnesses}

    det_ok = None
    det_note = ""
    if ide.model.m == 1:
        detY = mat_det(sol.Y)
        try:
            try:
                detY_inv = detY.inverse()
            except ValueError:
                # exact multi-term series: invert on a finite window
                detY_inv = detY.inverse(2 * (N + 1) + 48)
        except (ValueError, ZeroDivisionError, PrecisionError) as exc:
            det_ok = False
            det_note = f"det(Y) not invertible: {exc}"
        else:
            detA_T = mat_det(ide.entries_T(N))
            target = detA_T.inverse()
            lifted = TSeries(
                ext.zero(), {u: sol.embed(c) for u, c in target.coeffs.items()}, N
            ).scale_by(detY_inv)
            diff = ext.theta_T(detY_inv, N) - lifted
            bad = [u for u, c in diff.coeffs.items() if not c.is_zero()]
            det_ok = not bad
            if bad:
                det_note = f"determinant law fails at T-orders {bad}"
    report["determinant_ok"] = det_ok
    if det_note:
        report["determinant_note"] = det_note
    report["ok"] = report["fundamental"] and det_ok is not False
    return report


def solve_at_origin(ide: IDE, Y0: Sequence[Sequence[int]]) -> tuple:
    """Power-series solution Y(t) = (A(T) at t=0, T := t) * Y0.

    Every coefficient entry must be regular at the origin; otherwise
    PoleAtOrigin is raised (shift the expansion point or supply the
    solution manually)."""
    model = ide.model
    if model.m != 1:
        raise ValueError("series solutions at the origin are univariate")
    K = model.field
    n = ide.n
    rows = [[dict() for _ in range(n)] for _ in range(n)]
    for k in range(ide.order + 1):
        M = ide.A((k,))
        for i in range(n):
            for j in range(n):
                entry = M[i][j]
                if not isinstance(entry, LaurentSeries):
                    raise ValueError("origin solutions need series coefficients")
                if any(e < 0 for e in entry.coeffs):
                    raise PoleAtOrigin(
                        f"A_{k}[{i}][{j}] has a pole at the origin; shift the "
                        "expansion point or supply the solution manually"
                    )
                if entry.prec <= 0:
                    raise PrecisionError(
                        f"A_{k}[{i}][{j}] window does not certify regularity "
                        "at the origin"
                    )
                c = entry.coeff(0)
                if c:
                    for u in range(n):
                        if Y0[j][u]:
                            rows[i][u][k] = (rows[i][u].get(k, 0) + c * Y0[j][u]) % K.p
    prec = ide.order + 1
    Y = [
        [LaurentSeries(K, {e: v for e, v in rows[i][u].items() if v}, prec) for u in range(n)]
        for i in range(n)
    ]
    sol = SolutionMatrix(model, Y, embed=lambda x: x)
    report = is_fundamental(sol, ide, order=ide.order)
    return Y, report


def gauge_transform(ide: IDE, D: list) -> IDE:
    """Transformed system for Y~ = D^-1 Y: A~(T) = theta(D)^-1 A(T) D."""
    model = ide.model
    if model.m != 1:
        raise ValueError("gauge transforms are univariate")
    N = ide.order
    zero = model.zero()
    # theta(D) as a matrix of T-series, inverted by the block recurrence
    M = {k: mat_map(lambda x: model.theta(x, (k,)), D) for k in range(N + 1)}
    D0_inv = _mat_inverse(model, D)
    Ninv = {0: D0_inv}
    for k in range(1, N + 1):
        acc = None
        for i in range(1, k + 1):
            term = mat_mul(M[i], Ninv[k - i])
            acc = term if acc is None else mat_add(acc, term)
        Ninv[k] = (
            mat_scale(mat_mul(D0_inv, acc), -1) if acc is not None else zero_matrix(model, ide.n)
        )
    coeffs = {}
    for k in range(1, N + 1):
        acc = None
        for u in range(k + 1):
            term = mat_mul(Ninv[u], ide.A((k - u,)))
            acc = term if acc is None else mat_add(acc, term)
        Ak = mat_mul(acc, D)
        if not mat_is_zero(Ak):
            coeffs[(k,)] = Ak
    return IDE(model, ide.n, N, coeffs)


def _mat_inverse(model: DerivationModel, D: list) -> list:
    """Inverse via the adjugate; entries must form a commutative ring with
    an invertible determinant."""
    n = len(D)
    det = mat_det(D)
    det_inv = det.inverse()
    if n == 1:
        return [[det_inv]]
    cof = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [D[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            sign = 1 if (i + j) % 2 == 0 else -1
            cof[i][j] = mat_det(minor) * sign
    return [[cof[j][i] * det_inv for j in range(n)] for i in range(n)]


def check_descent(ide: IDE, ell: int) -> dict:
    """Descent to level ell: A_k = 0 unless p^ell divides k componentwise,
    and every entry is killed by theta^(j) for nonzero j with entries
    below p^ell."""
    model = ide.model
    p = model.field.p
    q = p**ell
    violations = []
    for k, M in sorted(ide.coeffs.items()):
        if mat_is_zero(M):
            continue
        if any(a % q for a in k):
            violations.append({"kind": "support", "k": k})
    from .towers import j_indices

    for j in j_indices(p, ell, model.m):
        for k, M in sorted(ide.coeffs.items()):
            img = mat_map(lambda x: model.theta(x, j), M)
            if not mat_is_zero(img):
                violations.append({"kind": "entry-derivative", "k": k, "j": j})
    return {"ok": not violations, "ell": ell, "violations": violations}


# ---------------------------------------------------------------------------
# Extracting an IDE from an extension basis


def ide_from_basis(
    ext_model: DerivationModel,
    basis: Sequence,
    order: int,
    base_model: Optional[SeriesModel] = None,
    coeff_window: tuple = (-16, 17),
) -> tuple:
    """Coefficient family A_k with theta^(k)(e_i) = sum_j A_k[i][j] e_j.

    Two basis realizations are supported: extension-model monomials (read
    the coordinates off directly) and plain Laurent series (coordinates
    through the window-exact solver).  Returns (IDE over the base series
    model, report); raises ValueError when some derivative is not
    expressible in the basis."""
    K = ext_model.field
    if base_model is None:
        base_model = SeriesModel(K, working_order=max(order, ext_model.working_order))
    n = len(basis)
    coeffs = {}
    notes = []
    monomial_basis = all(isinstance(b, ExtElement) for b in basis)
    if monomial_basis:
        keys = []
        for b in basis:
            monos = [m for m, c in b.coeffs.items() if not c.is_zero()]
            if len(monos) != 1 or not _is_unit_series(b.coeffs[monos[0]]):
                monomial_basis = False
                break
            keys.append(monos[0])
    if monomial_basis:
        keyset = set(keys)
        for k in range(1, order + 1):
            M = []
            for i, b in enumerate(basis):
                img = ext_model.theta(b, (k,))
                row = [LaurentSeries.zero(K) for _ in range(n)]
                for mono, c in img.coeffs.items():
                    if c.is_zero():
                        continue
                    if mono not in keyset:
                        raise ValueError(
                            f"theta^({k}) of basis element {i} leaves the basis "
                            f"(monomial {mono})"
                        )
                    row[keys.index(mono)] = c
                M.append(row)
            if any(not c.is_zero() for row in M for c in row):
                coeffs[(k,)] = M
        notes.append("coordinates read off extension monomials")
    else:
        lo, hi = coeff_window
        p = K.p
        stack = []
        q = 1
        while q <= order:
            stack.append(q)
            q *= p
        for k in range(1, order + 1):
            M = []
            for i, b in enumerate(basis):
                img = ext_model.theta(b, (k,))
                if img.is_zero():
                    M.append([LaurentSeries.zero(K) for _ in range(n)])
                    continue
                res = coordinates_in_basis(img, list(basis), lo, hi, orders=stack)
                if res is None:
                    raise ValueError(
                        f"theta^({k}) of basis element {i} is not expressible in "
                        f"the basis within window [{lo}, {hi})"
                    )
                M.append(res.coords)
            if any(not c.is_zero() for row in M for c in row):
                coeffs[(k,)] = M
        notes.append(f"coordinates solved on window [{lo}, {hi})")
    ide = IDE(base_model, n, order, coeffs)
    report = validate(ide)
    report["notes"] = notes
    return ide, report


def _is_unit_series(c) -> bool:
    return (
        isinstance(c, LaurentSeries)
        and list(c.coeffs.items()) == [(0, 1)]
    )


# ---------------------------------------------------------------------------
# JSON form: {"p":2, "m":1, "n":2, "order":8,
#             "coeffs":[{"k":[1], "matrix":[["1*t^-1","0"],["0","0"]]}, ...]}


def ide_from_json(obj) -> IDE:
    if isinstance(obj, str):
        obj = json.loads(obj)
    K = PrimeField(int(obj["p"]))
    m = int(obj.get("m", 1))
    if m != 1:
        raise ValueError("JSON systems are univariate")
    n = int(obj["n"])
    order = int(obj["order"])
    model = SeriesModel(K, working_order=order)
    coeffs = {}
    for item in obj.get("coeffs", []):
        k = tuple(int(a) for a in item["k"])
        M = [[parse_series(K, lit) for lit in row] for row in item["matrix"]]
        if len(M) != n or any(len(row) != n for row in M):
            raise ValueError(f"matrix for k={k} is not {n}x{n}")
        coeffs[k] = M
    return IDE(model, n, order, coeffs)


def ide_to_json(ide: IDE) -> dict:
    items = []
    for k in sorted(ide.coeffs):
        M = ide.coeffs[k]
        items.append(
            {
                "k": list(k),
                "matrix": [[serialize_series(c) for c in row] for row in M],
            }
        )
    return {
        "p": ide.model.field.p,
        "m": ide.model.m,
        "n": ide.n,
        "order": ide.order,
        "coeffs": items,
    }
