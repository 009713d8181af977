"""Dense exact linear algebra over a prime field, sized for desk-scale
kernel and coordinate solves, plus a fraction-free rank for matrices with
exact polynomial entries."""

from __future__ import annotations

from typing import Hashable, Optional, Sequence

from .charp import PrimeField


def rref(K: PrimeField, rows: list) -> tuple:
    """Reduced row echelon form (copies input).  Returns (rows, pivot_cols)."""
    p = K.p
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if rows[i][c] % p), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(K: PrimeField, rows: list) -> int:
    return len(rref(K, rows)[1])


def nullspace(K: PrimeField, rows: list, ncols: int) -> list:
    """Basis of the right kernel, one vector per free column."""
    if not rows:
        basis = []
        for c in range(ncols):
            v = [0] * ncols
            v[c] = 1
            basis.append(v)
        return basis
    red, pivots = rref(K, rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-red[r][fc]) % K.p
        basis.append(v)
    return basis


def solve(K: PrimeField, rows: list, rhs: Sequence[int]) -> Optional[tuple]:
    """Particular solution of rows * x = rhs, or None if inconsistent.

    Returns (solution, unique) with free variables set to zero.
    """
    if not rows:
        return [0] * 0, True
    ncols = len(rows[0])
    aug = [list(r) + [b % K.p] for r, b in zip(rows, rhs)]
    red, pivots = rref(K, aug)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    unique = len(pivots) == ncols
    return x, unique


def assemble(vectors: Sequence[dict], keys: Optional[Sequence[Hashable]] = None):
    """Stack sparse coordinate dicts (one per column) into dense rows.

    Returns (rows, key_order): rows[r][c] is the coefficient of key_order[r]
    in vectors[c].
    """
    if keys is None:
        seen = set()
        keys = []
        for v in vectors:
            for k in v:
                if k not in seen:
                    seen.add(k)
                    keys.append(k)
        keys.sort(key=repr)
    rows = [[v.get(k, 0) for v in vectors] for k in keys]
    return rows, list(keys)


def ff_rank(rows: list) -> int:
    """Fraction-free rank of a matrix over an integral domain.

    Entries must support ``*``, ``-`` and ``is_zero()`` exactly (intended for
    exact Laurent polynomials); row count and size are expected to be tiny.
    """
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    rk = 0
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if not rows[i][c].is_zero()), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            if rows[i][c].is_zero():
                continue
            f = rows[i][c]
            rows[i] = [x * piv - rows[r][j] * f for j, x in enumerate(rows[i])]
        rk += 1
        r += 1
        if r == nrows:
            break
    return rk
