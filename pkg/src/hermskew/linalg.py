"""Dense linear algebra over a :class:`~hermskew.field.GF`, on lists of rows."""
from __future__ import annotations

from .field import ZERO, GF


def rref(F: GF, rows) -> tuple[list[list[int]], list[int]]:
    """Reduced row-echelon form; returns (nonzero rows, pivot columns)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != ZERO), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = F.inv(mat[r][c])
        mat[r] = [F.mul(x, inv) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != ZERO:
                f = F.neg(mat[i][c])
                mat[i] = [F.add(x, F.mul(f, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(F: GF, rows) -> int:
    return len(rref(F, rows)[1])


def nullspace(F: GF, rows, ncols: int) -> list[list[int]]:
    """Basis of {x : rows . x = 0}."""
    red, pivots = rref(F, rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = 0
        for row, pc in zip(red, pivots):
            v[pc] = F.neg(row[fc])
        basis.append(v)
    return basis


def det(F: GF, rows) -> int:
    mat = [list(r) for r in rows]
    n = len(mat)
    result = 0
    for c in range(n):
        piv = next((i for i in range(c, n) if mat[i][c] != ZERO), None)
        if piv is None:
            return ZERO
        if piv != c:
            mat[c], mat[piv] = mat[piv], mat[c]
            result = F.neg(result)
        result = F.mul(result, mat[c][c])
        inv = F.inv(mat[c][c])
        for i in range(c + 1, n):
            if mat[i][c] != ZERO:
                f = F.neg(F.mul(mat[i][c], inv))
                mat[i] = [F.add(x, F.mul(f, y)) for x, y in zip(mat[i], mat[c])]
    return result


def matvec(F: GF, mat, vec) -> list[int]:
    return [F.sum(F.mul(a, x) for a, x in zip(row, vec)) for row in mat]


def matmul(F: GF, a, b) -> list[list[int]]:
    cols = list(zip(*b))
    return [[F.sum(F.mul(x, y) for x, y in zip(row, col)) for col in cols] for row in a]


def combine(F: GF, s: int, u, t: int, v) -> list[int]:
    """s*u + t*v."""
    return [F.add(F.mul(s, x), F.mul(t, y)) for x, y in zip(u, v)]
