"""Exact linear algebra over the rationals, plus integer Smith normal form."""

from __future__ import annotations

from fractions import Fraction as Q
from typing import Iterable, List, Sequence, Tuple

Vector = Tuple[Q, ...]
Matrix = Tuple[Vector, ...]


def vec(entries: Iterable) -> Vector:
    return tuple(Q(e) for e in entries)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Q(1) if i == j else Q(0) for j in range(n)) for i in range(n))


def dot(u: Sequence, v: Sequence) -> Q:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return sum((Q(a) * Q(b) for a, b in zip(u, v)), Q(0))


def vadd(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return tuple(Q(a) + Q(b) for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return tuple(Q(a) - Q(b) for a, b in zip(u, v))


def vscale(c, u: Sequence) -> Vector:
    return tuple(Q(c) * Q(a) for a in u)


def mat_vec(a: Matrix, v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def mat_inv(a: Matrix) -> Matrix:
    """Invert a square rational matrix by Gauss-Jordan elimination."""
    n = len(a)
    work = [list(row) + [Q(1) if i == j else Q(0) for j in range(n)] for i, row in enumerate(mat(a))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv_p = Q(1) / work[col][col]
        work[col] = [x * inv_p for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


def solve(a: Matrix, b: Sequence) -> Vector:
    """Solve a x = b for square nonsingular a."""
    return mat_vec(mat_inv(a), vec(b))


def determinant(a: Matrix) -> Q:
    n = len(a)
    work = [list(map(Q, row)) for row in a]
    det = Q(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            return Q(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = -det
        det *= work[col][col]
        inv_p = Q(1) / work[col][col]
        for r in range(col + 1, n):
            if work[r][col] != 0:
                factor = work[r][col] * inv_p
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return det


def smith_normal_form(rows: Sequence[Sequence[int]]) -> List[int]:
    """Diagonal of the Smith normal form of an integer matrix.

    Returns the absolute diagonal entries in divisibility order,
    including any trailing zeros for rank deficiency.
    """
    m = [[int(x) for x in row] for row in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    diag: List[int] = []
    t = 0
    while t < min(nr, nc):
        pivot = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] != 0 and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        i0, j0 = pivot
        m[t], m[i0] = m[i0], m[t]
        for row in m:
            row[t], row[j0] = row[j0], row[t]
        while True:
            reduced = True
            for i in range(t + 1, nr):
                if m[i][t] != 0:
                    q = m[i][t] // m[t][t]
                    m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                    if m[i][t] != 0:
                        m[t], m[i] = m[i], m[t]
                        reduced = False
            for j in range(t + 1, nc):
                if m[t][j] != 0:
                    q = m[t][j] // m[t][t]
                    for row in m:
                        row[j] -= q * row[t]
                    if m[t][j] != 0:
                        for row in m:
                            row[t], row[j] = row[j], row[t]
                        reduced = False
            if not reduced:
                continue
            # pivot must divide the remaining block for the divisor chain
            offender = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if m[i][j] % m[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            m[t] = [x + y for x, y in zip(m[t], m[offender])]
        diag.append(abs(m[t][t]))
        t += 1
    while len(diag) < min(nr, nc):
        diag.append(0)
    return diag
