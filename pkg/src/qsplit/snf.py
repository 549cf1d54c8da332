"""
Smith normal form over Z with unimodular transforms, and the p-local
consequences used for cohomology: elementary divisors, torsion orders and
image membership over Z_(p).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

IntMatrix = List[List[int]]


def _eye(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a: Sequence[Sequence[int]], nrows: Optional[int] = None,
                      ncols: Optional[int] = None) -> Tuple[List[int], IntMatrix, IntMatrix]:
    """
    Return ``(diag, U, V)`` with ``U a V = S`` where S is diagonal with
    entries ``diag`` (nonnegative, each dividing the next), U and V
    unimodular.  ``diag`` has length min(rows, cols).

    Empty matrices are allowed; pass ``nrows``/``ncols`` for their shape.
    """
    S = [list(map(int, r)) for r in a]
    m = len(S) if nrows is None else nrows
    n = (len(S[0]) if S else 0) if ncols is None else ncols
    if not S:
        S = [[0] * n for _ in range(m)]
    U, V = _eye(m), _eye(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row dst += f * row src
        S[dst] = [x + f * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for row in S:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            piv = S[t][t]
            clean = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // piv))
                    clean = clean and S[i][t] == 0
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // piv))
                    clean = clean and S[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    diag = [S[i][i] for i in range(min(m, n))]
    return diag, U, V


def rank(diag: Sequence[int]) -> int:
    return sum(1 for d in diag if d)


def p_part(n: int, p: int) -> int:
    n = abs(n)
    out = 1
    while n and n % p == 0:
        n //= p
        out *= p
    return out


@dataclass
class ModuleDescription:
    """A finitely generated Z_(p)-module: Z_(p)^free_rank + sum Z/torsion."""

    degree: int
    free_rank: int
    torsion: List[int]

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("free" if self.free_rank == 1 else f"free^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def cohomology_at(d_in: Sequence[Sequence[int]], d_out: Sequence[Sequence[int]], dim: int,
                  p: int, degree: int = 0, dim_prev: int = 0, dim_next: int = 0) -> ModuleDescription:
    """
    ker(d_out) / im(d_in) at a free module of rank ``dim``, localized at p.

    d_in has shape (dim, dim_prev); d_out has shape (dim_next, dim).
    """
    din, _, _ = smith_normal_form(d_in, dim, dim_prev)
    dout, _, _ = smith_normal_form(d_out, dim_next, dim)
    free = dim - rank(din) - rank(dout)
    torsion = [p_part(d, p) for d in din if d]
    return ModuleDescription(degree, free, [t for t in torsion if t > 1])


def in_image_p_local(a: Sequence[Sequence[int]], y: Sequence[int], p: int,
                     ncols: Optional[int] = None) -> bool:
    """Is y = a x solvable with x over Z_(p)?"""
    m = len(y)
    diag, U, _ = smith_normal_form(a, m, ncols)
    yy = [sum(u * v for u, v in zip(row, y)) for row in U]
    for i, v in enumerate(yy):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if v != 0:
                return False
        elif v % p_part(d, p) != 0:
            return False
    return True
