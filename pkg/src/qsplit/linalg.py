"""
Dense exact linear algebra over Q.

Matrices are lists of row lists holding :class:`fractions.Fraction`.
Polynomials are coefficient lists, lowest degree first.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

from .errors import NonSplitSpectrum, SingularLeadingTerm, SizeMismatch
from .scalars import to_scalar

Matrix = List[List[Fraction]]
Poly = List[Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def mat(rows) -> Matrix:
    out = [[to_scalar(x) for x in row] for row in rows]
    if out and any(len(r) != len(out[0]) for r in out):
        raise SizeMismatch("ragged matrix")
    return out


def zeros(n: int, m: Optional[int] = None) -> Matrix:
    return [[ZERO] * (n if m is None else m) for _ in range(n)]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def shape(a: Matrix) -> Tuple[int, int]:
    return len(a), (len(a[0]) if a else 0)


def copy(a: Matrix) -> Matrix:
    return [list(r) for r in a]


def add(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise SizeMismatch(f"{shape(a)} vs {shape(b)}")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise SizeMismatch(f"{shape(a)} vs {shape(b)}")
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(s, a: Matrix) -> Matrix:
    s = to_scalar(s)
    return [[s * x for x in r] for r in a]


def neg(a: Matrix) -> Matrix:
    return [[-x for x in r] for r in a]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k = shape(a)
    k2, m = shape(b)
    if k != k2:
        raise SizeMismatch(f"cannot multiply {n}x{k} by {k2}x{m}")
    bt = list(zip(*b)) if b else []
    out = []
    for row in a:
        nz = [(j, x) for j, x in enumerate(row) if x]
        out.append([sum((x * col[j] for j, x in nz), ZERO) for col in bt] if bt else [ZERO] * m)
    return out


def matvec(a: Matrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((x * y for x, y in zip(row, v) if x), ZERO) for row in a]


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return sub(matmul(a, b), matmul(b, a))


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)]


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for r in a for x in r)


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), ZERO)


def power(a: Matrix, n: int) -> Matrix:
    out = identity(len(a))
    base = a
    while n:
        if n & 1:
            out = matmul(out, base)
        base = matmul(base, base)
        n >>= 1
    return out


def rref(a: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = copy(a)
    rows, cols = shape(m)
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1]) if a and a[0] else 0


def nullspace(a: Matrix) -> List[List[Fraction]]:
    """Basis of the right kernel, one vector per free column."""
    _, cols = shape(a)
    red, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * cols
        v[f] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][f]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Sequence[Fraction]):
    """
    Solve a x = b exactly.

    Returns ``(x, residual)``.  When the system is consistent ``residual``
    is None and ``x`` is the basic solution (all free variables zero).
    Otherwise ``x`` is None and ``residual`` is the component of b that
    lies outside the column space, expressed via the inconsistent rows of
    the reduced augmented system.
    """
    rows, cols = shape(a)
    aug = [list(a[i]) + [to_scalar(b[i])] for i in range(rows)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None, red[pivots.index(cols)][:cols] + [red[pivots.index(cols)][cols]]
    x = [ZERO] * cols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][cols]
    return x, None


def inverse(a: Matrix) -> Matrix:
    n, m = shape(a)
    if n != m:
        raise SizeMismatch("only square matrices are invertible")
    aug = [list(a[i]) + identity(n)[i] for i in range(n)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularLeadingTerm("matrix is singular")
    return [r[n:] for r in red]


# --- polynomials -----------------------------------------------------------


def poly_trim(f: Poly) -> Poly:
    f = list(f)
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    return f


def poly_mul(f: Poly, g: Poly) -> Poly:
    out = [ZERO] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                out[i + j] += x * y
    return poly_trim(out)


def poly_eval_matrix(f: Poly, a: Matrix) -> Matrix:
    """Horner evaluation of f at a square matrix."""
    n = len(a)
    out = zeros(n)
    for c in reversed(f):
        out = matmul(out, a)
        for i in range(n):
            out[i][i] += c
    return out


def charpoly(a: Matrix) -> Poly:
    """det(x I - a) by Faddeev-LeVerrier (exact over Q)."""
    n = len(a)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    m = zeros(n)
    for k in range(1, n + 1):
        m = matmul(a, m)
        for i in range(n):
            m[i][i] += coeffs[n - k + 1]
        coeffs[n - k] = -trace(matmul(a, m)) / k
    return coeffs


def _divisors(n: int) -> List[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _synthetic_div(f: Poly, r: Fraction) -> Tuple[Poly, Fraction]:
    """Divide f by (x - r); returns quotient and remainder."""
    out = [ZERO] * (len(f) - 1)
    acc = ZERO
    for i in range(len(f) - 1, 0, -1):
        acc = acc * r + f[i]
        out[i - 1] = acc
    return out, acc * r + f[0]


def rational_roots(f: Poly) -> List[Tuple[Fraction, int]]:
    """
    Rational roots of f with multiplicities, via the rational root test.

    Raises NonSplitSpectrum unless the multiplicities add up to deg f.
    """
    f = poly_trim([to_scalar(c) for c in f])
    deg = len(f) - 1
    roots: dict = {}
    while len(f) > 1 and f[0] == 0:
        f = f[1:]
        roots[ZERO] = roots.get(ZERO, 0) + 1
    if len(f) > 1:
        den = 1
        for c in f:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in f]
        g = 0
        for c in ints:
            g = gcd(g, c)
        ints = [c // g for c in ints]
        cands = set()
        for u in _divisors(ints[0]):
            for v in _divisors(ints[-1]):
                cands.add(Fraction(u, v))
                cands.add(Fraction(-u, v))
        for r in sorted(cands):
            while len(f) > 1:
                q, rem = _synthetic_div(f, r)
                if rem != 0:
                    break
                f = q
                roots[r] = roots.get(r, 0) + 1
    found = sorted(roots.items())
    if sum(m for _, m in found) != deg:
        raise NonSplitSpectrum(
            f"characteristic polynomial does not split over Q (rational roots: {found})"
        )
    return found
