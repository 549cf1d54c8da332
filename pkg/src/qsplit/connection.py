"""
Matrices of truncated series and formal connections with a double pole.

A connection is stored as ``tau^2 d/dtau + A(tau)`` with
``A = A^0 + A^1 tau + ...``.  Inputs written as ``-tau^2 d/dtau + A'``
(the "minus" convention) are negated on ingestion; the flag is kept so
that output can be shown the way it came in.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence

from . import linalg as la
from .errors import InputError, SingularLeadingTerm, SizeMismatch
from .series import TruncatedSeries

log = logging.getLogger(__name__)

CONVENTIONS = ("plus", "minus")


class SeriesMatrix:
    """
    An r x r matrix of series, held as coefficient matrices E^0 .. E^K.
    """

    __slots__ = ("_m",)

    def __init__(self, coeffs: Sequence[la.Matrix]):
        if not coeffs:
            raise ValueError("need at least the constant coefficient")
        mats = [la.mat(c) for c in coeffs]
        r = la.shape(mats[0])
        if r[0] != r[1]:
            raise SizeMismatch(f"series matrices must be square, got {r}")
        if any(la.shape(c) != r for c in mats):
            raise SizeMismatch("coefficient matrices of different sizes")
        self._m = mats

    # construction ----------------------------------------------------------
    @classmethod
    def constant(cls, m: la.Matrix, order: int) -> "SeriesMatrix":
        m = la.mat(m)
        return cls([m] + [la.zeros(len(m)) for _ in range(order)])

    @classmethod
    def identity(cls, r: int, order: int) -> "SeriesMatrix":
        return cls.constant(la.identity(r), order)

    @classmethod
    def zero(cls, r: int, order: int) -> "SeriesMatrix":
        return cls.constant(la.zeros(r), order)

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[TruncatedSeries]]) -> "SeriesMatrix":
        r = len(entries)
        K = entries[0][0].order
        if any(len(row) != r for row in entries):
            raise SizeMismatch("entry grid must be square")
        if any(s.order != K for row in entries for s in row):
            raise SizeMismatch("entries have different truncation orders")
        return cls([[[entries[i][j][k] for j in range(r)] for i in range(r)] for k in range(K + 1)])

    # accessors -------------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self._m[0])

    @property
    def order(self) -> int:
        return len(self._m) - 1

    def coeff(self, k: int) -> la.Matrix:
        if k < 0 or k > self.order:
            return la.zeros(self.size)
        return self._m[k]

    @property
    def coeffs(self) -> List[la.Matrix]:
        return self._m

    def entry(self, i: int, j: int) -> TruncatedSeries:
        return TruncatedSeries(c[i][j] for c in self._m)

    def entries(self) -> List[List[TruncatedSeries]]:
        return [[self.entry(i, j) for j in range(self.size)] for i in range(self.size)]

    def truncate(self, order: int) -> "SeriesMatrix":
        r = self.size
        return SeriesMatrix([self.coeff(k) for k in range(order + 1)] if order <= self.order
                            else self._m + [la.zeros(r) for _ in range(order - self.order)])

    def __eq__(self, other):
        if isinstance(other, SeriesMatrix):
            return self._m == other._m
        return NotImplemented

    def __repr__(self):
        return f"SeriesMatrix(size={self.size}, order={self.order})"

    def is_zero(self) -> bool:
        return all(la.is_zero(c) for c in self._m)

    def first_nonzero_order(self) -> Optional[int]:
        return next((k for k, c in enumerate(self._m) if not la.is_zero(c)), None)

    # arithmetic ------------------------------------------------------------
    def _check(self, other: "SeriesMatrix"):
        if not isinstance(other, SeriesMatrix):
            raise TypeError(f"expected SeriesMatrix, got {type(other).__name__}")
        if other.size != self.size:
            raise SizeMismatch(f"sizes differ: {self.size} vs {other.size}")
        if other.order != self.order:
            raise SizeMismatch(f"truncation orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        self._check(other)
        return SeriesMatrix([la.add(a, b) for a, b in zip(self._m, other._m)])

    def __sub__(self, other):
        self._check(other)
        return SeriesMatrix([la.sub(a, b) for a, b in zip(self._m, other._m)])

    def __neg__(self):
        return SeriesMatrix([la.neg(a) for a in self._m])

    def __mul__(self, other):
        if not isinstance(other, SeriesMatrix):
            return SeriesMatrix([la.scale(other, a) for a in self._m])
        self._check(other)
        return SeriesMatrix(_convolve(self._m, other._m, self.order))

    def __rmul__(self, other):
        return SeriesMatrix([la.scale(other, a) for a in self._m])

    def conjugate_constant(self, m: la.Matrix, m_inv: la.Matrix) -> "SeriesMatrix":
        """m_inv . self . m, coefficientwise."""
        return SeriesMatrix([la.matmul(m_inv, la.matmul(c, m)) for c in self._m])

    def transpose(self) -> "SeriesMatrix":
        return SeriesMatrix([la.transpose(c) for c in self._m])

    def tau2_d_tau(self) -> "SeriesMatrix":
        r = self.size
        out = [la.zeros(r)]
        for k in range(1, self.order + 1):
            out.append(la.scale(k - 1, self._m[k - 1]))
        return SeriesMatrix(out)

    def commutator(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return self * other - other * self

    def inverse(self) -> "SeriesMatrix":
        """
        Inverse to the same truncation order.

        The constant term is inverted exactly; the tail is obtained by the
        Newton iteration X <- X (2 - G X), which doubles the number of
        correct coefficients at each step.
        """
        try:
            x0 = la.inverse(self._m[0])
        except SingularLeadingTerm:
            raise SingularLeadingTerm("constant term of the series matrix is singular") from None
        r, K = self.size, self.order
        x = SeriesMatrix([x0])
        prec = 1
        while prec < K + 1:
            prec = min(2 * prec, K + 1)
            g = self.truncate(prec - 1)
            x = x.truncate(prec - 1)
            two = SeriesMatrix.identity(r, prec - 1) * 2
            x = x * (two - g * x)
        return x.truncate(K)


def _scaled(m: la.Matrix):
    """(integer matrix, common denominator) with m = ints / den."""
    den = 1
    for row in m:
        for x in row:
            d = x.denominator
            if d != 1:
                den = den * d // gcd(den, d)
    return [[x.numerator * (den // x.denominator) for x in row] for row in m], den


def _convolve(a: List[la.Matrix], b: List[la.Matrix], K: int) -> List[la.Matrix]:
    """Truncated product of coefficient lists, accumulated over common denominators."""
    r = len(a[0])
    sa = [None if la.is_zero(m) else _scaled(m) for m in a]
    sb = [None if la.is_zero(m) else _scaled(m) for m in b]
    rng = range(r)
    out = []
    for k in range(K + 1):
        terms = [(sa[i], sb[k - i]) for i in range(k + 1) if sa[i] is not None and sb[k - i] is not None]
        if not terms:
            out.append(la.zeros(r))
            continue
        D = 1
        for (_, da), (_, db) in terms:
            d = da * db
            D = D * d // gcd(D, d)
        acc = [[0] * r for _ in rng]
        for (ma, da), (mb, db) in terms:
            f = D // (da * db)
            for i in rng:
                row_a = ma[i]
                row_acc = acc[i]
                for l in rng:
                    x = row_a[l]
                    if x:
                        x *= f
                        row_b = mb[l]
                        for j in rng:
                            if row_b[j]:
                                row_acc[j] += x * row_b[j]
        out.append([[Fraction(x, D) for x in row] for row in acc])
    return out


class ConnectionGerm:
    """
    tau^2 d/dtau + A^0 + A^1 tau + ... (normalized "plus" form).

    ``matrices`` are taken in the given ``convention``; with "minus" they
    describe ``-tau^2 d/dtau + A'`` and are stored as ``A = -A'``.
    ``truncation`` is the default working order for computations.
    """

    def __init__(self, matrices: Sequence[la.Matrix], convention: str = "plus",
                 truncation: Optional[int] = None, name: Optional[str] = None):
        if convention not in CONVENTIONS:
            raise InputError(f"convention must be 'plus' or 'minus', got {convention!r}")
        if not matrices:
            raise InputError("a connection needs at least A^0")
        mats = [la.mat(m) for m in matrices]
        r = len(mats[0])
        if any(la.shape(m) != (r, r) for m in mats):
            raise SizeMismatch("connection coefficients must all be r x r")
        self.convention = convention
        self.A = mats if convention == "plus" else [la.neg(m) for m in mats]
        self.truncation = truncation
        self.name = name

    @property
    def size(self) -> int:
        return len(self.A[0])

    @property
    def degree(self) -> int:
        """Index of the last stored coefficient."""
        return len(self.A) - 1

    def coeff(self, k: int) -> la.Matrix:
        return self.A[k] if 0 <= k < len(self.A) else la.zeros(self.size)

    def display_coeff(self, k: int) -> la.Matrix:
        """Coefficient as written in the input convention."""
        c = self.coeff(k)
        return c if self.convention == "plus" else la.neg(c)

    def display_matrices(self) -> List[la.Matrix]:
        return [self.display_coeff(k) for k in range(len(self.A))]

    def as_series_matrix(self, order: int) -> SeriesMatrix:
        return SeriesMatrix([self.coeff(k) for k in range(order + 1)])

    def describe_convention(self) -> str:
        if self.convention == "plus":
            return "tau^2 d/dtau + A (plus convention)"
        return "-tau^2 d/dtau + A (minus convention; internally negated)"

    def __eq__(self, other):
        if not isinstance(other, ConnectionGerm):
            return NotImplemented
        n = max(len(self.A), len(other.A))
        return all(self.coeff(k) == other.coeff(k) for k in range(n))

    def __repr__(self):
        return f"ConnectionGerm(size={self.size}, degree={self.degree}, convention={self.convention!r})"


def covariant_derivative(conn: ConnectionGerm, E: SeriesMatrix) -> SeriesMatrix:
    """[nabla, E] = tau^2 dE/dtau + [A, E], to the truncation order of E."""
    if conn.size != E.size:
        raise SizeMismatch(f"connection has size {conn.size}, endomorphism {E.size}")
    K = E.order
    A = conn.as_series_matrix(K)
    return E.tau2_d_tau() + A.commutator(E)


def gauge_transform(conn: ConnectionGerm, G: SeriesMatrix) -> ConnectionGerm:
    """tau^2 d/dtau + G^-1 A G + G^-1 tau^2 dG/dtau, truncated at the order of G."""
    if conn.size != G.size:
        raise SizeMismatch(f"connection has size {conn.size}, gauge {G.size}")
    K = G.order
    Ginv = G.inverse()
    A = conn.as_series_matrix(K)
    B = Ginv * (A * G) + Ginv * G.tau2_d_tau()
    out = ConnectionGerm(B.coeffs, "plus", truncation=K, name=conn.name)
    out.convention = conn.convention
    return out


def commutes_at_order_zero(conn: ConnectionGerm, E0: la.Matrix) -> bool:
    return la.is_zero(la.commutator(conn.coeff(0), E0))


def detect_action_convention(conn: ConnectionGerm, E: SeriesMatrix) -> str:
    """
    Decide whether E acts on columns ("column"), on rows ("row"), both or
    neither, using only the order-zero equation [A^0, E^0] = 0.
    """
    col = commutes_at_order_zero(conn, E.coeff(0))
    row = commutes_at_order_zero(conn, la.transpose(E.coeff(0)))
    if col and row:
        return "both"
    if col:
        return "column"
    if row:
        log.warning("endomorphism only commutes with A^0 after transposition; "
                    "treating it as written in the row convention")
        return "row"
    return "neither"


def in_column_convention(conn: ConnectionGerm, E: SeriesMatrix):
    """Return ``(E', convention)`` with E' transposed if the data was row-convention."""
    conv = detect_action_convention(conn, E)
    return (E.transpose() if conv == "row" else E), conv
