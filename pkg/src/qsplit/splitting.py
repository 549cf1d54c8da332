"""
Splittings of connections tau^2 d/dtau + A^0 + A^1 tau + ...

* ``generalized_eigenprojectors``: idempotents of A^0 as polynomials in A^0.
* ``block_split``: order-by-order gauge to a form that is block diagonal
  with respect to the generalized eigenspaces of A^0, and the resulting
  covariantly constant projector series.
* ``extend_endomorphism``: for a simple pole (A^0 = 0), the recursive
  extension of a constant term E^0, reporting resonant orders.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from . import linalg as la
from .connection import ConnectionGerm, SeriesMatrix, covariant_derivative
from .errors import NonIntegral, PreconditionViolated, SizeMismatch
from .scalars import as_context, to_scalar, valuation
from .series import LogDecayCertificate, TruncatedSeries, check_log_decay

# --- eigen data --------------------------------------------------------------


@dataclass
class EigenData:
    eigenvalues: List[Fraction]
    multiplicities: List[int]
    projectors: List[la.Matrix]
    #: (lambda_i, lambda_j, difference, valuation, is p-adic unit); i < j
    differences: List[Tuple[Fraction, Fraction, Fraction, object, bool]] = field(default_factory=list)
    p: Optional[int] = None

    def projector(self, lam) -> la.Matrix:
        return self.projectors[self.eigenvalues.index(to_scalar(lam))]

    @property
    def all_differences_units(self) -> bool:
        return all(d[4] for d in self.differences)


def _taylor_shift(f: la.Poly, c: Fraction) -> la.Poly:
    """Coefficients of f(u + c) in u."""
    out = [Fraction(0)] * len(f)
    for coef in reversed(f):
        # out <- out * (u + c) + coef
        nxt = [Fraction(0)] * len(f)
        for i, x in enumerate(out):
            if x:
                nxt[i] += x * c
                if i + 1 < len(f):
                    nxt[i + 1] += x
        nxt[0] += coef
        out = nxt
    return out


def _series_inverse(f: la.Poly, n: int) -> la.Poly:
    """First n coefficients of 1/f, f(0) != 0."""
    f = list(f) + [Fraction(0)] * n
    inv = [1 / f[0]]
    for k in range(1, n):
        inv.append(-sum((f[i] * inv[k - i] for i in range(1, k + 1)), Fraction(0)) / f[0])
    return inv


def idempotent_polynomial(roots: List[Tuple[Fraction, int]], lam: Fraction) -> la.Poly:
    """
    f with f = 1 mod (x - lam)^m_lam and f = 0 mod (x - mu)^m_mu, mu != lam.

    f = g * h where g = prod_{mu != lam} (x - mu)^m_mu and h inverts g
    modulo (x - lam)^m_lam.
    """
    g = [Fraction(1)]
    m_lam = None
    for mu, m in roots:
        if mu == lam:
            m_lam = m
            continue
        for _ in range(m):
            g = la.poly_mul(g, [-mu, Fraction(1)])
    g_u = _taylor_shift(g, lam)
    h_u = _series_inverse(g_u, m_lam)
    # back to x: h(x) = h_u(x - lam)
    h = [Fraction(0)]
    for coef in reversed(h_u):
        h = la.poly_mul(h, [-lam, Fraction(1)])
        h[0] += coef
    return la.poly_mul(g, h)


def generalized_eigenprojectors(A0: la.Matrix, ctx=None) -> EigenData:
    A0 = la.mat(A0)
    n, m = la.shape(A0)
    if n != m:
        raise SizeMismatch("A^0 must be square")
    roots = la.rational_roots(la.charpoly(A0))
    lams = [r for r, _ in roots]
    mults = [mm for _, mm in roots]
    projs = [la.poly_eval_matrix(idempotent_polynomial(roots, lam), A0) for lam in lams]
    data = EigenData(lams, mults, projs)
    if ctx is not None:
        ctx = as_context(ctx)
        data.p = ctx.p
        for i in range(len(lams)):
            for j in range(i + 1, len(lams)):
                d = lams[i] - lams[j]
                v = valuation(d, ctx)
                data.differences.append((lams[i], lams[j], d, v, v == 0))
    return data


def check_eigendata(data: EigenData, A0: la.Matrix) -> List[str]:
    """Exact checks of the projector identities; returns a list of failures."""
    n = len(A0)
    bad = []
    if sum(data.multiplicities) != n:
        bad.append("multiplicities do not add up to the size")
    total = la.zeros(n)
    for i, (lam, e) in enumerate(zip(data.eigenvalues, data.projectors)):
        total = la.add(total, e)
        if not la.is_zero(la.commutator(e, A0)):
            bad.append(f"projector for {lam} does not commute with A^0")
        for j, f in enumerate(data.projectors):
            want = e if i == j else la.zeros(n)
            if la.matmul(e, f) != want:
                bad.append(f"e_{lam} e_{data.eigenvalues[j]} is wrong")
        if la.trace(e) != data.multiplicities[i]:
            bad.append(f"rank of e_{lam} differs from its multiplicity")
    if total != la.identity(n):
        bad.append("projectors do not sum to the identity")
    return bad


# --- block splitting -----------------------------------------------------------


@dataclass
class SplittingResult:
    eigen: EigenData
    gauge: SeriesMatrix
    transformed: ConnectionGerm
    projector_series: List[SeriesMatrix]
    #: eigenvalues as they read in the input convention
    labels: List[Fraction]
    residual: int
    failures: List[str] = field(default_factory=list)

    def projector(self, label) -> SeriesMatrix:
        return self.projector_series[self.labels.index(to_scalar(label))]


def _sylvester_block(lam: Fraction, mu: Fraction, N_lam: la.Matrix, N_mu: la.Matrix,
                     C: la.Matrix) -> la.Matrix:
    """
    Solve (lam - mu) X + N_lam X - X N_mu = C with N_lam, N_mu nilpotent.

    Uses the terminating expansion X = sum_n (-L)^n C / (lam - mu)^(n+1),
    L(X) = N_lam X - X N_mu.
    """
    d = lam - mu
    X = la.zeros(len(C))
    term = C
    n = 0
    while not la.is_zero(term):
        X = la.add(X, la.scale(Fraction((-1) ** n) / d ** (n + 1), term))
        term = la.sub(la.matmul(N_lam, term), la.matmul(term, N_mu))
        n += 1
        if n > 2 * len(C) + 1:
            raise ArithmeticError("nilpotent part failed to terminate")
    return X


def _block(e: la.Matrix, X: la.Matrix, f: la.Matrix) -> la.Matrix:
    return la.matmul(e, la.matmul(X, f))


NORMALIZATIONS = ("zero", "alternative")


def block_split(conn: ConnectionGerm, ctx=None, order: Optional[int] = None,
                normalization: str = "zero", verify: bool = True) -> SplittingResult:
    """
    Gauge G = I + O(tau) making the connection commute with every
    generalized eigenprojector e_lambda of A^0, and E_lambda = G e_lambda G^-1.

    At each order the off-diagonal blocks of G^k solve a Sylvester equation.
    The diagonal blocks are free; ``normalization="zero"`` sets them to 0,
    ``"alternative"`` sets block (lam, lam) to e_lam (S^k + J) e_lam, with
    S^k the known right-hand side and J the all-ones matrix.  Projectors do
    not depend on that choice.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    K = order if order is not None else (conn.truncation if conn.truncation is not None else 64)
    r = conn.size
    A0 = conn.coeff(0)
    eigen = generalized_eigenprojectors(A0, ctx)
    lams, es = eigen.eigenvalues, eigen.projectors
    nils = [la.matmul(la.sub(A0, la.scale(lam, la.identity(r))), e) for lam, e in zip(lams, es)]
    ones = [[Fraction(1)] * r for _ in range(r)]

    G = [la.identity(r)]
    B = [A0]
    for k in range(1, K + 1):
        S = la.copy(conn.coeff(k))
        for i in range(1, k):
            Ai = conn.coeff(i)
            if not la.is_zero(Ai):
                S = la.add(S, la.matmul(Ai, G[k - i]))
            S = la.sub(S, la.matmul(G[i], B[k - i]))
        if k > 1:
            S = la.add(S, la.scale(k - 1, G[k - 1]))
        Gk = la.zeros(r)
        Sf = [la.matmul(S, f) for f in es]
        for a, (lam, e) in enumerate(zip(lams, es)):
            for b, mu in enumerate(lams):
                if a == b:
                    if normalization == "alternative":
                        Gk = la.add(Gk, _block(e, la.add(S, ones), e))
                    continue
                C = la.neg(la.matmul(e, Sf[b]))
                if not la.is_zero(C):
                    Gk = la.add(Gk, _sylvester_block(lam, mu, nils[a], nils[b], C))
        Bk = la.add(la.commutator(A0, Gk), S)
        if not all(la.is_zero(la.commutator(e, Bk)) for e in es):
            raise ArithmeticError(f"off-diagonal block survived at order {k}")
        G.append(Gk)
        B.append(Bk)

    gauge = SeriesMatrix(G)
    transformed = ConnectionGerm(B, "plus", truncation=K, name=conn.name)
    transformed.convention = conn.convention
    Ginv = gauge.inverse()
    projs = [gauge * (SeriesMatrix.constant(e, K) * Ginv) for e in es]
    sign = 1 if conn.convention == "plus" else -1
    result = SplittingResult(eigen, gauge, transformed, projs, [sign * lam for lam in lams], K)
    if verify:
        result.failures = verify_projector_family(conn, projs)
        if result.failures:
            result.residual = -1
    return result


def verify_projector_family(conn: ConnectionGerm, projs: List[SeriesMatrix]) -> List[str]:
    """Partition of unity, orthogonal idempotency and covariant constancy, exactly."""
    bad = []
    r, K = projs[0].size, projs[0].order
    total = SeriesMatrix.zero(r, K)
    for i, E in enumerate(projs):
        total = total + E
        if not covariant_derivative(conn, E).is_zero():
            bad.append(f"projector {i} is not covariantly constant")
        for j in range(i, len(projs)):
            prod = E * projs[j]
            want = E if i == j else SeriesMatrix.zero(r, K)
            if prod != want:
                bad.append(f"E_{i} E_{j} has the wrong value")
    if total != SeriesMatrix.identity(r, K):
        bad.append("projectors do not sum to the identity")
    return bad


# --- simple-pole extension -------------------------------------------------------


@dataclass
class ResonanceEvent:
    order: int
    kind: str  # "obstructed" or "non_unique"
    kernel_dim: int
    kernel_basis: List[la.Matrix] = field(default_factory=list)
    obstruction: Optional[la.Matrix] = None


@dataclass
class ResonanceReport:
    status: str  # "unique" | "obstructed" | "non_unique"
    order: Optional[int] = None
    kernel_dim: int = 0
    obstruction: Optional[la.Matrix] = None
    events: List[ResonanceEvent] = field(default_factory=list)
    verified_up_to: int = 0

    def summary(self) -> str:
        if self.status == "unique":
            return f"unique up to order {self.verified_up_to}"
        if self.status == "obstructed":
            return f"obstructed at order {self.order}"
        return f"non_unique at order {self.order} (kernel dimension {self.kernel_dim})"


def _vec(m: la.Matrix) -> List[Fraction]:
    return [x for row in m for x in row]


def _unvec(v, r: int) -> la.Matrix:
    return [list(v[i * r:(i + 1) * r]) for i in range(r)]


def resonance_operator(A1: la.Matrix, k: int) -> la.Matrix:
    """Matrix of X -> k X + A1 X - X A1 on row-major vectorized r x r matrices."""
    r = len(A1)
    n = r * r
    L = la.zeros(n)
    for i in range(r):
        for j in range(r):
            row = i * r + j
            L[row][row] += k
            for l in range(r):
                # (A1 X)_ij = sum_l A1[i][l] X[l][j]
                if A1[i][l]:
                    L[row][l * r + j] += A1[i][l]
                # (X A1)_ij = sum_l X[i][l] A1[l][j]
                if A1[l][j]:
                    L[row][i * r + l] -= A1[l][j]
    return L


def _projection_outside_image(L: la.Matrix, rhs: List[Fraction]) -> List[Fraction]:
    """Orthogonal projection of rhs onto the left kernel of L (the cokernel directions)."""
    Y = la.nullspace(la.transpose(L))
    if not Y:
        return [Fraction(0)] * len(rhs)
    gram = [[sum(a * b for a, b in zip(y1, y2)) for y2 in Y] for y1 in Y]
    coords = la.matvec(la.inverse(gram), [sum(a * b for a, b in zip(y, rhs)) for y in Y])
    out = [Fraction(0)] * len(rhs)
    for c, y in zip(coords, Y):
        for i, x in enumerate(y):
            out[i] += c * x
    return out


def extend_endomorphism(conn: ConnectionGerm, E0: la.Matrix, order: Optional[int] = None):
    """
    Extend E^0 to E = E^0 + E^1 tau + ... with [nabla, E] = 0, for A^0 = 0.

    Order k solves (k + ad A^1) E^k = -sum_{i=2}^{k+1} [A^i, E^{k+1-i}].
    At a singular order the right-hand side is either outside the image
    (obstructed: the computation stops) or inside it (non-unique: the basic
    solution with free variables zero is kept, and the kernel is recorded).

    Returns ``(E, report)``; on obstruction E is truncated just below the
    obstructed order.
    """
    E0 = la.mat(E0)
    r = conn.size
    if la.shape(E0) != (r, r):
        raise SizeMismatch(f"E^0 must be {r} x {r}")
    if not la.is_zero(conn.coeff(0)):
        raise PreconditionViolated("A^0 must vanish (simple pole)")
    A1 = conn.coeff(1)
    if not la.is_zero(la.commutator(A1, E0)):
        raise PreconditionViolated("[A^1, E^0] != 0")
    K = order if order is not None else (conn.truncation if conn.truncation is not None else 64)
    coeffs = [E0]
    report = ResonanceReport(status="unique")
    for k in range(1, K + 1):
        rhs = la.zeros(r)
        for i in range(2, k + 2):
            Ai = conn.coeff(i)
            if not la.is_zero(Ai):
                rhs = la.sub(rhs, la.commutator(Ai, coeffs[k + 1 - i]))
        L = resonance_operator(A1, k)
        x, _ = la.solve(L, _vec(rhs))
        kernel = la.nullspace(L)
        if x is None:
            obstruction = _unvec(_projection_outside_image(L, _vec(rhs)), r)
            ev = ResonanceEvent(k, "obstructed", len(kernel),
                                [_unvec(v, r) for v in kernel], obstruction)
            report.events.append(ev)
            report.status, report.order = "obstructed", k
            report.kernel_dim, report.obstruction = len(kernel), obstruction
            report.verified_up_to = k - 1
            return SeriesMatrix(coeffs), report
        if kernel:
            report.events.append(ResonanceEvent(k, "non_unique", len(kernel),
                                                [_unvec(v, r) for v in kernel]))
            if report.status == "unique":
                report.status, report.order, report.kernel_dim = "non_unique", k, len(kernel)
        coeffs.append(_unvec(x, r))
    report.verified_up_to = K
    return SeriesMatrix(coeffs), report


# --- p-adic checks on outputs ----------------------------------------------------


def verify_divisibility(E: SeriesMatrix, ctx, alpha, beta) -> LogDecayCertificate:
    """Log-decay check on every entry; the first failing entry is reported."""
    ctx = as_context(ctx)
    agg = LogDecayCertificate(ctx.p, to_scalar(alpha), to_scalar(beta), E.order)
    for i in range(E.size):
        for j in range(E.size):
            cert = check_log_decay(E.entry(i, j), ctx, alpha, beta)
            if not cert.passed:
                agg.failure, agg.location = cert.failure, (i, j)
                return agg
    return agg


def mod_p_reduction_degree(s: TruncatedSeries, ctx) -> Optional[int]:
    """
    Degree of s mod p as a polynomial.

    Returns -1 when s vanishes mod p, and None when the last coefficient in
    the window is a unit (the degree may exceed the truncation order).
    """
    ctx = as_context(ctx)
    vals = [valuation(c, ctx) for c in s]
    bad = [k for k, v in enumerate(vals) if v < 0]
    if bad:
        raise NonIntegral(f"coefficient {bad[0]} is not {ctx.p}-integral")
    units = [k for k, v in enumerate(vals) if v == 0]
    if not units:
        return -1
    deg = units[-1]
    if deg == s.order and s.order > 0:
        return None
    return deg


def p_integral(E: SeriesMatrix, ctx) -> bool:
    ctx = as_context(ctx)
    return all(c.denominator % ctx.p for m in E.coeffs for row in m for c in row)
