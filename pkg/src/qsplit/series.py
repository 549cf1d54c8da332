"""
Truncated power series in tau with exact rational coefficients, and the
p-adic diagnostics run on them (Newton polygons, logarithmic decay,
linear slope floors).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .errors import OrderMismatch, ZeroSeries
from .scalars import as_context, format_scalar, to_scalar, valuation

DEFAULT_ORDER = 64


class TruncatedSeries:
    """
    c_0 + c_1 tau + ... + c_K tau^K, with K fixed.

    Arithmetic between two series requires equal truncation order.
    Instances are treated as immutable.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable, order: Optional[int] = None):
        c = [to_scalar(x) for x in coeffs]
        if order is not None:
            if order < 0:
                raise ValueError("truncation order must be nonnegative")
            c = c[: order + 1] + [Fraction(0)] * (order + 1 - len(c))
        if not c:
            raise ValueError("a truncated series needs at least one coefficient")
        self._c = tuple(c)

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls([], order)

    @classmethod
    def constant(cls, value, order: int) -> "TruncatedSeries":
        return cls([value], order)

    @classmethod
    def from_function(cls, f: Callable[[int], object], order: int) -> "TruncatedSeries":
        return cls((f(k) for k in range(order + 1)), order)

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self._c

    def __len__(self):
        return len(self._c)

    def __getitem__(self, k):
        return self._c[k]

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self._c == other._c
        return NotImplemented

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        shown = ", ".join(format_scalar(x) for x in self._c[:6])
        more = ", ..." if len(self._c) > 6 else ""
        return f"TruncatedSeries([{shown}{more}], order={self.order})"

    def is_zero(self) -> bool:
        return not any(self._c)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self._c, order)

    def _check(self, other: "TruncatedSeries"):
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"expected TruncatedSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise OrderMismatch(f"orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + TruncatedSeries.constant(to_scalar(other), self.order)
        self._check(other)
        return TruncatedSeries(a + b for a, b in zip(self._c, other._c))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-a for a in self._c)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + (-to_scalar(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            s = to_scalar(other)
            return TruncatedSeries(s * a for a in self._c)
        self._check(other)
        a, b = self._c, other._c
        out = []
        for k in range(len(a)):
            acc = Fraction(0)
            for i in range(k + 1):
                if a[i] and b[k - i]:
                    acc += a[i] * b[k - i]
            out.append(acc)
        return TruncatedSeries(out)

    def __rmul__(self, other):
        return self * other

    def shift(self, n: int = 1) -> "TruncatedSeries":
        """Multiply by tau^n, keeping the truncation order."""
        zeros = [Fraction(0)] * n
        return TruncatedSeries(zeros + list(self._c[: len(self._c) - n]), self.order)

    def tau_d_tau(self) -> "TruncatedSeries":
        return TruncatedSeries(k * c for k, c in enumerate(self._c))

    def d_tau(self) -> "TruncatedSeries":
        """Derivative in tau; the truncation order drops by one (minimum 0)."""
        if self.order == 0:
            return TruncatedSeries([0])
        return TruncatedSeries(k * c for k, c in enumerate(self._c) if k > 0)

    def tau2_d_tau(self) -> "TruncatedSeries":
        """tau^2 d/dtau at the same order: coefficient k is (k-1) c_{k-1}."""
        return self.tau_d_tau().shift(1)

    def to_strings(self) -> List[str]:
        return [format_scalar(x) for x in self._c]


# --- p-adic diagnostics ----------------------------------------------------


@dataclass
class NewtonPolygonReport:
    p: int
    points: List[Tuple[int, int]]
    hull: List[Tuple[int, int]]
    min_slope_tail: Optional[Fraction]
    window: Tuple[int, int]

    def hull_slopes(self) -> List[Fraction]:
        return [
            Fraction(y1 - y0, x1 - x0)
            for (x0, y0), (x1, y1) in zip(self.hull, self.hull[1:])
        ]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Lower convex hull by Andrew's monotone chain; collinear points dropped."""
    hull: List[Tuple[int, int]] = []
    for pt in sorted(points):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return hull


def newton_polygon(a: TruncatedSeries, ctx, window: Optional[Tuple[int, int]] = None) -> NewtonPolygonReport:
    ctx = as_context(ctx)
    if a.is_zero():
        raise ZeroSeries("the Newton polygon of the zero series is undefined")
    points = [(k, valuation(c, ctx)) for k, c in enumerate(a) if c != 0]
    K = a.order
    lo, hi = window if window is not None else (math.ceil(K / 2), K)
    tail = [Fraction(v, k) for k, v in points if lo <= k <= hi and k > 0]
    return NewtonPolygonReport(
        p=ctx.p,
        points=points,
        hull=lower_hull(points),
        min_slope_tail=min(tail) if tail else None,
        window=(lo, hi),
    )


@dataclass
class LogDecayCertificate:
    """
    Outcome of a finite-window log-decay check.

    ``failure`` is ``None`` on pass, else ``(k, m)``: the first coefficient
    index and the divisibility exponent it violated.
    """

    p: int
    alpha: Fraction
    beta: Fraction
    verified_up_to: int
    failure: Optional[Tuple[int, int]] = None
    location: Optional[Tuple[int, int]] = field(default=None)

    @property
    def passed(self) -> bool:
        return self.failure is None

    @property
    def verdict(self) -> str:
        if self.passed:
            return "pass"
        k, m = self.failure
        where = f" entry {self.location}" if self.location is not None else ""
        return f"fail(k={k}, m={m}){where}"


def required_divisibility(k: int, p: int, alpha: Fraction, beta: Fraction) -> Optional[float]:
    """
    Largest m >= 0 with alpha*p^m + beta < k, or None when no m qualifies.

    With alpha = 0 and beta < k every m qualifies; ``math.inf`` is returned.
    """
    if not alpha + beta < k:
        return None
    if alpha == 0:
        return math.inf
    m = 0
    while alpha * p ** (m + 1) + beta < k:
        m += 1
    return m


def check_log_decay(a: TruncatedSeries, ctx, alpha, beta) -> LogDecayCertificate:
    ctx = as_context(ctx)
    alpha, beta = to_scalar(alpha), to_scalar(beta)
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be nonnegative")
    cert = LogDecayCertificate(ctx.p, alpha, beta, a.order)
    for k, c in enumerate(a):
        m = required_divisibility(k, ctx.p, alpha, beta)
        if m is None:
            continue
        if valuation(c, ctx) < m:
            cert.failure = (k, m)
            break
    return cert


@dataclass
class SlopeVerdict:
    p: int
    slope: Fraction
    gamma: Fraction
    k_min: int
    verified_up_to: int
    failure: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.failure is None

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else f"fail(k={self.failure})"


def slope_floor(a: TruncatedSeries, ctx, k_min: int, gamma, slope) -> SlopeVerdict:
    """Check val_p(c_k) >= slope*k - gamma for k_min <= k <= K."""
    ctx = as_context(ctx)
    slope, gamma = to_scalar(slope), to_scalar(gamma)
    if k_min > a.order:
        raise ValueError(f"k_min={k_min} exceeds truncation order {a.order}")
    out = SlopeVerdict(ctx.p, slope, gamma, k_min, a.order)
    for k in range(max(k_min, 0), a.order + 1):
        if valuation(a[k], ctx) < slope * k - gamma:
            out.failure = k
            break
    return out
