from fractions import Fraction
import math

import pytest
from hypothesis import given, settings, strategies as st

from qsplit.errors import OrderMismatch, ZeroSeries
from qsplit.quantum_ring import reference_series
from qsplit.scalars import digit_sum, factorial_valuation, valuation
from qsplit.series import (TruncatedSeries, check_log_decay, lower_hull, newton_polygon,
                           required_divisibility, slope_floor)

S = TruncatedSeries


def series_k(k):
    small = st.builds(Fraction, st.integers(-99, 99), st.integers(1, 50))
    return st.lists(small, min_size=k + 1, max_size=k + 1).map(S)


def geometric(K):
    return S([1] * (K + 1))


def test_order_padding_and_length():
    a = S([1, 2], order=4)
    assert a.order == 4 and len(a) == 5
    assert list(a) == [1, 2, 0, 0, 0]
    assert S([1, 2, 3, 4], order=1).coeffs == (1, 2)


def test_ring_examples():
    assert S([1, 1], 3) * S([1, -1], 3) == S([1, 0, -1], 3)
    assert geometric(5) * S([1, -1], 5) == S([1], 5)
    a = S([3, Fraction(1, 2), -7], 2)
    assert a * S.constant(1, 2) == a
    assert a * 2 == a + a
    assert 1 - a == -(a - 1)


def test_order_mismatch():
    with pytest.raises(OrderMismatch):
        S([1], 2) + S([1], 3)
    with pytest.raises(OrderMismatch):
        S([1], 2) * S([1], 3)


@settings(max_examples=100)
@given(series_k(16), series_k(16), series_k(16))
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=50)
@given(series_k(12), series_k(12))
def test_tau_d_tau_leibniz(a, b):
    assert (a * b).tau_d_tau() == a.tau_d_tau() * b + a * b.tau_d_tau()


def test_derivative_examples():
    assert S([1, 0, 1], 2).tau_d_tau() == S([0, 0, 2], 2)
    assert S.constant(5, 4).tau_d_tau().is_zero()
    assert S([4, 3, 2], 2).d_tau() == S([3, 4], 1)
    assert S([7]).d_tau() == S([0])
    assert S([1, 1, 1], 2).tau2_d_tau() == S([0, 0, 1], 2)


def test_d_tau_product_rule_on_cp1_series():
    h = reference_series("cp1_H21", 10)
    tau = S([0, 1], 10)
    lhs = (tau * h).d_tau()
    # d(tau h) = h + tau h'
    rhs = h.truncate(9) + tau.truncate(9) * h.d_tau()
    assert lhs == rhs


def test_newton_polygon_slope_one():
    rep = newton_polygon(S.from_function(lambda k: 3**k, 20), 3)
    assert rep.hull == [(0, 0), (20, 20)]
    assert rep.hull_slopes() == [1]


def test_newton_polygon_horizontal():
    rep = newton_polygon(geometric(30), 5)
    assert rep.hull == [(0, 0), (30, 0)]
    assert rep.min_slope_tail == 0


def test_newton_polygon_factorials():
    rep = newton_polygon(S.from_function(math.factorial, 81), 3)
    assert dict(rep.points)[81] == 40 == factorial_valuation(81, 3)


def test_newton_polygon_zero():
    with pytest.raises(ZeroSeries):
        newton_polygon(S.zero(5), 3)


@settings(max_examples=60)
@given(st.lists(st.integers(-3**6, 3**6).filter(bool), min_size=2, max_size=25))
def test_hull_convex_and_below_points(cs):
    rep = newton_polygon(S(cs), 3)
    slopes = rep.hull_slopes()
    assert all(s < t for s, t in zip(slopes, slopes[1:]))
    for k, v in rep.points:
        for (x0, y0), (x1, y1) in zip(rep.hull, rep.hull[1:]):
            if x0 <= k <= x1:
                assert v >= y0 + Fraction(y1 - y0, x1 - x0) * (k - x0)


def test_lower_hull_drops_collinear():
    assert lower_hull([(0, 0), (1, 1), (2, 2), (3, 0)]) == [(0, 0), (3, 0)]


def test_required_divisibility():
    assert required_divisibility(2, 3, 1, 1) is None
    assert required_divisibility(3, 3, 1, 1) == 0
    assert required_divisibility(5, 3, 1, 1) == 1
    assert required_divisibility(11, 3, 1, 1) == 2
    assert required_divisibility(3, 3, 0, 1) == math.inf


def test_log_decay_geometric_first_failure():
    # k=5 already exceeds 3+1, so val >= 1 is needed there
    cert = check_log_decay(geometric(50), 3, 1, 1)
    assert cert.failure == (5, 1)
    assert cert.verdict == "fail(k=5, m=1)"
    assert cert.verified_up_to == 50


def test_log_decay_zero_series_passes():
    for ab in [(0, 0), (1, 1), (Fraction(1, 2), 3)]:
        assert check_log_decay(S.zero(40), 5, *ab).passed


def test_log_decay_cp1():
    assert check_log_decay(reference_series("cp1_H21", 200), 3, 1, 1).passed


def brute_log_decay(a, p, alpha, beta):
    for k, c in enumerate(a):
        m = 0
        while alpha * p**m + beta < k:
            if valuation(c, p) < m:
                return False
            m += 1
    return True


@settings(max_examples=60)
@given(st.lists(st.integers(-10**4, 10**4), min_size=1, max_size=40),
       st.sampled_from([2, 3, 5]), st.integers(0, 3), st.integers(0, 4))
def test_log_decay_matches_brute_force(cs, p, alpha, beta):
    a = S(cs)
    assert check_log_decay(a, p, alpha, beta).passed == brute_log_decay(a, p, alpha, beta)


@settings(max_examples=60)
@given(st.lists(st.integers(-10**4, 10**4), min_size=1, max_size=40), st.integers(0, 3), st.integers(0, 4))
def test_log_decay_monotone_in_constants(cs, alpha, beta):
    a = S(cs)
    if check_log_decay(a, 3, alpha, beta).passed:
        assert check_log_decay(a, 3, alpha + 1, beta).passed
        assert check_log_decay(a, 3, alpha, beta + 1).passed


@given(st.lists(st.integers(-100, 100), min_size=1, max_size=30), st.integers(0, 2), st.integers(0, 3))
def test_integral_series_never_fail_at_m0(cs, alpha, beta):
    cert = check_log_decay(S(cs), 2, alpha, beta)
    assert cert.passed or cert.failure[1] > 0


def test_slope_floor_factorials():
    s = S.from_function(math.factorial, 200)
    # val(j!) = (j - s_3(j))/2 and s_3(j) <= 9 on this window
    assert max(digit_sum(j, 3) for j in range(201)) == 9
    assert slope_floor(s, 3, 0, Fraction(9, 2), Fraction(1, 2)).passed
    v = slope_floor(s, 3, 0, 2, Fraction(1, 2))
    assert v.failure == 17 and digit_sum(17, 3) == 5


def test_slope_floor_examples():
    assert slope_floor(S.constant(7, 30), 3, 0, 0, 5).passed
    assert slope_floor(geometric(10), 3, 0, 1, Fraction(1, 2)).failure == 3
    with pytest.raises(ValueError):
        slope_floor(geometric(10), 3, 11, 0, 1)
