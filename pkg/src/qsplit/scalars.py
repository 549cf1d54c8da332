"""
Exact rational scalars viewed inside the p-adic numbers.

Scalars are plain :class:`fractions.Fraction` values, which already keep
a canonical reduced form with positive denominator.  This module adds the
p-adic side: valuations, reduction modulo p^m, and factorial valuations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import InputError, NonIntegral

Scalar = Fraction
ScalarLike = Union[int, Fraction, str]

#: valuation of the zero scalar
INF = math.inf


def is_prime(n: int) -> bool:
    """Deterministic trial division; adequate for the small primes used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeContext:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"{self.p!r} is not a prime")


def as_context(ctx) -> PrimeContext:
    return ctx if isinstance(ctx, PrimeContext) else PrimeContext(int(ctx))


def to_scalar(x: ScalarLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def parse_scalar(text: str) -> Fraction:
    """Parse ``"a"`` or ``"a/b"``; floats are rejected on purpose."""
    s = str(text).strip()
    try:
        if "/" in s:
            a, b = s.split("/")
            num, den = int(a), int(b)
            if den == 0:
                raise ZeroDivisionError
            return Fraction(num, den)
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not an exact scalar: {text!r}") from None


def format_scalar(x: ScalarLike) -> str:
    x = to_scalar(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: ScalarLike, ctx) -> Union[int, float]:
    """Exact p-adic valuation; ``INF`` for zero."""
    x = to_scalar(x)
    p = as_context(ctx).p
    if x == 0:
        return INF
    return _int_valuation(abs(x.numerator), p) - _int_valuation(x.denominator, p)


def is_integral(x: ScalarLike, ctx) -> bool:
    return to_scalar(x).denominator % as_context(ctx).p != 0


def reduce_mod(x: ScalarLike, ctx, m: int) -> int:
    """Image of a p-integral rational in Z/p^m, as a residue in [0, p^m)."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    x = to_scalar(x)
    p = as_context(ctx).p
    if x.denominator % p == 0:
        raise NonIntegral(f"{format_scalar(x)} is not {p}-integral")
    modulus = p**m
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


def digit_sum(j: int, p: int) -> int:
    s = 0
    while j:
        j, r = divmod(j, p)
        s += r
    return s


def legendre_valuation(j: int, p: int) -> int:
    """val_p(j!) as (j - s_p(j)) / (p - 1)."""
    return (j - digit_sum(j, p)) // (p - 1)


def factorial_valuation(j: int, ctx) -> int:
    """
    val_p(j!) computed by the floor-sum and by the digit-sum formula.

    The two routes are compared and an AssertionError is raised if they
    ever disagree.
    """
    if j < 0:
        raise ValueError("j must be nonnegative")
    p = as_context(ctx).p
    by_floors = 0
    q = p
    while q <= j:
        by_floors += j // q
        q *= p
    by_digits = legendre_valuation(j, p)
    assert by_floors == by_digits, (j, p, by_floors, by_digits)
    return by_floors
