"""
Small quantum cohomology rings given by structure constants, the quantum
connection on one degree slice, and the closed-form reference series of
the two worked examples (CP^1 and the blown-up four-torus slice).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .connection import ConnectionGerm
from .errors import (AssociativityFailure, EmptySlice, GradingViolation, InputError,
                     UnitFailure)
from .scalars import to_scalar
from .series import TruncatedSeries

#: element of H^*(M)[q^+-1]: (basis index, q exponent) -> coefficient
Element = Dict[Tuple[int, int], Fraction]


def _clean(x: Element) -> Element:
    return {k: v for k, v in x.items() if v != 0}


@dataclass
class QuantumRingSlice:
    labels: List[str]
    degrees: List[int]
    #: (i, j) -> list of (coefficient N, q exponent e, k): x_i * x_j contains N q^e x_k
    products: Dict[Tuple[int, int], List[Tuple[Fraction, int, int]]]
    unit_index: int
    c1: Dict[int, Fraction]
    dim_C: int
    name: str = ""

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown basis class {label!r}") from None

    def basis_element(self, i: int, qexp: int = 0) -> Element:
        return {(i, qexp): Fraction(1)}

    def multiply(self, x: Element, y: Element) -> Element:
        out: Element = {}
        for (i, a), cx in x.items():
            for (j, b), cy in y.items():
                for N, e, k in self.products[(i, j)]:
                    key = (k, a + b + e)
                    out[key] = out.get(key, Fraction(0)) + cx * cy * N
        return _clean(out)

    def unit(self) -> Element:
        return self.basis_element(self.unit_index)

    def c1_element(self) -> Element:
        return _clean({(i, 0): c for i, c in self.c1.items()})

    def element_degree(self, x: Element) -> Optional[int]:
        degs = {self.degrees[i] + 2 * e for (i, e) in x}
        if len(degs) > 1:
            raise GradingViolation("element is not homogeneous")
        return degs.pop() if degs else None


def validate_ring(data: dict) -> QuantumRingSlice:
    """
    Build a ring from parsed file data and check grading, unit and
    associativity exactly.  Every ordered pair of basis classes must have a
    declared product (possibly empty).
    """
    try:
        meta = data["meta"]
        basis = data["basis"]
        product = data["product"]
        c1_raw = data["c1"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"ring data is missing section {exc}") from None
    labels = [str(b["label"]) for b in basis]
    degrees = [int(b["degree"]) for b in basis]
    if len(set(labels)) != len(labels):
        raise InputError("duplicate basis labels")
    for lab, d in zip(labels, degrees):
        if d % 2:
            raise GradingViolation(f"class {lab} has odd degree {d}")
    pos = {lab: n for n, lab in enumerate(labels)}

    def idx(lab):
        if str(lab) not in pos:
            raise InputError(f"unknown basis class {lab!r}")
        return pos[str(lab)]

    products: Dict[Tuple[int, int], list] = {}
    for key, terms in product.items():
        try:
            left, right = str(key).split("*")
        except ValueError:
            raise InputError(f"product key {key!r} must read 'a*b'") from None
        i, j = idx(left.strip()), idx(right.strip())
        if (i, j) in products:
            raise InputError(f"product {key!r} declared twice")
        parsed = []
        for term in terms or []:
            coef, e, k = term
            parsed.append((to_scalar(coef), int(e), idx(k)))
        products[(i, j)] = parsed
    missing = [f"{labels[i]}*{labels[j]}" for i in range(len(labels)) for j in range(len(labels))
               if (i, j) not in products]
    if missing:
        raise InputError(f"undeclared products: {', '.join(missing)}")
    ring = QuantumRingSlice(
        labels=labels,
        degrees=degrees,
        products=products,
        unit_index=idx(meta["unit"]),
        c1={idx(k): to_scalar(v) for k, v in c1_raw.items()},
        dim_C=int(meta["dim_C"]),
        name=str(meta.get("name", "")),
    )
    _check_ring(ring)
    return ring


def _check_ring(ring: QuantumRingSlice):
    n = ring.rank
    for (i, j), terms in ring.products.items():
        for N, e, k in terms:
            if N == 0:
                continue
            if e < 0:
                raise GradingViolation(f"negative q-exponent in {ring.labels[i]}*{ring.labels[j]}")
            if ring.degrees[i] + ring.degrees[j] != ring.degrees[k] + 2 * e:
                raise GradingViolation(
                    f"{ring.labels[i]}*{ring.labels[j]} -> q^{e} {ring.labels[k]}: "
                    f"degree {ring.degrees[i] + ring.degrees[j]} != {ring.degrees[k] + 2 * e}")
    for i, c in ring.c1.items():
        if c and ring.degrees[i] != 2:
            raise GradingViolation(f"c1 has a component on {ring.labels[i]}, of degree {ring.degrees[i]}")
    u = ring.unit()
    for i in range(n):
        x = ring.basis_element(i)
        if ring.multiply(u, x) != x or ring.multiply(x, u) != x:
            raise UnitFailure(f"{ring.labels[ring.unit_index]} does not act as the identity on {ring.labels[i]}")
    for i, j, k in itertools.product(range(n), repeat=3):
        xi, xj, xk = (ring.basis_element(a) for a in (i, j, k))
        if ring.multiply(ring.multiply(xi, xj), xk) != ring.multiply(xi, ring.multiply(xj, xk)):
            raise AssociativityFailure(
                f"({ring.labels[i]}*{ring.labels[j]})*{ring.labels[k]} != "
                f"{ring.labels[i]}*({ring.labels[j]}*{ring.labels[k]})")


@dataclass
class DegreeSliceConnection:
    degree: int
    #: slice basis as (basis index, q exponent), total degree = degree
    basis: List[Tuple[int, int]]
    labels: List[str]
    connection: ConnectionGerm


def slice_basis(ring: QuantumRingSlice, d: int) -> List[Tuple[int, int]]:
    """Pairs (x_i, q^j) of total degree d, ordered by q exponent descending then index."""
    out = []
    for i, deg in enumerate(ring.degrees):
        if (d - deg) % 2 == 0:
            out.append((i, (d - deg) // 2))
    return sorted(out, key=lambda t: (-t[1], t[0]))


def build_connection(ring: QuantumRingSlice, d: int) -> DegreeSliceConnection:
    """
    -tau^2 d/dtau + (q^-1 c1 * .) - tau (Gr - d)/2 on the degree-d slice,
    returned in minus convention (stored internally negated).
    """
    basis = slice_basis(ring, d)
    if not basis:
        raise EmptySlice(f"no classes of total degree {d}")
    pos = {b: n for n, b in enumerate(basis)}
    r = len(basis)
    A0 = la.zeros(r)
    c1q = {(i, e - 1): c for (i, e), c in ring.c1_element().items()}
    for col, (i, e) in enumerate(basis):
        img = ring.multiply(c1q, ring.basis_element(i, e))
        for key, c in img.items():
            if key not in pos:
                raise GradingViolation(f"q^-1 c1 * q^{e} {ring.labels[i]} leaves the slice")
            A0[pos[key]][col] += c
    A1 = la.zeros(r)
    for n, (i, _) in enumerate(basis):
        A1[n][n] = Fraction(-(ring.degrees[i] - d), 2)
    labels = [ring.labels[i] if e == 0 else f"q^{e} {ring.labels[i]}" for i, e in basis]
    conn = ConnectionGerm([A0, A1], "minus", name=f"{ring.name} degree {d}".strip())
    return DegreeSliceConnection(d, basis, labels, conn)


def parse_element(ring: QuantumRingSlice, terms: Sequence) -> Element:
    """Element from a list of (coefficient, q exponent, class label)."""
    out: Element = {}
    for coef, e, lab in terms:
        key = (ring.index(str(lab)), int(e))
        out[key] = out.get(key, Fraction(0)) + to_scalar(coef)
    return _clean(out)


def idempotent_pole_order(ring: QuantumRingSlice, x: Element) -> Tuple[bool, int]:
    """(x * x == x, largest negative q-power in x, floored at 0)."""
    alpha = max([0] + [-e for (_, e) in x])
    return ring.multiply(x, x) == _clean(x), alpha


def check_idempotent_family(ring: QuantumRingSlice, family: Sequence[Element]) -> List[str]:
    bad = []
    total: Element = {}
    for x in family:
        for k, v in x.items():
            total[k] = total.get(k, Fraction(0)) + v
    if _clean(total) != ring.unit():
        bad.append("idempotents do not sum to the unit")
    for a, x in enumerate(family):
        for b, y in enumerate(family):
            prod = ring.multiply(x, y)
            if a == b and prod != _clean(x):
                bad.append(f"element {a} is not idempotent")
            if a != b and prod:
                bad.append(f"elements {a} and {b} are not orthogonal")
    return bad


# --- closed forms ---------------------------------------------------------------------

REFERENCE_NAMES = ("cp1_H21", "cp1_H11", "cp1_H12", "cp1_H22",
                   "blowup_E12", "blowup_E23", "blowup_E13")


def _cp1_h21(K: int) -> TruncatedSeries:
    def c(k):
        if k == 0:
            return 1
        if k % 2:
            return 0
        j = k // 2
        return Fraction(comb(2 * j - 1, j) ** 2 * factorial(2 * j), 2 ** (8 * j - 2))
    return TruncatedSeries.from_function(c, K)


def reference_series(name: str, K: int) -> TruncatedSeries:
    """
    Closed forms printed for the examples; the CP^1 entries other than H21
    and blowup E13 are derived through their defining relations.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    if name == "cp1_H21":
        return _cp1_h21(K)
    if name == "cp1_H11":
        return _cp1_h21(K).shift(1).tau_d_tau() * Fraction(1, 4)
    if name == "cp1_H22":
        return -reference_series("cp1_H11", K)
    if name == "cp1_H12":
        return _cp1_h21(K) - reference_series("cp1_H11", K).tau2_d_tau() * Fraction(1, 2)
    if name == "blowup_E12":
        return TruncatedSeries.from_function(lambda j: (-1) ** j * factorial(j), K)
    if name == "blowup_E23":
        return TruncatedSeries.from_function(lambda j: -factorial(j), K)
    if name == "blowup_E13":
        return reference_series("blowup_E12", K) * reference_series("blowup_E23", K)
    raise InputError(f"unknown reference series {name!r}; choose from {', '.join(REFERENCE_NAMES)}")


def cp1_reference_matrix(K: int):
    """H assembled from the four closed forms (row i, column j = H_ij)."""
    from .connection import SeriesMatrix
    g = {n: reference_series(f"cp1_H{n}", K) for n in ("11", "12", "21", "22")}
    return SeriesMatrix.from_entries([[g["11"], g["12"]], [g["21"], g["22"]]])


def blowup_reference_matrix(K: int):
    """The printed idempotent E, entries E_ij as written (row convention)."""
    from .connection import SeriesMatrix
    z = TruncatedSeries.zero(K)
    one = TruncatedSeries.constant(1, K)
    return SeriesMatrix.from_entries([
        [z, reference_series("blowup_E12", K), reference_series("blowup_E13", K)],
        [z, one, reference_series("blowup_E23", K)],
        [z, z, z],
    ])
