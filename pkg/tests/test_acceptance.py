"""
Acceptance criteria 1-9, each at its stated tolerance.

Every criterion prints one line "criterion N: PASS|FAIL  detail".  Run as a
script for the lines alone, or through pytest (the lines are repeated in the
terminal summary).  Criteria 3 and 6 do not hold for the printed series;
their tests are strict xfails so a change in that status is noticed.
"""
from __future__ import annotations

import math
import random
import sys
import time
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qsplit import fileio, linalg as la  # noqa: E402
from qsplit.cli import resolve_path  # noqa: E402
from qsplit.connection import SeriesMatrix, covariant_derivative, in_column_convention  # noqa: E402
from qsplit.cyclic import (BaseComplex, BGammaCochain, EquivariantCochain, EquivariantComplex,  # noqa: E402
                           bgamma_cohomology, bgamma_cup, cochain_slots, coefficient_cup, cohomologous,
                           equivariant_cohomology, restrict_on_cohomology, tensor_power_class,
                           tensor_product, total_differential, trivial_complex)
from qsplit.quantum_ring import (blowup_reference_matrix, build_connection, reference_series,  # noqa: E402
                                 validate_ring)
from qsplit.scalars import digit_sum, valuation  # noqa: E402
from qsplit.splitting import block_split, extend_endomorphism, mod_p_reduction_degree, verify_divisibility  # noqa: E402
from randconn import random_split_connection  # noqa: E402

RESULTS: dict = {}


def record(n: int, ok: bool, detail: str) -> bool:
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    return ok


def load(name):
    return fileio.load_connection(resolve_path(name))


@lru_cache(maxsize=None)
def cp1_connection():
    import yaml
    ring = validate_ring(yaml.safe_load(resolve_path("cp1.ring").read_text()))
    return build_connection(ring, 0).connection


@lru_cache(maxsize=None)
def cp1_split(K):
    return block_split(cp1_connection(), 3, order=K)


@lru_cache(maxsize=None)
def blowup_split(K):
    return block_split(load("blowup.conn"), 3, order=K)


def cp1_H(K):
    res = cp1_split(K)
    return res.projector(2) - res.projector(-2)


# --- criteria ----------------------------------------------------------------------


def criterion_1():
    K = 60
    t0 = time.perf_counter()
    cp1_split.cache_clear()
    H = cp1_H(K)
    elapsed = time.perf_counter() - t0
    names = {(1, 0): "cp1_H21", (0, 0): "cp1_H11", (1, 1): "cp1_H22", (0, 1): "cp1_H12"}
    bad = [names[ij] for ij in names if H.entry(*ij) != reference_series(names[ij], K)]
    involution = H * H == SeriesMatrix.identity(2, K)
    ok = not bad and involution and elapsed <= 10
    return record(1, ok, f"K={K}, entries mismatching={bad or 'none'}, H^2=I: {involution}, "
                         f"split {elapsed:.2f}s (limit 10s)")


def criterion_2():
    K = 200
    h21 = cp1_H(K).entry(1, 0)
    t0 = time.perf_counter()
    degs = {p: mod_p_reduction_degree(h21, p) for p in (3, 5, 7)}
    elapsed = time.perf_counter() - t0
    ok = all(d is not None and d < p for p, d in degs.items()) and elapsed <= 5
    return record(2, ok, f"K={K}, mod-p degrees {degs}, check {elapsed:.2f}s (limit 5s)")


def criterion_3():
    K = 200
    h21 = cp1_H(K).entry(1, 0)
    t0 = time.perf_counter()
    failures = {}
    for p in (3, 5):
        bad = [k for k in range(K + 1) if valuation(h21[k], p) < math.ceil(2 * k / (p - 1)) - 2]
        failures[p] = bad
    elapsed = time.perf_counter() - t0
    ok = not any(failures.values()) and elapsed <= 5
    detail = ", ".join(f"p={p}: {len(b)} violations" + (f" (first k={b[0]}, val={valuation(h21[b[0]], p)}, "
                                                           f"bound {math.ceil(2 * b[0] / (p - 1)) - 2})" if b else "")
                       for p, b in failures.items())
    return record(3, ok, f"K={K}, {detail}, {elapsed:.2f}s")


def criterion_4():
    K = 60
    conn = load("blowup.conn")
    E_printed = blowup_reference_matrix(K)
    E, conv = in_column_convention(conn, E_printed)
    flat = covariant_derivative(conn, E).is_zero()
    idem = E * E == E
    split = blowup_split(K).projector(-1).transpose()
    reproduced = all(split.entry(*ij) == reference_series(n, K)
                     for ij, n in [((0, 1), "blowup_E12"), ((1, 2), "blowup_E23"), ((0, 2), "blowup_E13")])
    ok = conv == "row" and flat and idem and reproduced
    return record(4, ok, f"K={K}, convention detected: {conv}, [nabla,E]=0: {flat}, E^2=E: {idem}, "
                         f"block_split reproduces E12/E23/E13: {reproduced}")


def criterion_5():
    K = 200
    e12 = blowup_split(K).projector(-1).entry(1, 0)  # column convention: transpose of E12
    bad = [(p, k) for p in (2, 3, 5) for k in range(K + 1)
           if valuation(e12[k], p) != (k - digit_sum(k, p)) // (p - 1)]
    return record(5, not bad, f"K={K}, p in (2,3,5), mismatches: {bad[:3] or 'none'}")


def criterion_6(part=None):
    K = 200
    lines, ok_cp1, ok_blow = [], True, True
    for p in (3, 5, 7):
        for lab in (2, -2):
            cert = verify_divisibility(cp1_split(K).projector(lab), p, 1, 1)
            ok_cp1 &= cert.passed
            if not cert.passed:
                lines.append(f"CP1 E_{lab} p={p}: {cert.verdict}")
    res = blowup_split(K)
    for p in (2, 3, 5):
        for lab, E in zip(res.labels, res.projector_series):
            cert = verify_divisibility(E, p, 1, 2)
            ok_blow &= cert.passed
            if not cert.passed:
                lines.append(f"blowup E_{lab} p={p}: {cert.verdict}")
    record(6, ok_cp1 and ok_blow, f"K={K}, CP1 (1,1): {'pass' if ok_cp1 else 'fail'}, "
                                  f"blowup (1,2): {'pass' if ok_blow else 'fail'}"
                                  + (f"; {'; '.join(lines)}" if lines else ""))
    return {"cp1": ok_cp1, "blowup": ok_blow}.get(part, ok_cp1 and ok_blow)


def criterion_7():
    conn = load("non_existence.conn")
    _, rep1 = extend_endomorphism(conn, la.mat([[1, 0], [0, 0]]))
    nu = load("non_uniqueness.conn")
    E, rep2 = extend_endomorphism(nu, la.mat([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]), 16)
    other = fileio.load_matrix(resolve_path("non_uniqueness_second.mat"))
    K = other.order
    E = E.truncate(K)
    flat = covariant_derivative(nu, E).is_zero() and covariant_derivative(nu, other).is_zero()
    idem = E * E == E and other * other == other
    same_const = E.coeff(0) == other.coeff(0) and E != other
    ok = (rep1.status, rep1.order) == ("obstructed", 1) and \
        (rep2.status, rep2.order, rep2.kernel_dim) == ("non_unique", 1, 3) and flat and idem and same_const
    return record(7, ok, f"non-existence: {rep1.summary()}; non-uniqueness: {rep2.summary()}; "
                         f"both matrices flat idempotents: {flat and idem}, same constant term: {same_const}")


def criterion_8():
    rng = random.Random(20240808)
    bad = []
    for trial in range(25):
        conn = random_split_connection(rng, rng.randint(1, 4), degree=1)
        res = block_split(conn, order=32)
        alt = block_split(conn, order=32, normalization="alternative")
        if res.failures or alt.failures or alt.projector_series != res.projector_series:
            bad.append(trial)
    return record(8, not bad, f"25 connections, r<=4, K=32, failing trials: {bad or 'none'}")


def _random_complex(rng, p, m):
    n = rng.randint(1, 2)
    swap = n == 2 and p == 2
    sig = [[int((i != j) if swap else (i == j)) for j in range(n)] for i in range(n)]
    k = rng.randint(-2, 2)
    d = [[k * (int(i == j) + sig[i][j]) for j in range(n)] for i in range(n)]
    return EquivariantComplex(p, m, {0: n, 1: n}, {0: d}, {0: sig, 1: sig})


def _random_cochain(rng, V, D):
    return EquivariantCochain(D, {(i, e): [rng.randint(-3, 3) for _ in range(V.dim(q))]
                                  for i, e, q in cochain_slots(V, D)})


def criterion_9():
    t0 = time.perf_counter()
    notes = []
    # cohomology of B Gamma_m, computed by Smith normal form against the closed form
    coh_ok = True
    for p in (2, 3):
        for m in (1, 2, 3):
            snf = [str(x) for x in equivariant_cohomology(trivial_complex(p, m), range(9))]
            formula = ["free"] + [f"Z/{p**m}" if d % 2 == 0 else "0" for d in range(1, 9)]
            coh_ok &= snf == formula == [str(x) for x in bgamma_cohomology(p, m, range(9))]
    notes.append(f"cohomology {'ok' if coh_ok else 'MISMATCH'}")
    # theta * theta
    th = {}
    for p, m in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)]:
        g = BGammaCochain.generator(p, m, 1)
        th[(p, m)] = bgamma_cup(g, g).reduced(p**m).get(2, 0)
    cup_ok = th[(2, 1)] == 1 and th[(2, 2)] == 2 and all(th[k] == 0 for k in [(3, 1), (3, 2), (5, 1)])
    notes.append(f"theta^2 mod p^m {th}")
    # restriction is the quotient map
    res_ok = all(restrict_on_cohomology(p, m, d, x) == x % p ** (m - 1)
                 for p in (2, 3) for m in (2, 3) for d in (2, 4, 6) for x in range(p**m))
    notes.append(f"restriction quotient {'ok' if res_ok else 'FAIL'}")
    # coefficient cup is a chain map
    rng = random.Random(9)
    leib_bad = 0
    for trial in range(100):
        p, m = [(2, 1), (2, 2), (3, 1)][trial % 3]
        V, W = _random_complex(rng, p, m), _random_complex(rng, p, m)
        TC = tensor_product(V, W)
        da, db = rng.randint(0, 3), rng.randint(0, 3)
        a, b = _random_cochain(rng, V, da), _random_cochain(rng, W, db)
        lhs = total_differential(TC.complex, coefficient_cup(V, W, a, b, TC))
        rhs = coefficient_cup(V, W, total_differential(V, a), b, TC) + \
            coefficient_cup(V, W, a, total_differential(W, b), TC).scaled((-1) ** da)
        leib_bad += lhs != rhs
    notes.append(f"Leibniz failures {leib_bad}/100")
    # tensor power classes depend only on the class of b
    inv_bad = 0
    for p, m in [(2, 1), (2, 2), (3, 1)]:
        for k in (1, 2, 3):
            B = BaseComplex({-1: 1, 0: 1}, {-1: [[k]]})
            TC, base = tensor_power_class(B, 0, [1], p, m)
            for _ in range(50 if k == 1 else 5):
                b = [1 + x for x in B.apply_d(-1, [rng.randint(-4, 4)])]
                inv_bad += not cohomologous(TC.complex, base, tensor_power_class(B, 0, b, p, m, TC)[1])
        B2 = BaseComplex({0: 2})
        TC, base = tensor_power_class(B2, 0, [1, 2], p, m)
        inv_bad += not cohomologous(TC.complex, base, tensor_power_class(B2, 0, [1, 2], p, m, TC)[1])
    notes.append(f"tensor-power invariance failures {inv_bad}")
    elapsed = time.perf_counter() - t0
    ok = coh_ok and cup_ok and res_ok and leib_bad == 0 and inv_bad == 0 and elapsed <= 120
    return record(9, ok, "; ".join(notes) + f"; {elapsed:.1f}s (limit 120s)")


# --- pytest entry points -------------------------------------------------------------------

UNATTAINABLE = "fails for the printed series; analysis in the decisions ledger"


def test_criterion_1_cp1_splitting():
    assert criterion_1()


def test_criterion_2_mod_p_degree():
    assert criterion_2()


@pytest.mark.xfail(strict=True, reason=UNATTAINABLE)
def test_criterion_3_cp1_radius_proxy():
    assert criterion_3()


def test_criterion_4_blowup_reproduction():
    assert criterion_4()


def test_criterion_5_blowup_valuations():
    assert criterion_5()


def test_criterion_6_divisibility_cp1():
    assert criterion_6("cp1")


@pytest.mark.xfail(strict=True, reason=UNATTAINABLE)
def test_criterion_6_divisibility_blowup():
    assert criterion_6("blowup")


def test_criterion_7_appendix_counterexamples():
    assert criterion_7()


def test_criterion_8_splitting_invariants():
    assert criterion_8()


def test_criterion_9_cyclic_suite():
    assert criterion_9()


if __name__ == "__main__":
    for n in range(1, 10):
        globals()[f"criterion_{n}"]()
    sys.exit(0 if all("PASS" in line for line in RESULTS.values()) else 1)
