from fractions import Fraction
import math
import random

import pytest

from qsplit import linalg as la
from qsplit.connection import ConnectionGerm, SeriesMatrix, covariant_derivative
from qsplit.errors import NonIntegral, NonSplitSpectrum, PreconditionViolated
from qsplit.quantum_ring import cp1_reference_matrix, reference_series
from qsplit.series import TruncatedSeries
from qsplit.splitting import (block_split, check_eigendata, extend_endomorphism,
                              generalized_eigenprojectors, mod_p_reduction_degree, p_integral,
                              resonance_operator, verify_divisibility)
from randconn import random_split_connection

half = Fraction(1, 2)


def test_eigenprojectors_cp1():
    A0 = la.mat([[0, 2], [2, 0]])
    ed = generalized_eigenprojectors(A0, 3)
    assert ed.eigenvalues == [-2, 2]
    for lam in (2, -2):
        want = la.scale(half, la.add(la.identity(2), la.scale(Fraction(lam, 4), A0)))
        assert ed.projector(lam) == want
    assert check_eigendata(ed, A0) == []
    assert ed.all_differences_units
    assert not generalized_eigenprojectors(A0, 2).all_differences_units

def test_eigenprojectors_nilpotent():
    ed = generalized_eigenprojectors(la.mat([[0, 1, 0], [0, 0, 1], [0, 0, 0]]))
    assert ed.eigenvalues == [0]
    assert ed.projector(0) == la.identity(3)


def test_eigenprojectors_blowup(load_conn):
    A0 = load_conn("blowup.conn").display_coeff(0)
    ed = generalized_eigenprojectors(A0, 5)
    assert dict(zip(ed.eigenvalues, ed.multiplicities)) == {0: 2, -1: 1}
    assert check_eigendata(ed, A0) == []


def test_eigenprojectors_nonsplit():
    with pytest.raises(NonSplitSpectrum):
        generalized_eigenprojectors(la.mat([[0, 1], [2, 0]]))


def test_eigenprojectors_random_jordan():
    from randconn import unimodular
    rng = random.Random(11)
    for _ in range(15):
        lam, mu = rng.sample(range(-4, 5), 2)
        J = la.mat([[lam, 1, 0, 0], [0, lam, 1, 0], [0, 0, lam, 0], [0, 0, 0, mu]])
        P = unimodular(rng, 4)
        A0 = la.matmul(P, la.matmul(J, la.inverse(P)))
        ed = generalized_eigenprojectors(A0)
        assert check_eigendata(ed, A0) == []
        assert dict(zip(ed.eigenvalues, ed.multiplicities)) == {lam: 3, mu: 1}


def test_constant_connection_needs_no_gauge():
    A0 = la.mat([[1, 0, 0], [0, 2, 0], [0, 0, 3]])
    res = block_split(ConnectionGerm([A0]), order=6)
    assert res.gauge == SeriesMatrix.identity(3, 6)
    for E, e in zip(res.projector_series, res.eigen.projectors):
        assert E == SeriesMatrix.constant(e, 6)


def test_cp1_first_coefficients(load_conn):
    res = block_split(load_conn("cp1.conn"), 3, order=8)
    H = res.projector(2) - res.projector(-2)
    assert H.entry(1, 0)[:3] == (1, 0, Fraction(1, 32))
    assert H == cp1_reference_matrix(8)
    assert res.failures == []


def test_blowup_projector_matches_closed_forms(load_conn):
    res = block_split(load_conn("blowup.conn"), 3, order=20)
    E = res.projector(-1).transpose()
    assert E.entry(0, 1) == reference_series("blowup_E12", 20)
    assert E.entry(1, 2) == reference_series("blowup_E23", 20)
    assert E.entry(0, 2) == reference_series("blowup_E13", 20)


@pytest.mark.parametrize("seed", range(6))
def test_random_split_invariants(seed):
    rng = random.Random(seed)
    conn = random_split_connection(rng, rng.randint(2, 4), degree=2)
    res = block_split(conn, order=12)
    assert res.failures == []
    alt = block_split(conn, order=12, normalization="alternative")
    assert alt.projector_series == res.projector_series
    assert alt.gauge != res.gauge


def test_unknown_normalization(load_conn):
    with pytest.raises(ValueError):
        block_split(load_conn("cp1.conn"), order=2, normalization="fancy")


def test_unit_differences_imply_integrality(load_conn):
    conn = load_conn("blowup.conn")
    for p in (2, 3, 5, 7):
        res = block_split(conn, p, order=30)
        assert res.eigen.all_differences_units
        assert all(p_integral(E, p) for E in res.projector_series)


def test_resonance_operator_hand():
    L = resonance_operator(la.mat([[1, 0], [0, 0]]), 2)
    # on e12: 2 e12 + A e12 - e12 A = 3 e12; on e21: 2 e21 - e21 = e21
    assert L[1][1] == 3 and L[2][2] == 1 and L[0][0] == 2 and L[3][3] == 2


def test_extend_trivial_connection():
    conn = ConnectionGerm([la.zeros(3)])
    E0 = la.mat([[1, 2, 0], [0, 3, 0], [4, 0, 5]])
    E, rep = extend_endomorphism(conn, E0, 10)
    assert rep.status == "unique"
    assert E == SeriesMatrix.constant(E0, 10)


def test_extend_precondition():
    conn = ConnectionGerm([la.zeros(2), la.mat([[1, 0], [0, 0]])])
    with pytest.raises(PreconditionViolated):
        extend_endomorphism(conn, la.mat([[0, 1], [0, 0]]), 3)
    with pytest.raises(PreconditionViolated):
        extend_endomorphism(ConnectionGerm([la.identity(2)]), la.identity(2), 3)


def test_non_existence(load_conn, load_mat):
    E, rep = extend_endomorphism(load_conn("non_existence.conn"), load_mat("diag10.mat"))
    assert rep.status == "obstructed" and rep.order == 1
    assert rep.summary() == "obstructed at order 1"
    assert rep.obstruction == la.mat([[0, 1], [0, 0]])
    assert E.order == 0


def test_non_uniqueness(load_conn, load_mat):
    conn = load_conn("non_uniqueness.conn")
    E, rep = extend_endomorphism(conn, load_mat("diag1100.mat"), 16)
    assert rep.status == "non_unique" and rep.order == 1 and rep.kernel_dim == 3
    assert covariant_derivative(conn, E).is_zero()
    other = load_mat("non_uniqueness_second.mat")
    assert covariant_derivative(conn, other).is_zero()
    assert other.coeff(0) == E.coeff(0) and other != E
    # the difference lies in the recorded kernel at order 1
    diff = la.sub(other.coeff(1), E.coeff(1))
    basis = rep.events[0].kernel_basis
    flat = [[b[i][j] for b in basis] for i in range(4) for j in range(4)]
    x, bad = la.solve(flat, [diff[i][j] for i in range(4) for j in range(4)])
    assert bad is None


def test_extend_non_resonant_is_basis_independent():
    # residue with eigenvalues 0, 1/2, 1/3: no integer differences
    A1 = la.mat([[0, 0, 0], [0, half, 0], [0, 0, Fraction(1, 3)]])
    rng = random.Random(5)
    A2, A3 = (la.mat([[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]) for _ in range(2))
    conn = ConnectionGerm([la.zeros(3), A1, A2, A3])
    E0 = la.mat([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    E, rep = extend_endomorphism(conn, E0, 10)
    assert rep.status == "unique"
    assert covariant_derivative(conn, E).is_zero()
    perm = la.mat([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    pinv = la.transpose(perm)
    conj = ConnectionGerm([la.matmul(pinv, la.matmul(A, perm)) for A in conn.A])
    F, rep2 = extend_endomorphism(conj, la.matmul(pinv, la.matmul(E0, perm)), 10)
    P = SeriesMatrix.constant(perm, 10)
    assert P * F * SeriesMatrix.constant(pinv, 10) == E


def test_verify_divisibility_constant():
    e = SeriesMatrix.constant(la.mat([[1, 0], [0, 0]]), 40)
    for ab in [(0, 0), (1, 1), (3, 0)]:
        assert verify_divisibility(e, 3, *ab).passed


def test_verify_divisibility_reports_entry():
    s = [[TruncatedSeries([1], 20), TruncatedSeries([1] * 21)], [TruncatedSeries([0], 20)] * 2]
    cert = verify_divisibility(SeriesMatrix.from_entries(s), 3, 1, 1)
    assert cert.failure == (5, 1) and cert.location == (0, 1)


def test_mod_p_degree():
    assert mod_p_reduction_degree(reference_series("cp1_H21", 100), 3) <= 2
    assert mod_p_reduction_degree(TruncatedSeries([1], 10), 3) == 0
    assert mod_p_reduction_degree(TruncatedSeries([1] + [5] * 10), 5) == 0
    assert mod_p_reduction_degree(TruncatedSeries([3, 6]), 3) == -1
    assert mod_p_reduction_degree(TruncatedSeries([1] * 10), 3) is None
    with pytest.raises(NonIntegral):
        mod_p_reduction_degree(TruncatedSeries([Fraction(1, 3)]), 3)


def test_factorial_entries_for_blowup_valuations(load_conn):
    E = block_split(load_conn("blowup.conn"), 2, order=30).projector(-1)
    assert [abs(c) for c in E.entry(1, 0)] == [math.factorial(j) for j in range(31)]
