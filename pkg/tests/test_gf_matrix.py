import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gdnc.errors import BadArguments, FieldMismatch, IndexOutOfRange, NotSquare
from gdnc.finite_field import FiniteField
from gdnc.gf_matrix import (
    Matrix,
    fingerprint,
    format_matrix,
    is_nonsingular,
    parse_matrix,
    rank,
    read_matrix,
    rref,
    solve,
    submatrix,
)

import oracles

FIELDS = [(2, 2), (2, 3), (3, 2), (2, 4)]


def random_matrix(F, rows, cols, rng):
    return Matrix(F, rng.integers(0, F.q, size=(rows, cols)))


@pytest.mark.parametrize("p,m", FIELDS)
def test_rank_against_cofactor_oracle(p, m):
    F = FiniteField(p, m)
    ref = oracles.PolyField(p, m, F.modulus)
    rng = np.random.default_rng(100 * p + m)
    for _ in range(40):
        r, c = rng.integers(1, 6, size=2)
        A = random_matrix(F, r, c, rng)
        if rng.random() < 0.4 and r > 1:
            # force a dependent row
            data = A.data.copy()
            data[-1] = F.add_arr(data[0], F.mul_arr(int(rng.integers(F.q)), data[-2]))
            A = Matrix(F, data)
        assert rank(A) == oracles.rank_by_minors(ref, A.tolist())
        assert rank(A) == rank(A.T)
        if r == c:
            assert is_nonsingular(A) == (oracles.det(ref, A.tolist()) != 0)


def test_rref_shape():
    F = FiniteField(2, 3)
    A = Matrix(F, [[0, 2, 4], [0, 3, 6], [1, 1, 1]])
    R, piv = rref(A)
    assert piv == [0, 1]
    assert R.data[0, 0] == 1 and R.data[1, 1] == 1
    assert np.all(R.data[2] == 0)
    assert rank(A) == 2


@pytest.mark.parametrize("p,m", FIELDS)
def test_solve_round_trip(p, m):
    F = FiniteField(p, m)
    rng = np.random.default_rng(p * m)
    for _ in range(40):
        r, c = rng.integers(1, 6, size=2)
        A = random_matrix(F, r, c, rng)
        x0 = rng.integers(0, F.q, size=c)
        b = (A @ Matrix(F, x0[:, None])).data[:, 0]
        x = solve(A, b)
        assert x is not None
        assert np.array_equal((A @ Matrix(F, x[:, None])).data[:, 0], b)


def test_solve_inconsistent():
    F = FiniteField(2, 2)
    A = Matrix(F, [[1, 1], [2, 2]])
    assert solve(A, [1, 1]) is None
    assert solve(A, [1, 2]) is not None
    with pytest.raises(BadArguments):
        solve(A, [1, 2, 3])


def test_submatrix_and_errors():
    F = FiniteField(2, 3)
    P, _ = read_matrix("tests/fixtures/m2_k1_2_k2_2_gf8.txt")
    assert submatrix(P, [0, 1], [1, 3]).tolist() == [[7, 6], [7, 4]]
    assert submatrix(P, [1, 0], [3, 1]).tolist() == [[7, 6], [7, 4]]
    with pytest.raises(IndexOutOfRange):
        submatrix(P, [0, 4], [0])
    with pytest.raises(BadArguments):
        submatrix(P, [0, 0], [0])
    with pytest.raises(NotSquare):
        is_nonsingular(Matrix(F, [[1, 2, 3]]))


def test_small_nonsingular_cases():
    F4 = FiniteField(2, 2)
    assert is_nonsingular(Matrix(F4, [[3, 2], [2, 3]]))
    assert not is_nonsingular(Matrix(F4, [[1, 2], [2, 3]]))  # 1*3 = 3 = 2*2
    assert rank(Matrix(FiniteField(2, 3), np.zeros((3, 3)))) == 0


def test_matmul_field_mismatch():
    with pytest.raises(FieldMismatch):
        Matrix(FiniteField(2, 2), [[1]]) @ Matrix(FiniteField(2, 3), [[1]])


def test_text_format_round_trip():
    F = FiniteField(3, 2)
    A = Matrix(F, [[0, 8, 4], [5, 1, 2]])
    text = format_matrix(A, M=2, k1=1, k2=2)
    assert text.splitlines()[0] == "q=3^2 modulus=101 rows=2 cols=3 M=2 k1=1 k2=2"
    B, header = parse_matrix("# comment\n" + text)
    assert B == A and header["k2"] == "2"
    assert fingerprint(A) == fingerprint(B) and len(fingerprint(A)) == 16


def test_parse_errors():
    with pytest.raises(BadArguments):
        parse_matrix("q=2^2 rows=2 cols=2\n1 2\n")
    with pytest.raises(BadArguments):
        parse_matrix("rows=1 cols=1\n1\n")
    with pytest.raises(BadArguments):
        parse_matrix("")
    with pytest.raises(FieldMismatch):
        parse_matrix("q=2^2 rows=1 cols=1\n1\n", FiniteField(2, 3))


def test_alternate_modulus_override():
    text = "q=2^3 modulus=1011 rows=1 cols=2\n3 7\n"
    alt = FiniteField(2, 3, (1, 1, 0, 1))
    A, _ = parse_matrix(text, alt)
    assert A.field == alt


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_rank_bounds_property(r, c, seed):
    F = FiniteField(2, 3)
    A = random_matrix(F, r, c, np.random.default_rng(seed))
    rk = rank(A)
    assert rk <= min(r, c)
    R, piv = rref(A)
    assert len(piv) == rk and rank(R) == rk
