"""Unit tests for matrices and their codecs."""
import json
from fractions import Fraction

import pytest

from src.matrix import (
    Matrix,
    MatrixFormatError,
    commutator,
    conjugate,
    diagonal,
    distinct_diagonal,
    dump_matrix,
    format_matrix_text,
    identity,
    inverse,
    matrix_from_json,
    matrix_to_json,
    matrix_unit,
    parse_matrix_text,
    read_matrix,
    row_reduce,
    zero,
)
from src.ring import DimensionMismatch, FieldTooSmall, NotInvertible, RingMismatch, RingSpec, UnsupportedRing


def test_matrix_units_multiply(gf5):
    E12 = matrix_unit(2, 1, 2, gf5)
    E21 = matrix_unit(2, 2, 1, gf5)
    assert E12 * E21 == matrix_unit(2, 1, 1, gf5)
    assert E21 * E21 == zero(2, gf5)
    assert commutator(E12, E21) == diagonal([1, -1], gf5)


def test_trace_and_power(gf3):
    A = Matrix.from_rows([[1, 1], [0, 1]], gf3)
    assert A.trace() == 2
    assert A.power(3) == identity(2, gf3)
    assert A.power(0) == identity(2, gf3)


def test_predicates(qq):
    assert identity(3, qq).is_scalar()
    assert diagonal([1, 2, 3], qq).is_diagonal()
    assert not diagonal([1, 2, 3], qq).is_scalar()
    assert matrix_unit(3, 1, 2, qq).has_zero_diagonal()


def test_inverse_roundtrip(gf7, rng, matrices):
    for _ in range(20):
        A = matrices.random(rng, 3, gf7)
        try:
            A_inv = inverse(A)
        except NotInvertible:
            continue
        assert A * A_inv == identity(3, gf7)
        assert conjugate(A, identity(3, gf7), A_inv) == identity(3, gf7)


def test_inverse_failures(qq):
    with pytest.raises(NotInvertible):
        inverse(Matrix.from_rows([[1, 2], [2, 4]], qq))
    with pytest.raises(UnsupportedRing):
        inverse(identity(2, RingSpec.zmod(6)))


def test_rational_inverse(qq):
    A = Matrix.from_rows([[2, 1], [1, 1]], qq)
    assert inverse(A) == Matrix.from_rows([[1, -1], [-1, 2]], qq)


def test_mismatches(gf5, gf7):
    with pytest.raises(RingMismatch):
        identity(2, gf5) + identity(2, gf7)
    with pytest.raises(DimensionMismatch):
        identity(2, gf5) * identity(3, gf5)
    with pytest.raises(DimensionMismatch):
        Matrix.from_rows([[1, 2]], gf5)


def test_distinct_diagonal_needs_room(gf2):
    assert distinct_diagonal(2, gf2).diagonal() == (0, 1)
    with pytest.raises(FieldTooSmall):
        distinct_diagonal(3, gf2)


def test_distinct_diagonal_needs_a_field():
    with pytest.raises(UnsupportedRing):
        distinct_diagonal(3, RingSpec.zmod(6))
    assert distinct_diagonal(3, RingSpec.rational()).diagonal() == (0, 1, 2)


def test_row_reduce(gf5):
    basis = row_reduce([(1, 2, 3), (2, 4, 6), (0, 1, 1)], gf5)
    assert basis == [(1, 0, 1), (0, 1, 1)]
    assert row_reduce([(0, 0, 0)], gf5) == []


def test_text_codec(qq):
    A = Matrix.from_rows([[Fraction(1, 2), -3], [0, 7]], qq)
    text = format_matrix_text(A)
    assert text == "2\n1/2 -3\n0 7\n"
    assert parse_matrix_text("# comment\n" + text, qq) == A


def test_json_codec(qq, gf7):
    A = Matrix.from_rows([[Fraction(1, 2), -3], [0, 7]], qq)
    data = matrix_to_json(A)
    assert data == {"n": 2, "ring": "q", "rows": [["1/2", -3], [0, 7]]}
    assert matrix_from_json(json.loads(json.dumps(data))) == A
    with pytest.raises(RingMismatch):
        matrix_from_json(data, gf7)


def test_read_matrix_accepts_both_forms(gf7):
    A = matrix_unit(2, 1, 2, gf7)
    assert read_matrix(json.dumps(matrix_to_json(A)), gf7) == A
    assert read_matrix("2\n0 1\n0 0\n", gf7) == A


@pytest.mark.parametrize("text", ["", "2\n1 2\n", "x\n", "2\n1 2\n3\n", "2\n1 a\n0 0\n", "{bad"])
def test_malformed_matrices(gf7, text):
    with pytest.raises(MatrixFormatError):
        read_matrix(text, gf7)


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_dump_matrix_reads_back(qq, fmt):
    A = Matrix.from_rows([[Fraction(-2, 3), 0], [5, Fraction(1, 7)]], qq)
    assert read_matrix(dump_matrix(A, fmt), qq) == A
    with pytest.raises(ValueError):
        dump_matrix(A, "csv")


def test_non_unit_denominator_is_a_format_error():
    """1/2 has no value in Z/4; both codecs report it as bad input."""
    zmod4 = RingSpec.zmod(4)
    with pytest.raises(MatrixFormatError) as info:
        read_matrix("2\n1/2 0\n0 0\n", zmod4)
    assert info.value.exit_code == 2
    with pytest.raises(MatrixFormatError):
        read_matrix(json.dumps({"n": 2, "ring": "zmod:4", "rows": [["1/2", 0], [0, 0]]}), zmod4)
