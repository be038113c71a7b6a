from fractions import Fraction

import pytest

from polymonodromy.core.linalg import (
    ExactSpan,
    Gf2Span,
    determinant,
    identity,
    matmul,
    matvec,
    mod2,
    rank,
    row_echelon,
)


def test_row_echelon_and_rank():
    rows, pivots = row_echelon([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert pivots == [0, 1]
    assert rows == [[1, 0, 1], [0, 1, 1]]
    assert rank([[1, -1, 0], [0, 1, -1], [1, 0, -1]]) == 2


def test_determinant_is_exact():
    assert determinant([[2, 1], [-1, 0]]) == 1
    assert determinant([[Fraction(1, 2), 1], [1, 4]]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0


def test_determinant_needs_square_matrix():
    with pytest.raises(ValueError):
        determinant([[1, 2, 3], [4, 5, 6]])


def test_products():
    a = [[2, 1], [-1, 0]]
    b = [[0, -1], [1, 2]]
    assert matmul(a, b) == identity(2)
    assert matvec(a, [1, 0]) == [2, -1]
    assert mod2(a) == [[0, 1], [1, 0]]


class TestExactSpan:
    def test_grows_only_on_new_directions(self):
        span = ExactSpan(3)
        assert span.add([1, -1, 0])
        assert span.add([0, 1, -1])
        assert not span.add([1, 0, -1])
        assert span.dimension == 2
        assert span.contains([2, -1, -1])
        assert not span.contains([1, 0, 0])

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            ExactSpan(2).add([1, 2, 3])


def test_gf2_span_reduces_mod_two():
    span = Gf2Span(3)
    assert span.add([1, 1, 0])
    assert not span.add([3, -1, 0])
    assert span.add([0, 1, 1])
    assert not span.add([1, 0, 1])
    assert span.dimension == 2
