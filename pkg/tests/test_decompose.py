from fractions import Fraction

import numpy as np
import pytest

from polymonodromy.core.decompose import (
    Decomposition,
    divided_difference,
    fiber_partition,
    h_adic_expansion,
    is_decomposable,
    recognize_exceptional,
    right_components,
)
from polymonodromy.core.errors import InputError
from polymonodromy.core.polycore import RatPoly, chebyshev, compose


def test_h_adic_expansion():
    h = RatPoly.parse("0,0,1")
    assert h_adic_expansion(RatPoly.parse("1,0,2,0,3"), h) == RatPoly.parse("1,2,3")
    assert h_adic_expansion(RatPoly.parse("0,1,0,0,1"), h) is None


def test_h_adic_expansion_needs_nonconstant_h():
    with pytest.raises(InputError):
        h_adic_expansion(RatPoly.parse("1,1"), RatPoly.parse("3"))


class TestRightComponents:
    def test_x4(self):
        found = right_components(RatPoly.parse("0,0,0,0,1"))
        assert found == [Decomposition(RatPoly.parse("0,0,1"), RatPoly.parse("0,0,1"))]

    def test_prime_degree_is_indecomposable(self):
        assert right_components(RatPoly.parse("0,1,0,0,0,1")) == []
        assert not is_decomposable(chebyshev(5))

    def test_chebyshev_six_has_two_components(self):
        found = right_components(chebyshev(6))
        assert [d.h.degree for d in found] == [2, 3]
        assert all(d.verify(chebyshev(6)) for d in found)

    @pytest.mark.parametrize(
        "g, h",
        [
            ("1,1,1", "0,1,1"),
            ("0,-2,1", "0,0,1"),
            ("2,0,1/2", "0,1,0,1"),
            ("0,1,0,1", "-1,1,3"),
        ],
    )
    def test_recovers_constructed_compositions(self, g, h):
        f = compose(RatPoly.parse(g), RatPoly.parse(h))
        found = right_components(f)
        degrees = [d.h.degree for d in found]
        assert RatPoly.parse(h).degree in degrees
        for d in found:
            assert d.h.coeff(0) == 0
            assert d.h.leading == 1
            assert d.verify(f)

    def test_components_are_normalized(self):
        f = compose(RatPoly.parse("0,1,1"), RatPoly.parse("5,2,3"))
        (found,) = right_components(f)
        assert found.h == RatPoly.parse("0,2/3,1")


def test_fiber_partition_groups_equal_values():
    roots = np.array([1.0, -1.0, 2.0, -2.0])
    parts = fiber_partition(RatPoly.parse("0,0,1"), roots)
    assert parts == ((0, 1), (2, 3))


class TestDividedDifference:
    def test_identity_and_symmetry(self, t3):
        dd = divided_difference(t3)
        assert dd.verify(t3)
        assert dd.is_symmetric()

    def test_grid_of_square(self):
        dd = divided_difference(RatPoly.parse("0,0,1"))
        assert dd.grid() == [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]


class TestRecognizeExceptional:
    def test_power(self):
        f = compose(RatPoly.parse("1,0,0,0,0,3"), RatPoly.parse("2,1"))
        tag = recognize_exceptional(f)
        assert tag.kind == "PowerEquiv"

    def test_chebyshev(self):
        f = compose(chebyshev(5), RatPoly.parse("1,2")) * 3
        tag = recognize_exceptional(f)
        assert tag.kind == "ChebyshevEquiv"
        assert tag.pre is not None and tag.post is not None

    def test_generic(self, quartic):
        assert recognize_exceptional(quartic).kind == "Neither"

    @pytest.mark.parametrize("p", [3, 5, 7, 11])
    def test_prime_power_forms(self, p):
        f = compose(RatPoly.parse("-1,2"), compose(RatPoly.monomial(p), RatPoly.parse("3,1")))
        assert recognize_exceptional(f).kind == "PowerEquiv"

    @pytest.mark.parametrize("p", [3, 5, 7, 11])
    def test_prime_chebyshev_forms(self, p):
        f = compose(RatPoly.parse("1,-3"), compose(chebyshev(p), RatPoly.parse("1,1")))
        tag = recognize_exceptional(f)
        assert tag.kind == "ChebyshevEquiv"
        assert tag.pre is not None and tag.post is not None
