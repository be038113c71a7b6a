import random
from fractions import Fraction

import numpy as np
import pytest

from polymonodromy.core.errors import InputError
from polymonodromy.core.polycore import (
    BiPoly,
    LinearMap,
    OneForm,
    RatPoly,
    chebyshev,
    compose,
    critical_data,
    hamiltonian,
    normalize_linear,
    numeric_roots,
    poly_gcd,
    squarefree_parts,
)


class TestRatPoly:
    def test_parse_and_text_agree(self):
        p = RatPoly.parse("0,-3,0,4")
        assert p.degree == 3
        assert str(p) == "0,-3,0,4"
        assert p.pretty() == "4*x^3 - 3*x"

    def test_parse_rationals(self):
        p = RatPoly.parse("1/2, 0, -3/4")
        assert p.coeffs == (Fraction(1, 2), Fraction(0), Fraction(-3, 4))

    def test_malformed_coefficient_reports_position(self):
        with pytest.raises(InputError) as info:
            RatPoly.parse("1,a,2")
        assert "position 2" in str(info.value)

    def test_trailing_zeros_are_stripped(self):
        assert RatPoly.parse("1,2,0,0").degree == 1
        assert RatPoly.parse("0").is_zero

    def test_arithmetic(self):
        x = RatPoly.x()
        assert (x + 1) * (x - 1) == RatPoly.parse("-1,0,1")
        assert (x + 1) ** 3 == RatPoly.parse("1,3,3,1")
        q, r = divmod(RatPoly.parse("-1,0,1"), x - 1)
        assert q == x + 1 and r.is_zero

    def test_derivative_and_integral(self):
        p = RatPoly.parse("1,2,3")
        assert p.derivative() == RatPoly.parse("2,6")
        assert p.derivative().integral(1) == p

    def test_exact_and_numeric_evaluation(self):
        p = RatPoly.parse("1,0,1")
        assert p(Fraction(1, 2)) == Fraction(5, 4)
        values = p(np.array([1j, 2.0]))
        assert np.allclose(values, [0.0, 5.0])

    def test_compose(self):
        x = RatPoly.x()
        assert compose(x * x, x + 1) == RatPoly.parse("1,2,1")


def test_chebyshev_polynomials():
    assert chebyshev(3) == RatPoly.parse("0,-3,0,4")
    assert chebyshev(5) == RatPoly.parse("0,5,0,-20,0,16")
    assert compose(chebyshev(2), chebyshev(3)) == chebyshev(6)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_chebyshev_composition_multiplies_indices(m, n):
    assert compose(chebyshev(m), chebyshev(n)) == chebyshev(m * n)


def test_compose_is_associative():
    rng = random.Random(3)

    def draw():
        size = rng.randint(2, 4)
        return RatPoly.from_coeffs([Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(size)])

    for _ in range(10):
        a, b, c = draw(), draw(), draw()
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_chebyshev_rejects_zero_index():
    with pytest.raises(InputError):
        chebyshev(0)


def test_gcd_and_squarefree_parts():
    x = RatPoly.x()
    assert poly_gcd((x - 1) * (x + 2), (x - 1) * (x + 3) * 5) == x - 1
    parts = squarefree_parts((x - 1) ** 2 * (x + 1))
    assert parts == {1: x + 1, 2: x - 1}


def test_normalize_linear_round_trip():
    f = RatPoly.parse("3,1,2,2")
    canonical, pre, post = normalize_linear(f)
    assert canonical.leading == 1
    assert canonical.coeff(canonical.degree - 1) == 0
    assert canonical.coeff(0) == 0
    assert post.as_poly().compose(canonical.compose(pre.as_poly())) == f


def test_normalize_linear_of_a_shifted_square():
    canonical, pre, post = normalize_linear(RatPoly.parse("3,2,1"))
    assert canonical == RatPoly.parse("0,0,1")
    assert pre == LinearMap(Fraction(1), Fraction(1))
    assert post == LinearMap(Fraction(1), Fraction(2))


def test_normalize_linear_is_idempotent():
    canonical, _, _ = normalize_linear(RatPoly.parse("3,1,2,2"))
    again, pre, post = normalize_linear(canonical)
    assert again == canonical
    assert pre.is_identity and post.is_identity


def test_numeric_roots(t3):
    roots = numeric_roots(t3.to_cpoly())
    assert sorted(np.round(roots.real, 9)) == pytest.approx(
        [-np.sqrt(3) / 2, 0.0, np.sqrt(3) / 2], abs=1e-9
    )


class TestCriticalData:
    def test_chebyshev_has_two_values(self, t3):
        crit = critical_data(t3)
        assert crit.r == 2
        assert crit.values[0] == pytest.approx(-1)
        assert crit.values[1] == pytest.approx(1)
        assert crit.points_over(0)[0].location == pytest.approx(0.5)
        assert crit.turning_counts == (1, 1)

    def test_multiplicity_is_exact(self):
        crit = critical_data(RatPoly.parse("0,0,0,0,1"))
        assert crit.r == 1
        assert crit.points[0].multiplicity == 3
        assert crit.total_multiplicity == 3

    def test_quartic_is_morse(self, quartic):
        crit = critical_data(quartic)
        assert crit.r == 3
        assert all(p.multiplicity == 1 for p in crit.points)

    def test_degree_one_rejected(self):
        with pytest.raises(InputError):
            critical_data(RatPoly.parse("1,1"))


class TestBiPoly:
    def test_parse_rows(self):
        p = BiPoly.parse("0,1|2")
        assert p.as_dict() == {(1, 0): Fraction(1), (0, 1): Fraction(2)}
        assert str(p) == "0,1|2"

    def test_derivatives(self):
        p = BiPoly.parse("0,1|0,0,3")
        assert p.dx() == BiPoly.parse("1|0,6")
        assert p.dy() == BiPoly.parse("0,0,3")

    def test_hamiltonian(self, square):
        assert str(hamiltonian(square)) == "0,0,1|0|1"

    def test_evaluate(self):
        p = BiPoly.parse("1|0,1")
        assert p.evaluate(2.0, 3.0) == pytest.approx(7.0)


class TestOneForm:
    def test_exact_form_of_xy(self):
        form = OneForm.exact(BiPoly.parse("0|0,1"))
        assert form.P == BiPoly.y_power(1)
        assert form.Q == BiPoly.in_x(RatPoly.x())

    def test_relative_form(self, square):
        form = OneForm.relative(BiPoly.constant(1), square)
        assert form.P == BiPoly.in_x(RatPoly.parse("0,2"))
        assert form.Q == BiPoly.y_power(1, 2)

    def test_difference_is_zero(self):
        form = OneForm.y_times(RatPoly.x())
        assert (form - form).is_zero
