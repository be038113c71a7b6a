import cmath
import math

import pytest

from polymonodromy.core.chebwitness import (
    CycloElement,
    build_invariant_cycles,
    c_pairs,
    cheb_report,
    cyclo_is_zero,
    delta_w_cycle,
    delta_w_integral,
    is_prime,
    period_integral,
    s_period_table,
    variation,
    variation_identities,
    witness_verified,
    y_dx,
)
from polymonodromy.core.errors import InputError
from polymonodromy.core.polycore import RatPoly


def test_is_prime():
    assert [n for n in range(12) if is_prime(n)] == [2, 3, 5, 7, 11]


class TestCycloElement:
    def test_sum_of_all_roots_is_zero(self):
        assert CycloElement(5, (1,) * 5).is_zero()
        assert CycloElement(5, (3, 3, 3, 3, 3)) == 0

    def test_products_and_conjugates(self):
        assert CycloElement.xi(5, 2) * CycloElement.xi(5, 3) == 1
        assert CycloElement.xi(5, 1).conjugate() == CycloElement.xi(5, 4)
        assert CycloElement.xi(5, 1).to_complex() == pytest.approx(cmath.exp(2j * math.pi / 5))

    def test_zero_test_needs_prime_modulus(self):
        with pytest.raises(InputError):
            CycloElement.zero(4).is_zero()

    def test_mixed_moduli_rejected(self):
        with pytest.raises(InputError):
            CycloElement.xi(5) + CycloElement.xi(7)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_derived_variation_rules_hold(p):
    for k in range(1, (p - 1) // 2 + 1):
        assert all(variation_identities(p, k).values())


def test_printed_rules_fail_both_mixed_variations():
    printed = variation_identities(5, 1, rules="printed")
    assert not printed["var1_C"]
    assert not printed["varm1_S"]


def test_center_fold_is_null():
    pairs = c_pairs(5, 0.3)
    assert len(pairs) == 5
    assert pairs[2] is None
    assert all(pair is not None for k, pair in enumerate(pairs) if k != 2)


class TestDeltaW:
    def test_exact_zero_for_x(self):
        result = delta_w_integral(5, 2, RatPoly.x())
        assert result.exact_zero is True
        assert all(abs(v) < 1e-7 for v in result.values)

    def test_composite_modulus_rejected(self):
        with pytest.raises(InputError):
            delta_w_integral(9, 1, RatPoly.x())

    def test_k_out_of_range_rejected(self):
        with pytest.raises(InputError):
            delta_w_integral(5, 3, RatPoly.x())


def test_period_of_unit_circle_is_its_area():
    value = period_integral(RatPoly.parse("0,0,1"), 1.0, (-1.0, 1.0), y_dx())
    assert abs(value) == pytest.approx(math.pi, rel=1e-8)
    assert value.imag == pytest.approx(0.0, abs=1e-8)


def test_saddle_table_layout():
    table = s_period_table(3, [0.3])
    assert list(table.columns) == ["t", "S0", "S2", "S4"]
    assert table.loc[0, "S0"] == 0


def test_report_for_p5_k2():
    report = cheb_report(5, 2)
    assert report["periods_vanish"]
    assert report["delta_w"]["exact_zero"] is True
    assert all(report["variation"].values())
    assert report["expected_rank"] == 4
    assert report["c1_nonzero"] is True
    assert all(abs(complex(*row["C_1"])) > 0.2 for row in report["periods"])
    assert witness_verified(report)


def test_witness_needs_a_nonzero_center_period():
    report = cheb_report(5, 2)
    assert not witness_verified({**report, "c1_nonzero": False})
    assert not witness_verified({**report, "periods_vanish": False})
    assert not witness_verified({**report, "c_proportionality_residual": 1e-3})


class TestInvariantCycles:
    def test_saddle_and_center_parts(self):
        S_w, C_w = build_invariant_cycles(5, 1)
        assert cyclo_is_zero(S_w.s[0])
        assert all(cyclo_is_zero(a) for a in S_w.c + C_w.s)
        assert not C_w.is_zero()

    def test_each_critical_value_fixes_one_family(self):
        S_w, C_w = build_invariant_cycles(7, 2)
        assert variation(7, 2, 1, S_w).is_zero()
        assert variation(7, 2, -1, C_w).is_zero()

    def test_variation_arguments_checked(self):
        S_w, _ = build_invariant_cycles(5, 1)
        with pytest.raises(InputError):
            variation(5, 1, 2, S_w)
        with pytest.raises(InputError):
            variation(7, 1, 1, S_w)


def test_delta_w_as_zero_cycle():
    cycle = delta_w_cycle(5, 2, 0.3 + 0.2j)
    assert abs(sum(complex(w) for w in cycle.weights.values())) < 1e-12
    assert set(cycle.weights) <= set(range(5))
