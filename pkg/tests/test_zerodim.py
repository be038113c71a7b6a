import dataclasses
import itertools
import random
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from polymonodromy.core.decompose import Decomposition
from polymonodromy.core.errors import InputError, NumericInconsistencyError
from polymonodromy.core.permlab import PermAction
from polymonodromy.core.polycore import RatPoly, chebyshev, compose
from polymonodromy.core.tracker import choose_basepoint, compute_monodromy, solve_fiber
from polymonodromy.core.zerodim import (
    SimpleCycle,
    ZeroCycle,
    center_test,
    detoured_path,
    eval_zero_integral,
    orbit_graph,
    span_test,
    verify_center_certificate,
    verify_span_result,
)


@pytest.fixture
def x4():
    return RatPoly.parse("0,0,0,0,1")


def _opposite_pair(mono):
    """Indices (0, j) with x_j = -x_0 in the basepoint fiber."""
    fiber = np.asarray(mono.fiber)
    j = int(np.argmin(np.abs(fiber + fiber[0])))
    return 0, j


def _cofiber_pair(f, h):
    """Basepoint of f and two roots of its fiber sharing a value of h."""
    base = choose_basepoint(f)
    fiber = solve_fiber(f.to_cpoly(), base)
    values = h(fiber)
    j = min(range(1, len(fiber)), key=lambda k: abs(values[k] - values[0]))
    return base, SimpleCycle(0, j)


def _random_poly(rng, degree):
    coeffs = [rng.randint(-3, 3) for _ in range(degree)] + [rng.choice([-2, -1, 1, 2])]
    return RatPoly.from_coeffs(coeffs)


class TestCycles:
    def test_weights_must_sum_to_zero(self):
        with pytest.raises(InputError):
            ZeroCycle({0: Fraction(1), 1: Fraction(1)})

    def test_zero_cycle_rejected(self):
        with pytest.raises(InputError):
            ZeroCycle({0: Fraction(0)})

    def test_simple_cycle(self):
        delta = SimpleCycle(0, 2)
        assert delta.cycle().vector(3) == [1, 0, -1]
        assert delta.to_json() == [1, 3]
        with pytest.raises(InputError):
            SimpleCycle(1, 1)
        with pytest.raises(InputError):
            delta.check(2)


def test_detoured_path_avoids_critical_values():
    path = detoured_path(-2.0 + 0j, 2.0 + 0j, [0j], 0.5)
    assert path[0] == -2 and path[-1] == 2
    assert len(path) == 3
    assert abs(path[1]) == pytest.approx(1.0)


def test_integral_of_f_is_constant_on_fibers(quartic):
    values = eval_zero_integral(quartic, quartic, SimpleCycle(0, 1).cycle(), [3.0 + 1j, -2j])
    assert np.allclose(values, 0.0, atol=1e-8)


class TestCenterTest:
    def test_omega_equal_to_f_vanishes(self, quartic):
        cert = center_test(quartic, quartic, SimpleCycle(0, 1))
        assert cert.verdict == "Vanishes"
        assert cert.eta == RatPoly.x()
        assert verify_center_certificate(quartic, quartic, cert)

    def test_generic_omega_has_witness(self, quartic):
        omega = RatPoly.x()
        cert = center_test(quartic, omega, SimpleCycle(0, 1))
        assert cert.verdict == "DoesNotVanish"
        assert abs(cert.witness_value) > 1e-6
        assert verify_center_certificate(quartic, omega, cert)

    def test_even_omega_vanishes_on_opposite_roots(self, x4):
        mono = compute_monodromy(x4)
        i, j = _opposite_pair(mono)
        omega = RatPoly.parse("1,0,3")
        cert = center_test(x4, omega, SimpleCycle(i, j), basepoint=mono.basepoint)
        assert cert.verdict == "Vanishes"
        assert cert.h == RatPoly.parse("0,0,1")
        assert cert.to_json()["eta"] == "1,3"

    def test_out_of_range_cycle(self, quartic):
        with pytest.raises(InputError):
            center_test(quartic, quartic, SimpleCycle(0, 4))

    @pytest.mark.parametrize("seed", range(20))
    def test_constructed_centers(self, seed):
        rng = random.Random(seed)
        h = RatPoly.from_coeffs([0, rng.randint(-2, 2), 1])
        f = compose(_random_poly(rng, rng.choice([2, 3])), h)
        omega = compose(_random_poly(rng, rng.choice([1, 2])), h)
        base, delta = _cofiber_pair(f, h)

        cert = center_test(f, omega, delta, basepoint=base)
        assert cert.verdict == "Vanishes"
        assert verify_center_certificate(f, omega, cert)

        perturbed = omega + RatPoly.x()
        cert = center_test(f, perturbed, delta, basepoint=base)
        assert cert.verdict == "DoesNotVanish"
        assert abs(cert.witness_value) > 1e-6
        assert verify_center_certificate(f, perturbed, cert)

    def test_chebyshev_nine_through_its_cubic_factor(self):
        f, omega = chebyshev(9), chebyshev(3)
        base, delta = _cofiber_pair(f, omega)
        cert = center_test(f, omega, delta, basepoint=base)
        assert cert.verdict == "Vanishes"
        assert compose(cert.eta, cert.h) == omega
        assert verify_center_certificate(f, omega, cert)


class TestSpanTest:
    def test_generic_quartic_spans(self, quartic):
        mono = compute_monodromy(quartic)
        result = span_test(quartic, SimpleCycle(0, 1), mono)
        assert result.verdict == "FullSpan"
        assert result.rank == 3
        assert len(result.edges) == 3
        assert verify_span_result(quartic, result, mono)

    def test_opposite_roots_of_x4_decompose(self, x4):
        mono = compute_monodromy(x4)
        i, j = _opposite_pair(mono)
        result = span_test(x4, SimpleCycle(i, j), mono)
        assert result.verdict == "Decomposes"
        assert result.decomposition.h == RatPoly.parse("0,0,1")
        assert all(len(c) == 2 for c in result.components)
        assert verify_span_result(x4, result, mono)
        assert result.to_json()["decomposition"]["h"] == "0,0,1"

    def test_every_simple_cycle_of_t5_spans(self):
        f = chebyshev(5)
        mono = compute_monodromy(f)
        for i, j in itertools.combinations(range(5), 2):
            result = span_test(f, SimpleCycle(i, j), mono)
            assert result.verdict == "FullSpan"
            assert result.rank == 4
            assert verify_span_result(f, result, mono)

    def test_right_component_with_other_level_sets_is_inconsistent(self, x4, mocker):
        mono = compute_monodromy(x4)
        i, j = _opposite_pair(mono)
        wrong = Decomposition(RatPoly.parse("0,0,1"), RatPoly.parse("0,1,1"))
        patched = mocker.patch(
            "polymonodromy.core.zerodim.right_components", return_value=[wrong]
        )
        with pytest.raises(NumericInconsistencyError):
            span_test(x4, SimpleCycle(i, j), mono)
        patched.assert_called_once_with(x4)

    def test_certificate_with_wrong_components_fails(self, x4):
        mono = compute_monodromy(x4)
        i, j = _opposite_pair(mono)
        result = span_test(x4, SimpleCycle(i, j), mono)
        merged = dataclasses.replace(result, components=(tuple(range(4)),))
        assert not verify_span_result(x4, merged, mono)


def test_orbit_graph_connectivity(quartic, x4):
    mono = compute_monodromy(quartic)
    graph = orbit_graph(PermAction(4, mono.generators), SimpleCycle(0, 1))
    assert nx.is_connected(graph)

    mono = compute_monodromy(x4)
    i, j = _opposite_pair(mono)
    graph = orbit_graph(PermAction(4, mono.generators), SimpleCycle(i, j))
    assert nx.number_connected_components(graph) == 2
