import numpy as np
import pytest

from polymonodromy.core.errors import InputError, MonodromyError
from polymonodromy.core.polycore import RatPoly, critical_data
from polymonodromy.core.tracker import (
    TrackOptions,
    _crossing_letters,
    approach,
    compute_monodromy,
    loop_basis,
    rank_order,
    segment_distance,
    solve_fiber,
    track_loop,
    track_path,
)


def test_rank_order_by_decreasing_imaginary_part():
    assert rank_order([1j, 0, 2j]) == [2, 0, 1]
    assert rank_order([1.0, -1.0]) == [1, 0]


def test_segment_distance():
    assert segment_distance(1j, -1, 1) == pytest.approx(1.0)
    assert segment_distance(3, -1, 1) == pytest.approx(2.0)


def test_solve_fiber_is_ranked(square):
    fiber = solve_fiber(square.to_cpoly(), 1.0)
    assert np.allclose(fiber, [-1.0, 1.0])


def test_solve_fiber_near_critical_value_rejected(t3):
    with pytest.raises(MonodromyError):
        solve_fiber(t3.to_cpoly(), 1 - 1e-14)


def test_approach_point_sits_on_the_ray_to_the_basepoint():
    point, rho = approach([0j, 4 + 0j], 0, 2j)
    assert rho == pytest.approx(1.0)
    assert point == pytest.approx(1j)


class TestCrossings:
    # root 0 falls straight down at Re 0.01; root 1 rises, nearly level with it
    x0 = np.array([0.01 + 1j, -0.01 - 1j])
    x1 = np.array([0.01 - 1j, 0.04 + 1j])

    def bent(self, u):
        straight = self.x0 + u * (self.x1 - self.x0)
        return straight - np.array([0.0, 0.05 * np.sin(np.pi * u)])

    def test_straight_step_passes_on_the_right(self):
        assert _crossing_letters(self.x0, self.x1, [0, 1]) == ([1], [1, 0])

    def test_sign_comes_from_the_fiber_at_the_crossing(self):
        visited = []

        def at(u):
            visited.append(u)
            return self.bent(u)

        assert _crossing_letters(self.x0, self.x1, [0, 1], at) == ([-1], [1, 0])
        assert visited[-1] == pytest.approx(0.5, abs=1e-3)

    def test_failed_correction_asks_for_a_smaller_step(self):
        assert _crossing_letters(self.x0, self.x1, [0, 1], lambda u: None) is None

    def test_unchanged_ranking_has_no_letters(self):
        assert _crossing_letters(self.x0, self.x0 + 0.1, [0, 1]) == ([], [0, 1])


def test_options_validation():
    with pytest.raises(InputError):
        TrackOptions(initial_step=0.5, max_step=0.25).validate()
    halved = TrackOptions().halved()
    assert halved.initial_step == pytest.approx(0.025)


def test_track_path_without_motion(square):
    fiber = solve_fiber(square.to_cpoly(), 1.0)
    result = track_path(square.to_cpoly(), fiber, [1.0, 1.0], TrackOptions())
    assert result.swap_word == ()
    assert np.allclose(result.roots, fiber)


class TestLoops:
    def test_loop_basis_shape(self, t3):
        loops = loop_basis(t3, 0.3 + 0.7j)
        assert len(loops) == 3
        assert loops[-1].is_big_loop
        assert sorted(loop.critical_value_index for loop in loops[:-1]) == [0, 1]
        for loop in loops:
            assert loop.vertices[0] == loop.vertices[-1] == 0.3 + 0.7j

    def test_basepoint_on_critical_value_rejected(self, t3):
        with pytest.raises(InputError):
            loop_basis(t3, 1.0 + 0j)

    def test_square_loop_is_one_counterclockwise_swap(self, square):
        loop = loop_basis(square, 1.0 + 1.0j)[0]
        result = track_loop(square.to_cpoly(), loop, TrackOptions())
        assert result.permutation.cycle_type() == (2,)
        assert result.swap_word == (1,)

    def test_reversed_loop_inverts(self, t3):
        loop = loop_basis(t3, 0.3 + 0.7j)[0]
        forward = track_loop(t3.to_cpoly(), loop, TrackOptions())
        backward = track_loop(t3.to_cpoly(), loop.reversed(), TrackOptions())
        assert backward.permutation == forward.permutation.inverse()


class TestComputeMonodromy:
    def test_chebyshev_three(self, t3):
        mono = compute_monodromy(t3)
        assert mono.n == 3
        assert mono.big_result.permutation.cycle_type() == (3,)
        assert all(g.cycle_type() == (2, 1) for g in mono.generators)
        assert mono.ramification_total == 2

    @pytest.mark.parametrize(
        "text", ["0,0,0,1", "0,1,0,0,1", "0,0,0,0,1", "0,0,1", "0,5,0,-20,0,16", "0,0,0,0,0,1", "1,0,-2,0,1"]
    )
    def test_ramification_total(self, text):
        f = RatPoly.parse(text)
        mono = compute_monodromy(f)
        assert mono.ramification_total == f.degree - 1
        assert mono.big_result.permutation.cycle_type() == (f.degree,)

    def test_loop_for_value(self, quartic):
        mono = compute_monodromy(quartic)
        for vi in range(critical_data(quartic).r):
            pos = mono.loop_for_value(vi)
            assert mono.loops[pos].critical_value_index == vi

    def test_report(self, t3):
        report = compute_monodromy(t3).to_json()
        assert report["degree"] == 3
        assert len(report["loops"]) == 2
        assert "path" not in report["loops"][0]
        assert report["big_loop"]["permutation"] in ([2, 3, 1], [3, 1, 2])

    def test_degree_one_rejected(self):
        with pytest.raises(InputError):
            compute_monodromy(RatPoly.parse("1,2"))
