"""Level sequences, probe policies, and track classification."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phantomdf.distributions import exponential, uniform
from phantomdf.errors import InvalidArgumentError
from phantomdf.grids import (
    HUGE_INDEX,
    LevelGrid,
    LevelSequence,
    ProbePolicy,
    classify_limit,
    classify_ratio_track,
    converges_to,
    last_quarter,
)


class TestLevelSequence:
    def test_prefix_values(self):
        s = LevelSequence(prefix=[1.0, 1.0, 2.0, 5.0])
        assert s.value(1) == 1.0
        assert s.value(3) == 2.0
        assert len(s) == 4
        assert s.sup == 5.0

    def test_beyond_prefix_fails_without_rule(self):
        s = LevelSequence(prefix=[1.0, 2.0])
        with pytest.raises(InvalidArgumentError):
            s.value(3)

    def test_rule_extends_prefix(self):
        s = LevelSequence(prefix=[0.5, 2.0], rule=float)
        assert s.value(2) == 2.0
        assert s.value(7) == 7.0
        assert math.isinf(s.sup)
        with pytest.raises(InvalidArgumentError):
            len(s)

    def test_decreasing_prefix_rejected(self):
        with pytest.raises(InvalidArgumentError):
            LevelSequence(prefix=[2.0, 1.0])

    def test_empty_without_rule_rejected(self):
        with pytest.raises(InvalidArgumentError):
            LevelSequence(prefix=[])

    def test_index_below_one_rejected(self):
        s = LevelSequence(rule=float)
        with pytest.raises(InvalidArgumentError):
            s.value(0)

    @given(st.lists(st.floats(min_value=-50, max_value=50), min_size=1, max_size=30),
           st.floats(min_value=-60, max_value=60))
    def test_count_leq_matches_brute_force(self, raw, x):
        prefix = np.sort(np.asarray(raw, dtype=float))
        s = LevelSequence(prefix=prefix)
        assert s.count_leq(x) == int(np.sum(prefix <= x))

    def test_count_leq_rule_region(self):
        s = LevelSequence(rule=float)  # v_n = n
        assert s.count_leq(0.5) == 0
        assert s.count_leq(1.0) == 1
        assert s.count_leq(1234567.9) == 1234567

    def test_count_leq_bounded_rule_saturates(self):
        # v_n = 1 - 1/n climbs to sup = 1; at or past the sup the count is "infinite".
        s = LevelSequence(rule=lambda n: 1.0 - 1.0 / n, sup=1.0)
        assert s.count_leq(1.0) == HUGE_INDEX
        assert s.count_leq(0.75) == 4
        assert s.count_leq(0.0) == 1

    def test_shifted(self):
        s = LevelSequence(prefix=[1.0, 3.0], rule=float, sup=math.inf)
        t = s.shifted(10.0)
        assert t.value(1) == 11.0
        assert t.value(5) == 15.0


class TestProbePolicy:
    def test_probabilities_are_tail_geometric(self):
        p = ProbePolicy(depth=5).probabilities()
        np.testing.assert_allclose(1.0 - p, [0.5, 0.25, 0.125, 0.0625, 0.03125])

    def test_levels_strictly_ascending(self):
        xs = ProbePolicy().levels(exponential(1.0))
        assert np.all(np.diff(xs) > 0)

    def test_truncation_level(self):
        pol = ProbePolicy(tail_cutoff=1e-8)
        assert pol.truncation_level(exponential(1.0)) == pytest.approx(-math.log(1e-8))

    def test_explicit_grid_must_ascend(self):
        with pytest.raises(InvalidArgumentError):
            ProbePolicy(explicit_levels=(1.0, 1.0, 2.0)).levels(exponential(1.0))

    def test_bad_parameters_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ProbePolicy(depth=0)
        with pytest.raises(InvalidArgumentError):
            ProbePolicy(ratio_tol=1.5)


class TestLevelGrid:
    def test_descending_rejected(self):
        with pytest.raises(InvalidArgumentError):
            LevelGrid.from_values([3.0, 1.0])

    def test_power_scale_covers_transition(self):
        """The n-th power of the cdf should sweep most of (0, 1) on the grid."""
        F = exponential(1.0)
        grid = LevelGrid.power_scale(F, n=100)
        fn = np.asarray(F.cdf(grid.values)) ** 100
        assert fn.min() < 0.01
        assert fn.max() > 0.98
        assert np.all(np.diff(grid.values) > 0)

    def test_power_scale_bounded_support(self):
        grid = LevelGrid.power_scale(uniform(0.0, 1.0), n=50)
        assert grid.values.max() <= 1.0


def test_last_quarter_size():
    assert last_quarter(np.arange(8.0)).tolist() == [6.0, 7.0]
    assert last_quarter(np.array([3.0])).tolist() == [3.0]


def test_converges_to():
    track = 1.0 + 1.0 / np.arange(1, 101)
    assert converges_to(track, 1.0, 0.02)
    assert not converges_to(track, 1.0, 1e-4)
    assert not converges_to(np.array([]), 1.0, 0.5)


def test_classify_limit():
    kind, value = classify_limit(2.0 + 1.0 / np.arange(1, 201), tol=0.02)
    assert kind == "converged"
    assert value == pytest.approx(2.0, abs=0.02)

    kind, value = classify_limit(np.tile([0.0, 1.0], 50), tol=0.02)
    assert kind == "divergent"
    assert value is None


@pytest.mark.parametrize("track,expected", [
    (1.0 + 0.5 ** np.arange(40), "one"),
    (2.0 ** -np.arange(40.0), "zero"),
    (2.0 ** np.arange(40.0), "inf"),
    (np.tile([0.5, 1.5], 20), "divergent"),
])
def test_classify_ratio_track(track, expected):
    assert classify_ratio_track(track, tol=0.02) == expected
