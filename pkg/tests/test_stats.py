import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from gcea.benchmarks import Direction
from gcea.errors import ParameterError
from gcea.stats import (ResultSet, compare, comparison_frame, pairwise, summarize,
                        welch_t_test)


def test_summarize():
    summary = summarize([1.0, 2.0, 3.0, 4.0])
    assert summary.count == 4
    assert summary.mean == 2.5
    assert summary.std == pytest.approx(math.sqrt(5.0 / 3.0))


def test_summarize_constant_sample():
    summary = summarize([0.1] * 7)
    assert summary.mean == 0.1
    assert summary.std == 0.0


def test_summarize_empty():
    with pytest.raises(ParameterError):
        summarize([])


def test_welch_matches_scipy():
    rng = np.random.default_rng(99)
    for case in range(10):
        a = rng.normal(0.0, 1.0 + case * 0.3, size=10 + case)
        b = rng.normal(0.4, 2.0, size=25 - case)
        t, p = welch_t_test(a, b)
        expected = scipy_stats.ttest_ind(a, b, equal_var=False)
        assert t == pytest.approx(expected.statistic, rel=1e-9)
        assert p == pytest.approx(expected.pvalue, rel=1e-6, abs=1e-12)


def test_welch_identical_samples():
    t, p = welch_t_test([0.3, 0.5, 0.7], [0.3, 0.5, 0.7])
    assert t == 0.0
    assert p == pytest.approx(1.0)


def test_welch_zero_variance():
    assert welch_t_test([1.0, 1.0], [1.0, 1.0]) == (0.0, 1.0)
    t, p = welch_t_test([2.0, 2.0], [1.0, 1.0])
    assert t == math.inf and p == 0.0
    t, p = welch_t_test([1.0, 1.0], [2.0, 2.0])
    assert t == -math.inf and p == 0.0


def test_welch_needs_two_per_group():
    with pytest.raises(ParameterError):
        welch_t_test([1.0], [1.0, 2.0])


def test_compare_better_follows_direction():
    high = (0.70, 0.72, 0.71, 0.73)
    low = (0.60, 0.61, 0.62, 0.60)
    row = compare(ResultSet("a", high, Direction.MAXIMISE), ResultSet("b", low, Direction.MAXIMISE))
    assert row.better == "a"
    assert row.significant
    row = compare(ResultSet("a", high, Direction.MINIMISE), ResultSet("b", low, Direction.MINIMISE))
    assert row.better == "b"


def test_compare_equal_means_has_no_winner():
    row = compare(ResultSet("a", (1.0, 2.0), Direction.MAXIMISE),
                  ResultSet("b", (2.0, 1.0), Direction.MAXIMISE))
    assert row.better == ""
    assert not row.significant


def test_compare_rejects_mixed_directions():
    with pytest.raises(ParameterError):
        compare(ResultSet("a", (1.0, 2.0), Direction.MAXIMISE),
                ResultSet("b", (1.0, 2.0), Direction.MINIMISE))


def test_alpha_threshold():
    a = ResultSet("a", (0.0, 1.0, 2.0, 3.0), Direction.MAXIMISE)
    b = ResultSet("b", (1.0, 2.0, 3.0, 4.0), Direction.MAXIMISE)
    row = compare(a, b, alpha=0.05)
    assert not row.significant
    assert compare(a, b, alpha=0.5).significant == (row.p < 0.5)


def test_pairwise_frame():
    sets = [ResultSet(name, values, Direction.MAXIMISE) for name, values in
            [("x", (1.0, 2.0, 3.0)), ("y", (2.0, 3.0, 4.0)), ("z", (5.0, 5.5, 6.0))]]
    frame = comparison_frame(pairwise(sets))
    assert list(zip(frame["label_a"], frame["label_b"])) == [("x", "y"), ("x", "z"), ("y", "z")]
    assert list(frame.columns)[-3:] == ["p", "significant", "better"]


def test_welch_small_reference_and_symmetry():
    a, b = [2.1, 2.5, 2.3], [1.1, 1.4, 1.2]
    t, p = welch_t_test(a, b)
    expected = scipy_stats.ttest_ind(a, b, equal_var=False)
    assert t == pytest.approx(expected.statistic, rel=1e-9)
    assert p == pytest.approx(expected.pvalue, rel=1e-6)
    t_swapped, p_swapped = welch_t_test(b, a)
    assert t_swapped == -t
    assert p_swapped == pytest.approx(p, rel=1e-12)


def test_well_separated_sets_are_significant():
    rng = np.random.default_rng(5)
    row = compare(ResultSet("zero", tuple(rng.normal(0.0, 0.01, 30)), Direction.MAXIMISE),
                  ResultSet("one", tuple(rng.normal(1.0, 0.01, 30)), Direction.MAXIMISE))
    assert row.significant
    assert row.better == "one"


def test_welch_invariant_under_shift_and_scale():
    rng = np.random.default_rng(5)
    a = rng.normal(0.0, 1.0, size=12)
    b = rng.normal(0.5, 1.5, size=9)
    t, p = welch_t_test(a, b)
    shifted_t, shifted_p = welch_t_test(a + 3.0, b + 3.0)
    assert shifted_t == pytest.approx(t, rel=1e-9)
    assert shifted_p == pytest.approx(p, rel=1e-9)
    scaled_t, scaled_p = welch_t_test(a * 2.5, b * 2.5)
    assert scaled_t == pytest.approx(t, rel=1e-9)
    assert scaled_p == pytest.approx(p, rel=1e-9)
