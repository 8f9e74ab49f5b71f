"""Tests for the weighted sample container."""

from __future__ import annotations

import numpy as np
import pytest

from dispersim.samples import Sample


def test_default_weights_are_unit():
    s = Sample(np.array([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(s.weights, [1.0, 1.0, 1.0])
    assert s.size == 3
    assert s.total_weight == 3.0


def test_empty_sample_is_allowed():
    s = Sample(np.array([]))
    assert s.size == 0
    assert s.total_weight == 0.0


def test_validation():
    with pytest.raises(ValueError):
        Sample(np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        Sample(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        Sample(np.array([1.0, np.inf]))
    with pytest.raises(ValueError):
        Sample(np.array([1.0, 2.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        Sample(np.array([1.0, 2.0]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        Sample(np.array([1.0, 2.0]), np.array([1.0, -2.0]))


def test_sorted_keeps_weights_aligned_and_is_stable():
    s = Sample(np.array([2.0, 1.0, 2.0]), np.array([5.0, 6.0, 7.0]))
    out = s.sorted()
    np.testing.assert_array_equal(out.values, [1.0, 2.0, 2.0])
    # ties preserve input order, so weight 5 stays ahead of weight 7
    np.testing.assert_array_equal(out.weights, [6.0, 5.0, 7.0])


def test_negative_values_are_fine():
    s = Sample(np.array([-3.0, 0.0, 3.0]))
    assert s.sorted().values[0] == -3.0
