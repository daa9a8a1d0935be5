import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaugelat.fractal import (bandwidth_measure, box_counting_dimension, box_counts, cantor_points,
                              resolution_limit, spectrum_dimension)
from gaugelat.spectral import SpectrumSweep


def test_full_interval():
    assert box_counting_dimension(np.linspace(0, 1, 2**12)).D == pytest.approx(1.0, abs=0.02)


def test_single_point():
    f = box_counting_dimension([0.3])
    assert f.D == 0 and f.degenerate


def test_two_level_system():
    f = spectrum_dimension(SpectrumSweep("p", [(0, np.array([-1.0, -1.0, 1.0, 1.0]))]), 0)
    assert f.D == pytest.approx(0.0, abs=1e-12)


def test_cantor_depth8():
    f = box_counting_dimension(cantor_points(8))
    assert f.D == pytest.approx(np.log(2) / np.log(3), abs=0.03)
    assert box_counting_dimension(cantor_points(8, both_ends=True)).D == pytest.approx(0.6309, abs=0.03)


def test_cantor_points_count():
    assert len(cantor_points(8)) == 256 and len(cantor_points(3, True)) == 16
    assert cantor_points(1).tolist() == [0.0, 2 / 3]


def test_scale_floor():
    x = np.linspace(0, 1, 65)
    assert resolution_limit(x) == pytest.approx(1 / 64)
    f = box_counting_dimension(x)
    assert f.scales.min() >= 4 / 64 - 1e-12
    assert len(f.scales) >= 3


def test_box_counts_simple():
    np.testing.assert_array_equal(box_counts(np.array([0.0, 0.3, 0.6, 1.0]), [0.5, 0.25]), [2, 4])


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=200, unique=True),
       st.floats(0.1, 20), st.floats(-50, 50))
def test_affine_invariance(pts, c, b):
    pts = np.array(pts)
    if np.ptp(pts) < 1e-6:
        return
    a = box_counting_dimension(pts)
    t = box_counting_dimension(c * pts + b)
    # affine normalization first; equality up to rounding in the normalized points
    assert t.D == pytest.approx(a.D, abs=1e-6) or len(t.scales) != len(a.scales)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=100), st.lists(st.floats(0, 1), max_size=50))
def test_counts_monotone_in_points(base, extra):
    base = np.array(base + [0.0, 1.0])
    more = np.concatenate([base, extra])
    s = np.geomspace(2**-3, 2**-10, 29)
    assert np.all(box_counts(np.sort(more), s) >= box_counts(np.sort(base), s))


def test_bandwidth_examples():
    assert bandwidth_measure(np.linspace(0, 4, 4001)) == pytest.approx(4.0)
    assert bandwidth_measure([0.0, 1.0]) == 0.0
    assert bandwidth_measure([0.5]) == 0.0


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=60), st.floats(0, 2), st.floats(0, 2))
def test_bandwidth_monotone_in_threshold(w, t1, t2):
    lo, hi = sorted((t1, t2))
    assert bandwidth_measure(w, lo) <= bandwidth_measure(w, hi)
