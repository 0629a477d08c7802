"""Fourier transform of the level sequence and peak matching."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from raysplit.analysis import (
    _magnitude_direct,
    default_s_spacing,
    default_tolerance,
    detect_peaks,
    fourier_transform,
    match_peaks,
)


def comb_roots(n):
    """Free-well spectrum: k_j = j pi, whose |F| peaks exactly at even s."""
    return np.arange(1, n + 1) * math.pi


def test_zero_action_returns_level_count():
    roots = comb_roots(50)
    prof = fourier_transform(roots, np.array([0.0, 0.1]))
    assert prof.magnitude[0] == pytest.approx(50.0, abs=1e-10)
    assert prof.j_roots == 50
    assert prof.k_max == pytest.approx(50 * math.pi)


def test_magnitude_never_exceeds_level_count():
    rng = np.random.default_rng(5)
    roots = np.sort(rng.uniform(1.0, 200.0, 300))
    s = np.linspace(0.0, 12.0, 4001)
    prof = fourier_transform(roots, s)
    assert prof.magnitude.max() <= 300.0 + 1e-9


def test_uniform_grid_fast_path_matches_direct():
    rng = np.random.default_rng(9)
    roots = np.sort(rng.uniform(1.0, 500.0, 400))
    s = np.arange(0.2, 9.0, 0.001)           # uniform: takes the blocked path
    prof = fourier_transform(roots, s)
    direct = _magnitude_direct(roots, s)
    assert np.max(np.abs(prof.magnitude - direct)) < 1e-10


def test_nonuniform_grid_falls_back_to_direct():
    roots = comb_roots(30)
    s = np.array([0.5, 0.7, 1.3, 2.0, 3.1])  # irregular spacing
    prof = fourier_transform(roots, s)
    expected = np.abs(np.exp(-1j * np.outer(s, roots)).sum(axis=1))
    assert np.max(np.abs(prof.magnitude - expected)) < 1e-10


def test_empty_roots_rejected():
    with pytest.raises(ValueError, match="roots"):
        fourier_transform(np.array([]), np.array([1.0]))


def test_default_grid_helpers():
    assert default_s_spacing(100.0) == pytest.approx(math.pi / 400.0)
    assert default_tolerance(100.0) == pytest.approx(math.pi / 25.0)


def test_comb_peaks_sit_at_even_actions():
    roots = comb_roots(200)
    k_max = roots[-1]
    s = np.arange(0.5, 6.5, default_s_spacing(k_max))
    prof = fourier_transform(roots, s)
    peaks = detect_peaks(prof, 0.5)
    assert len(peaks) == 3
    assert np.allclose(peaks, [2.0, 4.0, 6.0], atol=1e-4)


def test_side_lobes_are_suppressed():
    # a sinc skirt around each comb peak rises above 0.05 J; window dominance
    # must still report only the true actions
    roots = comb_roots(200)
    k_max = roots[-1]
    s = np.arange(0.5, 6.5, default_s_spacing(k_max))
    peaks = detect_peaks(fourier_transform(roots, s), 0.05)
    tol = default_tolerance(k_max)
    assert len(peaks) > 0
    for p in peaks:
        assert min(abs(p - a) for a in (2.0, 4.0, 6.0)) < tol


def test_quiet_profile_has_no_peaks():
    roots = comb_roots(120)
    s = np.arange(0.5, 1.8, 0.001)           # interval containing no action
    peaks = detect_peaks(fourier_transform(roots, s), 0.5)
    assert peaks.size == 0


def test_threshold_validation():
    prof = fourier_transform(comb_roots(10), np.linspace(0.5, 3.0, 100))
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError, match="threshold_fraction"):
            detect_peaks(prof, bad)


def test_parabolic_refinement_beats_grid_spacing():
    roots = comb_roots(300)
    ds = default_s_spacing(roots[-1])
    s = np.arange(1.7, 2.3, ds) + 0.37 * ds  # put the summit between samples
    peaks = detect_peaks(fourier_transform(roots, s), 0.5)
    assert len(peaks) == 1
    assert abs(peaks[0] - 2.0) < ds / 10


def test_peak_width_halves_with_doubled_window():
    def fwhm(n):
        roots = comb_roots(n)
        s = np.arange(1.9, 2.1, 1e-5)
        mag = fourier_transform(roots, s).magnitude
        half = mag.max() / 2.0
        above = s[mag >= half]
        return above[-1] - above[0]

    ratio = fwhm(150) / fwhm(300)
    assert 2 / 1.3 < ratio < 2.6


def test_match_peaks_assignment():
    report = match_peaks([1.0, 2.0], [1.0002, 5.0], tolerance=0.001)
    assert report.matched_fraction == 0.5
    assert report.pairs[0][1] == pytest.approx(1.0002)
    assert report.pairs[0][2] == pytest.approx(2e-4, rel=1e-6)
    assert math.isnan(report.pairs[1][1])
    assert report.unmatched == (2.0,)
    assert report.worst_residual == pytest.approx(2e-4, rel=1e-6)


def test_match_peaks_empty_cases():
    assert match_peaks([], [1.0], 0.1).matched_fraction == 1.0
    report = match_peaks([1.0], [], 0.1)
    assert report.matched_fraction == 0.0
    assert report.unmatched == (1.0,)


@settings(max_examples=20, deadline=None)
@given(
    n=st.integers(5, 60),
    scale=st.floats(0.5, 5.0),
)
def test_transform_is_scale_covariant(n, scale):
    # stretching all levels by c squeezes the action axis by 1/c
    rng = np.random.default_rng(n)
    roots = np.sort(rng.uniform(1.0, 50.0, n))
    s = np.linspace(0.3, 4.0, 200)
    a = fourier_transform(roots, s).magnitude
    b = fourier_transform(scale * roots, s / scale).magnitude
    assert np.max(np.abs(a - b)) < 1e-9
