import math

import numpy as np
import pytest

from vibrospec.model import System
from vibrospec.oracle import bare_electronic_spectrum, lorentzian_mixture
from vibrospec.solver import SweepPlan, sweep_frequency
from vibrospec.spectrum import (
    SpectrumResult,
    find_peaks,
    integrated_intensity,
    spectrum_from_blocks,
)

META = {"numerics": {"epsilon": 0.01}}


def _run(system, grid, e_max=8, epsilon=0.01):
    plan = SweepPlan(omega_grid=grid, epsilon=epsilon, e_max=e_max)
    blocks = sweep_frequency(system, plan)
    meta = {"numerics": {"epsilon": epsilon}}
    return spectrum_from_blocks(blocks, system.aggregate.dipoles, meta)


def test_decoupled_monomer_is_a_lorentzian_of_height_100():
    system = System.uniform(1, g=0.0, gamma=1.0)
    grid = np.linspace(-0.5, 0.5, 201)
    result = _run(system, grid, e_max=0)
    expected = 0.01 / (0.01**2 + grid**2)
    np.testing.assert_allclose(result.f, expected, atol=1e-10)
    assert result.f.max() == pytest.approx(100.0, rel=1e-9)


def test_decoupled_dimer_has_single_bright_peak_of_height_200():
    system = System.uniform(2, coupling=1.0, g=0.0, gamma=1.0)
    grid = np.linspace(-2.0, 2.0, 801)
    result = _run(system, grid, e_max=0)
    i = result.f.argmax()
    assert grid[i] == pytest.approx(1.0, abs=0.005)
    assert result.f[i] == pytest.approx(2.0 / 0.01, rel=1e-4)
    # the antisymmetric mode at -1 is dark
    at_minus_one = result.f[np.argmin(np.abs(grid + 1.0))]
    assert at_minus_one < 1e-2 * result.f[i]


def test_matches_analytic_bare_mixture_at_zero_coupling():
    system = System.uniform(3, coupling=0.7, g=0.0, gamma=1.0)
    grid = np.linspace(-3.0, 3.0, 1201)
    result = _run(system, grid, e_max=4)
    analytic = bare_electronic_spectrum(system.aggregate, 0.01, grid)
    assert np.abs(result.f - analytic).max() <= 1e-8 * result.f.max()


def test_dipole_magnitudes_scale_the_spectrum():
    base = System.uniform(1, g=0.0, gamma=1.0)
    scaled = System.uniform(1, g=0.0, gamma=1.0, dipole_magnitudes=[2.0])
    grid = np.linspace(-1.0, 1.0, 101)
    f_base = _run(base, grid, e_max=0).f
    f_scaled = _run(scaled, grid, e_max=0).f
    np.testing.assert_allclose(f_scaled, 4.0 * f_base, rtol=1e-12)


@pytest.mark.parametrize(
    "n,geometry,g,gamma",
    [(1, "linear", 1.0, 1.0), (2, "linear", 1.0, 0.5), (3, "ring", 0.5, 1.0)],
)
def test_sum_rule_small_cases(n, geometry, g, gamma):
    system = System.uniform(n, geometry=geometry, coupling=1.0, g=g, gamma=gamma)
    grid = np.linspace(-8.0, 10.0, 3601)
    result = _run(system, grid, e_max=8)
    assert integrated_intensity(result) == pytest.approx(math.pi * n, rel=0.01)


def test_boundary_mass_warning():
    grid = np.linspace(-1.0, 1.0, 101)
    f = 0.05 / (0.05**2 + grid**2)  # wide Lorentzian, fat tails at the edges
    result = SpectrumResult(omega=grid, f=f, meta=META)
    with pytest.warns(UserWarning):
        integrated_intensity(result)


def test_find_peaks_on_synthetic_mixture():
    grid = np.linspace(-2.0, 2.0, 4001)
    f = lorentzian_mixture([-1.0, 0.30042], [1.0, 0.5], 0.01, grid)
    result = SpectrumResult(omega=grid, f=f, meta=META)
    peaks = find_peaks(result, rel_threshold=0.01)
    assert len(peaks) == 2
    # parabolic refinement resolves the off-grid position well below the step
    assert abs(peaks.peaks[1].omega - 0.30042) < 2e-4
    assert abs(peaks.peaks[0].omega - (-1.0)) < 2e-4
    assert peaks.peaks[0].height == pytest.approx(100.0, rel=1e-2)


def test_find_peaks_merges_close_maxima():
    grid = np.linspace(-1.0, 1.0, 2001)
    f = lorentzian_mixture([0.0, 0.012], [1.0, 0.9], 0.005, grid)
    result = SpectrumResult(omega=grid, f=f, meta=META)
    merged = find_peaks(result, rel_threshold=0.01, min_separation=0.05)
    assert len(merged) == 1
    split = find_peaks(result, rel_threshold=0.01, min_separation=0.002)
    assert len(split) == 2


def test_find_peaks_threshold_suppresses_small_maxima():
    grid = np.linspace(-2.0, 2.0, 4001)
    f = lorentzian_mixture([-1.0, 1.0], [1.0, 0.001], 0.01, grid)
    result = SpectrumResult(omega=grid, f=f, meta=META)
    assert len(find_peaks(result, rel_threshold=0.05)) == 1


def test_find_peaks_validation():
    grid = np.linspace(-1.0, 1.0, 101)
    result = SpectrumResult(omega=grid, f=np.zeros_like(grid), meta=META)
    with pytest.raises(ValueError):
        find_peaks(result)
    good = SpectrumResult(omega=grid, f=np.exp(-grid**2), meta=META)
    with pytest.raises(ValueError):
        find_peaks(good, rel_threshold=1.5)


def test_loose_nonnegativity():
    system = System.uniform(2, coupling=1.0, g=1.0, gamma=0.05)
    grid = np.linspace(-4.0, 6.0, 2001)
    result = _run(system, grid, e_max=10)
    assert result.f.min() >= -1e-6 * result.f.max()


def test_two_dimensional_result_shape_checks():
    grid = np.linspace(-1.0, 1.0, 11)
    with pytest.raises(ValueError):
        SpectrumResult(omega=grid, f=np.zeros((3, 5)), meta=META, axis_values=[1, 2, 3])
    ok = SpectrumResult(omega=grid, f=np.zeros((2, 11)), meta=META, axis_values=[0.1, 1.0])
    with pytest.raises(ValueError):
        find_peaks(ok)
