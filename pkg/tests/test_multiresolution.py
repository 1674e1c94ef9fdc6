"""Tests for masks, the cascade, periodization and wavelets."""

import numpy as np
import pytest

from src.sigma_extrapolation.errors import CoverageError, DimensionMismatchError
from src.sigma_extrapolation.extrapolation import reconstruct_space
from src.sigma_extrapolation.family import FunctionFamily, SincPower, make_translates
from src.sigma_extrapolation.hermitian import HermitianMatrix
from src.sigma_extrapolation.multiplier import SigmaMultiplier, single_function_multiplier
from src.sigma_extrapolation.multiresolution import (
    apply_boundary_window,
    cascade,
    cascade_grid,
    decay_slope,
    holder_probe,
    periodization_Phi,
    periodize_mask,
    refinement_defect,
    rescale_mask,
    sample_grid,
    wavelet_hat,
    wavelet_mask,
    wrap,
)


def cos_squared(points):
    return np.cos(np.pi * np.asarray(points)[:, 0]) ** 2


@pytest.fixture(scope="module")
def hat_cascade():
    """Cascade of cos^2(pi xi) on [-8, 8]: the transform of the hat function."""
    mask = periodize_mask(cos_squared, 256)
    return cascade(mask, 128, cascade_grid(8.0, 8192))


class TestMasks:
    def test_wrap(self):
        np.testing.assert_allclose(wrap(np.array([0.75, -0.5, 0.5, 2.25])), [-0.25, -0.5, -0.5, 0.25])

    def test_sample_grid(self):
        np.testing.assert_allclose(sample_grid(4)[:, 0], [-0.5, -0.25, 0.0, 0.25])
        assert sample_grid(3, dimension=2).shape == (9, 2)

    def test_periodic_extension(self):
        mask = periodize_mask(lambda p: np.asarray(p)[:, 0] + 0j, 64)
        assert mask([[1.25]])[0] == pytest.approx(0.25)
        assert mask([[-0.75]])[0] == pytest.approx(0.25)

    def test_sampled_mask_interpolates_periodically(self):
        mask = periodize_mask(cos_squared, 512, exact=False)
        points = np.array([[0.1], [0.499], [3.3]])
        np.testing.assert_allclose(mask(points), np.cos(np.pi * points[:, 0]) ** 2, atol=1e-4)

    def test_single_member_mask_is_cos_squared(self):
        family = FunctionFamily((SincPower((0.0,)),))
        mask = periodize_mask(single_function_multiplier(family, 2.0), 256)
        xi = np.linspace(-0.5, 0.5, 101)
        np.testing.assert_allclose(mask(xi), np.cos(np.pi * xi) ** 2, atol=1e-12)

    def test_boundary_window_zeros_half_integers(self):
        windowed = apply_boundary_window(lambda p: np.ones(len(p)), 3)
        values = windowed(np.array([[0.5], [0.25]]))
        assert values[0] == pytest.approx(1.0)
        assert abs(values[1]) < 1e-15
        assert abs(values[2]) == pytest.approx(np.cos(np.pi / 4) ** 3)

    def test_rescale_restores_unit_value(self):
        """Semidefinite Sigma with a first-order zero at the origin."""
        family = make_translates(SincPower((0.0,)), [[1.0]])
        v = np.array([1.0, -1.0]) / np.sqrt(2)
        mult = SigmaMultiplier(family, 2.0, HermitianMatrix.outer(v))
        rescaled = rescale_mask(mult, -1)
        for xi in (1e-2, 1e-3, 1e-4):
            # symmetric average cancels the first-order imaginary term
            value = 0.5 * (rescaled(np.array([[xi], [-xi]]))).sum()
            assert value == pytest.approx(1.0, abs=40 * xi**2 + 1e-9)
        raw = mult(np.array([[1e-4], [-1e-4]])).sum() / 2
        assert raw == pytest.approx(2.0, abs=1e-6)


class TestCascade:
    def test_recovers_sinc_squared(self, hat_cascade):
        xi = hat_cascade.grid.nodes()[:, 0]
        near = np.abs(xi) <= 4.0
        error = np.abs(hat_cascade.grid.values.ravel()[near] - np.sinc(xi[near]) ** 2)
        assert error.max() <= 1e-3
        assert hat_cascade.zero_set_hits == 0

    def test_scaling_function_is_hat(self, hat_cascade):
        phi = reconstruct_space(hat_cascade.grid, (512,), ((-2.0,), (2.0,)))
        hat = np.maximum(0.0, 1.0 - np.abs(phi.axes[0]))
        assert np.max(np.abs(phi.real - hat)) <= 0.02

    def test_refinement_equation_holds(self, hat_cascade):
        points = np.linspace(-2.0, 2.0, 401).reshape(-1, 1)
        assert refinement_defect(hat_cascade, hat_cascade.mask, points) < 1e-10

    def test_increments_shrink(self, hat_cascade):
        assert hat_cascade.increment < 1e-12
        assert hat_cascade.increments[0] > hat_cascade.increment

    def test_unnormalized_mask_warns(self, caplog):
        mask = periodize_mask(lambda p: 0.5 * cos_squared(p), 64)
        cascade(mask, 4, cascade_grid(1.0, 64))
        assert "not normalized" in caplog.text

    def test_decay_slope_of_order_four_window(self):
        unit = apply_boundary_window(lambda p: np.ones(len(p), dtype=complex), 4)
        phi_hat = cascade(periodize_mask(unit, 256), 64, cascade_grid(64.0, 8192))
        slope = decay_slope(phi_hat)
        assert slope <= -2.5
        assert slope == pytest.approx(-4.0, abs=0.5)

    def test_decay_slope_needs_wide_grid(self, hat_cascade):
        with pytest.raises(CoverageError):
            decay_slope(hat_cascade)

    def test_holder_probe(self):
        assert holder_probe(cos_squared) == pytest.approx(np.sin(0.1 * np.pi) ** 2 / 0.1, rel=1e-9)


class TestWavelets:
    @pytest.fixture(scope="class")
    def periodization(self, hat_cascade):
        return periodization_Phi(hat_cascade, terms=257, resolution=256)

    def test_periodization_of_hat(self, periodization):
        xi = sample_grid(256)
        np.testing.assert_allclose(periodization(xi).real, (2.0 + np.cos(2 * np.pi * xi[:, 0])) / 3.0, atol=1e-6)

    def test_wavelet_mask_values(self, hat_cascade, periodization):
        g = wavelet_mask(hat_cascade.mask, periodization)
        assert g([[0.25]])[0] == pytest.approx(-1j / 3.0, abs=1e-6)
        assert abs(g([[0.0]])[0]) < 1e-12

    def test_wavelet_hat_vanishes_at_origin(self, hat_cascade, periodization):
        g = wavelet_mask(hat_cascade.mask, periodization)
        psi_hat = wavelet_hat(g, hat_cascade)
        assert abs(psi_hat.sample([[0.0]])[0]) < 1e-12
        assert psi_hat.shape == hat_cascade.grid.shape

    def test_terms_must_be_odd(self, hat_cascade):
        with pytest.raises(ValueError):
            periodization_Phi(hat_cascade, terms=4)

    def test_sampled_periodization_needs_coverage(self, hat_cascade):
        with pytest.raises(CoverageError):
            periodization_Phi(hat_cascade, terms=257, resolution=64, exact=False)

    def test_two_dimensional_masks_are_rejected(self):
        mask = periodize_mask(lambda p: np.ones(len(p)), 8, dimension=2)
        with pytest.raises(DimensionMismatchError):
            wavelet_mask(mask, mask)
