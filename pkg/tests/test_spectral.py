"""Tests for spectral sets, projections and support functions."""

import numpy as np
import pytest
from scipy.optimize import bisect

from src.sigma_extrapolation.errors import DimensionMismatchError, ExtrapolationError
from src.sigma_extrapolation.hermitian import HermitianMatrix, eigendecompose, frobenius_inner
from src.sigma_extrapolation.spectral import (
    SpectralSet,
    in_set,
    max_trace,
    project_box,
    project_capped_simplex,
    project_l1_ball,
    project_spectral,
    support_function,
)


def l1_oracle(values, r):
    """Soft thresholding with the threshold found by bisection."""
    magnitude = np.abs(values)
    if magnitude.sum() <= r:
        return values
    theta = bisect(lambda t: np.maximum(magnitude - t, 0).sum() - r, 0.0, magnitude.max(), xtol=1e-15)
    return np.sign(values) * np.maximum(magnitude - theta, 0)


def random_psd(rng, n=4):
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    scale = rng.uniform(0.01, 3.0)
    return HermitianMatrix.symmetrized(scale * b @ b.conj().T / n)


class TestVectorProjections:
    def test_l1_inside_is_unchanged(self):
        v = np.array([0.2, -0.3, 0.1])
        np.testing.assert_array_equal(project_l1_ball(v, 1.0), v)

    def test_l1_matches_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            v = rng.normal(size=6) * 2
            np.testing.assert_allclose(project_l1_ball(v, 1.0), l1_oracle(v, 1.0), atol=1e-10)

    def test_box_clips(self):
        np.testing.assert_array_equal(project_box([2.0, -3.0, 0.5], 1.0), [1.0, -1.0, 0.5])

    def test_capped_simplex(self):
        out = project_capped_simplex([3.0, 1.0, -2.0], 2.0)
        np.testing.assert_allclose(out, [2.0, 0.0, 0.0])
        np.testing.assert_allclose(project_capped_simplex([0.2, -0.1], 1.0), [0.2, 0.0])

    def test_nonpositive_radius(self):
        with pytest.raises(ExtrapolationError):
            project_l1_ball([1.0], 0.0)


class TestSpectralProjection:
    """Random PSD 4x4 matrices against eigenvalue oracles."""

    def test_nuclear_ball_against_bisection(self):
        rng = np.random.default_rng(42)
        w = SpectralSet.nuclear_ball(1.0)
        for _ in range(1000):
            x = random_psd(rng)
            decomposition = eigendecompose(x)
            expected = decomposition.reconstruct(l1_oracle(decomposition.values, 1.0))
            projected = project_spectral(w, x)
            np.testing.assert_allclose(projected.data, expected.data, atol=1e-9)
            assert projected.min_eigenvalue() >= -1e-10
            assert in_set(w, projected)

    def test_operator_ball_against_clip(self):
        rng = np.random.default_rng(43)
        w = SpectralSet.operator_ball(0.5)
        for _ in range(1000):
            x = random_psd(rng)
            decomposition = eigendecompose(x)
            expected = decomposition.reconstruct(np.clip(decomposition.values, -0.5, 0.5))
            projected = project_spectral(w, x)
            np.testing.assert_allclose(projected.data, expected.data, atol=1e-9)
            assert projected.min_eigenvalue() >= -1e-10

    def test_projection_is_idempotent(self):
        rng = np.random.default_rng(44)
        w = SpectralSet.trace_cap(1.0)
        once = project_spectral(w, random_psd(rng))
        twice = project_spectral(w, once)
        np.testing.assert_allclose(twice.data, once.data, atol=1e-12)

    def test_trace_cap_removes_negative_part(self):
        x = HermitianMatrix.diagonal([0.5, -2.0])
        projected = project_spectral(SpectralSet.trace_cap(3.0), x)
        np.testing.assert_allclose(projected.data, np.diag([0.5, 0.0]), atol=1e-14)

    def test_size_check(self):
        with pytest.raises(DimensionMismatchError):
            project_spectral(SpectralSet.nuclear_ball(1.0, n=3), HermitianMatrix.identity(2))


class TestSupportFunction:
    def test_nuclear_ball_attained_by_top_eigenvector(self):
        rng = np.random.default_rng(5)
        g = random_psd(rng)
        w = SpectralSet.nuclear_ball(2.0)
        decomposition = eigendecompose(g)
        x = HermitianMatrix.outer(decomposition.vectors[:, 0]) * 2.0
        assert support_function(w, g) == pytest.approx(frobenius_inner(x, g))

    def test_operator_ball_sums_magnitudes(self):
        g = HermitianMatrix.diagonal([1.0, -2.0, 0.5])
        assert support_function(SpectralSet.operator_ball(1.0), g) == pytest.approx(3.5)

    def test_trace_cap(self):
        g = HermitianMatrix.diagonal([-1.0, -2.0])
        assert support_function(SpectralSet.trace_cap(4.0), g) == 0.0
        assert support_function(SpectralSet.trace_cap(4.0), HermitianMatrix.diagonal([1.5, 0.2])) == 6.0

    def test_max_trace(self):
        assert max_trace(SpectralSet.nuclear_ball(1.0), 5) == 1.0
        assert max_trace(SpectralSet.operator_ball(1.0), 5) == 5.0
