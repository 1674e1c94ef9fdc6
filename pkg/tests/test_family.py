"""Tests for function families and their members."""

import numpy as np
import pytest

from src.sigma_extrapolation.domain import Cube
from src.sigma_extrapolation.errors import (
    DimensionMismatchError,
    InvalidDomainError,
    InvalidFamilyError,
)
from src.sigma_extrapolation.family import (
    DiscreteInterpolant,
    FunctionFamily,
    IndicatorBoxTransform,
    SincPower,
    eval_family,
    eval_family_dilated,
    make_integer_translates,
    make_scalings,
    make_translates,
    min_abs_sq_on_domain,
    tensor_grid,
)


def cell_transform(xi, a, b):
    """Fourier transform of the indicator of [a, b] at nonzero xi."""
    return (np.exp(-2j * np.pi * xi * a) - np.exp(-2j * np.pi * xi * b)) / (2j * np.pi * xi)


class TestMembers:
    def test_sinc_power_at_origin(self):
        assert SincPower((0.0, 0.0), power=3).evaluate([0.0, 0.0])[0] == pytest.approx(1.0)

    def test_translate_adds_phase(self):
        base = SincPower((0.0,))
        xi = np.array([[0.3]])
        moved = base.translated([0.25])
        assert moved.evaluate(xi)[0] == pytest.approx(np.exp(-2j * np.pi * 0.3 * 0.25) * base.evaluate(xi)[0])

    def test_scaled_evaluates_at_scaled_argument(self):
        base = SincPower((0.5,))
        xi = np.array([[0.7]])
        assert base.scaled(0.5).evaluate(xi)[0] == pytest.approx(base.evaluate(0.5 * xi)[0])

    def test_indicator_box_matches_closed_form(self):
        member = IndicatorBoxTransform((0.0,), shift=(0.4,))
        xi = np.array([0.3, -1.7, 2.25])
        np.testing.assert_allclose(member.evaluate(xi), cell_transform(xi, 0.4, 1.4), atol=1e-14)

    def test_discrete_interpolant_matches_cellwise_integral(self):
        coefficients = np.array([0.5, -1.0, 2.0, 0.25])
        dx = 0.25
        member = DiscreteInterpolant.from_image(coefficients, dx=dx)
        xi = np.array([0.37, 1.9, -3.3])
        expected = sum(c * cell_transform(xi, q * dx, (q + 1) * dx) for q, c in enumerate(coefficients))
        np.testing.assert_allclose(member.evaluate(xi), expected, atol=1e-14)

    def test_discrete_interpolant_mean(self):
        image = np.full((4, 4), 2.0)
        member = DiscreteInterpolant.from_image(image)
        assert member.dx == 0.25
        assert member.evaluate([0.0, 0.0])[0] == pytest.approx(2.0)

    def test_invalid_members(self):
        with pytest.raises(InvalidFamilyError):
            SincPower((0.0,), power=0)
        with pytest.raises(InvalidFamilyError):
            SincPower((np.nan,))
        with pytest.raises(DimensionMismatchError):
            DiscreteInterpolant((0.0,), coefficients=np.ones((2, 2)))


class TestFamily:
    def test_rejects_duplicates(self):
        with pytest.raises(InvalidFamilyError):
            FunctionFamily((SincPower((0.0,)), SincPower((0.0,))))

    def test_rejects_mixed_dimensions(self):
        with pytest.raises(InvalidFamilyError):
            FunctionFamily((SincPower((0.0,)), SincPower((0.0, 0.0))))

    def test_rejects_empty(self):
        with pytest.raises(InvalidFamilyError):
            FunctionFamily(())

    def test_batched_interpolants_match_members(self):
        rng = np.random.default_rng(0)
        family = FunctionFamily(tuple(DiscreteInterpolant.from_image(rng.random((5, 5))) for _ in range(3)))
        points = rng.normal(size=(20, 2))
        values = family.evaluate(points)
        for k, member in enumerate(family.members):
            np.testing.assert_allclose(values[:, k], member.evaluate(points), atol=1e-13)

    def test_eval_family_dilated(self):
        family = make_translates(SincPower((0.0,)), [[0.5]])
        np.testing.assert_allclose(eval_family_dilated(family, 2.0, [0.2]), eval_family(family, [0.4]))
        with pytest.raises(InvalidDomainError):
            eval_family_dilated(family, 0.5, [0.2])


class TestGenerators:
    def test_scalings(self):
        base = SincPower((0.0,))
        family = make_scalings(base, 2.0, 3)
        xi = np.array([[1.3]])
        for k in range(3):
            assert family.evaluate(xi)[0, k] == pytest.approx(base.evaluate(xi / 2.0**k)[0])

    def test_translates_start_with_base(self):
        base = SincPower((0.0,))
        assert make_translates(base, []).members == (base,)
        family = make_translates(base, [[0.25]])
        assert family.n == 2
        assert family.members[0] == base
        assert family.evaluate(np.array([[0.0]]))[0, 1] == pytest.approx(1.0)
        expected = np.exp(-0.25j * np.pi) * np.sinc(0.5) ** 2
        assert family.evaluate(np.array([[0.5]]))[0, 1] == pytest.approx(expected)

    def test_translates_reject_repeated_offsets(self):
        with pytest.raises(InvalidFamilyError):
            make_translates(SincPower((0.0,)), [[0.25], [0.25]])
        with pytest.raises(InvalidFamilyError):
            make_translates(SincPower((0.0,)), [[0.0]])

    @pytest.mark.parametrize("phase_scale", [1.0, -1.0, -2.0])
    def test_integer_translate_phases(self, phase_scale):
        base = SincPower((1.0,))
        family = make_integer_translates(base, [0, 1, 2], phase_scale=phase_scale)
        xi = np.array([[0.21]])
        for k in range(3):
            expected = np.exp(2j * np.pi * phase_scale * 0.21 * k) * base.evaluate(xi)[0]
            assert family.evaluate(xi)[0, k] == pytest.approx(expected)

    def test_integer_translates_need_one_dimension(self):
        with pytest.raises(DimensionMismatchError):
            make_integer_translates(SincPower((0.0, 0.0)), [0, 1])

    def test_tensor_grid_is_inclusive(self):
        points = tensor_grid(Cube(1, 0.5), 5)
        np.testing.assert_allclose(points[:, 0], [-0.5, -0.25, 0.0, 0.25, 0.5])

    def test_common_zero_detected(self):
        family = FunctionFamily((SincPower((0.0,)), SincPower((0.0,), power=4)))
        assert min_abs_sq_on_domain(family, Cube(1, 1.0), 65) < 1e-20
        assert min_abs_sq_on_domain(family, Cube(1, 0.5), 65) > 0.1
