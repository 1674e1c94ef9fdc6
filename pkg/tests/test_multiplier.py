"""Tests for Sigma-multipliers against closed forms."""

import numpy as np
import pytest

from src.sigma_extrapolation.domain import Cube
from src.sigma_extrapolation.errors import (
    DimensionMismatchError,
    InvalidDomainError,
    NotHermitianError,
)
from src.sigma_extrapolation.family import (
    FunctionFamily,
    SincPower,
    make_integer_translates,
    make_translates,
    tensor_grid,
)
from src.sigma_extrapolation.hermitian import HermitianMatrix
from src.sigma_extrapolation.multiplier import (
    SigmaMultiplier,
    average_case_multiplier,
    eval_multiplier,
    eval_on_nodes,
    single_function_multiplier,
    trace_multiplier,
)


def sinc_ratio(xi, alpha):
    return np.sinc(alpha * xi) ** 2 / np.sinc(xi) ** 2


def two_scale_symbol(xi):
    """Transform of the filter (1/4, 1/2, 1/4) on taps 0, 1, 2."""
    return ((1.0 + np.exp(-2j * np.pi * xi)) / 2.0) ** 2


class TestSingleFunction:
    """One member: every Sigma gives m = f(alpha xi) / f(xi)."""

    @pytest.mark.parametrize("delta", [0.0, 0.1])
    def test_sinc_squared_extrapolates_exactly(self, delta):
        family = FunctionFamily((SincPower((0.0,)),))
        mult = SigmaMultiplier(family, 2.0, HermitianMatrix([[3.0]]), delta=delta)
        nodes = tensor_grid(Cube(1, 0.5), 2048)
        f = family.members[0]
        predicted = mult(nodes) * f.evaluate(nodes)
        truth = f.evaluate(2.0 * nodes)
        assert np.linalg.norm(predicted - truth) / np.linalg.norm(truth) <= 1e-8

    def test_translated_member_gains_linear_phase(self):
        x0 = 0.25
        alpha = 3.0
        family = FunctionFamily((SincPower((x0,)),))
        mult = single_function_multiplier(family, alpha)
        xi = np.linspace(-0.3, 0.3, 512)
        expected = np.exp(-2j * np.pi * (alpha - 1) * xi * x0) * sinc_ratio(xi, alpha)
        np.testing.assert_allclose(mult(xi), expected, atol=1e-10)

    def test_single_function_selects_member(self):
        family = make_translates(SincPower((0.0,)), [[0.5]])
        mult = single_function_multiplier(family, 2.0, index=1)
        xi = np.array([0.1, 0.2])
        expected = np.exp(-2j * np.pi * xi * 0.5) * sinc_ratio(xi, 2.0)
        np.testing.assert_allclose(mult(xi), expected, atol=1e-12)


class TestTraceMultiplier:
    def test_translates_closed_form(self):
        alpha = 2.0
        family = make_translates(SincPower((0.0,)), [[0.2], [0.4]])
        assert family.n == 3
        xi = np.linspace(-0.5, 0.5, 512)
        phases = sum(np.exp(-2j * np.pi * (alpha - 1) * xi * x) for x in (0.0, 0.2, 0.4)) / 3
        values = trace_multiplier(family, alpha, xi)
        np.testing.assert_allclose(values, phases * sinc_ratio(xi, alpha), atol=1e-10)
        identity = SigmaMultiplier(family, alpha, HermitianMatrix.identity(3), delta=0.0)
        np.testing.assert_allclose(values, identity(xi), atol=1e-12)

    def test_scalar_and_array_forms_agree(self):
        family = make_translates(SincPower((0.0,)), [[0.3]])
        nodes = np.array([[0.1], [0.35]])
        values = trace_multiplier(family, 2.0, nodes)
        assert trace_multiplier(family, 2.0, [0.35]) == pytest.approx(values[1])
        np.testing.assert_allclose(eval_on_nodes(SigmaMultiplier(family, 2.0, HermitianMatrix.identity(2)), nodes), values)


class TestAverageCase:
    family = make_translates(SincPower((0.0,)), [[0.3]])
    nodes = np.linspace(-0.5, 0.5, 101).reshape(-1, 1)

    def test_identity_covariance_is_trace_multiplier(self):
        mult = average_case_multiplier(self.family, 2.0, HermitianMatrix.identity(2))
        np.testing.assert_allclose(mult(self.nodes), trace_multiplier(self.family, 2.0, self.nodes), atol=1e-14)

    def test_covariance_scale_does_not_matter(self):
        small = average_case_multiplier(self.family, 2.0, HermitianMatrix.diagonal([2.0, 1.0]))
        large = average_case_multiplier(self.family, 2.0, HermitianMatrix.diagonal([6.0, 3.0]))
        np.testing.assert_allclose(small(self.nodes), large(self.nodes), rtol=1e-12)


class TestMaskRecovery:
    """Integer translates of the shifted B-spline with Sigma = diag(h) reproduce two-scale masks."""

    sigma = HermitianMatrix.diagonal([0.25, 0.5, 0.25])
    base = SincPower((1.0,), power=2)
    nodes = tensor_grid(Cube(1, 0.5), 1024)

    def multiplier(self, phase_scale):
        family = make_integer_translates(self.base, [0, 1, 2], phase_scale=phase_scale)
        return SigmaMultiplier(family, 2.0, self.sigma)

    def test_reversed_phases_give_squared_modulus(self):
        xi = self.nodes[:, 0]
        np.testing.assert_allclose(self.multiplier(1.0)(self.nodes), np.abs(two_scale_symbol(xi)) ** 2, atol=1e-10)

    def test_plain_translates_give_squared_symbol(self):
        xi = self.nodes[:, 0]
        np.testing.assert_allclose(self.multiplier(-1.0)(self.nodes), two_scale_symbol(xi) ** 2, atol=1e-10)

    def test_doubled_translates_refine_twice(self):
        xi = self.nodes[:, 0]
        m = self.multiplier(-2.0)(self.nodes)
        np.testing.assert_allclose(m, two_scale_symbol(xi) * two_scale_symbol(2 * xi), atol=1e-10)
        np.testing.assert_allclose(
            m * self.base.evaluate(self.nodes), self.base.evaluate(4.0 * self.nodes), atol=1e-10
        )


class TestFlooring:
    def test_common_zero_is_floored(self):
        family = FunctionFamily((SincPower((0.0,)),))
        mult = SigmaMultiplier(family, 2.0, HermitianMatrix([[1.0]]))
        sample = mult.evaluate_with_floor_count(np.array([[1.0]]))
        assert sample.floor_events == 1
        assert sample.values[1] == 0
        assert sample.values[0] == pytest.approx(1.0)

    def test_probe_floor_is_fixed(self):
        family = FunctionFamily((SincPower((0.0,)),))
        mult = SigmaMultiplier(family, 2.0, HermitianMatrix([[1.0]])).with_probe_floor(Cube(1, 0.5))
        assert mult.denominator_floor == pytest.approx(1e-14)
        assert eval_multiplier(mult, [0.25]) == pytest.approx(sinc_ratio(0.25, 2.0))

    def test_floor_does_not_depend_on_batch(self):
        family = FunctionFamily((SincPower((0.0,)),))
        mult = SigmaMultiplier(family, 2.0, HermitianMatrix([[1.0]]))
        nodes = np.array([[0.0], [1.0 - 1e-4], [1.0 - 1e-8]])
        bulk = eval_on_nodes(mult, nodes)
        single = np.array([eval_multiplier(mult, node) for node in nodes])
        assert np.array_equal(bulk, single)
        assert bulk[1] == pytest.approx(sinc_ratio(1.0 - 1e-4, 2.0), rel=1e-6)

    def test_grid_matches_pointwise(self):
        family = FunctionFamily((SincPower((0.0,)),))
        mult = SigmaMultiplier(family, 2.0, HermitianMatrix([[1.0]]))
        nodes = tensor_grid(Cube(1, 1.0), 100)
        single = np.array([eval_multiplier(mult, node) for node in nodes])
        assert np.array_equal(eval_on_nodes(mult, nodes), single)

    def test_empty_node_set(self):
        family = FunctionFamily((SincPower((0.0,)),))
        mult = SigmaMultiplier(family, 2.0, HermitianMatrix([[1.0]]))
        assert eval_on_nodes(mult, np.zeros((0, 1))).shape == (0,)


class TestValidation:
    family = make_translates(SincPower((0.0,)), [[0.5]])

    def test_indefinite_sigma(self):
        with pytest.raises(NotHermitianError):
            SigmaMultiplier(self.family, 2.0, HermitianMatrix.diagonal([1.0, -1.0]))

    def test_sigma_size(self):
        with pytest.raises(DimensionMismatchError):
            SigmaMultiplier(self.family, 2.0, HermitianMatrix.identity(3))

    def test_alpha(self):
        with pytest.raises(InvalidDomainError):
            SigmaMultiplier(self.family, 1.0, HermitianMatrix.identity(2))

    def test_negative_delta(self):
        with pytest.raises(ValueError):
            SigmaMultiplier(self.family, 2.0, HermitianMatrix.identity(2), delta=-1.0)
