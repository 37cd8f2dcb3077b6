import numpy as np
import pytest

from app.services.stability import (
    SECTION_COORDINATES,
    ReturnMap,
    fixed_point_stability,
    jacobian_central,
    jacobian_forward,
    return_map,
)
from app.utils.exceptions import AnalysisError, ConfigurationError


def _contraction(x):
    return 0.5 * np.asarray(x) + 1.0


def _nonlinear(x):
    x = np.asarray(x, dtype=float)
    return np.array([0.4 * np.sin(x[0]) + 0.1 * x[1] ** 2, 0.2 * x[0] * x[1] - 0.3 * x[1]])


class TestFixedPoint:
    def test_scalar_contraction(self):
        result = fixed_point_stability(_contraction, [0.0])
        assert result.fixed_point[0] == pytest.approx(2.0, abs=1e-6)
        assert result.spectral_radius == pytest.approx(0.5, abs=1e-6)
        assert result.stable
        assert result.residual < 1e-8
        assert result.coordinates == ["x0"]

    def test_planar_map(self):
        matrix = np.array([[0.3, 0.1], [0.0, -0.6]])

        def stride_map(x):
            return matrix @ np.asarray(x) + np.array([1.0, 0.5])

        result = fixed_point_stability(stride_map, [0.0, 0.0], coordinates=["a", "b"])
        assert result.eigenvalue_moduli == pytest.approx([0.6, 0.3], abs=1e-6)
        assert np.allclose(result.jacobian, matrix, atol=1e-6)

    def test_complex_pair_moduli_recovered(self):
        # rotation-scaling block with eigenvalues 0.5 ± 0.5i next to a real 0.2
        matrix = np.array([[0.5, -0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.1, 0.2]])
        offset = np.array([0.3, -0.2, 0.1])

        def stride_map(x):
            return matrix @ np.asarray(x) + offset

        result = fixed_point_stability(stride_map, [0.0, 0.0, 0.0])
        expected = np.linalg.solve(np.eye(3) - matrix, offset)
        assert np.allclose(result.fixed_point, expected, atol=1e-6)
        assert result.eigenvalue_moduli == pytest.approx(
            [np.sqrt(0.5), np.sqrt(0.5), 0.2], abs=1e-6
        )
        assert result.stable

    def test_unstable_map_reported(self):
        # fixed point at 2.0 with slope -1.5; full damping never settles, 0.3 does
        result = fixed_point_stability(lambda x: -1.5 * np.asarray(x) + 5.0, [1.0], damping=0.3)
        assert result.fixed_point[0] == pytest.approx(2.0, abs=1e-6)
        assert result.spectral_radius == pytest.approx(1.5, abs=1e-6)
        assert not result.stable

    def test_forward_scheme_selected(self):
        result = fixed_point_stability(_contraction, [0.0], scheme="forward")
        assert result.spectral_radius == pytest.approx(0.5, abs=1e-6)

    def test_unknown_scheme_rejected(self):
        with pytest.raises(ConfigurationError, match="difference scheme"):
            fixed_point_stability(_contraction, [0.0], scheme="backward")

    def test_history_records_residuals(self):
        result = fixed_point_stability(_contraction, [0.0])
        assert len(result.history) == result.iterations
        assert result.history[-1] == result.residual

    def test_budget_exhausted(self):
        with pytest.raises(AnalysisError) as info:
            fixed_point_stability(_contraction, [0.0], max_iterations=2)
        assert len(info.value.history) == 2

    def test_divergence(self):
        with pytest.raises(AnalysisError, match="diverged"):
            fixed_point_stability(lambda x: np.full(1, np.nan), [0.0])


class TestJacobians:
    def test_central_difference_is_exact_for_affine_maps(self):
        jac = jacobian_central(_contraction, np.array([3.0]), 1e-6)
        assert jac[0, 0] == pytest.approx(0.5, abs=1e-8)

    def test_forward_agrees_with_central(self):
        point = np.array([0.3, -0.7])
        forward = jacobian_forward(_nonlinear, point, 1e-7)
        central = jacobian_central(_nonlinear, point, 1e-6)
        assert np.allclose(forward, central, atol=1e-5)

    def test_central_matches_analytic(self):
        x0, x1 = 0.3, -0.7
        analytic = np.array(
            [[0.4 * np.cos(x0), 0.2 * x1], [0.2 * x1, 0.2 * x0 - 0.3]]
        )
        central = jacobian_central(_nonlinear, np.array([x0, x1]), 1e-6)
        assert np.allclose(central, analytic, atol=1e-8)


class TestReturnMap:
    def test_template_section_shape(self, params, options, short_trace):
        stride_map = ReturnMap.from_trace(params, short_trace, options)
        section = stride_map.template_section
        assert section.shape == (len(SECTION_COORDINATES),)
        assert np.all(np.isfinite(section))

    def test_reconstruct_preserves_section(self, params, options, short_trace):
        stride_map = ReturnMap.from_trace(params, short_trace, options)
        section = stride_map.template_section
        state = stride_map.reconstruct(section)
        assert state.vx == section[0]
        assert state.y == section[2]

    def test_deterministic(self, params, options, short_trace):
        stride_map = ReturnMap.from_trace(params, short_trace, options)
        section = stride_map.template_section
        first = return_map(params, section, stride_map.template, options)
        second = return_map(params, section, stride_map.template, options)
        assert np.all(np.isfinite(first))
        assert np.array_equal(first, second)

    def test_one_stride_lands_near_the_gait(self, params, options, short_trace):
        stride_map = ReturnMap.from_trace(params, short_trace, options)
        section = stride_map.template_section
        image = stride_map(section)
        assert abs(image[0] - section[0]) < 0.1
