"""Tests for difference quotients, gradients, norms, pairings, and set distances."""

import io

import numpy as np
import pytest

from maxops.functions import indicator, tent
from maxops.grid import SampledFunction, build_grid, sample
from maxops.sobolev import (
    VectorField,
    diff_quotient,
    dilate,
    gradient,
    hausdorff_distance,
    inner_product,
    lp_norm,
    set_distance,
    sobolev_norm,
    translate,
    write_vector_csv,
)


class TestDiffQuotient:
    def test_affine_function_is_exact(self):
        """The forward quotient of a x + b is a wherever the shift stays inside."""
        g = build_grid(0.0, 0.1, 21)
        f = sample(lambda x: 3.0 * x + 1.0, g)
        d = diff_quotient(f, 0, 1)
        np.testing.assert_allclose(d.values[:-1], 3.0, atol=1e-12)

    def test_square_function_value(self):
        """(f(x+h) - f(x))/h = 2x + h for f = x^2; at x = 1, h = 0.1 gives 2.1."""
        g = build_grid(0.0, 0.1, 21)
        f = sample(lambda x: x**2, g)
        d = diff_quotient(f, 0, 1)
        i = g.index_of(1.0)[0]
        assert d.values[i] == pytest.approx(2.1, abs=1e-12)

    def test_multiple_step(self):
        g = build_grid(0.0, 0.1, 21)
        f = sample(lambda x: x**2, g)
        d = diff_quotient(f, 0, 3)
        i = g.index_of(1.0)[0]
        # (f(1.3) - f(1)) / 0.3 = 2.3
        assert d.values[i] == pytest.approx(2.3, abs=1e-12)

    def test_zero_extension_past_the_hull(self):
        g = build_grid(0.0, 1.0, 3)
        f = SampledFunction(g, np.array([1.0, 1.0, 4.0]))
        d = diff_quotient(f, 0, 1)
        assert d.values[-1] == pytest.approx((0.0 - 4.0) / 1.0)

    def test_step_validation(self):
        g = build_grid(0.0, 1.0, 5)
        f = SampledFunction(g, np.zeros(5))
        with pytest.raises(ValueError):
            diff_quotient(f, 0, 0)
        with pytest.raises(ValueError):
            diff_quotient(f, 0, 5)
        with pytest.raises(ValueError):
            diff_quotient(f, 1, 1)  # no second axis

    def test_second_axis_in_2d(self):
        g = build_grid((0.0, 0.0), 0.5, (4, 4))
        f = sample(lambda x, y: y, g)
        d = diff_quotient(f, 1, 1)
        np.testing.assert_allclose(d.values[:, :-1], 1.0, atol=1e-12)


class TestTranslate:
    def test_shift_moves_support(self):
        g = build_grid(0.0, 1.0, 5)
        f = SampledFunction(g, np.array([1.0, 2.0, 3.0, 4.0, 5.0]))
        t = translate(f, 0, 2)
        np.testing.assert_array_equal(t.values, [0.0, 0.0, 1.0, 2.0, 3.0])

    def test_negative_shift(self):
        g = build_grid(0.0, 1.0, 5)
        f = SampledFunction(g, np.array([1.0, 2.0, 3.0, 4.0, 5.0]))
        t = translate(f, 0, -1)
        np.testing.assert_array_equal(t.values, [2.0, 3.0, 4.0, 5.0, 0.0])

    def test_zero_shift_is_identity(self):
        rng = np.random.default_rng(2)
        g = build_grid(0.0, 0.5, 8)
        f = SampledFunction(g, rng.standard_normal(8))
        assert np.array_equal(translate(f, 0, 0).values, f.values)

    def test_composition(self):
        """Translating by a then b equals translating by a + b (supports inside)."""
        g = build_grid(0.0, 1.0, 12)
        f = SampledFunction(g, np.eye(12)[3])
        lhs = translate(translate(f, 0, 2), 0, 3)
        rhs = translate(f, 0, 5)
        assert np.array_equal(lhs.values, rhs.values)

    def test_excessive_shift_rejected(self):
        g = build_grid(0.0, 1.0, 5)
        f = SampledFunction(g, np.zeros(5))
        with pytest.raises(ValueError):
            translate(f, 0, 5)


class TestGradient:
    def test_linear_function_exact(self):
        g = build_grid((0.0, 0.0), 0.25, (9, 9))
        f = sample(lambda x, y: 2.0 * x - 3.0 * y, g)
        vf = gradient(f)
        np.testing.assert_allclose(vf.component(0).values, 2.0, atol=1e-12)
        np.testing.assert_allclose(vf.component(1).values, -3.0, atol=1e-12)
        np.testing.assert_allclose(
            vf.magnitude().values, np.sqrt(13.0), atol=1e-12
        )

    def test_sine_interior_accuracy(self):
        """Centered differences are second order: error ~ h^2 for sin."""
        g = build_grid(0.0, 0.001, 2001)
        f = sample(lambda x: np.sin(x), g)
        d = gradient(f).component(0).values
        xs = g.axis_coords(0)
        err = np.abs(d[1:-1] - np.cos(xs[1:-1]))
        assert err.max() < 1e-4

    def test_centered_is_mean_of_one_sided(self):
        """In the interior the centered quotient is the exact mean of the
        forward quotient and the backward quotient."""
        rng = np.random.default_rng(6)
        g = build_grid(0.0, 0.5, 50)
        f = SampledFunction(g, rng.standard_normal(50))
        centered = gradient(f).component(0).values[1:-1]
        forward = diff_quotient(f, 0, 1).values[1:-1]
        h = g.spacing
        backward = (f.values[1:-1] - f.values[:-2]) / h
        np.testing.assert_allclose(centered, 0.5 * (forward + backward), rtol=1e-12)

    def test_one_sided_at_faces(self):
        g = build_grid(0.0, 1.0, 4)
        f = SampledFunction(g, np.array([0.0, 2.0, 6.0, 12.0]))
        d = gradient(f).component(0).values
        assert d[0] == pytest.approx(2.0)
        assert d[-1] == pytest.approx(6.0)

    def test_needs_three_nodes(self):
        g = build_grid(0.0, 1.0, 2)
        f = SampledFunction(g, np.zeros(2))
        with pytest.raises(ValueError):
            gradient(f)

    def test_vector_field_validation(self):
        g = build_grid(0.0, 1.0, 4)
        with pytest.raises(ValueError):
            VectorField(g, np.zeros((4, 2)))  # wrong component count


class TestLpNorm:
    def test_indicator_mass(self):
        """The L^1 norm of an indicator approximates its support length."""
        g = build_grid(-2.0, 0.01, 401)
        f = sample(indicator(0.5, 0.5), g)
        assert lp_norm(f, 1.0) == pytest.approx(1.0, abs=2 * 0.01)

    def test_l2_of_known_function(self):
        g = build_grid(-1.0, 0.0005, 4001)
        f = sample(tent(0.0, 1.0), g)
        assert lp_norm(f, 2.0) == pytest.approx(np.sqrt(2.0 / 3.0), abs=1e-3)

    def test_exponent_below_one_rejected(self):
        g = build_grid(0.0, 1.0, 3)
        f = SampledFunction(g, np.ones(3))
        with pytest.raises(ValueError, match=">= 1"):
            lp_norm(f, 0.5)

    def test_p_one_allowed(self):
        g = build_grid(0.0, 1.0, 3)
        f = SampledFunction(g, np.array([1.0, -2.0, 3.0]))
        assert lp_norm(f, 1.0) == pytest.approx(6.0)

    def test_masked_norm(self):
        g = build_grid(0.0, 1.0, 4)
        f = SampledFunction(g, np.array([1.0, 2.0, 3.0, 4.0]))
        mask = np.array([True, False, False, True])
        assert lp_norm(f, 2.0, mask=mask) == pytest.approx(np.sqrt(17.0))
        with pytest.raises(ValueError):
            lp_norm(f, 2.0, mask=np.ones(3, dtype=bool))

    def test_monotone_in_the_integrand(self):
        rng = np.random.default_rng(12)
        g = build_grid(0.0, 0.1, 100)
        a = rng.standard_normal(100)
        f = SampledFunction(g, a)
        bigger = SampledFunction(g, np.abs(a) + rng.uniform(0, 1, 100))
        for p in (1.0, 2.0, 3.5):
            assert lp_norm(f, p) <= lp_norm(bigger, p) + 1e-15

    def test_homogeneous(self):
        rng = np.random.default_rng(13)
        g = build_grid(0.0, 0.1, 64)
        f = SampledFunction(g, rng.standard_normal(64))
        for c in (-2.0, 0.5, 3.0):
            scaled = SampledFunction(g, c * f.values)
            assert lp_norm(scaled, 2.0) == pytest.approx(abs(c) * lp_norm(f, 2.0), rel=1e-12)


class TestSobolevNorm:
    def test_tent_value(self):
        """For the unit tent: ||f||_2 = sqrt(2/3), ||f'||_2 = sqrt(2)."""
        g = build_grid(-2.0, 0.001, 4001)
        f = sample(tent(0.0, 1.0), g)
        expected = np.sqrt(2.0 / 3.0) + np.sqrt(2.0)
        assert sobolev_norm(f, 2.0) == pytest.approx(expected, rel=0.01)

    def test_translation_invariance(self):
        """Shifting a compactly supported function preserves the norm."""
        g = build_grid(-6.0, 0.01, 1201)
        f = sample(tent(0.0, 1.0), g)
        shifted = translate(f, 0, 200)  # move by 2.0
        assert sobolev_norm(shifted, 2.0) == pytest.approx(sobolev_norm(f, 2.0), rel=1e-12)


class TestInnerProduct:
    def test_matches_l2_norm(self):
        rng = np.random.default_rng(14)
        g = build_grid(0.0, 0.1, 80)
        f = SampledFunction(g, rng.standard_normal(80))
        assert inner_product(f, f) == pytest.approx(lp_norm(f, 2.0) ** 2, rel=1e-12)

    def test_orthogonal_supports(self):
        g = build_grid(-2.0, 0.01, 401)
        f = sample(indicator(-1.0, 0.5), g)
        h = sample(indicator(1.0, 0.5), g)
        assert inner_product(f, h) == 0.0

    def test_grid_mismatch_rejected(self):
        f = SampledFunction(build_grid(0.0, 1.0, 3), np.ones(3))
        h = SampledFunction(build_grid(0.0, 0.5, 3), np.ones(3))
        with pytest.raises(ValueError):
            inner_product(f, h)

    def test_masked_pairing(self):
        g = build_grid(0.0, 1.0, 4)
        f = SampledFunction(g, np.array([1.0, 2.0, 3.0, 4.0]))
        one = SampledFunction(g, np.ones(4))
        mask = np.array([False, True, True, False])
        assert inner_product(f, one, mask=mask) == pytest.approx(5.0)


class TestSetDistances:
    def test_point_to_set(self):
        pts = np.array([0.0, 1.0, 3.0])
        assert set_distance(2.0, pts) == pytest.approx(1.0)
        assert set_distance(1.0, pts) == 0.0

    def test_point_to_set_2d(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0]])
        assert set_distance((1.0, 0.0), pts) == pytest.approx(1.0)

    def test_dilate(self):
        pts = np.array([[1.0, -2.0], [0.5, 0.0]])
        np.testing.assert_allclose(dilate(pts, 2.0), [[2.0, -4.0], [1.0, 0.0]])

    def test_hausdorff_singletons(self):
        assert hausdorff_distance(np.array([0.0]), np.array([1.0])) == pytest.approx(1.0)

    def test_hausdorff_asymmetric_cover(self):
        """One-sided containment is not enough: the larger set drives it."""
        a = np.array([0.0, 1.0])
        b = np.array([0.0, 1.0, 5.0])
        assert hausdorff_distance(a, b) == pytest.approx(4.0)

    def test_hausdorff_metric_properties(self):
        rng = np.random.default_rng(15)
        for _ in range(25):
            a = rng.uniform(-5, 5, size=(rng.integers(1, 8), 2))
            b = rng.uniform(-5, 5, size=(rng.integers(1, 8), 2))
            c = rng.uniform(-5, 5, size=(rng.integers(1, 8), 2))
            dab = hausdorff_distance(a, b)
            assert dab == pytest.approx(hausdorff_distance(b, a))
            assert hausdorff_distance(a, a) == 0.0
            assert dab <= hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-12

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            hausdorff_distance(np.array([0.0]), np.array([[0.0, 1.0]]))
        with pytest.raises(ValueError):
            set_distance((0.0, 0.0), np.array([1.0, 2.0]))

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            set_distance(0.0, np.array([]))


class TestVectorCsv:
    def test_header_and_rows_1d(self):
        g = build_grid(0.0, 0.5, 3)
        f = sample(lambda x: x**2, g)
        buf = io.StringIO()
        write_vector_csv(gradient(f), buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "x,d1"
        assert len(lines) == 4

    def test_header_2d(self):
        g = build_grid((0.0, 0.0), 0.5, (3, 3))
        f = sample(lambda x, y: x * y, g)
        buf = io.StringIO()
        write_vector_csv(gradient(f), buf)
        assert buf.getvalue().splitlines()[0] == "x,y,d1,d2"
