"""Tests for smooth map trees and the forward-mode engine."""

import math

import numpy as np
import pytest

from dynbundle_cli.calculus.errors import ContractError, DomainError
from dynbundle_cli.calculus.smoothmap import (
    Cos,
    Exp,
    Input,
    Mul,
    Norm,
    Pow,
    Recip,
    Sin,
    TangentLift,
    approximation_ratios,
    bilinear,
    check_chain_rule,
    check_leibniz,
    compose,
    constant,
    coordinate,
    differential,
    evaluate,
    fd_oracle,
    fd_step,
    guarded,
    identity,
    jacobian,
    linear_map,
    second_differential,
    tupled,
    walk,
)


@pytest.fixture
def square():
    x = Input(1)
    return x * x


@pytest.fixture
def product_and_sum():
    x, y = coordinate(2, 0), coordinate(2, 1)
    return tupled(x * y, x + y)


class TestEvaluate:
    """Tests for evaluating expression trees."""

    def test_square(self, square):
        assert evaluate(square, [3.0]).tolist() == [9.0]

    def test_wrong_dimension(self, square):
        with pytest.raises(ContractError):
            evaluate(square, [1.0, 2.0])

    def test_non_finite_point(self, square):
        with pytest.raises(DomainError):
            evaluate(square, [math.nan])

    def test_recip_at_zero(self):
        with pytest.raises(DomainError):
            evaluate(Recip(Input(1)), [0.0])

    def test_norm_at_origin(self):
        with pytest.raises(DomainError):
            differential(Norm(Input(2)), [0.0, 0.0], [1.0, 0.0])

    def test_guard_refuses_inner_region(self):
        f = guarded(Input(2), radius=1.0)
        assert evaluate(f, [2.0, 0.0]).tolist() == [2.0, 0.0]
        with pytest.raises(DomainError):
            evaluate(f, [0.5, 0.0])

    def test_dimension_mismatch_rejected_at_build(self):
        with pytest.raises(ContractError):
            Input(2) + Input(3)
        with pytest.raises(ContractError):
            Mul(Input(2), Input(3))

    def test_negative_power_rejected(self):
        with pytest.raises(ContractError):
            Pow(Input(1), -1)

    def test_sugar_builds_equal_trees(self):
        x = Input(2)
        assert x * x == x * x
        assert (x - x) != (x + x)
        assert (2.0 * x) == (x * 2.0)

    def test_walk_visits_every_node(self, product_and_sum):
        names = [type(node).__name__ for node in walk(product_and_sum)]
        assert names[0] == "Tuple"
        assert names.count("Input") == 4


class TestDifferential:
    """Tests for first and second differentials."""

    def test_square(self, square):
        assert differential(square, [3.0], [1.0]).tolist() == [6.0]

    def test_second_differential_of_square(self, square):
        assert second_differential(square, [3.0], [1.0], [1.0]).tolist() == [2.0]

    def test_jacobian(self, product_and_sum):
        assert jacobian(product_and_sum, [2.0, 3.0]).tolist() == [[3.0, 2.0], [1.0, 1.0]]

    def test_linear_in_direction(self, rng):
        f = Sin(linear_map([[1.0, 2.0], [0.5, -1.0]])) * Exp(coordinate(2, 0))
        u = rng.standard_normal(2)
        a, b = rng.standard_normal((2, 2))
        lhs = differential(f, u, 2.0 * a - 3.0 * b).coords
        rhs = 2.0 * differential(f, u, a).coords - 3.0 * differential(f, u, b).coords
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_chain_rule(self, square):
        f = compose(Sin(Input(1)), square)
        assert differential(f, [1.0], [1.0])[0] == pytest.approx(2.0 * math.cos(1.0), abs=1e-14)

    def test_constant_and_identity(self, rng):
        u, e = rng.standard_normal((2, 3))
        assert differential(constant([1.0, 2.0], 3), u, e).tolist() == [0.0, 0.0]
        np.testing.assert_array_equal(differential(identity(3), u, e).coords, e)

    def test_second_differential_is_symmetric(self, rng):
        x0, x1 = coordinate(2, 0), coordinate(2, 1)
        f = tupled(Sin(x0 * x1), Exp(x0) * Cos(x1), Pow(x0 + x1, 3))
        for _ in range(10):
            u, e1, e2 = rng.standard_normal((3, 2))
            a = second_differential(f, u, e1, e2).coords
            b = second_differential(f, u, e2, e1).coords
            np.testing.assert_allclose(a, b, atol=1e-12)

    def test_lift_has_no_second_differential(self, square):
        lift = TangentLift(square)
        with pytest.raises(ContractError):
            second_differential(lift, [1.0, 1.0], [1.0, 0.0], [0.0, 1.0])


class TestFiniteDifferences:
    """Tests for the central-difference oracle."""

    def test_square(self, square):
        assert fd_oracle(square, [3.0], [1.0], h=1e-5)[0] == pytest.approx(6.0, abs=1e-9)

    def test_sin_at_zero(self):
        assert fd_oracle(Sin(Input(1)), [0.0], [1.0])[0] == pytest.approx(1.0, abs=1e-10)

    def test_step_scales_with_point(self):
        assert fd_step([0.1, 0.0]) == 1e-5
        assert fd_step([30.0, 40.0]) == pytest.approx(5e-4)

    def test_rejects_bad_step(self, square):
        with pytest.raises(ContractError):
            fd_oracle(square, [1.0], [1.0], h=0.0)

    def test_agrees_with_forward_mode(self, rng):
        f = tupled(Norm(Input(3)), Recip(coordinate(3, 0) + constant([4.0], 3)))
        for _ in range(20):
            u, e = rng.standard_normal((2, 3))
            ad = differential(f, u, e).coords
            fd = fd_oracle(f, u, e).coords
            np.testing.assert_allclose(ad, fd, rtol=1e-6, atol=1e-6)


class TestLeibnizAndApproximation:
    """Tests for the product rule and first-order approximation."""

    def test_scalar_product(self):
        x = Input(1)
        residual = check_leibniz(np.ones((1, 1, 1)), x, x * x, [2.0], [1.0])
        assert residual <= 1e-12

    def test_sin_cos(self):
        x = Input(1)
        residual = check_leibniz(np.ones((1, 1, 1)), Sin(x), Cos(x), [0.7], [1.0])
        assert residual <= 1e-10

    def test_dot_product_tensor(self, rng):
        t = np.eye(3)[None, :, :]
        f1 = Sin(Input(3))
        f2 = linear_map(rng.standard_normal((3, 3)))
        u, e = rng.standard_normal((2, 3))
        assert check_leibniz(t, f1, f2, u, e) <= 1e-12

    def test_chain_rule_nonlinear(self, rng):
        f = Sin(linear_map(rng.standard_normal((2, 3))))
        g = Mul(Input(2), Exp(0.5 * Input(2)))
        for _ in range(5):
            x, v = rng.standard_normal(3), rng.standard_normal(3)
            assert check_chain_rule(f, g, x, v) <= 1e-12

    def test_chain_rule_scalar(self):
        x = Input(1)
        assert check_chain_rule(x * x, Sin(x), [1.5], [2.0]) <= 1e-12

    def test_chain_rule_dimension_check(self):
        with pytest.raises(ContractError):
            check_chain_rule(Input(2), Input(3), [1.0, 2.0], [1.0, 0.0])

    def test_bilinear_dimension_check(self):
        with pytest.raises(ContractError):
            bilinear(np.ones((1, 2, 2)), Input(3), Input(3))

    def test_ratios_shrink_for_tangent_line(self):
        c = 0.5
        f = Sin(Input(1))
        g = constant([math.sin(c) - c * math.cos(c)], 1) + linear_map([[math.cos(c)]])
        ratios = approximation_ratios(f, g, [c], [1.0])
        assert len(ratios) == 5
        assert all(a > b for a, b in zip(ratios, ratios[1:]))

    def test_ratios_stall_for_wrong_slope(self):
        f = Sin(Input(1))
        g = linear_map([[2.0]])
        ratios = approximation_ratios(f, g, [0.0], [1.0])
        assert min(ratios) > 0.9
