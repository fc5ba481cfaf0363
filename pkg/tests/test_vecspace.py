"""Tests for vectors, norms, metrics and inner products."""

import math

import numpy as np
import pytest

from dynbundle_cli.calculus.errors import ContractError, DomainError
from dynbundle_cli.calculus.vecspace import (
    InnerProduct,
    NormSpec,
    Vector,
    check_metric_axioms,
    check_norm_axioms,
    inner,
    metric,
    norm,
)


class TestVector:
    """Tests for the Vector value type."""

    def test_rejects_empty(self):
        with pytest.raises(ContractError):
            Vector([])

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            Vector([1.0, math.nan])
        with pytest.raises(DomainError):
            Vector([math.inf])

    def test_is_immutable(self):
        v = Vector.of(1.0, 2.0)
        with pytest.raises(ValueError):
            v.coords[0] = 5.0

    def test_arithmetic(self):
        a, b = Vector.of(1.0, 2.0), Vector.of(3.0, 5.0)
        assert a + b == Vector.of(4.0, 7.0)
        assert b - a == Vector.of(2.0, 3.0)
        assert 2 * a == Vector.of(2.0, 4.0)
        assert -a == Vector.of(-1.0, -2.0)

    def test_mismatched_dimensions(self):
        with pytest.raises(ContractError):
            Vector.of(1.0) + Vector.of(1.0, 2.0)

    def test_basis_concat_split(self):
        v = Vector.concat(Vector.basis(2, 1), Vector.zeros(1))
        assert v.tolist() == [0.0, 1.0, 0.0]
        head, tail = v.split(2, 1)
        assert head == Vector.of(0.0, 1.0)
        assert tail == Vector.of(0.0)
        with pytest.raises(ContractError):
            v.split(2, 2)


class TestNorm:
    """Tests for norm and metric."""

    def test_euclidean_three_four_five(self):
        assert norm([3.0, 4.0]) == 5.0

    @pytest.mark.parametrize("spec", [NormSpec.euclidean(), NormSpec.p_norm(1), NormSpec.max_norm()])
    def test_zero_vector(self, spec):
        assert norm([0.0, 0.0, 0.0], spec) == 0.0

    def test_unit_vector(self):
        assert norm([1.0, 0.0, 0.0]) == 1.0

    def test_p_and_max(self):
        assert norm([3.0, -4.0], NormSpec.p_norm(1)) == 7.0
        assert norm([3.0, -4.0], NormSpec.max_norm()) == 4.0

    def test_non_finite_input(self):
        with pytest.raises(DomainError):
            norm(np.array([1.0, np.inf]))

    def test_p_below_one_rejected(self):
        with pytest.raises(ContractError):
            NormSpec.p_norm(0.5)
        assert NormSpec.pseudo(0.5).p == 0.5

    def test_metric_examples(self):
        assert metric([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert metric([1.0, 0.0], [0.0, 1.0]) == pytest.approx(math.sqrt(2.0), rel=1e-15)

    def test_metric_dimension_mismatch(self):
        with pytest.raises(ContractError):
            metric([1.0], [1.0, 2.0])

    def test_homogeneity(self, rng):
        for _ in range(50):
            v = rng.standard_normal(4)
            lam = rng.uniform(-10, 10)
            assert norm(lam * v) == pytest.approx(abs(lam) * norm(v), rel=1e-12)

    def test_translation_invariance(self, rng):
        for _ in range(50):
            x, y, a = rng.standard_normal((3, 3))
            assert metric(x + a, y + a) == pytest.approx(metric(x, y), rel=1e-9, abs=1e-12)


class TestInnerProduct:
    """Tests for inner products and gram validation."""

    def test_identity_gram(self):
        assert inner([1.0, 2.0], [3.0, 4.0], InnerProduct.identity(2)) == 11.0
        assert inner([1.0, 2.0], [3.0, 4.0]) == 11.0

    def test_zero_and_symmetry(self, rng):
        ip = InnerProduct.from_matrix([[2.0, 0.5], [0.5, 1.0]])
        assert inner([1.0, 7.0], [0.0, 0.0], ip) == 0.0
        for _ in range(20):
            x, y = rng.standard_normal((2, 2))
            assert inner(x, y, ip) == pytest.approx(inner(y, x, ip), rel=1e-15)

    def test_induced_norm(self, rng):
        ip = InnerProduct.identity(3)
        x = rng.standard_normal(3)
        assert ip.induced_norm(x) ** 2 == pytest.approx(norm(x) ** 2, rel=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(ContractError):
            InnerProduct.from_matrix([[1.0, 0.1], [0.0, 1.0]])

    def test_rejects_indefinite(self):
        with pytest.raises(ContractError):
            InnerProduct.from_matrix([[1.0, 0.0], [0.0, -1.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            inner([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], InnerProduct.identity(2))


class TestAxiomCheckers:
    """Tests for the seeded axiom batteries."""

    def test_euclidean_norm_passes(self):
        report = check_norm_axioms(NormSpec.euclidean(), 1000, seed=1)
        assert report.ok
        assert report.trials == 1000

    def test_quasi_norm_breaks_triangle(self):
        report = check_norm_axioms(NormSpec.pseudo(0.5), 50, seed=1)
        assert not report.ok
        assert any(v.axiom == "N3" for v in report.violations)

    def test_single_sample(self):
        assert check_norm_axioms(NormSpec.max_norm(), 1, seed=3).trials == 1

    def test_zero_samples_rejected(self):
        with pytest.raises(ContractError):
            check_norm_axioms(NormSpec.euclidean(), 0, seed=0)

    @pytest.mark.parametrize("spec", [NormSpec.euclidean(), NormSpec.p_norm(1), NormSpec.p_norm(2.5), NormSpec.max_norm()])
    def test_metric_axioms_hold(self, spec):
        report = check_metric_axioms(spec, 200, seed=5)
        assert report.ok, report.to_dict()

    def test_reports_are_reproducible(self):
        a = check_norm_axioms(NormSpec.pseudo(0.5), 30, seed=9).to_dict()
        b = check_norm_axioms(NormSpec.pseudo(0.5), 30, seed=9).to_dict()
        assert a == b
