"""
Tests for monotone dilations.
"""

import logging

import numpy as np
import pytest

from dilatoo.constructions import (
    ConditionSpec,
    Triangle,
    economical_monotone_family,
    get_construction,
    hermitian_monotone_family,
    monotone_family,
    monotone_pair,
    numerical_range_pair,
)
from dilatoo.constructions.monotone import (
    check_bridge_commutation,
    choose_triangle,
    dilate_bridge,
    dilate_diag,
    dilate_ones,
    essential_lift,
    lift_embedding,
    scalar_normal_dilation,
)
from dilatoo.core.errors import (
    ContainmentError,
    DilationError,
    DimensionMismatch,
    PreconditionViolated,
)
from dilatoo.core.result import MonotoneFamilyResult
from dilatoo.core.tolerance import TolerancePolicy
from dilatoo.utils.data import random_hermitian, random_positive, random_strictly_positive
from dilatoo.verify import is_monotone_family


class TestConditionSpec:
    """Tests for the ConditionSpec class."""

    def test_counts(self):
        """Test k, k' and k'' for (2, 3)."""
        spec = ConditionSpec((2, 3))
        assert spec.n == 2
        assert spec.total == 6
        assert [spec.k(j) for j in range(3)] == [1, 2, 3]
        assert [spec.k_prime(j) for j in range(3)] == [1, 1, 2]
        assert [spec.k_double_prime(j) for j in range(3)] == [6, 3, 1]
        for j in range(3):
            assert spec.k_prime(j) * spec.k(j) * spec.k_double_prime(j) == spec.total

    def test_parse(self):
        """Test parsing comma separated counts."""
        assert ConditionSpec.parse("2,3") == ConditionSpec((2, 3))
        assert ConditionSpec.parse(" ").ks == ()
        assert ConditionSpec.parse("4").total == 4

        with pytest.raises(DilationError):
            ConditionSpec.parse("2,x")

    def test_invalid(self):
        """Test invalid counts and indices."""
        with pytest.raises(DilationError):
            ConditionSpec((0,))

        with pytest.raises(DilationError):
            ConditionSpec((2,)).k(2)


class TestTriangle:
    """Tests for the Triangle class."""

    def test_barycentric(self):
        """Test barycentric coordinates of a vertex and the centroid."""
        t = Triangle(1 + 1j, 2 + 2j, 3 + 4j)
        assert np.allclose(t.barycentric(2 + 2j), [0, 1, 0])
        centroid = t.vertices.mean()
        assert np.allclose(t.barycentric(centroid), [1 / 3, 1 / 3, 1 / 3])
        assert t.contains(centroid)
        assert not t.contains(10 + 1j)

    def test_invalid(self):
        """Test the ordering and quadrant requirements."""
        with pytest.raises(DilationError):
            Triangle(1 + 1j, 3 + 2j, 2 + 4j)

        with pytest.raises(DilationError):
            Triangle(-1 + 1j, 2 + 2j, 3 + 4j)

    def test_choose_triangle(self):
        """Test the chosen triangle contains the points."""
        points = [1 + 1j, 2 + 3j, 1.5 + 0.5j]
        t = choose_triangle(points)
        assert all(t.contains(z, 1e-12) for z in points)

        with pytest.raises(PreconditionViolated):
            choose_triangle([-1 + 1j])

        with pytest.raises(DilationError):
            choose_triangle([])

    def test_scalar_normal_dilation(self):
        """Test a 3x3 normal matrix with the vertices as spectrum and z in the corner."""
        t = choose_triangle([1 + 1j])
        m = scalar_normal_dilation(1 + 1j, t)
        assert m[0, 0] == pytest.approx(1 + 1j)
        assert np.allclose(m @ m.conj().T, m.conj().T @ m)
        eig = np.linalg.eigvals(m)
        for v in t.vertices:
            assert np.min(np.abs(eig - v)) < 1e-9

        with pytest.raises(ContainmentError):
            scalar_normal_dilation(100 + 1j, t)


class TestBlockOperators:
    """Tests for A(k), A[k] and A<k>."""

    def test_examples(self):
        """Test small examples."""
        assert np.array_equal(dilate_diag([[1.0]], 3), np.eye(3))
        assert np.array_equal(dilate_ones([[2.0]], 2), [[2, 2], [2, 2]])
        assert np.allclose(dilate_bridge([[0.5]], 2), [[0.5, 0.5], [0.5, 0.5]])
        assert np.allclose(dilate_bridge([[1.0]], 3), np.eye(3))

    def test_k_one(self):
        """Test that k = 1 returns a copy of A."""
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        for op in (dilate_diag, dilate_ones, dilate_bridge):
            assert np.array_equal(op(a, 1), a)

        with pytest.raises(DilationError):
            dilate_diag(a, 0)

    def test_bridge_blocks(self, rng):
        """Test the diagonal blocks of B<k> equal B."""
        b = random_hermitian(rng, 2)
        bridged = dilate_bridge(b, 3)
        for slot in range(3):
            assert np.allclose(bridged[2 * slot:2 * slot + 2, 2 * slot:2 * slot + 2], b)

    def test_bridge_commutation(self, rng):
        """Test A[k] B<k> = A[k] = B<k> A[k] for arbitrary A and B."""
        policy = TolerancePolicy(rel_eq=1e-12)
        for _ in range(1000):
            dim = int(rng.integers(1, 5))
            k = int(rng.integers(2, 6))
            a = rng.uniform(-1, 1, (dim, dim)) + 1j * rng.uniform(-1, 1, (dim, dim))
            b = rng.uniform(-1, 1, (dim, dim)) + 1j * rng.uniform(-1, 1, (dim, dim))
            assert check_bridge_commutation(a, b, k, policy=policy)

    def test_bridge_commutation_perturbed(self):
        """Test that a perturbed bridge fails the check."""
        a, b = np.eye(2), 0.5 * np.eye(2)
        bridge = dilate_bridge(b, 2)
        bridge[0, 0] += 1e-3
        assert not check_bridge_commutation(a, b, 2, bridge=bridge)

    def test_bridge_commutation_invalid(self):
        """Test invalid input handling."""
        with pytest.raises(DilationError):
            check_bridge_commutation(np.eye(2), np.eye(2), 1)

        with pytest.raises(DimensionMismatch):
            check_bridge_commutation(np.eye(2), np.eye(3), 2)


class TestMonotonePair:
    """Tests for the monotone pair (A[k], B<k>)."""

    def test_example(self):
        """Test a diagonal pair."""
        a, b = np.diag([1.0, 2.0]), np.diag([0.5, 1.0])
        result = monotone_pair(a, b, 2)

        assert isinstance(result, MonotoneFamilyResult)
        assert result.total
        assert result.blowup == 2
        assert np.allclose(result.dilations[0], np.kron(np.ones((2, 2)), a))
        assert np.allclose(result.compressions()[1], b)
        assert result.verify().passed
        assert is_monotone_family(result.dilations)

    def test_identity(self):
        """Test A = B = I."""
        result = monotone_pair(np.eye(2), np.eye(2), 3)
        assert result.verify().passed
        assert np.allclose(result.dilations[1], np.eye(6))

    def test_random(self, rng):
        """Test random pairs for several k."""
        for k in (2, 3, 5):
            a = random_positive(rng, 3)
            b = random_positive(rng, 3, cond=k, normalize=True)
            result, report = get_construction("pair", k=k).run([a, b])
            assert report.passed, report.worst
            assert result.dim_dilation == 3 * k

    def test_invalid_input(self):
        """Test the hypotheses are enforced."""
        with pytest.raises(PreconditionViolated):
            monotone_pair(np.eye(2), np.eye(2), 1)

        with pytest.raises(PreconditionViolated) as excinfo:
            monotone_pair(np.diag([-1.0, 1.0]), np.eye(2), 2)
        assert excinfo.value.index == 0

        with pytest.raises(PreconditionViolated) as excinfo:
            monotone_pair(np.eye(2), np.diag([0.1, 1.0]), 2)
        assert excinfo.value.index == 1

        with pytest.raises(DimensionMismatch):
            monotone_pair(np.eye(2), np.eye(3), 2)

    def test_projection_pair(self, projection_pair):
        """Test that diag(1, 0), diag(0, 1) is rejected."""
        with pytest.raises(PreconditionViolated):
            monotone_pair(*projection_pair, 2)


class TestMonotoneFamily:
    """Tests for monotone families of positive operators."""

    def test_single_count_matches_pair(self, rng):
        """Test that one block count reproduces the pair construction exactly."""
        a = random_positive(rng, 2)
        b = random_positive(rng, 2, cond=3, normalize=True)
        family = monotone_family([a, b], [3])
        pair = monotone_pair(a, b, 3)
        for x, y in zip(family.dilations, pair.dilations):
            assert np.array_equal(x, y)

    def test_scalars(self):
        """Test the scalars 1, 0.6 and 0.75."""
        result = monotone_family([[[1.0]], [[0.6]], [[0.75]]], ConditionSpec((2, 2)))
        assert result.blowup == 4
        assert result.verify().passed
        assert np.allclose([c[0, 0] for c in result.compressions()], [1.0, 0.6, 0.75])

    def test_random(self, rng):
        """Test random families with blowup equal to the product of the counts."""
        for ks in ((2,), (2, 2), (2, 3), (3, 2, 2)):
            family = [random_positive(rng, 2)] + [
                random_positive(rng, 2, cond=k, normalize=True) for k in ks]
            result = monotone_family(family, ks)
            assert result.blowup == int(np.prod(ks))
            assert result.verify().passed, result.verify().worst

    def test_rescaling(self, rng, caplog):
        """Test operators outside the band are rescaled by their largest eigenvalue."""
        a = random_positive(rng, 2)
        b = np.diag([2.0, 3.0])
        with caplog.at_level(logging.WARNING, logger="dilatoo.constructions.monotone"):
            result = monotone_family([a, b], [2])
        assert "rescaled" in caplog.text
        assert result.get_metadata("scales")[1] == pytest.approx(3.0)
        assert result.verify().passed
        assert np.allclose(result.compressions()[1], b)

    def test_invalid_input(self):
        """Test the hypotheses are enforced."""
        with pytest.raises(DilationError):
            monotone_family([np.eye(2), np.eye(2)], [2, 2])

        with pytest.raises(PreconditionViolated):
            monotone_family([np.eye(2), np.diag([0.1, 1.0])], [2])

        with pytest.raises(DilationError):
            monotone_family([], [])

    def test_projection_pair(self, projection_pair):
        """Test that diag(1, 0), diag(0, 1) is rejected."""
        with pytest.raises(PreconditionViolated):
            monotone_family(list(projection_pair), [2])


class TestHermitianFamily:
    """Tests for monotone families of hermitian operators."""

    def test_single_operator(self, rng):
        """Test a single operator dilates to itself."""
        h = random_hermitian(rng, 3)
        result = hermitian_monotone_family([h])
        assert result.blowup == 1
        assert np.allclose(result.dilations[0], h)

    def test_examples(self):
        """Test a diagonal family and a family with the zero matrix."""
        for family in ([np.diag([1.0, -1.0]), np.diag([2.0, 0.0])],
                       [np.zeros((2, 2)), np.diag([1.0, 2.0])]):
            result = hermitian_monotone_family(family)
            assert result.blowup == 2
            assert result.verify().passed

    def test_random(self, rng):
        """Test random families of 1 to 4 operators."""
        for n in range(1, 5):
            family = [random_hermitian(rng, 2) for _ in range(n)]
            result, report = get_construction("hermitian-family").run(family)
            assert report.passed, report.worst
            assert result.blowup == 2 ** (n - 1)

    def test_projection_pair(self, projection_pair):
        """Test diag(1, 0), diag(0, 1) is accepted."""
        result = hermitian_monotone_family(list(projection_pair))
        assert result.verify().passed

    def test_non_hermitian(self):
        """Test that non-hermitian operators are rejected."""
        with pytest.raises(PreconditionViolated):
            hermitian_monotone_family([np.eye(2), [[0.0, 1.0], [0.0, 0.0]]])


class TestNumericalRangePair:
    """Tests for the strictly positive pair on 6 copies."""

    def test_scalars(self):
        """Test the pair [1], [1]."""
        result = numerical_range_pair([[1.0]], [[1.0]])
        assert result.get_metadata("r") == pytest.approx(1.0)
        assert result.blowup == 6
        assert not result.total
        assert result.verify().passed

    def test_random(self, rng):
        """Test random strictly positive pairs of dimensions 1 to 4."""
        for dim in (1, 2, 3, 4):
            for _ in range(10):
                a, b = random_strictly_positive(rng, dim), random_strictly_positive(rng, dim)
                result, report = get_construction("numrange-pair").run([a, b])
                assert report.passed, report.worst
                assert result.dim_dilation == 6 * dim

                s, t = result.dilations
                scale = max(1.0, np.linalg.norm(s, 2) * np.linalg.norm(t, 2))
                assert np.linalg.norm(s @ t - t @ s, 2) <= 1e-10 * scale
                for d in result.dilations:
                    assert np.linalg.eigvalsh(d).min() > 0

                ca, cb = result.compressions()
                assert np.linalg.norm(ca - a, 2) <= 1e-8
                assert np.linalg.norm(cb - b, 2) <= 1e-8
                assert is_monotone_family(result.dilations)

    def test_noninvertible(self, projection_pair):
        """Test that singular operators are rejected."""
        with pytest.raises(PreconditionViolated):
            numerical_range_pair(np.diag([1.0, 0.0]), np.eye(2))

        with pytest.raises(PreconditionViolated):
            numerical_range_pair(*projection_pair)


class TestEconomical:
    """Tests for the economical hermitian dilation."""

    def test_lift(self, rng):
        """Test the lift compresses back to A."""
        a = random_hermitian(rng, 2)
        v = lift_embedding(2, 2).data
        for slot in range(3):
            assert np.allclose(v.conj().T @ essential_lift(a, slot, 2) @ v, a)

        with pytest.raises(DilationError):
            essential_lift(a, 3, 2)

    def test_scalars(self):
        """Test the scalars 2 and 5."""
        result = economical_monotone_family([[[2.0]], [[5.0]]])
        assert result.get_metadata("spread_constant") == pytest.approx(21.0)
        assert np.allclose(np.diag(result.dilations[0]), [4, -21, 21])
        assert np.allclose(np.diag(result.dilations[1]), [0, -11, 31])
        assert np.allclose(np.abs(result.embedding.data[:, 0]), [1 / np.sqrt(2), 0.5, 0.5])
        assert result.verify().passed

    def test_single_operator(self, rng):
        """Test one operator on a space of dimension 2 dim H - 1."""
        h = random_hermitian(rng, 3)
        result = economical_monotone_family([h])
        assert result.dim_dilation == 5
        assert result.verify().passed

    def test_dimension(self, rng):
        """Test the dilation dimension 2(n + 1) dim H - 1."""
        result = economical_monotone_family([random_hermitian(rng, 2) for _ in range(3)])
        assert result.dim_dilation == 11

    def test_random(self, rng):
        """Test random families."""
        for _ in range(20):
            n = int(rng.integers(0, 4))
            dim = int(rng.integers(1, 5))
            family = [random_hermitian(rng, dim) for _ in range(n + 1)]
            result, report = get_construction("economical").run(family)
            assert report.passed, report.worst
            assert result.dim_dilation == 2 * (n + 1) * dim - 1

    def test_projection_pair(self, projection_pair):
        """Test diag(1, 0), diag(0, 1) is accepted."""
        result = economical_monotone_family(list(projection_pair))
        assert result.verify().passed
