"""
Tests for the independent verification functions.
"""

import itertools

import numpy as np
import pytest

from dilatoo.core.errors import DilationError, DimensionMismatch, PreconditionViolated
from dilatoo.core.result import MonotoneCertificate, MonotoneFailure
from dilatoo.utils.data import random_hermitian, random_monotone_pair, random_positive
from dilatoo.verify import (
    check_antimonotone_det_reversal,
    check_class,
    check_compression_inequalities,
    check_functional_calculus,
    check_mutual_annihilation,
    is_antimonotone_pair,
    is_monotone_family,
    is_total_dilation,
    monotone_report,
)


def _has_chain(tuples):
    """Brute force: some ordering of the tuples is componentwise non-increasing."""
    for perm in itertools.permutations(tuples):
        if all(all(x >= y for x, y in zip(perm[i], perm[i + 1])) for i in range(len(perm) - 1)):
            return True
    return False


class TestTotalDilation:
    """Tests for is_total_dilation."""

    def test_block_diagonal(self):
        """Test A repeated on the diagonal."""
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        b = np.kron(np.eye(3), a)
        report = is_total_dilation(b, a, 3)
        assert report.passed
        assert [c.name for c in report.checks] == ["block[0]", "block[1]", "block[2]"]

    def test_corrupted_block(self):
        """Test that one wrong block is named."""
        a = np.eye(2)
        b = np.kron(np.ones((2, 2)), a)
        b[2, 2] += 0.5
        report = is_total_dilation(b, a, 2)
        assert not report.passed
        assert report.worst == "block[1]"

    def test_dimension_mismatch(self):
        """Test dim B != k dim A."""
        with pytest.raises(DimensionMismatch):
            is_total_dilation(np.eye(5), np.eye(2), 2)


class TestMonotoneFamily:
    """Tests for is_monotone_family."""

    def test_comparable(self):
        """Test a monotone diagonal pair."""
        certificate = is_monotone_family([np.diag([2.0, 1.0]), np.diag([5.0, 3.0])])
        assert isinstance(certificate, MonotoneCertificate)
        assert np.allclose(certificate.values, [[2, 1], [5, 3]])
        assert np.allclose(np.abs(certificate.basis.data), np.eye(2))

    def test_incomparable(self):
        """Test the incomparable tuples are reported."""
        failure = is_monotone_family([np.diag([2.0, 1.0]), np.diag([3.0, 5.0])])
        assert isinstance(failure, MonotoneFailure)
        assert not failure
        assert failure.kind == "incomparable"
        assert set(failure.tuples) == {(1.0, 5.0), (2.0, 3.0)}
        assert not failure.report().passed
        assert "incomparable" in failure.report().notes[0]

    def test_non_commuting(self):
        """Test X and Z fail as non-commuting."""
        failure = is_monotone_family([[[0.0, 1.0], [1.0, 0.0]], np.diag([1.0, -1.0])])
        assert not failure
        assert failure.kind == "non-commuting"
        assert failure.pair == (0, 1)

    def test_functions_of_one_operator(self, rng):
        """Test A and A^3 form a monotone family."""
        a = random_hermitian(rng, 4)
        family = [a, a @ a @ a]
        certificate = is_monotone_family(family)
        assert certificate
        assert certificate.validate(family).passed
        assert check_functional_calculus(certificate, family).passed

    def test_projection_pair(self, projection_pair):
        """Test diag(1, 0), diag(0, 1) is not monotone."""
        report = monotone_report(list(projection_pair))
        assert not report.passed
        assert any("incomparable" in note for note in report.notes)

    def test_chain_oracle(self):
        """Test against a brute force search for a chain on small integer spectra."""
        values = range(4)
        for dim in (1, 2, 3):
            for first in itertools.product(values, repeat=dim):
                for second in itertools.product(values, repeat=dim):
                    family = [np.diag(first).astype(float), np.diag(second).astype(float)]
                    expected = _has_chain(list(zip(first, second)))
                    assert bool(is_monotone_family(family)) == expected

        for dim in (1, 2):
            for entries in itertools.product(values, repeat=3 * dim):
                rows = [entries[j * dim:(j + 1) * dim] for j in range(3)]
                family = [np.diag(row).astype(float) for row in rows]
                expected = _has_chain(list(zip(*rows)))
                assert bool(is_monotone_family(family)) == expected


class TestAntimonotone:
    """Tests for is_antimonotone_pair."""

    def test_antimonotone(self, rng):
        """Test a random antimonotone pair and its reverse."""
        a, b = random_monotone_pair(rng, 3, anti=True)
        assert is_antimonotone_pair(a, b).passed
        assert not monotone_report([a, b]).passed

    def test_monotone_is_not_antimonotone(self):
        """Test a strictly monotone pair."""
        assert not is_antimonotone_pair(np.diag([2.0, 1.0]), np.diag([5.0, 3.0])).passed


class TestCheckClass:
    """Tests for check_class."""

    def test_classes(self):
        """Test membership for each class."""
        rotation = np.array([[0.0, -1.0], [1.0, 0.0]])
        assert check_class(np.diag([1.0, 2.0]), "hermitian").passed
        assert check_class(np.diag([1.0, 0.0]), "positive").passed
        assert not check_class(np.diag([1.0, 0.0]), "strictly-positive").passed
        assert check_class(np.diag([1.0, 0.5]), "strictly-positive").passed
        assert not check_class(np.diag([1.0, -1.0]), "positive").passed
        assert check_class(rotation, "normal").passed
        assert check_class(rotation, "unitary").passed
        assert check_class(rotation, "antisymmetric-real").passed
        assert check_class(0.5 * rotation, "contraction").passed
        assert not check_class(2 * rotation, "contraction").passed
        assert not check_class(1j * rotation, "antisymmetric-real").passed
        assert not check_class([[0.0, 1.0], [0.0, 0.0]], "normal").passed

    def test_non_square(self):
        """Test that non-square input fails instead of raising."""
        report = check_class(np.ones((2, 3)), "hermitian")
        assert not report.passed
        assert report.worst == "square"

    def test_unknown_kind(self):
        """Test that unknown kinds are rejected."""
        with pytest.raises(DilationError):
            check_class(np.eye(2), "symplectic")


class TestAnnihilation:
    """Tests for check_mutual_annihilation."""

    def test_orthogonal_projections(self):
        """Test diag(1, 0) and diag(0, 1) annihilate each other."""
        report = check_mutual_annihilation([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        assert report.passed
        assert len(report.checks) == 2

    def test_overlapping(self):
        """Test that overlapping projections fail."""
        report = check_mutual_annihilation([np.eye(2), np.diag([0.0, 1.0])])
        assert not report.passed


class TestCompressionInequalities:
    """Tests for the eigenvalue and determinant inequalities of compressions."""

    def test_random_pairs(self, rng, random_isometry):
        """Test random monotone pairs against subspaces of every dimension."""
        for _ in range(1000):
            dim = int(rng.integers(1, 6))
            cols = int(rng.integers(1, dim + 1))
            a, b = random_monotone_pair(rng, dim)
            v = random_isometry(rng, dim, cols)
            report = check_compression_inequalities(a, b, v)
            assert report.passed, report.worst

    def test_commuting_projections(self):
        """Test the diagonal pair (diag(1, 1, 0), diag(1, 0, 0))."""
        a, b = np.diag([1.0, 1.0, 0.0]), np.diag([1.0, 0.0, 0.0])
        v = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        assert check_compression_inequalities(a, b, v).passed

    def test_preconditions(self, projection_pair):
        """Test non-monotone and non-positive pairs are rejected."""
        v = np.eye(2)[:, :1]
        with pytest.raises(PreconditionViolated):
            check_compression_inequalities(*projection_pair, v)

        with pytest.raises(PreconditionViolated):
            check_compression_inequalities(np.diag([1.0, -1.0]), np.eye(2), v)

        with pytest.raises(DimensionMismatch):
            check_compression_inequalities(np.eye(2), np.eye(2), np.eye(3)[:, :1])


class TestDeterminantReversal:
    """Tests for the determinant reversal of antimonotone pairs."""

    def test_random_pairs(self, rng, random_isometry):
        """Test random antimonotone pairs against random hyperplanes."""
        for _ in range(200):
            dim = int(rng.integers(2, 6))
            a, b = random_monotone_pair(rng, dim, anti=True)
            v = random_isometry(rng, dim, dim - 1)
            report = check_antimonotone_det_reversal(a, b, v)
            assert report.passed, report.worst

    def test_preconditions(self, rng, random_isometry):
        """Test monotone pairs and subspaces of codimension 2 are rejected."""
        a, b = random_monotone_pair(rng, 3)
        with pytest.raises(PreconditionViolated):
            check_antimonotone_det_reversal(a, b, random_isometry(rng, 3, 2))

        a, b = random_monotone_pair(rng, 3, anti=True)
        with pytest.raises(PreconditionViolated):
            check_antimonotone_det_reversal(a, b, random_isometry(rng, 3, 1))


class TestFunctionalCalculus:
    """Tests for check_functional_calculus."""

    def test_monotone_pair(self, rng):
        """Test a random monotone pair is a function of the generator."""
        family = random_monotone_pair(rng, 4)
        certificate = is_monotone_family(family)
        assert check_functional_calculus(certificate, family).passed

    def test_wrong_family(self, rng):
        """Test an unrelated operator is not a function of the generator."""
        family = random_monotone_pair(rng, 3)
        certificate = is_monotone_family(family)
        other = random_positive(rng, 3)
        assert not check_functional_calculus(certificate, [other]).passed
