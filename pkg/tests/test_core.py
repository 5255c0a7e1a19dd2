"""
Tests for core dilatoo components.
"""

import json
from fractions import Fraction

import numpy as np
import pytest

from dilatoo.core.errors import (
    CommutationFailure,
    ConfigurationError,
    DilationError,
    DimensionMismatch,
    PreconditionViolated,
    VerificationFailed,
)
from dilatoo.core.matrix import HermitianMatrix, Isometry, Operator, UnitaryMatrix, as_matrix
from dilatoo.core.result import (
    Check,
    DilationResult,
    SuiteReport,
    VerificationReport,
)
from dilatoo.core.tolerance import TolerancePolicy
from dilatoo.linalg.numerics import block_embed_isometry
from dilatoo.verify import is_monotone_family


class TestTolerancePolicy:
    """Tests for the TolerancePolicy class."""

    def test_defaults(self):
        """Test default thresholds."""
        policy = TolerancePolicy()
        assert policy.rel_eq == 1e-9
        assert policy.eig_residual == 1e-10
        assert policy.psd_slack == 1e-10

    def test_rejects_non_positive(self):
        """Test that thresholds must be strictly positive."""
        with pytest.raises(ConfigurationError):
            TolerancePolicy(rel_eq=0.0)

        with pytest.raises(ConfigurationError):
            TolerancePolicy(psd_slack=-1e-3)

    def test_scaled(self):
        """Test scaling by max(1, norm)."""
        assert TolerancePolicy.scaled(1e-9, 0.5) == 1e-9
        assert TolerancePolicy.scaled(1e-9, 10.0) == pytest.approx(1e-8)

    def test_with_overrides(self):
        """Test overriding single fields."""
        policy = TolerancePolicy()

        # None leaves the field alone
        assert policy.with_overrides(rel_eq=None) == policy

        changed = policy.with_overrides(rel_eq=1e-6)
        assert changed.rel_eq == 1e-6
        assert changed.eig_residual == policy.eig_residual

        with pytest.raises(ConfigurationError):
            policy.with_overrides(unknown=1.0)

    def test_uniform(self):
        """Test setting all thresholds at once."""
        policy = TolerancePolicy().uniform(1e-7)
        assert policy.rel_eq == policy.eig_residual == policy.psd_slack == 1e-7

    def test_from_env(self):
        """Test reading thresholds from environment variables."""
        policy = TolerancePolicy.from_env({"DILATOO_TOLERANCE": "1e-6"})
        assert policy.to_dict() == {"rel_eq": 1e-6, "eig_residual": 1e-6, "psd_slack": 1e-6}

        # Per-field variables win over the global one
        policy = TolerancePolicy.from_env({"DILATOO_TOLERANCE": "1e-6", "DILATOO_REL_EQ": "1e-3"})
        assert policy.rel_eq == 1e-3
        assert policy.psd_slack == 1e-6

        assert TolerancePolicy.from_env({}) == TolerancePolicy()

    def test_from_env_malformed(self):
        """Test that malformed environment values are rejected."""
        with pytest.raises(ConfigurationError):
            TolerancePolicy.from_env({"DILATOO_REL_EQ": "tight"})

    def test_default_reads_environment(self, monkeypatch):
        """Test that the default policy honours DILATOO_TOLERANCE."""
        monkeypatch.setenv("DILATOO_TOLERANCE", "1e-5")
        assert TolerancePolicy.default().eig_residual == 1e-5


class TestOperator:
    """Tests for the Operator class."""

    def test_initialization(self):
        """Test Operator initialization."""
        op = Operator([[1, 2], [3, 4]])

        # Check attributes
        assert op.shape == (2, 2)
        assert op.dim_rows == op.dim_cols == 2
        assert op.data.dtype == complex
        assert np.array_equal(op.data, np.array([[1, 2], [3, 4]]))
        assert isinstance(op.metadata, dict)
        assert len(op.metadata) == 0

    def test_read_only(self):
        """Test that the wrapped data cannot be modified."""
        op = Operator(np.eye(2))
        with pytest.raises(ValueError):
            op.data[0, 0] = 5.0

    def test_copies_input(self):
        """Test that later changes to the input do not leak in."""
        data = np.eye(2, dtype=complex)
        op = Operator(data)
        data[0, 0] = 7.0
        assert op.data[0, 0] == 1.0

    def test_metadata(self):
        """Test Operator metadata operations."""
        op = Operator(np.eye(2))
        op.set_metadata("source", "unit test")
        assert op.metadata["source"] == "unit test"

    def test_indexing_and_length(self):
        """Test Operator indexing and length."""
        op = Operator([[1, 2], [3, 4]])
        assert op[1, 0] == 3
        assert np.array_equal(op[0], [1, 2])
        assert len(op) == 2
        assert np.array_equal(np.asarray(op), op.data)

    def test_adjoint_and_norm(self):
        """Test adjoint and spectral norm."""
        op = Operator([[0, 2j], [0, 0]])
        assert np.array_equal(op.adjoint, [[0, 0], [-2j, 0]])
        assert op.norm() == pytest.approx(2.0)

    def test_scalar_input(self):
        """Test that a scalar becomes a 1x1 matrix."""
        assert as_matrix(3.0).shape == (1, 1)

    def test_invalid_input(self):
        """Test invalid input handling."""
        with pytest.raises(DilationError):
            Operator(np.zeros((2, 2, 2)))

        with pytest.raises(DilationError):
            Operator([[np.nan, 0], [0, 1]])

        with pytest.raises(DilationError):
            Operator(np.zeros((0, 3)))


class TestHermitianMatrix:
    """Tests for the HermitianMatrix class."""

    def test_accepts_hermitian(self):
        """Test a hermitian matrix passes unchanged."""
        h = HermitianMatrix([[1, 1j], [-1j, 2]])
        assert np.array_equal(h.data, np.array([[1, 1j], [-1j, 2]]))

    def test_symmetrizes_within_tolerance(self):
        """Test that tiny asymmetry is averaged out."""
        h = HermitianMatrix([[1, 1 + 1e-12], [1, 1]])
        assert h.data[0, 1] == h.data[1, 0]

    def test_rejects_non_hermitian(self):
        """Test that a clearly non-hermitian matrix is rejected."""
        with pytest.raises(DilationError):
            HermitianMatrix([[0, 1], [0, 0]])

        with pytest.raises(DimensionMismatch):
            HermitianMatrix(np.ones((2, 3)))


class TestUnitaryMatrix:
    """Tests for the UnitaryMatrix class."""

    def test_accepts_unitary(self):
        """Test a permutation is unitary."""
        u = UnitaryMatrix([[0, 1], [1, 0]])
        assert u.shape == (2, 2)

    def test_rejects_non_unitary(self):
        """Test that 2I is rejected."""
        with pytest.raises(DilationError):
            UnitaryMatrix(2 * np.eye(2))


class TestIsometry:
    """Tests for the Isometry class."""

    def test_isometry(self):
        """Test codimension and range projection."""
        v = Isometry(np.eye(3)[:, :2])
        assert v.codimension == 1
        assert np.allclose(v.projection(), np.diag([1, 1, 0]))

    def test_invalid_isometry(self):
        """Test invalid isometry handling."""
        with pytest.raises(DimensionMismatch):
            Isometry(np.ones((1, 2)))

        with pytest.raises(DilationError):
            Isometry([[1.0], [1.0]])


class TestVerificationReport:
    """Tests for the VerificationReport class."""

    def test_empty_report_passes(self):
        """Test that a report without checks passes."""
        report = VerificationReport()
        assert report.passed
        assert report.worst is None

    def test_checks(self):
        """Test recording checks."""
        report = VerificationReport()
        report.add_check("small", 1e-12, 1e-9).add_check("large", 1e-3, 1e-9)

        assert not report.passed
        assert not report
        assert report.worst == "large"
        assert [c.name for c in report.failed_checks()] == ["large"]

    def test_worst_is_relative(self):
        """Test that the worst check is measured against its own threshold."""
        report = VerificationReport()
        report.add_check("a", 1e-6, 1e-3).add_check("b", 1e-9, 1e-9)
        assert report.passed
        assert report.worst == "b"

    def test_nan_residual_fails(self):
        """Test that NaN residuals count as failures."""
        report = VerificationReport().add_check("nan", float("nan"), 1.0)
        assert not report.passed
        assert report.to_dict()["checks"][0]["residual"] is None

    def test_add_failure(self):
        """Test recording an outright failure with a note."""
        report = VerificationReport().add_failure("square", "matrix is not square")
        assert not report.passed
        assert report.notes == ["matrix is not square"]

    def test_merge_from(self):
        """Test merging reports with a prefix."""
        inner = VerificationReport().add_check("block[0]", 0.0, 1e-9)
        inner.add_note("note")
        outer = VerificationReport().merge_from(inner, "member[2].")

        assert [c.name for c in outer.checks] == ["member[2].block[0]"]
        assert outer.notes == ["member[2].note"]

    def test_to_dict_schema(self):
        """Test the JSON schema."""
        report = VerificationReport().add_check("x", 0.5, 1.0)
        data = report.to_dict()
        assert data == {
            "passed": True,
            "checks": [{"name": "x", "residual": 0.5, "threshold": 1.0}],
            "worst": "x",
        }

    def test_json_round_trip(self, tmp_path):
        """Test saving and loading a report."""
        report = VerificationReport().add_check("x", 0.125, 1.0).add_check("y", 3.0, 1.0)
        path = tmp_path / "report.json"
        report.save_to_json(path)

        loaded = VerificationReport.load_from_json(path)
        assert [c.to_dict() for c in loaded.checks] == [c.to_dict() for c in report.checks]
        assert loaded.passed == report.passed
        assert json.loads(path.read_text())["worst"] == "y"

    def test_check_ratio(self):
        """Test the residual to threshold ratio."""
        assert Check("x", 0.5, 1.0).ratio == 0.5
        assert Check("x", 0.0, 0.0).ratio == 0.0
        assert not Check("x", 1.0, 0.0).passed


class TestDilationResult:
    """Tests for the DilationResult class."""

    def _result(self, entry=1.0):
        embedding = block_embed_isometry(2, 0, 1)
        dilation = np.array([[entry, 1.0], [1.0, 1.0]])
        return DilationResult([dilation], [np.array([[entry]])], embedding, "test", {"k": 2})

    def test_initialization(self):
        """Test DilationResult initialization."""
        result = self._result()

        # Check attributes
        assert result.name == "test"
        assert result.dim_dilation == 2
        assert result.blowup == Fraction(2)
        assert result.get_metadata("k") == 2
        assert result.get_metadata("missing", 0) == 0

    def test_verify(self):
        """Test the compression check."""
        result = self._result()
        report = result.verify()
        assert report.passed
        assert [c.name for c in report.checks] == ["compression[0]"]

    def test_fractional_blowup(self):
        """Test a blowup that is not an integer."""
        embedding = Isometry(np.eye(5)[:, :2])
        result = DilationResult([np.eye(5)], [np.eye(2)], embedding, "test")
        assert result.blowup == Fraction(5, 2)
        assert result.to_dict()["blowup"] == "5/2"

    def test_dilations_are_read_only(self):
        """Test that stored dilations cannot be modified."""
        result = self._result()
        with pytest.raises(ValueError):
            result.dilations[0][0, 0] = 3.0

    def test_matrices(self):
        """Test the named matrices for export."""
        names = set(self._result().matrices())
        assert names == {"dilation_0", "embedding"}

    def test_compare_with(self):
        """Test comparing two results."""
        first, same, other = self._result(), self._result(), self._result(entry=2.0)

        comparison = first.compare_with(same)
        assert comparison["identical"] == ["dilation_0", "embedding"]
        assert comparison["different"] == []

        comparison = first.compare_with(other)
        assert comparison["different"] == ["dilation_0"]
        assert comparison["max_diff"]["dilation_0"] == pytest.approx(1.0)


class TestMonotoneCertificate:
    """Tests for the MonotoneCertificate class."""

    def test_certificate(self):
        """Test reconstruction and generator of a diagonal monotone pair."""
        family = [np.diag([2.0, 1.0]), np.diag([5.0, 3.0])]
        certificate = is_monotone_family(family)

        assert certificate
        assert np.allclose(certificate.values, [[2, 1], [5, 3]])
        assert np.allclose(certificate.reconstruct(1), family[1])
        assert np.allclose(certificate.generator(), np.diag([1.0, 0.0]))
        assert certificate.validate(family).passed

    def test_validate_detects_wrong_family(self):
        """Test that the certificate does not validate another family."""
        certificate = is_monotone_family([np.diag([2.0, 1.0]), np.diag([5.0, 3.0])])
        report = certificate.validate([np.diag([2.0, 1.0]), np.diag([3.0, 5.0])])
        assert not report.passed
        assert report.worst == "reconstruction[1]"

        report = certificate.validate([np.eye(2)])
        assert not report.passed


class TestSuiteReport:
    """Tests for the SuiteReport class."""

    def test_suite_report(self):
        """Test collecting reports and errors."""
        bundle = SuiteReport()
        bundle.add_report("ok", VerificationReport().add_check("x", 0.0, 1.0))
        assert bundle.passed

        bundle.add_report("bad", VerificationReport().add_check("x", 2.0, 1.0))
        bundle.add_error("broken", "PreconditionViolated: ...")

        assert not bundle.passed
        assert bundle.failures() == ["bad", "broken"]
        data = bundle.to_dict()
        assert set(data["results"]) == {"ok", "bad"}
        assert data["errors"] == {"broken": "PreconditionViolated: ..."}


class TestErrors:
    """Tests for the exception hierarchy."""

    def test_hierarchy(self):
        """Test that every error is a ValueError."""
        assert issubclass(DilationError, ValueError)
        for cls in (ConfigurationError, DimensionMismatch, PreconditionViolated,
                    CommutationFailure, VerificationFailed):
            assert issubclass(cls, DilationError)

    def test_precondition_message(self):
        """Test that the message names the hypothesis and the operator."""
        exc = PreconditionViolated("A_0 is positive semidefinite", "smallest eigenvalue -1", index=0)
        assert exc.hypothesis == "A_0 is positive semidefinite"
        assert exc.index == 0
        assert "operator 0" in str(exc)
        assert "positive semidefinite" in str(exc)

    def test_commutation_failure(self):
        """Test the fields of CommutationFailure."""
        exc = CommutationFailure(2.0, (0, 1), 1e-9)
        assert exc.worst == 2.0
        assert exc.pair == (0, 1)
