"""
Exception hierarchy for dilatoo.

Every error raised on purpose by the package derives from ``DilationError``,
which is itself a ``ValueError`` so callers that only guard against invalid
input keep working.
"""

from typing import Optional, Tuple, TYPE_CHECKING

if TYPE_CHECKING:
    from .result import VerificationReport


class DilationError(ValueError):
    """Base class for all dilatoo errors."""


class ConfigurationError(DilationError):
    """Invalid tolerance or environment configuration."""


class DimensionMismatch(DilationError):
    """Operands have incompatible shapes."""


class PreconditionViolated(DilationError):
    """A hypothesis of a construction does not hold for the given input.

    Parameters
    ----------
    hypothesis : str
        Short human readable name of the violated hypothesis
    detail : str, optional
        What was measured
    index : int, optional
        Position of the offending operator inside a family
    """

    def __init__(self, hypothesis: str, detail: str = "", index: Optional[int] = None):
        self.hypothesis = hypothesis
        self.detail = detail
        self.index = index
        where = f" (operator {index})" if index is not None else ""
        message = f"precondition violated{where}: {hypothesis}"
        if detail:
            message += f"; {detail}"
        super().__init__(message)


class CommutationFailure(DilationError):
    """Operators that were required to commute do not."""

    def __init__(self, worst: float, pair: Tuple[int, int], threshold: float):
        self.worst = float(worst)
        self.pair = tuple(pair)
        self.threshold = float(threshold)
        super().__init__(
            f"operators {pair[0]} and {pair[1]} do not commute: "
            f"commutator norm {worst:.3e} exceeds {threshold:.3e}"
        )


class ConvergenceError(DilationError):
    """A factorization or root finder did not reach its target residual."""

    def __init__(self, what: str, residual: float, threshold: float):
        self.what = what
        self.residual = float(residual)
        self.threshold = float(threshold)
        super().__init__(
            f"{what} failed: residual {residual:.3e} exceeds {threshold:.3e}"
        )


class ContainmentError(DilationError):
    """A point that must lie inside a triangle was found outside it."""


class VerificationFailed(DilationError):
    """A constructed object did not pass its certificate checks."""

    def __init__(self, name: str, report: "VerificationReport"):
        self.name = name
        self.report = report
        super().__init__(f"{name}: verification failed (worst check: {report.worst})")


class MatrixFileError(DilationError):
    """A matrix file is malformed or its kind tag does not hold."""
