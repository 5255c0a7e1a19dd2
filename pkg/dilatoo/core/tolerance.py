"""
Tolerance policy shared by every check in dilatoo.
"""

import os
from dataclasses import dataclass, replace, fields
from typing import Optional, Mapping

from .errors import ConfigurationError

ENV_TOLERANCE = "DILATOO_TOLERANCE"
ENV_FIELDS = {
    "rel_eq": "DILATOO_REL_EQ",
    "eig_residual": "DILATOO_EIG_RESIDUAL",
    "psd_slack": "DILATOO_PSD_SLACK",
}


@dataclass(frozen=True)
class TolerancePolicy:
    """Scale-aware comparison thresholds.

    Every equality or positivity test multiplies the relevant threshold by
    ``max(1, norm)`` of the operand it inspects (see ``scaled``).

    Parameters
    ----------
    rel_eq : float
        Threshold for equality of matrices
    eig_residual : float
        Threshold for eigen/singular value reconstruction residuals
    psd_slack : float
        Slack allowed when testing positivity and spectral bands
    """

    rel_eq: float = 1e-9
    eig_residual: float = 1e-10
    psd_slack: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigurationError(f"{f.name} must be strictly positive, got {value!r}")

    @staticmethod
    def scaled(threshold: float, norm: float) -> float:
        """Return ``threshold * max(1, norm)``."""
        return threshold * max(1.0, float(norm))

    def with_overrides(self, **overrides: Optional[float]) -> "TolerancePolicy":
        """Return a copy with the non-``None`` overrides applied."""
        changes = {k: float(v) for k, v in overrides.items() if v is not None}
        unknown = set(changes) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigurationError(f"unknown tolerance fields: {sorted(unknown)}")
        return replace(self, **changes)

    def uniform(self, value: float) -> "TolerancePolicy":
        """Return a copy with all three thresholds set to ``value``."""
        return replace(self, rel_eq=value, eig_residual=value, psd_slack=value)

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "TolerancePolicy":
        """Build a policy from ``DILATOO_*`` environment variables.

        ``DILATOO_TOLERANCE`` sets all three thresholds; the per-field
        variables are applied afterwards and win.
        """
        environ = os.environ if environ is None else environ
        policy = cls()
        if environ.get(ENV_TOLERANCE):
            policy = policy.uniform(_parse(ENV_TOLERANCE, environ[ENV_TOLERANCE]))
        overrides = {
            name: _parse(var, environ[var])
            for name, var in ENV_FIELDS.items()
            if environ.get(var)
        }
        return policy.with_overrides(**overrides)

    @classmethod
    def default(cls) -> "TolerancePolicy":
        """Policy used when a caller passes ``policy=None``."""
        return cls.from_env()

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _parse(name: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigurationError(f"{name}={raw!r} is not a number") from None


def resolve(policy: Optional[TolerancePolicy]) -> TolerancePolicy:
    """Return ``policy`` or the environment-aware default."""
    return TolerancePolicy.default() if policy is None else policy
