"""
Result classes for dilatoo.

Constructions return one of the ``DilationResult`` classes below; checks
return a ``VerificationReport``. Both serialize to plain JSON.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Any, List, Optional, Union, Tuple, Sequence
from copy import deepcopy
from pathlib import Path
import json
import math
import numpy as np

from .matrix import Isometry, UnitaryMatrix, as_matrix
from .tolerance import TolerancePolicy, resolve


@dataclass(frozen=True)
class Check:
    """A single named residual compared against a threshold."""

    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual <= self.threshold

    @property
    def ratio(self) -> float:
        if not math.isfinite(self.residual):
            return math.inf
        if self.threshold > 0:
            return self.residual / self.threshold
        return math.inf if self.residual > 0 else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "residual": self.residual, "threshold": self.threshold}


class VerificationReport:
    """Outcome of a verification: a list of named checks.

    ``passed`` holds exactly when every residual is within its threshold.
    """

    def __init__(self, checks: Optional[Sequence[Check]] = None,
                 notes: Optional[Sequence[str]] = None):
        self._checks: List[Check] = list(checks or [])
        self._notes: List[str] = list(notes or [])

    @property
    def checks(self) -> List[Check]:
        return self._checks

    @property
    def notes(self) -> List[str]:
        """Free-text reasons attached by the checker (e.g. why a family is not monotone)."""
        return self._notes

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self._checks)

    @property
    def worst(self) -> Optional[str]:
        """Name of the check closest to (or furthest beyond) its threshold."""
        if not self._checks:
            return None
        return max(self._checks, key=lambda c: c.ratio).name

    def add_check(self, name: str, residual: float, threshold: float) -> "VerificationReport":
        """Record a check.

        Parameters
        ----------
        name : str
            Name of the check
        residual : float
            Measured residual (NaN counts as failure)
        threshold : float
            Largest acceptable residual

        Returns
        -------
        VerificationReport
            Self for method chaining
        """
        residual = float(residual)
        if math.isnan(residual):
            residual = math.inf
        self._checks.append(Check(name, residual, float(threshold)))
        return self

    def add_failure(self, name: str, note: str) -> "VerificationReport":
        """Record a check that failed outright, with an explanation."""
        self._notes.append(note)
        return self.add_check(name, 1.0, 0.0)

    def add_note(self, note: str) -> None:
        self._notes.append(note)

    def merge_from(self, other: "VerificationReport", prefix: str = "") -> "VerificationReport":
        """Append the checks and notes of another report.

        Parameters
        ----------
        other : VerificationReport
            The report to merge from
        prefix : str
            Prepended to every merged check name
        """
        for c in other.checks:
            self._checks.append(Check(prefix + c.name, c.residual, c.threshold))
        self._notes.extend(prefix + n for n in other.notes)
        return self

    def failed_checks(self) -> List[Check]:
        return [c for c in self._checks if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "passed": self.passed,
            "checks": [_finite_check(c) for c in self._checks],
            "worst": self.worst,
        }
        if self._notes:
            result["notes"] = list(self._notes)
        return result

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def save_to_json(self, filepath: Union[str, Path]) -> None:
        with open(filepath, "w") as f:
            f.write(self.to_json())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        checks = [Check(c["name"], float(c["residual"]), float(c["threshold"]))
                  for c in data.get("checks", [])]
        return cls(checks, data.get("notes", []))

    @classmethod
    def load_from_json(cls, filepath: Union[str, Path]) -> "VerificationReport":
        with open(filepath, "r") as f:
            return cls.from_dict(json.load(f))

    def __bool__(self) -> bool:
        return self.passed

    def __repr__(self) -> str:
        return f"VerificationReport(passed={self.passed}, checks={len(self._checks)}, worst={self.worst!r})"


def _finite_check(check: Check) -> Dict[str, Any]:
    # JSON has no infinity; an unmeasurable residual is written as null.
    entry = check.to_dict()
    if not math.isfinite(entry["residual"]):
        entry["residual"] = None
    return entry


class MonotoneCertificate:
    """Common eigenbasis and ordered joint spectrum of a monotone family.

    Column ``k`` of ``basis`` is the k-th basis vector e_k and ``values[j, k]``
    the eigenvalue of operator ``j`` on it. Every row of ``values`` is
    non-increasing, so every operator is an increasing function of
    ``generator()``.
    """

    def __init__(self, basis: UnitaryMatrix, values: np.ndarray, order: np.ndarray):
        self._basis = basis
        self._values = np.array(values, dtype=float)
        self._order = np.array(order, dtype=int)

    @property
    def basis(self) -> UnitaryMatrix:
        return self._basis

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def order(self) -> np.ndarray:
        """Permutation applied to the simultaneous eigenbasis to sort the tuples."""
        return self._order

    @property
    def dim(self) -> int:
        return self._values.shape[1]

    def reconstruct(self, j: int) -> np.ndarray:
        """Return U diag(values[j]) U*."""
        u = self._basis.data
        return (u * self._values[j]) @ u.conj().T

    def generator(self) -> np.ndarray:
        """Return the operator sum_k (d - k) e_k e_k* (k = 1..d)."""
        u = self._basis.data
        weights = np.arange(self.dim - 1, -1, -1, dtype=float)
        return (u * weights) @ u.conj().T

    def validate(self, family: Sequence[np.ndarray],
                 policy: Optional[TolerancePolicy] = None) -> VerificationReport:
        """Check the certificate against the family it claims to describe.

        Parameters
        ----------
        family : list of array-like
            The operators, in the same order as the rows of ``values``
        policy : TolerancePolicy, optional
            Thresholds to use

        Returns
        -------
        VerificationReport
            One reconstruction and one ordering check per operator
        """
        policy = resolve(policy)
        report = VerificationReport()
        if len(family) != self._values.shape[0]:
            return report.add_failure(
                "family_size",
                f"certificate has {self._values.shape[0]} rows but family has {len(family)} operators",
            )
        u = self._basis.data
        report.add_check("basis_unitary",
                         np.linalg.norm(u.conj().T @ u - np.eye(self.dim), 2), policy.rel_eq)
        for j, op in enumerate(family):
            a = as_matrix(op)
            scale = max(1.0, np.linalg.norm(a, 2))
            residual = np.linalg.norm(a - self.reconstruct(j), 2) / scale
            report.add_check(f"reconstruction[{j}]", residual, policy.rel_eq)
            rises = np.diff(self._values[j])
            worst_rise = float(rises.max()) if rises.size else 0.0
            report.add_check(f"non_increasing[{j}]", max(0.0, worst_rise) / scale, policy.rel_eq)
        return report

    def to_dict(self) -> Dict[str, Any]:
        return {
            "values": self._values.tolist(),
            "order": self._order.tolist(),
        }

    def __bool__(self) -> bool:
        return True


class MonotoneFailure:
    """Reason why a family is not monotone.

    ``kind`` is ``"non-commuting"`` or ``"incomparable"``; ``pair`` holds the
    offending operator indices (non-commuting) or basis positions
    (incomparable), and ``tuples`` the two incomparable joint eigenvalue
    tuples when relevant.
    """

    def __init__(self, kind: str, reason: str, pair: Tuple[int, int],
                 tuples: Optional[Tuple[Sequence[float], Sequence[float]]] = None,
                 residual: float = 1.0, threshold: float = 0.0):
        self.kind = kind
        self.reason = reason
        self.pair = tuple(pair)
        self.tuples = None if tuples is None else tuple(tuple(float(x) for x in t) for t in tuples)
        self._residual = residual
        self._threshold = threshold

    def report(self) -> VerificationReport:
        report = VerificationReport(notes=[self.reason])
        return report.add_check(self.kind, self._residual, self._threshold)

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"MonotoneFailure(kind={self.kind!r}, reason={self.reason!r})"


class DilationResult:
    """A family of dilations together with the embedding of the original space.

    Parameters
    ----------
    dilations : list of array-like
        Operators on the dilation space F
    bases : list of array-like
        The operators that were dilated, acting on H
    embedding : Isometry
        V : H -> F with V* B_j V = A_j
    name : str
        Name of the construction that produced the result
    metadata : dict, optional
        Construction parameters and intermediate data
    """

    def __init__(self,
                 dilations: Sequence[np.ndarray],
                 bases: Sequence[np.ndarray],
                 embedding: Isometry,
                 name: str,
                 metadata: Optional[Dict[str, Any]] = None):
        self._dilations = [_frozen(b) for b in dilations]
        self._bases = [_frozen(a) for a in bases]
        self._embedding = embedding
        self._name = name
        self._metadata = {} if metadata is None else deepcopy(metadata)

    @property
    def dilations(self) -> List[np.ndarray]:
        return self._dilations

    @property
    def bases(self) -> List[np.ndarray]:
        return self._bases

    @property
    def embedding(self) -> Isometry:
        return self._embedding

    @property
    def name(self) -> str:
        return self._name

    @property
    def metadata(self) -> Dict[str, Any]:
        return self._metadata

    @property
    def dim_dilation(self) -> int:
        return self._embedding.dim_rows

    @property
    def blowup(self) -> Fraction:
        """Ratio dim F / dim H."""
        return Fraction(self._embedding.dim_rows, self._embedding.dim_cols)

    def set_metadata(self, key: str, value: Any) -> None:
        self._metadata[key] = value

    def get_metadata(self, key: str, default: Any = None) -> Any:
        return self._metadata.get(key, default)

    def compressions(self) -> List[np.ndarray]:
        """Return V* B_j V for every dilation."""
        v = self._embedding.data
        return [v.conj().T @ b @ v for b in self._dilations]

    def verify(self, policy: Optional[TolerancePolicy] = None) -> VerificationReport:
        """Check that every dilation compresses to its base operator."""
        policy = resolve(policy)
        report = VerificationReport()
        for j, (c, a) in enumerate(zip(self.compressions(), self._bases)):
            scale = max(1.0, np.linalg.norm(a, 2))
            report.add_check(f"compression[{j}]", np.linalg.norm(c - a, 2) / scale, policy.rel_eq)
        return report

    def matrices(self) -> Dict[str, np.ndarray]:
        """Named matrices for export."""
        out = {f"dilation_{j}": b for j, b in enumerate(self._dilations)}
        out["embedding"] = self._embedding.data
        return out

    def compare_with(self, other: "DilationResult", tolerance: float = 0.0) -> Dict[str, Any]:
        """Compare the exported matrices of two results.

        Parameters
        ----------
        other : DilationResult
            The other result to compare with
        tolerance : float, optional
            Largest entrywise difference still counted as identical

        Returns
        -------
        dict
            Names only in one result, identical and different names, and
            the largest entrywise difference of each differing matrix
        """
        mine, theirs = self.matrices(), other.matrices()
        comparison = {
            "max_diff": {},
            "only_in_self": sorted(set(mine) - set(theirs)),
            "only_in_other": sorted(set(theirs) - set(mine)),
            "identical": [],
            "different": [],
        }
        for key in sorted(set(mine) & set(theirs)):
            a, b = np.asarray(mine[key]), np.asarray(theirs[key])
            if a.shape != b.shape:
                comparison["different"].append(key)
                comparison["max_diff"][key] = math.inf
                continue
            diff = float(np.abs(a - b).max())
            if diff <= tolerance:
                comparison["identical"].append(key)
            else:
                comparison["different"].append(key)
                comparison["max_diff"][key] = diff
        return comparison

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self._name,
            "dim_base": self._embedding.dim_cols,
            "dim_dilation": self.dim_dilation,
            "blowup": str(self.blowup),
            "metadata": _convert_numpy_for_json(self._metadata),
        }


class TotalDilationResult(DilationResult):
    """A single total dilation: an operator on the direct sum of k copies of H
    whose diagonal blocks all equal the base operator."""

    def __init__(self,
                 dilation: np.ndarray,
                 base: np.ndarray,
                 k: int,
                 name: str,
                 metadata: Optional[Dict[str, Any]] = None):
        from ..linalg.numerics import block_embed_isometry

        base = as_matrix(base)
        embedding = block_embed_isometry(k, 0, base.shape[0])
        super().__init__([dilation], [base], embedding, name, metadata)
        self._k = int(k)

    @property
    def dilation(self) -> np.ndarray:
        return self._dilations[0]

    @property
    def base(self) -> np.ndarray:
        return self._bases[0]

    @property
    def k(self) -> int:
        """Number of diagonal blocks."""
        return self._k

    def slot_embedding(self, slot: int) -> Isometry:
        """Embedding of H as the ``slot``-th summand."""
        from ..linalg.numerics import block_embed_isometry

        return block_embed_isometry(self._k, slot, self.base.shape[0])

    def verify(self, policy: Optional[TolerancePolicy] = None) -> VerificationReport:
        from ..verify import is_total_dilation

        return is_total_dilation(self.dilation, self.base, self._k, policy=policy)

    def matrices(self) -> Dict[str, np.ndarray]:
        out = {"dilation": self.dilation, "embedding": self._embedding.data}
        conjugator = self._metadata.get("conjugator")
        if conjugator is not None:
            out["conjugator"] = np.asarray(conjugator)
        return out


class TotalFamilyResult(DilationResult):
    """Several total dilations on the same space, one per input operator."""

    def __init__(self,
                 members: Sequence[TotalDilationResult],
                 name: str,
                 metadata: Optional[Dict[str, Any]] = None):
        members = list(members)
        super().__init__([m.dilation for m in members], [m.base for m in members],
                         members[0].embedding, name, metadata)
        self._members = members

    @property
    def members(self) -> List[TotalDilationResult]:
        return self._members

    @property
    def k(self) -> int:
        return self._members[0].k

    def verify(self, policy: Optional[TolerancePolicy] = None) -> VerificationReport:
        report = VerificationReport()
        for j, member in enumerate(self._members):
            report.merge_from(member.verify(policy), f"member[{j}].")
        return report


class HalvingResult(TotalDilationResult):
    """A unitary W such that W*AW has two equal diagonal half-blocks."""

    def __init__(self,
                 operator: np.ndarray,
                 conjugator: UnitaryMatrix,
                 common_block: np.ndarray,
                 name: str = "halving",
                 metadata: Optional[Dict[str, Any]] = None):
        a = as_matrix(operator)
        w = conjugator.data
        super().__init__(w.conj().T @ a @ w, common_block, 2, name, metadata)
        self._operator = _frozen(a)
        self._conjugator = conjugator

    @property
    def operator(self) -> np.ndarray:
        """The operator that was halved."""
        return self._operator

    @property
    def conjugator(self) -> UnitaryMatrix:
        return self._conjugator

    @property
    def common_block(self) -> np.ndarray:
        return self.base

    def verify(self, policy: Optional[TolerancePolicy] = None) -> VerificationReport:
        policy = resolve(policy)
        report = super().verify(policy)
        w = self._conjugator.data
        report.add_check("conjugator_unitary",
                         np.linalg.norm(w.conj().T @ w - np.eye(w.shape[0]), 2), policy.rel_eq)
        return report

    def matrices(self) -> Dict[str, np.ndarray]:
        out = super().matrices()
        out["conjugator"] = self._conjugator.data
        out["common_block"] = self.common_block
        projection = self._metadata.get("projection")
        if projection is not None:
            out["projection"] = np.asarray(projection)
        return out


class MonotoneFamilyResult(DilationResult):
    """A monotone family of hermitian dilations with its certificate."""

    def __init__(self,
                 dilations: Sequence[np.ndarray],
                 bases: Sequence[np.ndarray],
                 embedding: Isometry,
                 certificate: MonotoneCertificate,
                 total: bool,
                 name: str,
                 metadata: Optional[Dict[str, Any]] = None):
        super().__init__(dilations, bases, embedding, name, metadata)
        self._certificate = certificate
        self._total = bool(total)

    @property
    def certificate(self) -> MonotoneCertificate:
        return self._certificate

    @property
    def total(self) -> bool:
        """Whether every dilation is a total dilation of its base."""
        return self._total

    def verify(self, policy: Optional[TolerancePolicy] = None) -> VerificationReport:
        """Check compressions, the certificate and, for total results, every diagonal block."""
        from ..verify import is_total_dilation

        policy = resolve(policy)
        report = super().verify(policy)
        report.merge_from(self._certificate.validate(self._dilations, policy), "certificate.")
        if self._total:
            k = int(self.blowup)
            for j, (b, a) in enumerate(zip(self._dilations, self._bases)):
                report.merge_from(is_total_dilation(b, a, k, policy=policy), f"total[{j}].")
        return report

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result["total"] = self._total
        result["certificate"] = self._certificate.to_dict()
        return result


class SuiteReport:
    """Reports of several constructions, keyed by construction name."""

    def __init__(self):
        self._reports: Dict[str, VerificationReport] = {}
        self._errors: Dict[str, str] = {}

    @property
    def reports(self) -> Dict[str, VerificationReport]:
        return self._reports

    @property
    def errors(self) -> Dict[str, str]:
        """Constructions that raised instead of producing a report."""
        return self._errors

    @property
    def passed(self) -> bool:
        return not self._errors and all(r.passed for r in self._reports.values())

    def add_report(self, name: str, report: VerificationReport) -> None:
        self._reports[name] = report

    def add_error(self, name: str, message: str) -> None:
        self._errors[name] = message

    def failures(self) -> List[str]:
        failed = [name for name, r in self._reports.items() if not r.passed]
        return failed + list(self._errors)

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "passed": self.passed,
            "results": {name: r.to_dict() for name, r in self._reports.items()},
        }
        if self._errors:
            result["errors"] = dict(self._errors)
        return result

    def save_to_json(self, filepath: Union[str, Path]) -> None:
        with open(filepath, "w") as f:
            json.dump(self.to_dict(), f, indent=2)


def _frozen(data: np.ndarray) -> np.ndarray:
    arr = np.array(as_matrix(data), dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


def _convert_numpy_for_json(obj: Any) -> Any:
    """Convert numpy values to JSON-friendly Python values."""
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"real": obj.real.tolist(), "imag": obj.imag.tolist()}
        return obj.tolist()
    elif isinstance(obj, (UnitaryMatrix, Isometry)):
        return _convert_numpy_for_json(obj.data)
    elif isinstance(obj, np.integer):
        return int(obj)
    elif isinstance(obj, np.floating):
        return float(obj)
    elif isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    elif isinstance(obj, dict):
        return {k: _convert_numpy_for_json(v) for k, v in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [_convert_numpy_for_json(item) for item in obj]
    return obj
