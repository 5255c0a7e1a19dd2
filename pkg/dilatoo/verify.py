"""
Independent checks for dilations and monotone families.

Every check returns a ``VerificationReport``; nothing here raises on a failed
check. Exceptions are reserved for inputs that do not satisfy the
preconditions of a check.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg as la

from .core.errors import CommutationFailure, DilationError, DimensionMismatch, PreconditionViolated
from .core.matrix import ArrayLike, HermitianMatrix, Isometry, UnitaryMatrix, as_matrix, as_square
from .core.result import MonotoneCertificate, MonotoneFailure, VerificationReport
from .core.tolerance import TolerancePolicy, resolve
from .linalg.numerics import (
    diagonal_block,
    eig_hermitian,
    operator_norm,
    psd_sqrt,
    simultaneous_diagonalize,
)

logger = logging.getLogger(__name__)

CLASS_KINDS = (
    "hermitian",
    "positive",
    "strictly-positive",
    "normal",
    "unitary",
    "contraction",
    "antisymmetric-real",
)


def is_total_dilation(b: ArrayLike, a: ArrayLike, k: int,
                      policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """Check that every diagonal block of B (on the sum of k copies of H) equals A.

    Raises
    ------
    DimensionMismatch
        If dim B != k * dim A
    """
    policy = resolve(policy)
    b, a = as_square(b), as_square(a)
    if k < 1 or b.shape[0] != k * a.shape[0]:
        raise DimensionMismatch(
            f"dilation of dimension {b.shape[0]} cannot hold {k} blocks of dimension {a.shape[0]}"
        )
    report = VerificationReport()
    scale = max(1.0, operator_norm(a))
    for slot in range(k):
        residual = operator_norm(diagonal_block(b, k, slot) - a) / scale
        report.add_check(f"block[{slot}]", residual, policy.rel_eq)
    return report


def is_monotone_family(family: Sequence[ArrayLike],
                       policy: Optional[TolerancePolicy] = None) -> Union[MonotoneCertificate, MonotoneFailure]:
    """Decide whether a family of hermitian matrices is monotone.

    The family is simultaneously diagonalized and its joint eigenvalue tuples
    are sorted by coordinate sum. A chain exists exactly when consecutive
    tuples in that order are comparable, since componentwise order implies
    order of the sums.

    Returns
    -------
    MonotoneCertificate or MonotoneFailure
        The certificate is truthy, the failure falsy
    """
    policy = resolve(policy)
    ops = [HermitianMatrix(op, policy=policy).data for op in family]
    try:
        u, lam = simultaneous_diagonalize(ops, policy)
    except CommutationFailure as exc:
        return MonotoneFailure(
            "non-commuting",
            f"operators {exc.pair[0]} and {exc.pair[1]} do not commute "
            f"(commutator norm {exc.worst:.3e})",
            exc.pair,
            residual=exc.worst,
            threshold=exc.threshold,
        )

    tol = policy.scaled(policy.rel_eq, max(operator_norm(op) for op in ops))
    order = np.argsort(-lam.sum(axis=0), kind="stable")
    values = lam[:, order]
    for pos in range(values.shape[1] - 1):
        diff = values[:, pos] - values[:, pos + 1]
        if diff.min() < -tol and diff.max() > tol:
            upper, lower = values[:, pos], values[:, pos + 1]
            return MonotoneFailure(
                "incomparable",
                f"joint eigenvalue tuples {_fmt(upper)} and {_fmt(lower)} are incomparable",
                (pos, pos + 1),
                tuples=(upper, lower),
                residual=float(min(-diff.min(), diff.max())),
                threshold=tol,
            )
    # rows may rise by up to tol where two tuples tie; flatten those steps
    values = np.minimum.accumulate(values, axis=1)
    basis = u.data[:, order]
    logger.debug("monotone family of %d operators certified", len(ops))
    return MonotoneCertificate(UnitaryMatrix(basis, policy=policy), values, order)


def monotone_report(family: Sequence[ArrayLike],
                    policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """``is_monotone_family`` folded into a report."""
    outcome = is_monotone_family(family, policy)
    if not outcome:
        return outcome.report()
    return outcome.validate(family, policy)


def is_antimonotone_pair(a: ArrayLike, b: ArrayLike,
                         policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """Check that (A, -B) is a monotone pair."""
    b = HermitianMatrix(b, policy=policy).data
    return monotone_report([a, -b], policy)


def check_class(a: ArrayLike, kind: str,
                policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """Residual based membership test.

    Parameters
    ----------
    a : array-like
        The matrix
    kind : str
        One of ``CLASS_KINDS``
    policy : TolerancePolicy, optional
        Thresholds

    Returns
    -------
    VerificationReport
        Passed iff ``a`` belongs to the class
    """
    if kind not in CLASS_KINDS:
        raise DilationError(f"unknown class kind: {kind}")
    policy = resolve(policy)
    a = as_matrix(a)
    report = VerificationReport()
    if a.shape[0] != a.shape[1]:
        return report.add_failure("square", f"matrix of shape {a.shape} is not square")
    norm = operator_norm(a)
    scale = max(1.0, norm)
    n = a.shape[0]

    if kind in ("hermitian", "positive", "strictly-positive"):
        report.add_check("hermitian", operator_norm(a - a.conj().T), policy.rel_eq * scale)
        if kind != "hermitian":
            lowest = float(la.eigvalsh((a + a.conj().T) / 2)[0])
            if kind == "positive":
                report.add_check("min_eigenvalue", max(0.0, -lowest), policy.psd_slack * scale)
            else:
                report.add_check("min_eigenvalue", max(0.0, policy.psd_slack * scale - lowest), 0.0)
    elif kind == "normal":
        report.add_check("normal", operator_norm(a @ a.conj().T - a.conj().T @ a),
                         policy.scaled(policy.rel_eq, norm ** 2))
    elif kind == "unitary":
        report.add_check("unitary", operator_norm(a.conj().T @ a - np.eye(n)), policy.rel_eq)
    elif kind == "contraction":
        report.add_check("norm", max(0.0, norm - 1.0), policy.psd_slack)
    else:
        report.add_check("real", float(np.abs(a.imag).max()), policy.rel_eq * scale)
        report.add_check("antisymmetric", operator_norm(a + a.T), policy.rel_eq * scale)
    return report


def check_mutual_annihilation(family: Sequence[ArrayLike],
                              policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """Check B_i B_j = 0 for every ordered pair i != j."""
    policy = resolve(policy)
    ops = [as_square(op) for op in family]
    for op in ops[1:]:
        if op.shape != ops[0].shape:
            raise DimensionMismatch(f"shapes {ops[0].shape} and {op.shape} differ")
    norms = [operator_norm(op) for op in ops]
    report = VerificationReport()
    for i, bi in enumerate(ops):
        for j, bj in enumerate(ops):
            if i != j:
                report.add_check(f"product[{i},{j}]", operator_norm(bi @ bj),
                                 policy.scaled(policy.rel_eq, norms[i] * norms[j]))
    return report


def check_compression_inequalities(a: ArrayLike, b: ArrayLike, v: ArrayLike,
                                   policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """Eigenvalue and determinant inequalities for compressions of a monotone pair.

    For a positive monotone pair (A, B) and the subspace E = range(V) checks

    * lambda_k(A_E B_E) <= lambda_k((AB)_E)
    * lambda_k(A_E B_E A_E) <= lambda_k((ABA)_E)
    * det A_E det B_E <= det (AB)_E

    Raises
    ------
    PreconditionViolated
        If (A, B) is not a positive monotone pair
    """
    policy = resolve(policy)
    a, b, v = _positive_pair_on(a, b, v, policy)
    if not is_monotone_family([a, b], policy):
        raise PreconditionViolated("(A, B) is a monotone pair")
    ae, be, abe, abae = _compressions(a, b, v)
    norm_a, norm_b = operator_norm(a), operator_norm(b)
    m = v.shape[1]

    root_b = psd_sqrt(be, policy)
    product = _descending(root_b @ ae @ root_b)
    sandwich = _descending(ae @ be @ ae)
    compressed_product = _descending(abe)
    compressed_sandwich = _descending(abae)

    report = VerificationReport()
    report.add_check("product_eigenvalues",
                     max(0.0, float(np.max(product - compressed_product))),
                     policy.scaled(policy.rel_eq, norm_a * norm_b))
    report.add_check("sandwich_eigenvalues",
                     max(0.0, float(np.max(sandwich - compressed_sandwich))),
                     policy.scaled(policy.rel_eq, norm_a ** 2 * norm_b))
    det_lhs = _det(ae) * _det(be)
    det_rhs = _det(abe)
    report.add_check("determinant", max(0.0, det_lhs - det_rhs),
                     policy.scaled(policy.rel_eq, (norm_a * norm_b) ** m))
    return report


def check_antimonotone_det_reversal(a: ArrayLike, b: ArrayLike, v: ArrayLike,
                                    policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """Check det A_E det B_E >= det (AB)_E for an antimonotone positive pair and a hyperplane E.

    Raises
    ------
    PreconditionViolated
        If E is not a hyperplane or (A, B) is not an antimonotone positive pair
    """
    policy = resolve(policy)
    a, b, v = _positive_pair_on(a, b, v, policy)
    if v.shape[0] - v.shape[1] != 1:
        raise PreconditionViolated("E is a hyperplane", f"codimension {v.shape[0] - v.shape[1]}")
    if not is_antimonotone_pair(a, b, policy).passed:
        raise PreconditionViolated("(A, B) is an antimonotone pair")
    ae, be, abe, _ = _compressions(a, b, v)
    m = v.shape[1]
    report = VerificationReport()
    report.add_check("determinant_reversed",
                     max(0.0, _det(abe) - _det(ae) * _det(be)),
                     policy.scaled(policy.rel_eq, (operator_norm(a) * operator_norm(b)) ** m))
    return report


def check_functional_calculus(certificate: MonotoneCertificate, family: Sequence[ArrayLike],
                              policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """Check that each member is a non-decreasing function of the certificate's generator.

    The generator is diagonalized afresh; each member must be diagonal in
    that basis with values that do not rise as the generator's eigenvalues
    fall.
    """
    policy = resolve(policy)
    u, _ = eig_hermitian(certificate.generator(), policy)
    ud = u.data
    report = VerificationReport()
    for j, op in enumerate(family):
        op = as_square(op)
        scale = max(1.0, operator_norm(op))
        vals = np.einsum("ik,ij,jk->k", ud.conj(), op, ud).real
        residual = operator_norm(op - (ud * vals) @ ud.conj().T) / scale
        report.add_check(f"function_of_generator[{j}]", residual, policy.rel_eq)
        rises = np.diff(vals)
        report.add_check(f"non_decreasing[{j}]",
                         max(0.0, float(rises.max()) if rises.size else 0.0) / scale, policy.rel_eq)
    return report


def _positive_pair_on(a: ArrayLike, b: ArrayLike, v: ArrayLike, policy: TolerancePolicy):
    a, b = as_square(a), as_square(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    if not isinstance(v, Isometry):
        v = Isometry(v, policy=policy)
    if v.dim_rows != a.shape[0]:
        raise DimensionMismatch(f"isometry has {v.dim_rows} rows, operators have dimension {a.shape[0]}")
    for name, op in (("A", a), ("B", b)):
        if not check_class(op, "positive", policy).passed:
            raise PreconditionViolated(f"{name} is positive semidefinite")
    return (a + a.conj().T) / 2, (b + b.conj().T) / 2, v.data


def _compressions(a: np.ndarray, b: np.ndarray, v: np.ndarray):
    def c(x):
        y = v.conj().T @ x @ v
        return (y + y.conj().T) / 2

    return c(a), c(b), c(a @ b), c(a @ b @ a)


def _descending(h: np.ndarray) -> np.ndarray:
    return la.eigvalsh((h + h.conj().T) / 2)[::-1]


def _det(h: np.ndarray) -> float:
    return float(np.prod(_descending(h)))


def _fmt(values: np.ndarray) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in values) + ")"
