"""
Total dilations: operators on a sum of k copies of H whose diagonal blocks
all equal the given operator.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from ..core.errors import CommutationFailure, ConvergenceError, DilationError, DimensionMismatch, PreconditionViolated
from ..core.matrix import ArrayLike, UnitaryMatrix, as_square
from ..core.result import (
    HalvingResult,
    TotalDilationResult,
    TotalFamilyResult,
    VerificationReport,
)
from ..core.tolerance import TolerancePolicy, resolve
from ..linalg.numerics import (
    block_matrix,
    complete_to_unitary,
    eig_hermitian,
    hermitian_part,
    imaginary_part,
    is_normal,
    normalized_trace,
    numerical_range_point,
    operator_norm,
    simultaneous_diagonalize,
    svd,
    unitary_polar_factor,
)
from .. import verify
from .base import Construction, register

logger = logging.getLogger(__name__)

HALVING_METHODS = ("auto", "normal", "general")

_FLIP = np.array([[1.0, -1.0], [-1.0, 1.0]], dtype=complex)


def antisymmetric_canonical(a: ArrayLike,
                            policy: Optional[TolerancePolicy] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Real orthogonal Q with Q^T A Q = [[0, -B], [B, 0]] for real antisymmetric A.

    B is diagonal with the positive imaginary parts of the eigenvalues of A,
    padded with zeros. The eigenvectors come from the hermitian matrix iA:
    an eigenvector v for lambda > 0 gives the orthonormal pair
    x = sqrt(2) Re v, y = sqrt(2) Im v with Ax = lambda y, Ay = -lambda x.

    Parameters
    ----------
    a : array-like
        Real antisymmetric matrix of even dimension 2n
    policy : TolerancePolicy, optional
        Thresholds

    Returns
    -------
    tuple
        (Q, B) as real arrays of shapes (2n, 2n) and (n, n)
    """
    policy = resolve(policy)
    a = as_square(a)
    dim = a.shape[0]
    if dim % 2:
        raise DimensionMismatch(f"antisymmetric canonical form needs even dimension, got {dim}")
    if not verify.check_class(a, "antisymmetric-real", policy).passed:
        raise PreconditionViolated("A is real antisymmetric")
    ar = (a.real - a.real.T) / 2
    half = dim // 2
    scale = max(1.0, operator_norm(ar))

    u, lam = eig_hermitian(1j * ar, policy)
    # dropped pairs must stay under the residual threshold
    cutoff = 0.5 * policy.rel_eq * scale
    positive = [k for k in range(dim) if lam[k] > cutoff]
    vecs = u.data[:, positive]
    xs = math.sqrt(2) * vecs.real
    ys = math.sqrt(2) * vecs.imag
    if positive:
        kernel = la.null_space(np.vstack([xs.T, ys.T]))
    else:
        kernel = np.eye(dim)
    rest = kernel.shape[1] // 2
    q = np.hstack([xs, kernel[:, :rest], ys, kernel[:, rest:]])

    b = np.zeros((half, half))
    b[:len(positive), :len(positive)] = np.diag(lam[positive])
    if q.shape != (dim, dim):
        raise ConvergenceError("antisymmetric canonical form", math.inf, policy.rel_eq * scale)
    canonical = np.block([[np.zeros((half, half)), -b], [b, np.zeros((half, half))]])
    residual = operator_norm(q.T @ ar @ q - canonical)
    if residual > policy.rel_eq * scale:
        raise ConvergenceError("antisymmetric canonical form", residual, policy.rel_eq * scale)
    return q, b


def normal_total_dilation(a: ArrayLike) -> TotalDilationResult:
    """N = [[A, A*], [A*, A]], a normal total dilation of A on H + H."""
    a = as_square(a)
    n = block_matrix([[a, a.conj().T], [a.conj().T, a]])
    return TotalDilationResult(n, a, 2, "normal")


def equal_diagonal_unitary(a: ArrayLike,
                           policy: Optional[TolerancePolicy] = None) -> UnitaryMatrix:
    """Unitary U such that every diagonal entry of U*AU is the normalized trace of A.

    Each step finds a unit vector pinning one diagonal entry to the trace and
    moves on to the trailing principal submatrix, which keeps trace zero.
    """
    policy = resolve(policy)
    a = as_square(a)
    dim = a.shape[0]
    tau = normalized_trace(a)
    m = a - tau * np.eye(dim)
    u = np.eye(dim, dtype=complex)
    for step in range(dim - 1):
        current = u.conj().T @ m @ u
        x = numerical_range_point(current[step:, step:], 0.0)
        rotation = np.eye(dim, dtype=complex)
        rotation[step:, step:] = complete_to_unitary(x, policy).data
        u = u @ rotation

    deviation = float(np.abs(np.diag(u.conj().T @ a @ u) - tau).max())
    threshold = policy.scaled(policy.rel_eq, operator_norm(a))
    if deviation > threshold:
        raise ConvergenceError("equal diagonal unitary", deviation, threshold)
    return UnitaryMatrix(u, policy=policy)


def constant_diagonal_unitary(x: float, k: int,
                              policy: Optional[TolerancePolicy] = None) -> np.ndarray:
    """k-by-k unitary whose diagonal entries all equal x, for 0 <= x <= 1.

    For k = 2 this is the rotation [[x, -s], [s, x]]. For larger k a diagonal
    unitary with p conjugate pairs e^{+-i theta} and k - 2p ones has trace
    k x when cos theta = 1 - k(1 - x) / 2p; p is the smallest count that
    keeps cos theta >= -1. The diagonal is then equalized.
    """
    x = min(1.0, max(0.0, float(x)))
    if k == 2:
        s = math.sqrt(max(0.0, 1.0 - x * x))
        return np.array([[x, -s], [s, x]], dtype=complex)
    deficit = k * (1.0 - x)
    pairs = max(1, math.ceil(deficit / 4))
    pairs = min(pairs, k // 2)
    cos_theta = max(-1.0, 1.0 - deficit / (2 * pairs))
    theta = math.acos(cos_theta)
    spectrum = np.ones(k, dtype=complex)
    spectrum[0:2 * pairs:2] = np.exp(1j * theta)
    spectrum[1:2 * pairs:2] = np.exp(-1j * theta)
    d = np.diag(spectrum)
    r = equal_diagonal_unitary(d, policy).data
    return r.conj().T @ d @ r


def unitary_total_dilation(a: ArrayLike, k: int,
                           policy: Optional[TolerancePolicy] = None) -> TotalDilationResult:
    """Unitary total dilation of a contraction on k copies of H.

    With A = V|A| and |A| = sum x_j p_j p_j*, the unitary is
    (I_k x V) sum_j U_j x p_j p_j*, where U_j is a k-by-k unitary with
    constant diagonal x_j.
    """
    policy = resolve(policy)
    a = as_square(a)
    if k < 2:
        raise PreconditionViolated("k >= 2", f"got k = {k}")
    norm = operator_norm(a)
    if norm > 1.0 + policy.psd_slack:
        raise PreconditionViolated("A is a contraction", f"||A|| = {norm:.6g}")
    dim = a.shape[0]
    v, p = unitary_polar_factor(a, policy)
    q, xs = eig_hermitian(p, policy)
    w = np.zeros((k * dim, k * dim), dtype=complex)
    for j, x in enumerate(xs):
        pj = q.data[:, j:j + 1]
        w += np.kron(constant_diagonal_unitary(x, k, policy), pj @ pj.conj().T)
    u = np.kron(np.eye(k), v.data) @ w
    logger.debug("unitary dilation of a %dx%d contraction on %d blocks", dim, dim, k)
    return TotalDilationResult(u, a, k, "unitary", metadata={"k": k})


def circulant_family_dilation(family: Sequence[ArrayLike]) -> List[TotalDilationResult]:
    """Commuting total dilations of an arbitrary family A_0, ..., A_{n-1}.

    B_k has block (i, j) equal to A_{(k + i - j) mod n}.
    """
    ops = [as_square(op) for op in family]
    if not ops:
        raise DilationError("circulant dilation needs a non-empty family")
    for op in ops[1:]:
        if op.shape != ops[0].shape:
            raise DimensionMismatch(f"shapes {ops[0].shape} and {op.shape} differ")
    n = len(ops)
    results = []
    for k in range(n):
        b = block_matrix([[ops[(k + i - j) % n] for j in range(n)] for i in range(n)])
        results.append(TotalDilationResult(b, ops[k], n, "circulant", metadata={"index": k}))
    return results


def orthogonal_total_dilation(family: Sequence[ArrayLike]) -> List[TotalDilationResult]:
    """Mutually annihilating total dilations of A_0, ..., A_n on 2^n copies of H.

    Built recursively: the dilations C_j of the first n operators become
    E_2 x C_j, and the last operator becomes [[1, -1], [-1, 1]] x A_n on
    every block.
    """
    ops = [as_square(op) for op in family]
    if not ops:
        raise DilationError("orthogonal dilation needs a non-empty family")
    for op in ops[1:]:
        if op.shape != ops[0].shape:
            raise DimensionMismatch(f"shapes {ops[0].shape} and {op.shape} differ")
    dilations = [ops[0]]
    ones = np.ones((2, 2), dtype=complex)
    for j, op in enumerate(ops[1:], start=1):
        copies = 2 ** (j - 1)
        dilations = [np.kron(ones, c) for c in dilations]
        dilations.append(np.kron(_FLIP, np.kron(np.eye(copies), op)))
    k = 2 ** (len(ops) - 1)
    return [TotalDilationResult(b, a, k, "orthogonal", metadata={"index": j})
            for j, (b, a) in enumerate(zip(dilations, ops))]


def halving_total_dilation(a: ArrayLike,
                           method: str = "auto",
                           policy: Optional[TolerancePolicy] = None) -> HalvingResult:
    """Unitary W with W*AW = [[B, *], [*, B]].

    Parameters
    ----------
    a : array-like
        Square matrix of even dimension
    method : str
        ``'general'`` works for every A; ``'normal'`` uses a common eigenbasis
        of Re A and Im A and requires A normal; ``'auto'`` tries ``'normal'``
        when A is normal and falls back to ``'general'`` when Re A and Im A
        are not close enough to commuting for a common eigenbasis
    policy : TolerancePolicy, optional
        Thresholds

    Returns
    -------
    HalvingResult
        Conjugator W and common block B
    """
    policy = resolve(policy)
    a = as_square(a)
    dim = a.shape[0]
    if dim % 2:
        raise DimensionMismatch(f"halving needs even dimension, got {dim}")
    if method not in HALVING_METHODS:
        raise ValueError(f"Unknown halving method: {method}")
    if method == "normal" and not is_normal(a, policy):
        raise PreconditionViolated("A is normal")
    n = dim // 2
    mix = np.block([[np.eye(n), np.eye(n)], [-np.eye(n), np.eye(n)]]) / math.sqrt(2)

    w = None
    if method == "normal" or (method == "auto" and is_normal(a, policy)):
        try:
            u, lam = simultaneous_diagonalize([hermitian_part(a), imaginary_part(a)], policy)
        except (CommutationFailure, ConvergenceError):
            if method == "normal":
                raise
            logger.info("no common eigenbasis of Re A and Im A, using the general method")
        else:
            spectrum = lam[0] + 1j * lam[1]
            common = np.diag((spectrum[:n] + spectrum[n:]) / 2)
            w = u.data @ mix
            method = "normal"
    if w is None:
        method = "general"
        w0, _ = eig_hermitian(hermitian_part(a), policy)
        a1 = w0.adjoint @ a @ w0.data
        y, x, z = a1[:n, :n], a1[:n, n:], a1[n:, n:]
        polar, _ = unitary_polar_factor(x, policy)
        d = la.block_diag(polar.data, np.eye(n))
        y0 = polar.adjoint @ y @ polar.data
        common = (y0 + z) / 2
        w = w0.data @ d @ mix
    logger.debug("halving of a %dx%d matrix by the %s method", dim, dim, method)
    return HalvingResult(a, UnitaryMatrix(w, policy=policy), common, metadata={"method": method})


def equal_singular_halving(x: ArrayLike,
                           policy: Optional[TolerancePolicy] = None) -> np.ndarray:
    """Rank n projection E such that XE and XE^perp have the same singular values.

    E projects onto the first half of the conjugator that halves X*X.
    """
    policy = resolve(policy)
    x = as_square(x)
    if x.shape[0] % 2:
        raise DimensionMismatch(f"equal singular halving needs even dimension, got {x.shape[0]}")
    halving = halving_total_dilation(x.conj().T @ x, method="normal", policy=policy)
    n = x.shape[0] // 2
    f = halving.conjugator.data[:, :n]
    return f @ f.conj().T


def singular_values_report(x: ArrayLike, e: ArrayLike,
                           policy: Optional[TolerancePolicy] = None) -> VerificationReport:
    """Compare the singular values of XE and XE^perp."""
    policy = resolve(policy)
    x, e = as_square(x), as_square(e)
    dim = x.shape[0]
    report = VerificationReport()
    report.add_check("projection", operator_norm(e @ e - e) + operator_norm(e - e.conj().T), policy.rel_eq)
    report.add_check("rank", abs(float(np.trace(e).real) - dim / 2), policy.rel_eq * dim)
    _, s1, _ = svd(x @ e, policy)
    _, s2, _ = svd(x @ (np.eye(dim) - e), policy)
    report.add_check("singular_values", float(np.abs(s1 - s2).max()),
                     policy.scaled(policy.rel_eq, operator_norm(x)))
    return report


@register
class AntisymmetricConstruction(Construction):
    """Real antisymmetric A as a total dilation of the zero operator."""

    name = "antisymmetric"
    description = "canonical form of a real antisymmetric matrix"

    def construct(self, operators):
        a = operators[0]
        q, b = antisymmetric_canonical(a, self.policy)
        half = a.shape[0] // 2
        return TotalDilationResult(q.T @ a @ q, np.zeros((half, half)), 2, self.name,
                                   metadata={"conjugator": q, "B": b})

    def verify(self, result):
        report = super().verify(result)
        q = np.asarray(result.metadata["conjugator"])
        report.add_check("conjugator_orthogonal", operator_norm(q.T @ q - np.eye(q.shape[0])),
                         self.policy.rel_eq)
        return report


@register
class NormalConstruction(Construction):
    name = "normal"
    description = "normal total dilation [[A, A*], [A*, A]]"

    def construct(self, operators):
        return normal_total_dilation(operators[0])

    def verify(self, result):
        report = super().verify(result)
        return report.merge_from(verify.check_class(result.dilation, "normal", self.policy))


@register
class EqualDiagonalConstruction(Construction):
    """The normalized trace of A, totally dilated into A."""

    name = "equal-diagonal"
    description = "unitary equalizing the diagonal to the normalized trace"

    def construct(self, operators):
        a = operators[0]
        u = equal_diagonal_unitary(a, self.policy)
        tau = np.array([[normalized_trace(a)]])
        return TotalDilationResult(u.adjoint @ a @ u.data, tau, a.shape[0], self.name,
                                   metadata={"conjugator": u.data})


@register
class UnitaryConstruction(Construction):
    name = "unitary"
    description = "unitary total dilation of a contraction"

    def __init__(self, k: int = 2, policy: Optional[TolerancePolicy] = None):
        super().__init__(policy)
        self.k = k

    def construct(self, operators):
        return unitary_total_dilation(operators[0], self.k, self.policy)

    def verify(self, result):
        report = super().verify(result)
        return report.merge_from(verify.check_class(result.dilation, "unitary", self.policy))


@register
class HalvingConstruction(Construction):
    name = "halving"
    description = "halving decomposition with equal diagonal half-blocks"

    def __init__(self, method: str = "auto", policy: Optional[TolerancePolicy] = None):
        super().__init__(policy)
        self.method = method

    def construct(self, operators):
        return halving_total_dilation(operators[0], self.method, self.policy)


@register
class EqualSingularConstruction(Construction):
    name = "equal-singular"
    description = "projection splitting the singular values of X evenly"

    def construct(self, operators):
        x = operators[0]
        e = equal_singular_halving(x, self.policy)
        result = halving_total_dilation(x.conj().T @ x, method="normal", policy=self.policy)
        result.set_metadata("projection", e)
        result.set_metadata("operator", x)
        return result

    def verify(self, result):
        report = super().verify(result)
        x = np.asarray(result.metadata["operator"])
        e = np.asarray(result.metadata["projection"])
        return report.merge_from(singular_values_report(x, e, self.policy))


@register
class CirculantConstruction(Construction):
    name = "circulant"
    description = "commuting block circulant total dilations of a family"
    arity = None

    def construct(self, operators):
        return TotalFamilyResult(circulant_family_dilation(operators), self.name)

    def verify(self, result):
        report = super().verify(result)
        ops = result.dilations
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                c = operator_norm(ops[i] @ ops[j] - ops[j] @ ops[i])
                threshold = self.policy.scaled(self.policy.rel_eq,
                                               operator_norm(ops[i]) * operator_norm(ops[j]))
                report.add_check(f"commutator[{i},{j}]", c, threshold)
        return report


@register
class OrthogonalConstruction(Construction):
    name = "orthogonal"
    description = "mutually annihilating total dilations of a family"
    arity = None

    def construct(self, operators):
        return TotalFamilyResult(orthogonal_total_dilation(operators), self.name)

    def verify(self, result):
        report = super().verify(result)
        report.merge_from(verify.check_mutual_annihilation(result.dilations, self.policy))
        for kind in ("hermitian", "positive", "normal"):
            if all(verify.check_class(a, kind, self.policy).passed for a in result.bases):
                for j, b in enumerate(result.dilations):
                    report.merge_from(verify.check_class(b, kind, self.policy), f"{kind}[{j}].")
        return report
