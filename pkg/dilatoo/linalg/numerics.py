"""
Dense matrix primitives shared by every construction.

All factorizations go through LAPACK (``scipy.linalg``) and are followed by a
canonicalization step (descending order, phase-normalized vectors, ordered
ties) so that identical inputs give bit-identical outputs.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
from scipy.optimize import brentq

from ..core.errors import (
    CommutationFailure,
    ContainmentError,
    ConvergenceError,
    DilationError,
    DimensionMismatch,
    PreconditionViolated,
)
from ..core.matrix import (
    ArrayLike,
    HermitianMatrix,
    Isometry,
    UnitaryMatrix,
    as_matrix,
    as_square,
)
from ..core.tolerance import TolerancePolicy, resolve

logger = logging.getLogger(__name__)

# Relative size below which a vector component counts as zero when fixing phases.
_PHASE_CUTOFF = 1e-8
# Accuracy target of the 2x2 numerical range step.
_KERNEL_TOL = 1e-12


def operator_norm(a: ArrayLike) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(as_matrix(a), 2))


def frobenius_norm(a: ArrayLike) -> float:
    return float(np.linalg.norm(as_matrix(a), "fro"))


def commutator(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Return AB - BA."""
    a, b = as_square(a), as_square(b)
    _same_shape(a, b)
    return a @ b - b @ a


def hermitian_part(a: ArrayLike) -> np.ndarray:
    """Re A = (A + A*) / 2."""
    a = as_square(a)
    return (a + a.conj().T) / 2


def imaginary_part(a: ArrayLike) -> np.ndarray:
    """Im A = (A - A*) / 2i, so that A = Re A + i Im A."""
    a = as_square(a)
    return (a - a.conj().T) / 2j


def is_normal(a: ArrayLike, policy: Optional[TolerancePolicy] = None) -> bool:
    policy = resolve(policy)
    a = as_square(a)
    residual = operator_norm(a @ a.conj().T - a.conj().T @ a)
    return residual <= policy.scaled(policy.rel_eq, operator_norm(a) ** 2)


def normalized_trace(a: ArrayLike) -> complex:
    """Return (1/n) Tr A."""
    a = as_square(a)
    return complex(np.trace(a) / a.shape[0])


def all_ones(k: int) -> np.ndarray:
    """The k-by-k matrix E_k whose entries all equal 1."""
    if k < 1:
        raise DilationError(f"all_ones needs k >= 1, got {k}")
    return np.ones((k, k), dtype=complex)


def kron(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Kronecker product with (A x B)[(i,p),(j,q)] = A[i,j] B[p,q]."""
    return np.kron(as_matrix(a), as_matrix(b))


def block_matrix(blocks: Sequence[Sequence[ArrayLike]]) -> np.ndarray:
    """Assemble a block matrix from a square grid of equally sized blocks."""
    grid = [[as_matrix(b) for b in row] for row in blocks]
    if not grid or any(len(row) != len(grid) for row in grid):
        raise DimensionMismatch("block grid must be square and non-empty")
    shape = grid[0][0].shape
    if any(b.shape != shape for row in grid for b in row):
        raise DimensionMismatch("all blocks must have the same shape")
    return np.block(grid)


def diagonal_block(b: ArrayLike, k: int, slot: int) -> np.ndarray:
    """Return the ``slot``-th diagonal block of an operator on the sum of k copies."""
    b = as_square(b)
    if k < 1 or b.shape[0] % k:
        raise DimensionMismatch(f"dimension {b.shape[0]} is not a multiple of k = {k}")
    if not 0 <= slot < k:
        raise DilationError(f"slot {slot} out of range for k = {k}")
    dim = b.shape[0] // k
    return b[slot * dim:(slot + 1) * dim, slot * dim:(slot + 1) * dim].copy()


def block_embed_isometry(k: int, slot: int, dim: int) -> Isometry:
    """Canonical embedding of H as the ``slot``-th summand of the sum of k copies of H.

    Parameters
    ----------
    k : int
        Number of summands
    slot : int
        Target summand, 0 <= slot < k
    dim : int
        Dimension of H

    Returns
    -------
    Isometry
        The (k*dim) x dim matrix whose ``slot``-th block is the identity
    """
    if k < 1 or dim < 1:
        raise DilationError(f"k and dim must be positive, got k={k}, dim={dim}")
    if not 0 <= slot < k:
        raise DilationError(f"slot {slot} out of range for k = {k}")
    v = np.zeros((k * dim, dim), dtype=complex)
    v[slot * dim:(slot + 1) * dim, :] = np.eye(dim)
    return Isometry(v, metadata={"k": k, "slot": slot})


def compress(b: ArrayLike, v: ArrayLike, policy: Optional[TolerancePolicy] = None) -> np.ndarray:
    """Return V*BV.

    Parameters
    ----------
    b : array-like
        Square operator on the large space
    v : Isometry or array-like
        Embedding of the small space
    policy : TolerancePolicy, optional
        Used when ``v`` still has to be checked as an isometry
    """
    b = as_square(b)
    if not isinstance(v, Isometry):
        v = Isometry(v, policy=policy)
    if b.shape[0] != v.dim_rows:
        raise DimensionMismatch(
            f"operator of dimension {b.shape[0]} cannot be compressed by a "
            f"{v.dim_rows}x{v.dim_cols} isometry"
        )
    vd = v.data
    return vd.conj().T @ b @ vd


def eig_hermitian(h: ArrayLike,
                  policy: Optional[TolerancePolicy] = None) -> Tuple[UnitaryMatrix, np.ndarray]:
    """Eigendecomposition of a hermitian matrix with eigenvalues in decreasing order.

    Each eigenvector is scaled so that its first non-negligible component is
    real positive, and eigenvectors sharing an eigenvalue are ordered
    lexicographically by their entries.

    Parameters
    ----------
    h : HermitianMatrix or array-like
        The matrix
    policy : TolerancePolicy, optional
        Thresholds

    Returns
    -------
    tuple
        (U, lambdas) with H U = U diag(lambdas)

    Raises
    ------
    ConvergenceError
        If LAPACK fails or the reconstruction residual is above ``eig_residual``
    """
    policy = resolve(policy)
    if not isinstance(h, HermitianMatrix):
        h = HermitianMatrix(h, policy=policy)
    a = h.data
    scale = max(1.0, h.norm())
    try:
        w, v = la.eigh(a)
    except la.LinAlgError as exc:
        raise ConvergenceError("hermitian eigensolve", math.inf, policy.eig_residual) from exc
    w = w[::-1].copy()
    v = _normalize_phases(v[:, ::-1])
    v = _order_ties(w, v, policy.eig_residual * scale / 10)
    residual = float(np.linalg.norm(a @ v - v * w, 2))
    if residual > policy.eig_residual * scale:
        raise ConvergenceError("hermitian eigensolve", residual, policy.eig_residual * scale)
    return UnitaryMatrix(v, policy=policy), w


def svd(a: ArrayLike,
        policy: Optional[TolerancePolicy] = None) -> Tuple[UnitaryMatrix, np.ndarray, UnitaryMatrix]:
    """Singular value decomposition A = W1 diag(sigmas) W2* of a square matrix.

    The right singular vectors are phase-normalized like eigenvectors and the
    left ones follow with the same phases.
    """
    policy = resolve(policy)
    a = as_square(a)
    scale = max(1.0, operator_norm(a))
    try:
        w1, s, w2h = la.svd(a)
    except la.LinAlgError as exc:
        raise ConvergenceError("singular value decomposition", math.inf, policy.eig_residual) from exc
    w2 = w2h.conj().T
    phases = _leading_phases(w2)
    w1 = w1 * phases
    w2 = w2 * phases
    residual = float(np.linalg.norm(a - (w1 * s) @ w2.conj().T, 2))
    if residual > policy.eig_residual * scale:
        raise ConvergenceError("singular value decomposition", residual, policy.eig_residual * scale)
    return UnitaryMatrix(w1, policy=policy), s, UnitaryMatrix(w2, policy=policy)


def unitary_polar_factor(x: ArrayLike,
                         policy: Optional[TolerancePolicy] = None) -> Tuple[UnitaryMatrix, HermitianMatrix]:
    """Polar decomposition X = U |X| with U unitary even when X is singular.

    The partial isometry of the polar decomposition is extended to a unitary
    through the SVD: U = W1 W2*, |X| = W2 diag(sigmas) W2*.
    """
    policy = resolve(policy)
    w1, s, w2 = svd(x, policy)
    u = w1.data @ w2.adjoint
    p = (w2.data * s) @ w2.adjoint
    return UnitaryMatrix(u, policy=policy), HermitianMatrix(p, policy=policy)


def psd_sqrt(h: ArrayLike, policy: Optional[TolerancePolicy] = None) -> np.ndarray:
    """Positive square root of a positive semidefinite matrix.

    Eigenvalues inside ``[-psd_slack, 0)`` are clipped to zero.
    """
    policy = resolve(policy)
    u, w = eig_hermitian(h, policy)
    floor = policy.scaled(policy.psd_slack, abs(w[0]))
    if w[-1] < -floor:
        raise PreconditionViolated("positive semidefinite", f"smallest eigenvalue {w[-1]:.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (u.data * root) @ u.adjoint


def complete_to_unitary(x: ArrayLike, policy: Optional[TolerancePolicy] = None) -> UnitaryMatrix:
    """Return a unitary whose first column is the unit vector ``x``."""
    policy = resolve(policy)
    vec = np.asarray(x, dtype=complex).reshape(-1)
    if vec.size == 0 or abs(np.linalg.norm(vec) - 1.0) > policy.rel_eq:
        raise DilationError("complete_to_unitary needs a unit vector")
    q, r = la.qr(vec.reshape(-1, 1))
    q = q.astype(complex)
    # x = q[:, 0] * r[0, 0] with |r[0, 0]| = 1
    q[:, 0] = q[:, 0] * r[0, 0]
    return UnitaryMatrix(q, policy=policy)


def simultaneous_diagonalize(family: Sequence[ArrayLike],
                             policy: Optional[TolerancePolicy] = None) -> Tuple[UnitaryMatrix, np.ndarray]:
    """Common eigenbasis of a commuting family of hermitian matrices.

    The basis is found by sequential refinement: the eigenspaces of the first
    operator are split by the second, and so on. No random combinations are
    used, so equal inputs give equal outputs.

    Parameters
    ----------
    family : list of array-like
        Hermitian matrices of one dimension
    policy : TolerancePolicy, optional
        Thresholds

    Returns
    -------
    tuple
        (U, Lambda) with A_j = U diag(Lambda[j]) U* for every j

    Raises
    ------
    CommutationFailure
        If some commutator is above ``rel_eq * max(1, |A_i| |A_j|)``
    """
    policy = resolve(policy)
    ops = [op.data if isinstance(op, HermitianMatrix) else HermitianMatrix(op, policy=policy).data
           for op in family]
    if not ops:
        raise DilationError("simultaneous_diagonalize needs at least one operator")
    for op in ops[1:]:
        _same_shape(ops[0], op)
    norms = [operator_norm(op) for op in ops]

    worst, worst_pair, worst_ratio, worst_threshold = 0.0, (0, 0), 0.0, policy.rel_eq
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            c = operator_norm(ops[i] @ ops[j] - ops[j] @ ops[i])
            threshold = policy.scaled(policy.rel_eq, norms[i] * norms[j])
            if c / threshold > worst_ratio:
                worst, worst_pair, worst_ratio, worst_threshold = c, (i, j), c / threshold, threshold
    if worst_ratio > 1.0:
        raise CommutationFailure(worst, worst_pair, worst_threshold)

    dim = ops[0].shape[0]
    gaps = [policy.scaled(policy.rel_eq, n) for n in norms]
    u = _normalize_phases(_refine(ops, gaps, np.eye(dim, dtype=complex), 0))
    lam = np.array([np.einsum("ik,ij,jk->k", u.conj(), op, u).real for op in ops])

    for j, op in enumerate(ops):
        residual = operator_norm(op - (u * lam[j]) @ u.conj().T)
        threshold = policy.scaled(policy.rel_eq, norms[j])
        if residual > threshold:
            raise ConvergenceError(f"simultaneous diagonalization of operator {j}", residual, threshold)
    logger.debug("simultaneously diagonalized %d operators of dimension %d", len(ops), dim)
    return UnitaryMatrix(u, policy=policy), lam


def _refine(ops: List[np.ndarray], gaps: List[float], basis: np.ndarray, i: int) -> np.ndarray:
    if i == len(ops) or basis.shape[1] == 1:
        return basis
    sub = basis.conj().T @ ops[i] @ basis
    w, v = la.eigh((sub + sub.conj().T) / 2)
    w, v = w[::-1], v[:, ::-1]
    refined = basis @ v
    start = 0
    for end in range(1, len(w) + 1):
        if end == len(w) or w[end - 1] - w[end] > gaps[i]:
            if end - start > 1:
                refined[:, start:end] = _refine(ops, gaps, refined[:, start:end], i + 1)
            start = end
    return refined


def numerical_range_point(a: ArrayLike, target: Optional[complex] = None) -> np.ndarray:
    """Find a unit vector x with <Ax, x> = target.

    ``target`` defaults to the normalized trace. The search works in the
    plane of at most three coordinate vectors, so the target must lie in the
    convex hull of the diagonal entries of A (always true for the normalized
    trace).

    Raises
    ------
    ContainmentError
        If the target is outside the convex hull of the diagonal
    ConvergenceError
        If the 2x2 root finder misses its accuracy target
    """
    a = as_square(a)
    if target is None:
        target = normalized_trace(a)
    m = a - complex(target) * np.eye(a.shape[0])
    x = _zero_point(m)
    residual = abs(x.conj() @ m @ x)
    threshold = 10 * _KERNEL_TOL * max(1.0, operator_norm(m))
    if residual > threshold:
        raise ConvergenceError("numerical range point", residual, threshold)
    return x


def _zero_point(m: np.ndarray) -> np.ndarray:
    """Unit vector x with x*Mx = 0, given 0 in the convex hull of diag(M)."""
    n = m.shape[0]
    tol = _KERNEL_TOL * max(1.0, operator_norm(m))
    d = np.diag(m)
    i = int(np.argmax(np.abs(d)))
    if abs(d[i]) <= tol:
        return _unit(n, 0)

    rot = np.conj(d[i]) / abs(d[i])
    mr = rot * m
    dr = rot * d

    # leftmost point of conv(diag) on the real axis: a real vertex or an edge crossing
    best_value, best = math.inf, None
    for l in range(n):
        if l != i and abs(dr[l].imag) <= tol and dr[l].real < best_value:
            best_value, best = dr[l].real, (l,)
    upper = [j for j in range(n) if dr[j].imag > tol]
    lower = [k for k in range(n) if dr[k].imag < -tol]
    for j in upper:
        for k in lower:
            s = dr[j].imag / (dr[j].imag - dr[k].imag)
            crossing = (dr[j] + s * (dr[k] - dr[j])).real
            if crossing < best_value:
                best_value, best = crossing, (j, k)
    if best is None or best_value > tol:
        raise ContainmentError("target is not in the convex hull of the diagonal entries")

    if len(best) == 1:
        y = _unit(n, best[0])
    else:
        j, k = best
        u = _two_by_two_point(mr[np.ix_([j, k], [j, k])], best_value)
        y = u[0] * _unit(n, j) + u[1] * _unit(n, k)
    p = y.conj() @ mr @ y
    if abs(p) <= tol:
        return y

    ei = _unit(n, i)
    frame = np.column_stack([ei, y])
    u = _two_by_two_point(frame.conj().T @ mr @ frame, 0.0)
    return frame @ u


def _two_by_two_point(c: np.ndarray, w: complex) -> np.ndarray:
    """Unit u in C^2 with u*Cu = w for w on the segment [C00, C11].

    u = (cos t, e^{i psi} sin t); psi makes the cross term parallel to the
    segment and the angle is a root of a scalar equation on [0, pi/2].
    """
    a, b = c[0, 0], c[1, 1]
    beta, gamma = c[0, 1], c[1, 0]
    delta = b - a
    if abs(delta) <= _KERNEL_TOL * max(1.0, abs(a), abs(b)):
        return np.array([1.0, 0.0], dtype=complex)
    p = beta * np.conj(delta)
    q = gamma * np.conj(delta)
    psi = math.atan2(-(p.imag + q.imag), p.real - q.real)
    cross = beta * np.exp(1j * psi) + gamma * np.exp(-1j * psi)
    rho = (cross * np.conj(delta)).real / abs(delta) ** 2
    t = min(1.0, max(0.0, ((w - a) * np.conj(delta)).real / abs(delta) ** 2))

    def f(theta: float) -> float:
        return math.sin(theta) ** 2 + 0.5 * rho * math.sin(2 * theta) - t

    if t <= 0.0:
        theta = 0.0
    elif f(math.pi / 2) <= 0.0:
        theta = math.pi / 2
    else:
        theta = brentq(f, 0.0, math.pi / 2, xtol=1e-15)
    return np.array([math.cos(theta), np.exp(1j * psi) * math.sin(theta)], dtype=complex)


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[i] = 1.0
    return e


def _leading_phases(v: np.ndarray) -> np.ndarray:
    """Unit scalars that make the first significant entry of each column real positive."""
    phases = np.ones(v.shape[1], dtype=complex)
    for c in range(v.shape[1]):
        col = v[:, c]
        cutoff = _PHASE_CUTOFF * np.abs(col).max()
        idx = int(np.argmax(np.abs(col) > cutoff))
        if abs(col[idx]) > 0:
            phases[c] = np.conj(col[idx]) / abs(col[idx])
    return phases


def _normalize_phases(v: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(v * _leading_phases(v))


def _order_ties(w: np.ndarray, v: np.ndarray, gap: float) -> np.ndarray:
    """Sort eigenvectors of (numerically) equal eigenvalues lexicographically, largest first."""
    v = v.copy()
    start = 0
    for end in range(1, len(w) + 1):
        if end == len(w) or w[end - 1] - w[end] > gap:
            if end - start > 1:
                cols = list(range(start, end))
                cols.sort(key=lambda c: _entry_key(v[:, c]), reverse=True)
                v[:, start:end] = v[:, cols]
            start = end
    return v


def _entry_key(col: np.ndarray) -> tuple:
    return tuple(np.column_stack((col.real, col.imag)).ravel())


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
