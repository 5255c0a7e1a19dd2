"""
Monotone dilations.

The block operators used throughout, for an operator A on H and k >= 1:

* ``dilate_diag(A, k)``   A(k): A repeated on the diagonal of k copies of H
* ``dilate_ones(A, k)``   A[k]: every block equal to A
* ``dilate_bridge(A, k)`` A<k>: diagonal blocks A, off-diagonal blocks (I - A)/(k - 1)

For k = 1 all three return a copy of A.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la

from ..core.errors import ContainmentError, DilationError, DimensionMismatch, PreconditionViolated, VerificationFailed
from ..core.matrix import ArrayLike, Isometry, as_square
from ..core.result import MonotoneFamilyResult
from ..core.tolerance import TolerancePolicy, resolve
from ..linalg.numerics import (
    all_ones,
    block_embed_isometry,
    complete_to_unitary,
    frobenius_norm,
    operator_norm,
    simultaneous_diagonalize,
)
from .. import verify
from .base import Construction, register

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConditionSpec:
    """Block counts k_1, ..., k_n for a family A_0, ..., A_n.

    ``k(0)`` is 1 by convention. ``k_prime(j)`` is the product of the counts
    before j and ``k_double_prime(j)`` the product of the counts after j, so
    ``k_prime(j) * k(j) * k_double_prime(j) == total`` for every j.
    """

    ks: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))
        if any(k < 1 for k in self.ks):
            raise DilationError(f"block counts must be positive, got {self.ks}")

    @classmethod
    def parse(cls, text: str) -> "ConditionSpec":
        """Parse a comma separated list such as ``'2,3'``."""
        text = text.strip()
        if not text:
            return cls(())
        try:
            return cls(tuple(int(part) for part in text.split(",")))
        except ValueError:
            raise DilationError(f"invalid block counts: {text!r}") from None

    @property
    def n(self) -> int:
        return len(self.ks)

    @property
    def total(self) -> int:
        return reduce(lambda x, y: x * y, self.ks, 1)

    def k(self, j: int) -> int:
        self._check(j)
        return 1 if j == 0 else self.ks[j - 1]

    def k_prime(self, j: int) -> int:
        self._check(j)
        return reduce(lambda x, y: x * y, self.ks[:max(0, j - 1)], 1)

    def k_double_prime(self, j: int) -> int:
        self._check(j)
        return reduce(lambda x, y: x * y, self.ks[j:], 1)

    def _check(self, j: int) -> None:
        if not 0 <= j <= self.n:
            raise DilationError(f"index {j} out of range for {self.n} block counts")


@dataclass(frozen=True)
class Triangle:
    """Triangle with vertices strictly increasing in both coordinates, inside the open quadrant."""

    v1: complex
    v2: complex
    v3: complex

    def __post_init__(self):
        vs = [complex(v) for v in (self.v1, self.v2, self.v3)]
        for name, v in zip(("v1", "v2", "v3"), vs):
            object.__setattr__(self, name, v)
        if not (vs[0].real < vs[1].real < vs[2].real and vs[0].imag < vs[1].imag < vs[2].imag):
            raise DilationError("triangle vertices must increase in both coordinates")
        if vs[0].real <= 0 or vs[0].imag <= 0:
            raise DilationError("triangle must lie in the open quadrant")

    @property
    def vertices(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3], dtype=complex)

    def barycentric(self, z: complex) -> np.ndarray:
        """Coordinates c with sum(c) = 1 and sum(c_i v_i) = z."""
        v = self.vertices
        system = np.vstack([v.real, v.imag, np.ones(3)])
        return la.solve(system, np.array([z.real, z.imag, 1.0]))

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        return bool(self.barycentric(complex(z)).min() >= -tol)


def dilate_diag(a: ArrayLike, k: int) -> np.ndarray:
    """A(k)."""
    a = as_square(a)
    _check_k(k)
    if k == 1:
        return a.copy()
    return np.kron(np.eye(k), a)


def dilate_ones(a: ArrayLike, k: int) -> np.ndarray:
    """A[k]; positive whenever A is."""
    a = as_square(a)
    _check_k(k)
    if k == 1:
        return a.copy()
    return np.kron(all_ones(k), a)


def dilate_bridge(a: ArrayLike, k: int) -> np.ndarray:
    """A<k> = ((I - A)/(k - 1))[k] + ((kA - I)/(k - 1))(k).

    Positive whenever (1/k) I <= A <= I.
    """
    a = as_square(a)
    _check_k(k)
    if k == 1:
        return a.copy()
    dim = a.shape[0]
    b = np.kron(all_ones(k), (np.eye(dim) - a) / (k - 1))
    for slot in range(k):
        b[slot * dim:(slot + 1) * dim, slot * dim:(slot + 1) * dim] = a
    return b


def check_bridge_commutation(a: ArrayLike, b: ArrayLike, k: int,
                             bridge: Optional[ArrayLike] = None,
                             policy: Optional[TolerancePolicy] = None) -> bool:
    """Check A[k] B<k> = A[k] = B<k> A[k].

    Holds for arbitrary A and B of the same dimension. ``bridge`` replaces
    B<k> when given, which lets a caller test a modified operator.
    """
    policy = resolve(policy)
    a, b = as_square(a), as_square(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    if k < 2:
        raise DilationError(f"bridge commutation needs k >= 2, got {k}")
    ones = dilate_ones(a, k)
    bridged = dilate_bridge(b, k) if bridge is None else as_square(bridge)
    if bridged.shape != ones.shape:
        raise DimensionMismatch(f"bridge has shape {bridged.shape}, expected {ones.shape}")
    threshold = policy.scaled(policy.rel_eq, operator_norm(ones) * operator_norm(bridged))
    left = operator_norm(ones @ bridged - ones)
    right = operator_norm(bridged @ ones - ones)
    return max(left, right) <= threshold


def monotone_pair(a: ArrayLike, b: ArrayLike, k: int,
                  policy: Optional[TolerancePolicy] = None) -> MonotoneFamilyResult:
    """Monotone pair of positive operators (A[k], B<k>) totally dilating (A, B).

    Parameters
    ----------
    a : array-like
        Positive semidefinite operator
    b : array-like
        Operator with (1/k) I <= B <= I
    k : int
        Number of blocks, k >= 2
    policy : TolerancePolicy, optional
        Thresholds

    Raises
    ------
    PreconditionViolated
        If A is not positive or the spectrum of B leaves [1/k, 1]
    """
    policy = resolve(policy)
    a, b = as_square(a), as_square(b)
    _same_dimension([a, b])
    if k < 2:
        raise PreconditionViolated("k >= 2", f"got k = {k}")
    _require_positive(a, 0, policy)
    _require_band(b, k, 1, policy)
    dilations = [dilate_ones(a, k), dilate_bridge(b, k)]
    embedding = block_embed_isometry(k, 0, a.shape[0])
    return _monotone_result(dilations, [a, b], embedding, True, "pair", {"k": k}, policy)


def monotone_family(family: Sequence[ArrayLike],
                    spec: Union[ConditionSpec, Sequence[int]],
                    policy: Optional[TolerancePolicy] = None) -> MonotoneFamilyResult:
    """Monotone family of positive operators totally dilating A_0, ..., A_n.

    B_j = A_j(k'_j)<k_j>[k''_j] on the sum of k_1 ... k_n copies of H.
    A_0 must be positive; for j >= 1 either (1/k_j) I <= A_j <= I, or
    cond(A_j) <= k_j, in which case A_j is divided by its largest eigenvalue
    and B_j multiplied back. The factors are stored in ``metadata['scales']``.
    """
    policy = resolve(policy)
    spec = spec if isinstance(spec, ConditionSpec) else ConditionSpec(tuple(spec))
    ops = [as_square(op) for op in family]
    if not ops:
        raise DilationError("monotone family needs at least one operator")
    _same_dimension(ops)
    if len(ops) != spec.n + 1:
        raise DilationError(f"{len(ops)} operators need {len(ops) - 1} block counts, got {spec.n}")
    _require_positive(ops[0], 0, policy)

    scales = [1.0] * len(ops)
    for j in range(1, len(ops)):
        scales[j] = _band_scale(ops[j], spec.k(j), j, policy)

    dilations = []
    for j, op in enumerate(ops):
        b = dilate_ones(dilate_bridge(dilate_diag(op / scales[j], spec.k_prime(j)), spec.k(j)),
                        spec.k_double_prime(j))
        dilations.append(b * scales[j] if scales[j] != 1.0 else b)
    embedding = block_embed_isometry(spec.total, 0, ops[0].shape[0])
    metadata = {"ks": list(spec.ks), "scales": scales}
    logger.debug("monotone family of %d operators on %d blocks", len(ops), spec.total)
    return _monotone_result(dilations, ops, embedding, True, "family", metadata, policy)


def hermitian_monotone_family(family: Sequence[ArrayLike],
                              policy: Optional[TolerancePolicy] = None) -> MonotoneFamilyResult:
    """Monotone family of hermitian operators totally dilating any hermitian A_0, ..., A_n.

    Each A_j is mapped to alpha_j A_j + (3/4) I with alpha_j = 1 / (4 |A_j|_F)
    (alpha_j = 1 for the zero matrix), which puts its spectrum in [1/2, 1];
    ``monotone_family`` with all k_j = 2 is applied and the map undone.
    """
    policy = resolve(policy)
    ops = _hermitian_family(family, policy)
    alphas = []
    shifted = []
    for op in ops:
        norm = frobenius_norm(op)
        alpha = 1.0 if norm == 0 else 1.0 / (4.0 * norm)
        alphas.append(alpha)
        shifted.append(alpha * op + 0.75 * np.eye(op.shape[0]))
    inner = monotone_family(shifted, [2] * (len(ops) - 1), policy)
    dilations = []
    for alpha, b in zip(alphas, inner.dilations):
        unshifted = b / alpha - (0.75 / alpha) * np.eye(b.shape[0])
        dilations.append((unshifted + unshifted.conj().T) / 2)
    metadata = {"alphas": alphas, "shift": 0.75}
    return _monotone_result(dilations, ops, inner.embedding, True, "hermitian-family", metadata, policy)


def choose_triangle(spectrum: Sequence[complex],
                    policy: Optional[TolerancePolicy] = None) -> Triangle:
    """Triangle in the open quadrant, doubly ordered, whose hull contains the spectrum.

    For the bounding box [a, b] x [c, d] the vertices are (a/2, c/2),
    (b + 1, 3c/4) and (b + 2, y3) with
    y3 = c/2 + (d - c/2)(b + 2 - a/2)/(a/2) + 1.
    """
    policy = resolve(policy)
    points = np.asarray(list(spectrum), dtype=complex).reshape(-1)
    if points.size == 0:
        raise DilationError("choose_triangle needs at least one point")
    if points.real.min() <= 0 or points.imag.min() <= 0:
        raise PreconditionViolated("spectrum lies in the open quadrant")
    a, b = points.real.min(), points.real.max()
    c, d = points.imag.min(), points.imag.max()
    y3 = c / 2 + (d - c / 2) * (b + 2 - a / 2) / (a / 2) + 1
    triangle = Triangle(complex(a / 2, c / 2), complex(b + 1, 0.75 * c), complex(b + 2, y3))
    tol = policy.scaled(policy.rel_eq, max(abs(b), abs(d), abs(y3)))
    for z in points:
        if not triangle.contains(z, tol):
            raise ContainmentError(f"point {z} is outside the chosen triangle")
    return triangle


def scalar_normal_dilation(z: complex, triangle: Triangle,
                           policy: Optional[TolerancePolicy] = None) -> np.ndarray:
    """3x3 normal matrix with spectrum the triangle's vertices and corner entry z.

    M = R diag(v1, v2, v3) R* where R is unitary with first row
    (sqrt(c1), sqrt(c2), sqrt(c3)) and c are the barycentric coordinates of z.
    """
    policy = resolve(policy)
    coords = triangle.barycentric(complex(z))
    scale = max(1.0, float(np.abs(triangle.vertices).max()))
    if coords.min() < -policy.rel_eq * scale:
        raise ContainmentError(f"point {z} is outside the triangle")
    coords = np.clip(coords, 0.0, None)
    coords = coords / coords.sum()
    q = complete_to_unitary(np.sqrt(coords), policy).data
    r = q.conj().T
    return (r * triangle.vertices) @ r.conj().T


def numerical_range_pair(a: ArrayLike, b: ArrayLike,
                         policy: Optional[TolerancePolicy] = None) -> MonotoneFamilyResult:
    """Monotone pair of strictly positive operators on 6 copies of H dilating (A, B).

    S = [[A, A - r], [A - r, A]] and T = [[B, r - B], [r - B, B]] commute and
    are strictly positive for r = min(lambda_min(A), lambda_min(B)). Each
    joint eigenvalue s + it of S + iT is dilated to a 3x3 normal matrix with
    spectrum a fixed triangle; the outputs are the real and imaginary parts
    of the resulting normal operator.
    """
    policy = resolve(policy)
    a, b = as_square(a), as_square(b)
    _same_dimension([a, b])
    for j, op in enumerate((a, b)):
        if not verify.check_class(op, "strictly-positive", policy).passed:
            raise PreconditionViolated("A and B are strictly positive", index=j)
    dim = a.shape[0]
    eye = np.eye(dim)
    r = min(la.eigvalsh((a + a.conj().T) / 2)[0], la.eigvalsh((b + b.conj().T) / 2)[0])
    s = np.block([[a, a - r * eye], [a - r * eye, a]])
    t = np.block([[b, r * eye - b], [r * eye - b, b]])

    u, lam = simultaneous_diagonalize([s, t], policy)
    spectrum = lam[0] + 1j * lam[1]
    triangle = choose_triangle(spectrum, policy)

    size = 2 * dim
    m = np.zeros((3 * size, 3 * size), dtype=complex)
    y = np.zeros((3 * size, size), dtype=complex)
    for k, z in enumerate(spectrum):
        m[3 * k:3 * k + 3, 3 * k:3 * k + 3] = scalar_normal_dilation(z, triangle, policy)
        y[3 * k, :] = u.data[:, k].conj()
    embedding = Isometry(y @ block_embed_isometry(2, 0, dim).data, policy=policy)
    dilations = [(m + m.conj().T) / 2, (m - m.conj().T) / 2j]
    metadata = {"r": float(r), "triangle": [triangle.v1, triangle.v2, triangle.v3]}
    return _monotone_result(dilations, [a, b], embedding, False, "numrange-pair", metadata, policy)


def lift_embedding(n: int, dim: int) -> Isometry:
    """Embedding of H as H x w in the sum of n + 1 copies, w = (1, ..., 1)/sqrt(n + 1)."""
    if n < 0 or dim < 1:
        raise DilationError(f"invalid lift parameters n={n}, dim={dim}")
    w = np.ones((n + 1, 1)) / np.sqrt(n + 1)
    return Isometry(np.kron(w, np.eye(dim)))


def essential_lift(a: ArrayLike, slot: int, n: int) -> np.ndarray:
    """(n + 1) A placed in the ``slot``-th diagonal block of n + 1 copies of H.

    Range and corange lie in the slot's copy of H and the compression to
    ``lift_embedding(n, dim)`` is A.
    """
    a = as_square(a)
    if not 0 <= slot <= n:
        raise DilationError(f"slot {slot} out of range for n = {n}")
    selector = np.zeros((n + 1, n + 1))
    selector[slot, slot] = 1.0
    return (n + 1) * np.kron(selector, a)


def economical_monotone_family(family: Sequence[ArrayLike],
                               policy: Optional[TolerancePolicy] = None) -> MonotoneFamilyResult:
    """Monotone hermitian dilation of A_0, ..., A_n on a space of dimension 2(n + 1) dim H - 1.

    The lifts S_j of the A_j commute; with their joint eigenbasis g_0, ...,
    g_{d-1} every g_k but g_0 is split into two coordinates carrying
    s - kC and s + kC, where C exceeds twice the largest spread of any
    S_j. Every dilation is then diagonal and all of them increase along
    the same order of coordinates.
    """
    policy = resolve(policy)
    ops = _hermitian_family(family, policy)
    n = len(ops) - 1
    dim = ops[0].shape[0]
    lifts = [essential_lift(op, j, n) for j, op in enumerate(ops)]
    u, s = simultaneous_diagonalize(lifts, policy)
    d = s.shape[1]
    spread = float((s.max(axis=1) - s.min(axis=1)).max())
    c = 1.0 + 2.0 * spread

    size = 2 * d - 1
    values = np.zeros((len(ops), size))
    split = np.zeros((size, d))
    values[:, 0] = s[:, 0]
    split[0, 0] = 1.0
    for k in range(1, d):
        values[:, 2 * k - 1] = s[:, k] - k * c
        values[:, 2 * k] = s[:, k] + k * c
        split[2 * k - 1, k] = split[2 * k, k] = 1.0 / np.sqrt(2)
    dilations = [np.diag(row).astype(complex) for row in values]
    v = split @ u.adjoint @ lift_embedding(n, dim).data
    embedding = Isometry(v, policy=policy)
    metadata = {"spread_constant": c, "lift_dimension": d}
    return _monotone_result(dilations, ops, embedding, False, "economical", metadata, policy)


def _monotone_result(dilations, bases, embedding, total, name, metadata, policy) -> MonotoneFamilyResult:
    certificate = verify.is_monotone_family(dilations, policy)
    if not certificate:
        raise VerificationFailed(name, certificate.report())
    result = MonotoneFamilyResult(dilations, bases, embedding, certificate, total, name, metadata)
    logger.debug("%s: blowup %s, total=%s", name, result.blowup, total)
    return result


def _check_k(k: int) -> None:
    if k < 1:
        raise DilationError(f"block count must be at least 1, got {k}")


def _same_dimension(ops: List[np.ndarray]) -> None:
    for op in ops[1:]:
        if op.shape != ops[0].shape:
            raise DimensionMismatch(f"shapes {ops[0].shape} and {op.shape} differ")


def _hermitian_family(family: Sequence[ArrayLike], policy: TolerancePolicy) -> List[np.ndarray]:
    ops = [as_square(op) for op in family]
    if not ops:
        raise DilationError("family must not be empty")
    _same_dimension(ops)
    for j, op in enumerate(ops):
        if not verify.check_class(op, "hermitian", policy).passed:
            raise PreconditionViolated("A_j is hermitian", index=j)
    return [(op + op.conj().T) / 2 for op in ops]


def _require_positive(a: np.ndarray, index: int, policy: TolerancePolicy) -> None:
    if not verify.check_class(a, "positive", policy).passed:
        raise PreconditionViolated("A_0 is positive semidefinite", index=index)


def _spectrum(a: np.ndarray, index: int, policy: TolerancePolicy) -> np.ndarray:
    if not verify.check_class(a, "hermitian", policy).passed:
        raise PreconditionViolated("A_j is hermitian", index=index)
    return la.eigvalsh((a + a.conj().T) / 2)


def _require_band(a: np.ndarray, k: int, index: int, policy: TolerancePolicy) -> None:
    lam = _spectrum(a, index, policy)
    slack = policy.psd_slack
    if lam[0] < 1.0 / k - slack or lam[-1] > 1.0 + slack:
        raise PreconditionViolated(
            f"(1/{k}) I <= A_j <= I",
            f"spectrum in [{lam[0]:.6g}, {lam[-1]:.6g}]",
            index=index,
        )


def _band_scale(a: np.ndarray, k: int, index: int, policy: TolerancePolicy) -> float:
    """1 when A lies in the band [1/k, 1], else the factor that moves it there."""
    lam = _spectrum(a, index, policy)
    slack = policy.psd_slack
    if lam[0] >= 1.0 / k - slack and lam[-1] <= 1.0 + slack:
        return 1.0
    if lam[0] > slack * max(1.0, lam[-1]) and lam[-1] <= k * lam[0] * (1.0 + slack):
        logger.warning("operator %d rescaled by its largest eigenvalue %.6g", index, lam[-1])
        return float(lam[-1])
    raise PreconditionViolated(
        f"cond(A_j) <= k_j = {k}",
        f"spectrum in [{lam[0]:.6g}, {lam[-1]:.6g}]",
        index=index,
    )


class _MonotoneConstruction(Construction):
    """Shared verification: the result's own checks plus positivity where promised."""

    positive_output = True

    def verify(self, result):
        report = super().verify(result)
        if self.positive_output:
            for j, b in enumerate(result.dilations):
                report.merge_from(verify.check_class(b, "positive", self.policy), f"positive[{j}].")
        return report


@register
class PairConstruction(_MonotoneConstruction):
    name = "pair"
    description = "monotone pair (A[k], B<k>)"
    arity = 2

    def __init__(self, k: int = 2, policy: Optional[TolerancePolicy] = None):
        super().__init__(policy)
        self.k = k

    def construct(self, operators):
        return monotone_pair(operators[0], operators[1], self.k, self.policy)


@register
class FamilyConstruction(_MonotoneConstruction):
    name = "family"
    description = "monotone family of positive operators A_j(k'_j)<k_j>[k''_j]"
    arity = None

    def __init__(self, ks: Union[ConditionSpec, Sequence[int]] = (),
                 policy: Optional[TolerancePolicy] = None):
        super().__init__(policy)
        self.spec = ks if isinstance(ks, ConditionSpec) else ConditionSpec(tuple(ks))

    def construct(self, operators):
        return monotone_family(operators, self.spec, self.policy)


@register
class HermitianFamilyConstruction(_MonotoneConstruction):
    name = "hermitian-family"
    description = "monotone family of hermitian operators on 2^n copies"
    arity = None
    positive_output = False

    def construct(self, operators):
        return hermitian_monotone_family(operators, self.policy)


@register
class NumericalRangePairConstruction(_MonotoneConstruction):
    name = "numrange-pair"
    description = "monotone pair of strictly positive operators on 6 copies"
    arity = 2

    def construct(self, operators):
        return numerical_range_pair(operators[0], operators[1], self.policy)


@register
class EconomicalConstruction(_MonotoneConstruction):
    name = "economical"
    description = "monotone hermitian dilation of dimension 2(n + 1) dim H - 1"
    arity = None
    positive_output = False

    def construct(self, operators):
        return economical_monotone_family(operators, self.policy)
