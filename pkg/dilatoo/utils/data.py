"""
Matrix file I/O and seeded random ensembles for dilatoo.

A matrix file is a JSON object::

    {"rows": 2, "cols": 2, "data": [[re, im], ...], "kind": "hermitian"}

with entries in row-major order. Floats are written with Python's shortest
round-trip representation, so a write followed by a read is bit-exact.
"""

import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import scipy.linalg as la

from ..core.errors import DilationError, MatrixFileError
from ..core.matrix import as_matrix
from ..core.tolerance import TolerancePolicy
from .. import verify

logger = logging.getLogger(__name__)

MATRIX_KINDS = verify.CLASS_KINDS


def matrix_to_dict(matrix: np.ndarray, kind: Optional[str] = None) -> Dict[str, Any]:
    """Encode a matrix as a matrix file object.

    Parameters
    ----------
    matrix : array-like
        The matrix
    kind : str, optional
        Class tag checked again when the file is loaded
    """
    m = as_matrix(matrix)
    if kind is not None and kind not in MATRIX_KINDS:
        raise MatrixFileError(f"unknown matrix kind: {kind}")
    obj = {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }
    if kind is not None:
        obj["kind"] = kind
    return obj


def matrix_from_dict(obj: Any, policy: Optional[TolerancePolicy] = None) -> np.ndarray:
    """Decode and validate a matrix file object.

    Raises
    ------
    MatrixFileError
        If a field is missing or malformed, an entry is not finite or the
        kind tag does not hold
    """
    if not isinstance(obj, dict):
        raise MatrixFileError("matrix file must contain a JSON object")
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except KeyError as exc:
        raise MatrixFileError(f"matrix file is missing field {exc.args[0]!r}") from None
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise MatrixFileError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise MatrixFileError(f"data must hold rows*cols = {rows * cols} entries")
    entries = np.empty(rows * cols, dtype=complex)
    for i, pair in enumerate(data):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
            raise MatrixFileError(f"entry {i} is not a [re, im] pair of numbers")
        if not all(math.isfinite(x) for x in pair):
            raise MatrixFileError(f"entry {i} is not finite")
        entries[i] = complex(pair[0], pair[1])
    matrix = entries.reshape(rows, cols)

    kind = obj.get("kind")
    if kind is not None:
        if kind not in MATRIX_KINDS:
            raise MatrixFileError(f"unknown matrix kind: {kind}")
        report = verify.check_class(matrix, kind, policy)
        if not report.passed:
            raise MatrixFileError(f"matrix is tagged {kind!r} but fails check {report.worst!r}")
    return matrix


def save_matrix(filepath: Union[str, Path], matrix: np.ndarray, kind: Optional[str] = None) -> None:
    with open(filepath, "w") as f:
        json.dump(matrix_to_dict(matrix, kind), f)


def load_matrix(filepath: Union[str, Path], policy: Optional[TolerancePolicy] = None) -> np.ndarray:
    """Load a matrix file.

    Parameters
    ----------
    filepath : str or Path
        Path to the JSON file
    policy : TolerancePolicy, optional
        Thresholds for the kind check

    Returns
    -------
    numpy.ndarray
        Complex matrix
    """
    if not os.path.isfile(filepath):
        raise FileNotFoundError(f"File not found: {filepath}")
    try:
        with open(filepath, "r") as f:
            obj = json.load(f)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{filepath}: invalid JSON ({exc.msg})") from None
    try:
        return matrix_from_dict(obj, policy)
    except MatrixFileError as exc:
        raise MatrixFileError(f"{filepath}: {exc}") from None


def random_complex(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = la.qr(random_complex(rng, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    x = random_complex(rng, dim)
    return (x + x.conj().T) / 2


def random_positive(rng: np.random.Generator, dim: int,
                    cond: Optional[float] = None, normalize: bool = False) -> np.ndarray:
    """Random positive semidefinite matrix.

    With ``cond`` the spectrum is 1 + (cond - 1) u for uniform u with
    min u = 0, so the condition number is at most ``cond``. ``normalize``
    divides by the largest eigenvalue, which puts the spectrum in
    [1/cond, 1].
    """
    if cond is not None:
        if cond < 1:
            raise DilationError(f"condition number must be >= 1, got {cond}")
        u = rng.uniform(0.0, 1.0, dim)
        spectrum = 1.0 + (cond - 1.0) * (u - u.min())
    else:
        spectrum = rng.uniform(0.0, 2.0, dim)
    if normalize:
        spectrum = spectrum / spectrum.max()
    q = random_unitary(rng, dim)
    return _hermitian_from(q, spectrum)


def random_strictly_positive(rng: np.random.Generator, dim: int) -> np.ndarray:
    return _hermitian_from(random_unitary(rng, dim), rng.uniform(0.5, 2.0, dim))


def random_contraction(rng: np.random.Generator, dim: int) -> np.ndarray:
    x = random_complex(rng, dim)
    return x * (rng.uniform(0.5, 1.0) / np.linalg.norm(x, 2))


def random_antisymmetric_real(rng: np.random.Generator, dim: int) -> np.ndarray:
    r = rng.standard_normal((dim, dim))
    return (r - r.T).astype(complex)


def random_normal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q = random_unitary(rng, dim)
    spectrum = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return (q * spectrum) @ q.conj().T


def random_monotone_pair(rng: np.random.Generator, dim: int, anti: bool = False) -> List[np.ndarray]:
    """Positive pair sharing an eigenbasis, spectra ordered alike (or oppositely with ``anti``)."""
    q = random_unitary(rng, dim)
    first = np.sort(rng.uniform(0.1, 2.0, dim))[::-1]
    second = np.sort(rng.uniform(0.1, 2.0, dim))
    if not anti:
        second = second[::-1]
    return [_hermitian_from(q, first), _hermitian_from(q, second)]


def _hermitian_from(q: np.ndarray, spectrum: np.ndarray) -> np.ndarray:
    h = (q * spectrum) @ q.conj().T
    return (h + h.conj().T) / 2


GENERATORS: Dict[str, Callable[..., List[np.ndarray]]] = {
    "complex": lambda rng, dim, **kw: [random_complex(rng, dim)],
    "hermitian": lambda rng, dim, **kw: [random_hermitian(rng, dim)],
    "positive": lambda rng, dim, cond=None, normalize=False, **kw: [
        random_positive(rng, dim, cond, normalize)],
    "strictly-positive": lambda rng, dim, **kw: [random_strictly_positive(rng, dim)],
    "contraction": lambda rng, dim, **kw: [random_contraction(rng, dim)],
    "antisymmetric-real": lambda rng, dim, **kw: [random_antisymmetric_real(rng, dim)],
    "unitary": lambda rng, dim, **kw: [random_unitary(rng, dim)],
    "normal": lambda rng, dim, **kw: [random_normal(rng, dim)],
    "monotone-pair": lambda rng, dim, **kw: random_monotone_pair(rng, dim),
    "antimonotone-pair": lambda rng, dim, **kw: random_monotone_pair(rng, dim, anti=True),
}

# class tag written next to generated matrices
GENERATOR_KINDS = {
    "hermitian": "hermitian",
    "positive": "positive",
    "strictly-positive": "strictly-positive",
    "contraction": "contraction",
    "antisymmetric-real": "antisymmetric-real",
    "unitary": "unitary",
    "normal": "normal",
    "monotone-pair": "positive",
    "antimonotone-pair": "positive",
}


def generate(kind: str, rng: np.random.Generator, dim: int, **params) -> List[np.ndarray]:
    """Draw matrices of a named ensemble.

    Raises
    ------
    ValueError
        If ``kind`` is unknown or ``dim`` is not positive
    """
    if kind not in GENERATORS:
        raise ValueError(f"Unknown ensemble: {kind}")
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return GENERATORS[kind](rng, dim, **params)


def default_inputs(construction: str, rng: np.random.Generator, dim: int = 2,
                   k: int = 2, ks: Sequence[int] = (2, 2)) -> List[np.ndarray]:
    """Inputs satisfying the hypotheses of a construction, for demos and ensembles."""
    even = 2 * dim
    if construction == "antisymmetric":
        return [random_antisymmetric_real(rng, even)]
    if construction in ("normal", "equal-diagonal"):
        return [random_complex(rng, dim)]
    if construction == "unitary":
        return [random_contraction(rng, dim)]
    if construction in ("halving", "equal-singular"):
        return [random_complex(rng, even)]
    if construction == "circulant":
        return [random_complex(rng, dim) for _ in range(3)]
    if construction == "orthogonal":
        return [random_positive(rng, dim) for _ in range(3)]
    if construction == "pair":
        return [random_positive(rng, dim), random_positive(rng, dim, cond=k, normalize=True)]
    if construction == "family":
        return [random_positive(rng, dim)] + [random_positive(rng, dim, cond=kj) for kj in ks]
    if construction in ("hermitian-family", "economical"):
        return [random_hermitian(rng, dim) for _ in range(3)]
    if construction == "numrange-pair":
        return [random_strictly_positive(rng, dim) for _ in range(2)]
    raise ValueError(f"Unknown construction: {construction}")
