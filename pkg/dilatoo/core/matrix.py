"""
Core matrix classes for dilatoo.

Plain dense matrices travel through the package as complex ``numpy.ndarray``
objects. The classes below wrap a matrix whose structure has been checked
(hermitian, unitary, isometric) so that the check is done once, at
construction, and the wrapped data cannot be modified afterwards.
"""

from typing import Union, Optional, Dict, Any, Tuple
from copy import deepcopy
import numpy as np

from .errors import DilationError, DimensionMismatch
from .tolerance import TolerancePolicy, resolve

ArrayLike = Union["Operator", np.ndarray, list]


def as_matrix(data: ArrayLike) -> np.ndarray:
    """Return ``data`` as a finite 2-D complex array.

    Parameters
    ----------
    data : Operator, numpy.ndarray or nested list
        The matrix

    Returns
    -------
    numpy.ndarray
        Complex array of shape (rows, cols)

    Raises
    ------
    DilationError
        If the data is not two dimensional, empty or not finite
    """
    if isinstance(data, Operator):
        return data.data
    arr = np.asarray(data, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DilationError(f"expected a 2-D matrix, got {arr.ndim} dimensions")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DilationError("matrix dimensions must be positive")
    if not np.all(np.isfinite(arr)):
        raise DilationError("matrix entries must be finite")
    return arr


def as_square(data: ArrayLike) -> np.ndarray:
    """Like ``as_matrix`` but also require a square shape."""
    arr = as_matrix(data)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr


def spectral_norm(arr: np.ndarray) -> float:
    return float(np.linalg.norm(arr, 2))


class Operator:
    """Base class for a validated matrix.

    This class holds a read-only complex matrix and a metadata dictionary.
    """

    def __init__(self,
                 data: ArrayLike,
                 metadata: Optional[Dict[str, Any]] = None):
        """Initialize an operator.

        Parameters
        ----------
        data : array-like
            The matrix entries
        metadata : dict, optional
            Additional information about the operator
        """
        arr = np.array(as_matrix(data), dtype=complex, copy=True)
        arr.setflags(write=False)
        self._data = arr
        self._metadata = {} if metadata is None else deepcopy(metadata)

    @property
    def data(self) -> np.ndarray:
        """Get the (read-only) matrix.

        Returns
        -------
        numpy.ndarray
            The complex matrix
        """
        return self._data

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    @property
    def dim_rows(self) -> int:
        return self._data.shape[0]

    @property
    def dim_cols(self) -> int:
        return self._data.shape[1]

    @property
    def adjoint(self) -> np.ndarray:
        """Get the conjugate transpose as a plain array."""
        return self._data.conj().T

    @property
    def metadata(self) -> Dict[str, Any]:
        return self._metadata

    def set_metadata(self, key: str, value: Any) -> None:
        """Set metadata value.

        Parameters
        ----------
        key : str
            The metadata key
        value : Any
            The metadata value
        """
        self._metadata[key] = value

    def norm(self) -> float:
        """Spectral norm of the operator."""
        return spectral_norm(self._data)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data.copy() if copy else self._data
        return np.array(self._data, dtype=dtype)

    def __getitem__(self, key):
        return self._data[key]

    def __len__(self) -> int:
        return self._data.shape[0]

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(shape={self.shape})"


class HermitianMatrix(Operator):
    """A square matrix equal to its adjoint.

    Inputs within ``rel_eq`` of being hermitian are symmetrized to
    ``(H + H*) / 2``; anything further away is rejected.
    """

    def __init__(self,
                 data: ArrayLike,
                 metadata: Optional[Dict[str, Any]] = None,
                 policy: Optional[TolerancePolicy] = None):
        policy = resolve(policy)
        arr = as_square(data)
        skew = spectral_norm(arr - arr.conj().T)
        threshold = policy.scaled(policy.rel_eq, spectral_norm(arr))
        if skew > threshold:
            raise DilationError(
                f"matrix is not hermitian: ||H - H*|| = {skew:.3e} > {threshold:.3e}"
            )
        super().__init__((arr + arr.conj().T) / 2, metadata)


class UnitaryMatrix(Operator):
    """A square matrix U with U*U = I."""

    def __init__(self,
                 data: ArrayLike,
                 metadata: Optional[Dict[str, Any]] = None,
                 policy: Optional[TolerancePolicy] = None):
        policy = resolve(policy)
        arr = as_square(data)
        residual = spectral_norm(arr.conj().T @ arr - np.eye(arr.shape[0]))
        if residual > policy.rel_eq:
            raise DilationError(f"matrix is not unitary: ||U*U - I|| = {residual:.3e}")
        super().__init__(arr, metadata)


class Isometry(Operator):
    """A tall matrix V with V*V = I, recording how a space embeds in a larger one."""

    def __init__(self,
                 data: ArrayLike,
                 metadata: Optional[Dict[str, Any]] = None,
                 policy: Optional[TolerancePolicy] = None):
        policy = resolve(policy)
        arr = as_matrix(data)
        if arr.shape[0] < arr.shape[1]:
            raise DimensionMismatch(
                f"an isometry needs at least as many rows as columns, got shape {arr.shape}"
            )
        residual = spectral_norm(arr.conj().T @ arr - np.eye(arr.shape[1]))
        if residual > policy.rel_eq:
            raise DilationError(f"matrix is not an isometry: ||V*V - I|| = {residual:.3e}")
        super().__init__(arr, metadata)

    @property
    def codimension(self) -> int:
        """Dimension of the orthogonal complement of the range."""
        return self.dim_rows - self.dim_cols

    def projection(self) -> np.ndarray:
        """Orthogonal projection VV* onto the range."""
        return self._data @ self._data.conj().T
