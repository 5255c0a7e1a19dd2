"""
Construction interface and registry for dilatoo.
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Sequence, Tuple, Type

import numpy as np

from ..core.errors import DilationError, VerificationFailed
from ..core.matrix import ArrayLike, as_square
from ..core.result import DilationResult, VerificationReport
from ..core.tolerance import TolerancePolicy, resolve

logger = logging.getLogger(__name__)

_REGISTRY: Dict[str, Type["Construction"]] = {}


class Construction(ABC):
    """Base interface for dilation constructions.

    Subclasses set ``name`` (the command line name), ``description`` and
    ``arity`` (number of input operators, ``None`` for any positive number)
    and implement ``construct``.
    """

    name: str = ""
    description: str = ""
    arity: Optional[int] = 1

    def __init__(self, policy: Optional[TolerancePolicy] = None):
        """Initialize a construction.

        Parameters
        ----------
        policy : TolerancePolicy, optional
            Thresholds used by construct and verify
        """
        self.policy = resolve(policy)

    @abstractmethod
    def construct(self, operators: List[np.ndarray]) -> DilationResult:
        """Build the dilation.

        Parameters
        ----------
        operators : list of numpy.ndarray
            The operators to dilate

        Returns
        -------
        DilationResult
            The dilation with its embedding
        """
        pass

    def verify(self, result: DilationResult) -> VerificationReport:
        """Check a result produced by ``construct``.

        The default runs the result's own checks; subclasses add the
        properties their construction promises.
        """
        return result.verify(self.policy)

    def run(self,
            operators: Sequence[ArrayLike],
            strict: bool = False) -> Tuple[DilationResult, VerificationReport]:
        """Construct, then verify.

        Parameters
        ----------
        operators : list of array-like
            The operators to dilate
        strict : bool
            Raise ``VerificationFailed`` instead of returning a failed report

        Returns
        -------
        tuple
            (result, report)
        """
        ops = [as_square(op) for op in operators]
        if not ops:
            raise DilationError(f"{self.name} needs at least one operator")
        if self.arity is not None and len(ops) != self.arity:
            raise DilationError(f"{self.name} takes {self.arity} operator(s), got {len(ops)}")
        result = self.construct(ops)
        logger.debug("%s: dimension %d -> %d", self.name, ops[0].shape[0], result.dim_dilation)
        report = self.verify(result)
        logger.info("%s: passed=%s worst=%s", self.name, report.passed, report.worst)
        if strict and not report.passed:
            raise VerificationFailed(self.name, report)
        return result, report

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name!r})"


def register(cls: Type[Construction]) -> Type[Construction]:
    """Class decorator adding a construction to the registry under ``cls.name``."""
    if not cls.name:
        raise ValueError(f"{cls.__name__} has no name")
    _REGISTRY[cls.name] = cls
    return cls


def available_constructions() -> List[str]:
    return sorted(_REGISTRY)


def get_construction(name: str, **params) -> Construction:
    """Instantiate a registered construction.

    Parameters
    ----------
    name : str
        Registered name, e.g. ``'halving'`` or ``'pair'``
    **params
        Keyword arguments of the construction (``k``, ``ks``, ``method``, ``policy``)

    Raises
    ------
    ValueError
        If ``name`` is not registered
    """
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"Unknown construction: {name}") from None
    return cls(**params)
