"""
Suite builder for dilatoo.
"""

from typing import Optional, Sequence

import numpy as np

from ..core.tolerance import TolerancePolicy, resolve
from ..constructions.base import Construction, available_constructions, get_construction
from ..utils.data import default_inputs
from .suite import ConstructionSuite


class SuiteBuilder:
    """Builder for construction suites.

    This class uses the Builder pattern to assemble a suite with a fluent
    interface. Inputs that are not given explicitly are drawn from a
    generator seeded once per builder.
    """

    def __init__(self, seed: int = 0, dim: int = 2):
        """Initialize a suite builder.

        Parameters
        ----------
        seed : int
            Seed of the generator used for default inputs
        dim : int
            Dimension of H for default inputs
        """
        self._rng = np.random.default_rng(seed)
        self._dim = dim
        self._policy: Optional[TolerancePolicy] = None
        self._steps = []

    def with_policy(self, policy: TolerancePolicy) -> "SuiteBuilder":
        """Use ``policy`` for every construction added afterwards.

        Returns
        -------
        SuiteBuilder
            Self for method chaining
        """
        self._policy = policy
        return self

    def with_construction(self,
                          name: str,
                          operators: Optional[Sequence[np.ndarray]] = None,
                          label: Optional[str] = None,
                          **params) -> "SuiteBuilder":
        """Add a registered construction.

        Parameters
        ----------
        name : str
            Registered construction name ('halving', 'pair', ...)
        operators : list of numpy.ndarray, optional
            Inputs; drawn at random to satisfy the hypotheses when omitted
        label : str, optional
            Report label, defaults to ``name``
        **params
            Construction parameters (``k``, ``ks``, ``method``)

        Returns
        -------
        SuiteBuilder
            Self for method chaining

        Raises
        ------
        ValueError
            If name is not recognized
        """
        construction = get_construction(name, policy=resolve(self._policy), **params)
        if operators is None:
            input_params = {}
            if "k" in params:
                input_params["k"] = params["k"]
            if "ks" in params:
                input_params["ks"] = construction.spec.ks
            operators = default_inputs(name, self._rng, self._dim, **input_params)
        self._steps.append((label or name, construction, list(operators)))
        return self

    def with_custom_construction(self, label: str, construction: Construction,
                                 operators: Sequence[np.ndarray]) -> "SuiteBuilder":
        self._steps.append((label, construction, list(operators)))
        return self

    def build(self) -> ConstructionSuite:
        suite = ConstructionSuite()
        for label, construction, operators in self._steps:
            suite.add_step(label, construction, operators)
        return suite

    @classmethod
    def create_standard_suite(cls,
                              seed: int = 0,
                              policy: Optional[TolerancePolicy] = None) -> ConstructionSuite:
        """One small instance of every registered construction.

        Parameters
        ----------
        seed : int
            Seed for the inputs
        policy : TolerancePolicy, optional
            Thresholds

        Returns
        -------
        ConstructionSuite
            The demo suite
        """
        builder = cls(seed=seed)
        builder.with_policy(resolve(policy))
        for name in available_constructions():
            if name == "family":
                builder.with_construction(name, ks=(2, 2))
            elif name in ("pair", "unitary"):
                builder.with_construction(name, k=2)
            else:
                builder.with_construction(name)
        return builder.build()
