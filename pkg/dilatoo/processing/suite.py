"""
Construction suites for dilatoo.

A suite is an ordered list of steps, each pairing a construction with the
operators it should dilate. Running the suite runs every step and collects
the reports by label.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..core.errors import DilationError
from ..core.result import SuiteReport
from ..core.tolerance import TolerancePolicy, resolve
from ..constructions.base import Construction, get_construction
from ..utils.data import default_inputs

logger = logging.getLogger(__name__)


@dataclass
class SuiteStep:
    """A construction applied to fixed operators."""

    label: str
    construction: Construction
    operators: List[np.ndarray]


class ConstructionSuite:
    """Ordered collection of construct-then-verify steps."""

    def __init__(self, steps: Optional[List[SuiteStep]] = None):
        """Initialize a suite.

        Parameters
        ----------
        steps : list of SuiteStep, optional
            Steps to add to the suite
        """
        self._steps = [] if steps is None else list(steps)

    @property
    def steps(self) -> List[SuiteStep]:
        return self._steps

    def add_step(self, label: str, construction: Construction,
                 operators: Sequence[np.ndarray]) -> "ConstructionSuite":
        """Add a step to the suite.

        Parameters
        ----------
        label : str
            Name under which the report is stored; must be unique
        construction : Construction
            Construction to run
        operators : list of numpy.ndarray
            Its inputs

        Returns
        -------
        ConstructionSuite
            Self for method chaining
        """
        if any(step.label == label for step in self._steps):
            raise ValueError(f"Duplicate step label: {label}")
        self._steps.append(SuiteStep(label, construction, list(operators)))
        return self

    def remove_step(self, index: int) -> None:
        self._steps.pop(index)

    def clear(self) -> None:
        self._steps.clear()

    def run(self) -> SuiteReport:
        """Run every step.

        A step that raises a ``DilationError`` or a LAPACK error is recorded
        as an error of the suite; the remaining steps still run.

        Returns
        -------
        SuiteReport
            One report (or error message) per step label
        """
        suite_report = SuiteReport()
        for step in self._steps:
            try:
                _, report = step.construction.run(step.operators)
            except (DilationError, np.linalg.LinAlgError) as exc:
                logger.warning("%s failed: %s", step.label, exc)
                suite_report.add_error(step.label, f"{type(exc).__name__}: {exc}")
                continue
            suite_report.add_report(step.label, report)
        return suite_report

    def __len__(self) -> int:
        return len(self._steps)

    def __getitem__(self, index: int) -> SuiteStep:
        return self._steps[index]


def run_ensemble(name: str,
                 count: int,
                 seed: int,
                 dim: int = 2,
                 policy: Optional[TolerancePolicy] = None,
                 **params) -> SuiteReport:
    """Run ``count`` seeded construct-then-verify iterations of one construction.

    Iteration i draws its inputs from ``default_rng([seed, i])``, so each
    entry depends only on (seed, i) and the merge by index is independent of
    execution order.
    """
    policy = resolve(policy)
    construction = get_construction(name, policy=policy, **params)
    suite = ConstructionSuite()
    input_params = {key: params[key] for key in ("k", "ks") if key in params}
    if "ks" in input_params:
        input_params["ks"] = construction.spec.ks
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        suite.add_step(f"{name}[{i}]", construction, default_inputs(name, rng, dim, **input_params))
    return suite.run()
