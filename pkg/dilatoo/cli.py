"""
Command line interface for dilatoo.

Exit codes: 0 success, 1 usage / file / configuration error, 2 violated
hypothesis or dimension mismatch, 3 failed verification.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ._version import __version__
from .constructions.base import available_constructions, get_construction
from .constructions.monotone import ConditionSpec
from .core.errors import (
    CommutationFailure,
    ConfigurationError,
    ContainmentError,
    ConvergenceError,
    DilationError,
    DimensionMismatch,
    MatrixFileError,
    PreconditionViolated,
    VerificationFailed,
)
from .core.matrix import Isometry
from .core.tolerance import TolerancePolicy
from .processing.builder import SuiteBuilder
from .processing.suite import run_ensemble
from .utils.data import GENERATOR_KINDS, GENERATORS, generate, load_matrix, save_matrix
from . import verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_VERIFICATION = 3

VERIFY_KINDS = ("total", "monotone", "antimonotone", "class", "inequalities", "annihilation")


class UsageError(Exception):
    """Raised instead of exiting when the command line cannot be parsed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every subcommand.

    Parameters
    ----------
    seed : int
        Seed of ``numpy.random.default_rng``
    policy : TolerancePolicy
        Thresholds, environment defaults with command line overrides applied
    output : Path, optional
        Directory (or file, for ``demo``) receiving results
    """

    seed: int
    policy: TolerancePolicy
    output: Optional[Path] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        policy = TolerancePolicy.default()
        if args.tol is not None:
            policy = policy.uniform(args.tol)
        policy = policy.with_overrides(rel_eq=args.rel_eq,
                                       eig_residual=args.eig_residual,
                                       psd_slack=args.psd_slack)
        output = getattr(args, "output", None)
        return cls(seed=args.seed, policy=policy, output=Path(output) if output else None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dilatoo", description="Construct and verify matrix dilations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log more (repeat for debug output)")
    parser.add_argument("--seed", type=int, default=0, help="seed for random inputs")
    parser.add_argument("--tol", type=float, help="set all three thresholds")
    parser.add_argument("--rel-eq", type=float, help="threshold for matrix equality")
    parser.add_argument("--eig-residual", type=float, help="threshold for factorization residuals")
    parser.add_argument("--psd-slack", type=float, help="slack for positivity tests")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    dilate = sub.add_parser("dilate", help="run a construction on matrix files")
    dilate.add_argument("construction", choices=available_constructions())
    dilate.add_argument("inputs", nargs="+", help="matrix files")
    dilate.add_argument("--k", "--ks", dest="k", type=ConditionSpec.parse,
                        help="block count (pair, unitary) or counts k1,k2,... (family)")
    dilate.add_argument("--method", default="auto", help="halving method (auto, normal, general)")
    dilate.add_argument("-o", "--output", help="directory for the result matrices and report")

    check = sub.add_parser("verify", help="check matrix files")
    check.add_argument("kind", choices=VERIFY_KINDS)
    check.add_argument("inputs", nargs="+", help="matrix files")
    check.add_argument("--k", type=int, help="block count (total)")
    check.add_argument("--class-kind", "--kind", dest="class_kind", choices=verify.CLASS_KINDS,
                       help="operator class (class)")

    gen = sub.add_parser("gen", help="write random matrices")
    gen.add_argument("ensemble", choices=sorted(GENERATORS))
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--cond", type=float, help="condition number bound (positive)")
    gen.add_argument("--normalize", action="store_true", help="scale the spectrum into [1/cond, 1]")
    gen.add_argument("--prefix", default=None, help="file name prefix")
    gen.add_argument("-o", "--output", default=".", help="target directory")

    demo = sub.add_parser("demo", help="run every construction once")
    demo.add_argument("-o", "--output", help="file for the report bundle")

    ensemble = sub.add_parser("ensemble", help="run seeded iterations of one construction")
    ensemble.add_argument("construction", choices=available_constructions())
    ensemble.add_argument("--count", type=int, default=10)
    ensemble.add_argument("--dim", type=int, default=2)
    ensemble.add_argument("--k", type=int, default=2)
    ensemble.add_argument("--ks", type=ConditionSpec.parse, default=ConditionSpec((2, 2)))
    ensemble.add_argument("-o", "--output", help="file for the merged reports")
    return parser


def cmd_dilate(args: argparse.Namespace, config: RunConfig) -> int:
    operators = [load_matrix(path, config.policy) for path in args.inputs]
    params = {}
    counts = args.k
    if args.construction in ("pair", "unitary"):
        if counts is not None and counts.n != 1:
            raise UsageError(f"dilate {args.construction} takes a single --k, got {counts.n} counts")
        params["k"] = counts.ks[0] if counts is not None else 2
    elif args.construction == "family":
        params["ks"] = counts if counts is not None else ConditionSpec((2,) * (len(operators) - 1))
    elif args.construction == "halving":
        params["method"] = args.method
    construction = get_construction(args.construction, policy=config.policy, **params)
    result, report = construction.run(operators)
    if config.output is not None:
        config.output.mkdir(parents=True, exist_ok=True)
        for key, matrix in result.matrices().items():
            save_matrix(config.output / f"{key}.json", matrix)
        report.save_to_json(config.output / "report.json")
        logger.info("wrote %d matrices to %s", len(result.matrices()), config.output)
    _emit(report.to_dict())
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    policy = config.policy
    kind = args.kind
    if kind in ("total", "antimonotone", "class", "inequalities"):
        expected = {"total": 2, "antimonotone": 2, "class": 1, "inequalities": 3}[kind]
        if len(args.inputs) != expected:
            raise UsageError(f"verify {kind} takes {expected} matrix file(s)")

    if kind == "inequalities":
        a = load_matrix(args.inputs[0], policy)
        b = load_matrix(args.inputs[1], policy)
        v = Isometry(load_matrix(args.inputs[2], policy), policy=policy)
        report = verify.check_compression_inequalities(a, b, v, policy)
    else:
        matrices = [load_matrix(path, policy) for path in args.inputs]
        if kind == "total":
            if args.k is None:
                raise UsageError("verify total needs --k")
            report = verify.is_total_dilation(matrices[0], matrices[1], args.k, policy)
        elif kind == "monotone":
            report = verify.monotone_report(matrices, policy)
        elif kind == "antimonotone":
            report = verify.is_antimonotone_pair(matrices[0], matrices[1], policy)
        elif kind == "class":
            if args.class_kind is None:
                raise UsageError("verify class needs --kind")
            report = verify.check_class(matrices[0], args.class_kind, policy)
        else:
            report = verify.check_mutual_annihilation(matrices, policy)
    _emit(report.to_dict())
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def cmd_gen(args: argparse.Namespace, config: RunConfig) -> int:
    rng = np.random.default_rng(config.seed)
    params = {}
    if args.ensemble == "positive":
        params = {"cond": args.cond, "normalize": args.normalize}
    matrices = generate(args.ensemble, rng, args.dim, **params)
    target = config.output or Path(".")
    target.mkdir(parents=True, exist_ok=True)
    prefix = args.prefix or args.ensemble
    kind = GENERATOR_KINDS.get(args.ensemble)
    written = []
    for i, matrix in enumerate(matrices):
        name = f"{prefix}.json" if len(matrices) == 1 else f"{prefix}_{i}.json"
        path = target / name
        save_matrix(path, matrix, kind)
        written.append(str(path))
    _emit({"files": written})
    return EXIT_OK


def cmd_demo(args: argparse.Namespace, config: RunConfig) -> int:
    suite = SuiteBuilder.create_standard_suite(seed=config.seed, policy=config.policy)
    bundle = suite.run()
    if config.output is not None:
        bundle.save_to_json(config.output)
    _emit(bundle.to_dict())
    for name in bundle.failures():
        print(f"dilatoo demo: {name} failed", file=sys.stderr)
    return EXIT_OK if bundle.passed else EXIT_VERIFICATION


def cmd_ensemble(args: argparse.Namespace, config: RunConfig) -> int:
    params = {}
    if args.construction in ("pair", "unitary"):
        params["k"] = args.k
    elif args.construction == "family":
        params["ks"] = args.ks
    bundle = run_ensemble(args.construction, args.count, config.seed, args.dim, config.policy, **params)
    if config.output is not None:
        bundle.save_to_json(config.output)
    _emit(bundle.to_dict())
    return EXIT_OK if bundle.passed else EXIT_VERIFICATION


COMMANDS = {
    "dilate": cmd_dilate,
    "verify": cmd_verify,
    "gen": cmd_gen,
    "demo": cmd_demo,
    "ensemble": cmd_ensemble,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help and --version
        return int(exc.code or 0)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        config = RunConfig.from_args(args)
        return COMMANDS[args.command](args, config)
    except (PreconditionViolated, DimensionMismatch) as exc:
        print(f"dilatoo: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (VerificationFailed, CommutationFailure, ConvergenceError, ContainmentError) as exc:
        print(f"dilatoo: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (UsageError, ConfigurationError, MatrixFileError, DilationError,
            FileNotFoundError, ValueError) as exc:
        print(f"dilatoo: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    sys.exit(main())
