"""Command line: test, learn, experiment, verify, distance and audit.

Exit codes: 0 accept or success, 1 reject or failed check, 2 usage or
input error.

    >>> create_parser().parse_args(["test", "--poly", "p.txt", "--s", "3", "--eps", "0.1"]).command
    'test'
"""
import argparse
import logging
import sys
from typing import List, Optional

from sparsepoly import cli, config, formats, harness, lemmas, text
from sparsepoly.errors import EmptyGrid, SparsePolyError
from sparsepoly.gf2poly import distance, distance_to_sparse_class, zero_fraction
from sparsepoly.learner import LearnerStatus, learn_poly_prime
from sparsepoly.partition import LEARNER_DELTA
from sparsepoly.tester import Outcome, Reason, test_sparse_poly

logger = logging.getLogger("sparsepoly")

EXPERIMENTS = ("completeness", "soundness", "query-scaling")
DEFAULT_TRIALS = 200


def _add(parser: argparse.ArgumentParser, options: List[str], required=()) -> None:
    for k, v in cli.parser_options(options):
        parser.add_argument(k, **({**v, "required": True} if k in required else v))


def create_parser() -> argparse.ArgumentParser:
    """Create the CLI parser with one subcommand per mode."""
    parser = argparse.ArgumentParser(prog="sparsepoly", description="Test s-sparse GF(2) polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)

    test = sub.add_parser("test", help="run the tester on a file-backed oracle")
    _add(test, cli.FUNCTION_OPTIONS + ["--s", "--eps"], required=("--s", "--eps"))
    _add(test, cli.PARAMETER_OPTIONS + ["--exact-backend"] + cli.REPORT_OPTIONS)

    learn = sub.add_parser("learn", help="learn a file-backed function directly")
    _add(learn, cli.FUNCTION_OPTIONS + ["--s", "--eps"], required=("--s", "--eps"))
    _add(learn, cli.REPORT_OPTIONS)

    experiment = sub.add_parser("experiment", help="seeded batches of tester runs")
    experiment.add_argument("kind", choices=EXPERIMENTS)
    _add(experiment, ["--family", "--n", "--s", "--eps", "--fraction", "--max-degree", "--trials"])
    _add(experiment, cli.PARAMETER_OPTIONS + ["--exact-backend", "--workers", "--csv"] + cli.REPORT_OPTIONS)

    verify = sub.add_parser("verify", help="exact verification suites")
    _add(verify, ["--suite", "--trials"] + cli.REPORT_OPTIONS)

    dist = sub.add_parser("distance", help="exact distances and zero fraction")
    _add(dist, cli.FUNCTION_OPTIONS + ["--other-poly", "--other-table", "--s", "--json", "-v"])

    audit = sub.add_parser("audit", help="structure audit over random partitions")
    _add(audit, ["--poly", "--family", "--n", "--s", "--eps", "--trials", "--workers"])
    _add(audit, cli.PARAMETER_OPTIONS + cli.REPORT_OPTIONS)
    return parser


def emit(args: argparse.Namespace, report: dict, summary: Optional[List[str]] = None) -> None:
    """Print the report, or its summary, and write --json when given."""
    rendered = text.to_json(report)
    if getattr(args, "json", None):
        formats.write_text(args.json, rendered)
    if getattr(args, "summary", False) and summary is not None:
        print(*summary, sep="\n")
    else:
        sys.stdout.write(rendered)


def run_test(args: argparse.Namespace) -> int:
    """Test mode; 0 on accept, 1 on reject."""
    f = cli.oracle_from_args(args)
    try:
        params = cli.params_from_args(args)
    except EmptyGrid as err:
        logger.info("no alpha grid: %s", err)
        report = {"outcome": Outcome.REJECT.value, "reason": Reason.EMPTY_GRID.value, "n": f.n, "seed": args.seed}
        emit(args, report, text.VerdictSummary(report))
        return 1
    verdict = test_sparse_poly(f, args.s, args.eps, params, config.derive_rng(args.seed), args.exact_backend)
    verdict.seed = args.seed
    report = verdict.to_dict()
    emit(args, report, text.VerdictSummary(report))
    return 0 if verdict.accepted else 1


def run_learn(args: argparse.Namespace) -> int:
    """Learn mode; prints the hypothesis, 0 when one was found."""
    f = cli.oracle_from_args(args)

    def membership(z):
        return int(f.query(z) < 0)

    outcome = learn_poly_prime(
        membership, args.s, f.n, args.eps, LEARNER_DELTA, config.derive_rng(args.seed), ledger=f.ledger
    )
    report = {
        "status": outcome.status.value,
        "rounds": outcome.rounds,
        "queries": f.ledger.as_dict(),
        "budget": outcome.budget.as_dict() if outcome.budget else None,
        "hypothesis": formats.format_poly(outcome.hypothesis) if outcome.hypothesis else None,
        "seed": args.seed,
    }
    if args.json:
        formats.write_text(args.json, text.to_json(report))
    if outcome.hypothesis is not None:
        sys.stdout.write(report["hypothesis"])
    else:
        print(outcome.status.value)
    return 0 if outcome.status is LearnerStatus.HYPOTHESIS else 1


def run_experiment(args: argparse.Namespace) -> int:
    """Experiment mode; always 0 once the batch ran."""
    ns = args.n or (None,)
    family = harness.make_family(
        args.family, n=ns[0], s=args.s, eps=args.eps, fraction=args.fraction, max_degree=args.max_degree
    )
    if args.s is None:
        args.s = getattr(family, "s", 3)
    if args.eps is None:
        args.eps = getattr(family, "eps", 0.1)
    params = cli.params_from_args(args)
    trials = DEFAULT_TRIALS if args.trials is None else args.trials
    if args.kind == "query-scaling":
        result = harness.run_query_scaling_experiment(
            [n for n in ns if n is not None] or [family.n], family, params, trials, args.seed, args.workers
        )
    elif args.kind == "soundness":
        result = harness.run_soundness_experiment(
            family, params, trials, args.seed, args.workers, args.exact_backend
        )
    else:
        result = harness.run_completeness_experiment(
            family, params, trials, args.seed, args.workers, args.exact_backend
        )
    report = result.as_dict()
    if args.csv:
        formats.write_text(args.csv, text.to_csv(text.csv_rows(report)))
    emit(args, report, text.ExperimentSummary(report))
    return 0


def run_verify(args: argparse.Namespace) -> int:
    """Verify mode; 0 when every suite passed."""
    results = [r.as_dict() for r in lemmas.run_suites(args.suite, args.trials, args.seed)]
    passed = all(r["passed"] for r in results)
    emit(args, {"suites": results, "passed": passed, "seed": args.seed}, text.SuiteSummary(results))
    return 0 if passed else 1


def run_distance(args: argparse.Namespace) -> int:
    """Distance mode: zero fraction, distance to a second file and to the s-sparse class."""
    f = cli.function_from_args(args)
    report = {"n": f.n, "zero_fraction": str(zero_fraction(f))}
    if args.other_poly is not None or args.other_table is not None:
        g = cli.function_from_args(args, "other_poly", "other_table")
        report["distance"] = str(distance(f, g))
    if args.s is not None:
        d, witness = distance_to_sparse_class(f, f.n, args.s)
        report.update(s=args.s, distance_to_class=str(d), witness=formats.format_poly(witness))
    emit(args, report)
    return 0


def run_audit(args: argparse.Namespace) -> int:
    """Audit mode over random partitions of a file polynomial or a family's."""
    if args.poly is not None:
        p = formats.read_poly(args.poly)
    else:
        family = harness.make_family(args.family, n=(args.n or (12,))[0])
        if not isinstance(family, harness.CanonicalFamily):
            raise SparsePolyError("audit needs --poly or the canonical family")
        p = family.poly()
    if args.s is None:
        args.s = max(p.sparsity, 1)
    if args.eps is None:
        args.eps = 0.1
    params = cli.params_from_args(args)
    trials = DEFAULT_TRIALS if args.trials is None else args.trials
    report = harness.run_audit(p, params, params.alpha_grid[0], trials, args.seed, args.workers).as_dict()
    summary = [f"{k:28s} {v:4d} / {report['trials']}" for k, v in report["holds"].items()]
    emit(args, report, summary)
    return 0


COMMANDS = {
    "test": run_test,
    "learn": run_learn,
    "experiment": run_experiment,
    "verify": run_verify,
    "distance": run_distance,
    "audit": run_audit,
}


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the subcommand and return its exit code."""
    args = create_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logger.debug("%s", args)
    try:
        return COMMANDS[args.command](args)
    except (SparsePolyError, OSError) as err:
        print(f"sparsepoly {args.command}: {err}", file=sys.stderr)
        return 2


def main():
    """Handle CLI argument processing."""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
