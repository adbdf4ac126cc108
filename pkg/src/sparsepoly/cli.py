"""Shared command-line options and their conversion to library values.

Parameter overrides are layered: the profile's defaults, then a key=value
file given with --config, then the individual flags.

args = sparsepoly.__main__.create_parser().parse_args()
"""
import argparse
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from sparsepoly import config, formats
from sparsepoly.blackbox import BlackBox, read_oracle
from sparsepoly.errors import ParameterError
from sparsepoly.gf2poly import SparsePoly, TruthTable
from sparsepoly.partition import PROFILES, TesterParams, derive_params

__all__ = [
    "float_list",
    "function_from_args",
    "int_list",
    "oracle_from_args",
    "overrides_from_args",
    "params_from_args",
    "parser_options",
]


def float_list(text: str) -> Tuple[float, ...]:
    """Parse a comma list of floats.

    >>> float_list("0.125, 0.2")
    (0.125, 0.2)
    """
    try:
        return tuple(float(_) for _ in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma list of numbers") from None


def int_list(text: str) -> Tuple[int, ...]:
    """Parse a comma list of positive integers.

    >>> int_list("64,512")
    (64, 512)
    """
    try:
        values = tuple(int(_) for _ in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma list of integers") from None
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"'{text}' must hold positive integers")
    return values


FUNCTION_OPTIONS = ["--poly", "--table"]
PARAMETER_OPTIONS = ["--profile", "--config", "--tau", "--delta", "--r", "--alpha", "--bigM", "--m"]
REPORT_OPTIONS = ["--seed", "--json", "--summary", "-v"]


def parser_options(options: Optional[List[str]] = None) -> List[Tuple[str, dict]]:
    """Get standard command-line options.

    Args:
        options: flags wanted, in order; default is the function, parameter
            and report options

    Example:
        for name, attrib in parser_options(["--s", "--eps"]):
            parser.add_argument(name, **attrib)

    >>> [name for name, options in parser_options(["--poly", "--s", "-v"])]
    ['--poly', '--s', '-v']
    >>> parser_options(["--bogus"])
    []
    """
    profile = config.get_default_profile()
    known = {
        "--poly": {"type": Path, "metavar": "FILE", "help": "polynomial file"},
        "--table": {"type": Path, "metavar": "FILE", "help": "truth-table file"},
        "--other-poly": {"type": Path, "metavar": "FILE", "help": "second polynomial file"},
        "--other-table": {"type": Path, "metavar": "FILE", "help": "second truth-table file"},
        "--s": {"type": int, "metavar": "INT", "help": "sparsity"},
        "--eps": {"type": float, "metavar": "FLOAT", "help": "distance parameter"},
        "--profile": {
            "choices": PROFILES,
            "default": profile,
            "help": f"parameter profile, default {profile}",
        },
        "--config": {"type": Path, "metavar": "FILE", "help": "key=value parameter profile"},
        "--tau": {"type": float, "metavar": "FLOAT"},
        "--delta": {"type": float, "metavar": "FLOAT"},
        "--r": {"type": int, "metavar": "INT", "help": "number of partition subsets"},
        "--alpha": {"type": float_list, "metavar": "A[,A]", "help": "threshold grid"},
        "--bigM": {"type": int, "metavar": "INT", "help": "independence tests per subset"},
        "--m": {"type": int, "metavar": "INT", "help": "closeness-check samples"},
        "--seed": {"type": int, "default": 0, "metavar": "INT", "help": "default 0"},
        "--trials": {"type": int, "metavar": "INT"},
        "--json": {"type": Path, "metavar": "OUT", "help": "also write the JSON report to OUT"},
        "--csv": {"type": Path, "metavar": "OUT", "help": "write per-trial rows to OUT"},
        "--summary": {"action": "store_true", "help": "print a text summary instead of JSON"},
        "--exact-backend": {
            "dest": "exact_backend",
            "action": "store_true",
            "help": "classify on exact variations (n <= enumeration cap)",
        },
        "--workers": {
            "type": int,
            "default": config.get_default_workers(),
            "metavar": "INT",
            "help": "worker processes",
        },
        "--family": {"default": "canonical", "metavar": "NAME", "help": "function family"},
        "--n": {"type": int_list, "metavar": "N[,N]", "help": "variable count(s)"},
        "--fraction": {"type": float, "metavar": "FLOAT", "help": "flip-noise density"},
        "--max-degree": {"dest": "max_degree", "type": int, "metavar": "INT"},
        "--suite": {"default": "all", "metavar": "NAME", "help": "verification suite or all"},
        "-v": {
            "action": "count",
            "dest": "verbose",
            "default": 0,
            "help": "Verbose, multiple for more verbose",
        },
    }
    if options is None:
        options = FUNCTION_OPTIONS + PARAMETER_OPTIONS + REPORT_OPTIONS
    return [(k, known[k]) for k in options if k in known]


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Union[int, float, Tuple[float, ...]]]:
    """Profile-file values, then any flags given."""
    values = dict(config.load_profile(args.config)) if getattr(args, "config", None) else {}
    for key in config.OVERRIDE_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            values[key] = value
    return values


def params_from_args(args: argparse.Namespace) -> TesterParams:
    """Derive tester parameters from --s, --eps, --profile and the overrides."""
    if args.s is None or args.eps is None:
        raise ParameterError("--s and --eps are required")
    return derive_params(args.s, args.eps, args.profile, overrides_from_args(args))


def function_from_args(
    args: argparse.Namespace, poly: str = "poly", table: str = "table"
) -> Union[SparsePoly, TruthTable]:
    """Read the function named by exactly one of --poly and --table."""
    poly_path, table_path = getattr(args, poly, None), getattr(args, table, None)
    if (poly_path is None) == (table_path is None):
        flags = f"--{poly.replace('_', '-')} or --{table.replace('_', '-')}"
        raise ParameterError(f"give exactly one of {flags}")
    if poly_path is not None:
        return formats.read_poly(poly_path)
    return formats.read_table(table_path)


def oracle_from_args(args: argparse.Namespace) -> BlackBox:
    """A fresh oracle for the function named on the command line."""
    return read_oracle(getattr(args, "poly", None), getattr(args, "table", None))
