"""Render verdicts and reports.

Use to_json() for the report written to stdout or --json.
Use csv_rows() for the flat per-trial projection behind --csv.
Use VerdictSummary(), ExperimentSummary() and SuiteSummary() for the
aligned text shown by --summary.
"""
import csv
import io
import json
from typing import Iterable, List, Mapping, Sequence

__all__ = [
    "CSV_FIELDS",
    "ExperimentSummary",
    "SuiteSummary",
    "VerdictSummary",
    "csv_rows",
    "to_csv",
    "to_json",
]

CSV_FIELDS = (
    "n",
    "trial",
    "excluded",
    "outcome",
    "reason",
    "alpha",
    "high_count",
    "variation",
    "closeness",
    "shiv",
    "equivalence",
    "other",
    "total",
)


def to_json(report: Mapping) -> str:
    """Serialize with sorted keys, two-space indent and a final newline.

    >>> print(to_json({"b": 1, "a": [1, 2]}), end="")
    {
      "a": [
        1,
        2
      ],
      "b": 1
    }
    """
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def csv_rows(report: Mapping) -> List[dict]:
    """Flatten the per-trial digests of an experiment or scaling report.

    >>> digest = {"trial": 0, "excluded": False, "outcome": "accept", "reason": None,
    ...           "alpha": 0.125, "high_count": 0, "queries": {"variation": 4, "total": 4}}
    >>> csv_rows({"family": {"n": 6}, "digests": [digest]})[0]["total"]
    4
    """
    if "reports" in report:
        return [row for sub in report["reports"].values() for row in csv_rows(sub)]
    n = report.get("family", {}).get("n")
    rows = []
    for d in report.get("digests", []):
        row = {k: d.get(k) for k in CSV_FIELDS}
        row["n"] = n
        row.update(d.get("queries", {}))
        rows.append({k: row.get(k) for k in CSV_FIELDS})
    return rows


def to_csv(rows: Iterable[Mapping]) -> str:
    """Rows as CSV text with a header line."""
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return out.getvalue()


def _rate(value) -> str:
    return "-" if value is None else f"{value:.3f}"


def VerdictSummary(verdict: Mapping) -> List[str]:
    """Short report of one tester run.

    Example:
        outcome   reject  closeness-check-failed
        alpha      0.125  high 1 of 64
        queries  2690756  variation 2690176  closeness 100  shiv 0  ...
    """
    reason = verdict.get("reason") or ""
    output = [f"{'outcome':8s} {verdict['outcome']:>8s}  {reason}".rstrip()]
    if verdict.get("alpha") is not None:
        high = verdict.get("high_count")
        subsets = len(verdict.get("subset_sizes", []))
        output.append(f"{'alpha':8s} {verdict['alpha']:8.4g}  high {high} of {subsets}")
    queries = verdict.get("queries", {})
    phases = "  ".join(f"{k} {v}" for k, v in queries.items() if k != "total")
    output.append(f"{'queries':8s} {queries.get('total', 0):8d}  {phases}")
    if verdict.get("hypothesis") is not None:
        body = [line for line in verdict["hypothesis"].splitlines()[1:]]
        output.append(f"{'learned':8s} {len(body):8d}  monomial(s)")
    return output


def ExperimentSummary(report: Mapping) -> List[str]:
    """Aligned summary of an experiment or scaling report.

    Example:
        completeness  canonical  n=64   trials 200  accept 0.905
          reject   13  closeness-check-failed
          reject    6  shiv-failed
          queries  min 2690400  mean 2690512.3  max 2691017
    """
    if "reports" in report:
        output = []
        for sub in report["reports"].values():
            output.extend(ExperimentSummary(sub))
        output.append(f"{'spread':12s}  {_rate(report.get('spread'))}")
        return output
    family = report["family"]
    output = [
        f"{report['experiment']:12s}  {family['name']}  n={family['n']:<4d} "
        f"trials {report['trials']}  accept {_rate(report['accept_rate'])}"
    ]
    if report.get("excluded"):
        output.append(f"  {'excluded':8s} {report['excluded']:4d}")
    for reason, count in report["reasons"].items():
        output.append(f"  {'reject':8s} {count:4d}  {reason}")
    if report.get("classification_match_rate") is not None:
        output.append(f"  {'matched':8s} {_rate(report['classification_match_rate'])}  of exact classifications")
    q = report["queries"]
    if q["mean"] is not None:
        output.append(f"  {'queries':8s} min {q['min']}  mean {q['mean']:.1f}  max {q['max']}")
    return output


def SuiteSummary(results: Sequence[Mapping]) -> List[str]:
    """One aligned line per verification suite.

    >>> SuiteSummary([{"name": "zero_density", "checks": 200, "failures": 0, "passed": True, "detail": None}])
    ['zero_density    200       0  ok']
    """
    output = []
    for r in results:
        status = "ok" if r["passed"] else f"FAILED  {r['detail']}"
        output.append(f"{r['name']:12s} {r['checks']:6d}  {r['failures']:6d}  {status}")
    return output
