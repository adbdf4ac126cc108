"""Read and write polynomial and truth-table files.

Polynomial file::

    n=5
    # x1 x2 + x3 x4 x5
    1 2
    3 4 5

One monomial per line as 1-based indices; `const` is the constant-1
monomial and `#` starts a comment.  Repeated monomials cancel in pairs.

Truth-table file: `n=<int>` then one line of 2**n characters `0`/`1`,
assignment index order (variable 1 least significant).
"""
from pathlib import Path
from typing import Iterable, Iterator, List, Tuple

from sparsepoly.errors import FormatError
from sparsepoly.gf2poly import SparsePoly, TruthTable, canonicalize

__all__ = [
    "format_poly",
    "format_table",
    "parse_poly",
    "parse_table",
    "read_poly",
    "read_table",
    "write_text",
]


def _content_lines(lines: Iterable[str]) -> Iterator[Tuple[int, str]]:
    """Number and strip lines, dropping comments and blanks."""
    for number, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def _header(number: int, line: str) -> int:
    key, sep, value = line.partition("=")
    if not sep or key.strip() != "n":
        raise FormatError(f"line {number}: expected 'n=<int>', got {line!r}")
    try:
        n = int(value)
    except ValueError:
        raise FormatError(f"line {number}: bad variable count {value.strip()!r}") from None
    if n < 0:
        raise FormatError(f"line {number}: variable count must be non-negative")
    return n


def parse_poly(lines: Iterable[str]) -> SparsePoly:
    """Parse the polynomial file format.

    >>> str(parse_poly(["n=3", "1 2  # first", "3", "const"]))
    '1 + x3 + x1*x2'
    >>> parse_poly(["n=2", "1", "1"]).sparsity
    0
    """
    content = _content_lines(lines)
    try:
        n = _header(*next(content))
    except StopIteration:
        raise FormatError("missing 'n=<int>' header") from None
    raw: List[Tuple[int, ...]] = []
    for number, line in content:
        if line == "const":
            raw.append(())
            continue
        try:
            raw.append(tuple(int(_) for _ in line.split()))
        except ValueError:
            raise FormatError(f"line {number}: bad monomial {line!r}") from None
    try:
        return canonicalize(raw, n)
    except ValueError as err:
        raise FormatError(str(err)) from None


def parse_table(lines: Iterable[str]) -> TruthTable:
    """Parse the truth-table file format.

    >>> parse_table(["n=2", "0001"]).bits.tolist()
    [0, 0, 0, 1]
    """
    content = list(_content_lines(lines))
    if not content:
        raise FormatError("missing 'n=<int>' header")
    n = _header(*content[0])
    if len(content) != 2:
        raise FormatError(f"expected the header and one line of {1 << n} bits")
    number, bits = content[1]
    if len(bits) != 1 << n or set(bits) - {"0", "1"}:
        raise FormatError(f"line {number}: expected {1 << n} characters of 0/1")
    return TruthTable(n, [int(_) for _ in bits])


def format_poly(p: SparsePoly) -> str:
    """Format a polynomial in the file format.

    >>> print(format_poly(parse_poly(["n=3", "3", "2 1", "const"])), end="")
    n=3
    const
    3
    1 2
    """
    lines = [f"n={p.n}"]
    lines.extend(" ".join(str(i) for i in m) if m else "const" for m in p.terms)
    return "".join(f"{_}\n" for _ in lines)


def format_table(t: TruthTable) -> str:
    """Format a truth table in the file format."""
    return f"n={t.n}\n{t}\n"


def read_poly(path: Path) -> SparsePoly:
    """Read a polynomial file."""
    with open(path, encoding="utf-8") as fh:
        return parse_poly(fh)


def read_table(path: Path) -> TruthTable:
    """Read a truth-table file."""
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh)


def write_text(path: Path, text: str) -> None:
    """Write text, creating parent directories as needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
