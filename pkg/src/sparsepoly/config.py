"""Defaults from the environment, seed streams and key=value profile files.

Environment variables, each with a fallback:

    SPARSEPOLY_ENUM_CAP      largest n the exact oracles enumerate (20)
    SPARSEPOLY_CLASS_N_CAP   largest n of the distance-to-class search (8)
    SPARSEPOLY_CLASS_S_CAP   largest s of the distance-to-class search (2)
    SPARSEPOLY_WORK_CAP      largest planned query or enumeration count of one run (10**10)
    SPARSEPOLY_PROFILE       default parameter profile (desk)
    SPARSEPOLY_WORKERS       experiment worker processes (1)
"""
import os
from pathlib import Path
from typing import Dict, Iterable, Mapping, Tuple, Union

import numpy as np

from sparsepoly.errors import FormatError

__all__ = [
    "OVERRIDE_KEYS",
    "derive_rng",
    "dump_profile",
    "get_class_caps",
    "get_default_profile",
    "get_default_workers",
    "get_enum_cap",
    "get_work_cap",
    "load_profile",
    "parse_profile",
]

# Keys accepted by profile files and by the --tau ... --m flags.
OVERRIDE_KEYS = ("tau", "delta", "r", "alpha", "bigM", "m", "C", "C_prime")
_INT_KEYS = ("r", "bigM", "m")

Override = Union[int, float, Tuple[float, ...]]


def _env_int(name: str, default: int) -> int:
    text = os.getenv(name)
    if text is None or not text.strip():
        return default
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"{name}={text!r} is not an integer") from None


def get_enum_cap() -> int:
    """Largest variable count the exact oracles enumerate."""
    return _env_int("SPARSEPOLY_ENUM_CAP", 20)


def get_work_cap() -> int:
    """Largest query or enumeration count one tester run or audit may plan."""
    return _env_int("SPARSEPOLY_WORK_CAP", 10**10)


def get_class_caps() -> Tuple[int, int]:
    """Caps (n, s) of the exhaustive distance-to-sparse-class search."""
    return (
        _env_int("SPARSEPOLY_CLASS_N_CAP", 8),
        _env_int("SPARSEPOLY_CLASS_S_CAP", 2),
    )


def get_default_profile() -> str:
    """Parameter profile used when none is given."""
    return os.getenv("SPARSEPOLY_PROFILE", "desk")


def get_default_workers() -> int:
    """Worker processes used by the experiment runner."""
    return max(1, _env_int("SPARSEPOLY_WORKERS", 1))


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Get the generator of the stream named by `keys` under `seed`.

    Streams with different keys are independent, and a stream never depends
    on which other streams were drawn first.

    >>> a = derive_rng(7, 3).integers(1 << 30)
    >>> b = derive_rng(7, 3).integers(1 << 30)
    >>> bool(a == b)
    True
    >>> bool(derive_rng(7, 3).integers(1 << 30) == derive_rng(7, 4).integers(1 << 30))
    False
    """
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError("seed and stream keys must be non-negative")
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def parse_profile(lines: Iterable[str]) -> Dict[str, Override]:
    """Parse key=value profile lines into parameter overrides.

    >>> parse_profile(["# desk", "tau=0.05", "r = 64", "alpha=0.1,0.2"])
    {'tau': 0.05, 'r': 64, 'alpha': (0.1, 0.2)}
    """
    overrides: Dict[str, Override] = {}
    for number, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (_.strip() for _ in line.partition("="))
        if not sep or key not in OVERRIDE_KEYS:
            raise FormatError(f"line {number}: expected one of {OVERRIDE_KEYS} as key=value")
        try:
            if key == "alpha":
                overrides[key] = tuple(float(_) for _ in value.split(","))
            elif key in _INT_KEYS:
                overrides[key] = int(value)
            else:
                overrides[key] = float(value)
        except ValueError:
            raise FormatError(f"line {number}: bad value {value!r} for {key}") from None
    return overrides


def load_profile(path: Path) -> Dict[str, Override]:
    """Read overrides from a key=value profile file."""
    with open(path, encoding="utf-8") as fh:
        return parse_profile(fh)


def dump_profile(values: Mapping[str, Override]) -> str:
    """Format overrides as key=value lines, the inverse of parse_profile.

    >>> print(dump_profile({"tau": 0.05, "alpha": (0.125,)}), end="")
    tau=0.05
    alpha=0.125
    """
    lines = []
    for key, value in values.items():
        if key not in OVERRIDE_KEYS:
            continue
        if isinstance(value, (tuple, list)):
            value = ",".join(repr(float(_)) for _ in value)
        lines.append(f"{key}={value}")
    return "".join(f"{_}\n" for _ in lines)
