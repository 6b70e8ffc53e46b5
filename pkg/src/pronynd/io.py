"""
File formats and window specifications used by the command line tool.

Models and polynomials are JSON, signals CSV (header ``a1,...,as,re,im``).
A window spec is one of ``simplex:k``, ``cross:n`` or ``box:lo..hi`` with
one ``lo..hi`` range per coordinate separated by commas (a single range is
used for every coordinate).
"""

import json
import re
import sys

from .hankel import family_set
from .indexsets import box
from .polynomial import Polynomial
from .signalmodel import ExponentialSumModel, LatticeSignal

__all__ = [
    "WindowSpecError",
    "parse_window",
    "dumps",
    "write_text",
    "read_text",
    "load_model",
    "load_signal",
    "load_polynomial",
]


class WindowSpecError(ValueError):
    """Malformed window specification."""


_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_window(spec, s=None):
    """Index set described by ``spec``.

    Parameters
    ----------
    spec : str
        ``simplex:k``, ``cross:n`` or ``box:lo..hi[,lo..hi...]``.
    s : int, optional
        Dimension.  Needed for ``simplex`` and ``cross``; for ``box`` it
        checks (or broadcasts) the number of ranges.
    """
    if spec is None or not spec.strip():
        raise WindowSpecError("empty window spec")
    kind, sep, arg = spec.strip().partition(":")
    kind = kind.strip().lower()
    if not sep or not arg.strip():
        raise WindowSpecError(f"window spec {spec!r} lacks an argument")
    if kind in ("simplex", "cross"):
        if s is None:
            raise WindowSpecError(f"{kind} window needs the dimension s")
        try:
            k = int(arg)
        except ValueError:
            raise WindowSpecError(f"bad order in window spec {spec!r}") from None
        if k < 0:
            raise WindowSpecError("window order must be nonnegative")
        return family_set(kind, k, s)
    if kind == "box":
        ranges = []
        for part in arg.split(","):
            m = _RANGE.match(part)
            if not m:
                raise WindowSpecError(f"bad range {part!r} in window spec")
            lo, hi = int(m.group(1)), int(m.group(2))
            if lo > hi:
                raise WindowSpecError(f"empty range {part!r} in window spec")
            ranges.append((lo, hi))
        if s is not None and len(ranges) == 1:
            ranges = ranges * s
        if s is not None and len(ranges) != s:
            raise WindowSpecError(f"box has {len(ranges)} ranges but s={s}")
        return box([lo for lo, _ in ranges], [hi for _, hi in ranges])
    raise WindowSpecError(f"unknown window family {kind!r}")


def dumps(obj):
    """Deterministic JSON text."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_text(text, path=None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_model(path):
    return ExponentialSumModel.from_json(json.loads(read_text(path)))


def load_signal(path):
    return LatticeSignal.from_csv(read_text(path))


def load_polynomial(path, s=None):
    """Polynomial JSON: a term list ``[{"alpha", "re", "im"}, ...]`` or ``{"s", "terms"}``."""
    return Polynomial.from_json(json.loads(read_text(path)), s=s)
