"""
Multi-indices and finite index sets.

A multi-index is a plain ``tuple`` of ints.  Index sets are ordered
collections of distinct multi-indices of equal length; the order matters
because it fixes the row/column order of every matrix built from the set
and hence the correspondence between kernel vectors and polynomials.

Graded lexicographic order compares total degree first and breaks ties
lexicographically with the first coordinate most significant, so in two
variables ``(0, 1) < (1, 0)``.
"""

from itertools import product
from math import prod

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "IndexSet",
    "as_multiindex",
    "grlex_key",
    "compare_grlex",
    "simplex",
    "hyperbolic_cross",
    "box",
    "set_sum",
    "reflect",
    "unit",
]


def as_multiindex(alpha):
    """Coerce ``alpha`` (int or iterable of ints) to a tuple of Python ints."""
    if isinstance(alpha, (int,)) and not isinstance(alpha, bool):
        return (int(alpha),)
    return tuple(int(a) for a in alpha)


def unit(j, s):
    """The ``j``-th unit multi-index in ``s`` variables."""
    return tuple(1 if i == j else 0 for i in range(s))


def grlex_key(alpha):
    return (sum(alpha), tuple(alpha))


def compare_grlex(alpha, beta):
    """Return -1, 0 or 1 as ``alpha`` is less than, equal to or greater than ``beta``."""
    alpha, beta = as_multiindex(alpha), as_multiindex(beta)
    if len(alpha) != len(beta):
        raise DimensionMismatchError(
            f"cannot compare multi-indices of length {len(alpha)} and {len(beta)}"
        )
    ka, kb = grlex_key(alpha), grlex_key(beta)
    return (ka > kb) - (ka < kb)


class IndexSet:
    """Finite ordered set of multi-indices of a common dimension ``s``.

    Parameters
    ----------
    elements : iterable
        Multi-indices.  Duplicates are dropped, first occurrence wins.
    s : int, optional
        Dimension; required when ``elements`` is empty.
    order : {"grlex", "insertion"}
        ``"grlex"`` sorts the elements, ``"insertion"`` keeps the given order.
    """

    __slots__ = ("_elements", "_pos", "s", "order", "_grid")

    def __init__(self, elements=(), s=None, order="grlex"):
        if order not in ("grlex", "insertion"):
            raise ValueError(f"unknown order tag {order!r}")
        pos = {}
        elems = []
        for a in elements:
            a = as_multiindex(a)
            if a not in pos:
                pos[a] = None
                elems.append(a)
        dims = {len(a) for a in elems}
        if s is None:
            if not dims:
                raise ValueError("dimension s is required for an empty index set")
            s = dims.pop() if len(dims) == 1 else None
        if s is None or any(d != s for d in dims):
            raise DimensionMismatchError("all multi-indices must have the same length")
        if s < 1:
            raise ValueError("dimension must be at least 1")
        if order == "grlex":
            elems.sort(key=grlex_key)
        self._elements = tuple(elems)
        self._pos = {a: i for i, a in enumerate(self._elements)}
        self.s = int(s)
        self.order = order
        self._grid = None

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __getitem__(self, i):
        return self._elements[i]

    def __contains__(self, alpha):
        return as_multiindex(alpha) in self._pos

    def __eq__(self, other):
        if not isinstance(other, IndexSet):
            return NotImplemented
        return self.s == other.s and self._elements == other._elements

    def __hash__(self):
        return hash((self.s, self._elements))

    def __repr__(self):
        return f"IndexSet({list(self._elements)!r}, s={self.s})"

    @property
    def elements(self):
        return self._elements

    def index(self, alpha):
        """Position of ``alpha`` in the stored order (``KeyError`` if absent)."""
        return self._pos[as_multiindex(alpha)]

    def positions(self, pts):
        """Positions of the rows of the integer array ``pts``; ``-1`` where absent.

        Uses a dense lookup grid over the bounding box unless the set is
        too sparse for that to pay off.
        """
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.s)
        if not self._elements:
            return np.full(len(pts), -1, dtype=np.int64)
        if self._grid is None:
            E = np.array(self._elements, dtype=np.int64)
            lo = E.min(axis=0)
            shape = E.max(axis=0) - lo + 1
            if np.prod(shape.astype(float)) > 16 * len(E) + 2**20:
                self._grid = (None, None, None)
            else:
                grid = np.full(tuple(shape), -1, dtype=np.int64)
                grid[tuple((E - lo).T)] = np.arange(len(E))
                self._grid = (lo, shape, grid)
        lo, shape, grid = self._grid
        if grid is None:
            return np.array(
                [self._pos.get(tuple(int(x) for x in p), -1) for p in pts], dtype=np.int64
            )
        rel = pts - lo
        inside = np.all((rel >= 0) & (rel < shape), axis=1)
        out = np.full(len(pts), -1, dtype=np.int64)
        if inside.any():
            out[inside] = grid[tuple(rel[inside].T)]
        return out

    def as_set(self):
        return set(self._elements)

    def is_nonnegative(self):
        return all(a >= 0 for alpha in self._elements for a in alpha)

    def missing_from(self, other):
        """Elements of ``self`` that are not contained in ``other``."""
        return [a for a in self._elements if a not in other]

    def issubset(self, other):
        return all(a in other for a in self._elements)

    def to_json(self):
        return [list(a) for a in self._elements]

    @classmethod
    def from_json(cls, data, s=None, order="insertion"):
        return cls([tuple(a) for a in data], s=s, order=order)

    def _check_dim(self, other):
        if self.s != other.s:
            raise DimensionMismatchError(
                f"index sets of dimension {self.s} and {other.s}"
            )


def simplex(k, s):
    """``{alpha in N_0^s : |alpha| <= k}`` in grlex order."""
    if k < 0 or s < 1:
        raise ValueError("simplex needs k >= 0 and s >= 1")
    return IndexSet(_compositions_upto(k, s), s=s)


def _compositions_upto(k, s):
    if s == 1:
        for a in range(k + 1):
            yield (a,)
        return
    for a in range(k + 1):
        for rest in _compositions_upto(k - a, s - 1):
            yield (a,) + rest


def hyperbolic_cross(n, s):
    """Positive hyperbolic cross ``{alpha : prod(1 + alpha_j) <= n}``."""
    if n < 1 or s < 1:
        raise ValueError("hyperbolic_cross needs n >= 1 and s >= 1")
    # prod(1 + alpha_j) <= n forces every alpha_j <= n - 1
    elems = [a for a in product(range(n), repeat=s) if prod(1 + x for x in a) <= n]
    return IndexSet(elems, s=s)


def box(lo, hi):
    """Rectangular block ``lo <= alpha <= hi`` (componentwise, inclusive)."""
    lo, hi = as_multiindex(lo), as_multiindex(hi)
    if len(lo) != len(hi):
        raise DimensionMismatchError("box corners of different length")
    ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
    return IndexSet(product(*ranges), s=len(lo))


def reflect(A):
    """``-A``, keeping the order of ``A``."""
    return IndexSet((tuple(-a for a in alpha) for alpha in A), s=A.s, order="insertion")


def set_sum(A, B, sign=1):
    """``A + B`` (``sign=1``) or ``A - B`` (``sign=-1``) as a grlex-ordered set.

    This is exactly the set of lattice points a Hankel (resp. Toeplitz)
    matrix with rows ``A`` and columns ``B`` reads.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    A._check_dim(B)
    pts = {
        tuple(a + sign * b for a, b in zip(alpha, beta)) for alpha in A for beta in B
    }
    return IndexSet(pts, s=A.s)
