"""
Generalized Hankel and Toeplitz matrices, numeric rank and rank scans.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientWindowError
from .indexsets import IndexSet, hyperbolic_cross, reflect, set_sum, simplex
from .signalmodel import ExponentialSumModel, LatticeSignal, sample

__all__ = [
    "Tolerances",
    "StructuredMatrix",
    "hankel_matrix",
    "toeplitz_matrix",
    "numeric_rank",
    "RankScan",
    "rank_scan",
    "family_set",
]

KINDS = ("Hankel", "Toeplitz", "Vandermonde", "HermiteVandermonde", "BlockDiagonal", "Plain")


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the whole pipeline.

    ``rank_rtol`` is the relative singular value cutoff, ``cluster_rtol`` the
    radius (relative to ``1 + |theta|``) within which eigenvalues are merged,
    ``residual_atol`` bounds residuals of consistency checks and
    ``commute_rtol`` the relative commutator norm of multiplication matrices.
    """

    rank_rtol: float = 1e-10
    cluster_rtol: float = 1e-3
    residual_atol: float = 1e-7
    commute_rtol: float = 1e-6

    def __post_init__(self):
        if min(self.rank_rtol, self.cluster_rtol, self.residual_atol, self.commute_rtol) <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerances()


@dataclass
class StructuredMatrix:
    """Dense matrix together with its row and column labels.

    ``rows``/``cols`` are index sets for Hankel and Toeplitz matrices and for
    the column side of Vandermonde matrices; row labels of (Hermite)
    Vandermonde matrices are ``(point number, basis polynomial)`` pairs.
    """

    rows: object
    cols: object
    data: np.ndarray
    kind: str = "Plain"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (len(self.rows), len(self.cols)):
            raise ValueError("data shape does not match the labels")

    @property
    def shape(self):
        return self.data.shape

    def entry(self, alpha, beta):
        return self.data[self.rows.index(alpha), self.cols.index(beta)]

    def to_json(self):
        def labels(L):
            if isinstance(L, IndexSet):
                return L.to_json()
            return [str(x) for x in L]

        return {
            "kind": self.kind,
            "rows": labels(self.rows),
            "cols": labels(self.cols),
            "data": [[[float(z.real), float(z.imag)] for z in row] for row in self.data],
        }

    @classmethod
    def from_json(cls, d):
        data = np.array([[complex(re, im) for re, im in row] for row in d["data"]])
        rows = d["rows"]
        cols = d["cols"]
        if rows and isinstance(rows[0], list):
            rows = IndexSet.from_json(rows)
        if cols and isinstance(cols[0], list):
            cols = IndexSet.from_json(cols)
        if not rows:
            rows = IndexSet((), s=1)
        if not cols:
            cols = IndexSet((), s=1)
        return cls(rows, cols, data.reshape(len(rows), len(cols)), d.get("kind", "Plain"))


def _as_signal(f, footprint):
    if isinstance(f, ExponentialSumModel):
        return sample(f, footprint)
    return f


def _lookup_matrix(f, A, B, sign):
    s = A.s
    a = np.array(A.elements, dtype=np.int64).reshape(len(A), s)
    b = np.array(B.elements, dtype=np.int64).reshape(len(B), s)
    pts = (a[:, None, :] + sign * b[None, :, :]).reshape(-1, s)
    return f.gather_array(pts).reshape(len(A), len(B))


def hankel_matrix(f, A, B):
    """``H_{A,B}(f)`` with entry ``f(alpha + beta)``.

    ``f`` may also be a model, which is then sampled on ``A + B``.
    """
    f = _as_signal(f, set_sum(A, B, 1))
    return StructuredMatrix(A, B, _lookup_matrix(f, A, B, 1), "Hankel")


def toeplitz_matrix(f, A, B):
    """``T_{A,B}(f)`` with entry ``f(alpha - beta)``."""
    f = _as_signal(f, set_sum(A, B, -1))
    return StructuredMatrix(A, B, _lookup_matrix(f, A, B, -1), "Toeplitz")


def numeric_rank(M, tol=DEFAULT_TOL):
    """Number of singular values above ``rank_rtol * sigma_1 * max(shape)``."""
    data = M.data if isinstance(M, StructuredMatrix) else np.asarray(M)
    if data.size == 0:
        raise ValueError("numeric rank of an empty matrix")
    sv = np.linalg.svd(data, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol.rank_rtol * sv[0] * max(data.shape)))


def family_set(family, k, s):
    """Index set number ``k`` of a family: ``simplex`` gives Gamma_k, ``cross`` Upsilon_k.

    The hyperbolic cross is empty for ``k = 0``.
    """
    if family == "simplex":
        return simplex(k, s)
    if family in ("cross", "hyperbolic_cross"):
        return hyperbolic_cross(k, s) if k >= 1 else IndexSet((), s=s)
    raise ValueError(f"unknown index family {family!r}")


@dataclass
class RankScan:
    ranks: list
    k_star: object
    family: str

    def to_json(self):
        return {
            "family": self.family,
            "ranks": [[k, r] for k, r in self.ranks],
            "k_star": self.k_star,
        }


def rank_scan(f, k_max, family="simplex", tol=DEFAULT_TOL):
    """Ranks of ``H_{A_k, A_k}(f)`` for ``k = 0..k_max``.

    ``k_star`` is the smallest ``k`` with ``rank(k) == rank(k + 1)``, or
    ``None`` if the scan never sees two equal consecutive ranks.
    """
    if isinstance(f, ExponentialSumModel):
        A = family_set(family, k_max, f.s)
        f = sample(f, set_sum(A, A))
    s = f.s
    need = set_sum(family_set(family, k_max, s), family_set(family, k_max, s))
    missing = need.missing_from(f.window)
    if missing:
        raise InsufficientWindowError(missing)
    ranks = []
    for k in range(k_max + 1):
        A = family_set(family, k, s)
        r = numeric_rank(hankel_matrix(f, A, A), tol) if len(A) else 0
        ranks.append((k, r))
    k_star = next(
        (ranks[i][0] for i in range(len(ranks) - 1) if ranks[i][1] == ranks[i + 1][1]),
        None,
    )
    return RankScan(ranks, k_star, family)


def toeplitz_mirror_rank(f, k, tol=DEFAULT_TOL):
    """Rank of ``T_{Gamma_k, -Gamma_k}(f)``, which reads the Hankel footprint."""
    A = simplex(k, f.s)
    return numeric_rank(toeplitz_matrix(f, A, reflect(A)), tol)
