"""
Multiplicity structure: falling factorials, the Newton-series operator ``L``,
shift- versus D-invariant polynomial spaces, (Hermite) Vandermonde matrices
and the block factorization ``H_{A,B} = V_A^T F V_B``.

``L`` sends a polynomial to the power series of its normalized forward
differences at the origin,

    L p = sum_alpha (tau - I)^alpha p(0) / alpha! * z^alpha,

and its inverse replaces ``z^alpha`` by the falling factorial
``(z)_alpha``.  ``L`` maps shift-invariant spaces onto D-invariant ones.
"""

from dataclasses import dataclass, field
from itertools import product
from math import comb, factorial, prod

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonBlockDiagonalError,
    NotShiftInvariantError,
    RankDeficientVandermondeError,
)
from .hankel import DEFAULT_TOL, StructuredMatrix, hankel_matrix
from .indexsets import IndexSet, as_multiindex, grlex_key, set_sum, simplex
from .polynomial import Polynomial
from .signalmodel import sample, shift_hull

__all__ = [
    "falling_factorial",
    "L_apply",
    "L_inverse",
    "canonical_basis",
    "is_shift_invariant",
    "is_D_invariant",
    "shift_to_D_invariant",
    "D_to_shift_invariant",
    "multiplicity_basis",
    "vandermonde",
    "hermite_vandermonde",
    "FactorizationResult",
    "factorize",
]


def falling_factorial(alpha):
    """``prod_j z_j (z_j - 1) ... (z_j - alpha_j + 1)`` in monomial form."""
    alpha = as_multiindex(alpha)
    if any(a < 0 for a in alpha):
        raise ValueError(f"falling factorial of a negative multi-index {alpha}")
    s = len(alpha)
    out = Polynomial.constant(1.0, s)
    for j, a in enumerate(alpha):
        zj = Polynomial.variable(j, s)
        for i in range(a):
            out = out * (zj - i)
    return out


def _max_exponents(p):
    return [max((a[j] for a in p.terms), default=0) for j in range(p.s)]


def L_apply(p):
    if p.is_zero():
        return Polynomial.zero(p.s)
    p._require_polynomial("L")
    # forward differences of order > deg_j vanish in coordinate j
    box = [range(d + 1) for d in _max_exponents(p)]
    values = {g: p(g) for g in product(*box)}
    out = {}
    for alpha in product(*box):
        diff = 0j
        for gamma in product(*(range(a + 1) for a in alpha)):
            sign = -1 if (sum(alpha) - sum(gamma)) % 2 else 1
            w = prod(comb(a, g) for a, g in zip(alpha, gamma))
            diff += sign * w * values[gamma]
        out[alpha] = diff / prod(factorial(a) for a in alpha)
    return Polynomial(out, p.s)


def L_inverse(p):
    """``sum_alpha d^alpha p(0) / alpha! * (z)_alpha``.

    ``d^alpha p(0) / alpha!`` is just the monomial coefficient, so this swaps
    every monomial for the falling factorial with the same exponent.
    """
    out = Polynomial.zero(p.s)
    for alpha, c in p.terms.items():
        out = out + c * falling_factorial(alpha)
    return out


def _coefficient_matrix(polys, G=None):
    s = polys[0].s
    if G is None:
        deg = max(max(int(q.degree), 0) for q in polys)
        G = simplex(deg, s)
    return np.column_stack([q.to_vector(G) for q in polys]), G


def _rank(M, rtol):
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def canonical_basis(polys, rtol=1e-10):
    """Reduced echelon basis of ``span(polys)``.

    Pivots are chosen greedily from the grlex-largest monomial down, each
    basis element has coefficient 1 at its own pivot and 0 at the others;
    elements are returned ordered by their pivot monomial.
    """
    polys = [q for q in polys if not q.is_zero()]
    if not polys:
        return []
    s = polys[0].s
    C, G = _coefficient_matrix(polys)
    U, sv, _ = np.linalg.svd(C, full_matrices=False)
    r = int(np.sum(sv > rtol * sv[0]))
    R = U[:, :r].T  # rows span the coefficient space
    order = sorted(range(len(G)), key=lambda i: grlex_key(G[i]), reverse=True)
    piv = []
    for i in order:
        trial = piv + [i]
        sub = R[:, trial]
        if np.linalg.svd(sub, compute_uv=False)[-1] > rtol * max(1.0, np.abs(R).max()):
            piv = trial
        if len(piv) == r:
            break
    E = np.linalg.solve(R[:, piv], R)
    E[np.abs(E) < 1e-13] = 0.0
    basis = [Polynomial.from_vector(G, E[i]) for i in range(r)]
    keyed = sorted(zip(piv, basis), key=lambda t: grlex_key(G[t[0]]))
    return [q for _, q in keyed]


def _closure_rank_gap(basis, ops, rtol):
    C, G = _coefficient_matrix(basis)
    r0 = _rank(C, rtol)
    images = [op(q) for op in ops for q in basis]
    images = [q for q in images if not q.is_zero()]
    if not images:
        return 0
    C2, _ = _coefficient_matrix(basis + images, G=None)
    return _rank(C2, rtol) - r0


def is_shift_invariant(basis, rtol=1e-9):
    """True when ``span(basis)`` is closed under every unit forward shift."""
    if not basis:
        return True
    s = basis[0].s
    ops = [lambda q, j=j: q.shift(j) for j in range(s)]
    return _closure_rank_gap(basis, ops, rtol) == 0


def is_D_invariant(basis, rtol=1e-9):
    """True when ``span(basis)`` is closed under every first partial derivative."""
    if not basis:
        return True
    s = basis[0].s
    ops = [lambda q, j=j: q.diff(j) for j in range(s)]
    return _closure_rank_gap(basis, ops, rtol) == 0


def shift_to_D_invariant(basis, rtol=1e-9):
    if not is_shift_invariant(basis, rtol):
        raise NotShiftInvariantError("input span is not closed under shifts")
    return [L_apply(q) for q in basis]


def D_to_shift_invariant(basis):
    return [L_inverse(q) for q in basis]


def multiplicity_basis(coeff, theta):
    """D-invariant multiplicity basis at ``theta`` for the coefficient ``coeff``.

    The shift-invariant hull of ``coeff`` is carried through ``L`` and the
    dilation ``z -> theta * z``; this is the space whose Hermite functionals
    ``q(D) (.)^alpha (theta)`` reproduce ``alpha -> p(alpha) theta^alpha`` for
    ``p`` in the hull.
    """
    hull = shift_hull(coeff)
    return canonical_basis([L_apply(q).dilate(theta) for q in hull])


def vandermonde(points, A):
    """``V(Theta; A)`` with entry ``theta^alpha``."""
    points = [np.asarray(t, dtype=complex).ravel() for t in points]
    for t in points:
        if len(t) != A.s:
            raise DimensionMismatchError("point and index set dimensions differ")
    if not A.is_nonnegative():
        raise ValueError("Vandermonde columns must lie in N_0^s")
    data = np.array(
        [[np.prod(t ** np.array(a)) for a in A] for t in points], dtype=complex
    ).reshape(len(points), len(A))
    return StructuredMatrix(list(range(len(points))), A, data, "Vandermonde")


def _point_parts(pt):
    if hasattr(pt, "theta"):
        return np.asarray(pt.theta, dtype=complex).ravel(), list(pt.mult_basis)
    theta, basis = pt
    return np.asarray(theta, dtype=complex).ravel(), list(basis)


def _functional_row(theta, q, A):
    """``alpha -> (q(D) z^alpha)(theta)`` on ``A``."""
    row = np.zeros(len(A), dtype=complex)
    for i, alpha in enumerate(A):
        v = 0j
        for beta, c in q.terms.items():
            if all(a >= b for a, b in zip(alpha, beta)):
                w = prod(factorial(a) // factorial(a - b) for a, b in zip(alpha, beta))
                v += c * w * np.prod(theta ** np.array([a - b for a, b in zip(alpha, beta)]))
        row[i] = v
    return row


def hermite_vandermonde(points, A):
    """``V(Theta, Q_Theta; A)``: rows ``(theta, q)``, entries ``(q(D) z^alpha)(theta)``.

    ``points`` holds objects with ``theta`` and ``mult_basis`` attributes or
    plain ``(theta, basis)`` pairs; bases must be in D-invariant form.
    """
    if not A.is_nonnegative():
        raise ValueError("Hermite-Vandermonde columns must lie in N_0^s")
    rows, labels = [], []
    for i, pt in enumerate(points):
        theta, basis = _point_parts(pt)
        if len(theta) != A.s:
            raise DimensionMismatchError("point and index set dimensions differ")
        for j, q in enumerate(basis):
            if q.s != A.s:
                raise DimensionMismatchError("basis polynomial dimension differs")
            rows.append(_functional_row(theta, q, A))
            labels.append((i, j))
    data = np.array(rows, dtype=complex).reshape(len(rows), len(A))
    return StructuredMatrix(labels, A, data, "HermiteVandermonde")


@dataclass
class FactorizationResult:
    V_A: StructuredMatrix
    V_B: StructuredMatrix
    F: StructuredMatrix
    residual: float
    block_sizes: list
    off_block_max: float = 0.0
    hankel_norm: float = 0.0
    bases: list = field(default_factory=list)

    @property
    def rank(self):
        return sum(self.block_sizes)

    def to_json(self):
        return {
            "V_A": self.V_A.to_json(),
            "V_B": self.V_B.to_json(),
            "F": self.F.to_json(),
            "residual": self.residual,
            "off_block_max": self.off_block_max,
            "hankel_norm": self.hankel_norm,
            "block_sizes": list(self.block_sizes),
        }


def factorize(m, A, B, tol=DEFAULT_TOL):
    """Factor ``H_{A,B}`` of the sampled model as ``V_A^T F V_B``.

    ``F`` is obtained by solving the linear system against the Hankel data
    and then checked to be block diagonal with nonsingular blocks.
    """
    if A.s != m.s or B.s != m.s:
        raise DimensionMismatchError("index sets and model have different dimension")
    points = []
    for omega, coeff in m.terms:
        theta = np.exp(omega)
        points.append((theta, multiplicity_basis(coeff, theta)))
    sizes = [len(b) for _, b in points]
    r = sum(sizes)
    VA = hermite_vandermonde(points, A)
    VB = hermite_vandermonde(points, B)
    for name, V in (("A", VA), ("B", VB)):
        if r and _rank(V.data, tol.rank_rtol) < r:
            raise RankDeficientVandermondeError(
                f"{name} is not an interpolation set for the Hermite problem"
            )
    H = hankel_matrix(sample(m, set_sum(A, B)), A, B)
    if r == 0:
        F = np.zeros((0, 0), dtype=complex)
    else:
        X = np.linalg.lstsq(VA.data.T, H.data, rcond=None)[0]
        F = np.linalg.lstsq(VB.data.T, X.T, rcond=None)[0].T
    mask = np.zeros((r, r), dtype=bool)
    start = 0
    for n in sizes:
        mask[start:start + n, start:start + n] = True
        start += n
    off = float(np.abs(F[~mask]).max()) if (~mask).any() else 0.0
    if off > tol.residual_atol * max(1.0, float(np.abs(F).max(initial=0.0))):
        raise NonBlockDiagonalError(
            f"solved F has off-block entries up to {off:.3e}; bases do not match the data"
        )
    Fb = np.where(mask, F, 0)
    start = 0
    for n in sizes:
        sv = np.linalg.svd(Fb[start:start + n, start:start + n], compute_uv=False)
        if sv[-1] <= tol.rank_rtol * sv[0]:
            raise RankDeficientVandermondeError("singular diagonal block in F")
        start += n
    resid = float(np.abs(H.data - VA.data.T @ Fb @ VB.data).max(initial=0.0))
    labels = VA.rows
    return FactorizationResult(
        V_A=VA,
        V_B=VB,
        F=StructuredMatrix(labels, labels, Fb, "BlockDiagonal"),
        residual=resid,
        block_sizes=sizes,
        off_block_max=off,
        hankel_norm=float(np.abs(H.data).max(initial=0.0)),
        bases=[b for _, b in points],
    )
