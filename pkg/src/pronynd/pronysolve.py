"""
Reconstruction of an exponential sum from lattice samples.

The pipeline is

1. ``kernel_basis``: null space of ``H_{Gamma_k, Gamma_{k+1}}(f)``, a normal
   set ``N`` of monomials picked by column pivoting and the reduction of
   every border monomial ``z_j nu`` (``nu`` in ``N``) onto ``N``;
2. ``multiplication_matrices``: the action of each ``z_j`` on ``span(N)``
   modulo the annihilating ideal;
3. ``joint_eigen``: common eigenvalues of those matrices, i.e. the nodes
   ``theta = exp(omega)`` together with their multiplicities;
4. ``recover_coefficients``: a Hermite interpolation problem for the
   coefficient polynomials.
"""

from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.linalg

from .errors import (
    DefectiveClusterError,
    InsufficientWindowError,
    MissingBorderError,
    NonCommutingError,
    NumericalDegeneracyError,
    RankDeficientVandermondeError,
    RankNotStabilizedError,
    ZeroComponentError,
)
from .hankel import DEFAULT_TOL, hankel_matrix, numeric_rank, rank_scan
from .indexsets import IndexSet, as_multiindex, grlex_key, set_sum, simplex
from .polynomial import Polynomial
from .signalmodel import ExponentialSumModel, LatticeSignal, correlate, evaluate_model
from .structure import L_inverse, canonical_basis, hermite_vandermonde, is_D_invariant

__all__ = [
    "KernelIdealData",
    "VarietyPoint",
    "Reconstruction",
    "kernel_basis",
    "multiplication_matrices",
    "commutation_residual",
    "random_combination",
    "joint_eigen",
    "frequencies_from_points",
    "recover_coefficients",
    "reconstruct",
    "annihilator_check",
    "admissible_set",
    "largest_kernel_order",
]

DEFAULT_SEED = 20180521


@dataclass
class KernelIdealData:
    """Annihilating-ideal data read off a Hankel kernel.

    ``border_coeffs`` maps each border monomial ``beta`` to the coefficient
    vector ``c`` (over ``normal_set``) with ``z^beta - sum c_nu z^nu`` in the
    ideal.
    """

    kernel_polys: list
    normal_set: IndexSet
    border_coeffs: dict
    k: int
    rank: int
    singular_values: np.ndarray = field(repr=False, default=None)

    def border_polys(self):
        out = []
        for beta, c in self.border_coeffs.items():
            p = Polynomial.monomial(beta) - Polynomial.from_vector(self.normal_set, c, rtol=0)
            out.append(p)
        return out


@dataclass
class VarietyPoint:
    """A common zero ``theta`` with its multiplicity space.

    ``heuristic`` flags multiplicity bases that were guessed (weight > 1 in
    more than one variable) rather than derived.
    """

    theta: np.ndarray
    mult_basis: list
    weight: int = 1
    heuristic: bool = False

    def to_json(self):
        return {
            "theta": [[float(t.real), float(t.imag)] for t in self.theta],
            "weight": self.weight,
            "mult_basis": [q.to_json() for q in self.mult_basis],
            "heuristic": self.heuristic,
        }


# -- step 1: kernel and normal set -------------------------------------------


def _pivot_columns(M, candidates, r, prefer_ratio=10.0):
    """Greedy column pivoting restricted to ``candidates`` (grlex ordered).

    Among remaining columns whose residual norm is within ``prefer_ratio`` of
    the largest, the grlex-first one is taken.  Returns the chosen columns and
    the residual norm of the last pivot.
    """
    R = M[:, candidates].copy()
    norms = np.linalg.norm(R, axis=0)
    chosen = []
    last = np.inf
    avail = list(range(len(candidates)))
    for _ in range(r):
        if not avail:
            break
        best = max(norms[i] for i in avail)
        if best == 0:
            last = 0.0
            break
        pick = min(i for i in avail if norms[i] * prefer_ratio >= best)
        last = norms[pick]
        q = R[:, pick] / norms[pick]
        R -= np.outer(q, q.conj() @ R)
        norms = np.linalg.norm(R, axis=0)
        avail.remove(pick)
        chosen.append(pick)
    return [candidates[i] for i in chosen], last


def kernel_basis(f, k, tol=DEFAULT_TOL):
    """Kernel of ``H_{Gamma_k, Gamma_{k+1}}(f)`` and the ideal data built from it."""
    s = f.s
    rows = simplex(k, s)
    cols = simplex(k + 1, s)
    H = hankel_matrix(f, rows, cols).data
    r_square = numeric_rank(H[:, : len(rows)], tol)
    U, sv, Vh = np.linalg.svd(H)
    if sv[0] == 0:
        r = 0
    else:
        r = int(np.sum(sv > tol.rank_rtol * sv[0] * max(H.shape)))
    if r != r_square:
        raise RankNotStabilizedError(
            f"rank H_{{Gamma_{k},Gamma_{k}}} = {r_square} but "
            f"rank H_{{Gamma_{k},Gamma_{k + 1}}} = {r}; increase k"
        )
    null = Vh[r:].conj().T
    kernel_polys = [Polynomial.from_vector(cols, null[:, i]) for i in range(null.shape[1])]

    cand = list(range(len(rows)))  # Gamma_k is the leading block of Gamma_{k+1}
    piv, last = _pivot_columns(H, cand, r)
    if len(piv) < r or (r and last <= tol.rank_rtol * sv[0]):
        raise NumericalDegeneracyError(
            f"column pivoting reached only {len(piv)} of {r} independent columns"
        )
    piv.sort(key=lambda i: grlex_key(cols[i]))
    normal = IndexSet((cols[i] for i in piv), s=s)

    HN = H[:, piv]
    border = {}
    for nu in normal:
        for j in range(s):
            beta = tuple(a + (1 if i == j else 0) for i, a in enumerate(nu))
            if beta in normal or beta in border:
                continue
            target = H[:, cols.index(beta)]
            c, *_ = np.linalg.lstsq(HN, target, rcond=None)
            res = np.linalg.norm(HN @ c - target)
            if res > tol.residual_atol * max(1.0, sv[0]):
                raise NumericalDegeneracyError(
                    f"border monomial {beta} is not reproduced by the normal set "
                    f"(residual {res:.3e})"
                )
            border[beta] = c
    return KernelIdealData(kernel_polys, normal, border, k, r, sv)


# -- step 2: multiplication matrices -------------------------------------------


def multiplication_matrices(kd):
    N = kd.normal_set
    r = len(N)
    s = N.s
    Ms = []
    for j in range(s):
        M = np.zeros((r, r), dtype=complex)
        for col, nu in enumerate(N):
            beta = tuple(a + (1 if i == j else 0) for i, a in enumerate(nu))
            if beta in N:
                M[N.index(beta), col] = 1.0
            elif beta in kd.border_coeffs:
                M[:, col] = kd.border_coeffs[beta]
            else:
                raise MissingBorderError(
                    f"no reduction for border monomial {beta}; increase k"
                )
        Ms.append(M)
    return Ms


def commutation_residual(Ms):
    """``max ||M_i M_j - M_j M_i|| / (||M_i|| ||M_j||)`` over all pairs."""
    worst = 0.0
    for i in range(len(Ms)):
        for j in range(i + 1, len(Ms)):
            scale = np.linalg.norm(Ms[i]) * np.linalg.norm(Ms[j])
            if scale == 0:
                continue
            d = np.linalg.norm(Ms[i] @ Ms[j] - Ms[j] @ Ms[i]) / scale
            worst = max(worst, float(d))
    return worst


# -- step 3: joint eigenvalues ------------------------------------------------


def random_combination(s, seed=DEFAULT_SEED):
    """Coefficients of the generic combination ``sum c_j M_j``; drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    c = rng.uniform(0.5, 1.5, s) * rng.choice([-1.0, 1.0], s)
    return c


def _guess_mult_basis(w, s):
    """First ``w`` monomials in grlex order (a lower set, hence D-invariant)."""
    deg = 0
    while len(simplex(deg, s)) < w:
        deg += 1
    return [Polynomial.monomial(a) for a in list(simplex(deg, s))[:w]]


def _local_dual_basis(Ns, w, rtol=1e-6):
    """D-invariant multiplicity space from the nilpotent parts ``Ns``.

    On the cluster's invariant subspace every dual functional is
    ``p -> u^T p(theta + N) v``, which by Taylor expansion equals
    ``(q(D) p)(theta)`` with ``q = sum_gamma u^T N^gamma v z^gamma / gamma!``.
    Products of ``w`` or more nilpotent factors vanish, so ``|gamma| < w``.
    Returns ``None`` when the span does not have dimension ``w``.
    """
    s = len(Ns)
    G = simplex(w - 1, s)
    powers = {}
    for gamma in G:
        P = np.eye(w, dtype=complex)
        for j, g in enumerate(gamma):
            for _ in range(g):
                P = P @ Ns[j]
        powers[gamma] = P / np.prod([factorial(g) for g in gamma])
    # column (u, v) of the coefficient matrix is the polynomial q_{u,v}
    C = np.array([[powers[gamma][u, v] for u in range(w) for v in range(w)] for gamma in G])
    U, sv, _ = np.linalg.svd(C, full_matrices=False)
    if sv[0] == 0 or np.sum(sv > rtol * sv[0]) != w:
        return None
    span = [Polynomial.from_vector(G, U[:, i]) for i in range(w)]
    return canonical_basis(span, rtol=rtol)


def _invariant_basis(Mc, lam, g):
    """Orthonormal basis of the invariant subspace of the eigenvalues ``lam[g]``.

    Taken from a complex Schur form of ``Mc`` ordered so that exactly those
    eigenvalues come first; ``None`` if the ordering cannot separate them.
    """
    center = np.mean(lam[g])
    spread = np.max(np.abs(lam[g] - center))
    others = np.delete(lam, g)
    gap = np.min(np.abs(others - center)) if len(others) else np.inf
    if gap <= spread:
        return None
    cut = 0.5 * (spread + gap) if np.isfinite(gap) else np.inf
    _, Z, sdim = scipy.linalg.schur(Mc, output="complex", sort=lambda x: abs(x - center) <= cut)
    if sdim != len(g):
        return None
    return Z[:, : len(g)]


def _nilpotency_ratio(M, Q, w=None):
    """``||N^w|| / ||N||^w`` for ``N = Q* M Q - mean eigenvalue``; ~0 for one multiple node."""
    w = Q.shape[1] if w is None else w
    B = Q.conj().T @ M @ Q
    N = B - np.trace(B) / B.shape[0] * np.eye(B.shape[0])
    nrm = np.linalg.norm(N, 2)
    if nrm == 0:
        return 0.0
    return float(np.linalg.norm(np.linalg.matrix_power(N, w), 2) / nrm ** w)


def _group_eigenvalues(Mc, lam, rtol, radius=0.05, isolation=3.0, nil_tol=1e-8):
    """Group the eigenvalues of ``Mc`` into points.

    Starting from each ungrouped eigenvalue, its nearest neighbours are added
    one at a time.  A group is accepted when all its members lie within
    ``rtol * (1 + |center|)`` of their mean, or when it lies within
    ``radius``, is separated from the remaining eigenvalues by ``isolation``
    times its spread and ``Mc`` minus the mean is nilpotent on its invariant
    subspace (a single multiple eigenvalue split by rounding).  The largest
    accepted group wins.
    """
    free = list(range(len(lam)))
    groups = []
    while free:
        i = free[0]
        order = sorted(free, key=lambda j: abs(lam[j] - lam[i]))
        best = [i]
        for w in range(2, len(order) + 1):
            g = order[:w]
            center = lam[g].mean()
            scale = 1.0 + abs(center)
            spread = np.max(np.abs(lam[g] - center))
            if spread > radius * scale:
                break
            if spread <= rtol * scale:
                best = g
                continue
            rest = order[w:]
            gap = np.min(np.abs(lam[rest] - center)) if rest else np.inf
            if gap <= isolation * spread:
                continue
            Q = _invariant_basis(Mc, lam, g)
            if Q is not None and _nilpotency_ratio(Mc, Q) <= nil_tol:
                best = g
        groups.append(sorted(best))
        free = [j for j in free if j not in best]
    return sorted(groups, key=lambda g: g[0])


def joint_eigen(Ms, tol=DEFAULT_TOL, seed=DEFAULT_SEED, nil_tol=1e-6):
    """Common eigenvalues of commuting matrices.

    The eigenvalues of a seeded random combination ``M_c`` are grouped into
    points: eigenvalues closer than ``cluster_rtol * (1 + |lambda|)`` merge,
    and so do isolated groups that are the split spectrum of a multiple
    eigenvalue.  The coordinates of a point are the mean eigenvalues of the
    ``M_j`` on the invariant subspace of its group, taken from an ordered
    complex Schur form of ``M_c`` (well conditioned even when the single
    eigenvectors of a multiple eigenvalue are not).  On that subspace every
    ``M_j`` minus its mean must be nilpotent.

    Multiplicity bases: monomials ``1, z, ..., z^(w-1)`` in one variable; in
    several variables they are read off the nilpotent parts of the ``M_j``,
    falling back to the first ``w`` grlex monomials (flagged ``heuristic``)
    if that fails.
    """
    if not Ms:
        return []
    r = Ms[0].shape[0]
    s = len(Ms)
    if r == 0:
        return []
    comm = commutation_residual(Ms)
    if comm > tol.commute_rtol:
        raise NonCommutingError(f"multiplication matrices fail to commute ({comm:.3e})")
    c = random_combination(s, seed)
    Mc = sum(cj * M for cj, M in zip(c, Ms))
    lam = np.linalg.eigvals(Mc)
    groups = _group_eigenvalues(Mc, lam, tol.cluster_rtol)

    points = []
    for g in groups:
        w = len(g)
        Q = _invariant_basis(Mc, lam, g)
        if Q is None:
            raise DefectiveClusterError(
                f"cannot separate the invariant subspace of a cluster of {w} eigenvalues"
            )
        theta = np.array([np.trace(Q.conj().T @ M @ Q) / w for M in Ms])
        spread = np.max(np.abs(lam[g] - np.mean(lam[g])))
        if w > 1 and spread > tol.cluster_rtol * (1.0 + abs(np.mean(lam[g]))):
            worst = max(_nilpotency_ratio(M, Q) for M in Ms)
            if worst > nil_tol:
                raise DefectiveClusterError(
                    f"multiplication matrices are not nilpotent on a cluster ({worst:.3e})"
                )
        if w == 1:
            basis, heur = [Polynomial.constant(1.0, s)], False
        elif s == 1:
            basis, heur = [Polynomial.monomial((i,)) for i in range(w)], False
        else:
            Ns = [Q.conj().T @ M @ Q - th * np.eye(w) for M, th in zip(Ms, theta)]
            basis = _local_dual_basis(Ns, w)
            heur = basis is None or not is_D_invariant(basis)
            if heur:
                basis = _guess_mult_basis(w, s)
        points.append(VarietyPoint(theta, basis, w, heur))
    return points


def frequencies_from_points(pts):
    out = []
    for pt in pts:
        theta = np.asarray(pt.theta if hasattr(pt, "theta") else pt, dtype=complex)
        if np.any(theta == 0):
            raise ZeroComponentError(
                f"node {theta} has a zero component; nodes of an annihilating "
                "ideal never do, so the upstream computation failed"
            )
        out.append(np.log(np.abs(theta)) + 1j * np.angle(theta))
    # np.angle returns values in (-pi, pi]
    return out


def recover_coefficients(f, pts, A=None, tol=DEFAULT_TOL):
    """Coefficient polynomials for the nodes ``pts`` from the samples on ``A``.

    Solves ``V(Theta, Q; A)^T c = f(A)`` in the least squares sense and turns
    the per-point combination ``q_theta = sum c_q q`` into the coefficient
    polynomial ``L^{-1}(q_theta(z / theta))``.

    Returns ``(model, residual)`` with the largest sample misfit on ``A``.
    """
    if A is None:
        A = IndexSet((a for a in f.window if min(a) >= 0), s=f.s)
    y = f.gather(A)
    if not pts:
        return ExponentialSumModel(f.s, []), float(np.max(np.abs(y), initial=0.0))
    V = hermite_vandermonde(pts, A).data
    total = V.shape[0]
    if len(A) < total:
        raise RankDeficientVandermondeError(
            f"{len(A)} samples cannot determine {total} coefficients"
        )
    sv = np.linalg.svd(V, compute_uv=False)
    if sv[-1] <= tol.rank_rtol * sv[0] * max(V.shape):
        raise RankDeficientVandermondeError(
            "sample set is not an interpolation set for the nodes"
        )
    c, *_ = np.linalg.lstsq(V.T, y, rcond=None)
    terms = []
    pos = 0
    for pt in pts:
        w = len(pt.mult_basis)
        q = Polynomial.zero(f.s)
        for cq, basis in zip(c[pos:pos + w], pt.mult_basis):
            q = q + cq * basis
        pos += w
        coeff = L_inverse(q.dilate(1.0 / np.asarray(pt.theta)))
        terms.append((frequencies_from_points([pt])[0], coeff))
    model = ExponentialSumModel(f.s, terms)
    fit = np.array([evaluate_model(model, a) for a in A])
    return model, float(np.max(np.abs(fit - y), initial=0.0))


# -- end to end ---------------------------------------------------------------


def largest_kernel_order(window, s):
    """Largest ``k`` with ``Gamma_k + Gamma_{k+1} = Gamma_{2k+1}`` inside the window."""
    k = -1
    while simplex(2 * k + 3, s).issubset(window):
        k += 1
    return k


@dataclass
class Reconstruction:
    model: ExponentialSumModel
    points: list
    rank: int
    k: int
    k_star: object
    residual: float
    commutation_residual: float
    seed: int
    combination: list
    kernel: KernelIdealData = field(repr=False, default=None)

    def to_json(self):
        return {
            "rank": self.rank,
            "k": self.k,
            "k_star": self.k_star,
            "points": [p.to_json() for p in self.points],
            "model": self.model.to_json(),
            "residual": self.residual,
            "commutation_residual": self.commutation_residual,
            "seed": self.seed,
            "combination": [float(x) for x in self.combination],
        }


def reconstruct(f, tol=DEFAULT_TOL, seed=DEFAULT_SEED, k=None):
    """Recover the exponential sum behind the samples ``f``.

    ``k`` defaults to the largest order whose kernel matrix fits into the
    window.  Raises :class:`InsufficientWindowError` naming the smallest
    footprint ``Gamma_1`` when the window cannot hold any kernel matrix.
    """
    s = f.s
    if k is None:
        k = largest_kernel_order(f.window, s)
        if k < 0:
            need = simplex(1, s)
            raise InsufficientWindowError(need.missing_from(f.window), "signal window")
    k_scan = 0
    while simplex(2 * (k_scan + 1), s).issubset(f.window):
        k_scan += 1
    scan = rank_scan(f, k_scan, "simplex", tol)
    kd = kernel_basis(f, k, tol)
    k_star = scan.k_star if scan.k_star is not None else k
    if kd.rank == 0:
        return Reconstruction(
            ExponentialSumModel(s, []), [], 0, k, k_star, 0.0, 0.0, seed,
            list(random_combination(s, seed)), kd,
        )
    Ms = multiplication_matrices(kd)
    comm = commutation_residual(Ms)
    pts = joint_eigen(Ms, tol, seed)
    model, resid = recover_coefficients(f, pts, None, tol)
    return Reconstruction(
        model, pts, kd.rank, k, k_star, resid, comm, seed,
        list(random_combination(s, seed)), kd,
    )


def admissible_set(window, q):
    """All ``alpha`` with ``alpha + supp(q)`` inside the window."""
    supp = np.array(list(q.terms) or [(0,) * window.s], dtype=np.int64)
    if len(window) == 0:
        return IndexSet((), s=window.s)
    W = np.array(window.elements, dtype=np.int64)
    base = W - supp[0]
    shifted = (base[:, None, :] + supp[None, 1:, :]).reshape(-1, window.s)
    ok = np.all((window.positions(shifted) >= 0).reshape(len(W), -1), axis=1)
    return IndexSet((tuple(int(x) for x in a) for a in base[ok]), s=window.s, order="insertion")


def annihilator_check(f, q, E=None):
    """``max_{alpha in E} |(f * q)(alpha)|``; ``E`` defaults to the admissible set."""
    if q.is_zero():
        return 0.0
    if E is None:
        E = admissible_set(f.window, q)
    if len(E) == 0:
        return 0.0
    return float(np.max(np.abs(correlate(f, q, E).values)))
