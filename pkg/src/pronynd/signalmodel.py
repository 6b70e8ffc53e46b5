"""
Exponential sums with polynomial coefficients and their lattice samples.

A model is ``f(x) = sum_omega f_omega(x) * exp(omega . x)`` with complex
frequency vectors ``omega`` whose imaginary parts are kept in ``(-pi, pi]``
(the lattice samples only see ``exp(omega)``).  A :class:`LatticeSignal` is
what the rest of the package actually consumes: finitely many samples on a
window of the lattice.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InsufficientWindowError
from .indexsets import IndexSet, as_multiindex, simplex
from .polynomial import Polynomial

__all__ = [
    "ExponentialSumModel",
    "LatticeSignal",
    "normalize_frequency",
    "evaluate_model",
    "sample",
    "correlate",
    "convolve",
    "shift_hull",
    "sis_dimension",
    "random_model",
    "match_models",
    "models_match",
]


def normalize_frequency(omega):
    """Map imaginary parts into ``(-pi, pi]``; real parts are untouched."""
    omega = np.asarray(omega, dtype=complex).ravel()
    im = np.pi - np.mod(np.pi - omega.imag, 2 * np.pi)
    return omega.real + 1j * im


@dataclass
class ExponentialSumModel:
    """Frequency / coefficient-polynomial pairs.

    Terms with a zero coefficient polynomial are dropped on construction;
    frequencies are normalized and must be pairwise distinct.
    """

    s: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        clean = []
        for omega, coeff in self.terms:
            omega = normalize_frequency(omega)
            if len(omega) != self.s:
                raise DimensionMismatchError(
                    f"frequency of length {len(omega)} in a model with s={self.s}"
                )
            if not isinstance(coeff, Polynomial):
                coeff = Polynomial.constant(coeff, self.s)
            if coeff.s != self.s:
                raise DimensionMismatchError("coefficient polynomial dimension differs")
            if coeff.is_zero():
                continue
            for other, _ in clean:
                if np.allclose(np.exp(other), np.exp(omega), rtol=0, atol=1e-14):
                    raise ValueError(f"duplicate frequency {omega}")
            clean.append((omega, coeff))
        self.terms = clean

    def __len__(self):
        return len(self.terms)

    @property
    def frequencies(self):
        return [omega for omega, _ in self.terms]

    @property
    def points(self):
        """The nodes ``exp(omega)``."""
        return [np.exp(omega) for omega, _ in self.terms]

    def to_json(self):
        return {
            "s": self.s,
            "terms": [
                {
                    "omega": [[float(w.real), float(w.imag)] for w in omega],
                    "coeff": coeff.to_json(),
                }
                for omega, coeff in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data):
        s = int(data["s"])
        terms = []
        for t in data["terms"]:
            omega = np.array([complex(re, im) for re, im in t["omega"]])
            terms.append((omega, Polynomial.from_json(t["coeff"], s=s)))
        return cls(s, terms)


class LatticeSignal:
    """Samples of a sequence on a finite window of ``Z^s``."""

    def __init__(self, window, values):
        values = np.asarray(values, dtype=complex).ravel()
        if len(values) != len(window):
            raise DimensionMismatchError("one value per window point is required")
        self.window = window
        self.values = values

    @property
    def s(self):
        return self.window.s

    @classmethod
    def from_function(cls, fn, window):
        return cls(window, [fn(alpha) for alpha in window])

    @classmethod
    def zeros(cls, window):
        return cls(window, np.zeros(len(window)))

    def __len__(self):
        return len(self.window)

    def __call__(self, alpha):
        return self.gather([alpha])[0]

    def covers(self, points):
        return all(as_multiindex(p) in self.window for p in points)

    def positions(self, pts):
        """Window positions of the rows of the integer array ``pts`` (``-1`` if absent)."""
        return self.window.positions(pts)

    def gather_array(self, pts, what="signal window"):
        """Vectorized :meth:`gather` for an integer array of points."""
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.s)
        pos = self.positions(pts)
        if (pos < 0).any():
            missing = sorted({tuple(int(x) for x in p) for p in pts[pos < 0]})
            raise InsufficientWindowError(missing, what)
        return self.values[pos]

    def gather(self, points, what="signal window"):
        """Values at ``points``; raises :class:`InsufficientWindowError` listing gaps."""
        idx = []
        missing = []
        for p in points:
            p = as_multiindex(p)
            try:
                idx.append(self.window.index(p))
            except KeyError:
                missing.append(p)
        if missing:
            raise InsufficientWindowError(sorted(set(missing)), what)
        return self.values[np.asarray(idx, dtype=int)]

    def shift(self, alpha):
        """The translate ``tau^alpha f = f(. + alpha)``, on the shifted window."""
        alpha = as_multiindex(alpha)
        win = IndexSet(
            (tuple(x - a for x, a in zip(p, alpha)) for p in self.window),
            s=self.s,
            order="insertion",
        )
        return LatticeSignal(win, self.values.copy())

    def restrict(self, E):
        return LatticeSignal(E, self.gather(E))

    def __add__(self, other):
        if self.window.as_set() != other.window.as_set():
            raise DimensionMismatchError("signals live on different windows")
        return LatticeSignal(self.window, self.values + other.gather(self.window))

    def __mul__(self, c):
        return LatticeSignal(self.window, complex(c) * self.values)

    __rmul__ = __mul__

    def allclose(self, other, atol=1e-12):
        if self.window.as_set() != other.window.as_set():
            return False
        return bool(np.allclose(self.values, other.gather(self.window), rtol=0, atol=atol))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"a{j + 1}" for j in range(self.s)] + ["re", "im"])
        for alpha, v in zip(self.window, self.values):
            w.writerow(list(alpha) + [repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty signal file")
        header = [h.strip() for h in rows[0]]
        if len(header) < 3 or header[-2:] != ["re", "im"]:
            raise ValueError("signal header must be a1,...,as,re,im")
        s = len(header) - 2
        pts, vals = [], []
        for row in rows[1:]:
            if not row:
                continue
            pts.append(tuple(int(x) for x in row[:s]))
            vals.append(complex(float(row[s]), float(row[s + 1])))
        return cls(IndexSet(pts, s=s, order="insertion"), vals)


def evaluate_model(m, x):
    x = np.asarray(as_multiindex(x), dtype=float)
    if len(x) != m.s:
        raise DimensionMismatchError(f"point of length {len(x)} for s={m.s}")
    return complex(sum(coeff(x) * np.exp(omega @ x) for omega, coeff in m.terms))


def sample(m, W):
    if W.s != m.s:
        raise DimensionMismatchError(f"window of dimension {W.s} for s={m.s}")
    return LatticeSignal(W, [evaluate_model(m, alpha) for alpha in W])


def _filter_terms(g, f):
    if isinstance(g, Polynomial):
        if g.s != f.s:
            raise DimensionMismatchError("filter and signal dimensions differ")
        return list(g.terms.items())
    return [(as_multiindex(b), complex(c)) for b, c in dict(g).items()]


def correlate(f, g, E):
    """``(f * g)(alpha) = sum_beta f(alpha + beta) g_beta`` for ``alpha`` in ``E``.

    ``g`` is a polynomial read as a finitely supported sequence, so this is
    the Hankel operator of ``f`` applied to ``g``, or ``g(tau) f``.
    """
    if E.s != f.s:
        raise DimensionMismatchError("evaluation set and signal dimensions differ")
    terms = _filter_terms(g, f)
    if not terms or len(E) == 0:
        return LatticeSignal(E, np.zeros(len(E), dtype=complex))
    Ea = np.array(E.elements, dtype=np.int64).reshape(len(E), f.s)
    betas = np.array([b for b, _ in terms], dtype=np.int64).reshape(len(terms), f.s)
    coef = np.array([c for _, c in terms], dtype=complex)
    vals = f.gather_array((Ea[:, None, :] + betas[None, :, :]).reshape(-1, f.s))
    return LatticeSignal(E, vals.reshape(len(E), len(terms)) @ coef)


def convolve(f, g, E):
    """``alpha -> sum_beta f(alpha - beta) g_beta``; the Toeplitz operator of ``f``."""
    if isinstance(g, Polynomial):
        return correlate(f, g.reflect(), E)
    return correlate(f, {tuple(-b for b in as_multiindex(k)): c for k, c in dict(g).items()}, E)


def _numeric_rank(M, rtol=1e-10):
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0] * max(M.shape)))


def shift_hull(p, rtol=1e-10):
    """Basis of the smallest shift-invariant polynomial space containing ``p``.

    The span is closed under the forward shifts ``q -> q(. + e_j)`` by
    iteration; degree never grows, so the iteration stays inside
    ``Pi_deg(p)`` and terminates.
    """
    if p.is_zero():
        return []
    s = p.s
    G = simplex(int(p.degree), s)
    basis = p.to_vector(G)[:, None] / p.max_abs_coeff()
    while True:
        polys = [Polynomial.from_vector(G, basis[:, i], rtol=0) for i in range(basis.shape[1])]
        cand = [basis] + [
            np.column_stack([q.shift(j).to_vector(G) for q in polys]) for j in range(s)
        ]
        C = np.hstack(cand)
        r = _numeric_rank(C, rtol)
        if r == basis.shape[1]:
            break
        U, _, _ = np.linalg.svd(C, full_matrices=False)
        basis = U[:, :r]
    return [Polynomial.from_vector(G, basis[:, i]) for i in range(basis.shape[1])]


def sis_dimension(m):
    """``sum_omega dim Q_omega``: the rank of the Hankel operator of ``m``."""
    return sum(len(shift_hull(coeff)) for _, coeff in m.terms)


def random_model(s, n_terms, degree=0, seed=0, min_separation=0.1):
    """Seeded random model.

    Frequencies have real parts in ``[-0.5, 0.5]`` and imaginary parts in
    ``(-pi, pi]``; the nodes ``exp(omega)`` are kept ``min_separation`` apart
    (max-norm).  Coefficients are unit-modulus complex numbers, placed on
    every monomial of degree ``<= degree``.
    """
    if n_terms < 1:
        raise ValueError("a model needs at least one term")
    rng = np.random.default_rng(seed)
    nodes, freqs = [], []
    for _ in range(10000):
        if len(freqs) == n_terms:
            break
        omega = rng.uniform(-0.5, 0.5, s) + 1j * rng.uniform(-np.pi, np.pi, s)
        z = np.exp(omega)
        if all(np.max(np.abs(z - y)) >= min_separation for y in nodes):
            nodes.append(z)
            freqs.append(omega)
    if len(freqs) < n_terms:
        raise RuntimeError("could not place well-separated frequencies")
    G = simplex(degree, s)
    terms = []
    for omega in freqs:
        phases = rng.uniform(-np.pi, np.pi, len(G))
        coeff = Polynomial({a: np.exp(1j * ph) for a, ph in zip(G, phases)}, s)
        terms.append((omega, coeff))
    return ExponentialSumModel(s, terms)


def _freq_distance(a, b):
    d_re = np.abs(a.real - b.real)
    d_im = np.abs(np.angle(np.exp(1j * (a.imag - b.imag))))
    return float(np.max(np.maximum(d_re, d_im)))


def match_models(m1, m2):
    """Greedy nearest-frequency pairing of two models.

    Returns ``(pairs, freq_err, coeff_err)`` where ``pairs`` lists matched term
    indices, ``freq_err`` is the largest per-component frequency deviation
    and ``coeff_err`` the largest coefficient deviation over matched pairs.
    Unmatched terms make both errors infinite.
    """
    if m1.s != m2.s:
        raise DimensionMismatchError("models of different dimension")
    if len(m1) != len(m2):
        return [], float("inf"), float("inf")
    dist = [
        (_freq_distance(w1, w2), i, j)
        for i, (w1, _) in enumerate(m1.terms)
        for j, (w2, _) in enumerate(m2.terms)
    ]
    dist.sort()
    used1, used2, pairs = set(), set(), []
    freq_err = 0.0
    for d, i, j in dist:
        if i in used1 or j in used2:
            continue
        used1.add(i)
        used2.add(j)
        pairs.append((i, j))
        freq_err = max(freq_err, d)
    coeff_err = 0.0
    for i, j in pairs:
        p, q = m1.terms[i][1], m2.terms[j][1]
        keys = set(p.terms) | set(q.terms)
        coeff_err = max([coeff_err] + [abs(p.coeff(a) - q.coeff(a)) for a in keys])
    return pairs, freq_err, coeff_err


def models_match(m1, m2, freq_tol=1e-6, coeff_tol=1e-6):
    _, fe, ce = match_models(m1, m2)
    return fe <= freq_tol and ce <= coeff_tol
