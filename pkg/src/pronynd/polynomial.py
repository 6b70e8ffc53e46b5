"""
Sparse multivariate polynomials with complex coefficients.

The same class doubles as a finitely supported sequence on the lattice
(``g(beta)`` is the coefficient of ``z**beta``), which is how filters and
kernel vectors are passed to correlation and convolution.  Negative
exponents are accepted so reflected filters fit the same type; operations
that only make sense for ordinary polynomials (derivatives, shifts,
evaluation at points with zero components) check for this.
"""

from math import comb, factorial

import numpy as np

from .errors import DimensionMismatchError
from .indexsets import IndexSet, as_multiindex, grlex_key

__all__ = ["Polynomial", "ZERO_RTOL"]

#: coefficients below this fraction of the largest modulus are dropped
ZERO_RTOL = 1e-12


class Polynomial:
    """Polynomial ``sum_alpha c_alpha z**alpha`` in ``s`` variables.

    Parameters
    ----------
    terms : dict
        Map from multi-index to coefficient.
    s : int
        Number of variables.
    rtol : float
        Relative pruning threshold; ``0`` keeps every nonzero coefficient.
    """

    __slots__ = ("terms", "s")

    def __init__(self, terms=None, s=1, rtol=ZERO_RTOL):
        s = int(s)
        if s < 1:
            raise ValueError("a polynomial needs at least one variable")
        clean = {}
        for alpha, c in (terms or {}).items():
            alpha = as_multiindex(alpha)
            if len(alpha) != s:
                raise DimensionMismatchError(
                    f"exponent {alpha} does not have {s} entries"
                )
            c = complex(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
        if clean:
            cut = rtol * max(abs(c) for c in clean.values())
            clean = {a: c for a, c in clean.items() if abs(c) > cut}
        self.terms = dict(sorted(clean.items(), key=lambda t: grlex_key(t[0])))
        self.s = s

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, s):
        return cls({}, s)

    @classmethod
    def constant(cls, c, s):
        return cls({(0,) * s: c}, s)

    @classmethod
    def monomial(cls, alpha, coeff=1.0):
        alpha = as_multiindex(alpha)
        return cls({alpha: coeff}, len(alpha))

    @classmethod
    def from_vector(cls, A, v, rtol=ZERO_RTOL):
        """Read a coefficient vector indexed by the index set ``A``."""
        v = np.asarray(v).ravel()
        if len(v) != len(A):
            raise DimensionMismatchError("vector length differs from index set size")
        return cls({alpha: c for alpha, c in zip(A, v)}, A.s, rtol=rtol)

    @classmethod
    def variable(cls, j, s):
        return cls.monomial(tuple(1 if i == j else 0 for i in range(s)))

    # -- basic queries ------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def support(self):
        return IndexSet(self.terms.keys(), s=self.s)

    @property
    def degree(self):
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self.terms:
            return float("-inf")
        return max(sum(a) for a in self.terms)

    def is_laurent(self):
        return any(x < 0 for a in self.terms for x in a)

    def coeff(self, alpha):
        return self.terms.get(as_multiindex(alpha), 0j)

    def to_vector(self, A):
        """Coefficients on the index set ``A``; every term must lie in ``A``."""
        outside = [a for a in self.terms if a not in A]
        if outside:
            raise DimensionMismatchError(f"terms {outside} lie outside the index set")
        v = np.zeros(len(A), dtype=complex)
        for a, c in self.terms.items():
            v[A.index(a)] = c
        return v

    def max_abs_coeff(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.s != other.s:
            raise DimensionMismatchError(
                f"polynomials in {self.s} and {other.s} variables"
            )

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other, self.s)
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return Polynomial(out, self.s)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({a: -c for a, c in self.terms.items()}, self.s, rtol=0)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = complex(other)
            return Polynomial({a: c * v for a, v in self.terms.items()}, self.s)
        self._check(other)
        out = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + c * d
        return Polynomial(out, self.s)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / complex(c))

    def __pow__(self, n):
        out = Polynomial.constant(1.0, self.s)
        for _ in range(int(n)):
            out = out * self
        return out

    def times_monomial(self, alpha):
        """``z**alpha * p``, i.e. the sequence shifted by ``alpha``."""
        alpha = as_multiindex(alpha)
        return Polynomial(
            {tuple(x + y for x, y in zip(a, alpha)): c for a, c in self.terms.items()},
            self.s,
            rtol=0,
        )

    def reflect(self):
        """``p(z**-1)``: exponents negated."""
        return Polynomial(
            {tuple(-x for x in a): c for a, c in self.terms.items()}, self.s, rtol=0
        )

    # -- analysis -----------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=complex).ravel()
        if len(x) != self.s:
            raise DimensionMismatchError(f"point of length {len(x)} for s={self.s}")
        total = 0j
        for a, c in self.terms.items():
            term = c
            for xj, aj in zip(x, a):
                if aj:
                    term *= xj ** aj
            total += term
        return complex(total)

    def _require_polynomial(self, what):
        if self.is_laurent():
            raise ValueError(f"{what} needs nonnegative exponents")

    def diff(self, j, order=1):
        """Partial derivative ``d^order / dz_j^order``."""
        self._require_polynomial("differentiation")
        out = {}
        for a, c in self.terms.items():
            if a[j] >= order:
                b = list(a)
                b[j] -= order
                out[tuple(b)] = c * (factorial(a[j]) // factorial(a[j] - order))
        return Polynomial(out, self.s, rtol=0)

    def apply_operator(self, q):
        """``q(D) p``: the differential operator induced by ``q`` applied to ``self``."""
        self._check(q)
        self._require_polynomial("q(D)")
        q._require_polynomial("q(D)")
        out = {}
        for b, qb in q.terms.items():
            for a, c in self.terms.items():
                if all(x >= y for x, y in zip(a, b)):
                    w = 1
                    for x, y in zip(a, b):
                        w *= factorial(x) // factorial(x - y)
                    key = tuple(x - y for x, y in zip(a, b))
                    out[key] = out.get(key, 0) + qb * c * w
        return Polynomial(out, self.s)

    def translate(self, t):
        """``p(z + t)`` for a shift vector ``t``; exact binomial expansion."""
        self._require_polynomial("translation")
        t = np.asarray(t, dtype=complex).ravel()
        if len(t) != self.s:
            raise DimensionMismatchError("shift vector has the wrong length")
        out = {}
        for a, c in self.terms.items():
            # per-coordinate expansions of (z_j + t_j)**a_j
            factors = [
                [(i, comb(aj, i) * tj ** (aj - i)) for i in range(aj + 1)]
                for aj, tj in zip(a, t)
            ]
            parts = [((), c)]
            for fac in factors:
                parts = [(e + (i,), w * v) for e, w in parts for i, v in fac if v != 0]
            for e, w in parts:
                out[e] = out.get(e, 0) + w
        return Polynomial(out, self.s)

    def shift(self, j):
        """Forward shift ``p(. + e_j)``."""
        t = np.zeros(self.s)
        t[j] = 1.0
        return self.translate(t)

    def dilate(self, theta):
        """``p(theta_1 z_1, ..., theta_s z_s)``."""
        theta = np.asarray(theta, dtype=complex).ravel()
        if len(theta) != self.s:
            raise DimensionMismatchError("dilation vector has the wrong length")
        out = {}
        for a, c in self.terms.items():
            w = c
            for tj, aj in zip(theta, a):
                w *= tj ** aj
            out[a] = w
        return Polynomial(out, self.s, rtol=0)

    # -- comparison / IO ----------------------------------------------------

    def allclose(self, other, atol=1e-12):
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.coeff(a) - other.coeff(a)) <= atol for a in keys)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.s == other.s and self.terms == other.terms

    def __hash__(self):
        return hash((self.s, tuple(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"Polynomial(0, s={self.s})"
        parts = []
        for a, c in self.terms.items():
            mono = "*".join(
                f"z{j + 1}" + (f"^{e}" if e != 1 else "")
                for j, e in enumerate(a)
                if e
            )
            cs = f"{c.real:g}" if c.imag == 0 else f"({c:g})"
            parts.append(cs if not mono else f"{cs}*{mono}")
        return f"Polynomial({' + '.join(parts)}, s={self.s})"

    def to_json(self):
        return [
            {"alpha": list(a), "re": float(c.real), "im": float(c.imag)}
            for a, c in self.terms.items()
        ]

    @classmethod
    def from_json(cls, data, s=None):
        if isinstance(data, dict):
            s = data.get("s", s)
            data = data["terms"] if "terms" in data else data["coeff"]
        if s is None:
            if not data:
                raise ValueError("cannot infer the dimension of an empty polynomial")
            s = len(data[0]["alpha"])
        return cls(
            {tuple(t["alpha"]): complex(t.get("re", 0.0), t.get("im", 0.0)) for t in data},
            s,
            rtol=0,
        )
