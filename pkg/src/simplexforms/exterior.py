"""Constant (algebraic) k-forms on R^n with exact coefficients.

Forms are stored as coefficient dicts over the coordinate k-forms, keyed by
strictly increasing index tuples from [1..n].  The Hodge star uses the
combinatorial sign rule; its defining relation against the wedge product is
exercised as an oracle in the tests rather than trusted here.
"""

from __future__ import annotations

import itertools

from .combinatorics import IncreasingMap, perm_sign, sign
from .linalg import Matrix
from .scalars import ONE, ZERO, scalar_is_zero


def _normalize_key(indices):
    """Sort a tuple of indices, returning (sign, key); duplicates kill the term."""
    if len(set(indices)) < len(indices):
        return 0, ()
    s = perm_sign(indices)
    return s, tuple(sorted(indices))


class AltForm:
    """Alternating k-linear form on R^n in the coordinate-form basis."""

    __slots__ = ("n", "k", "coeffs")

    def __init__(self, n: int, k: int, coeffs=None):
        self.n = n
        self.k = k
        self.coeffs = {}
        if coeffs:
            for key, val in coeffs.items():
                self._accumulate(key, val)

    def _accumulate(self, key, val):
        if scalar_is_zero(val):
            return
        s, norm = _normalize_key(tuple(key))
        if s == 0:
            return
        if any(not 1 <= i <= self.n for i in norm) or len(norm) != self.k:
            raise ValueError(f"bad index tuple {key} for a {self.k}-form on R^{self.n}")
        cur = self.coeffs.get(norm, ZERO) + (val if s > 0 else -val)
        if scalar_is_zero(cur):
            self.coeffs.pop(norm, None)
        else:
            self.coeffs[norm] = cur

    @classmethod
    def zero(cls, n: int, k: int) -> "AltForm":
        return cls(n, k)

    @classmethod
    def unit(cls, n: int, indices) -> "AltForm":
        """The coordinate form dx_{i1} ^ ... ^ dx_{ik}."""
        indices = tuple(indices)
        return cls(n, len(indices), {indices: ONE})

    @classmethod
    def volume(cls, n: int) -> "AltForm":
        return cls.unit(n, tuple(range(1, n + 1)))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, AltForm):
            return NotImplemented
        return self.n == other.n and (self.coeffs == other.coeffs
                                      if self.k == other.k else self.is_zero() and other.is_zero())

    def __hash__(self):
        return hash((self.n, self.k, frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return f"AltForm<{self.k} on R^{self.n}>(0)"
        parts = " + ".join(f"({v})*dx{list(k)}" for k, v in sorted(self.coeffs.items()))
        return f"AltForm<{self.k} on R^{self.n}>({parts})"

    def __add__(self, other):
        self._check_compatible(other)
        out = AltForm(self.n, self.k, dict(self.coeffs))
        for key, val in other.coeffs.items():
            out._accumulate(key, val)
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return AltForm(self.n, self.k, {k: -v for k, v in self.coeffs.items()})

    def scale(self, factor) -> "AltForm":
        return AltForm(self.n, self.k, {k: factor * v for k, v in self.coeffs.items()})

    def _check_compatible(self, other):
        if not isinstance(other, AltForm) or other.n != self.n or other.k != self.k:
            raise ValueError("incompatible forms")

    def wedge(self, other: "AltForm") -> "AltForm":
        if other.n != self.n:
            raise ValueError("different ambient dimensions")
        out = AltForm(self.n, self.k + other.k)
        if self.k + other.k > self.n:
            return out
        for ka, va in self.coeffs.items():
            for kb, vb in other.coeffs.items():
                out._accumulate(ka + kb, va * vb)
        return out

    def interior(self, vector) -> "AltForm":
        """Contraction with a vector in the first slot."""
        if self.k == 0:
            raise ValueError("cannot contract a 0-form")
        vector = tuple(vector)
        out = AltForm(self.n, self.k - 1)
        for key, val in self.coeffs.items():
            for pos, idx in enumerate(key):
                comp = vector[idx - 1]
                if scalar_is_zero(comp):
                    continue
                factor = val * comp if pos % 2 == 0 else -(val * comp)
                out._accumulate(key[:pos] + key[pos + 1:], factor)
        return out

    def apply(self, vectors) -> "object":
        """Evaluate on k vectors (each a length-n coordinate tuple)."""
        vectors = [tuple(v) for v in vectors]
        if len(vectors) != self.k:
            raise ValueError("wrong number of arguments")
        total = ZERO
        for key, val in self.coeffs.items():
            minor = Matrix([[vec[i - 1] for vec in vectors] for i in key])
            total = total + val * minor.det()
        return total

    def inner(self, other: "AltForm"):
        self._check_compatible(other)
        total = ZERO
        for key, val in self.coeffs.items():
            ov = other.coeffs.get(key)
            if ov is not None:
                total = total + val * ov
        return total

    def hodge(self) -> "AltForm":
        """Hodge star via the sign rule star(dx_rho) = sign(rho) dx_rho*."""
        out = AltForm(self.n, self.n - self.k)
        full = range(1, self.n + 1)
        for key, val in self.coeffs.items():
            rho = IncreasingMap(1, key)
            comp = tuple(i for i in full if i not in key)
            s = sign(rho, full)
            out._accumulate(comp, val if s > 0 else -val)
        return out

    def pullback(self, jac: Matrix) -> "AltForm":
        """Pullback along the linear map with matrix jac (rows map V into R^n).

        The result lives on the domain of the map: coefficients are the
        k-minors of the Jacobian against this form's coefficients.
        """
        if jac.rows != self.n:
            raise ValueError("Jacobian rows must match the form's ambient dimension")
        nv = jac.cols
        out = AltForm(nv, self.k)
        if self.k > nv:
            return out
        cols = list(itertools.combinations(range(1, nv + 1), self.k))
        for mu in cols:
            total = ZERO
            for key, val in self.coeffs.items():
                minor = Matrix([[jac.entries[r - 1][c - 1] for c in mu] for r in key])
                total = total + val * minor.det()
            if not scalar_is_zero(total):
                out._accumulate(mu, total)
        return out


def wedge(*forms: AltForm) -> AltForm:
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out
