"""Exact scalars: arbitrary-precision rationals and one quadratic extension.

The rational kernel is chosen once, at import time.  SIMPLEXFORMS_BACKEND
selects it explicitly ("gmp" or "python"); the default "auto" prefers the
compiled gmpy2 kernel and falls back to fractions.Fraction.  Both kernels
expose the same duck interface (arithmetic operators, comparisons,
``.numerator``/``.denominator``), so code above this module never branches
on the backend.

QuadExt models a + b*sqrt(m) with rational a, b and a fixed non-square
radicand m.  Perfect-square radicands collapse to plain rationals in the
factory, so a context that formally needs sqrt(4) degrades gracefully to
rational arithmetic.  All operations are exact; equality is structural.
"""

from __future__ import annotations

import math
import os

_requested = os.environ.get("SIMPLEXFORMS_BACKEND", "auto").lower()
if _requested in ("gmp", "gmpy2"):
    from . import _kernel_gmp as _kernel
elif _requested in ("python", "pure", "fraction"):
    from . import _kernel_py as _kernel
elif _requested == "auto":
    try:
        from . import _kernel_gmp as _kernel
    except ImportError:
        from . import _kernel_py as _kernel
else:
    raise RuntimeError(f"unknown SIMPLEXFORMS_BACKEND {_requested!r}")

BACKEND = _kernel.NAME
Rational = _kernel.RationalType
_rational = _kernel.rational

ZERO = _rational(0)
ONE = _rational(1)


def Q(num=0, den=None):
    """Build a rational in the active kernel from ints, strings or rationals."""
    if den is not None:
        return _rational(num, den)
    if type(num) is Rational:
        return num
    if isinstance(num, QuadExt):
        raise TypeError("quadratic extension element is not rational")
    return _rational(num)


def is_rational(x) -> bool:
    return not isinstance(x, QuadExt)


class QuadExt:
    """Element a + b*sqrt(m) of the quadratic field Q(sqrt(m)), m non-square."""

    __slots__ = ("a", "b", "m")

    def __init__(self, a, b, m: int):
        # Invariant: b != 0 and m is not a perfect square; use quad() to build.
        self.a = a
        self.b = b
        self.m = m

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.m != self.m:
                raise ValueError(f"radicand mismatch: sqrt({self.m}) vs sqrt({other.m})")
            return other.a, other.b
        return Q(other), ZERO

    def __add__(self, other):
        oa, ob = self._coerce(other)
        return quad(self.a + oa, self.b + ob, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        oa, ob = self._coerce(other)
        return quad(self.a - oa, self.b - ob, self.m)

    def __rsub__(self, other):
        oa, ob = self._coerce(other)
        return quad(oa - self.a, ob - self.b, self.m)

    def __mul__(self, other):
        oa, ob = self._coerce(other)
        return quad(self.a * oa + self.b * ob * self.m, self.a * ob + self.b * oa, self.m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        oa, ob = self._coerce(other)
        nrm = oa * oa - ob * ob * self.m
        if nrm == 0:
            raise ZeroDivisionError("division by zero in quadratic extension")
        return self * quad(oa / nrm, -ob / nrm, self.m)

    def __rtruediv__(self, other):
        oa, ob = self._coerce(other)
        return quad(oa, ob, self.m) * _quad_inverse(self)

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.m)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return _quad_inverse(self) ** (-exponent)
        out = ONE
        base = self
        e = exponent
        while e:
            if e & 1:
                out = base * out
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self.m == other.m and self.a == other.a and self.b == other.b
        # b != 0 by invariant, so never equal to a rational
        return False

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.a, self.b, self.m))

    def __bool__(self):
        return True

    def __repr__(self):
        return f"({self.a}+{self.b}*rt{self.m})"

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.m)


def _quad_inverse(x: QuadExt):
    nrm = x.a * x.a - x.b * x.b * x.m
    return quad(x.a / nrm, -x.b / nrm, x.m)


def quad(a, b, m: int):
    """a + b*sqrt(m), folded into a plain rational whenever possible."""
    a = Q(a) if not isinstance(a, QuadExt) else a
    b = Q(b) if not isinstance(b, QuadExt) else b
    if isinstance(a, QuadExt) or isinstance(b, QuadExt):
        raise TypeError("nested quadratic extensions are not supported")
    if b == 0:
        return a
    if m < 0:
        raise ValueError("radicand must be nonnegative")
    root = math.isqrt(m)
    if root * root == m:
        return a + b * root
    return QuadExt(a, b, m)


def sqrt_scalar(m: int):
    """sqrt(m) as an exact scalar (rational when m is a perfect square)."""
    return quad(ZERO, ONE, m)


def scalar_is_zero(x) -> bool:
    if isinstance(x, QuadExt):
        return False
    return x == 0


def scalar_sign(x) -> int:
    """Sign of a real scalar: -1, 0 or +1, exact for quadratic elements."""
    if not isinstance(x, QuadExt):
        return -1 if x < 0 else (1 if x > 0 else 0)
    sa = scalar_sign(x.a)
    sb = scalar_sign(x.b)
    if sa == 0:
        return sb
    if sa == sb:
        return sa
    # a and b have opposite signs: compare a^2 against b^2 m
    diff = x.a * x.a - x.b * x.b * x.m
    return sa * scalar_sign(diff)


def rational_str(x) -> str:
    """Canonical "p/q" serialization (denominator always present)."""
    if isinstance(x, QuadExt):
        raise TypeError("not a rational")
    return f"{int(x.numerator)}/{int(x.denominator)}"


def scalar_str(x) -> str:
    if isinstance(x, QuadExt):
        return f"{rational_str(x.a)}+{rational_str(x.b)}*rt{x.m}"
    return rational_str(x)


def parse_rational(text: str):
    return _rational(text.strip())
