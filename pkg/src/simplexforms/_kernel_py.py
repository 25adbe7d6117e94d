"""Pure-Python rational kernel: the stdlib fractions.Fraction.

Always importable; the fallback when gmpy2 is unavailable or when
SIMPLEXFORMS_BACKEND=python is set.
"""

from fractions import Fraction

NAME = "python"
RationalType = Fraction


def rational(num=0, den=1):
    return Fraction(num, den)
