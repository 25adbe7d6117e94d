"""Compiled rational kernel: gmpy2's mpq (GMP bignum rationals).

Roughly an order of magnitude faster than fractions.Fraction on the
small-numerator workloads this package produces; selected by default
when importable.
"""

from gmpy2 import mpq

NAME = "gmp"
RationalType = mpq


def rational(num=0, den=1):
    return mpq(num, den)
