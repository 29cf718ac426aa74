"""Exact rational arithmetic for terminating hypergeometric sums.

Every binary64 number is a dyadic rational, so a terminating sum whose
parameters are floats can be evaluated without any rounding and rounded
once at the end.  Complex parameters are carried as Gaussian rationals
``(re, im) / den`` with integer ``re``, ``im`` and a positive integer
denominator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

__all__ = [
    "gaussian",
    "terminating_sum",
    "to_complex",
]

# A Gaussian rational is (re, im, den) with integer entries and den > 0.


def gaussian(z) -> tuple[int, int, int]:
    """Exact Gaussian-rational representation of a float or complex."""
    z = complex(z)
    fr = Fraction(z.real)
    fi = Fraction(z.imag)
    den = fr.denominator * fi.denominator // _gcd(fr.denominator, fi.denominator)
    return (fr.numerator * (den // fr.denominator),
            fi.numerator * (den // fi.denominator), den)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def to_complex(num: tuple[int, int], den: tuple[int, int]) -> complex:
    """Correctly rounded value of the Gaussian quotient ``num / den``."""
    # multiply through by conj(den) so the denominator is a positive integer
    d2 = den[0] * den[0] + den[1] * den[1]
    if d2 == 0:
        raise ZeroDivisionError("zero denominator in exact quotient")
    re = num[0] * den[0] + num[1] * den[1]
    im = num[1] * den[0] - num[0] * den[1]
    return complex(re / d2, im / d2)


def terminating_sum(upper: Sequence[complex], lower: Sequence[complex],
                    z: complex, n: int) -> complex:
    """Exact value of sum_{j=0}^{n} prod (a)_j / prod (b)_j z^j / j!.

    Evaluated by nested Horner form ``S_l = 1 + r_l S_{l+1}`` from the
    innermost term outward, with numerator and denominator kept as
    Gaussian integers.  The only rounding is the final division.
    """
    ups = [gaussian(a) for a in upper]
    lows = [gaussian(b) for b in lower]
    zr, zi, zd = gaussian(z)
    da = 1
    for a in ups:
        da *= a[2]
    db = 1
    for b in lows:
        db *= b[2]
    num_s = (1, 0)
    den_s = (1, 0)
    for l in range(n - 1, -1, -1):
        rn = (zr * db, zi * db)
        for ar, ai, ad in ups:
            rn = _gmul(rn, (ar + l * ad, ai))
        rd = (zd * da * (l + 1), 0)
        for br, bi, bd in lows:
            rd = _gmul(rd, (br + l * bd, bi))
        if rd == (0, 0):
            raise ZeroDivisionError("lower parameter pole inside the sum")
        # S <- 1 + (rn/rd) * (num_s/den_s)
        t_den = _gmul(rd, den_s)
        t_num = _gmul(rn, num_s)
        num_s = (t_den[0] + t_num[0], t_den[1] + t_num[1])
        den_s = t_den
    return to_complex(num_s, den_s)
