"""Exact scalars for structure-constant arithmetic.

All structure constants live in the real quadratic field Q(sqrt(2)); only the
C family ever produces a nonzero sqrt(2) part.  Complexified coefficients are
pairs of such values.  Keeping these exact lets set-valued logic and Jacobi
checks run with zero residual.  Plain __slots__ classes rather than
dataclasses: these sit in the innermost loops of the exhaustive checks.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

_SQRT2 = math.sqrt(2.0)
_F0 = Fraction(0)
_F1 = Fraction(1)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class Sqrt2:
    """Element a + b*sqrt(2) with exact rational components."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=_F0):
        self.a = _frac(a)
        self.b = _frac(b)

    @staticmethod
    def of(x) -> "Sqrt2":
        if isinstance(x, Sqrt2):
            return x
        return Sqrt2(_frac(x))

    @staticmethod
    def sqrt_of_rational(q) -> "Sqrt2":
        """Exact square root of a rational of the form r^2 or 2*r^2."""
        q = _frac(q)
        if q <= 0:
            raise ValueError(f"square root of non-positive rational: {q}")
        num, den = q.numerator, q.denominator
        root = Fraction(math.isqrt(num), math.isqrt(den))
        if root * root == q:
            return Sqrt2(root)
        half = q / 2
        num, den = half.numerator, half.denominator
        root = Fraction(math.isqrt(num), math.isqrt(den))
        if root * root == half:
            return Sqrt2(_F0, root)
        raise ValueError(f"{q} is not of the form r^2 or 2 r^2")

    def __add__(self, other):
        if not isinstance(other, Sqrt2):
            other = Sqrt2.of(other)
        return Sqrt2(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Sqrt2(-self.a, -self.b)

    def __sub__(self, other):
        if not isinstance(other, Sqrt2):
            other = Sqrt2.of(other)
        return Sqrt2(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return Sqrt2.of(other) - self

    def __mul__(self, other):
        if not isinstance(other, Sqrt2):
            other = Sqrt2.of(other)
        if not self.b and not other.b:
            return Sqrt2(self.a * other.a)
        return Sqrt2(self.a * other.a + 2 * self.b * other.b,
                     self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Sqrt2.of(other)
        norm = other.a * other.a - 2 * other.b * other.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        num = self * Sqrt2(other.a, -other.b)
        return Sqrt2(num.a / norm, num.b / norm)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Sqrt2.of(other)
        if not isinstance(other, Sqrt2):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(2)."""
        if not self.a and not self.b:
            return 0
        if self.a >= 0 and self.b >= 0:
            return 1
        if self.a <= 0 and self.b <= 0:
            return -1
        lhs, rhs = self.a * self.a, 2 * self.b * self.b
        if lhs == rhs:
            return 0
        bigger_is_a = lhs > rhs
        return (1 if self.a > 0 else -1) if bigger_is_a else (1 if self.b > 0 else -1)

    def __abs__(self) -> "Sqrt2":
        return self if self.sign() >= 0 else -self

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * _SQRT2

    def __repr__(self) -> str:
        if not self.b:
            return f"{self.a}"
        if not self.a:
            return f"{self.b}*sqrt2"
        return f"{self.a}+{self.b}*sqrt2"


ZERO = Sqrt2(_F0)
ONE = Sqrt2(_F1)


class CSqrt2:
    """Complex number with real and imaginary parts in Q(sqrt(2))."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=ZERO):
        self.re = re if isinstance(re, Sqrt2) else Sqrt2.of(re)
        self.im = im if isinstance(im, Sqrt2) else Sqrt2.of(im)

    @staticmethod
    def of(x) -> "CSqrt2":
        if isinstance(x, CSqrt2):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex is not exact; build from rationals")
        return CSqrt2(Sqrt2.of(x))

    @staticmethod
    def make(re=0, im=0) -> "CSqrt2":
        return CSqrt2(Sqrt2.of(re), Sqrt2.of(im))

    def __add__(self, other):
        if not isinstance(other, CSqrt2):
            other = CSqrt2.of(other)
        return CSqrt2(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return CSqrt2(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, CSqrt2):
            other = CSqrt2.of(other)
        return CSqrt2(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return CSqrt2.of(other) - self

    def __mul__(self, other):
        if not isinstance(other, CSqrt2):
            other = CSqrt2.of(other)
        if self.im.is_zero() and other.im.is_zero():
            return CSqrt2(self.re * other.re, ZERO)
        return CSqrt2(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conj(self) -> "CSqrt2":
        return CSqrt2(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Sqrt2)):
            other = CSqrt2.of(other)
        if not isinstance(other, CSqrt2):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"({self.re})+({self.im})i"


CSqrt2.I = CSqrt2(ZERO, ONE)
C_ZERO = CSqrt2(ZERO, ZERO)
C_ONE = CSqrt2(ONE, ZERO)
