"""File housing exact scalars of a quadratic field Q(sqrt D)
"""
# ======== standard imports ========
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
import math
# ==================================

# ======= third party imports ======
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
# ==================================


@lru_cache(maxsize=None)
def is_squarefree(d: int) -> bool:
    if d < 2:
        return d == 0
    i = 2
    while i * i <= d:
        if d % (i * i) == 0:
            return False
        i += 1
    return True


def rational_sqrt(r: Fraction) -> Fraction | None:
    ''' Exact square root of a non-negative rational, or None when irrational '''
    if r < 0:
        return None
    num, den = r.numerator, r.denominator
    sn, sd = math.isqrt(num), math.isqrt(den)
    if sn * sn == num and sd * sd == den:
        return Fraction(sn, sd)
    return None


class Scalar:
    ''' An exact element a + b*sqrt(D) of Q(sqrt D), D square-free.

        D = 0 is the field of rationals and then b is always 0.
        Values are immutable; every operation returns a new Scalar.
    '''
    __slots__ = ('_a', '_b', '_d')

    class FieldError(StrataObject.StrataUserInputException):
        def __init__(self, d, message=''):
            super().__init__('field_D', f'{d!r} does not define a quadratic field. {message}')

    class MixedField(StrataObject.StrataException):
        def __init__(self, d1: int, d2: int):
            super().__init__(f'Cannot combine scalars of Q(sqrt {d1}) and Q(sqrt {d2}).')

    class DivisionByZero(StrataObject.StrataException, ZeroDivisionError):
        def __init__(self):
            super().__init__('Division by the zero scalar.')

    def __init__(self, a: int | Fraction | str = 0, b: int | Fraction | str = 0, d: int = 0) -> None:
        if not isinstance(d, int) or isinstance(d, bool) or not is_squarefree(d):
            raise self.FieldError(d, 'D must be 0 or a square-free integer greater than 1.')
        a = Fraction(a)
        b = Fraction(b)
        if d == 0 and b != 0:
            raise self.FieldError(d, 'A rational field cannot hold an irrational part.')
        self._a = a
        self._b = b
        self._d = d

    @classmethod
    def _new(cls, a: Fraction, b: Fraction, d: int) -> Scalar:
        obj = object.__new__(cls)
        obj._a = a
        obj._b = b
        obj._d = d
        return obj

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def d(self) -> int:
        return self._d

    @classmethod
    def coerce(cls, value: int | Fraction | Scalar, d: int) -> Scalar:
        if isinstance(value, Scalar):
            if value.d != d:
                raise cls.MixedField(value.d, d)
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return cls(value, 0, d)
        raise TypeError(f'Cannot interpret {value!r} as a scalar.')

    @classmethod
    def zero(cls, d: int) -> Scalar:
        return cls(0, 0, d)

    @classmethod
    def one(cls, d: int) -> Scalar:
        return cls(1, 0, d)

    @classmethod
    def root(cls, d: int) -> Scalar:
        ''' The generator sqrt(D) itself '''
        if d == 0:
            raise cls.FieldError(d, 'The rationals have no root token.')
        return cls(0, 1, d)

    def _other(self, other) -> Scalar | None:
        if isinstance(other, Scalar):
            if other._d != self._d:
                raise self.MixedField(self._d, other._d)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Scalar(other, 0, self._d)
        return None

    # ----- predicates -----
    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_rational(self) -> bool:
        return self._b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # ----- arithmetic -----
    def __add__(self, other) -> Scalar:
        other = self._other(other)
        if other is None:
            return NotImplemented
        return Scalar._new(self._a + other._a, self._b + other._b, self._d)

    def __radd__(self, other) -> Scalar:
        return self + other

    def __neg__(self) -> Scalar:
        return Scalar._new(-self._a, -self._b, self._d)

    def __sub__(self, other) -> Scalar:
        other = self._other(other)
        if other is None:
            return NotImplemented
        return Scalar._new(self._a - other._a, self._b - other._b, self._d)

    def __rsub__(self, other) -> Scalar:
        return (-self) + other

    def __mul__(self, other) -> Scalar:
        other = self._other(other)
        if other is None:
            return NotImplemented
        if self._b == 0 and other._b == 0:
            return Scalar._new(self._a * other._a, self._b, self._d)
        new_a = self._a * other._a + self._d * self._b * other._b
        new_b = self._a * other._b + self._b * other._a
        return Scalar._new(new_a, new_b, self._d)

    def __rmul__(self, other) -> Scalar:
        return self * other

    def conjugate(self) -> Scalar:
        return Scalar._new(self._a, -self._b, self._d)

    @property
    def norm(self) -> Fraction:
        ''' Field norm a^2 - D b^2 '''
        return self._a * self._a - self._d * self._b * self._b

    def inverse(self) -> Scalar:
        if self.is_zero():
            raise self.DivisionByZero()
        if self._b == 0:
            return Scalar._new(1 / self._a, self._b, self._d)
        n = self.norm
        return Scalar._new(self._a / n, -self._b / n, self._d)

    def __truediv__(self, other) -> Scalar:
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> Scalar:
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> Scalar:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Scalar.one(self._d)
        base = self
        while exponent > 0:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # ----- comparison -----
    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self._d == other._d and self._a == other._a and self._b == other._b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._b == 0 and self._a == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b, self._d))

    def sort_key(self) -> tuple[Fraction, Fraction]:
        ''' Deterministic total order on field elements (not the real order) '''
        return (self._a, self._b)

    def sign(self) -> int:
        ''' Exact sign of the real number a + b*sqrt(D) '''
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa if self._a * self._a > self._d * self._b * self._b else sb

    def sqrt(self) -> Scalar | None:
        ''' Exact non-negative square root inside Q(sqrt D), or None '''
        s = self.sign()
        if s < 0:
            return None
        if s == 0:
            return self
        d = self._d
        if self._b == 0:
            r = rational_sqrt(self._a)
            if r is not None:
                return Scalar(r, 0, d)
            if d:
                t = rational_sqrt(self._a / d)
                if t is not None:
                    return Scalar(0, t, d)
            return None
        # (x + y sqrt D)^2 = x^2 + D y^2 + 2 x y sqrt D
        n = rational_sqrt(self.norm)
        if n is None:
            return None
        for x_sq in ((self._a + n) / 2, (self._a - n) / 2):
            x = rational_sqrt(x_sq)
            if not x:
                continue
            candidate = Scalar(x, self._b / (2 * x), d)
            if candidate.sign() < 0:
                candidate = -candidate
            if candidate * candidate == self:
                return candidate
        return None

    # ----- conversion -----
    def __float__(self) -> float:
        if self._b == 0:
            return float(self._a)
        return float(self._a) + float(self._b) * math.sqrt(self._d)

    def to_payload(self) -> list[str]:
        return [str(self._a), str(self._b)]

    def __repr__(self) -> str:
        return f"Scalar({str(self._a)!r}, {str(self._b)!r}, d={self._d})"

    def __str__(self) -> str:
        ''' Same notation as problem files, rt standing for sqrt(D) '''
        if self._b == 0:
            return str(self._a)
        root = 'rt' if abs(self._b) == 1 else f'{abs(self._b)}*rt'
        if self._a == 0:
            return root if self._b > 0 else f'-{root}'
        return f"{self._a} {'+' if self._b > 0 else '-'} {root}"
