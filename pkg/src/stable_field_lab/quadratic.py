"""Exact arithmetic in a real quadratic field Q(sqrt(D))."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Union[int, Fraction]


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def parse_rational(value) -> Fraction:
    """Parse an int, a Fraction or a string like ``"-3/4"``.

    Floats are refused: action parameters must be exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(value).__name__} {value!r}")


@total_ordering
class QuadraticNumber:
    """An element a + b*sqrt(D) with rational a, b and squarefree D >= 1.

    D = 1 stands for plain rationals and forces b = 0.
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a: Rational = 0, b: Rational = 0, D: int = 1) -> None:
        if not is_squarefree(D):
            raise ValueError(f"D must be a squarefree positive integer, got {D}")
        a, b = Fraction(a), Fraction(b)
        if D == 1:
            a, b = a + b, Fraction(0)
        self.a = a
        self.b = b
        self.D = D

    @classmethod
    def from_json(cls, value, D: int) -> QuadraticNumber:
        if isinstance(value, dict):
            extra = set(value) - {"a", "b"}
            if extra:
                raise ValueError(f"unexpected keys {sorted(extra)} in quadratic number")
            a = parse_rational(value.get("a", 0))
            b = parse_rational(value.get("b", 0))
            if D == 1 and b != 0:
                raise ValueError("surd part given but D = 1")
            return cls(a, b, D)
        return cls(parse_rational(value), 0, D)

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b)}

    def _coerce(self, other) -> QuadraticNumber:
        if isinstance(other, QuadraticNumber):
            if other.D != self.D and other.b != 0 and self.b != 0:
                raise ValueError(f"mixing Q(sqrt({self.D})) and Q(sqrt({other.D}))")
            if other.D != self.D:
                # one side is rational; adopt the irrational field
                D = self.D if other.b == 0 else other.D
                return QuadraticNumber(other.a, other.b, D)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadraticNumber(other, 0, self.D)
        return NotImplemented

    def _field(self, other: QuadraticNumber) -> int:
        return other.D if self.b == 0 else self.D

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D = self._field(o)
        return QuadraticNumber(
            self.a * o.a + D * self.b * o.b, self.a * o.b + self.b * o.a, D
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.D * self.b * self.b

    def conjugate(self) -> QuadraticNumber:
        return QuadraticNumber(self.a, -self.b, self.D)

    def inverse(self) -> QuadraticNumber:
        n = self.norm()
        if n == 0:
            # norm vanishes only at zero because D is squarefree
            raise ZeroDivisionError("inverse of zero")
        return QuadraticNumber(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: whichever of a^2 and D b^2 is larger wins
        if a * a > self.D * b * b:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __repr__(self) -> str:
        return f"QuadraticNumber({self.a}, {self.b}, D={self.D})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        surd = f"sqrt({self.D})"
        b = "" if self.b == 1 else ("-" if self.b == -1 else f"{self.b}*")
        if self.a == 0:
            return f"{b}{surd}"
        sign = "+" if self.b > 0 else "-"
        mag = abs(self.b)
        return f"{self.a}{sign}{'' if mag == 1 else f'{mag}*'}{surd}"
