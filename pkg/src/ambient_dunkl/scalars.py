"""Scalar modes: exact (rationals, optionally adjoined sqrt(2)) and float.

Exact computations run over ``Fraction``.  A handful of embedded root systems
(B_{n+1} for odd n) need sqrt(2) to live in the Euclidean subspace of
R^{n+1,1}, so :class:`QSqrt2` provides exact arithmetic in Q(sqrt 2).
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union


class ScalarModeError(TypeError):
    """Raised when exact and floating scalars are mixed in one computation."""


class QSqrt2:
    """An element ``a + b*sqrt(2)`` of Q(sqrt 2) with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        if isinstance(a, QSqrt2):
            a, b = a.a, a.b + Fraction(b)
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def sqrt2(cls) -> "QSqrt2":
        return cls(0, 1)

    @staticmethod
    def _coerce(other):
        if isinstance(other, QSqrt2):
            return other
        if isinstance(other, (int, Fraction)):
            return QSqrt2(other)
        return None

    def simplify(self):
        """Return a plain ``Fraction`` when the irrational part vanishes."""
        return self.a if self.b == 0 else self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> "QSqrt2":
        return QSqrt2(self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm a^2 - 2 b^2 (zero only for zero)."""
        return self.a * self.a - 2 * self.b * self.b

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        num = self * o.conjugate()
        return QSqrt2(num.a / nrm, num.b / nrm)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QSqrt2(1) / (self ** (-k))
        out, base = QSqrt2(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 2 b^2
        d = a * a - 2 * b * b
        return sa if d > 0 else sb

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) == other
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __repr__(self):
        return f"QSqrt2({self.a}, {self.b})"

    def __str__(self):
        return format_scalar(self)


_SQRT2_RE = re.compile(r"(?P<a>[-+]?[0-9./]+(?=[-+]))?(?P<b>[-+]?[0-9./]*)\*?sqrt2")


Scalar = Union[int, Fraction, QSqrt2, float]


def is_exact(x) -> bool:
    return isinstance(x, (Rational, QSqrt2))


def check_mode(values: Iterable) -> bool:
    """Return True for an all-exact collection, False for all-float.

    Python ints are neutral and fit either mode.
    """
    exact = floating = False
    for v in values:
        if isinstance(v, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(v, int):
            continue
        if is_exact(v):
            exact = True
        elif isinstance(v, float):
            floating = True
        else:
            raise TypeError(f"unsupported scalar {v!r}")
    if exact and floating:
        raise ScalarModeError("exact and floating scalars mixed in one computation")
    return not floating


def to_exact(x) -> Fraction | QSqrt2:
    if isinstance(x, QSqrt2):
        return x.simplify()
    if isinstance(x, float):
        raise ScalarModeError("float given where an exact scalar is required")
    return Fraction(x)


def parse_scalar(text: str) -> Fraction | QSqrt2:
    """Parse ``3``, ``-1/2``, ``0.25`` (as exact decimal), ``sqrt2``, ``1/2*sqrt2``."""
    s = text.strip().replace(" ", "").replace("sqrt(2)", "sqrt2")
    if s.endswith("sqrt2"):
        m = _SQRT2_RE.fullmatch(s)
        if m is None:
            raise ValueError(f"cannot parse scalar {text!r}")
        a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
        b = m.group("b")
        b = Fraction(1) if b in ("", "+") else Fraction(-1) if b == "-" else Fraction(b)
        return QSqrt2(a, b).simplify()
    return Fraction(s)


def format_scalar(x) -> str:
    """Rationals as ``p/q``, Q(sqrt 2) as ``a+b*sqrt2``, floats with 17 digits."""
    if isinstance(x, QSqrt2):
        if x.b == 0:
            return format_scalar(x.a)
        rational = "" if x.a == 0 else format_scalar(x.a)
        irr = f"{format_scalar(x.b)}*sqrt2"
        if not rational:
            return irr
        return f"{rational}{'' if x.b < 0 else '+'}{irr}"
    if isinstance(x, float):
        return format(x, ".17g")
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
