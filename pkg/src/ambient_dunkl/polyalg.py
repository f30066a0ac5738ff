"""Exact sparse multivariate polynomials over Q.

Internally a polynomial is an integer numerator polynomial over one positive
common denominator.  Exponent vectors are packed into a single int (8 bits per
variable) so that monomial multiplication is integer addition.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

BITS = 8
MASK = (1 << BITS) - 1
MAX_EXP = MASK


class NotDivisibleError(ArithmeticError):
    def __init__(self, remainder: "MultiPoly"):
        self.remainder = remainder
        super().__init__(f"polynomial not divisible by the linear form; remainder {remainder}")


def pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MAX_EXP:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (BITS * i)
    return key


def unpack(key: int, nvars: int) -> tuple:
    return tuple((key >> (BITS * i)) & MASK for i in range(nvars))


@lru_cache(maxsize=1 << 16)
def _deg(key: int) -> int:
    d = 0
    while key:
        d += key & MASK
        key >>= BITS
    return d


def _exp_of(key: int, i: int) -> int:
    return (key >> (BITS * i)) & MASK


def _as_fraction(c) -> Fraction:
    if isinstance(c, float):
        raise TypeError("MultiPoly coefficients are exact rationals, got a float")
    if not isinstance(c, (int, Fraction)):
        raise TypeError(f"MultiPoly coefficients must be rational, got {type(c).__name__}")
    return Fraction(c)


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def _mul_int(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


class _LinearMap:
    """Integer form of a rational matrix, M = rows / D, with cached row powers."""

    def __init__(self, M: tuple):
        self.N = len(M)
        if any(len(row) != self.N for row in M):
            raise ValueError("matrix has wrong shape")
        fr = [[_as_fraction(c) for c in row] for row in M]
        D = 1
        for row in fr:
            for c in row:
                D = _lcm(D, c.denominator)
        self.D = D
        self.rows = [{1 << (BITS * b): int(c * D) for b, c in enumerate(row) if c} for row in fr]
        self._powers: dict = {}
        self._images: dict = {}

    def monomial_image(self, key: int, nvars: int) -> dict:
        """Integer polynomial D^deg * (monomial o M)."""
        img = self._images.get(key)
        if img is None:
            img = {0: 1}
            for a in range(nvars):
                e = _exp_of(key, a)
                if e:
                    img = _mul_int(img, self.row_pow(a, e))
                    if not img:
                        break
            if len(self._images) < 200000:
                self._images[key] = img
        return img

    def row_pow(self, a: int, e: int) -> dict:
        key = (a, e)
        p = self._powers.get(key)
        if p is None:
            p = self.rows[a] if e == 1 else _mul_int(self.row_pow(a, e - 1), self.rows[a])
            self._powers[key] = p
        return p


@lru_cache(maxsize=256)
def _linear_map(M: tuple) -> _LinearMap:
    return _LinearMap(M)


class MultiPoly:
    __slots__ = ("nvars", "_num", "_den", "_hash")

    def __init__(self, nvars: int, terms: Mapping | None = None):
        """Build from a mapping exponent-tuple -> rational coefficient."""
        self.nvars = nvars
        num, den = {}, 1
        if terms:
            fr = {}
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ValueError(f"exponent {exps} has wrong length for {nvars} variables")
                c = _as_fraction(c)
                if c:
                    k = pack(exps)
                    fr[k] = fr.get(k, 0) + c
            for c in fr.values():
                den = _lcm(den, c.denominator)
            num = {k: int(c * den) for k, c in fr.items() if c}
        self._num, self._den = num, den
        self._normalize()

    @classmethod
    def _raw(cls, nvars: int, num: dict, den: int = 1) -> "MultiPoly":
        p = object.__new__(cls)
        p.nvars = nvars
        p._num = num
        p._den = den
        p._normalize()
        return p

    def _normalize(self):
        self._hash = None
        if self._den < 0:
            self._num = {k: -c for k, c in self._num.items()}
            self._den = -self._den
        if not self._num:
            self._den = 1
            return
        g = self._den
        for c in self._num.values():
            if g == 1:
                break
            g = math.gcd(g, c)
        if g > 1:
            self._num = {k: c // g for k, c in self._num.items()}
            self._den //= g

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "MultiPoly":
        N = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * N
            e[i] = 1
            terms[tuple(e)] = c
        return cls(N, terms)

    # -- inspection -------------------------------------------------------

    def terms(self) -> dict:
        d = self._den
        return {unpack(k, self.nvars): Fraction(c, d) for k, c in sorted(self._num.items())}

    def coeff(self, exps: Sequence[int]) -> Fraction:
        return Fraction(self._num.get(pack(exps), 0), self._den)

    def __len__(self):
        return len(self._num)

    def is_zero(self) -> bool:
        return not self._num

    def __bool__(self):
        return bool(self._num)

    @property
    def degree(self) -> int:
        return max((_deg(k) for k in self._num), default=-1)

    def is_homogeneous(self) -> bool:
        return len({_deg(k) for k in self._num}) <= 1

    def homogeneous_components(self) -> dict:
        parts: dict = {}
        for k, c in self._num.items():
            parts.setdefault(_deg(k), {})[k] = c
        return {d: MultiPoly._raw(self.nvars, num, self._den) for d, num in sorted(parts.items())}

    def __call__(self, point: Sequence):
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValueError("point has wrong dimension")
        total = 0
        for k, c in self._num.items():
            term = c
            for i in range(self.nvars):
                e = _exp_of(k, i)
                if e:
                    term = term * point[i] ** e
            total = total + term
        return total / Fraction(self._den)

    # -- ring operations --------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} != {other.nvars}")

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.nvars, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        L = _lcm(self._den, o._den)
        fa, fb = L // self._den, L // o._den
        num = {k: c * fa for k, c in self._num.items()}
        for k, c in o._num.items():
            v = num.get(k, 0) + c * fb
            if v:
                num[k] = v
            else:
                num.pop(k, None)
        return MultiPoly._raw(self.nvars, num, L)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {k: -c for k, c in self._num.items()}, self._den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "MultiPoly":
        c = _as_fraction(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(
            self.nvars, {k: v * c.numerator for k, v in self._num.items()}, self._den * c.denominator
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check(other)
        return MultiPoly._raw(self.nvars, _mul_int(self._num, other._num), self._den * other._den)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        out = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(self.nvars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._den == other._den and self._num == other._num

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self._den, frozenset(self._num.items())))
        return self._hash

    # -- calculus ---------------------------------------------------------

    def partial(self, i: int) -> "MultiPoly":
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        step = 1 << (BITS * i)
        num = {}
        for k, c in self._num.items():
            e = _exp_of(k, i)
            if e:
                num[k - step] = c * e
        return MultiPoly._raw(self.nvars, num, self._den)

    def directional(self, xi: Sequence) -> "MultiPoly":
        """sum_a xi[a] * d/dX^a."""
        if len(xi) != self.nvars:
            raise ValueError("direction has wrong dimension")
        out = MultiPoly.zero(self.nvars)
        for a, c in enumerate(xi):
            if c:
                out = out + self.partial(a).scale(c)
        return out

    def euler(self) -> "MultiPoly":
        """sum_a X^a d/dX^a: multiplies each degree-d part by d."""
        return MultiPoly._raw(self.nvars, {k: c * _deg(k) for k, c in self._num.items() if _deg(k)}, self._den)

    def compose_linear(self, M: Sequence[Sequence]) -> "MultiPoly":
        """Return X -> self(M X) for a rational N x N matrix M."""
        N = self.nvars
        lm = _linear_map(tuple(tuple(row) for row in M))
        if lm.N != N:
            raise ValueError("matrix has wrong shape")
        maxdeg = self.degree
        if maxdeg < 0:
            return MultiPoly.zero(N)
        D = lm.D
        out: dict = {}
        get = out.get
        for k, c in self._num.items():
            c = c * D ** (maxdeg - _deg(k))
            for kk, cc in lm.monomial_image(k, N).items():
                out[kk] = get(kk, 0) + c * cc
        out = {k: c for k, c in out.items() if c}
        return MultiPoly._raw(N, out, self._den * D**maxdeg)

    def divide_by_linear(self, ell: Sequence) -> "MultiPoly":
        """Exact quotient q with self = ell . X * q; raises NotDivisibleError otherwise."""
        N = self.nvars
        if len(ell) != N:
            raise ValueError("linear form has wrong dimension")
        fr = [_as_fraction(c) for c in ell]
        if not any(fr):
            raise ZeroDivisionError("division by the zero linear form")
        L = 1
        for c in fr:
            L = _lcm(L, c.denominator)
        li = [int(c * L) for c in fr]
        v = min((i for i in range(N) if li[i]), key=lambda i: abs(li[i]))
        cv = li[v]
        others = [(1 << (BITS * b), li[b]) for b in range(N) if b != v and li[b]]
        step = 1 << (BITS * v)
        top = max((_exp_of(k, v) for k in self._num), default=0)
        scale = cv**top
        buckets: list[dict] = [dict() for _ in range(top + 1)]
        for k, c in self._num.items():
            buckets[_exp_of(k, v)][k] = c * scale
        quot: dict = {}
        for e in range(top, 0, -1):
            lower = buckets[e - 1]
            for k, a in buckets[e].items():
                if not a:
                    continue
                qa, r = divmod(a, cv)
                assert r == 0
                qk = k - step
                quot[qk] = quot.get(qk, 0) + qa
                for sb, lb in others:
                    kk = qk + sb
                    lower[kk] = lower.get(kk, 0) - qa * lb
        rem = {k: c for k, c in buckets[0].items() if c}
        if rem:
            raise NotDivisibleError(MultiPoly._raw(N, rem, self._den * scale))
        quot = {k: c * L for k, c in quot.items() if c}
        return MultiPoly._raw(N, quot, self._den * scale)

    # -- display ----------------------------------------------------------

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.terms()!r})"

    def __str__(self):
        if not self._num:
            return "0"
        parts = []
        for exps, c in self.terms().items():
            mono = "*".join(f"X{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else "") if c != 1 or not mono else mono)
        return " + ".join(parts)


def mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p * q


def add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p + q


def scale(p: MultiPoly, c) -> MultiPoly:
    return p.scale(c)


def partial(p: MultiPoly, i: int) -> MultiPoly:
    return p.partial(i)


def compose_linear(p: MultiPoly, M) -> MultiPoly:
    return p.compose_linear(M)


def divide_by_linear(p: MultiPoly, ell) -> MultiPoly:
    return p.divide_by_linear(ell)


def euler_apply(p: MultiPoly) -> MultiPoly:
    return p.euler()


def monomials(nvars: int, max_degree: int, min_degree: int = 0) -> Iterable[MultiPoly]:
    """All monic monomials with min_degree <= total degree <= max_degree."""
    def rec(i, left):
        if i == nvars - 1:
            yield (left,)
            return
        for e in range(left, -1, -1):
            for rest in rec(i + 1, left - e):
                yield (e,) + rest

    for d in range(min_degree, max_degree + 1):
        for exps in rec(0, d):
            yield MultiPoly.monomial(exps)
