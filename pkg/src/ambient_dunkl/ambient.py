"""The flat ambient space R^{n+1,1} and its null-cone adapted coordinates.

Vectors are ordered ``(X0, X1, ..., Xn, Xinf)``.  In this standard basis the
form is ``<X,Y> = X0*Yinf + Xinf*Y0 + sum_i Xi*Yi``; the tilde basis
``(X0 + Xinf)/sqrt2, Xi, (X0 - Xinf)/sqrt2`` diagonalizes it to
``diag(1, ..., 1, -1)`` and is float-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .scalars import check_mode, to_exact

Matrix = tuple  # tuple of row tuples


class DimensionError(ValueError):
    pass


class ChartDomainError(ValueError):
    """A point lies outside the region where the chart-adapted coordinates exist."""


@dataclass(frozen=True)
class BilinearForm:
    n: int
    basis_mode: str = "standard"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("chart dimension n must be positive")
        if self.basis_mode not in ("standard", "tilde"):
            raise ValueError(f"unknown basis mode {self.basis_mode!r}")

    @property
    def dim(self) -> int:
        return self.n + 2

    def gram(self) -> Matrix:
        N = self.dim
        if self.basis_mode == "tilde":
            return tuple(
                tuple(0.0 if i != j else (-1.0 if i == N - 1 else 1.0) for j in range(N))
                for i in range(N)
            )
        rows = []
        for i in range(N):
            row = [Fraction(0)] * N
            if i == 0:
                row[N - 1] = Fraction(1)
            elif i == N - 1:
                row[0] = Fraction(1)
            else:
                row[i] = Fraction(1)
            rows.append(tuple(row))
        return tuple(rows)

    def inverse_gram(self) -> Matrix:
        # both Gram matrices are involutions
        return self.gram()

    def signature(self) -> tuple[int, int]:
        return (self.n + 1, 1)

    def pair(self, u: Sequence, v: Sequence):
        if len(u) != self.dim or len(v) != self.dim:
            raise DimensionError(f"expected vectors of length {self.dim}")
        if self.basis_mode == "tilde":
            return sum(float(a) * float(b) for a, b in zip(u[:-1], v[:-1])) - float(u[-1]) * float(v[-1])
        return pair(u, v)


@dataclass(frozen=True)
class AmbientVector:
    """A point of R^{n+1,1} in standard coordinates."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) < 3:
            raise DimensionError("ambient vectors have at least 3 coordinates")
        check_mode(self.coords)

    @property
    def n(self) -> int:
        return len(self.coords) - 2

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other):
        return AmbientVector(a + b for a, b in zip(self, _as_coords(other, len(self))))

    def __sub__(self, other):
        return AmbientVector(a - b for a, b in zip(self, _as_coords(other, len(self))))

    def __neg__(self):
        return AmbientVector(-a for a in self)

    def __mul__(self, c):
        return AmbientVector(c * a for a in self)

    __rmul__ = __mul__


def _as_coords(v, dim):
    c = tuple(v)
    if len(c) != dim:
        raise DimensionError(f"dimension mismatch: {len(c)} != {dim}")
    return c


@dataclass(frozen=True)
class ConeCoords:
    t: object
    x: tuple
    rho: object

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))


def pair(u: Sequence, v: Sequence):
    """Standard-basis pairing ``u0*vinf + uinf*v0 + sum ui*vi``."""
    if len(u) != len(v):
        raise DimensionError(f"dimension mismatch: {len(u)} != {len(v)}")
    if len(u) < 3:
        raise DimensionError("ambient vectors have at least 3 coordinates")
    check_mode(list(u) + list(v))
    s = u[0] * v[-1] + u[-1] * v[0]
    for i in range(1, len(u) - 1):
        s += u[i] * v[i]
    return s


def norm2(u: Sequence):
    return pair(u, u)


def null_lift(x: Sequence, t=1):
    """The cone point ``t*(1, x, -|x|^2/2)`` over the chart point x."""
    x = tuple(x)
    r2 = sum(xi * xi for xi in x)
    half = 0.5 if any(isinstance(xi, float) for xi in x) else Fraction(1, 2)
    return (t,) + tuple(t * xi for xi in x) + (-t * half * r2,)


def to_cone_coords(X: Sequence) -> ConeCoords:
    X = tuple(X)
    if check_mode(X):
        X = tuple(to_exact(c) for c in X)
    t = X[0]
    if t == 0:
        raise ChartDomainError("X0 = 0: point outside the chart-adapted region")
    inner = X[1:-1]
    x = tuple(xi / t for xi in inner)
    rho = X[-1] / t + sum(xi * xi for xi in inner) / (2 * t * t)
    return ConeCoords(t, x, rho)


def from_cone_coords(p: ConeCoords) -> tuple:
    t, x, rho = p.t, p.x, p.rho
    exact = check_mode((t, rho) + x)
    half = Fraction(1, 2) if exact else 0.5
    r2 = sum(xi * xi for xi in x)
    return (t,) + tuple(t * xi for xi in x) + (t * (rho - half * r2),)


def chart_jacobian(p: ConeCoords) -> Matrix:
    """Rows express d/dX^a in the frame (d/dt, d/dx_1..d/dx_n, d/drho).

    Entry ``[a][b]`` is the derivative of the b-th adapted coordinate along X^a.
    """
    t, x, rho = p.t, p.x, p.rho
    if t == 0:
        raise ChartDomainError("t = 0: coordinate vector fields undefined")
    exact = check_mode((t, rho) + x)
    one = Fraction(1) if exact else 1.0
    zero = 0 * one
    n = len(x)
    inv_t = one / t
    r2 = sum(xi * xi for xi in x)
    rows = []
    rows.append((one,) + tuple(-xi * inv_t for xi in x) + (-(rho + r2 / 2) * inv_t,))
    for i in range(n):
        row = [zero] * (n + 2)
        row[1 + i] = inv_t
        row[n + 1] = x[i] * inv_t
        rows.append(tuple(row))
    rows.append(tuple([zero] * (n + 1)) + (inv_t,))
    return tuple(rows)


_S = 1.0 / math.sqrt(2.0)


def to_tilde(X: Sequence) -> tuple:
    """Coordinates in the basis where the form is diag(1,...,1,-1) (float only)."""
    X = [float(c) for c in X]
    return (_S * (X[0] + X[-1]),) + tuple(X[1:-1]) + (_S * (X[0] - X[-1]),)


def from_tilde(Xt: Sequence) -> tuple:
    Xt = [float(c) for c in Xt]
    return (_S * (Xt[0] + Xt[-1]),) + tuple(Xt[1:-1]) + (_S * (Xt[0] - Xt[-1]),)


def pair_tilde(u: Sequence, v: Sequence) -> float:
    return BilinearForm(len(u) - 2, "tilde").pair(u, v)


# small exact/float linear algebra on tuple matrices

def identity(N: int, one=Fraction(1)) -> Matrix:
    zero = one * 0
    return tuple(tuple(one if i == j else zero for j in range(N)) for i in range(N))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = tuple(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: Matrix, v: Sequence) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in A)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))
