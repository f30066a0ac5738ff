"""Roots in the Euclidean subspace of R^{n+1,1}, root systems and their groups.

A root has equal first and last coordinates, ``alpha = (a0, a1..an, a0)``, so
it lies in the positive-definite subspace ``X0 = Xinf``.  Its reflection acts
linearly on the ambient space and, through the null cone, as a conformal
reflection of the sphere; in the chart ``x -> (1, x, -|x|^2/2)`` that is the
rational map :func:`chart_reflection`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .ambient import Matrix, identity, matmul, matvec, null_lift, pair
from .scalars import QSqrt2, check_mode, format_scalar, parse_scalar, to_exact

DEFAULT_GROUP_CAP = 10**6


class RootSystemError(ValueError):
    """A candidate set of roots violates the root-system axioms."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        head = "; ".join(self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"not a root system: {head}{more}")


class GroupCapError(RuntimeError):
    pass


class PointAtInfinityError(ValueError):
    """The chart image of a point under a reflection is the point at infinity."""

    def __init__(self, root, x):
        self.root = root
        self.x = tuple(x)
        super().__init__(f"reflection in root {root} sends {self.x} to the point at infinity")


def _exactify(c):
    if isinstance(c, float):
        return c
    return to_exact(c)


@dataclass(frozen=True)
class Root:
    vector: tuple
    norm: object = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        v = tuple(_exactify(c) for c in self.vector)
        if len(v) < 3:
            raise ValueError("a root needs at least 3 coordinates")
        check_mode(v)
        if v[0] != v[-1]:
            raise ValueError(f"root {v} is not in the Euclidean subspace (first != last coordinate)")
        object.__setattr__(self, "vector", v)
        nrm = pair(v, v)
        if nrm == 0:
            raise ValueError(f"null root {v}")
        if nrm < 0:
            raise ValueError(f"negative-length root {v}")
        object.__setattr__(self, "norm", nrm)

    @classmethod
    def from_parts(cls, alpha0, alpha: Sequence) -> "Root":
        return cls((alpha0,) + tuple(alpha) + (alpha0,))

    @property
    def n(self) -> int:
        return len(self.vector) - 2

    @property
    def alpha0(self):
        return self.vector[0]

    @property
    def euclidean(self) -> tuple:
        return self.vector[1:-1]

    @property
    def is_exact(self) -> bool:
        return not isinstance(self.alpha0, float)

    def alpha0_from_length(self):
        """sqrt((<a,a> - sum ai^2)/2); exact roots return the square instead."""
        sq = (self.norm - sum(a * a for a in self.euclidean)) / 2
        if self.is_exact:
            return sq
        return max(sq, 0.0) ** 0.5

    def as_float(self) -> "Root":
        return self if not self.is_exact else Root(tuple(float(c) for c in self.vector))

    def linear_form(self) -> tuple:
        """Coefficients of X -> <alpha, X> in standard coordinates."""
        v = self.vector
        return (v[-1],) + v[1:-1] + (v[0],)

    def __neg__(self):
        return Root(tuple(-c for c in self.vector))

    def __str__(self):
        return "(" + ", ".join(format_scalar(c) for c in self.vector) + ")"


def is_positive(v: Sequence) -> bool:
    for c in v:
        if c != 0:
            return c > 0
    return False


def reflect(root: Root, X: Sequence) -> tuple:
    X = tuple(X)
    a = root.vector if check_mode(X) else root.as_float().vector
    c = 2 * pair(a, X) / root.norm if check_mode(X) else 2 * pair(a, X) / float(root.norm)
    return tuple(x - c * ai for x, ai in zip(X, a))


def reflection_matrix(root: Root) -> Matrix:
    a, ell, nrm = root.vector, root.linear_form(), root.norm
    N = len(a)
    one = 1.0 if not root.is_exact else Fraction(1)
    zero = 0 * one
    return tuple(
        tuple((one if i == j else zero) - 2 * a[i] * ell[j] / nrm for j in range(N))
        for i in range(N)
    )


def root_system_violations(roots: Iterable[Root]) -> list[str]:
    roots = list(dict.fromkeys(roots))
    if not roots:
        return ["empty root set"]
    dims = {r.n for r in roots}
    if len(dims) != 1:
        return [f"roots of mixed dimension {sorted(dims)}"]
    rset = set(roots)
    out = []
    for a in roots:
        if -a not in rset:
            out.append(f"{a}: negative -alpha missing")
        for b in roots:
            if b == a or b == -a:
                continue
            if _parallel(a.vector, b.vector):
                out.append(f"{a}, {b}: extra multiple of a root")
        for b in roots:
            try:
                img = Root(reflect(a, b.vector))
            except ValueError:  # pragma: no cover - reflections preserve length
                out.append(f"R_{a}({b}) is degenerate")
                continue
            if img not in rset:
                out.append(f"R_{a}({b}) = {img} not in R")
    return out


def _parallel(u, v) -> bool:
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            if u[i] * v[j] - u[j] * v[i] != 0:
                return False
    return True


@dataclass(frozen=True)
class RootSystem:
    roots: tuple
    positive_roots: tuple
    orbits: tuple
    name: str = ""
    tags: tuple = ()  # (root, tag) pairs

    @property
    def n(self) -> int:
        return self.roots[0].n

    @property
    def is_exact(self) -> bool:
        return self.roots[0].is_exact

    @property
    def is_rational(self) -> bool:
        return all(not isinstance(c, (QSqrt2, float)) for r in self.roots for c in r.vector)

    def orbit_index(self, root: Root) -> int:
        for i, orb in enumerate(self.orbits):
            if root in orb:
                return i
        raise KeyError(f"{root} is not a root of this system")

    def tag(self, root: Root) -> str:
        return dict(self.tags).get(root, "")

    def reflections(self) -> tuple:
        return tuple(reflection_matrix(a) for a in self.positive_roots)

    def negated_positive_system(self) -> "RootSystem":
        """Same system with the opposite choice of positive half."""
        return RootSystem(self.roots, tuple(-a for a in self.positive_roots), self.orbits, self.name, self.tags)


def _orbits(roots: list[Root]) -> tuple:
    parent = {r: r for r in roots}

    def find(r):
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        return r

    for a in roots:
        for b in roots:
            img = Root(reflect(a, b.vector))
            ra, rb = find(b), find(img)
            if ra != rb:
                parent[ra] = rb
    groups: dict = {}
    for r in roots:
        groups.setdefault(find(r), []).append(r)
    orbits = [tuple(sorted(g, key=_sort_key, reverse=True)) for g in groups.values()]
    # longest roots first, then by leading positive root
    orbits.sort(key=lambda o: (-float(o[0].norm), tuple(-float(c) for c in o[0].vector)))
    return tuple(orbits)


def _sort_key(r: Root):
    return tuple(float(c) for c in r.vector)


def validate_root_system(roots: Iterable[Root], name: str = "", tags=()) -> RootSystem:
    roots = list(dict.fromkeys(roots))
    bad = root_system_violations(roots)
    if bad:
        raise RootSystemError(bad)
    roots.sort(key=_sort_key, reverse=True)
    positive = tuple(r for r in roots if is_positive(r.vector))
    return RootSystem(tuple(roots), positive, _orbits(roots), name, tuple(tags))


def close_under_reflections(generators: Iterable[Root], cap: int = 100000) -> list[Root]:
    """Smallest reflection-closed set containing +-generators."""
    roots = set()
    queue = deque()
    for g in generators:
        for r in (g, -g):
            if r not in roots:
                roots.add(r)
                queue.append(r)
    while queue:
        b = queue.popleft()
        for a in list(roots):
            for img in (Root(reflect(a, b.vector)), Root(reflect(b, a.vector))):
                if img not in roots:
                    roots.add(img)
                    queue.append(img)
                    if len(roots) > cap:
                        raise GroupCapError(f"more than {cap} roots generated")
    return sorted(roots, key=_sort_key, reverse=True)


# -- groups -----------------------------------------------------------------

@dataclass(frozen=True)
class ReflectionGroup:
    elements: frozenset
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.elements

    def __iter__(self):
        return iter(self.elements)


def generate_group(system: RootSystem, cap: int = DEFAULT_GROUP_CAP) -> ReflectionGroup:
    gens = system.reflections()
    N = system.n + 2
    one = Fraction(1) if system.is_exact else 1.0
    e = identity(N, one)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = matmul(s, g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
                    if len(seen) > cap:
                        raise GroupCapError(f"group exceeds {cap} elements; input is not a finite reflection group")
        frontier = nxt
    return ReflectionGroup(frozenset(seen), gens)


# -- multiplicities ---------------------------------------------------------

@dataclass(frozen=True)
class MultiplicityFunction:
    system: RootSystem
    values: tuple  # one scalar per orbit, in system.orbits order

    def __post_init__(self):
        vals = tuple(_exactify(v) for v in self.values)
        if len(vals) != len(self.system.orbits):
            raise ValueError(f"expected {len(self.system.orbits)} orbit values, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, system: RootSystem, c) -> "MultiplicityFunction":
        return cls(system, (c,) * len(system.orbits))

    def __call__(self, root: Root):
        return self.values[self.system.orbit_index(root)]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)


def gamma(positive_roots: Iterable[Root], k: MultiplicityFunction):
    total = 0
    for a in positive_roots:
        total = total + k(a)
    return total


# -- hyperplanes, subspheres, chart reflections ------------------------------

def hyperplane_basis(root: Root) -> list[tuple]:
    a0, al = root.alpha0, root.euclidean
    n = len(al)
    zero = 0 * a0
    out = []
    if a0 != 0:
        for i in range(n):
            v = [zero] * (n + 2)
            v[0] = -al[i]
            v[1 + i] = a0
            out.append(tuple(v))
        s = sum(c * c for c in al)
        out.append((-a0 - s / a0,) + tuple(al) + (a0,))
        return out
    # a0 = 0: the displayed basis degenerates
    one = zero + 1
    out.append((one,) + (zero,) * (n + 1))
    out.append((zero,) * (n + 1) + (one,))
    p = next(i for i, c in enumerate(al) if c != 0)
    for j in range(n):
        if j == p:
            continue
        v = [zero] * (n + 2)
        v[1 + j] = al[p]
        v[1 + p] = -al[j]
        out.append(tuple(v))
    return out


@dataclass(frozen=True)
class Quadric:
    """``c2*|x|^2 + sum ci*xi + c0``; zero set is the reflecting subsphere in the chart."""

    c2: object
    linear: tuple
    c0: object

    def value(self, x: Sequence):
        if not check_mode(tuple(x)):
            c2, lin, c0 = float(self.c2), [float(c) for c in self.linear], float(self.c0)
        else:
            c2, lin, c0 = self.c2, self.linear, self.c0
        return c2 * sum(xi * xi for xi in x) + sum(c * xi for c, xi in zip(lin, x)) + c0

    def contains(self, x: Sequence, tol: float = 1e-10) -> bool:
        return abs(float(self.value(x))) <= tol


def subsphere_quadric(root: Root) -> Quadric:
    a0 = root.alpha0
    return Quadric(-a0 / 2, tuple(root.euclidean), a0)


def _chart_root(root: Root, x: Sequence) -> Root:
    return root if check_mode(tuple(x)) else root.as_float()


def wall_value(root: Root, x: Sequence):
    """D_alpha(x) = <alpha, (1, x, -|x|^2/2)>."""
    return subsphere_quadric(_chart_root(root, x)).value(x)


def conformal_factor(root: Root, x: Sequence):
    """J_alpha(x): the X0 component of the reflected cone point over x."""
    r = _chart_root(root, x)
    return 1 - 2 * r.alpha0 * wall_value(r, x) / r.norm


def chart_reflection(root: Root, x: Sequence) -> tuple:
    x = tuple(x)
    r = _chart_root(root, x)
    D = wall_value(r, x)
    J = 1 - 2 * r.alpha0 * D / r.norm
    if J == 0:
        raise PointAtInfinityError(root, x)
    return tuple((xi - 2 * ai * D / r.norm) / J for xi, ai in zip(x, r.euclidean))


def lifted_chart_reflection(root: Root, x: Sequence) -> tuple:
    """Lift x to the cone, reflect in R^{n+1,1}, and project back to the chart."""
    Y = reflect(root, null_lift(x))
    if Y[0] == 0:
        raise PointAtInfinityError(root, x)
    return tuple(y / Y[0] for y in Y[1:-1])


def chart_action(g: Matrix, x: Sequence) -> tuple[tuple, object]:
    """Chart image of x under a group element and the X0 factor of g(1, x, -|x|^2/2)."""
    Y = matvec(g, null_lift(x))
    if Y[0] == 0:
        raise ValueError(f"group element sends {tuple(x)} to the point at infinity")
    return tuple(y / Y[0] for y in Y[1:-1]), Y[0]


# -- builtin systems --------------------------------------------------------

def _unit(n: int, i: int, c=1) -> tuple:
    v = [Fraction(0)] * n
    v[i] = Fraction(c) if not isinstance(c, QSqrt2) else c
    return tuple(v)


def _B_from_short(short: list[tuple]) -> list[tuple]:
    vecs = []
    for i, f in enumerate(short):
        vecs += [f, tuple(-c for c in f)]
        for g in short[:i]:
            for s1 in (1, -1):
                for s2 in (1, -1):
                    vecs.append(tuple(s1 * a + s2 * b for a, b in zip(f, g)))
    return vecs


def build_B(n: int) -> RootSystem:
    """B_{n+1} in the Euclidean subspace of R^{n+1,1}, tagged ``B_n`` / ``S``.

    The extra Euclidean direction is (1, 0..0, 1)/sqrt2.  For even n the chart
    directions are paired as e_{2m-1} +- e_{2m} so that all roots are rational
    with short roots of length^2 2; odd n needs sqrt(2) in the S roots.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    N = n + 2
    if n % 2 == 0:
        f0 = [Fraction(0)] * N
        f0[0] = f0[-1] = Fraction(1)
        short = [tuple(f0)]
        for m in range(n // 2):
            i, j = 1 + 2 * m, 2 + 2 * m
            plus = list(_unit(N, i))
            plus[j] = Fraction(1)
            minus = list(_unit(N, i))
            minus[j] = Fraction(-1)
            short += [tuple(plus), tuple(minus)]
    else:
        h = QSqrt2(0, Fraction(1, 2))
        e0 = [Fraction(0)] * N
        e0[0] = e0[-1] = h
        short = [tuple(e0)] + [_unit(N, i) for i in range(1, n + 1)]
    vecs = _B_from_short(short)
    roots = [Root(tuple(c.simplify() if isinstance(c, QSqrt2) else c for c in v)) for v in vecs]
    tags = [(r, "B_n" if r.alpha0 == 0 else "S") for r in roots]
    return validate_root_system(roots, name=f"B{n + 1}", tags=tags)


def embed(system: RootSystem, n: int) -> RootSystem:
    """Pad chart coordinates with zeros to place a system in R^{n+1,1}."""
    m = system.n
    if n < m:
        raise ValueError(f"cannot embed a rank-{m} chart system into n = {n}")
    pad = (Fraction(0),) * (n - m)

    def up(r):
        return Root(r.vector[:-1] + pad + r.vector[-1:])

    tags = [(up(r), t) for r, t in system.tags]
    return validate_root_system([up(r) for r in system.roots], name=system.name, tags=tags)


def A1(n: int) -> RootSystem:
    e1 = Root.from_parts(0, _unit(n, 0))
    return validate_root_system([e1, -e1], name="A1")


def B2_euclidean(n: int) -> RootSystem:
    if n < 2:
        raise ValueError("B2_euclidean needs n >= 2")
    e1, e2 = _unit(n, 0), _unit(n, 1)
    vecs = _B_from_short([e1, e2])
    return validate_root_system([Root.from_parts(0, v) for v in vecs], name="B2_euclidean")


def B3_embedded(n: int) -> RootSystem:
    if n < 2:
        raise ValueError("B3_embedded needs n >= 2")
    return embed(build_B(2), n)


BUILTINS = {"A1": A1, "B2_euclidean": B2_euclidean, "B3_embedded": B3_embedded}


def builtin_system(name: str, n: int) -> RootSystem:
    """Named systems: ``A1``, ``B2_euclidean``, ``B3_embedded``, and ``B(m)``: the
    rank-m system B_m built on an (m-1)-dimensional chart, padded to n."""
    if name in BUILTINS:
        return BUILTINS[name](n)
    if name.startswith("B(") and name.endswith(")"):
        m = int(name[2:-1])
        if m < 2:
            raise ValueError("B(m) needs m >= 2")
        return embed(build_B(m - 1), n)
    raise KeyError(f"unknown root system {name!r}")


# -- plain-text formats -----------------------------------------------------

def parse_roots(text: str) -> list[Root]:
    """One root per line, n+2 whitespace-separated rationals; ``#`` starts a comment."""
    roots = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            roots.append(Root(tuple(parse_scalar(tok) for tok in line.replace(",", " ").split())))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return roots


def format_roots(roots: Iterable[Root], header: str = "") -> str:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    for r in roots:
        lines.append(" ".join(format_scalar(c) for c in r.vector))
    return "\n".join(lines) + "\n"


def load_root_system(path) -> RootSystem:
    from pathlib import Path

    p = Path(path)
    return validate_root_system(parse_roots(p.read_text()), name=p.stem)


def parse_multiplicity(text: str, system: RootSystem) -> MultiplicityFunction:
    """Companion key-value file: ``k.<orbit> = value`` lines; ``orbit.<i> = <root>``
    lines optionally pin which orbit index means which root.
    """
    vals: dict[int, object] = {}
    remap: dict[int, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key.startswith("k."):
            vals[int(key[2:])] = parse_scalar(val)
        elif key.startswith("orbit."):
            root = Root(tuple(parse_scalar(t) for t in val.replace(",", " ").split()))
            remap[int(key[6:])] = system.orbit_index(root)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    values = [None] * len(system.orbits)
    for i, v in vals.items():
        j = remap.get(i, i)
        if not 0 <= j < len(values):
            raise ValueError(f"orbit index {i} out of range")
        values[j] = v
    if any(v is None for v in values):
        raise ValueError("multiplicity missing for some orbit")
    return MultiplicityFunction(system, tuple(values))


def format_multiplicity(k: MultiplicityFunction) -> str:
    lines = []
    for i, (orb, v) in enumerate(zip(k.system.orbits, k.values)):
        lines.append(f"orbit.{i} = {' '.join(format_scalar(c) for c in orb[0].vector)}")
        lines.append(f"k.{i} = {format_scalar(v)}")
    return "\n".join(lines) + "\n"
