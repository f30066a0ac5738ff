"""Expression DAGs with symbolic derivatives, for non-polynomial ambient functions.

Nodes are hash-consed: building the same subexpression twice returns the same
object, so derivative caches and evaluation memos are shared.  Reflections act
through ``compose`` nodes carrying a constant matrix; nested compositions are
merged into one matrix.

Evaluation is exact on ``Fraction`` points as long as no real power with a
non-integral exponent or transcendental function is reached.
"""
from __future__ import annotations

import ast
import math
import weakref
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .scalars import QSqrt2

DEFAULT_SIZE_CAP = 2_000_000


class DomainError(ArithmeticError):
    """Evaluation left the domain of an expression (zero denominator, base <= 0, ...)."""

    def __init__(self, message: str, label: str = ""):
        self.label = label
        super().__init__(f"{message}{f' [{label}]' if label else ''}")


class ExpressionTooLarge(RuntimeError):
    pass


_INTERN: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()


class Expr:
    __slots__ = ("kind", "args", "data", "_dcache", "_topo", "__weakref__")

    def __new__(cls, kind: str, args: tuple = (), data=None):
        key = (kind, tuple(id(a) for a in args), _data_key(data))
        node = _INTERN.get(key)
        if node is not None and node.args == args:
            return node
        node = object.__new__(cls)
        node.kind = kind
        node.args = args
        node.data = data
        node._dcache = {}
        node._topo = None
        _INTERN[key] = node
        return node

    # operator sugar
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return add(self, neg(_lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), neg(self))

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        if isinstance(p, int) or (isinstance(p, Fraction) and p.denominator == 1):
            return ipow(self, int(p))
        return rpow(self, p)

    def __repr__(self):
        return to_string(self)

    # hash-consed: identity is structural equality
    __hash__ = object.__hash__


ChartExpr = Expr


def _data_key(data):
    if isinstance(data, (int, Fraction, float)) and not isinstance(data, bool):
        return (type(data).__name__, data)
    return data


def _lift(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return const(v)


def _norm_scalar(v):
    if isinstance(v, QSqrt2):
        v = v.simplify()
        return float(v) if isinstance(v, QSqrt2) else v
    if isinstance(v, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, (Fraction, float)):
        return v
    raise TypeError(f"unsupported constant {v!r}")


def const(v) -> Expr:
    return Expr("const", (), _norm_scalar(v))


def var(i: int) -> Expr:
    return Expr("var", (), int(i))


def variables(count: int) -> tuple:
    return tuple(var(i) for i in range(count))


def _is_const(e: Expr, value=None) -> bool:
    return e.kind == "const" and (value is None or e.data == value)


def add(*terms: Expr) -> Expr:
    flat = []
    c = Fraction(0)
    for t in terms:
        t = _lift(t)
        parts = t.args if t.kind == "add" else (t,)
        for p in parts:
            if p.kind == "const":
                c = c + p.data
            else:
                flat.append(p)
    if c != 0 or not flat:
        flat.append(const(c))
    if len(flat) == 1:
        return flat[0]
    return Expr("add", tuple(flat))


def mul(*factors: Expr) -> Expr:
    flat = []
    c = Fraction(1)
    for f in factors:
        f = _lift(f)
        parts = f.args if f.kind == "mul" else (f,)
        for p in parts:
            if p.kind == "const":
                c = c * p.data
            else:
                flat.append(p)
    if c == 0:
        return const(c)
    if c != 1 or not flat:
        flat.insert(0, const(c))
    if len(flat) == 1:
        return flat[0]
    return Expr("mul", tuple(flat))


def neg(e: Expr) -> Expr:
    return mul(const(-1), e)


def div(u: Expr, v: Expr, label: str = "") -> Expr:
    u, v = _lift(u), _lift(v)
    if v.kind == "const":
        if v.data == 0:
            raise DomainError("division by the zero constant", label)
        return mul(u, const(1 / v.data if isinstance(v.data, float) else Fraction(1) / v.data))
    if _is_const(u, 0):
        return u
    return Expr("div", (u, v), label)


def ipow(b: Expr, k: int) -> Expr:
    b = _lift(b)
    if k == 0:
        return const(1)
    if k == 1:
        return b
    if b.kind == "const":
        if b.data == 0 and k < 0:
            raise DomainError("zero to a negative power")
        return const(b.data**k)
    if k < 0:
        return div(const(1), ipow(b, -k))
    return Expr("ipow", (b,), k)


def rpow(b: Expr, p, label: str = "") -> Expr:
    """b**p for real p; evaluation requires b > 0."""
    b = _lift(b)
    p = _norm_scalar(p)
    if p == 0:
        return const(1)
    if b.kind == "const":
        if b.data <= 0:
            raise DomainError("real power of a non-positive constant", label)
        return const(_real_pow(b.data, p))
    return Expr("rpow", (b,), (p, label) if label else p)


def _rpow_exponent(e: Expr):
    return e.data[0] if isinstance(e.data, tuple) else e.data


def _rpow_label(e: Expr) -> str:
    return e.data[1] if isinstance(e.data, tuple) else ""


def _real_pow(base, p):
    if isinstance(p, Fraction) and p.denominator == 1 and not isinstance(base, float):
        return base ** int(p)
    return float(base) ** float(p)


_FUNCS: dict[str, Callable] = {"exp": math.exp, "log": math.log, "sin": math.sin, "cos": math.cos}


def func(name: str, u: Expr) -> Expr:
    if name not in _FUNCS:
        raise ValueError(f"unknown function {name!r}")
    u = _lift(u)
    if u.kind == "const":
        return const(_apply_func(name, u.data))
    return Expr("func", (u,), name)


def exp(u):
    return func("exp", u)


def log(u):
    return func("log", u)


def sin(u):
    return func("sin", u)


def cos(u):
    return func("cos", u)


def sqrt(u):
    return rpow(u, Fraction(1, 2))


def _apply_func(name, x):
    if name == "log" and x <= 0:
        raise DomainError("log of a non-positive number")
    return _FUNCS[name](float(x))


def _mat(M) -> tuple:
    return tuple(tuple(_norm_scalar(c) for c in row) for row in M)


def compose(e: Expr, M: Sequence[Sequence], offset: Sequence | None = None, label: str = "") -> Expr:
    """The expression X -> e(M X + offset)."""
    e = _lift(e)
    M = _mat(M)
    N = len(M)
    off = tuple(_norm_scalar(c) for c in offset) if offset is not None else (Fraction(0),) * N
    if e.kind == "const":
        return e
    if e.kind == "var":
        j = e.data
        return add(*[mul(const(M[j][b]), var(b)) for b in range(N) if M[j][b] != 0], const(off[j]))
    if e.kind == "compose":
        (inner,) = e.args
        M1, off1, lab1 = e.data
        MM = tuple(tuple(sum(M1[a][c] * M[c][b] for c in range(N)) for b in range(N)) for a in range(N))
        oo = tuple(sum(M1[a][c] * off[c] for c in range(N)) + off1[a] for a in range(N))
        return compose(inner, MM, oo, label or lab1)
    if all(M[a][b] == (1 if a == b else 0) for a in range(N) for b in range(N)) and not any(off):
        return e
    return Expr("compose", (e,), (M, off, label))


# -- traversal ----------------------------------------------------------------

def topo(e: Expr) -> list:
    """Nodes of the DAG below e (not entering compose children), children first."""
    if e._topo is not None:
        return e._topo
    order, seen = [], set()
    stack = [(e, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        if node.kind != "compose":
            for a in reversed(node.args):
                if id(a) not in seen:
                    stack.append((a, False))
    e._topo = order
    return order


def expr_size(e: Expr) -> int:
    """Distinct nodes, counting each composed subexpression once."""
    seen, todo, count = set(), [e], 0
    while todo:
        r = todo.pop()
        for node in topo(r):
            if id(node) in seen:
                continue
            seen.add(id(node))
            count += 1
            if node.kind == "compose":
                todo.append(node.args[0])
    return count


def free_variables(e: Expr) -> set:
    out, seen, todo = set(), set(), [e]
    while todo:
        r = todo.pop()
        for node in topo(r):
            if id(node) in seen:
                continue
            seen.add(id(node))
            if node.kind == "var":
                out.add(node.data)
            elif node.kind == "compose":
                M = node.data[0]
                sub = free_variables(node.args[0])
                for a in sub:
                    out.update(b for b in range(len(M)) if M[a][b] != 0)
    return out


# -- evaluation ---------------------------------------------------------------

def evaluate(e: Expr, point: Sequence):
    return _eval_at(e, tuple(point), {})


def _eval_at(root: Expr, pt: tuple, memo: dict):
    vals = memo.setdefault(pt, {})
    hit = vals.get(id(root))
    if hit is not None:
        return hit[1]
    for node in topo(root):
        key = id(node)
        if key in vals:
            continue
        k = node.kind
        if k == "const":
            v = node.data
        elif k == "var":
            v = pt[node.data]
        elif k == "add":
            v = 0
            for a in node.args:
                v = v + vals[id(a)][1]
        elif k == "mul":
            v = 1
            for a in node.args:
                v = v * vals[id(a)][1]
        elif k == "div":
            d = vals[id(node.args[1])][1]
            if d == 0:
                raise DomainError("division by zero", node.data or "")
            v = vals[id(node.args[0])][1] / d
        elif k == "ipow":
            b = vals[id(node.args[0])][1]
            if b == 0 and node.data < 0:
                raise DomainError("zero to a negative power")
            v = b**node.data
        elif k == "rpow":
            b = vals[id(node.args[0])][1]
            if not b > 0:
                raise DomainError(f"real power of non-positive base {float(b):.6g}", _rpow_label(node))
            v = _real_pow(b, _rpow_exponent(node))
        elif k == "func":
            v = _apply_func(node.data, vals[id(node.args[0])][1])
        elif k == "compose":
            M, off, label = node.data
            N = len(M)
            sub = tuple(sum((M[a][b] * pt[b] for b in range(N) if M[a][b] != 0), off[a]) for a in range(N))
            try:
                v = _eval_at(node.args[0], sub, memo)
            except DomainError as exc:
                if label and label not in str(exc):
                    raise DomainError(str(exc), label) from exc
                raise
        else:  # pragma: no cover
            raise ValueError(f"unknown node kind {k}")
        # keep the node alive alongside its value; ids are only unique among live objects
        vals[key] = (node, v)
    return vals[id(root)][1]


def lambdify(e: Expr) -> Callable:
    return lambda point: evaluate(e, point)


# -- differentiation ------------------------------------------------------------

def derivative(e: Expr, i: int) -> Expr:
    """Symbolic d e / d var_i."""
    if i in e._dcache:
        return e._dcache[i]
    for node in topo(e):
        if i in node._dcache:
            continue
        node._dcache[i] = _d(node, i)
    return e._dcache[i]


def _d(node: Expr, i: int) -> Expr:
    k = node.kind
    D = lambda a: a._dcache[i]  # noqa: E731  children are already differentiated
    if k == "const":
        return const(0)
    if k == "var":
        return const(1 if node.data == i else 0)
    if k == "add":
        return add(*[D(a) for a in node.args])
    if k == "mul":
        terms = []
        for j, a in enumerate(node.args):
            da = D(a)
            if _is_const(da, 0):
                continue
            terms.append(mul(*node.args[:j], da, *node.args[j + 1:]))
        return add(*terms) if terms else const(0)
    if k == "div":
        u, v = node.args
        du, dv = D(u), D(v)
        out = []
        if not _is_const(du, 0):
            out.append(div(du, v, node.data))
        if not _is_const(dv, 0):
            out.append(neg(div(mul(u, dv), ipow(v, 2), node.data)))
        return add(*out) if out else const(0)
    if k == "ipow":
        (b,) = node.args
        db = D(b)
        if _is_const(db, 0):
            return const(0)
        return mul(const(node.data), ipow(b, node.data - 1), db)
    if k == "rpow":
        (b,) = node.args
        db = D(b)
        if _is_const(db, 0):
            return const(0)
        p = _rpow_exponent(node)
        return mul(const(p), rpow(b, p - 1, _rpow_label(node)), db)
    if k == "func":
        (u,) = node.args
        du = D(u)
        if _is_const(du, 0):
            return const(0)
        name = node.data
        if name == "exp":
            return mul(node, du)
        if name == "log":
            return div(du, u)
        if name == "sin":
            return mul(cos(u), du)
        if name == "cos":
            return neg(mul(sin(u), du))
    if k == "compose":
        (c,) = node.args
        M, off, label = node.data
        terms = []
        for b in range(len(M)):
            if M[b][i] != 0:
                terms.append(mul(const(M[b][i]), compose(derivative(c, b), M, off, label)))
        return add(*terms) if terms else const(0)
    raise ValueError(f"cannot differentiate node kind {k}")  # pragma: no cover


def gradient(e: Expr, nvars: int) -> tuple:
    return tuple(derivative(e, i) for i in range(nvars))


def directional_derivative(e: Expr, xi: Sequence) -> Expr:
    return add(*[mul(const(c), derivative(e, a)) for a, c in enumerate(xi) if c != 0])


# -- substitution -------------------------------------------------------------

def substitute(e: Expr, exprs: Sequence[Expr]) -> Expr:
    """Replace var_j by exprs[j] throughout e."""
    exprs = tuple(_lift(x) for x in exprs)
    new: dict = {}
    for node in topo(e):
        k = node.kind
        if k == "const":
            r = node
        elif k == "var":
            r = exprs[node.data]
        elif k == "add":
            r = add(*[new[id(a)] for a in node.args])
        elif k == "mul":
            r = mul(*[new[id(a)] for a in node.args])
        elif k == "div":
            r = div(new[id(node.args[0])], new[id(node.args[1])], node.data)
        elif k == "ipow":
            r = ipow(new[id(node.args[0])], node.data)
        elif k == "rpow":
            r = rpow(new[id(node.args[0])], _rpow_exponent(node), _rpow_label(node))
        elif k == "func":
            r = func(node.data, new[id(node.args[0])])
        elif k == "compose":
            M, off, _ = node.data
            inner = [
                add(*[mul(const(M[a][b]), exprs[b]) for b in range(len(M)) if M[a][b] != 0], const(off[a]))
                for a in range(len(M))
            ]
            r = substitute(node.args[0], inner)
        new[id(node)] = r
    return new[id(e)]


# -- display ------------------------------------------------------------------

def to_string(e: Expr, names: Sequence[str] | None = None) -> str:
    def name(i):
        return names[i] if names else f"v{i}"

    def s(node):
        k = node.kind
        if k == "const":
            return str(node.data)
        if k == "var":
            return name(node.data)
        if k == "add":
            return "(" + " + ".join(s(a) for a in node.args) + ")"
        if k == "mul":
            return "*".join(s(a) for a in node.args)
        if k == "div":
            return f"({s(node.args[0])})/({s(node.args[1])})"
        if k == "ipow":
            return f"({s(node.args[0])})^{node.data}"
        if k == "rpow":
            return f"({s(node.args[0])})^({_rpow_exponent(node)})"
        if k == "func":
            return f"{node.data}({s(node.args[0])})"
        if k == "compose":
            return f"[{s(node.args[0])}]o{node.data[0]}"
        return "?"

    if expr_size(e) > 2000:
        return f"<Expr with {expr_size(e)} nodes>"
    return s(e)


# -- parsing (CLI function specs) -----------------------------------------------

_ALLOWED_FUNCS = {"exp": exp, "log": log, "sin": sin, "cos": cos, "sqrt": sqrt}


def parse_expr(text: str, n: int, prefix: str = "x") -> Expr:
    """Parse a chart function such as ``x1**2 + exp(x2)/(1 + x1**2)``.

    Variables are ``x1..xn``; numbers are exact (``0.5`` is 1/2); ``^`` and ``**``
    both mean power; functions: exp, log, sin, cos, sqrt.
    """
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def conv(node):
        if isinstance(node, ast.Expression):
            return conv(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            v = node.value
            return const(Fraction(str(v)) if isinstance(v, float) else v)
        if isinstance(node, ast.Name):
            if node.id.startswith(prefix) and node.id[len(prefix):].isdigit():
                i = int(node.id[len(prefix):])
                if 1 <= i <= n:
                    return var(i - 1)
            raise ValueError(f"unknown variable {node.id!r} (use {prefix}1..{prefix}{n})")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = conv(node.operand)
            return neg(v) if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = conv(node.left)
            if isinstance(node.op, ast.Pow):
                p = _const_value(node.right)
                return a**p
            b = conv(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_FUNCS:
            if len(node.args) != 1 or node.keywords:
                raise ValueError(f"{node.func.id} takes one argument")
            return _ALLOWED_FUNCS[node.func.id](conv(node.args[0]))
        raise ValueError(f"unsupported syntax in function spec: {ast.dump(node)[:60]}")

    def _const_value(node):
        e = conv(node)
        if e.kind != "const":
            raise ValueError("exponents must be constants")
        return e.data

    return conv(tree)


def from_multipoly(p) -> Expr:
    """Expression twin of an exact MultiPoly."""
    terms = []
    for exps, c in p.terms().items():
        factors = [const(c)] + [ipow(var(i), e) for i, e in enumerate(exps) if e]
        terms.append(mul(*factors))
    return add(*terms) if terms else const(0)


# -- densities and the ambient picture ------------------------------------------

@dataclass(frozen=True)
class Density:
    """A chart function f(x1..xn) of conformal weight w."""

    f: Expr
    w: object
    n: int


def ambient_square_expr(n: int) -> Expr:
    X = variables(n + 2)
    return add(mul(const(2), X[0], X[-1]), *[ipow(X[i], 2) for i in range(1, n + 1)])


def density_to_ambient(d: Density) -> Expr:
    """(X0)^w f(X1/X0, ..., Xn/X0): homogeneous of degree w, independent of Xinf."""
    X = variables(d.n + 2)
    args = [div(X[i], X[0], "X0 = 0") for i in range(1, d.n + 1)]
    return mul(rpow(X[0], d.w, "X0 <= 0 outside the positive cone"), substitute(d.f, args))


def perturb_extension(e: Expr, g: Density) -> Expr:
    """e + <X,X> * lift(g); unchanged on the null cone."""
    return add(e, mul(ambient_square_expr(g.n), density_to_ambient(g)))


class ConeRestriction:
    """Chart function x -> e(1, x, -|x|^2/2)."""

    def __init__(self, e: Expr, n: int):
        self.expr = e
        self.n = n

    def __call__(self, x: Sequence):
        x = tuple(x)
        if len(x) != self.n:
            raise ValueError(f"expected a chart point with {self.n} coordinates")
        half = 0.5 if any(isinstance(c, float) for c in x) else Fraction(1, 2)
        X = (1,) + x + (-half * sum(c * c for c in x),)
        return evaluate(self.expr, X)

    def as_expr(self) -> Expr:
        xs = variables(self.n)
        lift = [const(1)] + list(xs) + [mul(const(Fraction(-1, 2)), add(*[ipow(v, 2) for v in xs]))]
        return substitute(self.expr, lift)


def restrict_to_cone(e: Expr, n: int) -> ConeRestriction:
    return ConeRestriction(e, n)


def flat_laplacian_expr(e: Expr, n: int) -> Expr:
    N = n + 2
    terms = [mul(const(2), derivative(derivative(e, 0), N - 1))]
    terms += [derivative(derivative(e, i), i) for i in range(1, N - 1)]
    return add(*terms)


def _root_entries(root):
    from .rootsys import reflection_matrix

    def norm(c):
        return _norm_scalar(c)

    return (
        tuple(norm(c) for c in root.vector),
        tuple(norm(c) for c in root.linear_form()),
        tuple(tuple(norm(c) for c in row) for row in reflection_matrix(root)),
        _norm_scalar(root.norm),
    )


def ambient_dunkl_laplacian_expr(ctx, e: Expr, size_cap: int = DEFAULT_SIZE_CAP) -> Expr:
    """Lap e + 2 sum_a k(a) ( d_a e / <a,X> - (<a,a>/2) (e - e o R_a) / <a,X>^2 )."""
    R = ctx.root_system
    n = R.n
    N = n + 2
    X = variables(N)
    terms = [flat_laplacian_expr(e, n)]
    for a in R.positive_roots:
        k = ctx.multiplicity(a)
        if k == 0:
            continue
        vec, ell, refl, nrm = _root_entries(a)
        label = f"root {a}"
        wall = add(*[mul(const(c), X[b]) for b, c in enumerate(ell) if c != 0])
        first = div(directional_derivative(e, vec), wall, f"on the reflecting hyperplane of {label}")
        reflected = compose(e, refl, None, f"reflection in {label}")
        second = div(add(e, neg(reflected)), ipow(wall, 2), f"on the reflecting hyperplane of {label}")
        half = nrm / 2
        terms.append(mul(const(2 * _norm_scalar(k)), add(first, neg(mul(const(half), second)))))
    out = add(*terms)
    if expr_size(out) > size_cap:
        raise ExpressionTooLarge(f"expression has more than {size_cap} nodes")
    return out
