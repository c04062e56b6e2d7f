"""A tiny expression language for profile functions and user immersions.

Grammar (a safe subset of Python expressions)::

    expr   := number | name | expr OP expr | -expr | +expr | func(expr) | (expr, ...)
    OP     := + - * / **
    func   := sin cos tan exp log sqrt sinh cosh tanh
    name   := u | v | pi | e | any constant passed in ``constants``

Expressions are evaluated with :class:`Jet` numbers, which carry exact first
and second partial derivatives with respect to ``u`` and ``v``.  ``^`` is
accepted as a synonym for ``**``.
"""

import ast

import numpy as np

from .errors import ConfigError


class Jet:
    """Second-order bivariate jet: value plus d/du, d/dv, d2/du2, d2/dudv, d2/dv2."""

    __slots__ = ("val", "du", "dv", "duu", "duv", "dvv")

    def __init__(self, val, du=0.0, dv=0.0, duu=0.0, duv=0.0, dvv=0.0):
        self.val = val
        self.du = du
        self.dv = dv
        self.duu = duu
        self.duv = duv
        self.dvv = dvv

    @classmethod
    def variable_u(cls, u):
        u = np.asarray(u, dtype=float)
        return cls(u, np.ones_like(u), np.zeros_like(u))

    @classmethod
    def variable_v(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v, np.zeros_like(v), np.ones_like(v))

    def _chain(self, f0, f1, f2):
        # y = phi(x): y_ij = phi'' x_i x_j + phi' x_ij
        return Jet(f0, f1 * self.du, f1 * self.dv,
                   f2 * self.du * self.du + f1 * self.duu,
                   f2 * self.du * self.dv + f1 * self.duv,
                   f2 * self.dv * self.dv + f1 * self.dvv)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.val + other, self.du, self.dv, self.duu, self.duv, self.dvv)
        return Jet(self.val + other.val, self.du + other.du, self.dv + other.dv,
                   self.duu + other.duu, self.duv + other.duv, self.dvv + other.dvv)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.du, -self.dv, -self.duu, -self.duv, -self.dvv)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.val * other, self.du * other, self.dv * other,
                       self.duu * other, self.duv * other, self.dvv * other)
        a, b = self, other
        return Jet(a.val * b.val,
                   a.du * b.val + a.val * b.du,
                   a.dv * b.val + a.val * b.dv,
                   a.duu * b.val + 2 * a.du * b.du + a.val * b.duu,
                   a.duv * b.val + a.du * b.dv + a.dv * b.du + a.val * b.duv,
                   a.dvv * b.val + 2 * a.dv * b.dv + a.val * b.dvv)

    __rmul__ = __mul__

    def reciprocal(self):
        x = self.val
        return self._chain(1.0 / x, -1.0 / x**2, 2.0 / x**3)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        x = self.val
        if p == 0:
            return Jet(np.ones_like(np.asarray(x, dtype=float)))
        if p == 1:
            return self
        if p == 2:
            return self * self
        return self._chain(x**p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2))

    def __rpow__(self, base):
        return exp(self * np.log(base))


def _lift(x):
    return x if isinstance(x, Jet) else Jet(np.asarray(x, dtype=float))


def sin(x):
    x = _lift(x)
    s, c = np.sin(x.val), np.cos(x.val)
    return x._chain(s, c, -s)


def cos(x):
    x = _lift(x)
    s, c = np.sin(x.val), np.cos(x.val)
    return x._chain(c, -s, -c)


def tan(x):
    x = _lift(x)
    t = np.tan(x.val)
    sec2 = 1.0 + t * t
    return x._chain(t, sec2, 2 * t * sec2)


def exp(x):
    x = _lift(x)
    e = np.exp(x.val)
    return x._chain(e, e, e)


def log(x):
    x = _lift(x)
    return x._chain(np.log(x.val), 1.0 / x.val, -1.0 / x.val**2)


def sqrt(x):
    x = _lift(x)
    r = np.sqrt(x.val)
    return x._chain(r, 0.5 / r, -0.25 / (r * x.val))


def sinh(x):
    x = _lift(x)
    s, c = np.sinh(x.val), np.cosh(x.val)
    return x._chain(s, c, s)


def cosh(x):
    x = _lift(x)
    s, c = np.sinh(x.val), np.cosh(x.val)
    return x._chain(c, s, c)


def tanh(x):
    x = _lift(x)
    t = np.tanh(x.val)
    d = 1.0 - t * t
    return x._chain(t, d, -2 * t * d)


FUNCTIONS = {f.__name__: f for f in (sin, cos, tan, exp, log, sqrt, sinh, cosh, tanh)}
BUILTIN_CONSTANTS = {"pi": np.pi, "e": np.e}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a ** b,
}


class Expression:
    """A parsed expression (or tuple of expressions) in the variables u and v."""

    def __init__(self, source, constants=None):
        self.source = source
        self.constants = dict(BUILTIN_CONSTANTS)
        self.constants.update(constants or {})
        try:
            tree = ast.parse(source.replace("^", "**").strip(), mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse expression {source!r}: {exc.msg}") from None
        self.variables = set()
        self._check(tree.body)
        self._tree = tree.body
        self.arity = len(tree.body.elts) if isinstance(tree.body, ast.Tuple) else 1

    def _check(self, node):
        if isinstance(node, ast.Tuple):
            for elt in node.elts:
                if isinstance(elt, ast.Tuple):
                    raise ConfigError("nested tuples are not allowed")
                self._check(elt)
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                raise ConfigError(f"operator {type(node.op).__name__} not allowed in {self.source!r}")
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.USub, ast.UAdd)):
                raise ConfigError(f"unary operator not allowed in {self.source!r}")
            self._check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
                raise ConfigError(f"unknown function in {self.source!r}")
            if len(node.args) != 1 or node.keywords:
                raise ConfigError("functions take exactly one argument")
            self._check(node.args[0])
        elif isinstance(node, ast.Name):
            if node.id in ("u", "v"):
                self.variables.add(node.id)
            elif node.id not in self.constants:
                raise ConfigError(f"unknown name {node.id!r} in {self.source!r}")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
                raise ConfigError(f"bad literal in {self.source!r}")
        else:
            raise ConfigError(f"unsupported syntax {type(node).__name__} in {self.source!r}")

    def _eval(self, node, env):
        if isinstance(node, ast.Tuple):
            return tuple(self._eval(e, env) for e in node.elts)
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            x = self._eval(node.operand, env)
            return -x if isinstance(node.op, ast.USub) else x
        if isinstance(node, ast.Call):
            return FUNCTIONS[node.func.id](self._eval(node.args[0], env))
        if isinstance(node, ast.Name):
            return env[node.id] if node.id in env else self.constants[node.id]
        return float(node.value)

    def jet(self, u, v):
        """Evaluate on Jet inputs; returns a Jet or a tuple of Jets."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        shape = u.shape
        out = self._eval(self._tree, {"u": Jet.variable_u(u), "v": Jet.variable_v(v)})
        items = out if isinstance(out, tuple) else (out,)
        full = tuple(_broadcast_jet(_lift(x), shape) for x in items)
        return full if isinstance(out, tuple) else full[0]

    def __call__(self, u=0.0, v=0.0):
        out = self.jet(u, v)
        if isinstance(out, tuple):
            return tuple(x.val for x in out)
        return out.val

    def __repr__(self):
        return f"Expression({self.source!r})"


def _broadcast_jet(j, shape):
    parts = [np.broadcast_to(np.asarray(getattr(j, k), dtype=float), shape).copy()
             for k in Jet.__slots__]
    return Jet(*parts)


def parse(source, constants=None):
    return Expression(source, constants)
