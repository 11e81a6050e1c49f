"""A small arithmetic expression language for catalog data.

Catalog files store polynomials, matrices and constants as strings such as
``"sqrt(3)/16*(u1^12 - 33*u1^8*u2^4 + u2^12)"``.  An expression is parsed once
and can then be evaluated in any ring that supports + - * and integer powers:
exact scalars, MultiPoly, Jet, mpmath numbers, or CycMatrix.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from math import comb

import mpmath

from .linalg import CycMatrix
from .scalar import Cyclotomic, as_cyclotomic, root_of_unity, sqrt_rational

_ALLOWED_FUNCS = {"sqrt", "zeta", "powersum", "esym", "binomial", "conjugate"}


class ExprError(ValueError):
    pass


def _exact_sqrt(x):
    x = as_cyclotomic(x)
    if not x.is_rational():
        raise ExprError("sqrt is only defined for rational arguments")
    return sqrt_rational(x.to_fraction())


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Cyclotomic))


class Ring:
    """How constants and variables become ring elements during evaluation."""

    numeric = False

    def const(self, c):
        return c


class NumericRing(Ring):
    numeric = True

    def __init__(self, digits: int):
        self.digits = digits

    def const(self, c):
        if isinstance(c, Cyclotomic):
            return c.embed(self.digits)
        if isinstance(c, Fraction):
            return mpmath.mpf(c.numerator) / c.denominator
        if isinstance(c, int):
            return mpmath.mpf(c)
        return c


EXACT = Ring()


def _mul(a, b):
    if isinstance(a, CycMatrix) and isinstance(b, CycMatrix):
        return a @ b
    if isinstance(a, CycMatrix):
        return a * b
    return a * b if not _is_exact(a) or _is_exact(b) else b * a


def _pow(a, k):
    if not isinstance(k, int):
        k = as_cyclotomic(k)
        if not k.is_rational() or k.to_fraction().denominator != 1:
            raise ExprError("exponents must be integers")
        k = int(k.to_fraction())
    if isinstance(a, CycMatrix):
        return a ** k
    if _is_exact(a):
        return as_cyclotomic(a) ** k
    if k < 0:
        return (1 / a) ** (-k)
    return a ** k


def _div(a, b):
    if not _is_exact(b) and not isinstance(b, (mpmath.mpc, mpmath.mpf)):
        raise ExprError("division is only allowed by constants")
    if _is_exact(b):
        b = as_cyclotomic(b)
        if not b:
            raise ExprError("division by zero")
        if _is_exact(a):
            return as_cyclotomic(a) / b
        if b.is_rational():
            return a * b.to_fraction() ** -1 if hasattr(a, "terms") else a / b.to_fraction()
        return a * b.inverse() if hasattr(a, "terms") or isinstance(a, CycMatrix) else a / b
    return a / b


class Expr:
    """A parsed expression; evaluate it with ``eval(env, ring)``."""

    def __init__(self, text: str):
        self.text = text
        src = re.sub(r"\^", "**", text.strip())
        try:
            self.tree = ast.parse(src, mode="eval").body
        except SyntaxError as exc:
            raise ExprError(f"cannot parse {text!r}") from exc
        self._check(self.tree)

    def _check(self, node):
        ok = (ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Call, ast.List, ast.Tuple,
              ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Load)
        for sub in ast.walk(node):
            if not isinstance(sub, ok):
                raise ExprError(f"unsupported syntax {type(sub).__name__} in {self.text!r}")
            if isinstance(sub, ast.Call):
                if not isinstance(sub.func, ast.Name) or sub.func.id not in _ALLOWED_FUNCS:
                    raise ExprError(f"unknown function in {self.text!r}")
            if isinstance(sub, ast.Constant) and not isinstance(sub.value, int):
                raise ExprError(f"only integer literals are allowed in {self.text!r}")

    def names(self) -> set:
        return {n.id for n in ast.walk(self.tree) if isinstance(n, ast.Name)} - _ALLOWED_FUNCS

    def eval(self, env: dict, ring: Ring = EXACT):
        return _Evaluator(env, ring).visit(self.tree)

    def __repr__(self):
        return f"Expr({self.text!r})"


_BUILTIN_CONSTS = {
    "i": lambda: root_of_unity(4, 1),
    "omega": lambda: root_of_unity(3, 1),
}


class _Evaluator:
    def __init__(self, env, ring):
        self.env = env
        self.ring = ring

    def visit(self, node):
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            if node.id in self.env:
                return self.env[node.id]
            if node.id in _BUILTIN_CONSTS:
                return _BUILTIN_CONSTS[node.id]()
            raise ExprError(f"unknown name {node.id!r}")
        if isinstance(node, (ast.List, ast.Tuple)):
            return [self.visit(e) for e in node.elts]
        if isinstance(node, ast.UnaryOp):
            v = self.visit(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = self.visit(node.left)
            b = self.visit(node.right)
            if isinstance(node.op, ast.Pow):
                return _pow(a, b)
            if isinstance(node.op, ast.Div):
                return self._div(a, b)
            a, b = self._align(a, b)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            return _mul(a, b)
        if isinstance(node, ast.Call):
            return self.call(node.func.id, [self.visit(a) for a in node.args])
        raise ExprError("unsupported node")

    def _align(self, a, b):
        """Embed exact constants into the numeric ring when the other side is numeric."""
        if self.ring.numeric:
            if _is_exact(a) and not _is_exact(b):
                a = self.ring.const(as_cyclotomic(a))
            elif _is_exact(b) and not _is_exact(a):
                b = self.ring.const(as_cyclotomic(b))
        elif _is_exact(a) and _is_exact(b):
            if not (isinstance(a, int) and isinstance(b, int)):
                a, b = as_cyclotomic(a), as_cyclotomic(b)
        return a, b

    def _div(self, a, b):
        if self.ring.numeric and _is_exact(b) and not _is_exact(a):
            b = self.ring.const(as_cyclotomic(b))
        return _div(a, b)

    def call(self, name, args):
        if name == "sqrt":
            (x,) = args
            if _is_exact(x):
                return _exact_sqrt(x)
            return mpmath.sqrt(x)
        if name == "zeta":
            n, k = args
            return root_of_unity(int(as_cyclotomic(n).to_fraction()), int(as_cyclotomic(k).to_fraction()))
        if name == "binomial":
            n, k = args
            return comb(n, k)
        if name == "conjugate":
            (x,) = args
            return as_cyclotomic(x).conj()
        if name == "powersum":
            m, items = args
            total = None
            for it in items:
                term = _pow(it, m)
                total = term if total is None else total + term
            return total
        if name == "esym":
            k, items = args
            return esym(k, items)
        raise ExprError(f"unknown function {name}")


def esym(k: int, items):
    """Elementary symmetric polynomial e_k of a list of ring elements."""
    e = [1] + [0] * k
    for it in items:
        for j in range(k, 0, -1):
            if j == 1:
                e[j] = e[j] + it if not (isinstance(e[j], int) and e[j] == 0) else it
            elif not (isinstance(e[j - 1], int) and e[j - 1] == 0):
                prod = _mul(e[j - 1], it)
                e[j] = prod if isinstance(e[j], int) and e[j] == 0 else e[j] + prod
    return e[k]


class Program:
    """An ordered list of named definitions evaluated in sequence."""

    def __init__(self, definitions):
        self.definitions = [(name, Expr(text) if isinstance(text, str) else ListExpr(text))
                            for name, text in definitions]

    def run(self, env: dict, ring: Ring = EXACT) -> dict:
        env = dict(env)
        for name, ex in self.definitions:
            env[name] = ex.eval(env, ring)
        return env


class ListExpr:
    def __init__(self, items):
        self.items = [Expr(t) if isinstance(t, str) else ListExpr(t) for t in items]

    def eval(self, env, ring=EXACT):
        return [it.eval(env, ring) for it in self.items]


def parse_constant(text) -> Cyclotomic:
    """Evaluate a constant expression exactly."""
    if isinstance(text, (int, Fraction)):
        return as_cyclotomic(text)
    v = Expr(str(text)).eval({})
    return as_cyclotomic(v)


def parse_matrix(rows, env=None) -> CycMatrix:
    env = env or {}
    return CycMatrix.from_rows([[as_cyclotomic(Expr(str(c)).eval(env)) for c in row] for row in rows])


def variable_names(prefix: str, n: int):
    return [f"{prefix}{k + 1}" for k in range(n)]
