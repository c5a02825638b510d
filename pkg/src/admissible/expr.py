"""A small expression language for meromorphic functions of ``z1..zn``.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] int)?
    atom   := number | 'i' | 'z'digits | func '(' expr ')' | '(' expr ')'
    func   := 'exp' | 'sin' | 'cos'

Functions are evaluated projectively: every subexpression is carried as a pair
of jets ``(N, D)`` with value ``N/D``.  Poles are then just points with
``D = 0`` and quantities such as ``|f'|/(1+|f|^2)`` can be computed at them
without special cases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .cplx import Jet, as_cvec
from .errors import CatalogError, DimensionError, EvaluationError, ParseError, PoleError

__all__ = [
    "AffinePullback",
    "BinOp",
    "Call",
    "FnHandle",
    "Imag",
    "Neg",
    "Num",
    "Pow",
    "Var",
    "CATALOG_NAMES",
    "catalog",
    "eval_jet",
    "evaluate",
    "function",
    "max_variable",
    "parse",
    "projective",
    "reciprocal",
    "to_text",
]

MAX_DEPTH = 100
FUNCTIONS = ("exp", "sin", "cos")


# --------------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Imag, Var, Neg, BinOp, Pow, Call]


def max_variable(node) -> int:
    """Largest variable index used in ``node`` (0 if none)."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, (Neg, Call)):
        return max_variable(node.arg)
    if isinstance(node, Pow):
        return max_variable(node.base)
    if isinstance(node, BinOp):
        return max(max_variable(node.left), max_variable(node.right))
    return 0


# ------------------------------------------------------------------------ parser

_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])",
    re.ASCII,
)


class _Parser:
    def __init__(self, src: str, arity: int):
        self.src = src
        self.arity = arity
        self.tokens = self._tokenize(src)
        self.pos = 0
        self.depth = 0

    def _offset(self, char_pos):
        return len(self.src[:char_pos].encode("utf-8"))

    def _tokenize(self, src):
        tokens = []
        i, n = 0, len(src)
        while True:
            while i < n and src[i].isspace():
                i += 1
            if i == n:
                break
            m = _TOKEN.match(src, i)
            if m is None:
                raise ParseError(f"unexpected character {src[i]!r}", self._offset(i))
            tokens.append((m.lastgroup, m.group(), i))
            i = m.end()
        tokens.append(("end", "", n))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, self._offset(tok[2]))

    def expect(self, text):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != text:
            found = tok[1] or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.take()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def _enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error("expression nested too deeply")

    def expr(self):
        self._enter()
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        self.depth -= 1
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            self._enter()
            node = Neg(self.unary())
            self.depth -= 1
            return node
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.peek()
            if tok[0] != "num" or not tok[1].isascii() or not tok[1].isdigit():
                raise self.error("exponent must be an integer")
            self.take()
            return Pow(base, sign * int(tok[1]))
        return base

    def atom(self):
        tok = self.peek()
        kind, text, _ = tok
        if kind == "num":
            self.take()
            value = float(text)
            if not np.isfinite(value):
                raise self.error("numeric literal overflows", tok)
            return Num(value)
        if kind == "name":
            self.take()
            if text == "i":
                return Imag()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if re.fullmatch(r"z[0-9]+", text):
                index = int(text[1:])
                if index < 1:
                    raise self.error("variables are numbered from z1", tok)
                if index > self.arity:
                    raise self.error(f"variable {text} exceeds arity {self.arity}", tok)
                return Var(index)
            raise self.error(f"unknown identifier {text!r}", tok)
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        found = text or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse(src, arity: int):
    """Parse function text in variables ``z1..z{arity}``.

    ``src`` may be ``str`` or ``bytes``; undecodable bytes raise
    :class:`ParseError` at their offset.
    """
    if isinstance(src, (bytes, bytearray)):
        try:
            src = bytes(src).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("invalid UTF-8", exc.start) from None
    return _Parser(src, arity).parse()


# ----------------------------------------------------------------------- printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _fmt_num(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def to_text(node) -> str:
    """Canonical text; ``parse(to_text(e))`` reproduces ``e`` exactly."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Var):
        return f"z{node.index}"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 5 or (isinstance(node.base, Num) and node.base.value < 0):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        if _prec(node.arg) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = to_text(node.left)
        right = to_text(node.right)
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
        sep = f" {node.op} " if p == 1 else node.op
        return f"{left}{sep}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# -------------------------------------------------------------------- evaluation


def _backend(name):
    if name == "numpy":
        return np.exp, np.sin, np.cos
    if name == "mpmath":
        import mpmath

        return mpmath.exp, mpmath.sin, mpmath.cos
    raise ValueError(f"unknown backend {name!r}")


def _is_zero(x):
    return bool(np.any(np.asarray(x) == 0))


def _eval_value(node, zs, fns):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Imag):
        return 1j
    if isinstance(node, Var):
        return zs[node.index - 1]
    if isinstance(node, Neg):
        return -_eval_value(node.arg, zs, fns)
    if isinstance(node, Pow):
        base = _eval_value(node.base, zs, fns)
        if node.exponent < 0:
            if _is_zero(base):
                raise PoleError("negative power of zero")
            return 1 / base ** (-node.exponent)
        return base**node.exponent
    if isinstance(node, Call):
        exp, sin, cos = fns
        fn = {"exp": exp, "sin": sin, "cos": cos}[node.func]
        return fn(_eval_value(node.arg, zs, fns))
    a = _eval_value(node.left, zs, fns)
    b = _eval_value(node.right, zs, fns)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if _is_zero(b):
        raise PoleError("division by zero")
    return a / b


def _normalize(N: Jet, D: Jet):
    s = np.maximum(np.abs(N.value), np.abs(D.value))
    ok = (s > 0) & np.isfinite(s)
    inv = np.where(ok, 1.0 / np.where(ok, s, 1.0), 1.0)
    return N.scaled(inv), D.scaled(inv)


def _eval_projective(node, zs, one):
    if isinstance(node, Num):
        return one.scaled(node.value), one
    if isinstance(node, Imag):
        return one.scaled(1j), one
    if isinstance(node, Var):
        return zs[node.index - 1], one
    if isinstance(node, Neg):
        N, D = _eval_projective(node.arg, zs, one)
        return -N, D
    if isinstance(node, Pow):
        N, D = _eval_projective(node.base, zs, one)
        k = node.exponent
        if k < 0:
            N, D = D, N
            k = -k
        return _normalize(N**k, D**k)
    if isinstance(node, Call):
        N, D = _eval_projective(node.arg, zs, one)
        if _is_zero(D.value):
            raise EvaluationError(f"{node.func} of a pole (essential singularity)")
        q = N / D
        return getattr(q, node.func)(), one
    N1, D1 = _eval_projective(node.left, zs, one)
    N2, D2 = _eval_projective(node.right, zs, one)
    if node.op in "+-":
        cross = N2 * D1
        if node.op == "-":
            cross = -cross
        return _normalize(N1 * D2 + cross, D1 * D2)
    if node.op == "*":
        return _normalize(N1 * N2, D1 * D2)
    return _normalize(N1 * D2, D1 * N2)


@dataclass(frozen=True)
class FnHandle:
    """An immutable, validated meromorphic function of ``arity`` variables."""

    expr: Expr
    arity: int
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.arity < 0:
            raise DimensionError("arity must be non-negative")
        if max_variable(self.expr) > self.arity:
            raise DimensionError(
                f"expression uses z{max_variable(self.expr)} but arity is {self.arity}"
            )

    @property
    def text(self) -> str:
        return to_text(self.expr)

    def _check(self, z):
        z = as_cvec(z)
        if z.shape[-1] != self.arity:
            raise DimensionError(f"point has {z.shape[-1]} coordinates, arity is {self.arity}")
        return z

    def projective(self, z):
        """Homogeneous pair of jets ``(N, D)`` with ``f = N/D`` at ``z``."""
        z = self._check(z)
        zs = Jet.variables(z)
        one = Jet.constant(1.0, self.arity, z.shape[:-1])
        N, D = _eval_projective(self.expr, zs, one)
        return N, D

    def __call__(self, z):
        return evaluate(self, z)

    def __str__(self):
        return self.name or self.text


def projective(f, z):
    return f.projective(z)


def eval_jet(f, z) -> Jet:
    """Value and complex gradient of ``f`` at ``z``; raises :class:`PoleError` at poles."""
    z = as_cvec(z)
    N, D = f.projective(z)
    if np.any(D.value == 0):
        if np.any((D.value == 0) & (N.value == 0)):
            raise EvaluationError("indeterminate 0/0")
        raise PoleError("pole", point=z)
    value = N.value / D.value
    grad = (D.value[..., None] * N.grad - N.value[..., None] * D.grad) / (D.value**2)[..., None]
    return Jet(value, grad)


def evaluate(f, z, backend: str = "numpy"):
    """Function values only. ``backend="mpmath"`` accepts a sequence of mpmath numbers."""
    if not isinstance(f, FnHandle):
        return eval_jet(f, z).value
    fns = _backend(backend)
    if backend == "numpy":
        z = f._check(z)
        zs = [z[..., j] for j in range(f.arity)]
        with np.errstate(all="ignore"):
            try:
                out = _eval_value(f.expr, zs, fns)
            except PoleError as exc:
                raise PoleError(str(exc), point=z) from None
        out = np.broadcast_to(np.asarray(out, dtype=complex), z.shape[:-1])
        return complex(out) if z.ndim == 1 else out.copy()
    zs = list(z)
    if len(zs) != f.arity:
        raise DimensionError(f"point has {len(zs)} coordinates, arity is {f.arity}")
    try:
        return _eval_value(f.expr, zs, fns)
    except PoleError as exc:
        raise PoleError(str(exc), point=zs) from None


class AffinePullback:
    """``g(w) = f(offset + A @ w)``; same projective interface as :class:`FnHandle`."""

    def __init__(self, f, offset, A):
        self.f = f
        self.offset = as_cvec(offset)
        self.A = np.asarray(A, dtype=complex)
        if self.A.shape[0] != f.arity or self.offset.shape[-1] != f.arity:
            raise DimensionError("pullback shape does not match arity")
        self.arity = self.A.shape[1]

    def ambient(self, w):
        w = as_cvec(w)
        return self.offset + w @ self.A.T

    def projective(self, w):
        w = as_cvec(w)
        if w.shape[-1] != self.arity:
            raise DimensionError("wrong number of coordinates")
        N, D = self.f.projective(self.ambient(w))
        return Jet(N.value, N.grad @ self.A), Jet(D.value, D.grad @ self.A)

    def __call__(self, w):
        return eval_jet(self, w).value


# ------------------------------------------------------------------------- catalog

_CATALOG = {
    "paper_counterexample": ("z2^2/(1 - z1)", 2),
    "tangential_cubed": ("z2^3/(1 - z1)", 2),
    "inv_normal": ("1/(1 - z1)", 1),
    "coordinate": ("z1", 1),
    "disc_linear": ("1 - z1", 1),
}
CATALOG_NAMES = tuple(_CATALOG) + ("constant(c)",)


def function(src, arity: int, name: str | None = None) -> FnHandle:
    return FnHandle(parse(src, arity), arity, name)


def catalog(name: str, arity: int = 2) -> FnHandle:
    """Built-in functions; ``constant(<expr>)`` takes any variable-free text."""
    m = re.fullmatch(r"\s*constant\s*\((.*)\)\s*", name)
    if m:
        expr = parse(m.group(1), 0)
        return FnHandle(expr, arity, f"constant({to_text(expr)})")
    if name not in _CATALOG:
        raise CatalogError(f"unknown catalog function {name!r}; known: {', '.join(CATALOG_NAMES)}")
    src, needed = _CATALOG[name]
    if arity < needed:
        raise DimensionError(f"{name} needs arity >= {needed}")
    return FnHandle(parse(src, arity), arity, name)


def reciprocal(f: FnHandle) -> FnHandle:
    name = f"1/({f.name})" if f.name else None
    return FnHandle(BinOp("/", Num(1.0), f.expr), f.arity, name)
